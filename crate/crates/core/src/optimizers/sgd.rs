//! Gradient descent on parameter-shift gradients with an exponentially
//! decaying rate `gamma * exp(-beta * j)`.

use super::{HpReader, Hyperparameters, OptimizerKind, Session};
use crate::error::Result;
use crate::objective::Objective;

#[derive(Clone, Debug, PartialEq)]
pub struct SgdParams {
    pub gamma: f64,
    pub beta: f64,
    pub shots: u64,
    pub max_evals: Option<u64>,
}

impl SgdParams {
    pub fn from_map(map: &Hyperparameters) -> Result<Self> {
        let r = HpReader::new(OptimizerKind::Sgd, map)?;
        Ok(SgdParams {
            gamma: r.nonneg("gamma")?,
            beta: r.nonneg("beta")?,
            shots: r.shots()?,
            max_evals: r.max_evals()?,
        })
    }

    /// Step size of iteration `j` (counted from 0).
    pub fn rate(&self, j: u64) -> f64 {
        self.gamma * (-self.beta * j as f64).exp()
    }
}

pub fn minimize<O: Objective + ?Sized>(s: &mut Session<'_, O>, x0: &[f64], p: &SgdParams) -> Result<()> {
    let mut x = x0.to_vec();
    let mut j = 0;
    while let Some(g) = s.gradient(&x, p.shots)? {
        let rate = p.rate(j);
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= rate * gi;
        }
        j += 1;
        s.record(&x);
    }
    Ok(())
}
