//! Simultaneous perturbation stochastic approximation.
//!
//! Iteration `j` (from 1) perturbs along a random sign vector `Delta` by
//! `c_j = c / j^gamma`, evaluates both sides as one batch of two circuits and
//! steps by `a_j = a / (j + A)^alpha`.

use rand::Rng;

use super::{HpReader, Hyperparameters, OptimizerKind, Session};
use crate::error::Result;
use crate::objective::Objective;

#[derive(Clone, Debug, PartialEq)]
pub struct SpsaParams {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub stability: f64,
    pub gamma: f64,
    pub shots: u64,
    pub max_evals: Option<u64>,
}

impl SpsaParams {
    pub fn from_map(map: &Hyperparameters) -> Result<Self> {
        let r = HpReader::new(OptimizerKind::Spsa, map)?;
        Ok(SpsaParams {
            a: r.nonneg("a")?,
            c: r.positive("c")?,
            alpha: r.nonneg("alpha")?,
            stability: r.nonneg("A")?,
            gamma: r.nonneg("gamma")?,
            shots: r.shots()?,
            max_evals: r.max_evals()?,
        })
    }

    pub fn perturbation(&self, j: u64) -> f64 {
        self.c / (j as f64).powf(self.gamma)
    }

    pub fn rate(&self, j: u64) -> f64 {
        self.a / (j as f64 + self.stability).powf(self.alpha)
    }
}

/// A vector of independent fair signs.
pub fn random_signs<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// `(f_plus - f_minus) / (2 c) / Delta_k` for each component.
pub fn gradient_estimate(f_plus: f64, f_minus: f64, c: f64, delta: &[f64]) -> Vec<f64> {
    let diff = (f_plus - f_minus) / (2.0 * c);
    delta.iter().map(|d| diff / d).collect()
}

pub fn minimize<O, R>(s: &mut Session<'_, O>, x0: &[f64], p: &SpsaParams, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let mut x = x0.to_vec();
    let mut j = 1;
    loop {
        let delta = random_signs(x.len(), rng);
        let cj = p.perturbation(j);
        let plus: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + cj * d).collect();
        let minus: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a - cj * d).collect();
        let Some(v) = s.evaluate(&[plus, minus], p.shots)? else { break };
        let g = gradient_estimate(v[0], v[1], cj, &delta);
        let aj = p.rate(j);
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= aj * gi;
        }
        j += 1;
        s.record(&x);
    }
    Ok(())
}
