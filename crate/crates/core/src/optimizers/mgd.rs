//! Model gradient descent: sample around the incumbent, fit a quadratic to
//! every evaluated point inside the sampling ball, and step along the model
//! gradient.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::surrogate::{fit_quadratic_at, n_features};
use super::{HpReader, Hyperparameters, OptimizerKind, Session, StopReason};
use crate::error::{Error, Result};
use crate::objective::Objective;

#[derive(Clone, Debug, PartialEq)]
pub struct MgdParams {
    pub gamma: f64,
    pub delta: f64,
    /// Sample number relative to the number of quadratic coefficients.
    pub eta: f64,
    pub alpha: f64,
    pub stability: f64,
    pub xi: f64,
    /// Step-size tolerance; 0 disables it.
    pub eps: f64,
    pub shots: u64,
    pub max_evals: Option<u64>,
}

impl MgdParams {
    pub fn from_map(map: &Hyperparameters) -> Result<Self> {
        let r = HpReader::new(OptimizerKind::Mgd, map)?;
        Ok(MgdParams {
            gamma: r.nonneg("gamma")?,
            delta: r.positive("delta")?,
            eta: r.positive("eta")?,
            alpha: r.nonneg("alpha")?,
            stability: r.nonneg("A")?,
            xi: r.nonneg("xi")?,
            eps: {
                let e = r.get_or("eps", 0.0);
                if e < 0.0 {
                    return Err(Error::invalid("hyperparameter 'eps' must be nonnegative"));
                }
                e
            },
            shots: r.shots()?,
            max_evals: r.max_evals()?,
        })
    }

    /// Samples per iteration, `floor(eta * (d + 1)(d + 2) / 2)`, at least one.
    pub fn sample_number(&self, d: usize) -> usize {
        ((self.eta * n_features(d) as f64).floor() as usize).max(1)
    }

    pub fn radius(&self, i: u64) -> f64 {
        self.delta / ((i + 1) as f64).powf(self.xi)
    }

    pub fn rate(&self, i: u64) -> f64 {
        self.gamma / ((i + 1) as f64 + self.stability).powf(self.alpha)
    }
}

/// Uniform sample from the open ball of radius `r` around `center`.
pub fn sample_ball<R: Rng + ?Sized>(center: &[f64], r: f64, rng: &mut R) -> Vec<f64> {
    let d = center.len();
    let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let radius = r * u.powf(1.0 / d as f64);
    center.iter().zip(dir).map(|(c, v)| c + radius * v / norm).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn minimize<O, R>(s: &mut Session<'_, O>, x0: &[f64], p: &MgdParams, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let k = p.sample_number(x0.len());
    let mut history: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut x = x0.to_vec();
    let mut i = 0;
    loop {
        let radius = p.radius(i);
        let mut batch = Vec::with_capacity(k + 1);
        batch.push(x.clone());
        batch.extend((0..k).map(|_| sample_ball(&x, radius, rng)));
        let Some(values) = s.evaluate(&batch, p.shots)? else { break };
        history.extend(batch.into_iter().zip(values));

        let local: Vec<(Vec<f64>, f64)> = history.iter().filter(|(h, _)| dist(h, &x) < radius).cloned().collect();
        let model = fit_quadratic_at(&local, &x, radius);
        let g = model.gradient(&x);
        let rate = p.rate(i);
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rate * gnorm < p.eps {
            s.stop_with(StopReason::Tolerance);
            break;
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= rate * gi;
        }
        i += 1;
        s.record(&x);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::substream;

    #[test]
    fn sample_number_from_eta() {
        let p = MgdParams {
            gamma: 0.1,
            delta: 0.1,
            eta: 1.2,
            alpha: 0.0,
            stability: 0.0,
            xi: 0.0,
            eps: 0.0,
            shots: 1,
            max_evals: None,
        };
        assert_eq!(p.sample_number(2), 7);
        assert_eq!(MgdParams { eta: 0.01, ..p.clone() }.sample_number(2), 1);
        assert_eq!(p.sample_number(10), 79);
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = substream(1, 3);
        let c = [0.5, -0.5, 2.0];
        for _ in 0..1000 {
            assert!(dist(&sample_ball(&c, 0.1, &mut rng), &c) < 0.1);
        }
    }
}
