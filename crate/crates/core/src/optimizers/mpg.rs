//! Model policy gradient: optimize a diagonal Gaussian sampling policy with
//! Adam. Early iterations use the score-function estimator on the evaluated
//! samples; later ones evaluate many policy samples on a quadratic surrogate
//! fitted to nearby history, which costs no queries.
//!
//! We minimize, so the update is `phi <- phi - lr * grad` with advantage
//! `f - baseline`; this is the same as ascending the reward `-f`.
//! The spread is parameterized as `log sigma`, which keeps it positive.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::surrogate::fit_quadratic_at;
use super::{HpReader, Hyperparameters, OptimizerKind, Session};
use crate::error::{Error, Result};
use crate::objective::Objective;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;
pub const DEFAULT_T_DECAY: f64 = 10.0;
pub const DEFAULT_MODEL_SAMPLES: u64 = 65_536;

#[derive(Clone, Debug, PartialEq)]
pub struct MpgParams {
    pub gamma: f64,
    pub alpha: f64,
    pub log_sigma0: f64,
    pub k: usize,
    pub delta_r: f64,
    pub t_warm: u64,
    pub t_decay: f64,
    pub model_samples: u64,
    pub shots: u64,
    pub max_evals: Option<u64>,
}

impl MpgParams {
    pub fn from_map(map: &Hyperparameters) -> Result<Self> {
        let r = HpReader::new(OptimizerKind::Mpg, map)?;
        let k = r.count("k", r.get("k")?)? as usize;
        if k < 2 {
            return Err(Error::invalid("MPG needs k >= 2 samples for its baseline"));
        }
        let t_warm = r.get("t_warm")?;
        if t_warm < 0.0 || t_warm.fract() != 0.0 {
            return Err(Error::invalid("hyperparameter 't_warm' must be a nonnegative integer"));
        }
        let t_decay = r.get_or("t_decay", DEFAULT_T_DECAY);
        if t_decay <= 0.0 {
            return Err(Error::invalid("hyperparameter 't_decay' must be positive"));
        }
        Ok(MpgParams {
            gamma: r.nonneg("gamma")?,
            alpha: r.positive("alpha")?,
            log_sigma0: r.get("log_sigma0")?,
            k,
            delta_r: r.positive("delta_r")?,
            t_warm: t_warm as u64,
            t_decay,
            model_samples: r.count("model_samples", r.get_or("model_samples", DEFAULT_MODEL_SAMPLES as f64))?,
            shots: r.shots()?,
            max_evals: r.max_evals()?,
        })
    }

    pub fn rate(&self, i: u64) -> f64 {
        self.gamma * self.alpha.powf(i as f64 / self.t_decay)
    }
}

/// Diagonal Gaussian policy over parameter vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPolicy {
    pub mean: Vec<f64>,
    pub log_sigma: Vec<f64>,
}

impl GaussianPolicy {
    pub fn new(mean: Vec<f64>, log_sigma0: f64) -> Self {
        let d = mean.len();
        GaussianPolicy { mean, log_sigma: vec![log_sigma0; d] }
    }

    pub fn sigma(&self) -> Vec<f64> {
        self.log_sigma.iter().map(|l| l.exp()).collect()
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for ((xi, m), ls) in x.iter().zip(&self.mean).zip(&self.log_sigma) {
            let z = (xi - m) / ls.exp();
            s += -0.5 * z * z - ls - 0.5 * (2.0 * std::f64::consts::PI).ln();
        }
        s
    }

    /// `(d/d mean, d/d log_sigma)` of the log-density at `x`.
    pub fn score(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut gm = Vec::with_capacity(x.len());
        let mut gs = Vec::with_capacity(x.len());
        for ((xi, m), ls) in x.iter().zip(&self.mean).zip(&self.log_sigma) {
            let s2 = (2.0 * ls).exp();
            let dx = xi - m;
            gm.push(dx / s2);
            gs.push(dx * dx / s2 - 1.0);
        }
        (gm, gs)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.log_sigma)
            .map(|(m, ls)| {
                let z: f64 = StandardNormal.sample(rng);
                m + ls.exp() * z
            })
            .collect()
    }
}

/// `v - mean(v)`, computed relative to the first value so that a constant
/// input gives exact zeros.
fn advantages(values: &[f64]) -> Vec<f64> {
    let Some(&v0) = values.first() else { return Vec::new() };
    let shift = values.iter().map(|v| v - v0).sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - v0) - shift).collect()
}

/// Score-function gradient with a mean baseline:
/// `1/n sum_j grad log pi(x_j) (f_j - mean f)`, stacked as `[d mean, d log_sigma]`.
pub fn policy_gradient(policy: &GaussianPolicy, samples: &[Vec<f64>], values: &[f64]) -> Vec<f64> {
    let d = policy.mean.len();
    let n = samples.len() as f64;
    let mut g = vec![0.0; 2 * d];
    for (x, adv) in samples.iter().zip(advantages(values)) {
        let (gm, gs) = policy.score(x);
        for i in 0..d {
            g[i] += gm[i] * adv / n;
            g[d + i] += gs[i] * adv / n;
        }
    }
    g
}

/// Policy gradient from `m` policy samples scored on a quadratic model
/// centered at the policy mean. Works in standardized coordinates
/// `x = mean + sigma * e`, where the score terms are `e / sigma` and `e^2 - 1`.
fn model_policy_gradient<R: Rng + ?Sized>(
    policy: &GaussianPolicy,
    model: &super::QuadraticSurrogate,
    m: u64,
    rng: &mut R,
) -> Vec<f64> {
    let d = policy.mean.len();
    let sigma = policy.sigma();
    let offset: Vec<f64> = policy.mean.iter().zip(model.center()).map(|(a, c)| (a - c) / model.scale()).collect();
    let b = model.linear();
    let q = model.quadratic();
    let mut eps = vec![0.0; m as usize * d];
    let mut values = vec![0.0; m as usize];
    let mut z = vec![0.0; d];
    for j in 0..m as usize {
        let e = &mut eps[j * d..(j + 1) * d];
        for i in 0..d {
            e[i] = StandardNormal.sample(rng);
            z[i] = offset[i] + sigma[i] * e[i] / model.scale();
        }
        let mut v = model.constant();
        for i in 0..d {
            let mut row = 0.0;
            for l in 0..d {
                row += q[(i, l)] * z[l];
            }
            v += z[i] * (b[i] + row);
        }
        values[j] = v;
    }
    let adv = advantages(&values);
    let mut g = vec![0.0; 2 * d];
    for j in 0..m as usize {
        let adv = adv[j];
        let e = &eps[j * d..(j + 1) * d];
        for i in 0..d {
            g[i] += e[i] / sigma[i] * adv;
            g[d + i] += (e[i] * e[i] - 1.0) * adv;
        }
    }
    for v in &mut g {
        *v /= m as f64;
    }
    g
}

#[derive(Clone, Debug)]
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    fn step(&mut self, grad: &[f64], lr: f64) -> Vec<f64> {
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t);
        grad.iter()
            .enumerate()
            .map(|(i, g)| {
                self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * g;
                self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * g * g;
                let mh = self.m[i] / c1;
                let vh = self.v[i] / c2;
                -lr * mh / (vh.sqrt() + ADAM_EPS)
            })
            .collect()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn minimize<O, R>(s: &mut Session<'_, O>, x0: &[f64], p: &MpgParams, rng: &mut R) -> Result<()>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let d = x0.len();
    let mut policy = GaussianPolicy::new(x0.to_vec(), p.log_sigma0);
    let mut adam = Adam::new(2 * d);
    let mut history: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut i = 0;
    loop {
        // The greedy point of a Gaussian policy is its mean.
        let x = policy.mean.clone();
        let samples: Vec<Vec<f64>> = (0..p.k).map(|_| policy.sample(rng)).collect();
        let mut batch = Vec::with_capacity(p.k + 1);
        batch.push(x.clone());
        batch.extend(samples.iter().cloned());
        let Some(values) = s.evaluate(&batch, p.shots)? else { break };
        history.extend(batch.into_iter().zip(values.iter().copied()));
        let r_max = samples.iter().map(|v| dist(v, &x)).fold(0.0, f64::max);

        let grad = if i < p.t_warm {
            policy_gradient(&policy, &samples, &values[1..])
        } else {
            let radius = p.delta_r * r_max;
            let local: Vec<(Vec<f64>, f64)> = history.iter().filter(|(h, _)| dist(h, &x) < radius).cloned().collect();
            let model = fit_quadratic_at(&local, &x, radius);
            model_policy_gradient(&policy, &model, p.model_samples, rng)
        };
        let step = adam.step(&grad, p.rate(i));
        for j in 0..d {
            policy.mean[j] += step[j];
            policy.log_sigma[j] += step[d + j];
        }
        i += 1;
        s.record(&policy.mean);
    }
    Ok(())
}
