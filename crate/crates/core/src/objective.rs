//! Stochastic objectives with shot accounting.
//!
//! [`ObjectiveEngine`] wraps a [`ProblemSetup`] and answers energy and
//! gradient queries the way a quantum device would: with finite-shot noise and,
//! optionally, Gaussian over-rotation of every parameter. [`FunctionObjective`]
//! offers the same interface over an ordinary closure, which is what the
//! optimizer unit tests and toy tuning problems use.
//!
//! Values exposed through the [`Objective`] trait are always in the minimized
//! sense (`-C` for Max-Cut); the engine's inherent `query_*` methods return raw
//! energies.

use std::ops::{Add, AddAssign};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circuit::shift_pair;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::problems::ProblemSetup;
use crate::statevec::{DiagonalObservable, StateVector};

const SHOT_STREAM: u64 = 1;
const ROTATION_STREAM: u64 = 2;
/// Stream reserved for optimizer-side randomness.
pub const OPTIMIZER_STREAM: u64 = 3;

/// `ChaCha8` generator for one of the independent substreams of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Resources consumed by one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub shots: u64,
    pub circuits: u64,
    pub batches: u64,
}

impl QueryRecord {
    /// `circuits` circuits of `shots` each, sent as one batch.
    pub fn batch(circuits: u64, shots: u64) -> Self {
        QueryRecord { shots: circuits * shots, circuits, batches: 1 }
    }
}

impl Add for QueryRecord {
    type Output = QueryRecord;

    fn add(self, o: QueryRecord) -> QueryRecord {
        QueryRecord {
            shots: self.shots + o.shots,
            circuits: self.circuits + o.circuits,
            batches: self.batches + o.batches,
        }
    }
}

impl AddAssign for QueryRecord {
    fn add_assign(&mut self, o: QueryRecord) {
        *self = *self + o;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Standard deviation of the per-parameter over-rotation, in radians.
    pub rotation_sigma: f64,
}

impl NoiseConfig {
    pub fn rotation(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("rotation error must be a nonnegative number"));
        }
        Ok(NoiseConfig { rotation_sigma: sigma })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Sample computational-basis outcomes and average the diagonal values.
    SampledDiagonal,
    /// Exact expectation plus `N(0, lambda^2 / M)`.
    GaussianModel,
}

impl Estimator {
    /// Sampling for diagonal Hamiltonians, the Gaussian model otherwise.
    pub fn for_hamiltonian(h: &PauliSum) -> Self {
        if h.is_diagonal() {
            Estimator::SampledDiagonal
        } else {
            Estimator::GaussianModel
        }
    }
}

/// `sum_j |alpha_j|` over the non-identity terms.
pub fn lambda_bound(h: &PauliSum) -> f64 {
    h.non_identity().map(|t| t.coefficient.abs()).sum()
}

/// What optimizers see: a noisy function to minimize, with query accounting.
pub trait Objective {
    fn dim(&self) -> usize;

    /// One noisy estimate per point; all points go out as one batch.
    fn evaluate_batch(&mut self, points: &[Vec<f64>], shots: u64) -> Result<(Vec<f64>, QueryRecord)>;

    /// Gradient estimate, issued as one batch.
    fn gradient(&mut self, _point: &[f64], _shots: u64) -> Result<(Vec<f64>, QueryRecord)> {
        Err(Error::unsupported("this objective has no gradient queries"))
    }

    /// Circuits a gradient query would use (for budget checks).
    fn gradient_circuits(&self) -> Option<u64> {
        None
    }

    /// Noiseless score of a point, higher is better. Never shown to optimizers.
    fn exact_score(&self, point: &[f64]) -> f64;

    /// Score of the reference optimum the convergence criterion is measured against.
    fn optimum_score(&self) -> f64;

    fn rotation_sigma(&self) -> f64 {
        0.0
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::invalid("shot count must be at least 1"));
    }
    Ok(())
}

fn rotate(point: &[f64], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if sigma == 0.0 {
        return point.to_vec();
    }
    point
        .iter()
        .map(|&x| {
            let z: f64 = StandardNormal.sample(rng);
            x + sigma * z
        })
        .collect()
}

/// Noisy queries against a simulated ansatz.
#[derive(Clone, Debug)]
pub struct ObjectiveEngine {
    setup: Arc<ProblemSetup>,
    estimator: Estimator,
    noise: NoiseConfig,
    lambda: f64,
    observable: Option<DiagonalObservable>,
    shot_rng: ChaCha8Rng,
    rotation_rng: ChaCha8Rng,
}

impl ObjectiveEngine {
    pub fn new(setup: Arc<ProblemSetup>, estimator: Estimator, noise: NoiseConfig, seed: u64) -> Result<Self> {
        NoiseConfig::rotation(noise.rotation_sigma)?;
        let observable = match estimator {
            Estimator::SampledDiagonal => {
                let d = setup
                    .diagonal()
                    .ok_or_else(|| Error::invalid("sampled estimator requires a diagonal Hamiltonian"))?;
                Some(DiagonalObservable::new(d.to_vec()))
            }
            Estimator::GaussianModel => None,
        };
        let lambda = lambda_bound(&setup.hamiltonian);
        Ok(ObjectiveEngine {
            setup,
            estimator,
            noise,
            lambda,
            observable,
            shot_rng: substream(seed, SHOT_STREAM),
            rotation_rng: substream(seed, ROTATION_STREAM),
        })
    }

    /// Engine with the estimator matching the Hamiltonian and no rotation error.
    pub fn with_defaults(setup: Arc<ProblemSetup>, seed: u64) -> Result<Self> {
        let est = Estimator::for_hamiltonian(&setup.hamiltonian);
        Self::new(setup, est, NoiseConfig::default(), seed)
    }

    pub fn setup(&self) -> &ProblemSetup {
        &self.setup
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    fn estimate(&mut self, state: &StateVector, shots: u64) -> Result<f64> {
        match &self.observable {
            Some(obs) => obs.sample_mean(state, shots, &mut self.shot_rng),
            None => {
                let z: f64 = StandardNormal.sample(&mut self.shot_rng);
                Ok(self.setup.energy_of(state) + z * self.lambda / (shots as f64).sqrt())
            }
        }
    }

    /// Energy estimate at one point.
    pub fn query_energy(&mut self, point: &[f64], shots: u64) -> Result<(f64, QueryRecord)> {
        let (v, rec) = self.query_batch(&[point.to_vec()], shots)?;
        Ok((v[0], rec))
    }

    /// Energy estimates at several points, sent as one batch.
    pub fn query_batch(&mut self, points: &[Vec<f64>], shots: u64) -> Result<(Vec<f64>, QueryRecord)> {
        check_shots(shots)?;
        if points.is_empty() {
            return Err(Error::invalid("empty batch"));
        }
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != self.setup.dim() {
                return Err(Error::invalid(format!(
                    "point has {} parameters, ansatz takes {}",
                    p.len(),
                    self.setup.dim()
                )));
            }
            let rotated = rotate(p, self.noise.rotation_sigma, &mut self.rotation_rng);
            let state = self.setup.state(&rotated)?;
            out.push(self.estimate(&state, shots)?);
        }
        Ok((out, QueryRecord::batch(points.len() as u64, shots)))
    }

    /// Parameter-shift estimate of the energy gradient; `shots` per shifted circuit.
    pub fn parameter_shift_gradient(&mut self, point: &[f64], shots: u64) -> Result<(Vec<f64>, QueryRecord)> {
        check_shots(shots)?;
        if self.noise.rotation_sigma > 0.0 {
            return Err(Error::unsupported("parameter-shift gradients are not defined under rotation error"));
        }
        let ansatz = &self.setup.ansatz;
        if point.len() != ansatz.n_params() {
            return Err(Error::invalid("point has wrong dimension"));
        }
        let terms = ansatz.generator_terms();
        if terms.is_empty() {
            return Err(Error::unsupported("ansatz exposes no generator terms"));
        }
        let setup = self.setup.clone();
        let mut grad = vec![0.0; ansatz.n_params()];
        for term in &terms {
            let (plus, minus) = shift_pair(term);
            let fp = self.estimate(&setup.ansatz.prepare_shifted(point, Some(&plus))?, shots)?;
            let fm = self.estimate(&setup.ansatz.prepare_shifted(point, Some(&minus))?, shots)?;
            grad[term.param] += term.coefficient * (fp - fm);
        }
        Ok((grad, QueryRecord::batch(2 * terms.len() as u64, shots)))
    }
}

impl Objective for ObjectiveEngine {
    fn dim(&self) -> usize {
        self.setup.dim()
    }

    fn evaluate_batch(&mut self, points: &[Vec<f64>], shots: u64) -> Result<(Vec<f64>, QueryRecord)> {
        let s = self.setup.sense.sign();
        let (v, rec) = self.query_batch(points, shots)?;
        Ok((v.into_iter().map(|e| s * e).collect(), rec))
    }

    fn gradient(&mut self, point: &[f64], shots: u64) -> Result<(Vec<f64>, QueryRecord)> {
        let s = self.setup.sense.sign();
        let (g, rec) = self.parameter_shift_gradient(point, shots)?;
        Ok((g.into_iter().map(|e| s * e).collect(), rec))
    }

    fn gradient_circuits(&self) -> Option<u64> {
        Some(2 * self.setup.ansatz.generator_terms().len() as u64)
    }

    fn exact_score(&self, point: &[f64]) -> f64 {
        self.setup.score(point).unwrap_or(f64::NAN)
    }

    fn optimum_score(&self) -> f64 {
        self.setup.optimum_score
    }

    fn rotation_sigma(&self) -> f64 {
        self.noise.rotation_sigma
    }
}

type Func = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFunc = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Additive Gaussian noise of a [`FunctionObjective`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FunctionNoise {
    None,
    /// Fixed standard deviation per query regardless of shots.
    Fixed(f64),
    /// Standard deviation `sd / sqrt(shots)`.
    PerShot(f64),
}

/// A plain function to minimize, dressed up as a noisy objective. Its score
/// is `-f(x)`.
#[derive(Clone)]
pub struct FunctionObjective {
    f: Func,
    grad: Option<GradFunc>,
    dim: usize,
    noise: FunctionNoise,
    rotation_sigma: f64,
    optimum_score: f64,
    shot_rng: ChaCha8Rng,
    rotation_rng: ChaCha8Rng,
}

impl std::fmt::Debug for FunctionObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionObjective")
            .field("dim", &self.dim)
            .field("noise", &self.noise)
            .field("rotation_sigma", &self.rotation_sigma)
            .finish()
    }
}

impl FunctionObjective {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, seed: u64) -> Self {
        FunctionObjective {
            f: Arc::new(f),
            grad: None,
            dim,
            noise: FunctionNoise::None,
            rotation_sigma: 0.0,
            optimum_score: 0.0,
            shot_rng: substream(seed, SHOT_STREAM),
            rotation_rng: substream(seed, ROTATION_STREAM),
        }
    }

    /// `f(x) = |x|^2`.
    pub fn sphere(dim: usize, seed: u64) -> Self {
        Self::new(dim, |x| x.iter().map(|v| v * v).sum(), seed).with_gradient(|x| x.iter().map(|v| 2.0 * v).collect())
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_noise(mut self, noise: FunctionNoise) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_rotation_sigma(mut self, sigma: f64) -> Self {
        self.rotation_sigma = sigma;
        self
    }

    /// Score of the true minimum, `-min f`.
    pub fn with_optimum_score(mut self, score: f64) -> Self {
        self.optimum_score = score;
        self
    }

    /// Same function and noise, fresh random streams.
    pub fn reseeded(&self, seed: u64) -> Self {
        let mut out = self.clone();
        out.shot_rng = substream(seed, SHOT_STREAM);
        out.rotation_rng = substream(seed, ROTATION_STREAM);
        out
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn noise_sample(&mut self, shots: u64) -> f64 {
        let sd = match self.noise {
            FunctionNoise::None => return 0.0,
            FunctionNoise::Fixed(sd) => sd,
            FunctionNoise::PerShot(sd) => sd / (shots as f64).sqrt(),
        };
        let z: f64 = StandardNormal.sample(&mut self.shot_rng);
        sd * z
    }
}

impl Objective for FunctionObjective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate_batch(&mut self, points: &[Vec<f64>], shots: u64) -> Result<(Vec<f64>, QueryRecord)> {
        check_shots(shots)?;
        if points.is_empty() {
            return Err(Error::invalid("empty batch"));
        }
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != self.dim {
                return Err(Error::invalid("point has wrong dimension"));
            }
            let x = rotate(p, self.rotation_sigma, &mut self.rotation_rng);
            let v = (self.f)(&x) + self.noise_sample(shots);
            out.push(v);
        }
        Ok((out, QueryRecord::batch(points.len() as u64, shots)))
    }

    fn gradient(&mut self, point: &[f64], shots: u64) -> Result<(Vec<f64>, QueryRecord)> {
        check_shots(shots)?;
        if self.rotation_sigma > 0.0 {
            return Err(Error::unsupported("gradients are not defined under rotation error"));
        }
        let g = self.grad.clone().ok_or_else(|| Error::unsupported("no gradient supplied"))?;
        let mut out = g(point);
        for v in &mut out {
            *v += self.noise_sample(shots);
        }
        Ok((out, QueryRecord::batch(2 * self.dim as u64, shots)))
    }

    fn gradient_circuits(&self) -> Option<u64> {
        self.grad.as_ref().map(|_| 2 * self.dim as u64)
    }

    fn exact_score(&self, point: &[f64]) -> f64 {
        -(self.f)(point)
    }

    fn optimum_score(&self) -> f64 {
        self.optimum_score
    }

    fn rotation_sigma(&self) -> f64 {
        self.rotation_sigma
    }
}
