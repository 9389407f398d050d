//! Benchmark problems: Max-Cut QAOA on 3-regular graphs, Sherrington-Kirkpatrick
//! QAOA, and the 2x2 Hubbard model.
//!
//! Every problem is phrased as a minimization of `sense * <H>`; the reported
//! score is normalized so that higher is better and the range is `[0, 1]`.

pub mod graph;
pub mod hubbard;
pub mod optimum;
pub mod qaoa;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circuit::{shift_pair, Circuit};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::statevec::{extremal_eigenvalues, StateVector};

pub use graph::{gen_3regular, Graph};
pub use hubbard::{hubbard_ansatz_state, hubbard_hamiltonian, hubbard_initial_state, HubbardTerms};
pub use optimum::{local_minimize, LocalOptimum};
pub use qaoa::{
    brute_force_diagonal_extrema, maxcut_hamiltonian, qaoa_circuit, qaoa_state, sk_hamiltonian, SkCouplings,
};

/// Length of the random perturbation added to QAOA optima.
pub const QAOA_GUESS_PERTURBATION: f64 = 0.1;
/// Gradient-norm threshold for an ansatz optimum.
pub const OPTIMUM_GTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    #[serde(rename = "maxcut3reg", alias = "3reg")]
    MaxCut3Reg,
    Sk,
    Hubbard,
}

impl ProblemKind {
    pub fn is_qaoa(self) -> bool {
        !matches!(self, ProblemKind::Hubbard)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::MaxCut3Reg => "maxcut3reg",
            ProblemKind::Sk => "sk",
            ProblemKind::Hubbard => "hubbard",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "maxcut3reg" | "3reg" | "maxcut" => Ok(ProblemKind::MaxCut3Reg),
            "sk" => Ok(ProblemKind::Sk),
            "hubbard" => Ok(ProblemKind::Hubbard),
            other => Err(Error::invalid(format!("unknown problem kind '{other}'"))),
        }
    }
}

fn default_n() -> usize {
    8
}
fn default_t() -> f64 {
    1.0
}
fn default_u() -> f64 {
    4.0
}

/// Serializable description of one problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// Qubit count for the QAOA problems (ignored for Hubbard).
    #[serde(default = "default_n")]
    pub n: usize,
    pub p: usize,
    #[serde(default)]
    pub instance_seed: u64,
    /// Seed of the perturbation applied to QAOA optima; defaults to `instance_seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess_seed: Option<u64>,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default = "default_u")]
    pub u: f64,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, p: usize) -> Self {
        ProblemSpec { kind, n: 8, p, instance_seed: 0, guess_seed: None, t: 1.0, u: 4.0 }
    }

    pub fn with_instance_seed(mut self, seed: u64) -> Self {
        self.instance_seed = seed;
        self
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ProblemKind::Hubbard => 3 * self.p,
            _ => 2 * self.p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Instance {
    Graph(Graph),
    Sk(SkCouplings),
    Hubbard { t: f64, u: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScoreNorm {
    /// `E / C_max`.
    ApproximationRatio { c_max: f64 },
    /// `(E - E_max) / (E_min - E_max)`.
    Normalized { e_min: f64, e_max: f64 },
}

impl ScoreNorm {
    pub fn score(&self, energy: f64) -> f64 {
        match *self {
            ScoreNorm::ApproximationRatio { c_max } => energy / c_max,
            ScoreNorm::Normalized { e_min, e_max } => (energy - e_max) / (e_min - e_max),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemSetup {
    pub spec: ProblemSpec,
    pub instance: Instance,
    pub hamiltonian: PauliSum,
    pub sense: Sense,
    pub ansatz: Circuit,
    pub norm: ScoreNorm,
    /// Nearest local optimum of the noiseless objective.
    pub optimum: Vec<f64>,
    pub optimum_score: f64,
    pub initial_guess: Vec<f64>,
    diag: Option<Arc<[f64]>>,
}

impl ProblemSetup {
    pub fn build(spec: &ProblemSpec) -> Result<Self> {
        if spec.p == 0 {
            return Err(Error::invalid("ansatz depth p must be at least 1"));
        }
        let (instance, hamiltonian, sense, norm, ansatz) = match spec.kind {
            ProblemKind::MaxCut3Reg => {
                let g = gen_3regular(spec.n, spec.instance_seed)?;
                let h = maxcut_hamiltonian(&g)?;
                let (_, c_max, _) = brute_force_diagonal_extrema(&h)?;
                let ansatz = qaoa_circuit(&h, spec.p)?;
                (Instance::Graph(g), h, Sense::Maximize, ScoreNorm::ApproximationRatio { c_max }, ansatz)
            }
            ProblemKind::Sk => {
                let sk = SkCouplings::random(spec.n, spec.instance_seed)?;
                let h = sk.hamiltonian()?;
                let (e_min, e_max, _) = brute_force_diagonal_extrema(&h)?;
                let ansatz = qaoa_circuit(&h, spec.p)?;
                (Instance::Sk(sk), h, Sense::Minimize, ScoreNorm::Normalized { e_min, e_max }, ansatz)
            }
            ProblemKind::Hubbard => {
                let terms = hubbard_hamiltonian(spec.t, spec.u)?;
                let (e_min, e_max) = extremal_eigenvalues(&terms.hamiltonian)?;
                let ansatz = hubbard::hubbard_circuit(&terms, spec.p)?;
                (
                    Instance::Hubbard { t: spec.t, u: spec.u },
                    terms.hamiltonian,
                    Sense::Minimize,
                    ScoreNorm::Normalized { e_min, e_max },
                    ansatz,
                )
            }
        };
        let diag = hamiltonian.diagonal().map(Arc::from);
        let mut setup = ProblemSetup {
            spec: spec.clone(),
            instance,
            hamiltonian,
            sense,
            ansatz,
            norm,
            optimum: Vec::new(),
            optimum_score: f64::NAN,
            initial_guess: Vec::new(),
            diag,
        };
        if spec.kind.is_qaoa() {
            let start = setup.qaoa_optimum_start()?;
            let (opt, score) = setup.find_ansatz_optimum(&start)?;
            setup.optimum = opt;
            setup.optimum_score = score;
            setup.initial_guess = perturbed_guess(&setup.optimum, spec.guess_seed.unwrap_or(spec.instance_seed));
        } else {
            setup.initial_guess = hubbard::hubbard_ramp_guess(spec.p, spec.t, spec.u);
            let (opt, score) = setup.find_ansatz_optimum(&setup.initial_guess.clone())?;
            setup.optimum = opt;
            setup.optimum_score = score;
        }
        Ok(setup)
    }

    pub fn kind(&self) -> ProblemKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.ansatz.n_params()
    }

    /// Diagonal of the Hamiltonian for the QAOA problems.
    pub fn diagonal(&self) -> Option<&[f64]> {
        self.diag.as_deref()
    }

    pub fn state(&self, x: &[f64]) -> Result<StateVector> {
        self.ansatz.prepare(x)
    }

    pub fn energy_of(&self, state: &StateVector) -> f64 {
        match &self.diag {
            Some(d) => state.expectation_diagonal(d),
            None => state.expectation(&self.hamiltonian).expect("register sizes agree"),
        }
    }

    /// Exact `<H>` at `x`.
    pub fn energy(&self, x: &[f64]) -> Result<f64> {
        Ok(self.energy_of(&self.state(x)?))
    }

    /// Exact minimized objective `sense * <H>`.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.sense.sign() * self.energy(x)?)
    }

    pub fn normalized_score(&self, energy: f64) -> f64 {
        self.norm.score(energy)
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(self.normalized_score(self.energy(x)?))
    }

    /// Noiseless parameter-shift gradient of the minimized objective.
    pub fn exact_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut grad = vec![0.0; self.dim()];
        for term in self.ansatz.generator_terms() {
            let (plus, minus) = shift_pair(&term);
            let fp = self.energy_of(&self.ansatz.prepare_shifted(x, Some(&plus))?);
            let fm = self.energy_of(&self.ansatz.prepare_shifted(x, Some(&minus))?);
            grad[term.param] += term.coefficient * (fp - fm);
        }
        let s = self.sense.sign();
        Ok(grad.into_iter().map(|g| s * g).collect())
    }

    /// Local optimum of the noiseless objective reached from `x0`.
    pub fn find_ansatz_optimum(&self, x0: &[f64]) -> Result<(Vec<f64>, f64)> {
        if x0.len() != self.dim() {
            return Err(Error::invalid("starting point has wrong dimension"));
        }
        let r = local_minimize(
            |x| self.objective(x).unwrap_or(f64::INFINITY),
            |x| self.exact_gradient(x).expect("dimension checked"),
            x0,
            OPTIMUM_GTOL,
            2000,
        )?;
        let score = self.score(&r.x)?;
        Ok((r.x, score))
    }

    /// Starting point for the QAOA optimum search: a grid search at p = 1,
    /// then layer-by-layer linear interpolation of the schedule with a local
    /// optimization at each depth.
    fn qaoa_optimum_start(&self) -> Result<Vec<f64>> {
        let h = &self.hamiltonian;
        let sign = self.sense.sign();
        let p1 = qaoa_circuit(h, 1)?;
        let f1 = |x: &[f64]| -> f64 { sign * self.energy_of(&p1.prepare(x).expect("two parameters")) };
        let (ng, nb) = (64, 32);
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut best: Option<(f64, [f64; 2])> = None;
        for i in 0..=ng {
            let gamma = -half_pi + std::f64::consts::PI * i as f64 / ng as f64;
            for j in 0..=nb {
                let beta = -half_pi / 2.0 + half_pi * j as f64 / nb as f64;
                let v = f1(&[gamma, beta]);
                let better = match best {
                    None => true,
                    Some((bv, bx)) => {
                        let norm_new = gamma.hypot(beta);
                        let norm_old = bx[0].hypot(bx[1]);
                        v < bv - 1e-9
                            || ((v - bv).abs() <= 1e-9
                                && (norm_new < norm_old - 1e-12
                                    || ((norm_new - norm_old).abs() <= 1e-12 && gamma > bx[0])))
                    }
                };
                if better {
                    best = Some((v, [gamma, beta]));
                }
            }
        }
        let start = best.expect("nonempty grid").1;
        let r = local_minimize(
            f1,
            |x| {
                let mut g = [0.0; 2];
                for term in p1.generator_terms() {
                    let (a, b) = shift_pair(&term);
                    let fp = self.energy_of(&p1.prepare_shifted(x, Some(&a)).expect("valid"));
                    let fm = self.energy_of(&p1.prepare_shifted(x, Some(&b)).expect("valid"));
                    g[term.param] += term.coefficient * (fp - fm);
                }
                g.iter().map(|v| sign * v).collect()
            },
            &start,
            OPTIMUM_GTOL,
            2000,
        )?;
        let (mut gammas, mut betas) = (vec![r.x[0]], vec![r.x[1]]);
        for depth in 2..=self.spec.p {
            gammas = interpolate_schedule(&gammas);
            betas = interpolate_schedule(&betas);
            let circuit = qaoa_circuit(h, depth)?;
            let x0: Vec<f64> = gammas.iter().chain(&betas).copied().collect();
            if depth == self.spec.p {
                return Ok(x0);
            }
            let f = |x: &[f64]| sign * self.energy_of(&circuit.prepare(x).expect("valid"));
            let g = |x: &[f64]| {
                let mut g = vec![0.0; 2 * depth];
                for term in circuit.generator_terms() {
                    let (a, b) = shift_pair(&term);
                    let fp = self.energy_of(&circuit.prepare_shifted(x, Some(&a)).expect("valid"));
                    let fm = self.energy_of(&circuit.prepare_shifted(x, Some(&b)).expect("valid"));
                    g[term.param] += term.coefficient * (fp - fm);
                }
                g.into_iter().map(|v| sign * v).collect()
            };
            let r = local_minimize(f, g, &x0, OPTIMUM_GTOL, 2000)?;
            gammas = r.x[..depth].to_vec();
            betas = r.x[depth..].to_vec();
        }
        Ok(gammas.into_iter().chain(betas).collect())
    }

    /// Initial guess for a given seed: QAOA optima are perturbed by a random
    /// direction of length 0.1; Hubbard uses the deterministic ramp.
    pub fn initial_guess_for_seed(&self, seed: u64) -> Vec<f64> {
        if self.spec.kind.is_qaoa() {
            perturbed_guess(&self.optimum, seed)
        } else {
            hubbard::hubbard_ramp_guess(self.spec.p, self.spec.t, self.spec.u)
        }
    }

    pub fn document(&self) -> ProblemDocument {
        ProblemDocument {
            spec: self.spec.clone(),
            instance: self.instance.clone(),
            sense: self.sense,
            norm: self.norm,
            optimum: self.optimum.clone(),
            optimum_score: self.optimum_score,
            initial_guess: self.initial_guess.clone(),
        }
    }
}

/// Linear interpolation of a depth-p schedule to depth p + 1.
pub fn interpolate_schedule(prev: &[f64]) -> Vec<f64> {
    let p = prev.len();
    let at = |i: isize| if i < 0 || i as usize >= p { 0.0 } else { prev[i as usize] };
    (0..=p)
        .map(|i| {
            let i1 = i as f64 + 1.0;
            let a = (i1 - 1.0) / p as f64 * at(i as isize - 1);
            let b = (p as f64 - i1 + 1.0) / p as f64 * at(i as isize);
            a + b
        })
        .collect()
}

/// `center + 0.1 * u` for a uniformly random unit vector `u`.
pub fn perturbed_guess(center: &[f64], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<f64> = (0..center.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    center.iter().zip(dir).map(|(c, d)| c + QAOA_GUESS_PERTURBATION * d / norm).collect()
}

/// Everything needed to reproduce an instance on another machine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemDocument {
    pub spec: ProblemSpec,
    pub instance: Instance,
    pub sense: Sense,
    pub norm: ScoreNorm,
    pub optimum: Vec<f64>,
    pub optimum_score: f64,
    pub initial_guess: Vec<f64>,
}
