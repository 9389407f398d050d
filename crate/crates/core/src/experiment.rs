//! Multi-seed experiment runner: run configurations, convergence metrics,
//! success statistics and gate-error sweeps.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costmodel::CostModelParams;
use crate::error::{Error, Result};
use crate::hypertune::default_hyperparameters;
use crate::objective::{Estimator, FunctionObjective, NoiseConfig, ObjectiveEngine};
use crate::optimizers::{run_optimizer, Hyperparameters, OptimizerConfig, OptimizerKind, OptimizerTrace};
use crate::problems::{ProblemKind, ProblemSetup, ProblemSpec};

pub const CONFIG_SCHEMA: u32 = 1;
/// Time statistics are only reported above this success probability.
pub const REPORT_THRESHOLD: f64 = 0.75;
pub const DEFAULT_PRECISION: f64 = 1e-3;
pub const GATE_ERROR_PRECISION: f64 = 5e-3;
pub const DEFAULT_EPSILONS: [f64; 6] = [0.001, 0.002, 0.005, 0.01, 0.02, 0.05];
pub const TUNING_SEED: u64 = 1000;

pub fn default_seeds() -> Vec<u64> {
    (0..50).collect()
}

/// 1500 s for QAOA, one day for Hubbard.
pub fn default_time_limit(kind: ProblemKind) -> f64 {
    if kind.is_qaoa() {
        1500.0
    } else {
        86_400.0
    }
}

/// Either the shipped tuned table entry or an explicit map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HyperparameterChoice {
    Named(String),
    Explicit(Hyperparameters),
}

impl Default for HyperparameterChoice {
    fn default() -> Self {
        HyperparameterChoice::Named("defaults".into())
    }
}

fn default_precisions() -> Vec<f64> {
    vec![DEFAULT_PRECISION]
}

fn default_cost() -> CostModelParams {
    CostModelParams::default()
}

/// One suite: a problem, an optimizer and its settings, run over many seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub problem: ProblemSpec,
    pub optimizer: OptimizerKind,
    #[serde(default)]
    pub hyperparameters: HyperparameterChoice,
    /// Entries overriding the chosen table, e.g. a different shot count.
    #[serde(default, skip_serializing_if = "Hyperparameters::is_empty")]
    pub overrides: Hyperparameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<Estimator>,
    #[serde(default)]
    pub rotation_sigma: f64,
    #[serde(default = "default_cost")]
    pub cost: CostModelParams,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<f64>,
    #[serde(default = "default_precisions")]
    pub precisions: Vec<f64>,
}

impl RunConfig {
    pub fn new(problem: ProblemSpec, optimizer: OptimizerKind) -> Self {
        RunConfig {
            schema: CONFIG_SCHEMA,
            label: None,
            problem,
            optimizer,
            hyperparameters: HyperparameterChoice::default(),
            overrides: Hyperparameters::new(),
            estimator: None,
            rotation_sigma: 0.0,
            cost: default_cost(),
            seeds: default_seeds(),
            time_limit: None,
            precisions: default_precisions(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("config is not valid JSON: {e}")))?;
        match value.get("schema").and_then(|v| v.as_u64()) {
            Some(1) => {}
            Some(v) => return Err(Error::invalid(format!("unsupported config schema {v}"))),
            None => return Err(Error::invalid("config lacks a \"schema\" field")),
        }
        let config: RunConfig =
            serde_json::from_value(value).map_err(|e| Error::invalid(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit.unwrap_or_else(|| default_time_limit(self.problem.kind))
    }

    /// Name used in output files.
    pub fn suite_name(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let mut s = format!("{}-p{}-{}-{}", self.problem.kind, self.problem.p, self.optimizer, self.cost.scenario);
        if self.rotation_sigma > 0.0 {
            s.push_str(&format!("-eps{}", self.rotation_sigma));
        }
        s
    }

    /// The hyperparameter map this config resolves to.
    pub fn resolved_hyperparameters(&self) -> Result<Hyperparameters> {
        let mut map = match &self.hyperparameters {
            HyperparameterChoice::Named(n) if n == "defaults" => {
                default_hyperparameters(self.problem.kind, self.problem.p, self.optimizer)?
            }
            HyperparameterChoice::Named(n) => {
                return Err(Error::invalid(format!("unknown hyperparameter set '{n}' (expected \"defaults\")")))
            }
            HyperparameterChoice::Explicit(m) => m.clone(),
        };
        map.extend(self.overrides.iter().map(|(k, v)| (k.clone(), *v)));
        Ok(map)
    }

    pub fn optimizer_config(&self) -> Result<OptimizerConfig> {
        OptimizerConfig::from_map(self.optimizer, &self.resolved_hyperparameters()?)
    }

    /// Checks everything that can be checked without building the problem.
    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::invalid(format!("unsupported config schema {}", self.schema)));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("config needs at least one seed"));
        }
        let tl = self.time_limit();
        if !(tl >= 0.0 && tl.is_finite()) {
            return Err(Error::invalid("time limit must be a nonnegative number of seconds"));
        }
        if self.precisions.is_empty() || self.precisions.iter().any(|p| p.is_nan() || *p <= 0.0) {
            return Err(Error::invalid("precision targets must be positive"));
        }
        if self.problem.p == 0 {
            return Err(Error::invalid("ansatz depth p must be at least 1"));
        }
        NoiseConfig::rotation(self.rotation_sigma)?;
        if self.rotation_sigma > 0.0 && self.optimizer.uses_gradients() {
            return Err(Error::unsupported(format!("{} cannot run under rotation error", self.optimizer)));
        }
        self.cost.validate()?;
        self.optimizer_config()?;
        Ok(())
    }
}

/// What a suite optimizes: a simulated problem or a plain test function.
// built once per suite, so the size of the function variant does not matter
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum Target {
    Problem(Arc<ProblemSetup>),
    Function { objective: FunctionObjective, x0: Vec<f64> },
}

impl Target {
    pub fn optimum_score(&self) -> f64 {
        match self {
            Target::Problem(s) => s.optimum_score,
            Target::Function { objective, .. } => crate::objective::Objective::optimum_score(objective),
        }
    }

    /// One optimizer run. QAOA and Hubbard runs start from the instance's fixed
    /// initial guess; the seed drives shot noise, rotation error and the optimizer.
    pub fn run(
        &self,
        config: &OptimizerConfig,
        estimator: Option<Estimator>,
        rotation_sigma: f64,
        cost: CostModelParams,
        time_limit: f64,
        seed: u64,
    ) -> Result<OptimizerTrace> {
        let noise = NoiseConfig::rotation(rotation_sigma)?;
        match self {
            Target::Problem(setup) => {
                let est = estimator.unwrap_or_else(|| Estimator::for_hamiltonian(&setup.hamiltonian));
                let mut engine = ObjectiveEngine::new(setup.clone(), est, noise, seed)?;
                run_optimizer(config, &mut engine, &setup.initial_guess, cost, Some(time_limit), seed)
            }
            Target::Function { objective, x0 } => {
                let mut f = objective.reseeded(seed).with_rotation_sigma(noise.rotation_sigma);
                run_optimizer(config, &mut f, x0, cost, Some(time_limit), seed)
            }
        }
    }
}

/// Earliest candidate time after which every candidate scores within
/// `precision` of `optimum`; `None` if the final candidate is still outside.
pub fn convergence_time(trace: &OptimizerTrace, optimum: f64, precision: f64) -> Option<f64> {
    let pts = &trace.points;
    let within = |s: f64| (s - optimum).abs() <= precision;
    match pts.iter().rposition(|p| !within(p.exact_score)) {
        None => pts.first().map(|p| p.time),
        Some(i) => {
            let t_bad = pts[i].time;
            pts[i + 1..].iter().find(|p| p.time > t_bad).map(|p| p.time)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionSummary {
    pub precision: f64,
    pub runs: usize,
    pub successes: usize,
    pub success_prob: f64,
    /// Binomial standard deviation `sqrt(p (1 - p) / n)`.
    pub success_std: f64,
    /// Mean and sample standard deviation over converged runs; absent when
    /// fewer than 75% of runs converged.
    pub mean_time_s: Option<f64>,
    pub time_std_s: Option<f64>,
    /// Per-seed convergence times, in seed order.
    pub times: Vec<Option<f64>>,
}

impl PrecisionSummary {
    pub fn from_times(precision: f64, times: Vec<Option<f64>>) -> Self {
        let runs = times.len();
        let ok: Vec<f64> = times.iter().flatten().copied().collect();
        let successes = ok.len();
        let p = if runs == 0 { 0.0 } else { successes as f64 / runs as f64 };
        let success_std = if runs == 0 { 0.0 } else { (p * (1.0 - p) / runs as f64).sqrt() };
        let (mean, std) = if successes > 0 && p >= REPORT_THRESHOLD {
            let m = ok.iter().sum::<f64>() / successes as f64;
            let var = if successes > 1 {
                ok.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / (successes - 1) as f64
            } else {
                0.0
            };
            (Some(m), Some(var.sqrt()))
        } else {
            (None, None)
        };
        PrecisionSummary {
            precision,
            runs,
            successes,
            success_prob: p,
            success_std,
            mean_time_s: mean,
            time_std_s: std,
            times,
        }
    }

    /// Mean over converged runs regardless of the reporting threshold.
    pub fn raw_mean_time(&self) -> Option<f64> {
        let ok: Vec<f64> = self.times.iter().flatten().copied().collect();
        (!ok.is_empty()).then(|| ok.iter().sum::<f64>() / ok.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub suite: String,
    pub problem: ProblemKind,
    pub p: usize,
    pub optimizer: OptimizerKind,
    pub scenario: crate::costmodel::Scenario,
    pub rotation_sigma: f64,
    pub optimum_score: f64,
    pub seeds: Vec<u64>,
    pub precisions: Vec<PrecisionSummary>,
}

impl RunSummary {
    /// Summary from per-seed traces given in seed order.
    pub fn from_traces(config: &RunConfig, optimum_score: f64, traces: &[OptimizerTrace]) -> Self {
        let precisions = config
            .precisions
            .iter()
            .map(|&d| {
                PrecisionSummary::from_times(d, traces.iter().map(|t| convergence_time(t, optimum_score, d)).collect())
            })
            .collect();
        RunSummary {
            suite: config.suite_name(),
            problem: config.problem.kind,
            p: config.problem.p,
            optimizer: config.optimizer,
            scenario: config.cost.scenario,
            rotation_sigma: config.rotation_sigma,
            optimum_score,
            seeds: config.seeds.clone(),
            precisions,
        }
    }

    pub fn at(&self, precision: f64) -> Option<&PrecisionSummary> {
        self.precisions.iter().find(|p| p.precision == precision)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub config: RunConfig,
    pub summary: RunSummary,
    /// `(seed, trace)` in seed order.
    pub traces: Vec<(u64, OptimizerTrace)>,
}

/// Runs every seed of a config against an already-built target.
pub fn run_suite_on(config: &RunConfig, target: &Target) -> Result<SuiteResult> {
    config.validate()?;
    let opt = config.optimizer_config()?;
    let time_limit = config.time_limit();
    let traces: Vec<(u64, OptimizerTrace)> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            target.run(&opt, config.estimator, config.rotation_sigma, config.cost, time_limit, seed).map(|t| (seed, t))
        })
        .collect::<Result<_>>()?;
    let plain: Vec<OptimizerTrace> = traces.iter().map(|(_, t)| t.clone()).collect();
    let summary = RunSummary::from_traces(config, target.optimum_score(), &plain);
    Ok(SuiteResult { config: config.clone(), summary, traces })
}

/// Builds the problem and runs every seed.
pub fn run_suite(config: &RunConfig) -> Result<SuiteResult> {
    config.validate()?;
    let setup = ProblemSetup::build(&config.problem)?;
    run_suite_on(config, &Target::Problem(Arc::new(setup)))
}

/// Success statistics across rotation-error levels at a fixed precision,
/// keeping the hyperparameters tuned without rotation error.
pub fn gate_error_sweep(
    config: &RunConfig,
    target: &Target,
    epsilons: &[f64],
    precision: f64,
) -> Result<Vec<SuiteResult>> {
    if config.optimizer.uses_gradients() {
        return Err(Error::unsupported(format!("{} is excluded from gate-error sweeps", config.optimizer)));
    }
    epsilons
        .iter()
        .map(|&eps| {
            let mut c = config.clone();
            c.rotation_sigma = eps;
            c.precisions = vec![precision];
            if let Some(l) = &config.label {
                c.label = Some(format!("{l}-eps{eps}"));
            }
            run_suite_on(&c, target)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::QueryRecord;
    use crate::optimizers::{StopReason, TracePoint};

    fn trace(pts: &[(f64, f64)]) -> OptimizerTrace {
        OptimizerTrace {
            points: pts
                .iter()
                .map(|&(time, s)| TracePoint {
                    time,
                    params: vec![],
                    exact_score: s,
                    cumulative_shots: 0,
                    cumulative_circuits: 0,
                })
                .collect(),
            evaluations: 0,
            total_time: 0.0,
            totals: QueryRecord::default(),
            stop_reason: StopReason::TimeLimit,
        }
    }

    #[test]
    fn convergence_time_cases() {
        assert_eq!(convergence_time(&trace(&[(0.0, 1.0), (1.0, 1.0)]), 1.0, 1e-3), Some(0.0));
        let t = trace(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.5), (3.0, 1.0), (4.0, 1.0)]);
        assert_eq!(convergence_time(&t, 1.0, 1e-3), Some(3.0));
        assert_eq!(convergence_time(&trace(&[(0.0, 0.0), (1.0, 0.2)]), 1.0, 1e-3), None);
        assert_eq!(convergence_time(&trace(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]), 1.0, 1e-3), None);
    }

    #[test]
    fn tied_timestamps_do_not_hide_violations() {
        let t = trace(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (2.0, 1.0)]);
        assert_eq!(convergence_time(&t, 1.0, 1e-3), Some(2.0));
    }

    #[test]
    fn summary_statistics() {
        let s = PrecisionSummary::from_times(1e-3, vec![Some(1.0), Some(3.0), Some(2.0), None]);
        assert_eq!(s.successes, 3);
        assert_eq!(s.success_prob, 0.75);
        assert!((s.success_std - (0.75f64 * 0.25 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.mean_time_s, Some(2.0));
        assert_eq!(s.time_std_s, Some(1.0));
        let low = PrecisionSummary::from_times(1e-3, vec![Some(1.0), None]);
        assert_eq!(low.mean_time_s, None);
        assert_eq!(low.raw_mean_time(), Some(1.0));
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(ProblemSpec::new(ProblemKind::Sk, 1), OptimizerKind::Spsa);
        assert!(c.validate().is_ok());
        assert_eq!(c.time_limit(), 1500.0);
        c.seeds.clear();
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(ProblemSpec::new(ProblemKind::Sk, 1), OptimizerKind::Sgd);
        c.rotation_sigma = 0.01;
        assert!(matches!(c.validate(), Err(Error::Unsupported(_))));
        let mut c = RunConfig::new(ProblemSpec::new(ProblemKind::Sk, 2), OptimizerKind::Spsa);
        assert!(matches!(c.validate(), Err(Error::NotFound(_))));
        c.hyperparameters = HyperparameterChoice::Named("tuned".into());
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json() {
        let text = r#"{"schema": 1, "problem": {"kind": "sk", "p": 1}, "optimizer": "spsa",
                       "overrides": {"shots": 5000}, "seeds": [3, 4]}"#;
        let c = RunConfig::from_json(text).unwrap();
        assert_eq!(c.seeds, vec![3, 4]);
        assert_eq!(c.resolved_hyperparameters().unwrap()["shots"], 5000.0);
        assert_eq!(RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap(), c);
        assert!(RunConfig::from_json(r#"{"problem": {"kind": "sk", "p": 1}, "optimizer": "spsa"}"#).is_err());
        assert!(
            RunConfig::from_json(r#"{"schema": 2, "problem": {"kind": "sk", "p": 1}, "optimizer": "spsa"}"#).is_err()
        );
        assert!(
            RunConfig::from_json(r#"{"schema": 1, "problem": {"kind": "sk", "p": 1}, "optimizer": "bfgs"}"#).is_err()
        );
        assert!(RunConfig::from_json(
            r#"{"schema": 1, "problem": {"kind": "sk", "p": 1}, "optimizer": "spsa", "colour": 1}"#
        )
        .is_err());
    }

    #[test]
    fn gate_error_sweep_rejects_sgd() {
        let c = RunConfig::new(ProblemSpec::new(ProblemKind::Sk, 1), OptimizerKind::Sgd);
        let target = Target::Function { objective: FunctionObjective::sphere(2, 0), x0: vec![1.0, 1.0] };
        assert!(matches!(gate_error_sweep(&c, &target, &[0.01], 5e-3), Err(Error::Unsupported(_))));
    }
}
