//! The five optimizers and the bookkeeping they share.
//!
//! Every optimizer talks to its objective through a [`Session`], which charges
//! each query to a [`TimeLedger`], refuses queries that would overrun the
//! evaluation budget or the simulated time limit, and records the candidate
//! trace that convergence is later judged on.

pub mod mgd;
pub mod mpg;
pub mod nelder_mead;
pub mod sgd;
pub mod spsa;
pub mod surrogate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::costmodel::{CostModelParams, TimeLedger};
use crate::error::{Error, Result};
use crate::objective::{substream, Objective, QueryRecord, OPTIMIZER_STREAM};

pub use mgd::MgdParams;
pub use mpg::MpgParams;
pub use nelder_mead::NelderMeadParams;
pub use sgd::SgdParams;
pub use spsa::SpsaParams;
pub use surrogate::{fit_quadratic, fit_quadratic_at, QuadraticSurrogate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    NelderMead,
    Sgd,
    Spsa,
    Mgd,
    Mpg,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 5] =
        [OptimizerKind::NelderMead, OptimizerKind::Sgd, OptimizerKind::Spsa, OptimizerKind::Mgd, OptimizerKind::Mpg];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::NelderMead => "nelder-mead",
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Spsa => "spsa",
            OptimizerKind::Mgd => "mgd",
            OptimizerKind::Mpg => "mpg",
        }
    }

    /// Accepted hyperparameter keys, algorithm-specific first.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            OptimizerKind::NelderMead => &["delta", "shots", "max_evals"],
            OptimizerKind::Sgd => &["gamma", "beta", "shots", "max_evals"],
            OptimizerKind::Spsa => &["a", "c", "alpha", "A", "gamma", "shots", "max_evals"],
            OptimizerKind::Mgd => &["gamma", "delta", "eta", "alpha", "A", "xi", "eps", "shots", "max_evals"],
            OptimizerKind::Mpg => &[
                "gamma",
                "alpha",
                "log_sigma0",
                "k",
                "delta_r",
                "t_warm",
                "t_decay",
                "model_samples",
                "shots",
                "max_evals",
            ],
        }
    }

    /// Whether the optimizer needs gradient queries (and so cannot run under rotation error).
    pub fn uses_gradients(self) -> bool {
        matches!(self, OptimizerKind::Sgd)
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "nelder-mead" | "nm" => Ok(OptimizerKind::NelderMead),
            "sgd" => Ok(OptimizerKind::Sgd),
            "spsa" => Ok(OptimizerKind::Spsa),
            "mgd" => Ok(OptimizerKind::Mgd),
            "mpg" => Ok(OptimizerKind::Mpg),
            other => Err(Error::invalid(format!("unknown optimizer '{other}'"))),
        }
    }
}

/// Flat key-value hyperparameter map.
pub type Hyperparameters = BTreeMap<String, f64>;

/// Typed view of a validated hyperparameter map.
pub(crate) struct HpReader<'a> {
    kind: OptimizerKind,
    map: &'a Hyperparameters,
}

impl<'a> HpReader<'a> {
    pub(crate) fn new(kind: OptimizerKind, map: &'a Hyperparameters) -> Result<Self> {
        for key in map.keys() {
            if !kind.keys().contains(&key.as_str()) {
                return Err(Error::invalid(format!("unknown hyperparameter '{key}' for {kind}")));
            }
        }
        for (key, v) in map {
            if !v.is_finite() {
                return Err(Error::invalid(format!("hyperparameter '{key}' is not finite")));
            }
        }
        Ok(HpReader { kind, map })
    }

    pub(crate) fn get(&self, key: &str) -> Result<f64> {
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| Error::invalid(format!("{} requires hyperparameter '{key}'", self.kind)))
    }

    pub(crate) fn get_or(&self, key: &str, default: f64) -> f64 {
        self.map.get(key).copied().unwrap_or(default)
    }

    pub(crate) fn nonneg(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        if v < 0.0 {
            return Err(Error::invalid(format!("hyperparameter '{key}' must be nonnegative")));
        }
        Ok(v)
    }

    pub(crate) fn positive(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        if v <= 0.0 {
            return Err(Error::invalid(format!("hyperparameter '{key}' must be positive")));
        }
        Ok(v)
    }

    pub(crate) fn count(&self, key: &str, v: f64) -> Result<u64> {
        if v < 1.0 || v.fract() != 0.0 || v > 1e15 {
            return Err(Error::invalid(format!("hyperparameter '{key}' must be a positive integer")));
        }
        Ok(v as u64)
    }

    pub(crate) fn shots(&self) -> Result<u64> {
        let v = self.get("shots")?;
        self.count("shots", v)
    }

    pub(crate) fn max_evals(&self) -> Result<Option<u64>> {
        match self.map.get("max_evals") {
            None => Ok(None),
            Some(&v) => Ok(Some(self.count("max_evals", v)?)),
        }
    }
}

/// Validated, typed hyperparameters of any optimizer.
#[derive(Clone, Debug, PartialEq)]
pub enum OptimizerConfig {
    NelderMead(NelderMeadParams),
    Sgd(SgdParams),
    Spsa(SpsaParams),
    Mgd(MgdParams),
    Mpg(MpgParams),
}

impl OptimizerConfig {
    pub fn from_map(kind: OptimizerKind, map: &Hyperparameters) -> Result<Self> {
        Ok(match kind {
            OptimizerKind::NelderMead => OptimizerConfig::NelderMead(NelderMeadParams::from_map(map)?),
            OptimizerKind::Sgd => OptimizerConfig::Sgd(SgdParams::from_map(map)?),
            OptimizerKind::Spsa => OptimizerConfig::Spsa(SpsaParams::from_map(map)?),
            OptimizerKind::Mgd => OptimizerConfig::Mgd(MgdParams::from_map(map)?),
            OptimizerKind::Mpg => OptimizerConfig::Mpg(MpgParams::from_map(map)?),
        })
    }

    pub fn kind(&self) -> OptimizerKind {
        match self {
            OptimizerConfig::NelderMead(_) => OptimizerKind::NelderMead,
            OptimizerConfig::Sgd(_) => OptimizerKind::Sgd,
            OptimizerConfig::Spsa(_) => OptimizerKind::Spsa,
            OptimizerConfig::Mgd(_) => OptimizerKind::Mgd,
            OptimizerConfig::Mpg(_) => OptimizerKind::Mpg,
        }
    }

    pub fn max_evals(&self) -> Option<u64> {
        match self {
            OptimizerConfig::NelderMead(p) => p.max_evals,
            OptimizerConfig::Sgd(p) => p.max_evals,
            OptimizerConfig::Spsa(p) => p.max_evals,
            OptimizerConfig::Mgd(p) => p.max_evals,
            OptimizerConfig::Mpg(p) => p.max_evals,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Simulated seconds spent when this candidate became current.
    pub time: f64,
    pub params: Vec<f64>,
    pub exact_score: f64,
    pub cumulative_shots: u64,
    pub cumulative_circuits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EvaluationBudget,
    TimeLimit,
    Tolerance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub points: Vec<TracePoint>,
    pub evaluations: u64,
    pub total_time: f64,
    pub totals: QueryRecord,
    pub stop_reason: StopReason,
}

impl OptimizerTrace {
    pub fn last(&self) -> &TracePoint {
        self.points.last().expect("trace always holds the initial point")
    }
}

/// Stopping conditions that apply to every optimizer.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Limits {
    /// Maximum number of circuit evaluations (one per point, one per shifted circuit).
    pub max_evals: Option<u64>,
    /// Simulated seconds.
    pub time_limit: Option<f64>,
}

/// Accounting wrapper between an optimizer and its objective.
pub struct Session<'a, O: Objective + ?Sized> {
    objective: &'a mut O,
    cost: CostModelParams,
    limits: Limits,
    ledger: TimeLedger,
    evaluations: u64,
    totals: QueryRecord,
    points: Vec<TracePoint>,
    stop: Option<StopReason>,
}

impl<'a, O: Objective + ?Sized> Session<'a, O> {
    /// Starts a session and records `x0` as the candidate at time zero.
    pub fn new(objective: &'a mut O, cost: CostModelParams, limits: Limits, x0: &[f64]) -> Result<Self> {
        cost.validate()?;
        if x0.len() != objective.dim() {
            return Err(Error::invalid(format!(
                "initial point has {} entries, objective takes {}",
                x0.len(),
                objective.dim()
            )));
        }
        let mut s = Session {
            objective,
            cost,
            limits,
            ledger: TimeLedger::new(),
            evaluations: 0,
            totals: QueryRecord::default(),
            points: Vec::new(),
            stop: None,
        };
        s.record(x0);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn elapsed(&self) -> f64 {
        self.ledger.total_seconds()
    }

    pub fn ledger(&self) -> &TimeLedger {
        &self.ledger
    }

    /// Whether a query of `record` fits in both budgets. Marks the session
    /// stopped when it does not.
    fn admit(&mut self, record: &QueryRecord) -> bool {
        if self.stop.is_some() {
            return false;
        }
        if let Some(n) = self.limits.max_evals {
            if self.evaluations + record.circuits > n {
                self.stop = Some(StopReason::EvaluationBudget);
                return false;
            }
        }
        if let Some(limit) = self.limits.time_limit {
            if self.elapsed() + self.cost.query_time(record) > limit {
                self.stop = Some(StopReason::TimeLimit);
                return false;
            }
        }
        true
    }

    fn charge(&mut self, record: QueryRecord) {
        self.ledger.accumulate(record, &self.cost);
        self.evaluations += record.circuits;
        self.totals += record;
    }

    /// Evaluates a batch of points, or returns `None` when it would overrun a limit.
    pub fn evaluate(&mut self, points: &[Vec<f64>], shots: u64) -> Result<Option<Vec<f64>>> {
        if !self.admit(&QueryRecord::batch(points.len() as u64, shots)) {
            return Ok(None);
        }
        let (values, record) = self.objective.evaluate_batch(points, shots)?;
        self.charge(record);
        Ok(Some(values))
    }

    /// Gradient query, or `None` when it would overrun a limit.
    pub fn gradient(&mut self, x: &[f64], shots: u64) -> Result<Option<Vec<f64>>> {
        let circuits = self
            .objective
            .gradient_circuits()
            .ok_or_else(|| Error::unsupported("objective has no gradient queries"))?;
        if self.objective.rotation_sigma() > 0.0 {
            return Err(Error::unsupported("gradient queries are not defined under rotation error"));
        }
        if !self.admit(&QueryRecord::batch(circuits, shots)) {
            return Ok(None);
        }
        let (g, record) = self.objective.gradient(x, shots)?;
        self.charge(record);
        Ok(Some(g))
    }

    /// Records `x` as the current candidate.
    pub fn record(&mut self, x: &[f64]) {
        let exact_score = self.objective.exact_score(x);
        self.points.push(TracePoint {
            time: self.elapsed(),
            params: x.to_vec(),
            exact_score,
            cumulative_shots: self.totals.shots,
            cumulative_circuits: self.totals.circuits,
        });
    }

    pub fn stop_with(&mut self, reason: StopReason) {
        self.stop.get_or_insert(reason);
    }

    pub fn finish(self) -> OptimizerTrace {
        OptimizerTrace {
            points: self.points,
            evaluations: self.evaluations,
            total_time: self.ledger.total_seconds(),
            totals: self.totals,
            stop_reason: self.stop.unwrap_or(StopReason::EvaluationBudget),
        }
    }
}

/// Runs one optimizer from `x0`. Optimizer randomness is drawn from the
/// optimizer substream of `seed`; the objective owns its own noise streams.
pub fn run_optimizer<O: Objective + ?Sized>(
    config: &OptimizerConfig,
    objective: &mut O,
    x0: &[f64],
    cost: CostModelParams,
    time_limit: Option<f64>,
    seed: u64,
) -> Result<OptimizerTrace> {
    if config.kind().uses_gradients() && objective.rotation_sigma() > 0.0 {
        return Err(Error::unsupported(format!("{} cannot run under rotation error", config.kind())));
    }
    let limits = Limits { max_evals: config.max_evals(), time_limit };
    if limits.max_evals.is_none() && limits.time_limit.is_none() {
        return Err(Error::invalid("a run needs an evaluation budget or a time limit"));
    }
    let mut rng = substream(seed, OPTIMIZER_STREAM);
    let mut session = Session::new(objective, cost, limits, x0)?;
    match config {
        OptimizerConfig::NelderMead(p) => nelder_mead::minimize(&mut session, x0, p)?,
        OptimizerConfig::Sgd(p) => sgd::minimize(&mut session, x0, p)?,
        OptimizerConfig::Spsa(p) => spsa::minimize(&mut session, x0, p, &mut rng)?,
        OptimizerConfig::Mgd(p) => mgd::minimize(&mut session, x0, p, &mut rng)?,
        OptimizerConfig::Mpg(p) => mpg::minimize(&mut session, x0, p, &mut rng)?,
    }
    Ok(session.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::Scenario;
    use crate::objective::FunctionObjective;

    fn hp(pairs: &[(&str, f64)]) -> Hyperparameters {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn unknown_and_missing_keys() {
        let err = OptimizerConfig::from_map(
            OptimizerKind::Sgd,
            &hp(&[("gamma", 0.1), ("beta", 0.1), ("shots", 10.0), ("eta", 1.0)]),
        );
        assert!(matches!(err, Err(Error::InvalidArgument(m)) if m.contains("eta")));
        assert!(OptimizerConfig::from_map(OptimizerKind::Sgd, &hp(&[("gamma", 0.1), ("shots", 10.0)])).is_err());
        assert!(OptimizerConfig::from_map(OptimizerKind::Sgd, &hp(&[("gamma", 0.1), ("beta", 0.0), ("shots", 0.5)]))
            .is_err());
        assert!(OptimizerConfig::from_map(OptimizerKind::Sgd, &hp(&[("gamma", 0.1), ("beta", 0.0), ("shots", 5.0)]))
            .is_ok());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in OptimizerKind::ALL {
            assert_eq!(k.name().parse::<OptimizerKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert_eq!("NM".parse::<OptimizerKind>().unwrap(), OptimizerKind::NelderMead);
    }

    #[test]
    fn session_refuses_overruns() {
        let mut f = FunctionObjective::sphere(2, 0);
        let cost = CostModelParams::new(Scenario::ZeroLatency);
        let limits = Limits { max_evals: Some(3), time_limit: None };
        let mut s = Session::new(&mut f, cost, limits, &[1.0, 1.0]).unwrap();
        assert!(s.evaluate(&vec![vec![0.0, 0.0]; 2], 1).unwrap().is_some());
        assert!(s.evaluate(&vec![vec![0.0, 0.0]; 2], 1).unwrap().is_none());
        // once stopped, the session stays stopped
        assert!(s.evaluate(&[vec![0.0, 0.0]], 1).unwrap().is_none());
        let t = s.finish();
        assert_eq!(t.evaluations, 2);
        assert_eq!(t.stop_reason, StopReason::EvaluationBudget);
        assert_eq!(t.points.len(), 1);
        assert_eq!(t.points[0].time, 0.0);

        let mut f = FunctionObjective::sphere(2, 0);
        let limits = Limits { max_evals: None, time_limit: Some(1.0) };
        let mut s = Session::new(&mut f, cost, limits, &[1.0, 1.0]).unwrap();
        // 0.1 s switch + 0.5 s sampling per circuit
        assert!(s.evaluate(&[vec![0.0, 0.0]], 50_000).unwrap().is_some());
        assert!(s.evaluate(&[vec![0.0, 0.0]], 50_000).unwrap().is_none());
        assert!(s.elapsed() <= 1.0);
        assert_eq!(s.finish().stop_reason, StopReason::TimeLimit);
    }
}
