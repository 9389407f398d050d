//! Hyperparameter search scored by simulated time to convergence, and the
//! shipped tables of tuned values.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costmodel::{CostModelParams, Scenario};
use crate::error::{Error, Result};
use crate::experiment::{convergence_time, Target};
use crate::optimizers::{Hyperparameters, OptimizerConfig, OptimizerKind};
use crate::problems::ProblemKind;

/// Spaces larger than this are searched by random sampling.
pub const GRID_LIMIT: usize = 1000;

const TUNED_DEFAULTS_JSON: &str = include_str!("../data/tuned_defaults.json");
const SEARCH_SPACES_JSON: &str = include_str!("../data/search_spaces.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefaultsEntry {
    pub optimizer: OptimizerKind,
    pub problem: ProblemKind,
    pub p: usize,
    pub hyperparameters: Hyperparameters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefaultsTable {
    pub schema: u32,
    #[serde(default)]
    pub comment: Vec<String>,
    pub entries: Vec<DefaultsEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemFamily {
    Qaoa,
    Hubbard,
}

impl ProblemFamily {
    pub fn of(kind: ProblemKind) -> Self {
        if kind.is_qaoa() {
            ProblemFamily::Qaoa
        } else {
            ProblemFamily::Hubbard
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceEntry {
    pub optimizer: OptimizerKind,
    pub family: ProblemFamily,
    pub values: SearchSpace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTable {
    pub schema: u32,
    #[serde(default)]
    pub comment: Vec<String>,
    pub spaces: Vec<SpaceEntry>,
}

/// The shipped tuned tables.
pub fn defaults_table() -> &'static DefaultsTable {
    static TABLE: OnceLock<DefaultsTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(TUNED_DEFAULTS_JSON).expect("shipped defaults parse"))
}

/// The shipped search grids.
pub fn spaces_table() -> &'static SpaceTable {
    static TABLE: OnceLock<SpaceTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(SEARCH_SPACES_JSON).expect("shipped search spaces parse"))
}

/// Tuned hyperparameters for a problem, depth and optimizer.
pub fn default_hyperparameters(problem: ProblemKind, p: usize, optimizer: OptimizerKind) -> Result<Hyperparameters> {
    defaults_table()
        .entries
        .iter()
        .find(|e| e.problem == problem && e.p == p && e.optimizer == optimizer)
        .map(|e| e.hyperparameters.clone())
        .ok_or_else(|| Error::NotFound(format!("no tuned hyperparameters for {optimizer} on {problem} p={p}")))
}

pub fn search_space(optimizer: OptimizerKind, family: ProblemFamily) -> Result<SearchSpace> {
    spaces_table()
        .spaces
        .iter()
        .find(|e| e.optimizer == optimizer && e.family == family)
        .map(|e| e.values.clone())
        .ok_or_else(|| Error::NotFound(format!("no search space for {optimizer}")))
}

/// Allowed values per hyperparameter. Combinations are enumerated in
/// mixed-radix order with the last key (alphabetically) varying fastest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SearchSpace {
    pub values: BTreeMap<String, Vec<f64>>,
}

impl SearchSpace {
    pub fn new(values: impl IntoIterator<Item = (String, Vec<f64>)>) -> Self {
        SearchSpace { values: values.into_iter().collect() }
    }

    /// Number of combinations; zero if any list is empty.
    pub fn size(&self) -> usize {
        if self.values.is_empty() {
            return 0;
        }
        self.values.values().map(|v| v.len()).product()
    }

    pub fn combination(&self, mut idx: usize) -> Hyperparameters {
        let mut out = Hyperparameters::new();
        for (k, vals) in self.values.iter().rev() {
            out.insert(k.clone(), vals[idx % vals.len()]);
            idx /= vals.len();
        }
        out
    }

    /// Fixes one key to a single value.
    pub fn with_fixed(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), vec![value]);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum SearchMode {
    Grid,
    Random { budget: usize },
}

impl SearchMode {
    /// Grid for small spaces, 1000 random combinations otherwise.
    pub fn auto(space: &SearchSpace) -> Self {
        if space.size() <= GRID_LIMIT {
            SearchMode::Grid
        } else {
            SearchMode::Random { budget: GRID_LIMIT }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneEvaluation {
    pub hyperparameters: Hyperparameters,
    /// Seconds to convergence, `None` if the run never converged.
    pub time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: Hyperparameters,
    pub best_time_s: Option<f64>,
    pub log: Vec<TuneEvaluation>,
}

impl TuneResult {
    /// Best score with `+inf` for no convergence.
    pub fn score(&self) -> f64 {
        self.best_time_s.unwrap_or(f64::INFINITY)
    }
}

/// Indices of the combinations to try, in evaluation order.
pub fn candidate_indices(space: &SearchSpace, mode: SearchMode, seed: u64) -> Result<Vec<usize>> {
    let n = space.size();
    if n == 0 {
        return Err(Error::invalid("empty search space"));
    }
    match mode {
        SearchMode::Grid => Ok((0..n).collect()),
        SearchMode::Random { budget } => {
            if budget == 0 {
                return Err(Error::invalid("random search needs a budget of at least 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(index::sample(&mut rng, n, budget.min(n)).into_vec())
        }
    }
}

/// Scores every candidate with `score` (smaller is better, `None` = never
/// converged); ties go to the earlier candidate.
pub fn search_with<F>(space: &SearchSpace, mode: SearchMode, seed: u64, score: F) -> Result<TuneResult>
where
    F: Fn(&Hyperparameters) -> Result<Option<f64>> + Sync,
{
    let idx = candidate_indices(space, mode, seed)?;
    let log: Vec<TuneEvaluation> = idx
        .par_iter()
        .map(|&i| {
            let hp = space.combination(i);
            score(&hp).map(|time_s| TuneEvaluation { hyperparameters: hp, time_s })
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, e) in log.iter().enumerate() {
        let better = match (e.time_s, log[best].time_s) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        };
        if better {
            best = i;
        }
    }
    Ok(TuneResult { best: log[best].hyperparameters.clone(), best_time_s: log[best].time_s, log })
}

/// Settings of one tuning job.
#[derive(Clone, Debug, PartialEq)]
pub struct TuneSettings {
    pub optimizer: OptimizerKind,
    pub mode: SearchMode,
    pub precision: f64,
    pub time_limit: f64,
    pub cost: CostModelParams,
    /// Seed of both the single scoring run and the random candidate choice.
    pub seed: u64,
    /// Entries added to every candidate (e.g. a fixed evaluation budget).
    pub fixed: Hyperparameters,
}

impl TuneSettings {
    pub fn new(optimizer: OptimizerKind, precision: f64, time_limit: f64) -> Self {
        TuneSettings {
            optimizer,
            mode: SearchMode::Grid,
            precision,
            time_limit,
            cost: CostModelParams::new(Scenario::LatencyWithBatching),
            seed: crate::experiment::TUNING_SEED,
            fixed: Hyperparameters::new(),
        }
    }
}

/// Scores each candidate by one run's convergence time at the target precision.
pub fn search(space: &SearchSpace, target: &Target, settings: &TuneSettings) -> Result<TuneResult> {
    let optimum = target.optimum_score();
    search_with(space, settings.mode, settings.seed, |hp| {
        let mut hp = hp.clone();
        hp.extend(settings.fixed.iter().map(|(k, v)| (k.clone(), *v)));
        let config = OptimizerConfig::from_map(settings.optimizer, &hp)?;
        let trace = target.run(&config, None, 0.0, settings.cost, settings.time_limit, settings.seed)?;
        Ok(convergence_time(&trace, optimum, settings.precision))
    })
}
