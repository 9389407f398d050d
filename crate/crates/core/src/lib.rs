//! Benchmarking of stochastic optimizers on simulated variational quantum
//! algorithms, with wall-clock accounting for shots, circuits and latency.

pub mod circuit;
pub mod costmodel;
pub mod error;
pub mod experiment;
pub mod fermion;
pub mod hypertune;
pub mod objective;
pub mod optimizers;
pub mod pauli;
pub mod problems;
pub mod report;
pub mod statevec;
pub mod svg;

pub use costmodel::{CostModelParams, Scenario, TimeLedger};
pub use error::{Error, Result};
pub use experiment::{convergence_time, gate_error_sweep, run_suite, RunConfig, RunSummary, SuiteResult, Target};
pub use hypertune::{default_hyperparameters, SearchMode, SearchSpace, TuneResult};
pub use objective::{
    Estimator, FunctionNoise, FunctionObjective, NoiseConfig, Objective, ObjectiveEngine, QueryRecord,
};
pub use optimizers::{run_optimizer, Hyperparameters, OptimizerConfig, OptimizerKind, OptimizerTrace, TracePoint};
pub use pauli::{Pauli, PauliString, PauliSum, PauliTerm};
pub use problems::{ProblemKind, ProblemSetup, ProblemSpec};
pub use report::emit_reports;
pub use statevec::{DiagonalObservable, StateVector};
