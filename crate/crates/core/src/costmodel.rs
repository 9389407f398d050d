//! Simulated wall-clock time of objective queries.
//!
//! A query costs `M / s` seconds of sampling, `r` seconds per distinct
//! circuit, and `l` seconds of network latency per round-trip. How many
//! round-trips a query needs depends on the scenario.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::QueryRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// No network latency at all.
    #[serde(rename = "zero")]
    ZeroLatency,
    /// Latency paid once per batch of circuits.
    #[serde(rename = "batch")]
    LatencyWithBatching,
    /// Latency paid once per circuit.
    #[serde(rename = "nobatch")]
    LatencyNoBatching,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::ZeroLatency, Scenario::LatencyWithBatching, Scenario::LatencyNoBatching];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ZeroLatency => "zero",
            Scenario::LatencyWithBatching => "batch",
            Scenario::LatencyNoBatching => "nobatch",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Scenario::ZeroLatency),
            "batch" => Ok(Scenario::LatencyWithBatching),
            "nobatch" => Ok(Scenario::LatencyNoBatching),
            other => Err(Error::invalid(format!("unknown scenario '{other}' (expected zero, batch or nobatch)"))),
        }
    }
}

fn default_sampling_rate() -> f64 {
    1e5
}
fn default_switch_overhead() -> f64 {
    0.1
}
fn default_latency() -> f64 {
    4.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModelParams {
    /// Shots per second.
    #[serde(default = "default_sampling_rate")]
    pub sampling_rate: f64,
    /// Seconds per distinct circuit.
    #[serde(default = "default_switch_overhead")]
    pub switch_overhead: f64,
    /// Seconds per round-trip.
    #[serde(default = "default_latency")]
    pub latency: f64,
    pub scenario: Scenario,
}

impl Default for CostModelParams {
    fn default() -> Self {
        CostModelParams::new(Scenario::LatencyWithBatching)
    }
}

impl CostModelParams {
    pub fn new(scenario: Scenario) -> Self {
        CostModelParams {
            sampling_rate: default_sampling_rate(),
            switch_overhead: default_switch_overhead(),
            latency: default_latency(),
            scenario,
        }
    }

    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        self.scenario = scenario;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sampling_rate > 0.0 && self.sampling_rate.is_finite()) {
            return Err(Error::invalid("sampling rate must be positive"));
        }
        if !(self.switch_overhead >= 0.0 && self.latency >= 0.0) {
            return Err(Error::invalid("switch overhead and latency must be nonnegative"));
        }
        Ok(())
    }

    pub fn query_time(&self, record: &QueryRecord) -> f64 {
        let sample = record.shots as f64 / self.sampling_rate;
        let switch = self.switch_overhead * record.circuits as f64;
        let round_trips = match self.scenario {
            Scenario::ZeroLatency => 0,
            Scenario::LatencyWithBatching => record.batches,
            Scenario::LatencyNoBatching => record.circuits,
        };
        sample + switch + self.latency * round_trips as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeLedger {
    total_seconds: f64,
    entries: Vec<(QueryRecord, f64)>,
}

impl TimeLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Charges one query and returns its cost in seconds.
    pub fn accumulate(&mut self, record: QueryRecord, params: &CostModelParams) -> f64 {
        let t = params.query_time(&record);
        self.total_seconds += t;
        self.entries.push((record, t));
        t
    }

    pub fn total_seconds(&self) -> f64 {
        self.total_seconds
    }

    pub fn entries(&self) -> &[(QueryRecord, f64)] {
        &self.entries
    }

    /// Sum of all recorded queries.
    pub fn totals(&self) -> QueryRecord {
        self.entries.iter().fold(QueryRecord::default(), |acc, (r, _)| acc + *r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(shots: u64, circuits: u64, batches: u64) -> QueryRecord {
        QueryRecord { shots, circuits, batches }
    }

    #[test]
    fn worked_examples() {
        let r = rec(25_000, 1, 1);
        let batch = CostModelParams::new(Scenario::LatencyWithBatching);
        assert!((batch.query_time(&r) - 4.35).abs() < 1e-12);
        assert!((batch.with_scenario(Scenario::ZeroLatency).query_time(&r) - 0.35).abs() < 1e-12);
        let ten = rec(0, 10, 1);
        assert_eq!(batch.with_scenario(Scenario::LatencyNoBatching).query_time(&ten) - 1.0, 40.0);
        assert_eq!(batch.query_time(&ten) - 1.0, 4.0);
    }

    #[test]
    fn ledger_totals() {
        let params = CostModelParams::default();
        let mut ledger = TimeLedger::new();
        assert_eq!(ledger.total_seconds(), 0.0);
        let t = ledger.accumulate(rec(1000, 3, 1), &params);
        assert_eq!(ledger.total_seconds(), t);
        for _ in 0..99 {
            ledger.accumulate(rec(1000, 3, 1), &params);
        }
        assert!((ledger.total_seconds() - 100.0 * t).abs() < 1e-9);
        assert_eq!(ledger.totals(), rec(100_000, 300, 100));
        assert_eq!(ledger.entries().len(), 100);
    }

    #[test]
    fn scenario_parsing() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.name()));
        }
        assert!("fast".parse::<Scenario>().is_err());
    }

    #[test]
    fn validation() {
        assert!(CostModelParams::default().validate().is_ok());
        assert!(CostModelParams { sampling_rate: 0.0, ..Default::default() }.validate().is_err());
        assert!(CostModelParams { latency: -1.0, ..Default::default() }.validate().is_err());
    }
}
