//! Output files of an experiment.
//!
//! - `traces.jsonl`: one line per candidate with columns `suite, seed,
//!   wall_time_s, params, exact_score, cumulative_shots, cumulative_circuits`.
//! - `suites.json`: the configs and summaries the traces belong to.
//! - `summary.csv`: one row per suite and precision target, columns as in
//!   [`CSV_HEADER`].
//! - SVG charts: `time_to_solution.svg`, `success_vs_precision.svg`,
//!   `time_vs_precision.svg`, `success_vs_gate_error.svg`, `trajectories.svg`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{RunConfig, RunSummary, SuiteResult};
use crate::objective::QueryRecord;
use crate::optimizers::{OptimizerTrace, StopReason, TracePoint};
use crate::svg::{BarChart, LineChart, Series};

pub const TRACES_FILE: &str = "traces.jsonl";
pub const SUITES_FILE: &str = "suites.json";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CSV_HEADER: &str = "suite,problem,p,optimizer,scenario,rotation_sigma,precision,runs,successes,success_prob,success_std,mean_time_s,time_std_s";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub suite: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub params: Vec<f64>,
    pub exact_score: f64,
    pub cumulative_shots: u64,
    pub cumulative_circuits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub config: RunConfig,
    pub summary: RunSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub suites: Vec<SuiteEntry>,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Writes traces, manifest, CSV and charts into `dir` (created if needed).
pub fn emit_reports(results: &[SuiteResult], dir: &Path) -> Result<Vec<PathBuf>> {
    if results.is_empty() {
        return Err(Error::invalid("nothing to report"));
    }
    let mut names: Vec<&str> = results.iter().map(|r| r.summary.suite.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("two suites share the name '{}'", w[0])));
    }
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join(TRACES_FILE);
    let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = BufWriter::new(file);
    for r in results {
        let suite = r.summary.suite.clone();
        for (seed, trace) in &r.traces {
            for p in &trace.points {
                let rec = TraceRecord {
                    suite: suite.clone(),
                    seed: *seed,
                    wall_time_s: p.time,
                    params: p.params.clone(),
                    exact_score: p.exact_score,
                    cumulative_shots: p.cumulative_shots,
                    cumulative_circuits: p.cumulative_circuits,
                };
                serde_json::to_writer(&mut w, &rec)?;
                w.write_all(b"\n").map_err(|e| io_err(&path, e))?;
            }
        }
    }
    w.flush().map_err(|e| io_err(&path, e))?;
    written.push(path);

    let manifest = Manifest {
        schema: 1,
        suites: results.iter().map(|r| SuiteEntry { config: r.config.clone(), summary: r.summary.clone() }).collect(),
    };
    let path = dir.join(SUITES_FILE);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| io_err(&path, e))?;
    written.push(path);

    let summaries: Vec<RunSummary> = results.iter().map(|r| r.summary.clone()).collect();
    let traces: BTreeMap<String, Vec<(u64, Vec<TracePoint>)>> = results
        .iter()
        .map(|r| (r.summary.suite.clone(), r.traces.iter().map(|(s, t)| (*s, t.points.clone())).collect()))
        .collect();
    written.extend(write_summary_files(&summaries, &traces, dir)?);
    Ok(written)
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// The CSV body for a set of summaries.
pub fn summary_csv(summaries: &[RunSummary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in summaries {
        for p in &s.precisions {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.suite,
                s.problem,
                s.p,
                s.optimizer,
                s.scenario,
                s.rotation_sigma,
                p.precision,
                p.runs,
                p.successes,
                p.success_prob,
                p.success_std,
                opt_num(p.mean_time_s),
                opt_num(p.time_std_s)
            ));
        }
    }
    out
}

type Traces = BTreeMap<String, Vec<(u64, Vec<TracePoint>)>>;

fn write_summary_files(summaries: &[RunSummary], traces: &Traces, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        written.push(path);
        Ok(())
    };
    put(SUMMARY_FILE, summary_csv(summaries))?;
    put("time_to_solution.svg", time_to_solution_chart(summaries).render())?;
    let (succ, time) = precision_charts(summaries);
    put("success_vs_precision.svg", succ.render())?;
    put("time_vs_precision.svg", time.render())?;
    put("success_vs_gate_error.svg", gate_error_chart(summaries).render())?;
    put("trajectories.svg", trajectory_chart(summaries, traces).render())?;
    Ok(written)
}

fn time_to_solution_chart(summaries: &[RunSummary]) -> BarChart {
    let clean: Vec<&RunSummary> = summaries.iter().filter(|s| s.rotation_sigma == 0.0).collect();
    let mut groups: Vec<String> = Vec::new();
    let mut optimizers = Vec::new();
    for s in &clean {
        let g = format!("{} p={} {}", s.problem, s.p, s.scenario);
        if !groups.contains(&g) {
            groups.push(g);
        }
        if !optimizers.contains(&s.optimizer) {
            optimizers.push(s.optimizer);
        }
    }
    let series = optimizers
        .iter()
        .map(|o| {
            let vals = groups
                .iter()
                .map(|g| {
                    clean
                        .iter()
                        .find(|s| s.optimizer == *o && format!("{} p={} {}", s.problem, s.p, s.scenario) == *g)
                        .and_then(|s| s.precisions.first())
                        .and_then(|p| p.mean_time_s)
                })
                .collect();
            (o.to_string(), vals)
        })
        .collect();
    BarChart { title: "Mean time to solution".into(), y_label: "simulated seconds".into(), groups, series }
}

fn precision_charts(summaries: &[RunSummary]) -> (LineChart, LineChart) {
    let mut succ = LineChart {
        title: "Success probability vs precision".into(),
        x_label: "precision".into(),
        y_label: "success probability".into(),
        log_x: true,
        series: vec![],
    };
    let mut time = LineChart {
        title: "Time to solution vs precision".into(),
        x_label: "precision".into(),
        y_label: "mean simulated seconds".into(),
        log_x: true,
        series: vec![],
    };
    for s in summaries.iter().filter(|s| s.rotation_sigma == 0.0) {
        succ.series.push(Series {
            name: s.suite.clone(),
            points: s.precisions.iter().map(|p| (p.precision, p.success_prob)).collect(),
        });
        time.series.push(Series {
            name: s.suite.clone(),
            points: s.precisions.iter().filter_map(|p| p.mean_time_s.map(|t| (p.precision, t))).collect(),
        });
    }
    (succ, time)
}

fn gate_error_chart(summaries: &[RunSummary]) -> LineChart {
    let mut by: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    if summaries.iter().any(|s| s.rotation_sigma > 0.0) {
        for s in summaries {
            let key = format!("{} p={} {} {}", s.problem, s.p, s.optimizer, s.scenario);
            if let Some(p) = s.precisions.first() {
                by.entry(key).or_default().push((s.rotation_sigma, p.success_prob));
            }
        }
    }
    LineChart {
        title: "Success probability vs gate error".into(),
        x_label: "rotation error (rad)".into(),
        y_label: "success probability".into(),
        log_x: true,
        series: by
            .into_iter()
            .filter(|(_, v)| v.iter().any(|p| p.0 > 0.0))
            .map(|(name, mut points)| {
                points.sort_by(|a, b| a.0.total_cmp(&b.0));
                Series { name, points }
            })
            .collect(),
    }
}

fn trajectory_chart(summaries: &[RunSummary], traces: &Traces) -> LineChart {
    let mut series = Vec::new();
    for s in summaries {
        if let Some((_, pts)) = traces.get(&s.suite).and_then(|t| t.first()) {
            series
                .push(Series { name: s.suite.clone(), points: pts.iter().map(|p| (p.time, p.exact_score)).collect() });
        }
    }
    LineChart {
        title: "Exact score of candidates (first seed)".into(),
        x_label: "simulated seconds".into(),
        y_label: "normalized score".into(),
        log_x: false,
        series,
    }
}

/// Reads the manifest and traces of an output directory.
pub fn load_reports(dir: &Path) -> Result<(Manifest, Traces)> {
    let path = dir.join(SUITES_FILE);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let path = dir.join(TRACES_FILE);
    let file = fs::File::open(&path).map_err(|e| io_err(&path, e))?;
    let mut traces: Traces = BTreeMap::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| io_err(&path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: TraceRecord = serde_json::from_str(&line)?;
        let runs = traces.entry(r.suite).or_default();
        if runs.last().map(|(s, _)| *s) != Some(r.seed) {
            runs.push((r.seed, Vec::new()));
        }
        runs.last_mut().expect("just pushed").1.push(TracePoint {
            time: r.wall_time_s,
            params: r.params,
            exact_score: r.exact_score,
            cumulative_shots: r.cumulative_shots,
            cumulative_circuits: r.cumulative_circuits,
        });
    }
    Ok((manifest, traces))
}

/// Summaries recomputed from the raw traces in `dir`.
pub fn reload_summaries(dir: &Path) -> Result<Vec<RunSummary>> {
    let (manifest, traces) = load_reports(dir)?;
    manifest
        .suites
        .iter()
        .map(|entry| {
            let runs = traces.get(&entry.summary.suite).cloned().unwrap_or_default();
            let mut by_seed: BTreeMap<u64, Vec<TracePoint>> = runs.into_iter().collect();
            let plain: Vec<OptimizerTrace> = entry
                .config
                .seeds
                .iter()
                .map(|s| {
                    let points = by_seed.remove(s).ok_or_else(|| {
                        Error::invalid(format!("traces for suite {} lack seed {s}", entry.summary.suite))
                    })?;
                    Ok(OptimizerTrace {
                        points,
                        evaluations: 0,
                        total_time: 0.0,
                        totals: QueryRecord::default(),
                        stop_reason: StopReason::TimeLimit,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(RunSummary::from_traces(&entry.config, entry.summary.optimum_score, &plain))
        })
        .collect()
}

/// Rewrites CSV and charts from the JSONL traces in `dir`.
pub fn regenerate(dir: &Path) -> Result<Vec<PathBuf>> {
    let summaries = reload_summaries(dir)?;
    let (_, traces) = load_reports(dir)?;
    write_summary_files(&summaries, &traces, dir)
}
