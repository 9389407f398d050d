use clap::{Args, Parser, Subcommand, ValueEnum};
use optbench_core::experiment::{RunConfig, Target, DEFAULT_EPSILONS, GATE_ERROR_PRECISION};
use optbench_core::hypertune::{
    defaults_table, search, search_space, spaces_table, ProblemFamily, SearchMode, TuneSettings,
};
use optbench_core::report::regenerate;
use optbench_core::{
    emit_reports, gate_error_sweep, Error, OptimizerKind, ProblemKind, ProblemSetup, Scenario, SuiteResult,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "optbench", version, about = "Benchmark variational optimizers on simulated quantum objectives")]
struct Cli {
    /// Worker threads for seeds and tuning candidates (default: all cores).
    #[arg(long, global = true, value_name = "WORKERS")]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every seed of a config and write reports.
    Run(RunArgs),
    /// Search the hyperparameter space of the config's optimizer.
    Tune(TuneArgs),
    /// Precision or gate-error sweeps.
    Sweep(SweepArgs),
    /// Rebuild the CSV summary and SVG charts from a report directory.
    Report {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Print the shipped hyperparameter tables as JSON.
    Defaults(DefaultsArgs),
}

#[derive(Args)]
struct Overrides {
    /// JSON run config.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Seed range `a..b` (end exclusive), replacing the config's seeds.
    #[arg(long, value_name = "A..B", value_parser = parse_seeds)]
    seeds: Option<SeedRange>,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Simulated wall-time limit per run, seconds.
    #[arg(long, value_name = "SECONDS")]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Overrides,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    common: Overrides,
    /// Write the full tuning log here as JSON.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Force grid or random search (default: grid up to 1000 combinations).
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Candidates tried by random search.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Overrides,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = SweepKind::GateError)]
    kind: SweepKind,
    /// Rotation-error levels for a gate-error sweep.
    #[arg(long, value_delimiter = ',', value_name = "EPS,..")]
    epsilons: Option<Vec<f64>>,
    /// Precision targets; for a gate-error sweep only the first is used.
    #[arg(long, value_delimiter = ',', value_name = "DELTA,..")]
    precisions: Option<Vec<f64>>,
}

#[derive(Args)]
struct DefaultsArgs {
    /// Print the search spaces instead of the tuned values.
    #[arg(long)]
    spaces: bool,
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    problem: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Zero,
    Batch,
    Nobatch,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Zero => Scenario::ZeroLatency,
            ScenarioArg::Batch => Scenario::LatencyWithBatching,
            ScenarioArg::Nobatch => Scenario::LatencyNoBatching,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Grid,
    Random,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SweepKind {
    Precision,
    GateError,
}

#[derive(Clone)]
struct SeedRange(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedRange, String> {
    let (a, b) = s.split_once("..").ok_or("expected a range like 0..50")?;
    let a: u64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    if b <= a {
        return Err("seed range is empty".into());
    }
    Ok(SeedRange((a..b).collect()))
}

fn load_config(o: &Overrides) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(&o.config)?;
    let mut c = RunConfig::from_json(&text)?;
    if let Some(s) = &o.seeds {
        c.seeds = s.0.clone();
    }
    if let Some(s) = o.scenario {
        c.cost.scenario = s.into();
    }
    if let Some(t) = o.time_limit {
        c.time_limit = Some(t);
    }
    c.validate()?;
    Ok(c)
}

fn target_for(c: &RunConfig) -> Result<Target, Error> {
    Ok(Target::Problem(Arc::new(ProblemSetup::build(&c.problem)?)))
}

fn write_reports(results: &[SuiteResult], out: &Path) -> Result<(), Error> {
    let files = emit_reports(results, out)?;
    for r in results {
        for s in &r.summary.precisions {
            let time = match s.mean_time_s {
                Some(t) => format!("{t:.1}s"),
                None => "-".into(),
            };
            println!(
                "{}  delta={}  success {}/{} ({:.2} ± {:.2})  time {time}",
                r.config.suite_name(),
                s.precision,
                s.successes,
                s.runs,
                s.success_prob,
                s.success_std
            );
        }
    }
    println!("wrote {} files to {}", files.len(), out.display());
    Ok(())
}

fn run(args: RunArgs) -> Result<(), Error> {
    let c = load_config(&args.common)?;
    let r = optbench_core::run_suite(&c)?;
    write_reports(&[r], &args.out)
}

fn tune(args: TuneArgs) -> Result<(), Error> {
    let c = load_config(&args.common)?;
    let space = search_space(c.optimizer, ProblemFamily::of(c.problem.kind))?;
    let mut settings = TuneSettings::new(c.optimizer, c.precisions[0], c.time_limit());
    settings.cost = c.cost;
    settings.fixed = c.overrides.clone();
    settings.mode = match args.mode {
        None => SearchMode::auto(&space),
        Some(ModeArg::Grid) => SearchMode::Grid,
        Some(ModeArg::Random) => SearchMode::Random { budget: args.budget },
    };
    let result = search(&space, &target_for(&c)?, &settings)?;
    println!("{}", serde_json::to_string_pretty(&result.best)?);
    match result.best_time_s {
        Some(t) => println!("converged after {t:.1}s simulated"),
        None => println!("no candidate converged"),
    }
    if let Some(dir) = args.out {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("tune.json"), serde_json::to_string_pretty(&result)? + "\n")?;
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Error> {
    let mut c = load_config(&args.common)?;
    let target = target_for(&c)?;
    let results = match args.kind {
        SweepKind::Precision => {
            c.precisions = args.precisions.unwrap_or_else(|| vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4]);
            c.validate()?;
            vec![optbench_core::experiment::run_suite_on(&c, &target)?]
        }
        SweepKind::GateError => {
            let eps = args.epsilons.unwrap_or_else(|| DEFAULT_EPSILONS.to_vec());
            let precision = args.precisions.and_then(|p| p.first().copied()).unwrap_or(GATE_ERROR_PRECISION);
            gate_error_sweep(&c, &target, &eps, precision)?
        }
    };
    write_reports(&results, &args.out)
}

fn defaults(args: DefaultsArgs) -> Result<(), Error> {
    let opt: Option<OptimizerKind> = args.optimizer.as_deref().map(str::parse).transpose()?;
    let problem: Option<ProblemKind> = args.problem.as_deref().map(str::parse).transpose()?;
    let text = if args.spaces {
        let mut t = spaces_table().clone();
        t.spaces.retain(|e| {
            opt.is_none_or(|o| o == e.optimizer) && problem.is_none_or(|p| ProblemFamily::of(p) == e.family)
        });
        serde_json::to_string_pretty(&t)?
    } else {
        let mut t = defaults_table().clone();
        t.entries.retain(|e| opt.is_none_or(|o| o == e.optimizer) && problem.is_none_or(|p| p == e.problem));
        serde_json::to_string_pretty(&t)?
    };
    println!("{text}");
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::NotConverged(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.parallel {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Tune(a) => tune(a),
        Command::Sweep(a) => sweep(a),
        Command::Report { out } => {
            regenerate(&out).map(|files| println!("wrote {} files to {}", files.len(), out.display()))
        }
        Command::Defaults(a) => defaults(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
