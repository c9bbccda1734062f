//! `tsrm` command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 solver error, 4 enumeration limit,
//! 5 I/O or unreadable input.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bench::{self, BenchRow};
use crate::error::{Error, Result};
use crate::evaluate::{self, brute_force_opt_with, eval_tsrm, Objective, OptDecomposition};
use crate::instances::trips::{read_trips_csv, BoundingBox, WindowSpec};
use crate::instances::{
    gen_from_2partition, gen_from_3dm, gen_from_set_cover, gen_line_counterexample, gen_random_euclidean,
    gen_surplus_counterexample, ScenarioSpec,
};
use crate::io::{emit, read_instance, to_canonical_string, write_instance};
use crate::model::{self, FirstStageDecision, MetricInstance, ScenarioSet, SolveReport};
use crate::solvers::{self, SolverKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_ENUM_LIMIT: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "tsrm", version, about = "Two-stage robust bottleneck matching toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run a solver and report its decision and costs.
    Solve {
        #[arg(long)]
        solver: String,
        #[command(flatten)]
        common: Common,
        /// Scenario probabilities for `tssmb`, comma separated.
        #[arg(long, value_delimiter = ',')]
        probs: Option<Vec<f64>>,
    },
    /// Evaluate a fixed first-stage driver set.
    Eval {
        /// Driver indices, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "decision")]
        drivers: Option<Vec<usize>>,
        /// A report written by `solve`; its decision is evaluated.
        #[arg(long, conflicts_with = "drivers")]
        decision: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Robust)]
        objective: ObjectiveArg,
        #[command(flatten)]
        common: Common,
    },
    /// Exact optimum by exhaustive enumeration.
    Oracle {
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Robust)]
        objective: ObjectiveArg,
        #[command(flatten)]
        common: Common,
    },
    /// Greedy against the two-scenario solver on trip batches or stored instances.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = evaluate::DEFAULT_ENUM_LIMIT)]
    pub enum_limit: u128,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Trip log CSV.
    #[arg(long, conflicts_with = "dir", requires = "window")]
    pub trips: Option<PathBuf>,
    /// Batch start time, `YYYY-MM-DD HH:MM:SS`; repeatable.
    #[arg(long)]
    pub window: Vec<String>,
    /// Directory of instance files instead of a trip log.
    #[arg(long, required_unless_present = "trips")]
    pub dir: Option<PathBuf>,
    /// Keep every coordinate instead of the default bounding box.
    #[arg(long)]
    pub no_bbox: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Alternating riders and drivers on a line, one late rider.
    Line {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Uniform points in a square.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        r1: usize,
        #[arg(long, default_value_t = 6)]
        r2: usize,
        #[arg(long, default_value_t = 8)]
        d: usize,
        /// Number of explicit scenarios.
        #[arg(long, default_value_t = 2)]
        scenarios: usize,
        /// Riders per explicit scenario.
        #[arg(long, default_value_t = 2)]
        size: usize,
        /// Use the implicit model with this `k` instead.
        #[arg(long, conflicts_with_all = ["scenarios", "size"])]
        implicit_k: Option<usize>,
        #[arg(long = "box", default_value_t = 10.0)]
        box_size: f64,
    },
    /// From a 3-dimensional matching instance with a planted yes or no answer.
    #[command(name = "3dm")]
    ThreeDm {
        #[arg(long, value_enum)]
        planted: YesNo,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        scenarios: usize,
    },
    /// From a small set-cover instance with a planted yes or no answer.
    Setcover {
        #[arg(long, value_enum)]
        planted: YesNo,
    },
    /// Total-weight instance from a list of positive integers.
    Partition {
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
    },
    /// Mirrored chains with single-rider scenarios at both ends.
    Surplus {
        #[arg(long, default_value_t = 3)]
        m: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum YesNo {
    Yes,
    No,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Robust,
    Tsrm,
    Stochastic,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl Failure {
    fn usage(error: Error) -> Self {
        Failure { code: EXIT_USAGE, error }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match &error {
            Error::EnumerationTooLarge { .. } => EXIT_ENUM_LIMIT,
            Error::Io(_) | Error::Json(_) | Error::Parse { .. } | Error::InvalidInstance(_) => EXIT_IO,
            Error::InvalidArgument(_) | Error::BadDistribution(_) => EXIT_USAGE,
            _ => EXIT_SOLVER,
        };
        Failure { code, error }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code; diagnostics go to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}: {}", f.error.name(), f.error);
            f.code
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen { kind, out } => cmd_gen(&kind, out.as_deref()),
        Command::Solve { solver, common, probs } => cmd_solve(&solver, &common, probs.as_deref()),
        Command::Eval { drivers, decision, objective, common } => {
            let drivers = match (drivers, decision) {
                (Some(d), _) => d,
                (None, Some(path)) => drivers_from_report(&path)?,
                (None, None) => return Err(Failure::usage(Error::InvalidArgument("need --drivers or --decision".into()))),
            };
            cmd_eval(&drivers, objective, &common)
        }
        Command::Oracle { objective, common } => cmd_oracle(objective, &common),
        Command::Bench(args) => cmd_bench(&args),
    }
}

fn generate(kind: &GenKind) -> Result<MetricInstance> {
    match *kind {
        GenKind::Line { m, eps } => gen_line_counterexample(m, eps),
        GenKind::Random { seed, r1, r2, d, scenarios, size, implicit_k, box_size } => {
            let family = match implicit_k {
                Some(k) => ScenarioSpec::Implicit { k },
                None => ScenarioSpec::Explicit { count: scenarios, size },
            };
            gen_random_euclidean(r1, r2, d, &family, box_size, seed)
        }
        GenKind::ThreeDm { planted, n, scenarios } => gen_from_3dm(n, &planted_triples(planted, n)?, scenarios),
        GenKind::Setcover { planted } => {
            let sets = match planted {
                YesNo::Yes => vec![vec![0, 1, 2], vec![0], vec![1]],
                YesNo::No => vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            };
            gen_from_set_cover(3, &sets, 1)
        }
        GenKind::Partition { ref values } => gen_from_2partition(values),
        GenKind::Surplus { m } => gen_surplus_counterexample(m),
    }
}

/// Triples over `0..n`. The yes family contains the diagonal; in the no
/// family every third coordinate above 0 appears only with first
/// coordinate 0.
pub fn planted_triples(planted: YesNo, n: usize) -> Result<Vec<(usize, usize, usize)>> {
    match planted {
        YesNo::Yes if n >= 2 => {
            let mut t: Vec<_> = (0..n).map(|i| (i, i, i)).collect();
            t.extend((0..n - 1).map(|i| (i, (i + 1) % n, (i + 2) % n)));
            Ok(t)
        }
        YesNo::No if n >= 3 => {
            let mut t: Vec<_> = (0..n).map(|i| (i, i, 0)).collect();
            t.extend((1..n).map(|j| (0, j, j)));
            Ok(t)
        }
        _ => Err(Error::InvalidArgument(format!("n = {n} is too small for a {planted:?} instance"))),
    }
}

fn summary(inst: &MetricInstance) -> String {
    let scenarios = match inst.scenarios() {
        ScenarioSet::Explicit(list) => format!("explicit({})", list.len()),
        ScenarioSet::Implicit { k } => format!("implicit(k={k})"),
    };
    let surplus = model::surplus(inst).map_or_else(|_| "n/a".to_string(), |l| l.to_string());
    format!("r1={} r2={} d={} scenarios={scenarios} surplus={surplus}", inst.n_r1(), inst.n_r2(), inst.n_d())
}

fn cmd_gen(kind: &GenKind, out: Option<&Path>) -> CliResult<()> {
    let inst = generate(kind).map_err(Failure::usage)?;
    match out {
        Some(p) => write_instance(p, &inst)?,
        None => emit(None, &crate::io::instance_to_string(&inst)?)?,
    }
    eprintln!("{}", summary(&inst));
    Ok(())
}

fn report_for(inst: &MetricInstance, d1: &FirstStageDecision, objective: ObjectiveArg, probs: Option<&[f64]>, limit: u128) -> Result<SolveReport> {
    match objective {
        ObjectiveArg::Tsrm => eval_tsrm(inst, d1),
        ObjectiveArg::Robust => evaluate::evaluate(inst, d1, limit),
        ObjectiveArg::Stochastic => {
            let mut r = evaluate::eval_explicit(inst, d1)?;
            let probs = probs_or_uniform(inst, probs);
            r.total = evaluate::eval_stochastic(inst, d1, &probs)?;
            Ok(r)
        }
    }
}

fn probs_or_uniform(inst: &MetricInstance, probs: Option<&[f64]>) -> Vec<f64> {
    match probs {
        Some(p) => p.to_vec(),
        None => {
            let p = inst.scenarios().explicit().map_or(1, <[_]>::len).max(1);
            vec![1.0 / p as f64; p]
        }
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    report: &'a SolveReport,
    decision: &'a FirstStageDecision,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_secs: Option<f64>,
}

fn write_report(common: &Common, report: &SolveReport, decision: &FirstStageDecision, wall: Option<f64>) -> CliResult<()> {
    let text = match common.format {
        Format::Json => to_canonical_string(&SolveOutput { report, decision, wall_time_secs: wall })?,
        Format::Csv => {
            let drivers = decision.drivers.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            format!(
                "solver,cost1,worst_cost2,total,drivers\n{},{},{},{},{}\n",
                report.solver_name, report.cost1, report.worst_cost2, report.total, drivers
            )
        }
    };
    emit(common.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_solve(solver: &str, common: &Common, probs: Option<&[f64]>) -> CliResult<()> {
    let kind: SolverKind = solver.parse().map_err(Failure::usage)?;
    let inst = read_instance(&common.instance)?;
    let start = Instant::now();
    let sol = solvers::run(&inst, kind, probs).map_err(|e| Failure { code: EXIT_SOLVER, error: e })?;
    let wall = start.elapsed().as_secs_f64();
    let objective = match kind {
        k if k.is_tsrm() => ObjectiveArg::Tsrm,
        SolverKind::Tssmb => ObjectiveArg::Stochastic,
        _ => ObjectiveArg::Robust,
    };
    let report = report_for(&inst, &sol.decision, objective, probs, common.enum_limit)?.named(kind.name(), sol.opt2_guess);
    write_report(common, &report, &sol.decision, Some(wall))
}

fn drivers_from_report(path: &Path) -> CliResult<Vec<usize>> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).map_err(Error::from)?).map_err(Error::from)?;
    v.pointer("/decision/drivers")
        .and_then(|d| d.as_array())
        .and_then(|a| a.iter().map(|x| x.as_u64().map(|x| x as usize)).collect::<Option<Vec<_>>>())
        .ok_or_else(|| Failure::from(Error::InvalidInstance("report has no decision.drivers list".into())))
}

fn cmd_eval(drivers: &[usize], objective: ObjectiveArg, common: &Common) -> CliResult<()> {
    let inst = read_instance(&common.instance)?;
    let d1 = FirstStageDecision::from_driver_set(&inst, drivers).map_err(Failure::usage)?;
    let report = report_for(&inst, &d1, objective, None, common.enum_limit)?.named("fixed", None);
    write_report(common, &report, &d1, None)
}

fn cmd_oracle(objective: ObjectiveArg, common: &Common) -> CliResult<()> {
    let inst = read_instance(&common.instance)?;
    let obj = match objective {
        ObjectiveArg::Robust => Objective::Robust,
        ObjectiveArg::Tsrm => Objective::Tsrm,
        ObjectiveArg::Stochastic => Objective::Stochastic(probs_or_uniform(&inst, None)),
    };
    let opt: OptDecomposition = brute_force_opt_with(&inst, &obj, common.enum_limit)?;
    let text = match common.format {
        Format::Json => to_canonical_string(&opt)?,
        Format::Csv => {
            let drivers = opt.optimal_d1.drivers.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            format!("opt1,opt2,total,drivers\n{},{},{},{}\n", opt.opt1, opt.opt2, opt.total, drivers)
        }
    };
    emit(common.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let results: Vec<Result<BenchRow>> = match (&args.trips, &args.dir) {
        (Some(trips), _) => {
            let records = read_trips_csv(trips)?;
            let windows = args
                .window
                .iter()
                .map(|w| Ok((w.clone(), WindowSpec::at(w)?)))
                .collect::<Result<Vec<_>>>()
                .map_err(Failure::usage)?;
            let bbox = if args.no_bbox { BoundingBox::everywhere() } else { BoundingBox::default() };
            bench::bench_trips(&records, &windows, &bbox, args.seed, args.repeats as usize)
        }
        (None, Some(dir)) => bench::bench_directory(dir)?,
        (None, None) => return Err(Failure::usage(Error::InvalidArgument("need --trips or --dir".into()))),
    };
    let mut rows = Vec::new();
    let mut failed = 0;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                failed += 1;
                eprintln!("warning: skipped batch: {}: {e}", e.name());
            }
        }
    }
    if failed > 0 {
        log::info!("{failed} batches skipped");
    }
    let text = match args.format {
        Format::Csv => bench::to_csv(&rows),
        Format::Json => to_canonical_string(&json!(rows))?,
    };
    emit(args.out.as_deref(), &text)?;
    Ok(())
}

/// Caps the global worker pool at `TSRM_THREADS` when set.
pub fn init_thread_pool() -> Result<()> {
    if let Ok(v) = std::env::var("TSRM_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| Error::InvalidArgument(format!("TSRM_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}
