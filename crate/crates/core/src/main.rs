use std::fmt::Display;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use densemap::cantor::{cantor_assign, CantorError, DisjointIntervalFamily, PointSequence};
use densemap::enumeration::{index_of, CalkinWilf, SearchError, DEFAULT_MAX_DEPTH, DEFAULT_SCAN_WINDOW};
use densemap::reals::{rational_between, RealError, DEFAULT_REFINE_BUDGET};
use densemap::trace::{replay_check, RunConfig, TraceError, TraceFile};
use densemap::{EnumIndex, Rational, RationalInterval, Real, RunCause, SearchBudget, SelectionPolicy};

const OUT_DIR_VAR: &str = "DENSEMAP_OUT_DIR";

#[derive(Parser)]
#[command(name = "densemap", version, about = "Exact rational enumeration, interval assignment and greedy pairing runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct BudgetArgs {
    /// Indices tested one at a time before the level jump
    #[arg(long, default_value_t = DEFAULT_SCAN_WINDOW)]
    scan_window: u64,
    /// Deepest tree level an interval search may reach
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: u64,
    /// Refinement steps allowed per comparison
    #[arg(long, default_value_t = DEFAULT_REFINE_BUDGET)]
    refine_budget: u32,
}

impl BudgetArgs {
    fn budget(self) -> SearchBudget {
        SearchBudget {
            scan_window: self.scan_window,
            max_depth: self.max_depth,
            refine_steps: self.refine_budget,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print consecutive terms of the enumeration as CSV
    Enumerate {
        #[arg(long, default_value = "0")]
        from: EnumIndex,
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
    /// Print the enumeration index of a positive rational
    Locate { q: Rational },
    /// Print a rational strictly between two reals, e.g. `1/2` or `1+sqrt(2)`
    Between {
        a: Real,
        b: Real,
        #[arg(long, default_value_t = DEFAULT_REFINE_BUDGET)]
        refine_budget: u32,
    },
    /// Assign enumerated points to a family of disjoint intervals
    Cantor {
        /// JSON list of ["lo","hi"] fraction pairs inside (0,1)
        #[arg(long)]
        intervals: PathBuf,
        /// `cw` for the mapped enumeration, or a JSON list of fractions
        #[arg(long, default_value = "cw")]
        points: String,
        /// Number of intervals to assign (default: all)
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the greedy pairing and write a trace
    Greedy {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value = "enum")]
        policy: SelectionPolicy,
        /// Trace path; relative paths are resolved against $DENSEMAP_OUT_DIR when set
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Replay a trace and verify every step
    Check {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

enum Failure {
    Input(String),
    Io(String),
    Check(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 3,
            Failure::Io(_) => 4,
            Failure::Check(_) => 5,
            Failure::Budget(_) => 6,
        }
    }

    fn report(&self) {
        let (kind, msg) = match self {
            Failure::Input(m) => ("invalid input", m),
            Failure::Io(m) => ("io", m),
            Failure::Check(m) => ("check failed", m),
            Failure::Budget(m) => ("budget exhausted", m),
        };
        eprintln!("densemap: {kind}: {msg}");
    }
}

fn io_failure(path: &Path, e: impl Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::ScanBudget { .. } | SearchError::DepthBudget { .. } => Failure::Budget(e.to_string()),
            SearchError::Refinement(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<RealError> for Failure {
    fn from(e: RealError) -> Self {
        match e {
            RealError::RefinementBudget { .. } => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<CantorError> for Failure {
    fn from(e: CantorError) -> Self {
        match e {
            CantorError::ScanBudget { .. } => Failure::Budget(e.to_string()),
            CantorError::Search { source, v } => match Failure::from(source) {
                Failure::Budget(m) => Failure::Budget(format!("interval {v}: {m}")),
                Failure::Input(m) => Failure::Input(format!("interval {v}: {m}")),
                other => other,
            },
            other => Failure::Input(other.to_string()),
        }
    }
}

fn stdout_failure(e: io::Error) -> Failure {
    Failure::Io(format!("stdout: {e}"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn enumerate(from: &EnumIndex, count: u64) -> Result<(), Failure> {
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(out, "index,rational").map_err(stdout_failure)?;
    for (index, q) in CalkinWilf::from_index(from).take(count as usize) {
        writeln!(out, "{index},{q}").map_err(stdout_failure)?;
    }
    out.flush().map_err(stdout_failure)
}

#[derive(Serialize)]
struct CantorRow {
    v: usize,
    kappa: EnumIndex,
    point: Rational,
}

fn cantor(intervals: &Path, points: &str, n: Option<usize>, budget: SearchBudget) -> Result<(), Failure> {
    let raw: Vec<RationalInterval> = read_json(intervals)?;
    let family = DisjointIntervalFamily::new(raw)?;
    let points = if points == "cw" {
        PointSequence::CalkinWilf
    } else {
        PointSequence::explicit(read_json(Path::new(points))?)?
    };
    let n = n.unwrap_or(family.len());
    let assignment = cantor_assign(&family, &points, n, &budget)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for (v, (kappa, point)) in assignment.kappa.into_iter().zip(assignment.points).enumerate() {
        let row = serde_json::to_string(&CantorRow { v, kappa, point }).expect("serializable");
        writeln!(out, "{row}").map_err(stdout_failure)?;
    }
    out.flush().map_err(stdout_failure)
}

fn resolve_out(out: PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if out.is_relative() => Path::new(&dir).join(out),
        _ => out,
    }
}

fn greedy(seed: u64, steps: u64, policy: SelectionPolicy, out: PathBuf, budget: SearchBudget) -> Result<(), Failure> {
    let path = resolve_out(out);
    let mut config = RunConfig::new(seed, steps, policy);
    config.search = budget;
    config.output = Some(path.clone());
    let (outcome, trace) = config.execute().map_err(|e| match e {
        TraceError::Io(e) => io_failure(&path, e),
        other => Failure::Input(other.to_string()),
    })?;
    trace.save(&path).map_err(|e| io_failure(&path, e))?;
    let stats = &outcome.stats;
    println!(
        "{} steps, cause: {}, |Q| = {}, max index depth {}, trace: {}",
        stats.steps,
        outcome.cause,
        stats.q_size,
        stats.max_index_depth,
        path.display()
    );
    match outcome.cause {
        RunCause::BudgetExhausted | RunCause::SourceStreamEnded => Ok(()),
        RunCause::SearchBudgetError(m) => Err(Failure::Budget(m)),
        RunCause::RejectedInput(m) => Err(Failure::Input(m)),
        RunCause::RationalsExhausted => Err(Failure::Check("rationals exhausted".into())),
    }
}

fn check(input: &Path) -> Result<(), Failure> {
    let trace = TraceFile::load(input).map_err(|e| match e {
        TraceError::Io(e) => io_failure(input, e),
        other => Failure::Input(format!("{}: {other}", input.display())),
    })?;
    let report = replay_check(&trace);
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} did not verify", input.display())))
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Enumerate { from, count } => enumerate(&from, count),
        Command::Locate { q } => {
            println!("{}", index_of(&q)?);
            Ok(())
        }
        Command::Between { a, b, refine_budget } => {
            println!("{}", rational_between(&a, &b, refine_budget)?);
            Ok(())
        }
        Command::Cantor { intervals, points, n, budget } => cantor(&intervals, &points, n, budget.budget()),
        Command::Greedy { seed, steps, policy, out, budget } => greedy(seed, steps, policy, out, budget.budget()),
        Command::Check { input } => check(&input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            failure.report();
            ExitCode::from(failure.code())
        }
    }
}
