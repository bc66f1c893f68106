//! Run configuration and the JSON-lines trace format.
//!
//! A trace holds one header line, one line per step and one footer line. All
//! numbers other than counts are fraction strings. The header carries
//! everything needed to regenerate the irrational stream, and nothing in the
//! file depends on wall-clock time, so equal configurations give equal bytes.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{first_in_interval, EnumIndex, SearchBudget, SelectionPolicy};
use crate::greedy::{check_records, run, InvariantReport, PairRecord, RunCause, RunOutcome, RunStats};
use crate::rational::Rational;
use crate::reals::{
    ComputableReal, IrrationalStream, QuadraticSurd, RationalInterval, SurdStreamParams,
    SURD_GENERATOR,
};

pub const TRACE_FORMAT: &str = "densemap-trace/1";

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0} cannot be written to a trace; only quadratic surds can")]
    Unserializable(String),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Everything that determines a greedy run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub steps: u64,
    pub policy: SelectionPolicy,
    pub search: SearchBudget,
    pub coeff_bound: u32,
    pub radicands: Vec<u64>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(seed: u64, steps: u64, policy: SelectionPolicy) -> Self {
        let stream = SurdStreamParams::with_seed(seed);
        RunConfig {
            seed,
            steps,
            policy,
            search: SearchBudget::default(),
            coeff_bound: stream.coeff_bound,
            radicands: stream.radicands,
            output: None,
        }
    }

    pub fn stream_params(&self) -> SurdStreamParams {
        SurdStreamParams {
            seed: self.seed,
            coeff_bound: self.coeff_bound,
            radicands: self.radicands.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        let s = &self.search;
        if s.scan_window == 0 || s.max_depth == 0 || s.refine_steps == 0 {
            return Err(TraceError::Config(format!("every budget must be positive: {s:?}")));
        }
        IrrationalStream::seeded(self.stream_params()).map_err(|e| TraceError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn stream(&self) -> Result<IrrationalStream, TraceError> {
        IrrationalStream::seeded(self.stream_params()).map_err(|e| TraceError::Config(e.to_string()))
    }

    /// Runs the configuration and returns the outcome with its trace.
    pub fn execute(&self) -> Result<(RunOutcome, TraceFile), TraceError> {
        self.validate()?;
        let outcome = run(self.stream()?, self.steps, self.policy, &self.search);
        let trace = TraceFile::from_outcome(self, &outcome)?;
        Ok((outcome, trace))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub name: String,
    pub seed: u64,
    pub coeff_bound: u32,
    pub radicands: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub config: RunConfig,
    pub generator: GeneratorInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLine {
    pub step: u64,
    pub xi: String,
    pub q_floor: Rational,
    pub q_assigned: Rational,
    pub enum_index: EnumIndex,
    pub gap_lo: Rational,
    pub gap_hi_enclosure: RationalInterval,
}

impl StepLine {
    fn from_record(rec: &PairRecord) -> Result<Self, TraceError> {
        if rec.xi.as_surd().is_none() {
            return Err(TraceError::Unserializable(rec.xi.to_string()));
        }
        Ok(StepLine {
            step: rec.step,
            xi: rec.xi.to_string(),
            q_floor: rec.q_floor.clone(),
            q_assigned: rec.q_assigned.clone(),
            enum_index: rec.enum_index.clone(),
            gap_lo: rec.q_floor.clone(),
            gap_hi_enclosure: rec.xi_enclosure.clone(),
        })
    }

    /// The line as it appears in a trace file, without the newline.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&TraceLine::Step(self.clone())).expect("serializable")
    }

    fn surd(&self) -> Result<QuadraticSurd, String> {
        let s: QuadraticSurd = self.xi.parse().map_err(|e| format!("xi: {e}"))?;
        if s.to_string() != self.xi {
            return Err(format!("xi {} is not in canonical form", self.xi));
        }
        Ok(s)
    }

    fn to_record(&self) -> Result<PairRecord, String> {
        Ok(PairRecord {
            step: self.step,
            xi: ComputableReal::surd(self.surd()?),
            q_floor: self.q_floor.clone(),
            q_assigned: self.q_assigned.clone(),
            enum_index: self.enum_index.clone(),
            xi_enclosure: self.gap_hi_enclosure.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFooter {
    pub cause: RunCause,
    #[serde(flatten)]
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum TraceLine {
    Header(TraceHeader),
    Step(StepLine),
    Footer(TraceFooter),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub steps: Vec<StepLine>,
    pub footer: TraceFooter,
}

impl TraceFile {
    pub fn from_outcome(config: &RunConfig, outcome: &RunOutcome) -> Result<Self, TraceError> {
        let steps = outcome
            .records
            .iter()
            .map(StepLine::from_record)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TraceFile {
            header: TraceHeader {
                format: TRACE_FORMAT.to_string(),
                config: config.clone(),
                generator: GeneratorInfo {
                    name: SURD_GENERATOR.to_string(),
                    seed: config.seed,
                    coeff_bound: config.coeff_bound,
                    radicands: config.radicands.clone(),
                },
            },
            steps,
            footer: TraceFooter {
                cause: outcome.cause.clone(),
                stats: outcome.stats.clone(),
            },
        })
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        let mut line = |record: TraceLine| -> io::Result<()> {
            serde_json::to_writer(&mut w, &record)?;
            w.write_all(b"\n")
        };
        line(TraceLine::Header(self.header.clone()))?;
        for step in &self.steps {
            line(TraceLine::Step(step.clone()))?;
        }
        line(TraceLine::Footer(self.footer.clone()))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("serde_json writes UTF-8")
    }

    pub fn save(&self, path: &Path) -> Result<(), TraceError> {
        let mut file = io::BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, TraceError> {
        TraceFile::parse(&fs::read_to_string(path)?)
    }

    /// Parses a trace. Each line must be exactly what [`TraceFile::write_to`]
    /// would produce for its content, so fractions are canonical.
    pub fn parse(text: &str) -> Result<Self, TraceError> {
        let mut header = None;
        let mut steps = Vec::new();
        let mut footer = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let bad = |msg: String| TraceError::Malformed { line, msg };
            if footer.is_some() {
                return Err(bad("content after the footer".into()));
            }
            let record: TraceLine = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
            let again = serde_json::to_string(&record).expect("serializable");
            if again != raw {
                return Err(bad("not in canonical form".into()));
            }
            match (record, header.is_some()) {
                (TraceLine::Header(h), false) => {
                    if h.format != TRACE_FORMAT {
                        return Err(bad(format!("unsupported format {}", h.format)));
                    }
                    header = Some(h);
                }
                (TraceLine::Header(_), true) => return Err(bad("second header".into())),
                (_, false) => return Err(bad("missing header".into())),
                (TraceLine::Step(s), true) => steps.push(s),
                (TraceLine::Footer(f), true) => footer = Some(f),
            }
        }
        let header = header.ok_or(TraceError::Malformed { line: 1, msg: "empty trace".into() })?;
        let footer = footer.ok_or(TraceError::Malformed {
            line: steps.len() + 2,
            msg: "missing footer".into(),
        })?;
        Ok(TraceFile { header, steps, footer })
    }
}

/// A step (or the footer, as step 0) that failed re-derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub step: u64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub steps: u64,
    pub mismatches: Vec<Mismatch>,
    pub invariants: Option<InvariantReport>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.invariants.as_ref().map_or(false, InvariantReport::passed)
    }
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mismatches.is_empty() {
            writeln!(f, "replay: all {} steps re-derived exactly", self.steps)?;
        } else {
            writeln!(f, "replay: {} mismatches", self.mismatches.len())?;
            for m in &self.mismatches {
                if m.step == 0 {
                    writeln!(f, "  footer: {}", m.detail)?;
                } else {
                    writeln!(f, "  step {}: {}", m.step, m.detail)?;
                }
            }
        }
        match &self.invariants {
            Some(report) => write!(f, "{report}"),
            None => writeln!(f, "invariants: not checked (unreadable steps)"),
        }
    }
}

/// Re-derives every step of a trace and checks the invariants.
///
/// The irrationals are regenerated from the header and compared with the
/// recorded ones; each step's selection is then recomputed from its recorded
/// floor and irrational, independently and in parallel.
pub fn replay_check(trace: &TraceFile) -> ReplayReport {
    let config = &trace.header.config;
    let budget = config.search;
    let mut mismatches = Vec::new();

    mismatches.extend(check_stream(trace));

    let mut rederived: Vec<Mismatch> = trace
        .steps
        .par_iter()
        .enumerate()
        .filter_map(|(i, line)| rederive_step(i, line, config.policy, &budget).err())
        .collect();
    rederived.sort_by_key(|m| m.step);
    mismatches.extend(rederived);

    let records: Result<Vec<PairRecord>, String> = trace.steps.iter().map(StepLine::to_record).collect();
    let invariants = records.ok().map(|records| {
        let recomputed = RunStats::from_records(&records);
        if recomputed != trace.footer.stats {
            mismatches.push(Mismatch {
                step: 0,
                detail: format!("stats {:?} do not match the steps ({recomputed:?})", trace.footer.stats),
            });
        }
        let mut report = check_records(&records, budget.refine_steps);
        if trace.footer.cause == RunCause::RationalsExhausted {
            report.violations.push(crate::greedy::Violation {
                step: records.len() as u64 + 1,
                kind: crate::greedy::ViolationKind::Exhaustion,
                detail: "trace ends with rationals exhausted".into(),
            });
        }
        report
    });

    ReplayReport {
        steps: trace.steps.len() as u64,
        mismatches,
        invariants,
    }
}

fn check_stream(trace: &TraceFile) -> Vec<Mismatch> {
    let config = &trace.header.config;
    let generator = &trace.header.generator;
    let mut found = Vec::new();
    let expected = GeneratorInfo {
        name: SURD_GENERATOR.to_string(),
        seed: config.seed,
        coeff_bound: config.coeff_bound,
        radicands: config.radicands.clone(),
    };
    if *generator != expected {
        found.push(Mismatch { step: 0, detail: format!("generator {generator:?} does not match {expected:?}") });
        return found;
    }
    let mut stream = match config.stream() {
        Ok(s) => s,
        Err(e) => {
            found.push(Mismatch { step: 0, detail: e.to_string() });
            return found;
        }
    };
    for (i, line) in trace.steps.iter().enumerate() {
        let step = i as u64 + 1;
        match stream.next() {
            Some(xi) if xi.to_string() == line.xi => {}
            Some(xi) => found.push(Mismatch { step, detail: format!("xi {} but the stream gives {xi}", line.xi) }),
            None => found.push(Mismatch { step, detail: "the stream ended before this step".into() }),
        }
    }
    let n = trace.steps.len() as u64;
    match &trace.footer.cause {
        RunCause::BudgetExhausted if n != config.steps => found.push(Mismatch {
            step: 0,
            detail: format!("budget of {} steps but {n} recorded", config.steps),
        }),
        RunCause::SourceStreamEnded if stream.next().is_some() => found.push(Mismatch {
            step: 0,
            detail: "stream ended according to the footer but has more values".into(),
        }),
        _ => {}
    }
    if trace.footer.stats.steps != n {
        found.push(Mismatch {
            step: 0,
            detail: format!("footer counts {} steps, {n} recorded", trace.footer.stats.steps),
        });
    }
    found
}

fn rederive_step(i: usize, line: &StepLine, policy: SelectionPolicy, budget: &SearchBudget) -> Result<(), Mismatch> {
    let step = i as u64 + 1;
    let fail = |detail: String| Mismatch { step, detail };
    if line.step != step {
        return Err(fail(format!("numbered {}", line.step)));
    }
    if line.gap_lo != line.q_floor {
        return Err(fail(format!("gap_lo {} differs from q_floor {}", line.gap_lo, line.q_floor)));
    }
    let xi = ComputableReal::surd(line.surd().map_err(fail)?);
    let (q, index) = first_in_interval(&line.q_floor, &xi.clone().into(), policy, budget)
        .map_err(|e| fail(format!("re-derivation failed: {e}")))?;
    if q != line.q_assigned {
        return Err(fail(format!("q_assigned {} but re-derived {q}", line.q_assigned)));
    }
    if index != line.enum_index {
        return Err(fail(format!("enum_index {} but re-derived {index}", line.enum_index)));
    }
    let enclosure = xi
        .separating_enclosure(&q, budget.refine_steps)
        .map_err(|e| fail(e.to_string()))?;
    if enclosure != line.gap_hi_enclosure {
        return Err(fail(format!(
            "enclosure {:?} but re-derived {:?}",
            line.gap_hi_enclosure, enclosure
        )));
    }
    Ok(())
}
