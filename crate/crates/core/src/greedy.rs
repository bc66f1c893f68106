//! The greedy pairing of irrationals with rationals, run one step at a time.
//!
//! The state starts as `Q = {0}` and an empty list of pairs. Each step takes the
//! next irrational `ξ`, finds the largest `q ∈ Q` below it, selects the first
//! rational strictly between `q` and `ξ`, and records the pair. No member of
//! `Q` lies in `(q, ξ)` (members at most `q` by maximality, the rest above `ξ`),
//! so the selected rational is always new.
//!
//! Runs stop on a step budget or when the source stream ends. Running out of
//! rationals is modeled as an outcome cause so that it is observable, and the
//! checker treats its appearance as a failure.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{first_in_interval, EnumIndex, SearchBudget, SearchError, SelectionPolicy};
use crate::rational::Rational;
use crate::reals::{
    compare_reals, ComputableReal, IrrationalStream, QuadraticSurd, RationalInterval, Real,
    RealError,
};

/// Examples of inversions kept in a report.
const MAX_INVERSION_EXAMPLES: usize = 8;
/// Refinement step at which irrationals are first compared when sorting.
const SORT_ENCLOSURE_STEP: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("{0} was already processed")]
    Duplicate(String),
    #[error("{0} is not positive")]
    NotPositive(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Refinement(#[from] RealError),
}

/// One transfer: `xi` joined the pairs and `q_assigned` joined `Q`.
#[derive(Clone, Debug)]
pub struct PairRecord {
    /// 1-based step number.
    pub step: u64,
    pub xi: ComputableReal,
    pub q_floor: Rational,
    pub q_assigned: Rational,
    pub enum_index: EnumIndex,
    /// First enclosure of `xi` lying entirely above `q_assigned`.
    pub xi_enclosure: RationalInterval,
}

impl PairRecord {
    /// A rational lower bound on `xi - q_floor`, from the recorded enclosure.
    pub fn gap_lower_bound(&self) -> Rational {
        self.xi_enclosure.lo() - &self.q_floor
    }
}

/// `max { q ∈ sorted : q < xi }`, or `None` when every member is above `xi`.
pub fn largest_below(
    sorted: &[Rational],
    xi: &ComputableReal,
    refine_steps: u32,
) -> Result<Option<Rational>, RealError> {
    let (mut lo, mut hi) = (0usize, sorted.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if xi.compare_to_rational(&sorted[mid], refine_steps)?.is_gt() {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo.checked_sub(1).map(|i| sorted[i].clone()))
}

/// The evolving sets: `Q` in ascending order and the list of pairs.
#[derive(Clone, Debug)]
pub struct GreedyState {
    q_sorted: Vec<Rational>,
    records: Vec<PairRecord>,
    seen_surds: HashSet<QuadraticSurd>,
    seen_generic: Vec<ComputableReal>,
}

impl Default for GreedyState {
    fn default() -> Self {
        GreedyState::new()
    }
}

impl GreedyState {
    pub fn new() -> Self {
        GreedyState {
            q_sorted: vec![Rational::zero()],
            records: Vec::new(),
            seen_surds: HashSet::new(),
            seen_generic: Vec::new(),
        }
    }

    /// Members of `Q` in ascending order; always contains zero.
    pub fn q_set(&self) -> &[Rational] {
        &self.q_sorted
    }

    pub fn records(&self) -> &[PairRecord] {
        &self.records
    }

    pub fn step_count(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn into_records(self) -> Vec<PairRecord> {
        self.records
    }

    fn is_duplicate(&self, xi: &ComputableReal) -> bool {
        match xi.as_surd() {
            Some(s) => self.seen_surds.contains(s),
            None => self
                .seen_generic
                .iter()
                .any(|seen| seen.same_value(xi) == Some(true)),
        }
    }

    /// Processes one irrational and returns the new pair.
    pub fn step(
        &mut self,
        xi: ComputableReal,
        policy: SelectionPolicy,
        budget: &SearchBudget,
    ) -> Result<&PairRecord, StepError> {
        if self.is_duplicate(&xi) {
            return Err(StepError::Duplicate(xi.to_string()));
        }
        let steps = budget.refine_steps;
        if xi.compare_to_rational(&Rational::zero(), steps)?.is_lt() {
            return Err(StepError::NotPositive(xi.to_string()));
        }
        let q_floor = largest_below(&self.q_sorted, &xi, steps)?
            .expect("zero is in Q and xi is positive");
        let (q_assigned, enum_index) =
            first_in_interval(&q_floor, &xi.clone().into(), policy, budget)?;
        let xi_enclosure = xi.separating_enclosure(&q_assigned, steps)?;

        let slot = self
            .q_sorted
            .binary_search(&q_assigned)
            .expect_err("the gap below xi holds no member of Q");
        self.q_sorted.insert(slot, q_assigned.clone());
        match xi.as_surd() {
            Some(s) => {
                self.seen_surds.insert(s.clone());
            }
            None => self.seen_generic.push(xi.clone()),
        }
        let step = self.step_count() + 1;
        self.records.push(PairRecord {
            step,
            xi,
            q_floor,
            q_assigned,
            enum_index,
            xi_enclosure,
        });
        Ok(self.records.last().expect("just pushed"))
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum RunCause {
    /// The requested number of steps was performed.
    BudgetExhausted,
    /// The irrational source had no further values.
    SourceStreamEnded,
    /// No rational was left between the floor and the irrational. Never
    /// produced by a correct run.
    RationalsExhausted,
    /// A search or refinement limit was hit.
    SearchBudgetError(String),
    /// The source supplied a duplicate or non-positive value.
    RejectedInput(String),
}

impl fmt::Display for RunCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunCause::BudgetExhausted => f.write_str("budget exhausted"),
            RunCause::SourceStreamEnded => f.write_str("source stream ended"),
            RunCause::RationalsExhausted => f.write_str("rationals exhausted"),
            RunCause::SearchBudgetError(e) => write!(f, "search budget error: {e}"),
            RunCause::RejectedInput(e) => write!(f, "rejected input: {e}"),
        }
    }
}

/// Per-run summary figures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: u64,
    /// `|Q|`, counting the zero sentinel.
    pub q_size: u64,
    /// Number of pairs, i.e. `|X|`.
    pub pair_count: u64,
    /// Deepest tree level of any selected rational.
    pub max_index_depth: u64,
    /// Sum of the tree levels of all selected rationals.
    pub total_index_depth: u64,
    /// Smallest certified lower bound on `xi - q_floor` over the run.
    pub min_gap_lower_bound: Option<Rational>,
}

impl RunStats {
    pub fn from_records(records: &[PairRecord]) -> Self {
        let depths = records.iter().map(|r| r.enum_index.depth());
        RunStats {
            steps: records.len() as u64,
            q_size: records.len() as u64 + 1,
            pair_count: records.len() as u64,
            max_index_depth: depths.clone().max().unwrap_or(0),
            total_index_depth: depths.sum(),
            min_gap_lower_bound: records.iter().map(PairRecord::gap_lower_bound).min(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub cause: RunCause,
    pub policy: SelectionPolicy,
    pub budget: SearchBudget,
    pub records: Vec<PairRecord>,
    pub stats: RunStats,
    pub elapsed: Duration,
}

/// Applies [`GreedyState::step`] up to `steps` times.
///
/// Step errors end the run and are recorded as its cause; they are not
/// returned.
pub fn run(
    stream: impl IntoIterator<Item = ComputableReal>,
    steps: u64,
    policy: SelectionPolicy,
    budget: &SearchBudget,
) -> RunOutcome {
    let started = Instant::now();
    let mut state = GreedyState::new();
    let mut source = stream.into_iter();
    let cause = loop {
        if state.step_count() == steps {
            break RunCause::BudgetExhausted;
        }
        let Some(xi) = source.next() else {
            break RunCause::SourceStreamEnded;
        };
        match state.step(xi, policy, budget) {
            Ok(_) => {}
            Err(StepError::Search(SearchError::EmptyInterval { .. })) => {
                break RunCause::RationalsExhausted;
            }
            Err(e @ (StepError::Duplicate(_) | StepError::NotPositive(_))) => {
                break RunCause::RejectedInput(e.to_string());
            }
            Err(e) => break RunCause::SearchBudgetError(e.to_string()),
        }
    };
    let records = state.into_records();
    RunOutcome {
        cause,
        policy,
        budget: *budget,
        stats: RunStats::from_records(&records),
        records,
        elapsed: started.elapsed(),
    }
}

/// Convenience wrapper over a seeded or explicit [`IrrationalStream`].
pub fn run_stream(
    stream: IrrationalStream,
    steps: u64,
    policy: SelectionPolicy,
    budget: &SearchBudget,
) -> RunOutcome {
    run(stream, steps, policy, budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Two steps selected the same rational.
    Injectivity,
    /// A selected rational was already in `Q`.
    Freshness,
    /// `q_floor < q_assigned < xi` fails.
    Sandwich,
    /// `q_floor` is not the largest member of `Q` below `xi`.
    Maximality,
    /// `|Q| ≠ |X| + 1` after a step.
    Cardinality,
    /// No rational outside the final `Q` was found between two members.
    Properness,
    /// The run ended with rationals exhausted.
    Exhaustion,
    /// An order could not be decided within the refinement budget.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub step: u64,
    pub kind: ViolationKind,
    pub detail: String,
}

/// A rational strictly between two members of the final `Q` and absent from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperWitness {
    pub below: Rational,
    pub above: Rational,
    pub witness: Rational,
}

/// Steps `(i, j)` with `ξ_i < ξ_j` but `q_i > q_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inversion {
    pub lower_xi_step: u64,
    pub higher_xi_step: u64,
}

#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub steps: u64,
    pub q_size: u64,
    pub pair_count: u64,
    pub violations: Vec<Violation>,
    /// Count of order inversions; an expected finding, not a failure.
    pub inversions: u64,
    pub inversion_examples: Vec<Inversion>,
    pub properness: Option<ProperWitness>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "steps: {}", self.steps)?;
        writeln!(
            f,
            "|Q| = {} with the zero sentinel, {} pairs (|Q| = |X| + 1)",
            self.q_size, self.pair_count
        )?;
        match &self.properness {
            Some(w) => writeln!(
                f,
                "proper subset witness: {} lies in ({}, {}) and is not in Q",
                w.witness, w.below, w.above
            )?,
            None => writeln!(f, "proper subset witness: none (Q has one member)")?,
        }
        writeln!(f, "order inversions: {} (expected; the map is not monotone)", self.inversions)?;
        for inv in &self.inversion_examples {
            writeln!(
                f,
                "  xi of step {} < xi of step {} but q of step {} > q of step {}",
                inv.lower_xi_step, inv.higher_xi_step, inv.lower_xi_step, inv.higher_xi_step
            )?;
        }
        if self.violations.is_empty() {
            writeln!(f, "invariants: all hold")
        } else {
            writeln!(f, "violations: {}", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  step {}: {:?}: {}", v.step, v.kind, v.detail)?;
            }
            Ok(())
        }
    }
}

/// Checks an outcome's trace and its termination cause.
pub fn check_invariants(outcome: &RunOutcome) -> InvariantReport {
    let mut report = check_records(&outcome.records, outcome.budget.refine_steps);
    if outcome.cause == RunCause::RationalsExhausted {
        report.violations.push(Violation {
            step: outcome.records.len() as u64 + 1,
            kind: ViolationKind::Exhaustion,
            detail: "run ended with no rational left in the gap".into(),
        });
    }
    report
}

/// Re-verifies every prefix of a trace: injectivity, freshness, sandwich,
/// maximality of the floor and `|Q| = |X| + 1`; then looks for a properness
/// witness and counts order inversions.
pub fn check_records(records: &[PairRecord], refine_steps: u32) -> InvariantReport {
    let mut violations = Vec::new();
    let mut q_sorted = vec![Rational::zero()];
    let mut assigned = HashSet::new();

    for (i, rec) in records.iter().enumerate() {
        let step = rec.step;
        let mut flag = |kind, detail: String| violations.push(Violation { step, kind, detail });

        if rec.step != i as u64 + 1 {
            flag(ViolationKind::Cardinality, format!("step numbered {} at position {}", rec.step, i + 1));
        }
        if !assigned.insert(rec.q_assigned.clone()) {
            flag(ViolationKind::Injectivity, format!("{} selected twice", rec.q_assigned));
        }
        if rec.q_floor.compare(&rec.q_assigned).is_ge() {
            flag(ViolationKind::Sandwich, format!("q_floor {} >= q {}", rec.q_floor, rec.q_assigned));
        }
        match rec.xi.compare_to_rational(&rec.q_assigned, refine_steps) {
            Ok(Ordering::Greater) => {}
            Ok(_) => flag(ViolationKind::Sandwich, format!("q {} is not below {}", rec.q_assigned, rec.xi)),
            Err(e) => flag(ViolationKind::Undecided, e.to_string()),
        }
        match largest_below(&q_sorted, &rec.xi, refine_steps) {
            Ok(Some(floor)) if floor == rec.q_floor => {}
            Ok(found) => flag(
                ViolationKind::Maximality,
                format!("recorded floor {}, largest member below is {:?}", rec.q_floor, found),
            ),
            Err(e) => flag(ViolationKind::Undecided, e.to_string()),
        }
        match q_sorted.binary_search(&rec.q_assigned) {
            Ok(_) => flag(ViolationKind::Freshness, format!("{} already in Q", rec.q_assigned)),
            Err(slot) => q_sorted.insert(slot, rec.q_assigned.clone()),
        }
        if q_sorted.len() != i + 2 {
            flag(
                ViolationKind::Cardinality,
                format!("|Q| = {} after {} pairs", q_sorted.len(), i + 1),
            );
        }
    }

    let properness = properness_witness(&q_sorted);
    if properness.is_none() && q_sorted.len() >= 2 {
        violations.push(Violation {
            step: records.len() as u64,
            kind: ViolationKind::Properness,
            detail: "no rational outside Q between the two smallest members".into(),
        });
    }

    let (inversions, inversion_examples) = match count_inversions(records, refine_steps) {
        Ok(found) => found,
        Err(e) => {
            violations.push(Violation {
                step: records.len() as u64,
                kind: ViolationKind::Undecided,
                detail: format!("ordering irrationals: {e}"),
            });
            (0, Vec::new())
        }
    };

    InvariantReport {
        steps: records.len() as u64,
        q_size: q_sorted.len() as u64,
        pair_count: records.len() as u64,
        violations,
        inversions,
        inversion_examples,
        properness,
    }
}

/// Midpoint of the two smallest members, confirmed absent from `Q`.
pub fn properness_witness(q_sorted: &[Rational]) -> Option<ProperWitness> {
    let (below, above) = (q_sorted.first()?, q_sorted.get(1)?);
    let witness = below.midpoint(above);
    let inside = below.compare(&witness).is_lt() && witness.compare(above).is_lt();
    (inside && q_sorted.binary_search(&witness).is_err()).then(|| ProperWitness {
        below: below.clone(),
        above: above.clone(),
        witness,
    })
}

/// Sorts the steps by `ξ` and counts pairs whose rationals run the other way.
fn count_inversions(records: &[PairRecord], refine_steps: u32) -> Result<(u64, Vec<Inversion>), RealError> {
    let enclosures: Vec<RationalInterval> = records
        .iter()
        .map(|r| r.xi.enclosure(SORT_ENCLOSURE_STEP))
        .collect();
    let failure = RefCell::new(None);
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&i, &j| {
        if enclosures[i].is_left_of(&enclosures[j]) {
            return Ordering::Less;
        }
        if enclosures[j].is_left_of(&enclosures[i]) {
            return Ordering::Greater;
        }
        let a = Real::Computable(records[i].xi.clone());
        let b = Real::Computable(records[j].xi.clone());
        compare_reals(&a, &b, refine_steps).unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            i.cmp(&j)
        })
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }

    let examples = order
        .windows(2)
        .filter(|w| records[w[0]].q_assigned > records[w[1]].q_assigned)
        .take(MAX_INVERSION_EXAMPLES)
        .map(|w| Inversion {
            lower_xi_step: records[w[0]].step,
            higher_xi_step: records[w[1]].step,
        })
        .collect();
    let mut qs: Vec<Rational> = order.iter().map(|&i| records[i].q_assigned.clone()).collect();
    let count = merge_count(&mut qs);
    Ok((count, examples))
}

/// Sorts `v` and returns the number of pairs `i < j` with `v[i] > v[j]`.
fn merge_count(v: &mut [Rational]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = merge_count(&mut v[..mid]) + merge_count(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            count += (mid - i) as u64;
            merged.push(v[j].clone());
            j += 1;
        } else {
            merged.push(v[i].clone());
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.clone_from_slice(&merged);
    count
}
