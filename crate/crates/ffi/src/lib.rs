//! C ABI over the densemap library.
//!
//! Values cross the boundary as opaque handles or as NUL-terminated UTF-8
//! strings. Every fallible call returns a [`DmStatus`]; on failure a message
//! is available from [`dm_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released with
//! [`dm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use densemap::enumeration::{index_of, nth_rational, SearchError};
use densemap::greedy::{check_invariants, RunOutcome};
use densemap::reals::{rational_between, RealError};
use densemap::trace::{replay_check, RunConfig, TraceFile};
use densemap::{EnumIndex, Rational, Real, RunCause, SelectionPolicy};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    BudgetExhausted = 4,
    CheckFailed = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmPolicy {
    Enum = 0,
    Simplest = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmCause {
    BudgetExhausted = 0,
    SourceStreamEnded = 1,
    RationalsExhausted = 2,
    SearchBudgetError = 3,
    RejectedInput = 4,
}

/// An exact rational number.
pub struct DmRational(Rational);

/// A completed greedy run with its configuration.
pub struct DmGreedyRun {
    config: RunConfig,
    outcome: RunOutcome,
    trace: TraceFile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(DmStatus, String);

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::ScanBudget { .. } | SearchError::DepthBudget { .. } => {
                Failure(DmStatus::BudgetExhausted, e.to_string())
            }
            SearchError::Refinement(inner) => inner.into(),
            other => Failure(DmStatus::InvalidInput, other.to_string()),
        }
    }
}

impl From<RealError> for Failure {
    fn from(e: RealError) -> Self {
        let status = match e {
            RealError::RefinementBudget { .. } => DmStatus::BudgetExhausted,
            _ => DmStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(e: impl ToString) -> Failure {
    Failure(DmStatus::InvalidInput, e.to_string())
}

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            DmStatus::Panic
        }
    }
}

unsafe fn text_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(DmStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DmStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(DmStatus::NullArgument, format!("{name} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(DmStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(invalid)?;
    put(out, c.into_raw())
}

unsafe fn put_boxed<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(DmStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `"n"`, `"n/d"` or a finite decimal.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_rational_parse(text: *const c_char, out: *mut *mut DmRational) -> DmStatus {
    guard(|| {
        let q: Rational = text_arg(text, "text")?.parse().map_err(invalid)?;
        put_boxed(out, DmRational(q))
    })
}

/// Canonical `"n/d"` text.
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_rational_to_string(q: *const DmRational, out: *mut *mut c_char) -> DmStatus {
    guard(|| put_string(out, ref_arg(q, "q")?.0.to_string()))
}

/// Writes -1, 0 or 1 as `a` is less than, equal to or greater than `b`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_rational_compare(a: *const DmRational, b: *const DmRational, out: *mut i32) -> DmStatus {
    guard(|| {
        let ord = ref_arg(a, "a")?.0.cmp(&ref_arg(b, "b")?.0);
        put(out, ord as i32)
    })
}

/// # Safety
/// `q` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn dm_rational_free(q: *mut DmRational) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// The enumeration term at `index` (0-based, decimal text).
///
/// # Safety
/// `index` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_nth_rational(index: *const c_char, out: *mut *mut DmRational) -> DmStatus {
    guard(|| {
        let n: EnumIndex = text_arg(index, "index")?.parse().map_err(invalid)?;
        put_boxed(out, DmRational(nth_rational(&n)))
    })
}

/// The enumeration index of a positive rational, as decimal text.
///
/// # Safety
/// `q` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_index_of(q: *const DmRational, out: *mut *mut c_char) -> DmStatus {
    guard(|| {
        let index = index_of(&ref_arg(q, "q")?.0)?;
        put_string(out, index.to_string())
    })
}

/// A rational strictly between two distinct reals given as text, such as
/// `"3/4"` or `"1-1/2*sqrt(3)"`.
///
/// # Safety
/// `a` and `b` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_rational_between(
    a: *const c_char,
    b: *const c_char,
    refine_budget: u32,
    out: *mut *mut DmRational,
) -> DmStatus {
    guard(|| {
        let a: Real = text_arg(a, "a")?.parse().map_err(invalid)?;
        let b: Real = text_arg(b, "b")?.parse().map_err(invalid)?;
        put_boxed(out, DmRational(rational_between(&a, &b, refine_budget)?))
    })
}

/// Runs the greedy pairing on the seeded surd stream with default budgets.
/// A run that stops early still yields a handle; inspect its cause.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run(seed: u64, steps: u64, policy: DmPolicy, out: *mut *mut DmGreedyRun) -> DmStatus {
    guard(|| {
        let policy = match policy {
            DmPolicy::Enum => SelectionPolicy::EnumerationOrder,
            DmPolicy::Simplest => SelectionPolicy::SimplestDenominator,
        };
        let config = RunConfig::new(seed, steps, policy);
        let (outcome, trace) = config.execute().map_err(invalid)?;
        put_boxed(out, DmGreedyRun { config, outcome, trace })
    })
}

/// Number of pairs formed by the run.
///
/// # Safety
/// `run` must be a live handle or NULL (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run_len(run: *const DmGreedyRun) -> usize {
    run.as_ref().map_or(0, |r| r.outcome.records.len())
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run_cause(run: *const DmGreedyRun, out: *mut DmCause) -> DmStatus {
    guard(|| {
        let cause = match ref_arg(run, "run")?.outcome.cause {
            RunCause::BudgetExhausted => DmCause::BudgetExhausted,
            RunCause::SourceStreamEnded => DmCause::SourceStreamEnded,
            RunCause::RationalsExhausted => DmCause::RationalsExhausted,
            RunCause::SearchBudgetError(_) => DmCause::SearchBudgetError,
            RunCause::RejectedInput(_) => DmCause::RejectedInput,
        };
        put(out, cause)
    })
}

/// The trace line of pair `i` (0-based) as a JSON object.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run_record_json(run: *const DmGreedyRun, i: usize, out: *mut *mut c_char) -> DmStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let line = run
            .trace
            .steps
            .get(i)
            .ok_or_else(|| Failure(DmStatus::OutOfRange, format!("record {i} of {}", run.trace.steps.len())))?;
        put_string(out, line.to_json())
    })
}

/// The full JSON-lines trace of the run.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run_trace(run: *const DmGreedyRun, out: *mut *mut c_char) -> DmStatus {
    guard(|| put_string(out, ref_arg(run, "run")?.trace.to_jsonl()))
}

/// Checks the run's invariants. Returns `CheckFailed` with the report in
/// [`dm_last_error`] when any invariant fails.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run_check(run: *const DmGreedyRun) -> DmStatus {
    guard(|| {
        let run = ref_arg(run, "run")?;
        let report = check_invariants(&run.outcome);
        if report.passed() {
            Ok(())
        } else {
            Err(Failure(DmStatus::CheckFailed, report.to_string()))
        }
    })
}

/// The seed the run was configured with.
///
/// # Safety
/// `run` must be a live handle or NULL (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run_seed(run: *const DmGreedyRun) -> u64 {
    run.as_ref().map_or(0, |r| r.config.seed)
}

/// # Safety
/// `run` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn dm_greedy_run_free(run: *mut DmGreedyRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Replays a JSON-lines trace. The report is written to `report` (which may
/// be NULL) whenever the trace parses; the status is `CheckFailed` when
/// verification fails.
///
/// # Safety
/// `jsonl` must be NUL-terminated; `report`, if not NULL, must be writable.
#[no_mangle]
pub unsafe extern "C" fn dm_trace_check(jsonl: *const c_char, report: *mut *mut c_char) -> DmStatus {
    guard(|| {
        let trace = TraceFile::parse(text_arg(jsonl, "jsonl")?).map_err(invalid)?;
        let result = replay_check(&trace);
        if !report.is_null() {
            put_string(report, result.to_string())?;
        }
        if result.passed() {
            Ok(())
        } else {
            Err(Failure(DmStatus::CheckFailed, result.to_string()))
        }
    })
}
