//! A fixed bijection between the natural numbers and the positive rationals.
//!
//! Index `n` names the `n`-th term of the Calkin–Wilf sequence: the bits of
//! `n + 1` after the leading one spell a path from the root `1/1`, where `0`
//! steps to the left child `a/(a+b)` and `1` to the right child `(a+b)/b`.
//!
//! Every level of the Calkin–Wilf tree holds the same set of rationals as the
//! matching level of the Stern–Brocot tree, and an open interval contains a
//! unique shallowest Stern–Brocot node. The first enumerated rational inside an
//! interval is therefore that node, which [`first_in_interval`] finds by a
//! mediant descent instead of scanning exponentially many indices.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;
use crate::reals::{ComputableReal, Real, RealError, DEFAULT_REFINE_BUDGET};

/// Indices scanned literally before the enumeration-order search jumps.
pub const DEFAULT_SCAN_WINDOW: u64 = 256;
/// Deepest tree level the descent may reach; indices stay below `2^(depth+1)`.
pub const DEFAULT_MAX_DEPTH: u64 = 1 << 16;
/// Largest index width, in bits, that [`index_of`] will materialize.
const MAX_INDEX_BITS: u64 = 1 << 32;

/// Zero-based position in the Calkin–Wilf enumeration.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnumIndex(BigUint);

impl EnumIndex {
    pub fn new(n: BigUint) -> Self {
        EnumIndex(n)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Tree level of the indexed rational; the root is level 0.
    pub fn depth(&self) -> u64 {
        (&self.0 + 1u32).bits() - 1
    }
}

impl From<u64> for EnumIndex {
    fn from(n: u64) -> Self {
        EnumIndex(BigUint::from(n))
    }
}

impl fmt::Display for EnumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for EnumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl FromStr for EnumIndex {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(SearchError::BadIndex(s.to_string()));
        }
        s.parse()
            .map(EnumIndex)
            .map_err(|_| SearchError::BadIndex(s.to_string()))
    }
}

impl Serialize for EnumIndex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for EnumIndex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which rational "the first one" inside an interval means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SelectionPolicy {
    /// Least Calkin–Wilf index.
    #[default]
    #[serde(rename = "enum")]
    EnumerationOrder,
    /// Least denominator, then least numerator.
    #[serde(rename = "simplest")]
    SimplestDenominator,
}

impl FromStr for SelectionPolicy {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "enum" => Ok(SelectionPolicy::EnumerationOrder),
            "simplest" => Ok(SelectionPolicy::SimplestDenominator),
            other => Err(SearchError::BadPolicy(other.to_string())),
        }
    }
}

impl fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionPolicy::EnumerationOrder => "enum",
            SelectionPolicy::SimplestDenominator => "simplest",
        })
    }
}

/// Limits for one interval search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Indices tested one by one under [`SelectionPolicy::EnumerationOrder`]
    /// before jumping to the shallowest level that meets the interval.
    pub scan_window: u64,
    /// Deepest tree level the descent may visit.
    pub max_depth: u64,
    /// Refinement steps per comparison against a computable bound.
    pub refine_steps: u32,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            scan_window: DEFAULT_SCAN_WINDOW,
            max_depth: DEFAULT_MAX_DEPTH,
            refine_steps: DEFAULT_REFINE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{0} is not a positive rational")]
    NotPositive(Rational),
    #[error("interval ({lo}, {hi}) contains no positive rational")]
    EmptyInterval { lo: Rational, hi: String },
    #[error("scanned {scanned} indices without finding a rational inside the interval")]
    ScanBudget { scanned: u64 },
    #[error("descent reached depth {depth} (limit {max_depth}) between {left} and {right}")]
    DepthBudget {
        depth: u64,
        max_depth: u64,
        left: String,
        right: String,
    },
    #[error("index of {0} would exceed {MAX_INDEX_BITS} bits")]
    IndexTooLarge(Rational),
    #[error("cannot parse {0:?} as an index")]
    BadIndex(String),
    #[error("unknown selection policy {0:?}")]
    BadPolicy(String),
    #[error(transparent)]
    Refinement(#[from] RealError),
}

/// Open upper end of a search interval.
#[derive(Clone, Debug)]
pub enum UpperBound {
    Finite(Real),
    Unbounded,
}

impl UpperBound {
    /// Whether `candidate` is at or above the bound.
    fn reaches(&self, candidate: &Rational, refine_steps: u32) -> Result<bool, RealError> {
        match self {
            UpperBound::Unbounded => Ok(false),
            UpperBound::Finite(Real::Rational(hi)) => Ok(candidate.compare(hi).is_ge()),
            UpperBound::Finite(Real::Computable(x)) => {
                Ok(x.compare_to_rational(candidate, refine_steps)?.is_lt())
            }
        }
    }
}

impl fmt::Display for UpperBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpperBound::Finite(x) => fmt::Display::fmt(x, f),
            UpperBound::Unbounded => f.write_str("inf"),
        }
    }
}

impl From<Rational> for UpperBound {
    fn from(q: Rational) -> Self {
        UpperBound::Finite(Real::Rational(q))
    }
}

impl From<ComputableReal> for UpperBound {
    fn from(x: ComputableReal) -> Self {
        UpperBound::Finite(Real::Computable(x))
    }
}

impl From<Real> for UpperBound {
    fn from(x: Real) -> Self {
        UpperBound::Finite(x)
    }
}

/// The `n`-th positive rational in Calkin–Wilf order.
pub fn nth_rational(n: &EnumIndex) -> Rational {
    let path = &n.0 + 1u32;
    if let Some(path) = path.to_u64() {
        let (a, b) = nth_small(path);
        return Rational::from_naturals(a.into(), b.into());
    }
    let mut a = BigUint::one();
    let mut b = BigUint::one();
    for bit in (0..path.bits() - 1).rev() {
        if path.bit(bit) {
            a += &b;
        } else {
            b += &a;
        }
    }
    Rational::from_naturals(a, b)
}

/// Walks the path encoded by `path = n + 1`; fits in words for `n < 2^64 - 1`.
fn nth_small(path: u64) -> (u64, u64) {
    let (mut a, mut b) = (1u64, 1u64);
    for bit in (0..63 - path.leading_zeros()).rev() {
        if path >> bit & 1 == 1 {
            a += b;
        } else {
            b += a;
        }
    }
    (a, b)
}

/// Position of a positive rational in Calkin–Wilf order.
///
/// Climbs from `q` to the root in runs: `a/b` with `a > b` is the right child
/// of `(a-b)/b`, otherwise the left child of `a/(b-a)`. Each run of equal
/// moves is taken in one division, so the cost is linear in the number of
/// continued-fraction terms rather than in the depth.
pub fn index_of(q: &Rational) -> Result<EnumIndex, SearchError> {
    if !q.is_positive() {
        return Err(SearchError::NotPositive(q.clone()));
    }
    let mut a = q.numer().magnitude().clone();
    let mut b = q.denom().magnitude().clone();
    let mut path = BigUint::zero();
    let mut pos: u64 = 0;
    while !(a.is_one() && b.is_one()) {
        let (run, ones) = if a > b {
            let (k, r) = a.div_rem(&b);
            // b divides a only when b = 1; stop one short to land on 1/1.
            let k = if r.is_zero() { k - 1u32 } else { k };
            a -= &k * &b;
            (k, true)
        } else {
            let (k, r) = b.div_rem(&a);
            let k = if r.is_zero() { k - 1u32 } else { k };
            b -= &k * &a;
            (k, false)
        };
        let run = run
            .to_u64()
            .filter(|&k| pos + k < MAX_INDEX_BITS)
            .ok_or_else(|| SearchError::IndexTooLarge(q.clone()))?;
        if ones {
            path |= ((BigUint::one() << run) - 1u32) << pos;
        }
        pos += run;
    }
    path.set_bit(pos, true);
    Ok(EnumIndex(path - 1u32))
}

/// The next term of the Calkin–Wilf sequence: `1 / (2·floor(q) − q + 1)`.
pub fn successor(q: &Rational) -> Rational {
    let floor = Rational::integer(q.floor());
    let two_floor = &floor + &floor;
    let denom = &(&two_floor - q) + &Rational::one();
    denom.recip().expect("denominator is at least 1 for positive q")
}

/// Iterator over `(index, rational)` from a starting index onward.
pub struct CalkinWilf {
    index: BigUint,
    next: Rational,
}

impl CalkinWilf {
    pub fn from_index(start: &EnumIndex) -> Self {
        CalkinWilf {
            index: start.0.clone(),
            next: nth_rational(start),
        }
    }
}

impl Iterator for CalkinWilf {
    type Item = (EnumIndex, Rational);

    fn next(&mut self) -> Option<Self::Item> {
        let following = successor(&self.next);
        let q = std::mem::replace(&mut self.next, following);
        let idx = EnumIndex(self.index.clone());
        self.index += 1u32;
        Some((idx, q))
    }
}

/// Checks `lo < hi` where it is decidable and clamps `lo` to zero.
fn validate_interval(lo: &Rational, hi: &UpperBound, refine_steps: u32) -> Result<Rational, SearchError> {
    let lo = if lo.is_negative() { Rational::zero() } else { lo.clone() };
    if hi.reaches(&lo, refine_steps)? {
        return Err(SearchError::EmptyInterval {
            lo,
            hi: hi.to_string(),
        });
    }
    Ok(lo)
}

/// Literal search: tests indices `0, 1, 2, …` in order and returns the first
/// term strictly inside `(lo, hi)`, giving up after `max_index` indices.
pub fn scan_first_in_interval(
    lo: &Rational,
    hi: &UpperBound,
    max_index: u64,
    refine_steps: u32,
) -> Result<(Rational, EnumIndex), SearchError> {
    let lo = validate_interval(lo, hi, refine_steps)?;
    let lo_words = lo.to_u64_pair();
    let (mut a, mut b) = (1u64, 1u64);
    for index in 0..max_index {
        let above_lo = match lo_words {
            Some((n, d)) => u128::from(a) * u128::from(d) > u128::from(n) * u128::from(b),
            None => Rational::from_naturals(a.into(), b.into()).compare(&lo).is_gt(),
        };
        if above_lo {
            let candidate = Rational::from_naturals(a.into(), b.into());
            if !hi.reaches(&candidate, refine_steps)? {
                return Ok((candidate, EnumIndex::from(index)));
            }
        }
        match successor_small(a, b) {
            Some(next) => (a, b) = next,
            None => break,
        }
    }
    Err(SearchError::ScanBudget { scanned: max_index })
}

fn successor_small(a: u64, b: u64) -> Option<(u64, u64)> {
    let twice_floor_plus_one = (a / b).checked_mul(2)?.checked_add(1)?;
    let denom = twice_floor_plus_one.checked_mul(b)?.checked_sub(a)?;
    Some((b, denom))
}

/// The unique shallowest Stern–Brocot node strictly inside `(lo, hi)`; it has
/// the least denominator and the least numerator of all rationals there.
///
/// Runs of moves in one direction are taken by exponential then binary search
/// on the run length, so each run costs logarithmically many comparisons.
pub fn simplest_in_interval(
    lo: &Rational,
    hi: &UpperBound,
    budget: &SearchBudget,
) -> Result<Rational, SearchError> {
    let lo = validate_interval(lo, hi, budget.refine_steps)?;
    let steps = budget.refine_steps;
    // Brackets as (numerator, denominator); right starts at 1/0 = ∞.
    let mut left = (BigUint::zero(), BigUint::one());
    let mut right = (BigUint::one(), BigUint::zero());
    let mut depth: u64 = 0;

    let at = |base: &(BigUint, BigUint), step: &(BigUint, BigUint), k: u64| {
        let n = &base.0 + &step.0 * k;
        let d = &base.1 + &step.1 * k;
        (n, d)
    };
    let at_or_below_lo = |p: &(BigUint, BigUint)| p.0.clone() * lo.denom().magnitude() <= lo.numer().magnitude() * &p.1;
    let at_or_above_hi = |p: &(BigUint, BigUint)| -> Result<bool, RealError> {
        hi.reaches(&Rational::from_naturals(p.0.clone(), p.1.clone()), steps)
    };

    loop {
        let mediant = at(&left, &right, 1);
        let remaining = budget.max_depth - depth;
        if at_or_below_lo(&mediant) {
            // Move right while the mediant stays at or below lo.
            let k = gallop(remaining, |k| Ok(at_or_below_lo(&at(&left, &right, k))))?;
            if k == remaining {
                return Err(depth_error(depth + k, budget.max_depth, &left, &right));
            }
            left = at(&left, &right, k);
            depth += k;
        } else if at_or_above_hi(&mediant)? {
            let k = gallop(remaining, |k| at_or_above_hi(&at(&right, &left, k)))?;
            if k == remaining {
                return Err(depth_error(depth + k, budget.max_depth, &left, &right));
            }
            right = at(&right, &left, k);
            depth += k;
        } else {
            return Ok(Rational::from_naturals(mediant.0, mediant.1));
        }
    }
}

/// Largest `k` in `1..=cap` with `holds(k)`, given `holds(1)` and that `holds`
/// is monotone (true then false). Returns `cap` when it still holds there.
fn gallop(cap: u64, mut holds: impl FnMut(u64) -> Result<bool, RealError>) -> Result<u64, RealError> {
    if cap <= 1 {
        return Ok(cap);
    }
    let mut good = 1u64;
    let mut bad = loop {
        let probe = good.saturating_mul(2).min(cap);
        if !holds(probe)? {
            break probe;
        }
        if probe == cap {
            return Ok(cap);
        }
        good = probe;
    };
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        if holds(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

fn depth_error(depth: u64, max_depth: u64, left: &(BigUint, BigUint), right: &(BigUint, BigUint)) -> SearchError {
    let show = |p: &(BigUint, BigUint)| format!("{}/{}", p.0, p.1);
    SearchError::DepthBudget {
        depth,
        max_depth,
        left: show(left),
        right: show(right),
    }
}

/// The first rational of `Q_+` strictly inside `(lo, hi)` under `policy`,
/// with its enumeration index.
///
/// Under [`SelectionPolicy::EnumerationOrder`] the first
/// `budget.scan_window` indices are tested literally; past the window the
/// answer is the shallowest node of the interval. Under
/// [`SelectionPolicy::SimplestDenominator`] the descent runs directly. Both
/// policies select the same rational, since the shallowest node is also the
/// one of least denominator.
pub fn first_in_interval(
    lo: &Rational,
    hi: &UpperBound,
    policy: SelectionPolicy,
    budget: &SearchBudget,
) -> Result<(Rational, EnumIndex), SearchError> {
    if policy == SelectionPolicy::EnumerationOrder && budget.scan_window > 0 {
        match scan_first_in_interval(lo, hi, budget.scan_window, budget.refine_steps) {
            Err(SearchError::ScanBudget { .. }) => {}
            found => return found,
        }
    }
    let q = simplest_in_interval(lo, hi, budget)?;
    let index = index_of(&q)?;
    Ok((q, index))
}
