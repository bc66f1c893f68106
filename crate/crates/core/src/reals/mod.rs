//! Computable reals as nested rational enclosures.
//!
//! A [`ComputableReal`] is either a [`QuadraticSurd`], whose order against any
//! rational is decided exactly by algebra, or a user-supplied refiner that
//! emits nested [`RationalInterval`]s of vanishing width. Every refinement loop
//! is bounded by an explicit step budget and reports a breach as an error.

mod stream;
mod surd;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::rational::{Rational, RationalError};

pub use stream::{IrrationalStream, SurdStreamParams, SURD_GENERATOR};
pub use surd::QuadraticSurd;

/// Bisection-equivalent steps granted to each comparison by default.
pub const DEFAULT_REFINE_BUDGET: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("surd coefficient of the radical is zero")]
    ZeroSurdCoefficient,
    #[error("radicand {0} has no square-free part above one; the surd would be rational")]
    PerfectSquareRadicand(u64),
    #[error("interval [{lo}, {hi}] is empty or degenerate")]
    EmptyInterval { lo: Rational, hi: Rational },
    #[error("target width must be positive")]
    NonPositiveWidth,
    #[error("refinement budget of {budget} steps exhausted (last enclosure [{last_lo}, {last_hi}])")]
    RefinementBudget {
        budget: u32,
        last_lo: Rational,
        last_hi: Rational,
    },
    #[error("refiner broke nesting at step {step}")]
    NotNested { step: u32 },
    #[error("arguments are equal and cannot be separated by a rational")]
    NotSeparated,
    #[error("arguments are in the wrong order")]
    WrongOrder,
    #[error("cannot parse {0:?} as a real")]
    Parse(String),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// A closed rational interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    lo: Rational,
    hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, RealError> {
        if lo.compare(&hi) != Ordering::Less {
            return Err(RealError::EmptyInterval { lo, hi });
        }
        Ok(RationalInterval { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lo.compare(q).is_le() && q.compare(&self.hi).is_le()
    }

    pub fn is_within(&self, outer: &RationalInterval) -> bool {
        outer.lo.compare(&self.lo).is_le() && self.hi.compare(&outer.hi).is_le()
    }

    /// Strictly left of `other`, closed hulls disjoint.
    pub fn is_left_of(&self, other: &RationalInterval) -> bool {
        self.hi.compare(&other.lo) == Ordering::Less
    }
}

impl fmt::Debug for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl serde::Serialize for RationalInterval {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.lo, &self.hi).serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for RationalInterval {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (lo, hi) = <(Rational, Rational)>::deserialize(deserializer)?;
        RationalInterval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

/// Deterministic refinement function: step `k` must return an enclosure nested
/// inside the one from step `k - 1`, and widths must tend to zero. The closure
/// must be free of side effects.
pub type RefineFn = dyn Fn(u32) -> RationalInterval + Send + Sync;

#[derive(Clone)]
enum Repr {
    Surd(QuadraticSurd),
    Generic { label: Arc<str>, refiner: Arc<RefineFn> },
}

/// An irrational number presented by nested rational enclosures.
#[derive(Clone)]
pub struct ComputableReal {
    repr: Repr,
}

impl ComputableReal {
    pub fn surd(s: QuadraticSurd) -> Self {
        ComputableReal { repr: Repr::Surd(s) }
    }

    /// Wraps a user refiner. `label` is used for display only.
    pub fn generic(
        label: impl Into<Arc<str>>,
        refiner: impl Fn(u32) -> RationalInterval + Send + Sync + 'static,
    ) -> Self {
        ComputableReal {
            repr: Repr::Generic {
                label: label.into(),
                refiner: Arc::new(refiner),
            },
        }
    }

    /// Hides the algebraic structure of a surd behind a plain refiner, so it
    /// is handled exactly like any user-supplied real.
    pub fn surd_as_generic(s: &QuadraticSurd) -> Self {
        let inner = s.clone();
        ComputableReal::generic(format!("refined {s}"), move |step| inner.enclosure(step))
    }

    pub fn as_surd(&self) -> Option<&QuadraticSurd> {
        match &self.repr {
            Repr::Surd(s) => Some(s),
            Repr::Generic { .. } => None,
        }
    }

    /// Raw enclosure at `step`, without nesting validation.
    pub fn enclosure(&self, step: u32) -> RationalInterval {
        match &self.repr {
            Repr::Surd(s) => s.enclosure(step),
            Repr::Generic { refiner, .. } => refiner(step),
        }
    }

    /// Exact identity where it is decidable: surds by value, generic reals by
    /// sharing the same refiner. `None` means undecided.
    pub fn same_value(&self, other: &ComputableReal) -> Option<bool> {
        match (&self.repr, &other.repr) {
            (Repr::Surd(a), Repr::Surd(b)) => Some(a == b),
            (Repr::Generic { refiner: a, .. }, Repr::Generic { refiner: b, .. }) => {
                Arc::ptr_eq(a, b).then_some(true)
            }
            _ => None,
        }
    }

    /// An enclosure of width strictly below `width`.
    ///
    /// Surds always succeed. Generic refiners are walked step by step from
    /// zero, validating nesting, for at most `budget` steps.
    pub fn refine_to(&self, width: &Rational, budget: u32) -> Result<RationalInterval, RealError> {
        if !width.is_positive() {
            return Err(RealError::NonPositiveWidth);
        }
        if let Repr::Surd(s) = &self.repr {
            return Ok(s.enclosure(s.step_for_width(width)));
        }
        let mut walk = Refinement::new(self);
        loop {
            let enc = walk.next_enclosure()?;
            if enc.width().compare(width) == Ordering::Less {
                return Ok(enc);
            }
            if walk.step > budget {
                return Err(budget_error(budget, &enc));
            }
        }
    }

    /// Order of `self` relative to `q`. Never `Equal`, since the value is
    /// irrational.
    pub fn compare_to_rational(&self, q: &Rational, budget: u32) -> Result<Ordering, RealError> {
        match &self.repr {
            Repr::Surd(s) => Ok(s.compare_rational(q)),
            Repr::Generic { .. } => self.compare_by_refinement(q, budget),
        }
    }

    /// Decides the order against `q` purely from enclosures, refining until `q`
    /// falls outside one of them.
    pub fn compare_by_refinement(&self, q: &Rational, budget: u32) -> Result<Ordering, RealError> {
        let enc = self.separating_enclosure(q, budget)?;
        Ok(if q.compare(enc.lo()).is_lt() {
            Ordering::Greater
        } else {
            Ordering::Less
        })
    }

    /// The first enclosure, in refinement order, that excludes `q`. It
    /// certifies the order of `self` against `q` with rational comparisons
    /// alone.
    pub fn separating_enclosure(&self, q: &Rational, budget: u32) -> Result<RationalInterval, RealError> {
        let mut walk = Refinement::new(self);
        loop {
            let enc = walk.next_enclosure()?;
            if !enc.contains(q) {
                return Ok(enc);
            }
            if walk.step > budget {
                return Err(budget_error(budget, &enc));
            }
        }
    }
}

fn budget_error(budget: u32, last: &RationalInterval) -> RealError {
    RealError::RefinementBudget {
        budget,
        last_lo: last.lo().clone(),
        last_hi: last.hi().clone(),
    }
}

/// Step-by-step walk over a real's enclosures that checks nesting.
struct Refinement<'a> {
    x: &'a ComputableReal,
    step: u32,
    prev: Option<RationalInterval>,
}

impl<'a> Refinement<'a> {
    fn new(x: &'a ComputableReal) -> Self {
        Refinement { x, step: 0, prev: None }
    }

    fn next_enclosure(&mut self) -> Result<RationalInterval, RealError> {
        let enc = self.x.enclosure(self.step);
        if let Some(prev) = &self.prev {
            if !enc.is_within(prev) {
                return Err(RealError::NotNested { step: self.step });
            }
        }
        self.step += 1;
        self.prev = Some(enc.clone());
        Ok(enc)
    }
}

impl fmt::Display for ComputableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Surd(s) => fmt::Display::fmt(s, f),
            Repr::Generic { label, .. } => f.write_str(label),
        }
    }
}

impl fmt::Debug for ComputableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Surd(s) => write!(f, "Surd({s})"),
            Repr::Generic { label, .. } => write!(f, "Generic({label})"),
        }
    }
}

impl From<QuadraticSurd> for ComputableReal {
    fn from(s: QuadraticSurd) -> Self {
        ComputableReal::surd(s)
    }
}

/// Either an exact rational or a computable irrational.
#[derive(Clone, Debug)]
pub enum Real {
    Rational(Rational),
    Computable(ComputableReal),
}

impl Real {
    /// Closed enclosure `[lo, hi]`; degenerate for rationals.
    fn closed_enclosure(&self, step: u32) -> (Rational, Rational) {
        match self {
            Real::Rational(q) => (q.clone(), q.clone()),
            Real::Computable(x) => {
                let enc = x.enclosure(step);
                (enc.lo, enc.hi)
            }
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(q) => fmt::Display::fmt(q, f),
            Real::Computable(x) => fmt::Display::fmt(x, f),
        }
    }
}

impl FromStr for Real {
    type Err = RealError;

    /// Surd text when it mentions `sqrt`, a rational literal otherwise.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains("sqrt") {
            Ok(Real::Computable(ComputableReal::surd(s.parse()?)))
        } else {
            Ok(Real::Rational(s.parse()?))
        }
    }
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Self {
        Real::Rational(q)
    }
}

impl From<ComputableReal> for Real {
    fn from(x: ComputableReal) -> Self {
        Real::Computable(x)
    }
}

impl From<QuadraticSurd> for Real {
    fn from(s: QuadraticSurd) -> Self {
        Real::Computable(ComputableReal::surd(s))
    }
}

/// Orders two reals. Exact whenever a rational or surd identity decides it;
/// otherwise enclosures are refined until they separate.
pub fn compare_reals(a: &Real, b: &Real, budget: u32) -> Result<Ordering, RealError> {
    match (a, b) {
        (Real::Rational(x), Real::Rational(y)) => Ok(x.compare(y)),
        (Real::Computable(x), Real::Rational(q)) => x.compare_to_rational(q, budget),
        (Real::Rational(q), Real::Computable(x)) => {
            Ok(x.compare_to_rational(q, budget)?.reverse())
        }
        (Real::Computable(x), Real::Computable(y)) => {
            if x.same_value(y) == Some(true) {
                return Ok(Ordering::Equal);
            }
            separate(a, b, budget).map(|(ord, _, _)| ord)
        }
    }
}

/// Refines both until their enclosures are disjoint; returns the order and the
/// gap `(left.hi, right.lo)` between them.
fn separate(a: &Real, b: &Real, budget: u32) -> Result<(Ordering, Rational, Rational), RealError> {
    let mut walks = (
        match a {
            Real::Computable(x) => Some(Refinement::new(x)),
            Real::Rational(_) => None,
        },
        match b {
            Real::Computable(x) => Some(Refinement::new(x)),
            Real::Rational(_) => None,
        },
    );
    for step in 0..=budget {
        let (a_lo, a_hi) = match walks.0.as_mut() {
            Some(w) => {
                let enc = w.next_enclosure()?;
                (enc.lo, enc.hi)
            }
            None => a.closed_enclosure(step),
        };
        let (b_lo, b_hi) = match walks.1.as_mut() {
            Some(w) => {
                let enc = w.next_enclosure()?;
                (enc.lo, enc.hi)
            }
            None => b.closed_enclosure(step),
        };
        if a_hi.compare(&b_lo) == Ordering::Less {
            return Ok((Ordering::Less, a_hi, b_lo));
        }
        if b_hi.compare(&a_lo) == Ordering::Less {
            return Ok((Ordering::Greater, b_hi, a_lo));
        }
        if step == budget {
            return Err(RealError::RefinementBudget {
                budget,
                last_lo: a_lo.min(b_lo),
                last_hi: a_hi.max(b_hi),
            });
        }
    }
    unreachable!("loop returns on the final step")
}

/// A rational strictly between `a < b`.
///
/// Two rationals give their midpoint. Otherwise both sides are refined until
/// their enclosures are disjoint and the mediant of the gap endpoints is
/// returned. Equal arguments and reversed arguments are refused.
pub fn rational_between(a: &Real, b: &Real, budget: u32) -> Result<Rational, RealError> {
    let order = match (a, b) {
        (Real::Computable(_), Real::Computable(_)) => None,
        _ => Some(compare_reals(a, b, budget)?),
    };
    match order {
        Some(Ordering::Equal) => return Err(RealError::NotSeparated),
        Some(Ordering::Greater) => return Err(RealError::WrongOrder),
        _ => {}
    }
    if let (Real::Rational(x), Real::Rational(y)) = (a, b) {
        return Ok(x.midpoint(y));
    }
    if let (Real::Computable(x), Real::Computable(y)) = (a, b) {
        if x.same_value(y) == Some(true) {
            return Err(RealError::NotSeparated);
        }
    }
    match separate(a, b, budget)? {
        (Ordering::Less, gap_lo, gap_hi) => Ok(gap_lo.mediant(&gap_hi)),
        _ => Err(RealError::WrongOrder),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn root2() -> ComputableReal {
        QuadraticSurd::sqrt(2).unwrap().into()
    }

    #[test]
    fn refine_to_meets_width() {
        let x = root2();
        let enc = x.refine_to(&r("1/100"), DEFAULT_REFINE_BUDGET).unwrap();
        assert!(enc.width().compare(&r("1/100")).is_lt());
        assert!((enc.lo() * enc.lo()).compare(&r("2")).is_lt());
        assert!((enc.hi() * enc.hi()).compare(&r("2")).is_gt());
        let coarse = x.refine_to(&r("1"), DEFAULT_REFINE_BUDGET).unwrap();
        assert!(coarse.is_within(&RationalInterval::new(r("1"), r("2")).unwrap()));
        assert_eq!(x.refine_to(&r("0"), 10), Err(RealError::NonPositiveWidth));
    }

    #[test]
    fn generic_refiner_contract_is_checked() {
        let wobbly = ComputableReal::generic("wobbly", |step| {
            let shift = Rational::frac(step as i64 % 2, 10);
            RationalInterval::new(&r("1") + &shift, &r("2") + &shift).unwrap()
        });
        assert_eq!(
            wobbly.compare_by_refinement(&r("3/2"), 10),
            Err(RealError::NotNested { step: 1 })
        );
        let stuck = ComputableReal::generic("stuck", |_| {
            RationalInterval::new(r("1"), r("2")).unwrap()
        });
        assert!(matches!(
            stuck.compare_to_rational(&r("3/2"), 8),
            Err(RealError::RefinementBudget { budget: 8, .. })
        ));
        assert!(matches!(
            stuck.refine_to(&r("1/2"), 8),
            Err(RealError::RefinementBudget { .. })
        ));
    }

    #[test]
    fn compare_to_rational_both_routes() {
        let x = root2();
        let hidden = ComputableReal::surd_as_generic(x.as_surd().unwrap());
        for (q, expected) in [("3/2", Ordering::Less), ("7/5", Ordering::Greater)] {
            assert_eq!(x.compare_to_rational(&r(q), 256).unwrap(), expected);
            assert_eq!(hidden.compare_to_rational(&r(q), 256).unwrap(), expected);
        }
    }

    #[test]
    fn between_examples() {
        let zero = Real::Rational(Rational::zero());
        let sqrt2 = Real::Computable(root2());
        assert_eq!(rational_between(&zero, &sqrt2, 256).unwrap(), r("1/2"));
        assert_eq!(
            rational_between(&Real::Rational(r("1/2")), &Real::Rational(r("2/3")), 256).unwrap(),
            r("7/12")
        );
        assert_eq!(
            rational_between(&sqrt2, &sqrt2, 256),
            Err(RealError::NotSeparated)
        );
        assert_eq!(
            rational_between(&sqrt2, &zero, 256),
            Err(RealError::WrongOrder)
        );
        let three = Real::Computable(QuadraticSurd::sqrt(3).unwrap().into());
        assert_eq!(rational_between(&three, &sqrt2, 256), Err(RealError::WrongOrder));
        let q = rational_between(&sqrt2, &three, 256).unwrap();
        assert!(root2().compare_to_rational(&q, 256).unwrap().is_lt());
    }

    #[test]
    fn between_rationals_refuses_equal_and_reversed() {
        let a = Real::Rational(r("2/3"));
        assert_eq!(rational_between(&a, &a, 256), Err(RealError::NotSeparated));
        assert_eq!(
            rational_between(&a, &Real::Rational(r("1/3")), 256),
            Err(RealError::WrongOrder)
        );
    }

    #[test]
    fn parses_reals() {
        assert!(matches!("3/4".parse::<Real>().unwrap(), Real::Rational(_)));
        let x: Real = "1+sqrt(2)".parse().unwrap();
        assert_eq!(x.to_string(), "1/1+1/1*sqrt(2)");
        assert!("1+sqrt(9)".parse::<Real>().is_err());
    }

    #[test]
    fn interval_json_form() {
        let iv = RationalInterval::new(r("1/10"), r("1/5")).unwrap();
        let text = serde_json::to_string(&iv).unwrap();
        assert_eq!(text, r#"["1/10","1/5"]"#);
        let back: RationalInterval = serde_json::from_str(&text).unwrap();
        assert_eq!(back, iv);
        assert!(serde_json::from_str::<RationalInterval>(r#"["1/2","1/2"]"#).is_err());
    }
}
