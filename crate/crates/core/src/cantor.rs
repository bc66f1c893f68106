//! Assigning points of a dense sequence to a family of disjoint intervals so
//! that the points sit in the same left/right relation as the intervals.
//!
//! Interval `v` receives the earliest point whose position relative to the
//! points already chosen matches the position of interval `v` relative to the
//! intervals before it. Indices are 0-based throughout.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{
    first_in_interval, nth_rational, EnumIndex, SearchBudget, SearchError, SelectionPolicy,
    UpperBound,
};
use crate::rational::Rational;
use crate::reals::RationalInterval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CantorError {
    #[error("interval {index} ({interval:?}) is not strictly inside (0, 1)")]
    OutsideUnit { index: usize, interval: RationalInterval },
    #[error("intervals {first} and {second} overlap or touch")]
    Overlap { first: usize, second: usize },
    #[error("interval index {index} out of range for a family of {len}")]
    NoSuchInterval { index: usize, len: usize },
    #[error("candidate {0} coincides with a chosen point")]
    Coincides(Rational),
    #[error("point {index} ({point}) is not strictly inside (0, 1)")]
    PointOutsideUnit { index: usize, point: Rational },
    #[error("point {index} repeats an earlier point {point}")]
    RepeatedPoint { index: usize, point: Rational },
    #[error("family has {have} intervals, {need} requested")]
    TooFewIntervals { have: usize, need: usize },
    #[error("no point for interval {v} among the first {scanned} points")]
    ScanBudget { v: usize, scanned: u64 },
    #[error("search for interval {v}: {source}")]
    Search { v: usize, source: SearchError },
}

/// Pairwise disjoint intervals inside `(0, 1)`, in any presentation order.
///
/// Closed hulls must be disjoint, so touching endpoints are rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RationalInterval>", into = "Vec<RationalInterval>")]
pub struct DisjointIntervalFamily {
    intervals: Vec<RationalInterval>,
}

impl DisjointIntervalFamily {
    pub fn new(intervals: Vec<RationalInterval>) -> Result<Self, CantorError> {
        let zero = Rational::zero();
        let one = Rational::one();
        for (index, iv) in intervals.iter().enumerate() {
            if iv.lo() <= &zero || iv.hi() >= &one {
                return Err(CantorError::OutsideUnit { index, interval: iv.clone() });
            }
        }
        let mut order: Vec<usize> = (0..intervals.len()).collect();
        order.sort_by(|&a, &b| intervals[a].lo().cmp(intervals[b].lo()));
        for w in order.windows(2) {
            if intervals[w[0]].hi() >= intervals[w[1]].lo() {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(CantorError::Overlap { first, second });
            }
        }
        Ok(DisjointIntervalFamily { intervals })
    }

    pub fn intervals(&self) -> &[RationalInterval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn signature(&self, v: usize) -> Result<Vec<Side>, CantorError> {
        interval_signature(v, &self.intervals)
    }
}

impl TryFrom<Vec<RationalInterval>> for DisjointIntervalFamily {
    type Error = CantorError;

    fn try_from(intervals: Vec<RationalInterval>) -> Result<Self, Self::Error> {
        DisjointIntervalFamily::new(intervals)
    }
}

impl From<DisjointIntervalFamily> for Vec<RationalInterval> {
    fn from(family: DisjointIntervalFamily) -> Self {
        family.intervals
    }
}

/// Side of `candidate` relative to each chosen point.
pub fn position_signature(candidate: &Rational, chosen: &[Rational]) -> Result<Vec<Side>, CantorError> {
    chosen
        .iter()
        .map(|p| match candidate.cmp(p) {
            Ordering::Less => Ok(Side::Left),
            Ordering::Greater => Ok(Side::Right),
            Ordering::Equal => Err(CantorError::Coincides(candidate.clone())),
        })
        .collect()
}

/// Side of interval `v` relative to each interval before it.
pub fn interval_signature(v: usize, intervals: &[RationalInterval]) -> Result<Vec<Side>, CantorError> {
    let target = intervals.get(v).ok_or(CantorError::NoSuchInterval {
        index: v,
        len: intervals.len(),
    })?;
    intervals[..v]
        .iter()
        .enumerate()
        .map(|(mu, other)| {
            if target.hi() <= other.lo() {
                Ok(Side::Left)
            } else if target.lo() >= other.hi() {
                Ok(Side::Right)
            } else {
                Err(CantorError::Overlap { first: mu, second: v })
            }
        })
        .collect()
}

/// An indexed sequence of distinct rationals in `(0, 1)`, meant to be dense.
///
/// Density of an explicit list cannot be checked; a finite list ends the
/// search with [`CantorError::ScanBudget`] once it runs out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointSequence {
    /// The enumeration of the positive rationals mapped by `q ↦ q/(q+1)`.
    CalkinWilf,
    Explicit(Vec<Rational>),
}

impl PointSequence {
    pub fn explicit(points: Vec<Rational>) -> Result<Self, CantorError> {
        let mut seen = HashSet::new();
        for (index, p) in points.iter().enumerate() {
            if !p.is_positive() || p >= &Rational::one() {
                return Err(CantorError::PointOutsideUnit { index, point: p.clone() });
            }
            if !seen.insert(p.clone()) {
                return Err(CantorError::RepeatedPoint { index, point: p.clone() });
            }
        }
        Ok(PointSequence::Explicit(points))
    }

    /// The point at `index`, or `None` past the end of an explicit list.
    pub fn point(&self, index: &EnumIndex) -> Option<Rational> {
        match self {
            PointSequence::CalkinWilf => Some(to_unit(&nth_rational(index))),
            PointSequence::Explicit(points) => {
                let i = usize::try_from(index.to_u64()?).ok()?;
                points.get(i).cloned()
            }
        }
    }
}

/// `q/(q+1)`, an order-preserving bijection from `(0, ∞)` onto `(0, 1)`.
pub fn to_unit(q: &Rational) -> Rational {
    let a = q.numer().magnitude().clone();
    let b = q.denom().magnitude().clone();
    Rational::from_naturals(a.clone(), a + b)
}

/// `x/(1-x)`, the inverse of [`to_unit`].
pub fn from_unit(x: &Rational) -> Rational {
    let a = x.numer().magnitude().clone();
    let b = x.denom().magnitude().clone();
    Rational::from_naturals(a.clone(), b - a)
}

/// Chosen indices `kappa[v]` and their points, aligned with the intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CantorAssignment {
    pub kappa: Vec<EnumIndex>,
    pub points: Vec<Rational>,
}

impl CantorAssignment {
    /// Verifies distinctness and that points and intervals are ordered alike,
    /// over all pairs. Returns the first offending pair.
    pub fn check_order(&self, family: &DisjointIntervalFamily) -> Result<(), (usize, usize)> {
        let intervals = family.intervals();
        let n = self.points.len();
        for v in 0..n {
            for mu in v + 1..n {
                let points_left = self.points[v] < self.points[mu];
                let intervals_left = intervals[v].is_left_of(&intervals[mu]);
                if self.kappa[v] == self.kappa[mu] || points_left != intervals_left {
                    return Err((v, mu));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for CantorAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, (k, p)) in self.kappa.iter().zip(&self.points).enumerate() {
            writeln!(f, "{v}\t{k}\t{p}")?;
        }
        Ok(())
    }
}

/// The open gap `(lo, hi)` that a point for interval `v` must occupy, given
/// the points chosen for the intervals before it.
pub fn required_gap(v: usize, family: &DisjointIntervalFamily, chosen: &[Rational]) -> Result<(Rational, Rational), CantorError> {
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    for (side, p) in family.signature(v)?.into_iter().zip(chosen) {
        match side {
            Side::Right if *p > lo => lo = p.clone(),
            Side::Left if *p < hi => hi = p.clone(),
            _ => {}
        }
    }
    Ok((lo, hi))
}

/// Assigns points to the first `n` intervals of `family`.
///
/// For the Calkin–Wilf points the least matching index comes from the
/// interval search on the preimage of the gap; explicit lists are scanned
/// from the start.
pub fn cantor_assign(
    family: &DisjointIntervalFamily,
    points: &PointSequence,
    n: usize,
    budget: &SearchBudget,
) -> Result<CantorAssignment, CantorError> {
    if family.len() < n {
        return Err(CantorError::TooFewIntervals { have: family.len(), need: n });
    }
    let mut kappa = Vec::with_capacity(n);
    let mut chosen = Vec::with_capacity(n);
    for v in 0..n {
        let (lo, hi) = required_gap(v, family, &chosen)?;
        let (index, point) = match points {
            PointSequence::CalkinWilf => {
                let upper = if hi == Rational::one() {
                    UpperBound::Unbounded
                } else {
                    UpperBound::from(from_unit(&hi))
                };
                let (q, index) = first_in_interval(&from_unit(&lo), &upper, SelectionPolicy::EnumerationOrder, budget)
                    .map_err(|source| CantorError::Search { v, source })?;
                (index, to_unit(&q))
            }
            PointSequence::Explicit(list) => {
                let found = list.iter().enumerate().find(|(_, p)| **p > lo && **p < hi);
                match found {
                    Some((i, p)) => (EnumIndex::from(i as u64), p.clone()),
                    None => {
                        return Err(CantorError::ScanBudget { v, scanned: list.len() as u64 });
                    }
                }
            }
        };
        kappa.push(index);
        chosen.push(point);
    }
    Ok(CantorAssignment { kappa, points: chosen })
}
