//! Exact-arithmetic tools for order-preserving point assignments and greedy
//! pairings of irrationals with rationals.
//!
//! * [`rational`]: canonical arbitrary-precision fractions.
//! * [`enumeration`]: the Calkin–Wilf bijection `ℕ → Q_+` and first-in-interval search.
//! * [`reals`]: quadratic surds and refiner-backed computable reals.
//! * [`cantor`]: assignment of points of a dense sequence to disjoint intervals.
//! * [`greedy`]: the stepwise irrational-to-rational pairing and its invariant checker.
//! * [`trace`]: run configuration, JSON-lines traces and replay verification.

pub mod cantor;
pub mod enumeration;
pub mod greedy;
pub mod rational;
pub mod reals;
pub mod trace;

pub use enumeration::{EnumIndex, SearchBudget, SelectionPolicy, UpperBound};
pub use greedy::{GreedyState, PairRecord, RunCause, RunOutcome};
pub use rational::Rational;
pub use reals::{ComputableReal, QuadraticSurd, RationalInterval, Real};
