use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, Sign};
use num_traits::One;

use super::{RationalInterval, RealError};
use crate::rational::Rational;

/// The irrational number `p + q·√d`.
///
/// `q` is nonzero and `d` is a square-free integer greater than one, so the
/// value is provably irrational and two surds are equal exactly when their
/// fields are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    p: Rational,
    q: Rational,
    d: u64,
}

impl QuadraticSurd {
    /// Square factors of `d` are moved into `q`, so `new(0, 1, 8)` is `2·√2`.
    pub fn new(p: Rational, q: Rational, d: u64) -> Result<Self, RealError> {
        if q.is_zero() {
            return Err(RealError::ZeroSurdCoefficient);
        }
        let (outer, inner) = split_square_factor(d);
        if inner <= 1 {
            return Err(RealError::PerfectSquareRadicand(d));
        }
        let q = &q * &Rational::integer(outer);
        Ok(QuadraticSurd { p, q, d: inner })
    }

    /// `√d` for a square-free `d`.
    pub fn sqrt(d: u64) -> Result<Self, RealError> {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    /// Exact comparison of the surd against a rational, by sign analysis of
    /// `(p - r) + q·√d`. Never returns `Equal`.
    pub fn compare_rational(&self, r: &Rational) -> Ordering {
        let a = &self.p - r;
        match (a.numer().sign(), self.q.is_positive()) {
            (Sign::Plus | Sign::NoSign, true) => Ordering::Greater,
            (Sign::Minus | Sign::NoSign, false) => Ordering::Less,
            (a_sign, q_positive) => {
                // Opposite signs: the term with the larger square wins.
                let a_sq = &a * &a;
                let q_sq_d = &(&self.q * &self.q) * &Rational::integer(self.d);
                let a_dominates = a_sq.compare(&q_sq_d) == Ordering::Greater;
                let positive = if a_dominates { a_sign == Sign::Plus } else { q_positive };
                if positive {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    /// Enclosure of width at most `2^-step`, built from an integer square root
    /// at scale `2^step`. Successive steps are nested.
    pub fn enclosure(&self, step: u32) -> RationalInterval {
        let a = self.q.numer().magnitude();
        let b = self.q.denom().magnitude();
        let scale = BigUint::one() << step as usize;
        let radicand = a * a * BigUint::from(self.d) * &scale * &scale;
        let root = radicand.sqrt();
        let denom = &scale * b;
        // root < |q|·√d·scale·b < root + 1 strictly: the radicand is never a square.
        let below = Rational::from_naturals(root.clone(), denom.clone());
        let above = Rational::from_naturals(root + 1u32, denom);
        let (lo, hi) = if self.q.is_positive() {
            (&self.p + &below, &self.p + &above)
        } else {
            (&self.p - &above, &self.p - &below)
        };
        RationalInterval::new(lo, hi).expect("surd enclosure has positive width")
    }

    /// The smallest step whose enclosure is narrower than `width`.
    pub(crate) fn step_for_width(&self, width: &Rational) -> u32 {
        let mut step = 0u32;
        let mut w = Rational::from_naturals(
            BigUint::one(),
            self.q.denom().magnitude().clone(),
        );
        while w.compare(width) != Ordering::Less {
            step += 1;
            w = &w * &Rational::frac(1, 2);
        }
        step
    }
}

/// Splits `d` into `outer² · inner` with `inner` square-free.
fn split_square_factor(d: u64) -> (u64, u64) {
    if d == 0 {
        return (0, 0);
    }
    let mut outer = 1u64;
    let mut inner = d;
    let mut f = 2u64;
    while f.saturating_mul(f) <= inner {
        while inner % (f * f) == 0 {
            inner /= f * f;
            outer *= f;
        }
        f += 1;
    }
    (outer, inner)
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_negative() {
            write!(f, "{}-{}*sqrt({})", self.p, -&self.q, self.d)
        } else {
            write!(f, "{}+{}*sqrt({})", self.p, self.q, self.d)
        }
    }
}

impl fmt::Debug for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadraticSurd {
    type Err = RealError;

    /// Accepts `p+q*sqrt(d)`, `p-q*sqrt(d)`, `q*sqrt(d)`, `sqrt(d)`, `-sqrt(d)`
    /// and `p+sqrt(d)`, where `p` and `q` are rational literals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RealError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = t.strip_suffix(')').ok_or_else(bad)?;
        let (head, radicand) = body.rsplit_once("sqrt(").ok_or_else(bad)?;
        let d: u64 = radicand.parse().map_err(|_| bad())?;

        let head = head.strip_suffix('*').unwrap_or(head);
        // The signed coefficient starts at the last sign past position 0.
        let split = head
            .char_indices()
            .filter(|&(i, c)| (c == '+' || c == '-') && i > 0)
            .map(|(i, _)| i)
            .last();
        let (p_text, q_text) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("", head),
        };
        let p = if p_text.is_empty() {
            Rational::zero()
        } else {
            p_text.parse().map_err(|_| bad())?
        };
        let q = match q_text {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => other.trim_start_matches('+').parse().map_err(|_| bad())?,
        };
        QuadraticSurd::new(p, q, d)
    }
}
