//! Reference implementations used to cross-check the library. None of them
//! call into `densemap`; they work on `BigRational` directly.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn big(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form, as the library prints it.
pub fn show(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Terms of the sequence from `1/1` via `next(q) = 1/(2⌊q⌋ - q + 1)`.
pub fn recurrence_terms(count: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(count);
    let (mut a, mut b) = (1u64, 1u64);
    for _ in 0..count {
        out.push((a, b));
        let f = a / b;
        (a, b) = (b, 2 * f * b + b - a);
    }
    out
}

/// The term after `q`, by the recurrence, for arbitrary size.
pub fn recurrence_next(q: &BigRational) -> BigRational {
    let two = BigInt::from(2);
    let f = BigRational::from_integer(q.floor().to_integer() * two);
    (f - q + BigRational::one()).recip()
}

/// An upper end of an open interval: a rational, `p + q·√d`, or nothing.
#[derive(Clone, Debug)]
pub enum Upper {
    Rational(BigRational),
    Surd { p: BigRational, q: BigRational, d: u64 },
    Infinity,
}

/// Decides `x < p + q·√d` by bisecting `√d` on the sign of `m² - d`.
pub fn below_surd(x: &BigRational, p: &BigRational, q: &BigRational, d: u64) -> bool {
    let dd = BigRational::from_integer(BigInt::from(d));
    let mut lo = BigRational::zero();
    let mut hi = BigRational::from_integer(BigInt::from(d.max(1)));
    loop {
        let (a, b) = if q.is_positive() {
            (p + q * &lo, p + q * &hi)
        } else {
            (p + q * &hi, p + q * &lo)
        };
        if x < &a {
            return true;
        }
        if x >= &b {
            return false;
        }
        let m = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        if &m * &m < dd {
            lo = m;
        } else {
            hi = m;
        }
    }
}

impl Upper {
    pub fn above(&self, x: &BigRational) -> bool {
        match self {
            Upper::Rational(h) => x < h,
            Upper::Surd { p, q, d } => below_surd(x, p, q, *d),
            Upper::Infinity => true,
        }
    }
}

/// Least index whose term lies strictly inside `(lo, hi)`, by walking the
/// recurrence; `None` past `limit` indices.
pub fn scan_first(lo: &BigRational, hi: &Upper, limit: u64) -> Option<(u64, BigRational)> {
    let mut q = BigRational::one();
    for i in 0..limit {
        if &q > lo && hi.above(&q) {
            return Some((i, q));
        }
        q = recurrence_next(&q);
    }
    None
}

/// The rational of least denominator, then least numerator, in `(lo, hi)`,
/// found by trying denominators in turn.
pub fn min_denominator(lo: &BigRational, hi: &Upper) -> BigRational {
    let mut d = BigInt::one();
    loop {
        let den = BigRational::from_integer(d.clone());
        let n = (lo * &den).floor().to_integer() + BigInt::one();
        let candidate = BigRational::new(n, d.clone());
        if hi.above(&candidate) {
            return candidate;
        }
        d += 1;
    }
}

/// Simplest rational in the open interval `(lo, hi)` with `0 ≤ lo < hi`, by
/// continued-fraction recursion; `hi = None` means infinity.
pub fn simplest_cf(lo: &BigRational, hi: Option<&BigRational>) -> BigRational {
    let fl = lo.floor();
    let next_int = &fl + BigRational::one();
    match hi {
        None => return next_int,
        Some(h) if &next_int < h => return next_int,
        _ => {}
    }
    let h = hi.unwrap();
    let new_lo = (h - &fl).recip();
    let frac = lo - &fl;
    let inner = if frac.is_zero() {
        simplest_cf(&new_lo, None)
    } else {
        simplest_cf(&new_lo, Some(&frac.recip()))
    };
    fl + inner.recip()
}

/// Tiny deterministic generator so oracles do not share the library's RNG.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo) as u64 + 1;
        lo + (self.next_u64() % span) as i64
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// [`scan_first`] for word-sized rational bounds, using machine integers.
/// `hi = None` means infinity.
pub fn scan_first_small(lo: (u64, u64), hi: Option<(u64, u64)>, limit: u64) -> Option<(u64, (u64, u64))> {
    let (mut a, mut b) = (1u64, 1u64);
    for i in 0..limit {
        let above = u128::from(a) * u128::from(lo.1) > u128::from(lo.0) * u128::from(b);
        let below = hi.map_or(true, |(c, d)| u128::from(a) * u128::from(d) < u128::from(c) * u128::from(b));
        if above && below {
            return Some((i, (a, b)));
        }
        let f = a / b;
        (a, b) = (b, 2 * f * b + b - a);
    }
    None
}

/// Sum of the continued-fraction partial quotients of a positive rational:
/// its depth in the mediant tree, plus one.
pub fn cf_depth(q: &BigRational) -> BigInt {
    let (mut n, mut d) = (q.numer().clone(), q.denom().clone());
    let mut total = BigInt::zero();
    while !d.is_zero() {
        let (quot, rem) = n.div_rem(&d);
        total += quot;
        n = d;
        d = rem;
    }
    total
}
