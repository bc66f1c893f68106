mod common;

use std::cmp::Ordering;

use densemap::rational::{ArithOp, RationalError};
use densemap::Rational;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn bigint(bits: usize) -> impl Strategy<Value = BigInt> {
    (any::<bool>(), prop::collection::vec(any::<u32>(), 1..=bits / 32)).prop_map(|(neg, digits)| {
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        BigInt::from_slice(sign, &digits)
    })
}

fn nonzero(bits: usize) -> impl Strategy<Value = BigInt> {
    bigint(bits).prop_filter("nonzero", |n| !n.is_zero())
}

fn rational() -> impl Strategy<Value = Rational> {
    (bigint(256), nonzero(256)).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

fn small() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::frac(n, d))
}

fn is_canonical(q: &Rational) -> bool {
    q.denom() > &BigInt::zero() && q.numer().gcd(q.denom()).is_one()
}

#[test]
fn constructor_examples() {
    assert_eq!(Rational::frac(2, 4).to_string(), "1/2");
    assert_eq!(Rational::frac(3, -6).to_string(), "-1/2");
    assert_eq!(Rational::frac(0, 7).to_string(), "0/1");
    assert_eq!(Rational::new(1, 0), Err(RationalError::ZeroDenominator));
}

#[test]
fn compare_and_arith_examples() {
    let r = |s: &str| s.parse::<Rational>().unwrap();
    assert_eq!(r("1/2").compare(&r("2/3")), Ordering::Less);
    assert_eq!(r("5/5").compare(&r("1/1")), Ordering::Equal);
    assert_eq!(r("-1/2").compare(&r("-2/3")), Ordering::Greater);
    assert_eq!(r("1/2").arith(&r("1/3"), ArithOp::Add).unwrap(), r("5/6"));
    assert_eq!(r("1/2").arith(&r("1/2"), ArithOp::Sub).unwrap().to_string(), "0/1");
    assert_eq!(r("2/3").arith(&r("3/4"), ArithOp::Mul).unwrap(), r("1/2"));
    assert_eq!(r("2/3").arith(&r("0"), ArithOp::Div), Err(RationalError::DivisionByZero));
    assert_eq!(r("1/2").mediant(&r("2/3")), r("3/5"));
    assert_eq!(r("0/1").mediant(&r("1/1")), r("1/2"));
    assert_eq!(r("1/3").mediant(&r("1/2")), r("2/5"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn every_result_is_canonical(a in rational(), b in rational()) {
        prop_assert!(is_canonical(&a));
        for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div] {
            match a.arith(&b, op) {
                Ok(c) => prop_assert!(is_canonical(&c)),
                Err(e) => prop_assert!(op == ArithOp::Div && b.is_zero() && e == RationalError::DivisionByZero),
            }
        }
        prop_assert!(is_canonical(&a.mediant(&b)));
    }

    #[test]
    fn order_matches_cross_multiplication(a in rational(), b in rational()) {
        let lhs = a.numer() * b.denom();
        let rhs = b.numer() * a.denom();
        prop_assert_eq!(a.compare(&b), lhs.cmp(&rhs));
        prop_assert_eq!(a.compare(&b), b.compare(&a).reverse());
    }

    #[test]
    fn order_is_transitive(a in small(), b in small(), c in small()) {
        let mut v = [a, b, c];
        v.sort();
        prop_assert!(v[0] <= v[1] && v[1] <= v[2] && v[0] <= v[2]);
    }

    #[test]
    fn field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a + &(-a.clone())).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn mediant_and_midpoint_lie_between(a in rational(), b in rational()) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let m = lo.mediant(&hi);
        prop_assert!(lo < m && m < hi);
        let mid = lo.midpoint(&hi);
        prop_assert!(lo < mid && mid < hi);
    }

    #[test]
    fn text_round_trip(a in rational()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<Rational>().unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(json, format!("\"{text}\""));
    }
}
