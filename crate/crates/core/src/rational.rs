//! Exact rational scalars.
//!
//! Every coefficient in the crate is a [`Rat`]. The canonical textual form is
//! `"numerator/denominator"` in lowest terms with a positive denominator, also
//! for integers (`"3/1"`); parsing accepts a bare integer as well.

use malachite_base::num::arithmetic::traits::Reciprocal;
use malachite_base::num::basic::traits::{One, Zero};
use std::str::FromStr;

pub use malachite_q::Rational as Rat;

use crate::error::{Error, Result};

pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::from_signeds(num, den)
}

pub fn int(n: i64) -> Rat {
    Rat::from(n)
}

#[inline]
pub fn zero() -> Rat {
    Rat::ZERO
}

#[inline]
pub fn one() -> Rat {
    Rat::ONE
}

#[inline]
pub fn is_zero(x: &Rat) -> bool {
    *x == Rat::ZERO
}

#[inline]
pub fn is_one(x: &Rat) -> bool {
    *x == Rat::ONE
}

/// Multiplicative inverse. Panics on zero; callers check first.
pub fn recip(x: &Rat) -> Rat {
    assert!(!is_zero(x), "reciprocal of zero");
    x.clone().reciprocal()
}

pub fn factorial(n: u32) -> Rat {
    (1..=n as i64).fold(one(), |acc, k| acc * int(k))
}

pub fn binomial(n: i64, k: i64) -> Rat {
    if k < 0 || n < 0 || k > n {
        return zero();
    }
    let k = k.min(n - k);
    let mut acc = one();
    for i in 0..k {
        acc = acc * int(n - i) / int(i + 1);
    }
    acc
}

/// `"a/b"` with `b > 0`, always including the denominator.
pub fn to_canonical(x: &Rat) -> String {
    let sign = if *x < Rat::ZERO { "-" } else { "" };
    format!("{sign}{}/{}", x.numerator_ref(), x.denominator_ref())
}

pub fn parse(s: &str) -> Result<Rat> {
    let t = s.trim();
    Rat::from_str(t).map_err(|_| Error::Parse(format!("invalid rational \"{s}\"")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(to_canonical(&rat(6, -4)), "-3/2");
        assert_eq!(to_canonical(&int(3)), "3/1");
        assert_eq!(to_canonical(&zero()), "0/1");
        assert_eq!(parse("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse(" 4/6 ").unwrap(), rat(2, 3));
        assert!(parse("x/2").is_err());
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(5), int(120));
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(5, 7), zero());
        assert_eq!(binomial(-1, 0), zero());
    }
}
