//! Rational functions of one indeterminate `q` in canonical form, and the
//! split of a rational function into its Laurent-polynomial part and its
//! reduced part (regular at `q = 0`, vanishing at `q = ∞`).
//!
//! Canonical form is `q^v · N(q) / D(q)` with `gcd(N, D) = 1`, `N(0) != 0`
//! and `D(0) = 1`. Equality of values is equality of representations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::poly::Poly;
use crate::rational::{is_zero, one, recip, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    shift: i32,
    num: Poly,
    den: Poly,
}

impl Default for RatFn {
    fn default() -> Self {
        RatFn::zero()
    }
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { shift: 0, num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFn::constant(one())
    }

    pub fn constant(c: Rat) -> Self {
        RatFn::new(0, Poly::constant(c), Poly::one())
    }

    /// `c * q^k`, `k` may be negative.
    pub fn monomial(c: Rat, k: i32) -> Self {
        RatFn::new(k, Poly::constant(c), Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn::new(0, p, Poly::one())
    }

    /// `num / den`
    pub fn from_polys(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RatFn::new(0, num, den)
    }

    /// Builds the canonical representative of `q^shift · num / den`.
    pub fn new(mut shift: i32, mut num: Poly, mut den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn::zero();
        }
        let vn = num.valuation().unwrap();
        if vn > 0 {
            num = num.shift_down(vn);
            shift += vn as i32;
        }
        let vd = den.valuation().unwrap();
        if vd > 0 {
            den = den.shift_down(vd);
            shift -= vd as i32;
        }
        if den.degree() != Some(0) && num.degree() != Some(0) {
            let g = Poly::gcd(&num, &den);
            if g.degree() != Some(0) {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
        }
        let c = recip(&den.coeffs()[0]);
        if !crate::rational::is_one(&c) {
            num = num.scale(&c);
            den = den.scale(&c);
        }
        RatFn { shift, num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Power of `q` factored out of the canonical form.
    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_laurent_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Regular at `q = 0` and vanishing at `q = ∞`.
    pub fn is_reduced(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let top = self.shift + self.num.degree().unwrap() as i32;
        self.shift >= 0 && top < self.den.degree().unwrap() as i32
    }

    /// Value at `q = 0`, `None` at a pole.
    pub fn at_zero(&self) -> Option<Rat> {
        if self.is_zero() || self.shift > 0 {
            return Some(crate::rational::zero());
        }
        if self.shift < 0 {
            return None;
        }
        Some(self.num.coeffs()[0].clone())
    }

    /// Limit as `q → ∞`, `None` at a pole.
    pub fn at_infinity(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(crate::rational::zero());
        }
        let top = self.shift + self.num.degree().unwrap() as i32;
        let dd = self.den.degree().unwrap() as i32;
        match top.cmp(&dd) {
            std::cmp::Ordering::Less => Some(crate::rational::zero()),
            std::cmp::Ordering::Equal => Some(self.num.leading().unwrap() / self.den.leading().unwrap()),
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Evaluation at a rational point; `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        if self.is_zero() {
            return Some(crate::rational::zero());
        }
        let d = self.den.eval(x);
        if is_zero(&d) || (is_zero(x) && self.shift < 0) {
            return None;
        }
        let mut v = self.num.eval(x) / d;
        for _ in 0..self.shift.unsigned_abs() {
            if self.shift > 0 {
                v *= x;
            } else {
                v /= x;
            }
        }
        Some(v)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if is_zero(c) || self.is_zero() {
            return RatFn::zero();
        }
        RatFn { shift: self.shift, num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(RatFn::new(-self.shift, self.den.clone(), self.num.clone()))
    }

    /// Unique decomposition into a Laurent polynomial and a reduced part.
    pub fn k_split(&self) -> (RatFn, RatFn) {
        if self.is_zero() {
            return (RatFn::zero(), RatFn::zero());
        }
        if self.is_laurent_polynomial() {
            return (self.clone(), RatFn::zero());
        }
        if self.shift >= 0 {
            let p = self.num.shift_up(self.shift as usize);
            let (a, b) = p.div_rem(&self.den);
            return (RatFn::from_poly(a), RatFn::new(0, b, self.den.clone()));
        }
        // N / (q^k D): polynomial part S, then A/q^k + B/D with deg A < k
        let k = (-self.shift) as usize;
        let full = self.den.shift_up(k);
        let (s, r) = self.num.div_rem(&full);
        let qinv = Poly::monomial(one(), 1)
            .inverse_mod(&self.den)
            .expect("q is a unit modulo a denominator with nonzero constant term");
        let mut b = r.div_rem(&self.den).1;
        for _ in 0..k {
            b = (&b * &qinv).div_rem(&self.den).1;
        }
        let a = (&r - &b.shift_up(k)).div_exact(&self.den);
        let laurent = &RatFn::from_poly(s) + &RatFn::new(-(k as i32), a, Poly::one());
        (laurent, RatFn::new(0, b, self.den.clone()))
    }

    /// Coefficients of a Laurent polynomial as `(exponent, coefficient)`.
    pub fn laurent_terms(&self) -> Option<Vec<(i32, Rat)>> {
        if !self.is_laurent_polynomial() {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !is_zero(c))
                .map(|(i, c)| (self.shift + i as i32, c.clone()))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> RatFn {
        (0..e).fold(RatFn::one(), |acc, _| &acc * self)
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, o: &RatFn) -> RatFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(o.shift);
        let a = self.num.shift_up((self.shift - m) as usize);
        let b = o.num.shift_up((o.shift - m) as usize);
        if self.den == o.den {
            return RatFn::new(m, &a + &b, self.den.clone());
        }
        let num = &(&a * &o.den) + &(&b * &self.den);
        RatFn::new(m, num, &self.den * &o.den)
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, o: &RatFn) -> RatFn {
        self + &(-o)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { shift: self.shift, num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, o: &RatFn) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::zero();
        }
        let shift = self.shift + o.shift;
        if self.is_laurent_polynomial() && o.is_laurent_polynomial() {
            let c = recip(&(&self.den.coeffs()[0] * &o.den.coeffs()[0]));
            return RatFn { shift, num: (&self.num * &o.num).scale(&c), den: Poly::one() };
        }
        RatFn::new(shift, &self.num * &o.num, &self.den * &o.den)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let prefix = match self.shift {
            0 => String::new(),
            1 => "q*".to_string(),
            s => format!("q^{s}*"),
        };
        if self.is_laurent_polynomial() {
            write!(f, "{prefix}({})", self.num)
        } else {
            write!(f, "{prefix}({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn one_minus_q() -> Poly {
        Poly::from_ints(&[1, -1])
    }

    #[test]
    fn canonical_gcd_reduction() {
        // (1 - q^2)/(1 - q) = 1 + q
        let f = RatFn::from_polys(Poly::from_ints(&[1, 0, -1]), one_minus_q());
        assert_eq!(f, RatFn::from_poly(Poly::from_ints(&[1, 1])));
        // 2q / (2q - 2q^2) = 1/(1-q)
        let g = RatFn::from_polys(Poly::from_ints(&[0, 2]), Poly::from_ints(&[0, 2, -2]));
        assert_eq!(g, RatFn::from_polys(Poly::one(), one_minus_q()));
    }

    #[test]
    fn split_q_squared_over_one_minus_q() {
        let f = RatFn::from_polys(Poly::from_ints(&[0, 0, 1]), one_minus_q());
        let (l, r) = f.k_split();
        assert_eq!(l, RatFn::from_poly(Poly::from_ints(&[-1, -1])));
        assert_eq!(r, RatFn::from_polys(Poly::one(), one_minus_q()));
        assert!(r.is_reduced());
    }

    #[test]
    fn split_trivial_cases() {
        let f = RatFn::from_polys(Poly::one(), one_minus_q());
        assert_eq!(f.k_split(), (RatFn::zero(), f.clone()));
        let g = RatFn::monomial(int(1), 3);
        assert_eq!(g.k_split(), (g.clone(), RatFn::zero()));
    }

    #[test]
    fn split_with_pole_at_zero() {
        // 1/(q (1-q)) = 1/q + 1/(1-q)
        let f = RatFn::new(-1, Poly::one(), one_minus_q());
        let (l, r) = f.k_split();
        assert_eq!(l, RatFn::monomial(int(1), -1));
        assert_eq!(r, RatFn::from_polys(Poly::one(), one_minus_q()));
    }

    #[test]
    fn limits() {
        let f = RatFn::from_polys(Poly::from_ints(&[0, 1]), one_minus_q());
        assert_eq!(f.at_zero(), Some(int(0)));
        assert_eq!(f.at_infinity(), Some(int(-1)));
        assert_eq!(f.eval(&rat(1, 2)), Some(int(1)));
        assert_eq!(RatFn::monomial(int(1), -1).at_zero(), None);
    }
}
