//! Birkhoff factorization `U = V W` of loop-group-valued matrix series.
//!
//! Cohomology: `V` has only non-negative powers of `z`, `W` only
//! non-positive ones with `W(z^{-1} = 0) = I`. K-theory: `V` is a Laurent
//! polynomial in `q`, `W - I` is reduced (regular at `q = 0`, vanishing at
//! `q = ∞`), so `W(∞) = I`.
//!
//! The factors are found through `Y = V^{-1}`: `W = Y U` is characterized by
//! `[Y U]_+ = I`, which is solved by sweeps over the filtration, each sweep
//! fixing one more order. A grade-zero part outside the positive loop group
//! is handled (cohomology only) by exact linear algebra on the Laurent
//! coefficients.

use crate::error::{Error, Result};
use crate::matrix::{HMat, Mat, Polarized};
use crate::rational::{is_zero, one, recip, zero, Rat};
use crate::series::{Coeff, HSeries, Mono, Series};

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<C: Coeff> {
    pub v: Mat<C>,
    pub w: Mat<C>,
    pub sweeps: usize,
}

/// Filtration sweeps; `None` if the leading part or its inverse is not in
/// the positive loop group.
///
/// The leading part is the grade-zero part, or, when that fails and the
/// ring's positive-degree classes are nilpotent, its degree-zero component.
pub fn factorize_filtered<C: Coeff>(u: &Mat<C>) -> Result<Option<Factorization<C>>>
where
    Series<C>: Polarized,
{
    let ring = u.alg().ring().clone();
    let mut u0 = u.grade_zero();
    let mut depth = 1;
    if !u0.is_plus() && ring.is_graded_nilpotent() {
        u0 = u0.map(|e| e.filter(|_, comp| ring.grading[comp] == 0));
        depth += *ring.grading.iter().max().unwrap_or(&0) as usize;
    }
    let u0_inv = u0.inverse().map_err(|e| Error::SingularLeadingTerm(format!("U at leading order: {e}")))?;
    if !(u0.is_plus() && u0_inv.is_plus()) {
        return Ok(None);
    }
    let id = Mat::identity(u.alg(), u.n());
    let mut y = u0_inv.clone();
    let bound = (u.alg().nilpotency_bound() + 1) * depth;
    for sweep in 0..=bound {
        let yu = y.mul(u);
        let r = yu.plus().sub(&id);
        if r.is_zero() {
            let v = y.inverse()?;
            return Ok(Some(Factorization { v, w: yu, sweeps: sweep }));
        }
        y = y.sub(&r.mul(&u0_inv));
    }
    Err(Error::NonConvergent { iterations: bound })
}

/// Cohomological Birkhoff factorization.
pub fn birkhoff_factorize(u: &HMat) -> Result<Factorization<Rat>> {
    if let Some(f) = factorize_filtered(u)? {
        return Ok(f);
    }
    if !u.is_grade_zero() {
        return Err(Error::InvalidArgument(
            "leading term outside the positive loop group together with higher orders is not supported".into(),
        ));
    }
    factorize_laurent(u)
}

/// K-theoretic Birkhoff factorization.
pub fn birkhoff_factorize_k(u: &crate::matrix::KMat) -> Result<Factorization<crate::ratfn::RatFn>> {
    factorize_filtered(u)?
        .ok_or_else(|| Error::SingularLeadingTerm("leading term is not invertible over Laurent polynomials".into()))
}

/// Grade-zero factorization of a Laurent-polynomial matrix over the ring.
///
/// Entries are replaced by their regular representations, the rational
/// Laurent system `[Y U]_{≥0} = I` is solved for the smallest `z`-degree of
/// `Y`, and ring entries are read back from the first columns of the blocks.
/// By uniqueness of the factorization the result is ring-linear.
fn factorize_laurent(u: &HMat) -> Result<Factorization<Rat>> {
    let n = u.n();
    let alg = u.alg().clone();
    let ring = alg.ring().clone();
    let rk = ring.rank();
    let big = n * rk;
    let mut lo = 0i16;
    let mut hi = 0i16;
    for e in u.rows.iter().flatten() {
        for (m, _) in e.terms().keys() {
            if m.with(0, 0) != Mono::ONE {
                return Err(Error::InvalidArgument("leading matrix must be a Laurent polynomial in z".into()));
            }
            lo = lo.min(m.0[0]);
            hi = hi.max(m.0[0]);
        }
    }
    // regular representation of the basis at λ = 0
    let reg: Vec<Vec<Vec<Rat>>> = (0..rk)
        .map(|i| {
            (0..rk)
                .map(|k| (0..rk).map(|j| crate::ring::lam_at_zero(&ring.products[i][j].coords[k])).collect())
                .collect()
        })
        .collect();
    // coefficient of z^m in the big matrix
    let big_coeff = |m: i16| -> Vec<Vec<Rat>> {
        let mut out = vec![vec![zero(); big]; big];
        for r in 0..n {
            for c in 0..n {
                for i in 0..rk {
                    let x = u.rows[r][c].get(&alg.mono_z(m), i);
                    if is_zero(&x) {
                        continue;
                    }
                    for k in 0..rk {
                        for j in 0..rk {
                            out[r * rk + k][c * rk + j] += &x * &reg[i][k][j];
                        }
                    }
                }
            }
        }
        out
    };
    let coeffs: Vec<Vec<Vec<Rat>>> = (lo..=hi).map(big_coeff).collect();
    let at = |m: i16| -> Option<&Vec<Vec<Rat>>> { (lo..=hi).contains(&m).then(|| &coeffs[(m - lo) as usize]) };
    let max_k = (big as i16) * (hi - lo) + 1;
    'degree: for kdeg in 0..=max_k {
        let unknowns = (kdeg as usize + 1) * big;
        let mut y_rows = Vec::with_capacity(big);
        for row in 0..big {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for j in 0..=(kdeg + hi) {
                for col in 0..big {
                    let mut eq = vec![zero(); unknowns];
                    for k in 0..=kdeg {
                        if let Some(cm) = at(j - k) {
                            for m in 0..big {
                                eq[k as usize * big + m] = cm[m][col].clone();
                            }
                        }
                    }
                    a.push(eq);
                    b.push(if j == 0 && col == row { one() } else { zero() });
                }
            }
            match solve_rat(a, b) {
                Some(y) => y_rows.push(y),
                None => continue 'degree,
            }
        }
        let y = Mat::from_fn(n, |r, c| {
            let mut terms = Vec::new();
            for k in 0..=kdeg {
                for comp in 0..rk {
                    terms.push(((alg.mono_z(k), comp as u8), y_rows[r * rk + comp][k as usize * big + c * rk].clone()));
                }
            }
            HSeries::from_terms(&alg, terms)
        });
        let w = y.mul(u);
        let v = y.inverse()?;
        let f = Factorization { v, w, sweeps: 0 };
        check_factorization(u, &f).map_err(Error::SingularLeadingTerm)?;
        return Ok(f);
    }
    Err(Error::SingularLeadingTerm("no factorization with trivial partial indices".into()))
}

/// Solves `A x = b` over the rationals; free variables are set to zero.
pub fn solve_rat(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !is_zero(&a[i][c])) else { continue };
        a.swap(r, p);
        b.swap(r, p);
        let inv = recip(&a[r][c]);
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !is_zero(&a[i][c]) {
                let f = a[i][c].clone();
                let (src, dst) = if i < r {
                    let (lo, hi) = a.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = a.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &f * s;
                }
                let br = b[r].clone();
                b[i] -= &f * &br;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if (r..rows).any(|i| !is_zero(&b[i])) {
        return None;
    }
    let mut x = vec![zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

/// `V W = U`, `W` normalized and of the right polarity, `V` positive.
pub fn check_factorization<C: Coeff>(u: &Mat<C>, f: &Factorization<C>) -> std::result::Result<(), String>
where
    Series<C>: Polarized,
{
    if f.v.mul(&f.w) != *u {
        return Err("V·W ≠ U".into());
    }
    if !f.v.is_plus() {
        return Err("V has negative part".into());
    }
    let id = Mat::identity(u.alg(), u.n());
    if !f.w.sub(&id).plus().is_zero() {
        return Err("W is not I plus a negative part".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::seed::Target;

    fn z(a: &std::sync::Arc<crate::series::Algebra>, k: i16, c: i64) -> HSeries {
        HSeries::z_power(a, k, int(c))
    }

    #[test]
    fn identity_and_scalar() {
        let a = Target::Projective { n: 2 }.algebra(&[], 1, 0).unwrap();
        let id = HMat::identity(&a, 2);
        let f = birkhoff_factorize(&id).unwrap();
        assert_eq!((f.v.clone(), f.w.clone()), (id.clone(), id));
    }

    #[test]
    fn two_by_two_laurent() {
        let a = Target::Projective { n: 1 }.algebra(&[], 0, 0).unwrap();
        let u = Mat { rows: vec![vec![z(&a, 0, 2), z(&a, 1, 1)], vec![z(&a, -1, 1), z(&a, 0, 1)]] };
        let f = birkhoff_factorize(&u).unwrap();
        let v = Mat { rows: vec![vec![z(&a, 0, 1), z(&a, 1, 1)], vec![HSeries::zero(&a), z(&a, 0, 1)]] };
        let w = Mat { rows: vec![vec![z(&a, 0, 1), HSeries::zero(&a)], vec![z(&a, -1, 1), z(&a, 0, 1)]] };
        assert_eq!(f.v, v);
        assert_eq!(f.w, w);
        check_factorization(&u, &f).unwrap();
    }

    #[test]
    fn nilpotent_negative_part() {
        let a = Target::Projective { n: 2 }.algebra(&[], 0, 0).unwrap();
        let u = Mat { rows: vec![vec![&HSeries::one(&a) + &HSeries::basis(&a, 1).z_shift(-1)]] };
        let f = birkhoff_factorize(&u).unwrap();
        assert_eq!(f.v, HMat::identity(&a, 1));
        assert_eq!(f.w, u);
    }

    #[test]
    fn solver() {
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)], vec![int(2), int(0)]];
        assert_eq!(solve_rat(a.clone(), vec![int(3), int(1), int(4)]), Some(vec![int(2), int(1)]));
        assert_eq!(solve_rat(a, vec![int(3), int(1), int(5)]), None);
    }
}
