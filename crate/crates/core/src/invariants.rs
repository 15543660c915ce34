//! Plane-curve counts `N_d` from the reconstructed big J-function of `CP^2`,
//! checked against Kontsevich's recursion.
//!
//! On the slice `t = t2 p^2` the genus-zero potential has
//! `F_222 = Σ_d N_d Q^d t2^{3d-4} / (3d-4)!` and `F_112 = Σ_d d^2 N_d Q^d t2^{3d-2} / (3d-2)!`.
//! Only `∂_{t2} J` is differentiated directly; the other rows of `W` come
//! from the string equation `∂_0 J = -J/z` and the divisor equation
//! `∂_1 J = -pJ/z + Q∂_Q J`.

use crate::cone_h::{input_target, j_function, monomial_basis, Family};
use crate::error::{Error, Result};
use crate::matrix::HMat;
use crate::rational::{binomial, factorial, int, zero, Rat};
use crate::seed::{seed_terms, Target};
use crate::series::HSeries;
use crate::smatrix::{gram, quantum_product_to, s_from_w, Direction};

/// `N_1, ..., N_dmax` by Kontsevich's recursion.
pub fn kontsevich(dmax: u32) -> Vec<Rat> {
    let mut n: Vec<Rat> = Vec::new();
    for d in 1..=dmax as i64 {
        if d == 1 {
            n.push(int(1));
            continue;
        }
        let mut acc = zero();
        for d1 in 1..d {
            let d2 = d - d1;
            let w = &n[d1 as usize - 1] * &n[d2 as usize - 1] * int(d1 * d1 * d2);
            let b = int(d2) * binomial(3 * d - 4, 3 * d1 - 2) - int(d1) * binomial(3 * d - 4, 3 * d1 - 1);
            acc += w * b;
        }
        n.push(acc);
    }
    n
}

/// Caps `(Q, t2)` needed for `N_1..N_dmax`. The `∂_2 J` row of `W` is exact
/// one order below the cap and `∂_2 S` one more, while `F_222` is read at
/// `t2^{3d-4}`.
pub fn required_caps(dmax: u32) -> (u32, u32) {
    (dmax, (3 * dmax).saturating_sub(2).max(2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NdResult {
    pub d: u32,
    pub value: Rat,
    pub oracle: Rat,
}

/// `W` rows `∂_α J`, `α = 0, 1, 2`, on the `t2 p^2` slice.
pub fn slice_w(j: &HSeries) -> Result<HMat> {
    let alg = j.alg().clone();
    let slot = alg.var_slot("t2")?;
    let p = HSeries::from_ring_elem(&alg, &alg.ring().hyperplane());
    let d0 = j.z_shift(-1).neg();
    let d1 = &(&p * &j.z_shift(-1)).neg() + &j.novikov_euler(0);
    let d2 = j.derivative(slot);
    let rows = [d0, d1, d2];
    Ok(HMat::from_fn(3, |a, b| rows[a].component(b)))
}

/// `F_{abc} = (φ_a • φ_b, φ_c)` from the matrix of `φ_a •`.
fn structure_constant(m: &HMat, b: usize, c: usize) -> HSeries {
    let g = gram(m.alg());
    let mut acc = HSeries::zero(m.alg());
    for gamma in 0..m.n() {
        acc = &acc + &(&m.rows[gamma][b] * &g.rows[gamma][c]);
    }
    acc
}

fn coeff(e: &HSeries, d: u32, k: i64) -> Rat {
    let alg = e.alg();
    let slot = alg.var_slot("t2").expect("slice variable");
    e.terms()
        .iter()
        .filter(|((m, comp), _)| *comp == 0 && m.0[0] == 0 && alg.nov_degree(m) == d as i64 && m.0[slot] as i64 == k)
        .map(|(_, c)| c.clone())
        .fold(zero(), |a, c| a + c)
}

/// `N_1..N_dmax` from the reconstruction, each paired with the oracle.
pub fn nd_invariants(dmax: u32, q_cap: u32, def_cap: u32) -> Result<Vec<NdResult>> {
    if dmax == 0 {
        return Err(Error::InvalidArgument("dmax must be ≥ 1".into()));
    }
    let (need_q, need_t) = required_caps(dmax);
    if q_cap < need_q || def_cap < need_t {
        return Err(Error::InsufficientCaps { q_degree: need_q, def_degree: need_t });
    }
    let target = Target::Projective { n: 3 };
    let alg = target.algebra(&["t2"], q_cap, def_cap)?;
    let seed = seed_terms(&target.seed()?, &alg)?;
    let family = Family::new(&alg, seed, monomial_basis(3))?;
    let t2 = HSeries::var(&alg, "t2")?;
    let j = j_function(&family, &input_target(&alg, &[(0, 2, t2)]))?;
    let s = s_from_w(&slice_w(&j)?)?;
    let cap = def_cap as i64;
    let f222 = structure_constant(&quantum_product_to(&s, &Direction::Var("t2".into()), cap - 2)?, 2, 2);
    let f112 = structure_constant(&quantum_product_to(&s, &Direction::Divisor, cap - 1)?, 1, 2);
    let oracle = kontsevich(dmax);
    Ok((1..=dmax)
        .map(|d| {
            let value = if d == 1 {
                coeff(&f112, 1, 1)
            } else {
                let k = 3 * d as i64 - 4;
                coeff(&f222, d, k) * factorial(k as u32)
            };
            NdResult { d, value, oracle: oracle[d as usize - 1].clone() }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recursion_values() {
        assert_eq!(kontsevich(5), vec![int(1), int(1), int(12), int(620), int(87304)]);
    }

    #[test]
    fn reconstructed_low_degrees() {
        let (q, t) = required_caps(5);
        for r in nd_invariants(5, q, t).unwrap() {
            assert_eq!(r.value, r.oracle, "d = {}", r.d);
        }
    }

    #[test]
    fn caps_are_checked() {
        assert!(matches!(nd_invariants(3, 3, 6), Err(Error::InsufficientCaps { q_degree: 3, def_degree: 7 })));
    }
}
