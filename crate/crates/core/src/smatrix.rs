//! From a Theorem-1 family to the S-matrix: assemble `U = [(∂_α I, φ^β)]`,
//! factor `U = V W`, read the mirror map off the `z^{-1}` term of the first
//! row of `W`, and pass to flat coordinates.
//!
//! Conventions. Rows of `W` are the coordinates of `∂_{t_β} J(t)` (with
//! `J = -z + t + O(1/z)`); the first row is `1 - t/z + ...`, so
//! `t_β = -[z^{-1}] W_{0β}`. The S-matrix, acting on coordinate columns and
//! normalized by `S = I + O(1/z)`, `z∂_α S = (φ_α•) S`, is
//! `S(z) = G^{-1} W(-z) G` with `G` the Gram matrix.

use std::sync::Arc;

use crate::birkhoff::{birkhoff_factorize, Factorization};
use crate::cone_h::{t_name, tau_name, Family};
use crate::error::{Error, Result};
use crate::matrix::HMat;
use crate::rational::{int, is_zero, Rat};
use crate::ring::invert_lam_matrix;
use crate::series::{Algebra, HSeries};

/// `U_{αβ} = (∂_α I(τ), φ^β)`
pub fn assemble_u(family: &Family, tau: &[HSeries]) -> Result<HMat> {
    let alg = family.alg().clone();
    if family.seed()[0] != HSeries::z_power(&alg, 1, int(-1)) {
        return Err(Error::InvalidArgument("the seed must be normalized to I_0 = -z".into()));
    }
    let dual = alg.ring().dual_basis(alg.trunc().lambda_order)?;
    let rows: Vec<Vec<HSeries>> = (0..family.rank())
        .map(|a| {
            let d = family.derivative(tau, a)?;
            Ok(dual.iter().map(|e| d.pair_with(e)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(HMat { rows })
}

/// `t_β(τ) = -[z^{-1}] W_{0β}`
pub fn mirror_map(w: &HMat) -> Vec<HSeries> {
    w.rows[0].iter().map(|e| e.z_coeff(-1).neg()).collect()
}

/// Mirror map `t(τ)` of a family at the given `τ` (series or numbers).
pub fn mirror_map_at(family: &Family, tau: &[HSeries]) -> Result<Vec<HSeries>> {
    let u = assemble_u(family, tau)?;
    Ok(mirror_map(&birkhoff_factorize(&u)?.w))
}

/// Gram matrix of the pairing as a constant matrix series.
pub fn gram(alg: &Arc<Algebra>) -> HMat {
    let g = &alg.ring().gram;
    HMat::from_fn(g.len(), |i, j| HSeries::from_lam_poly(alg, &g[i][j]))
}

pub fn gram_inverse(alg: &Arc<Algebra>) -> Result<HMat> {
    let ring = alg.ring();
    let inv = invert_lam_matrix(&ring.gram, ring.n_lambda, alg.trunc().lambda_order)?;
    Ok(HMat::from_fn(inv.len(), |i, j| HSeries::from_lam_poly(alg, &inv[i][j])))
}

/// `A^* = G^{-1} A^T G`, the adjoint for the pairing.
pub fn adjoint(a: &HMat) -> Result<HMat> {
    let alg = a.alg().clone();
    Ok(gram_inverse(&alg)?.mul(&a.transpose()).mul(&gram(&alg)))
}

/// Matrix of multiplication by `e` on coordinate columns.
pub fn mult_matrix(e: &HSeries) -> HMat {
    let alg = e.alg().clone();
    let n = alg.rank();
    let cols: Vec<HSeries> = (0..n).map(|b| e * &HSeries::basis(&alg, b)).collect();
    HMat::from_fn(n, |g, b| cols[b].component(g))
}

/// `S(z) = G^{-1} W(-z) G` for `W` in flat coordinates.
pub fn s_from_w(w_flat: &HMat) -> Result<HMat> {
    let alg = w_flat.alg().clone();
    Ok(gram_inverse(&alg)?.mul(&w_flat.negate_z()).mul(&gram(&alg)))
}

/// Everything produced on the way from a family to `S`.
#[derive(Clone, Debug)]
pub struct SReconstruction {
    pub u: HMat,
    pub factorization: Factorization<Rat>,
    /// `t_β(τ)`
    pub mirror: Vec<HSeries>,
    /// `τ_α(t)`
    pub tau_of_t: Vec<HSeries>,
    /// `W` in flat coordinates
    pub w_flat: HMat,
    pub s: HMat,
}

/// Algebra with variables `tau{α}` and `t{α}` for the listed directions.
pub fn s_algebra(target: &crate::seed::Target, alphas: &[usize], q_cap: u32, def_cap: u32) -> Result<Arc<Algebra>> {
    let names: Vec<String> = alphas.iter().flat_map(|&a| [tau_name(a), t_name(a)]).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    target.algebra(&refs, q_cap, def_cap)
}

/// Runs assemble → factorize → mirror map → flat coordinates → `S`.
///
/// The directions are those `α` for which the algebra has both `tau{α}`
/// and `t{α}`; the others are frozen at zero, and the mirror map must not
/// move them.
pub fn reconstruct_s(family: &Family) -> Result<SReconstruction> {
    let alg = family.alg().clone();
    let rank = family.rank();
    let tau = family.tau_vars();
    let u = assemble_u(family, &tau)?;
    let factorization = birkhoff_factorize(&u)?;
    let mirror = mirror_map(&factorization.w);

    let included: Vec<usize> = (0..rank).filter(|&a| alg.var_index(&tau_name(a)).is_ok()).collect();
    let tvars: Vec<HSeries> =
        (0..rank).map(|a| HSeries::var(&alg, &t_name(a)).unwrap_or_else(|_| HSeries::zero(&alg))).collect();
    for &a in &included {
        if tvars[a].is_zero() {
            return Err(Error::InvalidArgument(format!("missing flat coordinate {}", t_name(a))));
        }
    }
    for b in 0..rank {
        if !included.contains(&b) && !mirror[b].is_zero() {
            return Err(Error::InvalidArgument(format!("mirror map moves the frozen coordinate {}", t_name(b))));
        }
    }

    // leading order t_β = -s Σ_α τ_α M_{αβ}
    let m: Vec<Vec<Rat>> = family.phis().iter().map(|f| f.coords(&alg)).collect();
    let minv = crate::ring::invert_rat_matrix(&m).ok_or_else(|| Error::InvalidArgument("Φ is not a basis".into()))?;
    let lead = int(-family.sign());
    let slots: Vec<usize> = included.iter().map(|&a| alg.var_slot(&tau_name(a))).collect::<Result<_>>()?;
    let solve_lead = |r: &[HSeries], a: usize| -> HSeries {
        let mut acc = HSeries::zero(&alg);
        for (b, rb) in r.iter().enumerate() {
            if !is_zero(&minv[b][a]) && !rb.is_zero() {
                acc = &acc + &rb.scale(&(&minv[b][a] * &lead));
            }
        }
        acc
    };
    let mut tau_of_t: Vec<HSeries> =
        (0..rank).map(|a| if included.contains(&a) { solve_lead(&tvars, a) } else { HSeries::zero(&alg) }).collect();
    let bound = alg.nilpotency_bound();
    let mut done = false;
    for _ in 0..=bound {
        let subs: Vec<(usize, HSeries)> =
            included.iter().zip(&slots).map(|(&a, &s)| (s, tau_of_t[a].clone())).collect();
        let image: Vec<HSeries> = mirror.iter().map(|x| x.substitute(&subs)).collect::<Result<_>>()?;
        let r: Vec<HSeries> = (0..rank).map(|b| &tvars[b] - &image[b]).collect();
        if r.iter().all(|x| x.is_zero()) {
            done = true;
            break;
        }
        for &a in &included {
            tau_of_t[a] = &tau_of_t[a] + &solve_lead(&r, a);
        }
    }
    if !done {
        return Err(Error::NonConvergent { iterations: bound });
    }
    let subs: Vec<(usize, HSeries)> = included.iter().zip(&slots).map(|(&a, &s)| (s, tau_of_t[a].clone())).collect();
    let w_flat = factorization.w.try_map(|e| e.substitute(&subs))?;
    let s = s_from_w(&w_flat)?;
    Ok(SReconstruction { u, factorization, mirror, tau_of_t, w_flat, s })
}

/// Direction of a quantum product.
#[derive(Clone, Debug, PartialEq)]
pub enum Direction {
    /// `∂/∂t` for the named flat coordinate.
    Var(String),
    /// The divisor `p`, through `z∂_p S = zQ∂_Q S + S p`.
    Divisor,
}

/// `φ_α• = (z∂_α S) S^{-1}`, certified `z`-independent.
///
/// `S` is taken to be exact to the algebra's deformation cap, so the product
/// is exact one order lower along a variable and to the full cap along the
/// divisor.
pub fn quantum_product(s: &HMat, dir: &Direction) -> Result<HMat> {
    let cap = s.alg().trunc().def_degree_cap as i64;
    quantum_product_to(s, dir, if matches!(dir, Direction::Var(_)) { cap - 1 } else { cap })
}

/// [`quantum_product`] truncated to deformation degree `exact_to` before
/// certification.
pub fn quantum_product_to(s: &HMat, dir: &Direction, exact_to: i64) -> Result<HMat> {
    let alg = s.alg().clone();
    let zds = match dir {
        Direction::Var(name) => {
            let slot = alg.var_slot(name)?;
            s.map(|e| e.derivative(slot).z_shift(1))
        }
        Direction::Divisor => {
            let p = HSeries::from_ring_elem(&alg, &alg.ring().hyperplane());
            s.map(|e| e.novikov_euler(0).z_shift(1)).add(&s.mul(&mult_matrix(&p)))
        }
    };
    let m = zds.mul(&s.inverse()?).map(|e| e.truncate_def(exact_to));
    for (i, row) in m.rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if let Some(((mono, comp), c)) = e.terms().iter().find(|((mono, _), _)| mono.0[0] != 0) {
                let single = HSeries::term(&alg, *mono, *comp as usize, c.clone());
                return Err(Error::ZDependence {
                    direction: format!("{dir:?}"),
                    location: format!("entry ({i},{j}): {single}"),
                });
            }
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// First offending term of the defect, in filtration order.
    pub detail: Option<String>,
}

fn check(name: &str, defect: &HMat) -> Check {
    let mut first: Option<(i64, String)> = None;
    for (i, row) in defect.rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            for ((m, comp), c) in e.terms() {
                let g = e.alg().grade(m);
                if first.as_ref().is_none_or(|(fg, _)| g < *fg) {
                    let single = HSeries::term(e.alg(), *m, *comp as usize, c.clone());
                    first = Some((g, format!("entry ({i},{j}) at grade {g}: {single}")));
                }
            }
        }
    }
    Check { name: name.into(), passed: first.is_none(), detail: first.map(|x| x.1) }
}

/// Symplectic condition, adjoint involution, string and divisor equations.
pub fn structural_checks(s: &HMat, string_var: Option<&str>, divisor_var: Option<&str>) -> Result<Vec<Check>> {
    let alg = s.alg().clone();
    let n = s.n();
    let id = HMat::identity(&alg, n);
    let cap = alg.trunc().def_degree_cap as i64 - 1;
    let adj = adjoint(s)?;
    let mut out = vec![
        check("symplectic S*(-z) S(z) = I", &adj.negate_z().mul(s).sub(&id)),
        check("adjoint involution (S*)* = S", &adjoint(&adj)?.sub(s)),
    ];
    if let Some(v) = string_var {
        let slot = alg.var_slot(v)?;
        let zd = s.map(|e| e.derivative(slot).z_shift(1));
        out.push(check("string z∂_0 S = S", &zd.sub(s).map(|e| e.truncate_def(cap))));
    }
    if let Some(v) = divisor_var {
        let slot = alg.var_slot(v)?;
        let zd = s.map(|e| e.derivative(slot).z_shift(1));
        let p = HSeries::from_ring_elem(&alg, &alg.ring().hyperplane());
        let rhs = s.map(|e| e.novikov_euler(0).z_shift(1)).add(&s.mul(&mult_matrix(&p)));
        out.push(check("divisor z∂_1 S = zQ∂_Q S + S p", &zd.sub(&rhs).map(|e| e.truncate_def(cap))));
    }
    Ok(out)
}

/// `φ_α•` matrices commute pairwise (to the order the products are exact).
pub fn commutation_check(products: &[HMat]) -> Check {
    let alg = products[0].alg().clone();
    let mut defect = HMat::zero(&alg, products[0].n());
    for (i, a) in products.iter().enumerate() {
        for b in &products[i + 1..] {
            defect = defect.add(&a.mul(b).sub(&b.mul(a)));
        }
    }
    let cap = alg.trunc().def_degree_cap as i64 - 1;
    check("quantum products commute", &defect.map(|e| e.truncate_def(cap)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_h::monomial_basis;
    use crate::seed::{seed_terms, Target};

    fn recon(n: usize, alphas: &[usize], q: u32, t: u32) -> SReconstruction {
        let target = Target::Projective { n };
        let alg = s_algebra(&target, alphas, q, t).unwrap();
        let seed = seed_terms(&target.seed().unwrap(), &alg).unwrap();
        let fam = Family::new(&alg, seed, monomial_basis(n)).unwrap().with_sign(-1);
        reconstruct_s(&fam).unwrap()
    }

    #[test]
    fn cp1_small_quantum_product() {
        let r = recon(2, &[1], 2, 1);
        let alg = r.s.alg().clone();
        let p = quantum_product(&r.s, &Direction::Var("t1".into()))
            .unwrap()
            .map(|e| e.specialize_zero(alg.var_slot("t1").unwrap()));
        // p • p = Q
        let q = HSeries::novikov(&alg, 0, 1);
        assert_eq!(p.rows[0][1], q);
        assert_eq!(p.rows[1][0], HSeries::one(&alg));
        // the divisor form keeps full precision: p • p = Q e^{t1}
        let by_divisor = quantum_product(&r.s, &Direction::Divisor).unwrap();
        let t1 = HSeries::var(&alg, "t1").unwrap();
        assert_eq!(by_divisor.rows[0][1], &q + &(&q * &t1));
        let by_divisor = by_divisor.map(|e| e.truncate_def(0));
        let by_var = quantum_product(&r.s, &Direction::Var("t1".into())).unwrap();
        assert_eq!(by_divisor, by_var);
    }

    #[test]
    fn cp1_structure() {
        let r = recon(2, &[0, 1], 2, 2);
        for c in structural_checks(&r.s, Some("t0"), Some("t1")).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        check_u(&r);
    }

    #[test]
    fn cp2_big_structure() {
        let r = recon(3, &[0, 1, 2], 2, 3);
        let alg = r.s.alg().clone();
        // trivial on the small locus; along p² the z-shifts move t0
        let small = |e: &HSeries| e.specialize_zero(alg.var_slot("tau2").unwrap());
        for (a, t) in r.mirror.iter().enumerate().take(2) {
            assert_eq!(small(t), HSeries::var(&alg, &tau_name(a)).unwrap());
        }
        assert_ne!(r.mirror[0], HSeries::var(&alg, "tau0").unwrap());
        for c in structural_checks(&r.s, Some("t0"), Some("t1")).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        let prods: Vec<HMat> = (0..3).map(|a| quantum_product(&r.s, &Direction::Var(t_name(a))).unwrap()).collect();
        let c = commutation_check(&prods);
        assert!(c.passed, "{c:?}");
        // p • p² = Q at t = 0
        let at0 = |e: &HSeries| (0..3).fold(e.clone(), |x, a| x.specialize_zero(alg.var_slot(&t_name(a)).unwrap()));
        assert_eq!(at0(&prods[1].rows[0][2]), HSeries::novikov(&alg, 0, 1));
    }

    fn check_u(r: &SReconstruction) {
        crate::birkhoff::check_factorization(&r.u, &r.factorization).unwrap();
    }

    /// Independent oracle: at `τ = 0` pick `c(z)` with `[Σ c_α z∂_α I]_{z ≥ 1} = -z`;
    /// the `z^0` part is then the input `t` of the point.
    fn mirror_by_c_matching(fam: &Family) -> Vec<HSeries> {
        let alg = fam.alg().clone();
        let rank = alg.rank();
        let zero = vec![HSeries::zero(&alg); rank];
        let mut c: Vec<HSeries> =
            (0..rank).map(|a| if a == 0 { HSeries::constant(&alg, int(-1)) } else { HSeries::zero(&alg) }).collect();
        for _ in 0..20 {
            let g = fam.tangent_combination(&zero, &c).unwrap();
            let r = &g.filter(|m, _| m.0[0] >= 1) + &HSeries::z_power(&alg, 1, int(1));
            if r.is_zero() {
                return (0..rank).map(|b| g.component(b).z_coeff(0)).collect();
            }
            // Φ_α = p^α, and z∂_α I = z Φ_α at leading order
            for (a, ca) in c.iter_mut().enumerate() {
                *ca = &*ca - &r.component(a).z_shift(-1);
            }
        }
        panic!("c-matching did not converge");
    }

    fn local_family(lambda_order: u32) -> Family {
        let target = Target::Local { n: 2, l: 1, lambda_order };
        let alg = target.algebra(&[], 2, 0).unwrap();
        let seed = seed_terms(&target.seed().unwrap(), &alg).unwrap();
        Family::new(&alg, seed, monomial_basis(2)).unwrap().with_sign(-1)
    }

    #[test]
    fn local_mirror_map() {
        let fam = local_family(5);
        let alg = fam.alg().clone();
        let m = mirror_map_at(&fam, &vec![HSeries::zero(&alg); 2]).unwrap();
        // by hand: [z^0] I_1 = -(p+λ)^{-2} - 2p(p+λ)^{-3} = -λ^{-2}
        let q = HSeries::novikov(&alg, 0, 1);
        assert_eq!(m[0].truncate_novikov(1), (&q * &HSeries::lambda(&alg, 0, -2)).neg());
        assert_eq!(m, mirror_by_c_matching(&fam));
        // stable in the λ-order
        let wide = local_family(8);
        let m8 = mirror_map_at(&wide, &vec![HSeries::zero(wide.alg()); 2]).unwrap();
        assert_eq!(m8[0].to_string(), m[0].to_string());
    }
}
