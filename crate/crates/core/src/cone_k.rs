//! The K-theoretic cone: the `q`-translation flow
//! `I ↦ Σ_d I_d Q^d exp((1-q)^{-1} Σ τ_α Ψ_α(P q^d))`, tangent combinations
//! `Σ c_α(q) (1-q)∂_α I`, matching of the Laurent-polynomial part, and the
//! Birkhoff factorization with the Laurent/reduced split.
//!
//! `Ψ_α` are polynomials in `ε = 1 - P` whose coefficients may be Laurent
//! polynomials in `q`; matching needs them `q`-free.

use std::sync::Arc;

use rayon::prelude::*;

use crate::birkhoff::{birkhoff_factorize_k, Factorization};
use crate::cone_h::tau_name;
use crate::error::{Error, Result};
use crate::matrix::KMat;
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::rational::{int, is_zero, one, Rat};
use crate::ring::invert_rat_matrix;
use crate::series::{Algebra, KSeries, Mono};

/// `Σ_i c_i(q) (1 - P)^i`
#[derive(Clone, Debug, PartialEq)]
pub struct PsiPoly {
    pub terms: Vec<(u32, RatFn)>,
}

impl PsiPoly {
    /// `(1 - P)^i`
    pub fn power(i: u32) -> Self {
        PsiPoly { terms: vec![(i, RatFn::one())] }
    }

    pub fn from_eps_coeffs(c: &[Rat]) -> Self {
        PsiPoly {
            terms: c
                .iter()
                .enumerate()
                .filter(|(_, x)| !is_zero(x))
                .map(|(i, x)| (i as u32, RatFn::constant(x.clone())))
                .collect(),
        }
    }

    pub fn is_q_free(&self) -> bool {
        self.terms.iter().all(|(_, c)| {
            c.is_laurent_polynomial() && c.laurent_terms().is_some_and(|t| t.iter().all(|(k, _)| *k == 0))
        })
    }

    /// `Ψ(P q^d)` in the algebra.
    pub fn eval_shifted(&self, alg: &Arc<Algebra>, d: i32) -> KSeries {
        let p = KSeries::from_ring_elem(alg, &alg.ring().hyperplane());
        let eps = &KSeries::one(alg) - &p.scale_coeff(&RatFn::monomial(one(), d));
        let mut acc = KSeries::zero(alg);
        for (i, c) in &self.terms {
            acc = &acc + &eps.pow(*i).scale_coeff(c);
        }
        acc
    }

    /// Coordinates of `Ψ(P)` in the ring basis, for `q`-free `Ψ`.
    pub fn coords(&self, alg: &Arc<Algebra>) -> Vec<Rat> {
        let v = self.eval_shifted(alg, 0);
        (0..alg.rank()).map(|i| v.get(&Mono::ONE, i).eval(&int(0)).unwrap_or_else(crate::rational::zero)).collect()
    }
}

/// `Ψ_α = (1 - P)^α`
pub fn eps_basis(n: usize) -> Vec<PsiPoly> {
    (0..n as u32).map(PsiPoly::power).collect()
}

fn one_minus_q() -> RatFn {
    RatFn::from_poly(Poly::from_ints(&[1, -1]))
}

fn inv_one_minus_q() -> RatFn {
    RatFn::from_polys(Poly::one(), Poly::from_ints(&[1, -1]))
}

/// A K-theoretic point `Σ I_d Q^d` with flow directions `Ψ_α`.
#[derive(Clone, Debug)]
pub struct FamilyK {
    alg: Arc<Algebra>,
    seed: Vec<KSeries>,
    psis: Vec<PsiPoly>,
    shifted: Vec<Vec<KSeries>>,
}

impl FamilyK {
    pub fn new(alg: &Arc<Algebra>, seed: Vec<KSeries>, psis: Vec<PsiPoly>) -> Result<Self> {
        if seed.len() != alg.trunc().q_degree_cap as usize + 1 {
            return Err(Error::InvalidArgument("one seed term per Novikov degree is required".into()));
        }
        let shifted = (0..seed.len()).map(|d| psis.iter().map(|p| p.eval_shifted(alg, d as i32)).collect()).collect();
        Ok(FamilyK { alg: alg.clone(), seed, psis, shifted })
    }

    pub fn alg(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn seed(&self) -> &[KSeries] {
        &self.seed
    }

    pub fn psis(&self) -> &[PsiPoly] {
        &self.psis
    }

    pub fn rank(&self) -> usize {
        self.psis.len()
    }

    pub fn tau_vars(&self) -> Vec<KSeries> {
        (0..self.rank())
            .map(|a| KSeries::var(&self.alg, &tau_name(a)).unwrap_or_else(|_| KSeries::zero(&self.alg)))
            .collect()
    }

    fn exponent(&self, d: usize, tau: &[KSeries]) -> Result<KSeries> {
        let mut e = KSeries::zero(&self.alg);
        for (a, t) in tau.iter().enumerate() {
            if !t.is_zero() {
                e = &e + &(t * &self.shifted[d][a]);
            }
        }
        e.exp_divided_one_minus_q()
    }

    /// `I_d Q^d exp(...)` per degree, unshifted in `Q`.
    pub fn flow_terms(&self, tau: &[KSeries]) -> Result<Vec<KSeries>> {
        (0..self.seed.len()).into_par_iter().map(|d| Ok(&self.seed[d] * &self.exponent(d, tau)?)).collect()
    }

    pub fn flow(&self, tau: &[KSeries]) -> Result<KSeries> {
        Ok(crate::seed::assemble_k(&self.alg, &self.flow_terms(tau)?))
    }

    /// `(1-q) ∂_α I(τ)`
    pub fn derivative(&self, tau: &[KSeries], alpha: usize) -> Result<KSeries> {
        let terms: Vec<KSeries> = (0..self.seed.len())
            .into_par_iter()
            .map(|d| Ok(&(&self.seed[d] * &self.exponent(d, tau)?) * &self.shifted[d][alpha]))
            .collect::<Result<_>>()?;
        Ok(crate::seed::assemble_k(&self.alg, &terms))
    }

    /// `Σ_α c_α (1-q) ∂_α I(τ)`
    pub fn tangent_combination(&self, tau: &[KSeries], c: &[KSeries]) -> Result<KSeries> {
        let terms: Vec<KSeries> = (0..self.seed.len())
            .into_par_iter()
            .map(|d| {
                let mut dir = KSeries::zero(&self.alg);
                for (a, ca) in c.iter().enumerate() {
                    if !ca.is_zero() {
                        dir = &dir + &(ca * &self.shifted[d][a]);
                    }
                }
                Ok(&(&self.seed[d] * &self.exponent(d, tau)?) * &dir)
            })
            .collect::<Result<_>>()?;
        Ok(crate::seed::assemble_k(&self.alg, &terms))
    }
}

/// Flows an arbitrary point `Σ f_d Q^d` to
/// `Σ f_d Q^d exp(ε Ψ(P q^d) / (1-q))`.
pub fn flow_point_k(point: &KSeries, psi: &PsiPoly, eps: &KSeries) -> Result<KSeries> {
    let alg = point.alg().clone();
    let slot = alg.nov_slot(0);
    let parts: Vec<KSeries> = (0..=alg.trunc().q_degree_cap as i16)
        .map(|d| point.filter(|m, _| m.0[slot] == d).shift(&Mono::unit(slot, -d)))
        .collect();
    FamilyK::new(&alg, parts, vec![psi.clone()])?.flow(std::slice::from_ref(eps))
}

/// Input `t(q) = Σ t_{k,α} q^k Ψ-basis element α` as the target `1 - q + t`.
pub fn input_target_k(alg: &Arc<Algebra>, t: &[(i32, usize, KSeries)]) -> KSeries {
    let mut acc = KSeries::constant(alg, one_minus_q());
    for (k, a, v) in t {
        acc = &acc + &v.embed(*a).scale_coeff(&RatFn::monomial(one(), *k));
    }
    acc
}

#[derive(Clone, Debug)]
pub struct MatchedK {
    pub tau: Vec<KSeries>,
    pub c: Vec<KSeries>,
    pub point: KSeries,
    pub iterations: usize,
}

/// Solves `[Σ c_α (1-q)∂_α I(τ)]_{Laurent} = target` for `τ` and the
/// Laurent-polynomial `c_α`.
///
/// Linearization `(δτ, δc) ↦ Σ (δτ_α + (1-q) δc_α) Ψ_α(P)`: a residual
/// coordinate `x(q)` splits as `δτ = x(1)`, `δc = (x - x(1)) / (1-q)`.
pub fn match_input_k(family: &FamilyK, target: &KSeries) -> Result<MatchedK> {
    let alg = family.alg().clone();
    let (_, reduced) = target.k_split();
    if !reduced.is_zero() {
        return Err(Error::InvalidArgument("matching target must be a Laurent polynomial in q".into()));
    }
    let t = target - &KSeries::constant(&alg, one_minus_q());
    if t.min_grade().is_some_and(|g| g <= 0) {
        return Err(Error::InvalidArgument(
            "input must lie in the maximal ideal (each term needs a formal variable or a positive Novikov degree)"
                .into(),
        ));
    }
    if family.psis().iter().any(|p| !p.is_q_free()) {
        return Err(Error::InvalidArgument("matching needs q-independent basis polynomials".into()));
    }
    let m: Vec<Vec<Rat>> = family.psis().iter().map(|p| p.coords(&alg)).collect();
    if m.len() != alg.rank() {
        return Err(Error::InvalidArgument("Ψ must have one element per basis vector".into()));
    }
    let minv = invert_rat_matrix(&m).ok_or_else(|| Error::InvalidArgument("Ψ is not a basis of the ring".into()))?;
    let rank = alg.rank();
    let mut tau = vec![KSeries::zero(&alg); rank];
    let mut c: Vec<KSeries> = (0..rank).map(|a| KSeries::constant(&alg, RatFn::constant(minv[0][a].clone()))).collect();
    let inv = inv_one_minus_q();
    let bound = alg.nilpotency_bound();
    for it in 0..=bound {
        let g = family.tangent_combination(&tau, &c)?;
        let r = &g.k_split().0 - target;
        if r.is_zero() {
            return Ok(MatchedK { tau, c, point: g, iterations: it });
        }
        let comps: Vec<KSeries> = (0..rank).map(|i| r.component(i)).collect();
        for a in 0..rank {
            let mut x = KSeries::zero(&alg);
            for (i, ci) in comps.iter().enumerate() {
                if !is_zero(&minv[i][a]) && !ci.is_zero() {
                    x = &x + &ci.scale(&minv[i][a]);
                }
            }
            let at_one = x.map_coeffs(|f| RatFn::constant(f.eval(&one()).expect("Laurent polynomial")));
            let rest = (&x - &at_one).map_coeffs(|f| f * &inv);
            tau[a] = &tau[a] - &at_one;
            c[a] = &c[a] - &rest;
        }
    }
    Err(Error::NonConvergent { iterations: bound })
}

/// The K-theoretic J-function at `target = 1 - q + t(q)`.
pub fn j_function_k(family: &FamilyK, target: &KSeries) -> Result<KSeries> {
    Ok(match_input_k(family, target)?.point)
}

/// `U_{αβ}` = coordinate `β` of `∂_α I^K(τ)`.
pub fn assemble_u_k(family: &FamilyK, tau: &[KSeries]) -> Result<KMat> {
    let inv = inv_one_minus_q();
    let rows = (0..family.rank())
        .map(|a| {
            let d = family.derivative(tau, a)?.scale_coeff(&inv);
            Ok((0..family.alg().rank()).map(|b| d.component(b)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(KMat { rows })
}

/// Where `W` equals the identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KNormalization {
    /// `W - I` reduced (vanishing at `q = ∞`).
    #[default]
    AtInfinity,
    /// `W(q = 0) = I`; `W` is then regular at both ends.
    AtZero,
}

/// Moves the constant `W(0)` from `W` into `V`.
pub fn renormalize_at_zero(f: &Factorization<RatFn>) -> Result<Factorization<RatFn>> {
    let w0 = f.w.try_map(|e| {
        let mut terms = Vec::new();
        for (k, c) in e.terms() {
            let v = c.at_zero().ok_or_else(|| Error::SingularLeadingTerm("W has a pole at q = 0".into()))?;
            terms.push((*k, RatFn::constant(v)));
        }
        Ok(KSeries::from_terms(e.alg(), terms))
    })?;
    Ok(Factorization { v: f.v.mul(&w0), w: w0.inverse()?.mul(&f.w), sweeps: f.sweeps })
}

/// `U = V W` for the family at its formal `τ` variables.
pub fn k_birkhoff(family: &FamilyK, norm: KNormalization) -> Result<(KMat, Factorization<RatFn>)> {
    let u = assemble_u_k(family, &family.tau_vars())?;
    let f = birkhoff_factorize_k(&u)?;
    let f = match norm {
        KNormalization::AtInfinity => f,
        KNormalization::AtZero => renormalize_at_zero(&f)?,
    };
    Ok((u, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{seed_terms_k, Target};

    fn family(n: usize, d: u32, vars: &[&str], t: u32) -> FamilyK {
        let alg = Target::ProjectiveK { n }.algebra(vars, d, t).unwrap();
        let seed = seed_terms_k(&alg).unwrap();
        FamilyK::new(&alg, seed, eps_basis(n)).unwrap()
    }

    fn q_over(num: &[i64], den_power: u32) -> RatFn {
        &RatFn::from_poly(Poly::from_ints(num)) * &inv_one_minus_q().pow(den_power)
    }

    #[test]
    fn small_j_is_the_seed() {
        for n in 2..=3 {
            let f = family(n, 2, &[], 0);
            let a = f.alg().clone();
            let m = match_input_k(&f, &input_target_k(&a, &[])).unwrap();
            assert!(m.tau.iter().all(|t| t.is_zero()));
            assert_eq!(m.c[0], KSeries::one(&a));
            assert_eq!(m.point, crate::seed::assemble_k(&a, f.seed()));
        }
    }

    #[test]
    fn cp1_degree_one_coefficient() {
        let f = family(2, 1, &[], 0);
        let a = f.alg().clone();
        let j = j_function_k(&f, &input_target_k(&a, &[])).unwrap();
        let q1 = Mono::unit(a.nov_slot(0), 1);
        // 1/(1-q) - 2(1-P) q/(1-q)^2
        assert_eq!(j.get(&q1, 0), q_over(&[1], 1));
        assert_eq!(j.get(&q1, 1), q_over(&[0, -2], 2));
    }

    #[test]
    fn tangent_direction_example() {
        let f = family(2, 1, &["tau1"], 1);
        let a = f.alg().clone();
        let zero = vec![KSeries::zero(&a); 2];
        let d = f.derivative(&zero, 1).unwrap();
        let q1 = Mono::unit(a.nov_slot(0), 1);
        // I_1 (1 - Pq) = 1 - (1-P) q/(1-q)
        let lhs = &KSeries::term(&a, Mono::ONE, 0, d.get(&q1, 0)) + &KSeries::term(&a, Mono::ONE, 1, d.get(&q1, 1));
        let expected = &KSeries::constant(&a, RatFn::one())
            - &KSeries::basis(&a, 1)
                .scale_coeff(&RatFn::from_polys(Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, -1])));
        assert_eq!(lhs, expected);
    }

    #[test]
    fn constant_input_leading_order() {
        let f = family(2, 1, &["s"], 1);
        let a = f.alg().clone();
        let s = KSeries::var(&a, "s").unwrap();
        let m = match_input_k(&f, &input_target_k(&a, &[(0, 1, s.clone())])).unwrap();
        assert_eq!(m.tau[1].truncate_def(1).truncate_novikov(0), s);
        let again = match_input_k(&f, &m.point.k_split().0).unwrap();
        assert_eq!(again.point, m.point);
    }

    #[test]
    fn k_birkhoff_on_cp1() {
        let f = family(2, 2, &["tau0", "tau1"], 2);
        let (u, fac) = k_birkhoff(&f, KNormalization::AtInfinity).unwrap();
        crate::birkhoff::check_factorization(&u, &fac).unwrap();
        let (_, at0) = k_birkhoff(&f, KNormalization::AtZero).unwrap();
        assert_eq!(at0.v.mul(&at0.w), u);
        for e in fac.w.rows.iter().flatten() {
            for ((_, _), c) in e.terms() {
                assert!(c.at_zero().is_some(), "W must be regular at q = 0");
            }
        }
    }

    #[test]
    fn k_birkhoff_one_by_one() {
        let a = Target::ProjectiveK { n: 2 }.algebra(&[], 0, 0).unwrap();
        let eps = KSeries::basis(&a, 1);
        let q = RatFn::monomial(one(), 1);
        let reduced = eps.scale_coeff(&(&q * &inv_one_minus_q()));
        let u = KMat { rows: vec![vec![&KSeries::one(&a) + &reduced]] };
        // W - I reduced: V = 1 - ε, W = 1 + ε/(1-q)
        let f = birkhoff_factorize_k(&u).unwrap();
        let one_k = KSeries::one(&a);
        assert_eq!(f.v.rows[0][0], &one_k - &eps);
        assert_eq!(f.w.rows[0][0], &one_k + &eps.scale_coeff(&inv_one_minus_q()));
        // W(0) = I: U is already of that form
        let g = renormalize_at_zero(&f).unwrap();
        assert_eq!(g.v, KMat::identity(&a, 1));
        assert_eq!(g.w, u);

        let u = KMat { rows: vec![vec![&KSeries::constant(&a, q) + &eps.scale_coeff(&inv_one_minus_q())]] };
        let f = birkhoff_factorize_k(&u).unwrap();
        crate::birkhoff::check_factorization(&u, &f).unwrap();
        assert!(f.w.rows[0][0].terms().values().all(|c| c.at_zero().is_some()));
    }

    #[test]
    fn flow_invariance_k() {
        let f = family(2, 2, &["s", "e"], 2);
        let a = f.alg().clone();
        let s = KSeries::var(&a, "s").unwrap();
        let e = KSeries::var(&a, "e").unwrap();
        let m = match_input_k(&f, &input_target_k(&a, &[(1, 1, s)])).unwrap();
        let g = flow_point_k(&m.point, &PsiPoly::power(1), &e).unwrap();
        let again = match_input_k(&f, &g.k_split().0).unwrap();
        assert_eq!(again.point.k_split().1, g.k_split().1);
    }
}
