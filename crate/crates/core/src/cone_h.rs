//! Reconstruction on the cohomological cone: the divisor-flow family
//! `I(τ) = Σ I_d Q^d exp(Σ τ_α Φ_α(p - zd)/z)`, its tangent combinations
//! `Σ c_α(z) z∂_α I`, and the matching that recovers the big J-function.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{int, is_zero, zero, Rat};
use crate::ring::invert_rat_matrix;
use crate::series::{Algebra, HSeries, Mono};

/// `Σ c · z^k p^j`, stored as `(j, k, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiPoly {
    pub terms: Vec<(u32, u32, Rat)>,
}

impl PhiPoly {
    /// `p^j`
    pub fn monomial(j: u32) -> Self {
        PhiPoly { terms: vec![(j, 0, int(1))] }
    }

    /// `Σ_j c_j p^j`
    pub fn from_p_coeffs(c: &[Rat]) -> Self {
        PhiPoly {
            terms: c.iter().enumerate().filter(|(_, x)| !is_zero(x)).map(|(j, x)| (j as u32, 0, x.clone())).collect(),
        }
    }

    pub fn is_z_free(&self) -> bool {
        self.terms.iter().all(|(_, k, _)| *k == 0)
    }

    /// `Φ(p - zd)` as a ring-valued polynomial in `z`.
    pub fn eval_shifted(&self, alg: &Arc<Algebra>, d: i64) -> HSeries {
        let p = HSeries::from_ring_elem(alg, &alg.ring().hyperplane());
        let shifted = &p - &HSeries::z_power(alg, 1, int(d));
        let max_j = self.terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut powers = vec![HSeries::one(alg)];
        for j in 1..=max_j as usize {
            let next = &powers[j - 1] * &shifted;
            powers.push(next);
        }
        let mut acc = HSeries::zero(alg);
        for (j, k, c) in &self.terms {
            acc = &acc + &powers[*j as usize].z_shift(*k as i16).scale(c);
        }
        acc
    }

    /// Coordinates of `Φ(p)` (`z = 0`, `λ = 0`) in the ring basis.
    pub fn coords(&self, alg: &Arc<Algebra>) -> Vec<Rat> {
        let v = self.eval_shifted(alg, 0).z_coeff(0);
        let rank = alg.rank();
        let mut out = vec![zero(); rank];
        for ((m, comp), c) in v.terms() {
            if *m == Mono::ONE {
                out[*comp as usize] += c;
            }
        }
        out
    }
}

/// `1, p, ..., p^{n-1}`
pub fn monomial_basis(n: usize) -> Vec<PhiPoly> {
    (0..n as u32).map(PhiPoly::monomial).collect()
}

/// Basis given by rows of coordinates with respect to `1, p, ..., p^{n-1}`.
pub fn basis_from_matrix(m: &[Vec<Rat>]) -> Vec<PhiPoly> {
    m.iter().map(|row| PhiPoly::from_p_coeffs(row)).collect()
}

/// Name of the `α`-th flow parameter.
pub fn tau_name(alpha: usize) -> String {
    format!("tau{alpha}")
}

/// Name of the `α`-th flat coordinate.
pub fn t_name(alpha: usize) -> String {
    format!("t{alpha}")
}

/// The family `Σ I_d Q^d exp(s Σ τ_α Φ_α(p - zd)/z)`, `s = ±1`.
///
/// `s = +1` is the family of the reconstruction theorem; `s = -1` the
/// convention under which the first row of the Birkhoff factor reads
/// `1 - z^{-1} Σ Φ_α τ_α + ...`.
#[derive(Clone, Debug)]
pub struct Family {
    alg: Arc<Algebra>,
    seed: Vec<HSeries>,
    phis: Vec<PhiPoly>,
    shifted: Vec<Vec<HSeries>>,
    sign: i64,
}

impl Family {
    pub fn new(alg: &Arc<Algebra>, seed: Vec<HSeries>, phis: Vec<PhiPoly>) -> Result<Self> {
        if seed.is_empty() {
            return Err(Error::InvalidArgument("empty seed".into()));
        }
        if seed.iter().any(|s| !Arc::ptr_eq(s.alg(), alg)) {
            return Err(Error::RingMismatch);
        }
        let shifted = (0..seed.len() as i64).map(|d| phis.iter().map(|f| f.eval_shifted(alg, d)).collect()).collect();
        Ok(Family { alg: alg.clone(), seed, phis, shifted, sign: 1 })
    }

    pub fn with_sign(mut self, sign: i64) -> Self {
        assert!(sign == 1 || sign == -1);
        self.sign = sign;
        self
    }

    pub fn alg(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn seed(&self) -> &[HSeries] {
        &self.seed
    }

    pub fn phis(&self) -> &[PhiPoly] {
        &self.phis
    }

    pub fn sign(&self) -> i64 {
        self.sign
    }

    pub fn rank(&self) -> usize {
        self.phis.len()
    }

    /// `τ_α` as deformation variables where present, zero otherwise.
    pub fn tau_vars(&self) -> Vec<HSeries> {
        (0..self.rank())
            .map(|a| HSeries::var(&self.alg, &tau_name(a)).unwrap_or_else(|_| HSeries::zero(&self.alg)))
            .collect()
    }

    /// `Φ_α(p - zd)`
    pub fn shifted_phi(&self, d: usize, alpha: usize) -> &HSeries {
        &self.shifted[d][alpha]
    }

    fn exponential(&self, d: usize, tau: &[HSeries]) -> Result<HSeries> {
        let mut e = HSeries::zero(&self.alg);
        for (a, t) in tau.iter().enumerate() {
            if !t.is_zero() {
                e = &e + &(t * &self.shifted[d][a]);
            }
        }
        if e.is_zero() {
            return Ok(HSeries::one(&self.alg));
        }
        e.scale(&int(self.sign)).exp_divided_z()
    }

    /// Per-degree values `I_d exp(...)` of the flowed family.
    pub fn flow_terms(&self, tau: &[HSeries]) -> Result<Vec<HSeries>> {
        self.check_tau(tau)?;
        (0..self.seed.len()).into_par_iter().map(|d| Ok(&self.seed[d] * &self.exponential(d, tau)?)).collect()
    }

    /// `I(τ)` for the given parameter values.
    pub fn flow(&self, tau: &[HSeries]) -> Result<HSeries> {
        let terms = self.flow_terms(tau)?;
        Ok(sum_degrees(&self.alg, &terms))
    }

    /// `∂_α I(τ) = s (1/z) Σ I_d Q^d exp(...) Φ_α(p - zd)`
    pub fn derivative(&self, tau: &[HSeries], alpha: usize) -> Result<HSeries> {
        let terms = self.flow_terms(tau)?;
        let per: Vec<HSeries> =
            terms.iter().enumerate().map(|(d, t)| (t * &self.shifted[d][alpha]).z_shift(-1)).collect();
        Ok(sum_degrees(&self.alg, &per).scale(&int(self.sign)))
    }

    /// `Σ_α c_α(z) z∂_α I(τ)`
    pub fn tangent_combination(&self, tau: &[HSeries], c: &[HSeries]) -> Result<HSeries> {
        if c.len() != self.rank() {
            return Err(Error::InvalidArgument("one coefficient per basis element expected".into()));
        }
        let terms = self.flow_terms(tau)?;
        let per: Vec<HSeries> = terms
            .par_iter()
            .enumerate()
            .map(|(d, t)| {
                let mut comb = HSeries::zero(&self.alg);
                for (a, ca) in c.iter().enumerate() {
                    if !ca.is_zero() {
                        comb = &comb + &(ca * &self.shifted[d][a]);
                    }
                }
                t * &comb
            })
            .collect();
        Ok(sum_degrees(&self.alg, &per).scale(&int(self.sign)))
    }

    fn check_tau(&self, tau: &[HSeries]) -> Result<()> {
        if tau.len() != self.rank() {
            return Err(Error::InvalidArgument("one parameter per basis element expected".into()));
        }
        if tau.iter().any(|t| t.min_grade().is_some_and(|g| g <= 0)) {
            return Err(Error::InvalidArgument("flow parameters must lie in the maximal ideal".into()));
        }
        Ok(())
    }
}

/// `Σ_d Q^d terms[d]`
pub fn sum_degrees(alg: &Arc<Algebra>, terms: &[HSeries]) -> HSeries {
    let mut acc = HSeries::zero(alg);
    for (d, t) in terms.iter().enumerate() {
        acc = &acc + &t.shift(&Mono::unit(alg.nov_slot(0), d as i16));
    }
    acc
}

/// Inverse of [`sum_degrees`]: the coefficient of each `Q^d`, `d ≤ D`.
pub fn split_degrees(point: &HSeries) -> Vec<HSeries> {
    let alg = point.alg().clone();
    let slot = alg.nov_slot(0);
    (0..=alg.trunc().q_degree_cap as i16)
        .map(|d| {
            let part = point.filter(|m, _| m.0[slot] == d);
            part.shift(&Mono::unit(slot, -d))
        })
        .collect()
}

/// Flows an arbitrary point `Σ f_d Q^d` to `Σ f_d Q^d exp(ε Φ(p - zd)/z)`.
pub fn flow_point(point: &HSeries, phi: &PhiPoly, eps: &HSeries) -> Result<HSeries> {
    let alg = point.alg().clone();
    Family::new(&alg, split_degrees(point), vec![phi.clone()])?.flow(std::slice::from_ref(eps))
}

/// Outcome of [`match_input`].
#[derive(Clone, Debug)]
pub struct Matched {
    pub tau: Vec<HSeries>,
    pub c: Vec<HSeries>,
    pub point: HSeries,
    pub iterations: usize,
}

/// Input `t(z) = Σ t_{k,α} z^k φ_α` as the target `-z + t(z)` of matching.
pub fn input_target(alg: &Arc<Algebra>, t: &[(u32, usize, HSeries)]) -> HSeries {
    let mut acc = HSeries::z_power(alg, 1, int(-1));
    for (k, a, v) in t {
        acc = &acc + &v.embed(*a).z_shift(*k as i16);
    }
    acc
}

/// Solves `[Σ c_α z∂_α I(τ)]_+ = target` for `τ` and `c`, order by order in
/// the filtration (Novikov + deformation + `λ` degree).
///
/// Each sweep corrects the residual through the leading-order linearization
/// `(δτ, δc) ↦ -s Σ (δτ_α + z δc_α(z)) Φ_α(p)`, so the solution is exact up
/// to one more filtration order per sweep.
pub fn match_input(family: &Family, target: &HSeries) -> Result<Matched> {
    let alg = family.alg().clone();
    let s = int(family.sign());
    if !target.h_minus().is_zero() {
        return Err(Error::InvalidArgument("matching target must lie in H_+".into()));
    }
    let t = target - &HSeries::z_power(&alg, 1, int(-1));
    if t.min_grade().is_some_and(|g| g <= 0) {
        return Err(Error::InvalidArgument(
            "input must lie in the maximal ideal (each term needs a formal variable or a positive Novikov degree)"
                .into(),
        ));
    }
    if family.phis().iter().any(|f| !f.is_z_free()) {
        return Err(Error::InvalidArgument("matching needs z-independent basis polynomials".into()));
    }
    let m: Vec<Vec<Rat>> = family.phis().iter().map(|f| f.coords(&alg)).collect();
    if m.len() != alg.rank() {
        return Err(Error::InvalidArgument("Φ must have one element per basis vector".into()));
    }
    let minv = invert_rat_matrix(&m).ok_or_else(|| Error::InvalidArgument("Φ is not a basis of the ring".into()))?;
    let rank = alg.rank();
    let mut tau = vec![HSeries::zero(&alg); rank];
    // 1 = Σ_α minv[0][α] Φ_α
    let mut c: Vec<HSeries> = (0..rank).map(|a| HSeries::constant(&alg, &minv[0][a] * &s)).collect();
    let bound = alg.nilpotency_bound();
    for it in 0..=bound {
        let g = family.tangent_combination(&tau, &c)?;
        let r = &g.h_plus() - target;
        if r.is_zero() {
            return Ok(Matched { tau, c, point: g, iterations: it });
        }
        let comps: Vec<HSeries> = (0..rank).map(|i| r.component(i)).collect();
        for a in 0..rank {
            let mut x = HSeries::zero(&alg);
            for (i, ci) in comps.iter().enumerate() {
                if !is_zero(&minv[i][a]) && !ci.is_zero() {
                    x = &x + &ci.scale(&minv[i][a]);
                }
            }
            let x0 = x.z_coeff(0);
            let x_rest = (&x - &x0).z_shift(-1);
            tau[a] = &tau[a] + &x0.scale(&s);
            c[a] = &c[a] + &x_rest.scale(&s);
        }
    }
    Err(Error::NonConvergent { iterations: bound })
}

/// The big J-function at the input `target = -z + t(z)`.
pub fn j_function(family: &Family, target: &HSeries) -> Result<HSeries> {
    Ok(match_input(family, target)?.point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{projective_seed, seed_terms, Target};

    fn family(n: usize, d: u32, vars: &[&str], t: u32) -> Family {
        let alg = Target::Projective { n }.algebra(vars, d, t).unwrap();
        let seed = seed_terms(&projective_seed(n).unwrap(), &alg).unwrap();
        Family::new(&alg, seed, monomial_basis(n)).unwrap()
    }

    #[test]
    fn flow_first_order() {
        let f = family(2, 1, &["tau0", "tau1"], 1);
        let a = f.alg().clone();
        let i = f.flow(&f.tau_vars()).unwrap();
        let q0 = split_degrees(&i)[0].clone();
        let tau0 = HSeries::var(&a, "tau0").unwrap();
        let tau1 = HSeries::var(&a, "tau1").unwrap();
        let expected = &(&HSeries::z_power(&a, 1, int(-1)) - &tau0) - &(&tau1 * &HSeries::basis(&a, 1));
        assert_eq!(q0, expected);
        let zero = vec![HSeries::zero(&a); 2];
        assert_eq!(f.flow(&zero).unwrap(), sum_degrees(&a, f.seed()));
    }

    #[test]
    fn tangent_of_p_direction() {
        let f = family(2, 1, &[], 0);
        let a = f.alg().clone();
        let zero = vec![HSeries::zero(&a); 2];
        let c = vec![HSeries::zero(&a), HSeries::one(&a)];
        let comb = f.tangent_combination(&zero, &c).unwrap();
        let q1 = split_degrees(&comb)[1].clone();
        assert_eq!(q1, &HSeries::one(&a) + &HSeries::basis(&a, 1).z_shift(-1));
        // paired with the dual of p
        let dual = a.ring().dual_basis(0).unwrap();
        assert_eq!(q1.pair_with(&dual[1]), HSeries::z_power(&a, -1, int(1)));
        let c0 = vec![HSeries::one(&a), HSeries::zero(&a)];
        assert_eq!(f.tangent_combination(&zero, &c0).unwrap(), sum_degrees(&a, f.seed()));
    }

    #[test]
    fn small_j_function_is_the_seed() {
        for n in 2..=4 {
            let f = family(n, 3, &[], 0);
            let a = f.alg().clone();
            let m = match_input(&f, &HSeries::z_power(&a, 1, int(-1))).unwrap();
            assert!(m.tau.iter().all(|t| t.is_zero()));
            assert_eq!(m.c[0], HSeries::one(&a));
            assert!(m.c[1..].iter().all(|c| c.is_zero()));
            assert_eq!(m.point, sum_degrees(&a, f.seed()));
        }
    }

    #[test]
    fn constant_input_matches_tau0() {
        let f = family(3, 1, &["s"], 1);
        let a = f.alg().clone();
        let s = HSeries::var(&a, "s").unwrap();
        let m = match_input(&f, &input_target(&a, &[(0, 0, s.clone())])).unwrap();
        assert_eq!(m.tau[0].truncate_def(1), s.neg());
        // in the opposite sign convention τ_0 = s
        let g = f.clone().with_sign(-1);
        let m = match_input(&g, &input_target(&a, &[(0, 0, s.clone())])).unwrap();
        assert_eq!(m.tau[0].truncate_def(1), s);
    }

    #[test]
    fn rejects_non_formal_input() {
        let f = family(2, 1, &[], 0);
        let a = f.alg().clone();
        let bad = input_target(&a, &[(0, 1, HSeries::one(&a))]);
        assert!(matches!(match_input(&f, &bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn equivariant_degenerates() {
        let eq = Target::Equivariant { n: 2, lambda_order: 3 };
        let ea = eq.algebra(&[], 3, 0).unwrap();
        let ef = Family::new(&ea, seed_terms(&eq.seed().unwrap(), &ea).unwrap(), monomial_basis(2)).unwrap();
        let ej = j_function(&ef, &input_target(&ea, &[])).unwrap();
        let f = family(2, 3, &[], 0);
        let j = j_function(&f, &input_target(f.alg(), &[])).unwrap();
        assert_eq!(ej.at_lambda_zero().to_string(), j.to_string());
        assert_ne!(ej.to_string(), j.to_string());
    }
}
