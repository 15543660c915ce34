//! Seed points of the cones: the hypergeometric series `Σ I_d Q^d` for
//! projective spaces, their torus-equivariant and local (twisted) versions,
//! and the K-theoretic `q`-hypergeometric series.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfn::RatFn;
use crate::rational::{int, Rat};
use crate::ring::{equivariant_projective_ring, ktheory_projective_ring, projective_ring, RingPresentation};
use crate::series::{Algebra, HSeries, KSeries, LambdaMode, Mono, Truncation};

/// `a·p + b·λ_j + c + m·r·z`, evaluated at each `r` of a [`FactorRange`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFactor {
    pub p: i64,
    /// `(j, b)`
    pub lambda: Option<(usize, i64)>,
    pub constant: i64,
    pub z_per_r: i64,
}

/// `∏_{r = r_start}^{r_end_per_d·d + r_end_offset} factor(r)^exponent`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRange {
    pub factor: LinearFactor,
    pub r_start: i64,
    pub r_end_per_d: i64,
    pub r_end_offset: i64,
    pub exponent: i32,
}

/// Recipe for `I_d = -z · ∏ factors`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub name: String,
    pub factors: Vec<FactorRange>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Validation("n must be ≥ 1".into()));
    }
    Ok(())
}

/// `I_d = -z / ∏_{r=1}^d (p - rz)^n` for `CP^{n-1}`.
pub fn projective_seed(n: usize) -> Result<SeedSpec> {
    check_n(n)?;
    Ok(SeedSpec {
        name: format!("projective-{n}"),
        factors: vec![FactorRange {
            factor: LinearFactor { p: 1, lambda: None, constant: 0, z_per_r: -1 },
            r_start: 1,
            r_end_per_d: 1,
            r_end_offset: 0,
            exponent: -(n as i32),
        }],
    })
}

/// `I_d = -z / ∏_j ∏_{r=1}^d (p - λ_j - rz)`; fractions are expanded in
/// `z^{-1}` with `λ` truncated.
pub fn equivariant_seed(n: usize) -> Result<SeedSpec> {
    check_n(n)?;
    Ok(SeedSpec {
        name: format!("equivariant-{n}"),
        factors: (0..n)
            .map(|j| FactorRange {
                factor: LinearFactor { p: 1, lambda: Some((j, -1)), constant: 0, z_per_r: -1 },
                r_start: 1,
                r_end_per_d: 1,
                r_end_offset: 0,
                exponent: -1,
            })
            .collect(),
    })
}

/// Local theory of `O(l) → CP^{n-1}`:
/// `I_d = -z / (∏_{r=0}^{ld} (lp + λ - rz) ∏_{r=1}^d (p - rz)^n)`.
///
/// The `(lp + λ - rz)^{-1}` are power series in `z` with Laurent
/// coefficients in `λ`. With `normalized`, the `r = 0` factor is dropped so
/// that `I_0 = -z`: the whole family is multiplied by the constant unit
/// `lp + λ`.
pub fn local_seed(n: usize, l: i64, normalized: bool) -> Result<SeedSpec> {
    check_n(n)?;
    if l <= 0 {
        return Err(Error::Validation("local seed needs l > 0".into()));
    }
    Ok(SeedSpec {
        name: format!("local-{n}-{l}{}", if normalized { "" } else { "-raw" }),
        factors: vec![
            FactorRange {
                factor: LinearFactor { p: l, lambda: Some((0, 1)), constant: 0, z_per_r: -1 },
                r_start: if normalized { 1 } else { 0 },
                r_end_per_d: l,
                r_end_offset: 0,
                exponent: -1,
            },
            FactorRange {
                factor: LinearFactor { p: 1, lambda: None, constant: 0, z_per_r: -1 },
                r_start: 1,
                r_end_per_d: 1,
                r_end_offset: 0,
                exponent: -(n as i32),
            },
        ],
    })
}

fn factor_value(alg: &Arc<Algebra>, p: &HSeries, f: &LinearFactor, r: i64) -> HSeries {
    let mut v = p.scale(&int(f.p));
    if let Some((j, b)) = f.lambda {
        v = &v + &HSeries::lambda(alg, j, 1).scale(&int(b));
    }
    v = &v + &HSeries::constant(alg, int(f.constant));
    &v + &HSeries::z_power(alg, 1, int(f.z_per_r * r))
}

/// `I_d` of the seed, exactly, in the given algebra.
pub fn seed_eval(spec: &SeedSpec, alg: &Arc<Algebra>, d: u32) -> Result<HSeries> {
    if d > alg.trunc().q_degree_cap {
        return Err(Error::InvalidArgument(format!("degree {d} exceeds the Novikov cap")));
    }
    let p = HSeries::from_ring_elem(alg, &alg.ring().hyperplane());
    let mut acc = HSeries::z_power(alg, 1, int(-1));
    for range in &spec.factors {
        let end = range.r_end_per_d * d as i64 + range.r_end_offset;
        for r in range.r_start..=end {
            let v = factor_value(alg, &p, &range.factor, r);
            let base = if range.exponent < 0 {
                v.invert_unit().map_err(|e| Error::NonUnit(format!("factor at r={r}: {e}")))?
            } else {
                v
            };
            acc = &acc * &base.pow(range.exponent.unsigned_abs());
        }
    }
    Ok(acc)
}

/// All `I_d`, `d = 0..=D`, evaluated in parallel.
pub fn seed_terms(spec: &SeedSpec, alg: &Arc<Algebra>) -> Result<Vec<HSeries>> {
    (0..=alg.trunc().q_degree_cap).into_par_iter().map(|d| seed_eval(spec, alg, d)).collect()
}

/// `Σ_d I_d Q^d` as one series.
pub fn assemble(alg: &Arc<Algebra>, terms: &[HSeries]) -> HSeries {
    let mut acc = HSeries::zero(alg);
    for (d, t) in terms.iter().enumerate() {
        acc = &acc + &t.shift(&Mono::unit(alg.nov_slot(0), d as i16));
    }
    acc
}

/// `I^K_d = (1-q) / ∏_{r=1}^d (1 - P q^r)^n` in `Q[P]/((1-P)^n)`.
pub fn seed_eval_k(alg: &Arc<Algebra>, d: u32) -> Result<KSeries> {
    let n = alg.ring().n;
    let pk = KSeries::from_ring_elem(alg, &alg.ring().hyperplane());
    let one_minus_q = RatFn::from_poly(Poly::from_ints(&[1, -1]));
    let mut acc = KSeries::constant(alg, one_minus_q);
    for r in 1..=d as i32 {
        let f = &KSeries::one(alg) - &pk.scale_coeff(&RatFn::monomial(int(1), r));
        let inv = f.invert_unit()?;
        acc = &acc * &inv.pow(n as u32);
    }
    Ok(acc)
}

pub fn seed_terms_k(alg: &Arc<Algebra>) -> Result<Vec<KSeries>> {
    (0..=alg.trunc().q_degree_cap).into_par_iter().map(|d| seed_eval_k(alg, d)).collect()
}

pub fn assemble_k(alg: &Arc<Algebra>, terms: &[KSeries]) -> KSeries {
    let mut acc = KSeries::zero(alg);
    for (d, t) in terms.iter().enumerate() {
        acc = &acc + &t.shift(&Mono::unit(alg.nov_slot(0), d as i16));
    }
    acc
}

/// The supported targets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Target {
    /// `CP^{n-1}`
    Projective { n: usize },
    /// `CP^{n-1}` in quantum K-theory
    ProjectiveK { n: usize },
    /// `T^n`-equivariant `CP^{n-1}`
    Equivariant { n: usize, lambda_order: u32 },
    /// total space of `O(l) → CP^{n-1}`
    Local { n: usize, l: i64, lambda_order: u32 },
}

impl Target {
    pub fn n(&self) -> usize {
        match *self {
            Target::Projective { n } | Target::ProjectiveK { n } => n,
            Target::Equivariant { n, .. } | Target::Local { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n())?;
        if let Target::Local { l, .. } = *self {
            if l <= 0 {
                return Err(Error::Validation("local target needs l > 0".into()));
            }
        }
        if self.n() > 6 {
            return Err(Error::Validation("n must be ≤ 6".into()));
        }
        Ok(())
    }

    pub fn is_k(&self) -> bool {
        matches!(self, Target::ProjectiveK { .. })
    }

    pub fn ring(&self) -> Result<RingPresentation> {
        self.validate()?;
        match *self {
            Target::Projective { n } | Target::Local { n, .. } => projective_ring(n),
            Target::ProjectiveK { n } => ktheory_projective_ring(n),
            Target::Equivariant { n, .. } => equivariant_projective_ring(n),
        }
    }

    pub fn lambda_mode(&self) -> LambdaMode {
        match self {
            Target::Equivariant { .. } => LambdaMode::Power,
            Target::Local { .. } => LambdaMode::Laurent,
            _ => LambdaMode::None,
        }
    }

    pub fn lambda_order(&self) -> u32 {
        match *self {
            Target::Equivariant { lambda_order, .. } | Target::Local { lambda_order, .. } => lambda_order,
            _ => 0,
        }
    }

    /// Algebra for this target; the `λ`-order of the truncation is taken
    /// from the target.
    pub fn algebra(&self, def_vars: &[&str], q_cap: u32, def_cap: u32) -> Result<Arc<Algebra>> {
        let trunc = Truncation::new(q_cap, def_cap).with_lambda_order(self.lambda_order());
        Algebra::new(Arc::new(self.ring()?), def_vars, self.lambda_mode(), trunc)
    }

    /// Seed recipe (cohomological targets); local seeds are normalized.
    pub fn seed(&self) -> Result<SeedSpec> {
        self.validate()?;
        match *self {
            Target::Projective { n } => projective_seed(n),
            Target::Equivariant { n, .. } => equivariant_seed(n),
            Target::Local { n, l, .. } => local_seed(n, l, true),
            Target::ProjectiveK { .. } => {
                Err(Error::InvalidArgument("K-theoretic target has no cohomological seed".into()))
            }
        }
    }
}

/// Scalar `Σ_k c_k q^k` helper used by tests and examples.
pub fn laurent(terms: &[(i32, Rat)]) -> RatFn {
    terms.iter().fold(RatFn::zero(), |acc, (k, c)| &acc + &RatFn::monomial(c.clone(), *k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn alg(n: usize, d: u32) -> Arc<Algebra> {
        Target::Projective { n }.algebra(&[], d, 0).unwrap()
    }

    fn h(a: &Arc<Algebra>, terms: &[(i16, usize, Rat)]) -> HSeries {
        HSeries::from_terms(a, terms.iter().map(|(z, comp, c)| ((a.mono_z(*z), *comp as u8), c.clone())))
    }

    #[test]
    fn cp1_degree_one() {
        let a = alg(2, 2);
        let s = projective_seed(2).unwrap();
        assert_eq!(seed_eval(&s, &a, 0).unwrap(), h(&a, &[(1, 0, int(-1))]));
        assert_eq!(seed_eval(&s, &a, 1).unwrap(), h(&a, &[(-1, 0, int(-1)), (-2, 1, int(-2))]));
    }

    #[test]
    fn cp2_degree_one() {
        let a = alg(3, 1);
        let s = projective_seed(3).unwrap();
        let expected = h(&a, &[(-2, 0, int(1)), (-3, 1, int(3)), (-4, 2, int(6))]);
        assert_eq!(seed_eval(&s, &a, 1).unwrap(), expected);
    }

    #[test]
    fn local_r0_factor() {
        // (p + λ)^{-1} = λ^{-1} - p λ^{-2}
        let t = Target::Local { n: 2, l: 1, lambda_order: 4 };
        let a = t.algebra(&[], 1, 0).unwrap();
        let p = HSeries::basis(&a, 1);
        let f = &p + &HSeries::lambda(&a, 0, 1);
        let expected = &HSeries::lambda(&a, 0, -1) - &(&p * &HSeries::lambda(&a, 0, -2));
        assert_eq!(f.invert_unit().unwrap(), expected);
        let raw = seed_eval(&local_seed(2, 1, false).unwrap(), &a, 0).unwrap();
        assert_eq!(&raw * &f, HSeries::z_power(&a, 1, int(-1)));
    }

    #[test]
    fn local_seed_rejects_concave() {
        assert!(local_seed(2, 0, true).is_err());
        assert!(local_seed(2, -1, true).is_err());
        assert!(projective_seed(0).is_err());
    }

    #[test]
    fn k_seed_cp1() {
        let a = Target::ProjectiveK { n: 2 }.algebra(&[], 1, 0).unwrap();
        let i1 = seed_eval_k(&a, 1).unwrap();
        let first = RatFn::from_polys(Poly::one(), Poly::from_ints(&[1, -1]));
        let second = RatFn::from_polys(Poly::from_ints(&[0, -2]), Poly::from_ints(&[1, -2, 1]));
        let expected = &KSeries::constant(&a, first) + &KSeries::basis(&a, 1).scale_coeff(&second);
        assert_eq!(i1, expected);
        let pt = Target::ProjectiveK { n: 1 }.algebra(&[], 1, 0).unwrap();
        assert_eq!(seed_eval_k(&pt, 1).unwrap(), KSeries::one(&pt));
        assert_eq!(seed_eval_k(&a, 0).unwrap(), KSeries::constant(&a, laurent(&[(0, int(1)), (1, int(-1))])));
        let _ = rat(1, 2);
    }
}
