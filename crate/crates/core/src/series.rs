//! Truncated multivariate series over a finite-rank coefficient ring.
//!
//! A [`Series`] is a finite sum of terms `c · z^k Q^d λ^e t^a · b_i` where
//! `b_i` is a basis vector of the coefficient ring, `Q^d` a Novikov monomial,
//! `λ^e` a monomial in equivariant parameters, `t^a` a monomial in the
//! deformation variables (the `τ_α`, `t_{k,α}`, flow parameters, ...) and
//! `c` a coefficient. With `C = Rat` the `z`-exponent lives in the monomial and
//! the series is a point of the cohomological loop space; with `C = RatFn`
//! the coefficient is a rational function of `q` and the `z` slot is unused.
//!
//! Every series belongs to an [`Algebra`]: ring, variable layout and
//! [`Truncation`] ledger. Results are always reduced to the ledger: total
//! Novikov degree `≤ D`, total deformation degree `≤ T`, and `λ`-degree `≤ L`
//! (power mode) or `λ`-exponent `≥ -L` (Laurent mode). The reduction is by an
//! ideal, so products never consult discarded orders. `z` is never
//! truncated: at fixed `(Q, t, λ)`-order every object built here is a finite
//! Laurent polynomial in `z`, and the `z_window` only bounds what reports
//! and comparisons look at.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfn::RatFn;
use crate::rational::{self, is_one, is_zero, one, recip, zero, Rat};
use crate::ring::{LamPoly, RingElem, RingPresentation};

pub const SLOTS: usize = 16;

/// Exponent vector over the algebra's variable layout.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub [i16; SLOTS]);

impl Mono {
    pub const ONE: Mono = Mono([0; SLOTS]);

    pub fn unit(slot: usize, e: i16) -> Mono {
        let mut m = Mono::ONE;
        m.0[slot] = e;
        m
    }

    #[inline]
    pub fn add(&self, o: &Mono) -> Mono {
        let mut out = [0i16; SLOTS];
        for i in 0..SLOTS {
            out[i] = self.0[i].checked_add(o.0[i]).expect("exponent overflow");
        }
        Mono(out)
    }

    pub fn neg(&self) -> Mono {
        let mut out = self.0;
        for x in out.iter_mut() {
            *x = -*x;
        }
        Mono(out)
    }

    pub fn with(mut self, slot: usize, e: i16) -> Mono {
        self.0[slot] = e;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaMode {
    /// No equivariant parameters.
    None,
    /// Parameters of the ring, power series truncated at total degree `L`.
    Power,
    /// One parameter `λ` with Laurent coefficients, exponents `≥ -L`.
    /// Only non-positive exponents may be produced by arithmetic.
    Laurent,
}

/// The order ledger that makes every computation finite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub q_degree_cap: u32,
    pub def_degree_cap: u32,
    /// `(M, N)`: reports and comparisons look at `z^{-M} .. z^{N}`.
    pub z_window: (u32, u32),
    pub lambda_order: u32,
}

impl Truncation {
    pub fn new(q_degree_cap: u32, def_degree_cap: u32) -> Self {
        Truncation { q_degree_cap, def_degree_cap, z_window: (64, 64), lambda_order: 0 }
    }

    pub fn with_z_window(mut self, m: u32, n: u32) -> Self {
        self.z_window = (m, n);
        self
    }

    pub fn with_lambda_order(mut self, l: u32) -> Self {
        self.lambda_order = l;
        self
    }
}

/// Coefficient ring, variable layout and truncation ledger shared by all
/// series taking part in one computation.
pub struct Algebra {
    ring: Arc<RingPresentation>,
    def_vars: Vec<String>,
    lambda_mode: LambdaMode,
    n_lambda: usize,
    trunc: Truncation,
    lam_start: usize,
    def_start: usize,
    table: Vec<Vec<Vec<(usize, Mono, Rat)>>>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("ring", &self.ring.labels)
            .field("def_vars", &self.def_vars)
            .field("lambda_mode", &self.lambda_mode)
            .field("trunc", &self.trunc)
            .finish()
    }
}

impl Algebra {
    /// Deformation variables are stored in lexicographic order.
    pub fn new(
        ring: Arc<RingPresentation>,
        def_vars: &[&str],
        lambda_mode: LambdaMode,
        trunc: Truncation,
    ) -> Result<Arc<Algebra>> {
        let n_lambda = match lambda_mode {
            LambdaMode::None => {
                if ring.n_lambda > 0 {
                    return Err(Error::InvalidArgument("equivariant ring needs a λ mode".into()));
                }
                0
            }
            LambdaMode::Power => ring.n_lambda,
            LambdaMode::Laurent => {
                if ring.n_lambda > 0 {
                    return Err(Error::InvalidArgument("Laurent-λ mode takes a non-equivariant ring".into()));
                }
                1
            }
        };
        let mut vars: Vec<String> = def_vars.iter().map(|s| s.to_string()).collect();
        vars.sort();
        vars.dedup();
        let r = ring.novikov_rank;
        let lam_start = 1 + r;
        let def_start = lam_start + n_lambda;
        if def_start + vars.len() > SLOTS {
            return Err(Error::InvalidArgument(format!(
                "too many variables: {} slots available for deformation variables",
                SLOTS - def_start
            )));
        }
        let rank = ring.rank();
        let mut table = vec![vec![Vec::new(); rank]; rank];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for (k, lp) in ring.products[i][j].coords.iter().enumerate() {
                    for (e, c) in lp {
                        let mut m = Mono::ONE;
                        if lambda_mode == LambdaMode::Power {
                            for (s, &x) in e.iter().enumerate() {
                                m.0[lam_start + s] = x as i16;
                            }
                        }
                        cell.push((k, m, c.clone()));
                    }
                }
            }
        }
        Ok(Arc::new(Algebra { ring, def_vars: vars, lambda_mode, n_lambda, trunc, lam_start, def_start, table }))
    }

    /// Same ring and layout with other caps (for truncation-coherence checks).
    pub fn with_truncation(&self, trunc: Truncation) -> Arc<Algebra> {
        Arc::new(Algebra {
            ring: self.ring.clone(),
            def_vars: self.def_vars.clone(),
            lambda_mode: self.lambda_mode,
            n_lambda: self.n_lambda,
            trunc,
            lam_start: self.lam_start,
            def_start: self.def_start,
            table: self.table.clone(),
        })
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.ring.rank()
    }

    pub fn trunc(&self) -> &Truncation {
        &self.trunc
    }

    pub fn lambda_mode(&self) -> LambdaMode {
        self.lambda_mode
    }

    pub fn n_lambda(&self) -> usize {
        self.n_lambda
    }

    pub fn novikov_rank(&self) -> usize {
        self.ring.novikov_rank
    }

    pub fn def_vars(&self) -> &[String] {
        &self.def_vars
    }

    pub fn same_layout(&self, o: &Algebra) -> bool {
        self.ring == o.ring && self.def_vars == o.def_vars && self.lambda_mode == o.lambda_mode
    }

    pub const Z_SLOT: usize = 0;

    pub fn nov_slot(&self, i: usize) -> usize {
        assert!(i < self.novikov_rank());
        1 + i
    }

    pub fn lam_slot(&self, i: usize) -> usize {
        assert!(i < self.n_lambda);
        self.lam_start + i
    }

    pub fn def_slot(&self, i: usize) -> usize {
        assert!(i < self.def_vars.len());
        self.def_start + i
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.def_vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown deformation variable {name}")))
    }

    pub fn var_slot(&self, name: &str) -> Result<usize> {
        Ok(self.def_slot(self.var_index(name)?))
    }

    pub fn nov_degree(&self, m: &Mono) -> i64 {
        (0..self.novikov_rank()).map(|i| m.0[1 + i] as i64).sum()
    }

    pub fn novikov(&self, m: &Mono) -> Vec<i16> {
        m.0[1..1 + self.novikov_rank()].to_vec()
    }

    pub fn def_degree(&self, m: &Mono) -> i64 {
        m.0[self.def_start..self.def_start + self.def_vars.len()].iter().map(|&x| x as i64).sum()
    }

    pub fn lambda_exps<'a>(&self, m: &'a Mono) -> &'a [i16] {
        &m.0[self.lam_start..self.lam_start + self.n_lambda]
    }

    fn lambda_weight(&self, m: &Mono) -> i64 {
        let s: i64 = self.lambda_exps(m).iter().map(|&x| x as i64).sum();
        match self.lambda_mode {
            LambdaMode::None => 0,
            LambdaMode::Power => s,
            LambdaMode::Laurent => -s,
        }
    }

    /// Filtration grade: Novikov degree + deformation degree + `λ`-weight.
    pub fn grade(&self, m: &Mono) -> i64 {
        self.nov_degree(m) + self.def_degree(m) + self.lambda_weight(m)
    }

    #[inline]
    pub fn admissible(&self, m: &Mono) -> bool {
        if self.nov_degree(m) > self.trunc.q_degree_cap as i64 || self.def_degree(m) > self.trunc.def_degree_cap as i64
        {
            return false;
        }
        match self.lambda_mode {
            LambdaMode::None => true,
            LambdaMode::Power => self.lambda_weight(m) <= self.trunc.lambda_order as i64,
            LambdaMode::Laurent => self.lambda_exps(m)[0] >= -(self.trunc.lambda_order as i64) as i16,
        }
    }

    /// Upper bound on the nilpotency index of anything of positive grade or
    /// lying in the radical of the ring; iteration beyond it signals a
    /// non-nilpotent argument.
    pub fn nilpotency_bound(&self) -> usize {
        let t = &self.trunc;
        (self.rank() + 1) * (t.q_degree_cap + t.def_degree_cap + t.lambda_order + 2) as usize + 4
    }

    pub fn mono_z(&self, k: i16) -> Mono {
        Mono::unit(Self::Z_SLOT, k)
    }
}

/// Coefficient domain of a [`Series`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn from_rat(c: Rat) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn add_assign(&mut self, o: &Self) {
        *self = self.add(o);
    }
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rat) -> Self;
    fn inverse(&self) -> Option<Self>;
    /// Rational value if the coefficient is a constant.
    fn as_rat(&self) -> Option<Rat>;
    fn one() -> Self {
        Self::from_rat(one())
    }
}

impl Coeff for Rat {
    fn zero() -> Self {
        zero()
    }
    fn from_rat(c: Rat) -> Self {
        c
    }
    fn is_zero(&self) -> bool {
        is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rat) -> Self {
        self * c
    }
    fn inverse(&self) -> Option<Self> {
        (!is_zero(self)).then(|| recip(self))
    }
    fn as_rat(&self) -> Option<Rat> {
        Some(self.clone())
    }
}

impl Coeff for RatFn {
    fn zero() -> Self {
        RatFn::zero()
    }
    fn from_rat(c: Rat) -> Self {
        RatFn::constant(c)
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rat) -> Self {
        RatFn::scale(self, c)
    }
    fn inverse(&self) -> Option<Self> {
        RatFn::inverse(self)
    }
    fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(zero());
        }
        (self.shift() == 0 && self.is_laurent_polynomial() && self.numerator().degree() == Some(0))
            .then(|| self.numerator().coeffs()[0].clone())
    }
}

pub type Key = (Mono, u8);

/// A truncated series; see the module documentation.
#[derive(Clone)]
pub struct Series<C: Coeff> {
    alg: Arc<Algebra>,
    terms: BTreeMap<Key, C>,
}

/// Cohomological loop-space series (`z` in the monomial).
pub type HSeries = Series<Rat>;
/// K-theoretic loop-space series (rational functions of `q` as coefficients).
pub type KSeries = Series<RatFn>;

impl<C: Coeff> PartialEq for Series<C> {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.alg, &o.alg) || self.alg.same_layout(&o.alg)) && self.terms == o.terms
    }
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Coeff> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((m, comp), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            let z = m.0[0];
            if z != 0 {
                write!(f, "*z^{z}")?;
            }
            for i in 0..self.alg.novikov_rank() {
                let e = m.0[1 + i];
                if e != 0 {
                    write!(f, "*Q{}^{e}", i + 1)?;
                }
            }
            for (i, &e) in self.alg.lambda_exps(m).iter().enumerate() {
                if e != 0 {
                    write!(f, "*l{}^{e}", i + 1)?;
                }
            }
            for (i, v) in self.alg.def_vars.iter().enumerate() {
                let e = m.0[self.alg.def_start + i];
                if e != 0 {
                    write!(f, "*{v}^{e}")?;
                }
            }
            if *comp != 0 {
                write!(f, "*[{}]", self.alg.ring.labels[*comp as usize])?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero(alg: &Arc<Algebra>) -> Self {
        Series { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(alg: &Arc<Algebra>) -> Self {
        Series::term(alg, Mono::ONE, 0, C::one())
    }

    pub fn constant(alg: &Arc<Algebra>, c: C) -> Self {
        Series::term(alg, Mono::ONE, 0, c)
    }

    /// `c · m · b_comp`, dropped if outside the ledger.
    pub fn term(alg: &Arc<Algebra>, m: Mono, comp: usize, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() && alg.admissible(&m) {
            terms.insert((m, comp as u8), c);
        }
        Series { alg: alg.clone(), terms }
    }

    pub fn from_terms(alg: &Arc<Algebra>, it: impl IntoIterator<Item = (Key, C)>) -> Self {
        let mut terms: BTreeMap<Key, C> = BTreeMap::new();
        for (k, c) in it {
            if c.is_zero() || !alg.admissible(&k.0) {
                continue;
            }
            match terms.get_mut(&k) {
                Some(slot) => slot.add_assign(&c),
                None => {
                    terms.insert(k, c);
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Series { alg: alg.clone(), terms }
    }

    /// Deformation variable by name.
    pub fn var(alg: &Arc<Algebra>, name: &str) -> Result<Self> {
        let slot = alg.var_slot(name)?;
        Ok(Series::term(alg, Mono::unit(slot, 1), 0, C::one()))
    }

    /// `Q_i^d`
    pub fn novikov(alg: &Arc<Algebra>, i: usize, d: i16) -> Self {
        Series::term(alg, Mono::unit(alg.nov_slot(i), d), 0, C::one())
    }

    /// Basis vector `b_i` of the coefficient ring.
    pub fn basis(alg: &Arc<Algebra>, i: usize) -> Self {
        Series::term(alg, Mono::ONE, i, C::one())
    }

    /// Embeds a ring element (with `λ`-polynomial coordinates).
    pub fn from_ring_elem(alg: &Arc<Algebra>, e: &RingElem) -> Self {
        let mut out = Vec::new();
        for (i, lp) in e.coords.iter().enumerate() {
            out.extend(lam_terms(alg, lp).into_iter().map(|(m, c)| ((m, i as u8), C::from_rat(c))));
        }
        Series::from_terms(alg, out)
    }

    /// Scalar (component-0) series of a `λ`-polynomial.
    pub fn from_lam_poly(alg: &Arc<Algebra>, lp: &LamPoly) -> Self {
        Series::from_terms(alg, lam_terms(alg, lp).into_iter().map(|(m, c)| ((m, 0u8), C::from_rat(c))))
    }

    pub fn alg(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<Key, C> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Key, C> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, m: &Mono, comp: usize) -> C {
        self.terms.get(&(*m, comp as u8)).cloned().unwrap_or_else(C::zero)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &o.alg) {
            return Ok(());
        }
        if !self.alg.same_layout(&o.alg) {
            return Err(Error::RingMismatch);
        }
        if self.alg.trunc != o.alg.trunc {
            return Err(Error::TruncationMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            match terms.get_mut(k) {
                Some(slot) => {
                    slot.add_assign(c);
                    if slot.is_zero() {
                        terms.remove(k);
                    }
                }
                None => {
                    terms.insert(*k, c.clone());
                }
            }
        }
        Ok(Series { alg: self.alg.clone(), terms })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.mul_unchecked(o))
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        if self.terms.is_empty() || o.terms.is_empty() {
            return Series::zero(&self.alg);
        }
        let alg = &*self.alg;
        let dcap = alg.trunc.q_degree_cap as i64;
        let tcap = alg.trunc.def_degree_cap as i64;
        let graded = |s: &Self| -> Vec<(Mono, usize, C, i64, i64)> {
            s.terms
                .iter()
                .map(|((m, c), v)| (*m, *c as usize, v.clone(), alg.nov_degree(m), alg.def_degree(m)))
                .collect()
        };
        let a = graded(self);
        let mut b = graded(o);
        b.sort_by_key(|t| t.3 + t.4);
        let mut acc: HashMap<Key, C> = HashMap::new();
        for (m1, i, c1, n1, d1) in &a {
            for (m2, j, c2, n2, d2) in &b {
                if n1 + n2 > dcap || d1 + d2 > tcap {
                    continue;
                }
                let cell = &alg.table[*i][*j];
                if cell.is_empty() {
                    continue;
                }
                let base = m1.add(m2);
                let prod = c1.mul(c2);
                for (k, off, sc) in cell {
                    let m = if *off == Mono::ONE { base } else { base.add(off) };
                    if alg.n_lambda > 0 && !alg.admissible(&m) {
                        continue;
                    }
                    let v = if is_one(sc) { prod.clone() } else { prod.scale(sc) };
                    match acc.get_mut(&(m, *k as u8)) {
                        Some(slot) => slot.add_assign(&v),
                        None => {
                            acc.insert((m, *k as u8), v);
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Series { alg: self.alg.clone(), terms }
    }

    pub fn neg(&self) -> Self {
        Series { alg: self.alg.clone(), terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if is_zero(c) {
            return Series::zero(&self.alg);
        }
        Series { alg: self.alg.clone(), terms: self.terms.iter().map(|(k, v)| (*k, v.scale(c))).collect() }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale_coeff(&self, c: &C) -> Self {
        Series::from_terms(&self.alg, self.terms.iter().map(|(k, v)| (*k, v.mul(c))))
    }

    /// Multiplies by the monomial `m` (exponents may be negative).
    pub fn shift(&self, m: &Mono) -> Self {
        Series::from_terms(&self.alg, self.terms.iter().map(|((k, i), v)| ((k.add(m), *i), v.clone())))
    }

    pub fn filter(&self, mut keep: impl FnMut(&Mono, usize) -> bool) -> Self {
        Series {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|((m, i), _)| keep(m, *i as usize)).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        Series::from_terms(&self.alg, self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Series::one(&self.alg);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Terms of filtration grade zero.
    pub fn grade_zero_part(&self) -> Self {
        let alg = self.alg.clone();
        self.filter(|m, _| alg.grade(m) == 0)
    }

    pub fn min_grade(&self) -> Option<i64> {
        self.terms.keys().map(|(m, _)| self.alg.grade(m)).min()
    }

    /// Coordinate along basis vector `i`, as a scalar series.
    pub fn component(&self, i: usize) -> Self {
        Series {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .filter(|((_, c), _)| *c as usize == i)
                .map(|((m, _), v)| ((*m, 0u8), v.clone()))
                .collect(),
        }
    }

    /// Pairing `(self, e)` with a ring element, as a scalar series.
    pub fn pair_with(&self, e: &RingElem) -> Self {
        let ring = self.alg.ring.clone();
        let r = ring.rank();
        let mut acc = Series::zero(&self.alg);
        for i in 0..r {
            let comp = self.component(i);
            if comp.is_zero() {
                continue;
            }
            let mut w = LamPoly::new();
            for j in 0..r {
                if !e.coords[j].is_empty() && !ring.gram[i][j].is_empty() {
                    w = crate::ring::lam_add(&w, &crate::ring::lam_mul(&e.coords[j], &ring.gram[i][j]));
                }
            }
            if !w.is_empty() {
                acc = &acc + &(&comp * &Series::from_lam_poly(&self.alg, &w));
            }
        }
        acc
    }

    /// Places a scalar series on basis vector `i`.
    pub fn embed(&self, i: usize) -> Self {
        debug_assert!(self.terms.keys().all(|(_, c)| *c == 0));
        Series {
            alg: self.alg.clone(),
            terms: self.terms.iter().map(|((m, _), v)| ((*m, i as u8), v.clone())).collect(),
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(|(_, c)| *c == 0)
    }

    /// Reinterprets the series in another algebra of the same layout,
    /// reducing to its ledger.
    pub fn retruncate(&self, alg: &Arc<Algebra>) -> Result<Self> {
        if !self.alg.same_layout(alg) {
            return Err(Error::RingMismatch);
        }
        Ok(Series::from_terms(alg, self.terms.iter().map(|(k, c)| (*k, c.clone()))))
    }

    /// Keeps only terms with deformation degree `≤ cap`.
    pub fn truncate_def(&self, cap: i64) -> Self {
        let alg = self.alg.clone();
        self.filter(|m, _| alg.def_degree(m) <= cap)
    }

    /// Keeps only terms with Novikov degree `≤ cap`.
    pub fn truncate_novikov(&self, cap: i64) -> Self {
        let alg = self.alg.clone();
        self.filter(|m, _| alg.nov_degree(m) <= cap)
    }

    /// Sets the deformation variable in `slot` to zero.
    pub fn specialize_zero(&self, slot: usize) -> Self {
        self.filter(|m, _| m.0[slot] == 0)
    }

    /// Sets every equivariant parameter to zero (power mode).
    pub fn at_lambda_zero(&self) -> Self {
        let alg = self.alg.clone();
        self.filter(|m, _| alg.lambda_exps(m).iter().all(|&e| e == 0))
    }

    /// `∂/∂v` for the deformation variable in `slot`.
    pub fn derivative(&self, slot: usize) -> Self {
        Series::from_terms(
            &self.alg,
            self.terms.iter().filter(|((m, _), _)| m.0[slot] != 0).map(|((m, i), c)| {
                let e = m.0[slot];
                ((m.with(slot, e - 1), *i), c.scale(&rational::int(e as i64)))
            }),
        )
    }

    /// `Q_i ∂/∂Q_i`: multiplies each term by its Novikov degree `d_i`.
    pub fn novikov_euler(&self, i: usize) -> Self {
        let slot = self.alg.nov_slot(i);
        self.map_terms(|m, c| c.scale(&rational::int(m.0[slot] as i64)))
    }

    fn map_terms(&self, f: impl Fn(&Mono, &C) -> C) -> Self {
        Series::from_terms(&self.alg, self.terms.iter().map(|((m, i), c)| ((*m, *i), f(m, c))))
    }

    /// Inverse of a unit: a leading monomial with invertible coefficient
    /// on the identity times `1 + r`, `r` nilpotent within the ledger.
    ///
    /// The leading monomial is chosen among terms of Novikov and deformation
    /// degree zero on the identity: the largest `λ`-exponent in Laurent mode
    /// (expansion in powers of `1/λ`), and then the largest `z`-exponent
    /// (expansion in powers of `1/z`).
    pub fn invert_unit(&self) -> Result<Self> {
        let alg = self.alg.clone();
        let lead = self
            .terms
            .iter()
            .filter(|((m, comp), _)| {
                *comp == 0
                    && alg.nov_degree(m) == 0
                    && alg.def_degree(m) == 0
                    && (alg.lambda_mode != LambdaMode::Power || alg.lambda_exps(m).iter().all(|&e| e == 0))
            })
            .filter_map(|((m, _), c)| c.inverse().map(|inv| (*m, inv)))
            .max_by_key(|(m, _)| {
                let lam = if alg.lambda_mode == LambdaMode::Laurent { alg.lambda_exps(m)[0] } else { 0 };
                (lam, m.0[0])
            });
        let (m, cinv) = lead.ok_or_else(|| Error::NonUnit("no invertible leading monomial".into()))?;
        let minv = m.neg();
        // r = a / lead - 1
        let normalized =
            Series::from_terms(&alg, self.terms.iter().map(|((k, i), c)| ((k.add(&minv), *i), c.mul(&cinv))));
        let r = &normalized - &Series::one(&alg);
        let neg_r = r.neg();
        let mut acc: Self = Series::one(&alg);
        let mut power: Self = Series::one(&alg);
        let bound = alg.nilpotency_bound();
        for _ in 0..bound {
            power = &power * &neg_r;
            if power.is_zero() {
                return Ok(Series::from_terms(
                    &alg,
                    acc.terms.iter().map(|((k, i), c)| ((k.add(&minv), *i), c.mul(&cinv))),
                ));
            }
            acc = &acc + &power;
        }
        Err(Error::NonUnit(format!("remainder after the leading monomial {m:?} is not nilpotent")))
    }

    /// `exp(self)`; every term must have positive grade or lie off the
    /// identity component (nilpotent), so the series terminates.
    pub fn exp(&self) -> Result<Self> {
        let alg = self.alg.clone();
        if self.terms.keys().any(|(m, comp)| alg.grade(m) < 0 || (alg.grade(m) == 0 && *comp == 0)) {
            return Err(Error::DivergentExponential);
        }
        let mut acc: Self = Series::one(&alg);
        let mut power: Self = Series::one(&alg);
        for k in 1..=alg.nilpotency_bound() {
            power = (&power * self).scale(&recip(&rational::int(k as i64)));
            if power.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &power;
        }
        Err(Error::DivergentExponential)
    }

    /// Substitutes series for deformation variables (given by slot).
    ///
    /// Values must lie in the maximal ideal (no grade-0 part). When some
    /// value has terms free of deformation variables, orders with
    /// `def + Novikov degree > T` are no longer determined and are dropped.
    pub fn substitute(&self, subs: &[(usize, Self)]) -> Result<Self> {
        let alg = self.alg.clone();
        let cap = alg.trunc.def_degree_cap as usize;
        let mut pure_novikov = false;
        for (_, v) in subs {
            self.check(v)?;
            if v.min_grade().is_some_and(|g| g <= 0) {
                return Err(Error::InvalidArgument("substituted value must lie in the maximal ideal".into()));
            }
            if v.terms.keys().any(|(m, _)| alg.def_degree(m) == 0) {
                pure_novikov = true;
            }
        }
        let powers: Vec<Vec<Self>> = subs
            .iter()
            .map(|(_, v)| {
                let mut p = vec![Series::one(&alg)];
                for e in 1..=cap {
                    let next = &p[e - 1] * v;
                    p.push(next);
                }
                p
            })
            .collect();
        // group terms by the exponents of the substituted variables
        let mut groups: BTreeMap<Vec<i16>, Vec<(Key, C)>> = BTreeMap::new();
        for ((m, i), c) in &self.terms {
            let exps: Vec<i16> = subs.iter().map(|(s, _)| m.0[*s]).collect();
            let mut rest = *m;
            for (s, _) in subs {
                rest.0[*s] = 0;
            }
            groups.entry(exps).or_default().push(((rest, *i), c.clone()));
        }
        let mut out = Series::zero(&alg);
        for (exps, rest_terms) in groups {
            let rest = Series::from_terms(&alg, rest_terms);
            let mut factor = Series::one(&alg);
            for (k, &e) in exps.iter().enumerate() {
                if e as usize > cap {
                    factor = Series::zero(&alg);
                    break;
                }
                if e > 0 {
                    factor = &factor * &powers[k][e as usize];
                }
            }
            out = &out + &(&rest * &factor);
        }
        if pure_novikov {
            let a = alg.clone();
            out = out.filter(|m, _| a.def_degree(m) + a.nov_degree(m) <= cap as i64);
        }
        Ok(out)
    }

    /// Flat listing for reports: `(novikov, z, λ, deformation exponents by
    /// name, component, coefficient)`.
    pub fn entries(&self) -> Vec<Entry<C>> {
        self.terms
            .iter()
            .map(|((m, i), c)| Entry {
                novikov: self.alg.novikov(m),
                z: m.0[0],
                lambda: self.alg.lambda_exps(m).to_vec(),
                def: self
                    .alg
                    .def_vars
                    .iter()
                    .enumerate()
                    .filter_map(|(k, v)| {
                        let e = m.0[self.alg.def_start + k];
                        (e != 0).then(|| (v.clone(), e))
                    })
                    .collect(),
                component: *i as usize,
                coeff: c.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry<C> {
    pub novikov: Vec<i16>,
    pub z: i16,
    pub lambda: Vec<i16>,
    pub def: Vec<(String, i16)>,
    pub component: usize,
    pub coeff: C,
}

fn lam_terms(alg: &Algebra, lp: &LamPoly) -> Vec<(Mono, Rat)> {
    lp.iter()
        .map(|(e, c)| {
            let mut m = Mono::ONE;
            if alg.lambda_mode == LambdaMode::Power {
                for (s, &x) in e.iter().enumerate() {
                    m.0[alg.lam_start + s] = x as i16;
                }
            } else {
                assert!(e.iter().all(|&x| x == 0), "λ-dependent data needs power mode");
            }
            (m, c.clone())
        })
        .collect()
}

impl HSeries {
    /// `c · z^k` on the identity.
    pub fn z_power(alg: &Arc<Algebra>, k: i16, c: Rat) -> Self {
        Series::term(alg, alg.mono_z(k), 0, c)
    }

    /// `λ^e` (Laurent mode, or `λ_i` in power mode).
    pub fn lambda(alg: &Arc<Algebra>, i: usize, e: i16) -> Self {
        Series::term(alg, Mono::unit(alg.lam_slot(i), e), 0, one())
    }

    /// Multiplies by `z^k`.
    pub fn z_shift(&self, k: i16) -> Self {
        self.shift(&self.alg.mono_z(k))
    }

    /// Part with `z`-exponent `≥ 0` (the `H_+` projection).
    pub fn h_plus(&self) -> Self {
        self.filter(|m, _| m.0[0] >= 0)
    }

    /// Polar part (`H_-`).
    pub fn h_minus(&self) -> Self {
        self.filter(|m, _| m.0[0] < 0)
    }

    /// Coefficient of `z^k` as a `z`-free series.
    pub fn z_coeff(&self, k: i16) -> Self {
        Series {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .filter(|((m, _), _)| m.0[0] == k)
                .map(|((m, i), c)| ((m.with(0, 0), *i), c.clone()))
                .collect(),
        }
    }

    /// `(min, max)` `z`-exponent, `None` for zero.
    pub fn z_range(&self) -> Option<(i16, i16)> {
        let zs = self.terms.keys().map(|(m, _)| m.0[0]);
        let lo = zs.clone().min()?;
        Some((lo, zs.max().unwrap()))
    }

    /// `z ↦ -z`
    pub fn negate_z(&self) -> Self {
        self.map_terms(|m, c| if m.0[0] % 2 != 0 { -c } else { c.clone() })
    }

    /// Restriction to the reporting window of the ledger.
    pub fn in_z_window(&self) -> Self {
        let (lo, hi) = self.alg.trunc.z_window;
        self.filter(|m, _| m.0[0] >= -(lo as i16) && m.0[0] <= hi as i16)
    }

    /// `exp(self / z)`
    pub fn exp_divided_z(&self) -> Result<Self> {
        self.z_shift(-1).exp()
    }
}

impl KSeries {
    /// Laurent-polynomial and reduced parts, coefficientwise.
    pub fn k_split(&self) -> (Self, Self) {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for (k, c) in &self.terms {
            let (a, b) = c.k_split();
            l.push((*k, a));
            r.push((*k, b));
        }
        (Series::from_terms(&self.alg, l), Series::from_terms(&self.alg, r))
    }

    /// `exp(self / (1 - q))`
    pub fn exp_divided_one_minus_q(&self) -> Result<Self> {
        let inv = RatFn::from_polys(crate::poly::Poly::one(), crate::poly::Poly::from_ints(&[1, -1]));
        self.scale_coeff(&inv).exp()
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $body:expr) => {
        impl<C: Coeff> std::ops::$tr<&Series<C>> for &Series<C> {
            type Output = Series<C>;
            fn $f(self, o: &Series<C>) -> Series<C> {
                let g: fn(&Series<C>, &Series<C>) -> Result<Series<C>> = $body;
                g(self, o).expect("series operands from incompatible algebras")
            }
        }
        impl<C: Coeff> std::ops::$tr<Series<C>> for Series<C> {
            type Output = Series<C>;
            fn $f(self, o: Series<C>) -> Series<C> {
                std::ops::$tr::$f(&self, &o)
            }
        }
    };
}

binop!(Add, add, |a, b| a.try_add(b));
binop!(Sub, sub, |a, b| a.try_add(&b.neg()));
binop!(Mul, mul, |a, b| a.try_mul(b));

impl<C: Coeff> std::ops::Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::ring::{ktheory_projective_ring, projective_ring};

    fn cp1(t: u32) -> Arc<Algebra> {
        Algebra::new(Arc::new(projective_ring(2).unwrap()), &["t0", "t1"], LambdaMode::None, Truncation::new(2, t))
            .unwrap()
    }

    fn p(a: &Arc<Algebra>) -> HSeries {
        HSeries::basis(a, 1)
    }

    fn z(a: &Arc<Algebra>, k: i16, c: i64) -> HSeries {
        HSeries::z_power(a, k, int(c))
    }

    #[test]
    fn nilpotent_cross_terms_cancel() {
        let a = cp1(2);
        let x = &HSeries::one(&a) + &p(&a).z_shift(-1).scale(&int(2));
        let y = &HSeries::one(&a) - &p(&a).z_shift(-1).scale(&int(2));
        assert_eq!(&x * &y, HSeries::one(&a));
    }

    #[test]
    fn hand_expanded_product() {
        // (-1/z - 2p/z^2)(p - z) = 1 + p/z
        let a = cp1(2);
        let u = &z(&a, -1, -1) - &p(&a).z_shift(-2).scale(&int(2));
        let v = &p(&a) - &z(&a, 1, 1);
        assert_eq!(&u * &v, &HSeries::one(&a) + &p(&a).z_shift(-1));
        assert_eq!(&u + &HSeries::zero(&a), u);
    }

    #[test]
    fn invert_p_minus_z() {
        let a = cp1(2);
        let v = &p(&a) - &z(&a, 1, 1);
        let inv = v.invert_unit().unwrap();
        assert_eq!(inv, &z(&a, -1, -1) - &p(&a).z_shift(-2));
        assert_eq!(HSeries::one(&a).invert_unit().unwrap(), HSeries::one(&a));
        // 1 - z is not a unit of the loop algebra in either direction we expand
        assert!((&HSeries::one(&a) - &z(&a, 1, 1)).invert_unit().is_err());
        assert!(p(&a).invert_unit().is_err());
    }

    #[test]
    fn exponentials() {
        let a = cp1(2);
        let t1 = HSeries::var(&a, "t1").unwrap();
        let e = (&t1 * &p(&a)).exp_divided_z().unwrap();
        assert_eq!(e, &HSeries::one(&a) + &(&t1 * &p(&a)).z_shift(-1));
        let t0 = HSeries::var(&a, "t0").unwrap();
        let e0 = t0.exp_divided_z().unwrap();
        let expected = &(&HSeries::one(&a) + &t0.z_shift(-1)) + &(&t0 * &t0).z_shift(-2).scale(&rat(1, 2));
        assert_eq!(e0, expected);
        assert!(HSeries::one(&a).exp().is_err());
        let k =
            Algebra::new(Arc::new(ktheory_projective_ring(2).unwrap()), &[], LambdaMode::None, Truncation::new(2, 2))
                .unwrap();
        assert_eq!(KSeries::zero(&k).exp_divided_one_minus_q().unwrap(), KSeries::one(&k));
    }

    #[test]
    fn h_plus_split() {
        let a = cp1(2);
        let v = &z(&a, -1, -1) - &p(&a).z_shift(-2).scale(&int(2));
        assert!(v.h_plus().is_zero());
        let w = &(&z(&a, 1, -1) + &z(&a, 0, 3)) + &z(&a, -1, 5);
        assert_eq!(w.h_plus(), &z(&a, 1, -1) + &z(&a, 0, 3));
        assert_eq!(&w.h_plus() + &w.h_minus(), w);
        assert_eq!(w.h_plus().h_plus(), w.h_plus());
    }

    #[test]
    fn ktheory_unit_inverse() {
        // 1 - P q = (1 - q) + ε q  ⇒  1/(1-q) - ε q/(1-q)^2
        use crate::poly::Poly;
        let k =
            Algebra::new(Arc::new(ktheory_projective_ring(2).unwrap()), &[], LambdaMode::None, Truncation::new(1, 1))
                .unwrap();
        let omq = RatFn::from_poly(Poly::from_ints(&[1, -1]));
        let qf = RatFn::monomial(int(1), 1);
        let u = &KSeries::constant(&k, omq.clone()) + &KSeries::basis(&k, 1).scale_coeff(&qf);
        let inv = u.invert_unit().unwrap();
        let a = RatFn::from_polys(Poly::one(), Poly::from_ints(&[1, -1]));
        let b = RatFn::from_polys(Poly::from_ints(&[0, -1]), Poly::from_ints(&[1, -2, 1]));
        let expected = &KSeries::constant(&k, a) + &KSeries::basis(&k, 1).scale_coeff(&b);
        assert_eq!(inv, expected);
        assert_eq!(&inv * &u, KSeries::one(&k));
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let a = cp1(2);
        let b =
            Algebra::new(Arc::new(projective_ring(3).unwrap()), &[], LambdaMode::None, Truncation::new(2, 2)).unwrap();
        assert_eq!(HSeries::one(&a).try_add(&HSeries::one(&b)).unwrap_err(), Error::RingMismatch);
        let c = a.with_truncation(Truncation::new(1, 1));
        assert_eq!(HSeries::one(&a).try_mul(&HSeries::one(&c)).unwrap_err(), Error::TruncationMismatch);
    }

    #[test]
    fn substitution_and_derivatives() {
        let a = cp1(3);
        let t0 = HSeries::var(&a, "t0").unwrap();
        let t1 = HSeries::var(&a, "t1").unwrap();
        let f = &(&t0 * &t0) + &t1;
        let slot = a.var_slot("t0").unwrap();
        let g = f.substitute(&[(slot, &t1 + &t1)]).unwrap();
        assert_eq!(g, &(&t1 * &t1).scale(&int(4)) + &t1);
        assert_eq!(f.derivative(slot), t0.scale(&int(2)));
        let q = HSeries::novikov(&a, 0, 2);
        assert_eq!(q.novikov_euler(0), q.scale(&int(2)));
    }
}
