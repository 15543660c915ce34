//! Finite-rank coefficient rings of the supported targets: classical
//! cohomology of projective space, its torus-equivariant deformation, and
//! the K-ring. Each presentation carries a basis, structure constants, a
//! grading and the Gram matrix of the Poincaré (or Euler-characteristic)
//! pairing.
//!
//! Structure constants and pairings may depend polynomially on equivariant
//! parameters `λ_1..λ_m`; those are stored as [`LamPoly`].

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{self, binomial, factorial, is_zero, one, recip, zero, Rat};

/// Polynomial in the equivariant parameters, keyed by exponent vector.
pub type LamPoly = BTreeMap<Vec<u16>, Rat>;

/// Element of the coefficient ring: one `LamPoly` coordinate per basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RingElem {
    pub coords: Vec<LamPoly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    /// `Q[p]/(p^n)`
    Cohomology,
    /// `Q[λ][p]/((p-λ_1)...(p-λ_n))`
    Equivariant,
    /// `Q[P]/((1-P)^n)` in the basis `(1-P)^i`
    KTheory,
    /// `Q` itself, used for matrix entries and other scalar data
    Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RingPresentation {
    pub kind: RingKind,
    pub n: usize,
    pub labels: Vec<String>,
    pub grading: Vec<u32>,
    /// `products[i][j]` are the coordinates of `b_i * b_j`.
    pub products: Vec<Vec<RingElem>>,
    pub gram: Vec<Vec<LamPoly>>,
    pub divisor_indices: Vec<usize>,
    pub novikov_rank: usize,
    pub n_lambda: usize,
}

pub fn lam_const(c: Rat, n_lambda: usize) -> LamPoly {
    let mut m = LamPoly::new();
    if !is_zero(&c) {
        m.insert(vec![0; n_lambda], c);
    }
    m
}

fn lam_add_into(acc: &mut LamPoly, e: &[u16], c: Rat) {
    if is_zero(&c) {
        return;
    }
    let slot = acc.entry(e.to_vec()).or_insert_with(zero);
    *slot += c;
    if is_zero(slot) {
        acc.remove(e);
    }
}

pub fn lam_mul(a: &LamPoly, b: &LamPoly) -> LamPoly {
    let mut out = LamPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u16> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            lam_add_into(&mut out, &e, ca * cb);
        }
    }
    out
}

pub fn lam_add(a: &LamPoly, b: &LamPoly) -> LamPoly {
    let mut out = a.clone();
    for (e, c) in b {
        lam_add_into(&mut out, e, c.clone());
    }
    out
}

fn lam_total_degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

fn lam_truncate(a: &LamPoly, order: u32) -> LamPoly {
    a.iter().filter(|(e, _)| lam_total_degree(e) <= order).map(|(e, c)| (e.clone(), c.clone())).collect()
}

/// The constant term (all `λ = 0`).
pub fn lam_at_zero(a: &LamPoly) -> Rat {
    a.iter().find(|(e, _)| e.iter().all(|&x| x == 0)).map(|(_, c)| c.clone()).unwrap_or_else(zero)
}

/// Elementary symmetric polynomial `e_k(λ_1..λ_n)`.
fn elementary(k: usize, n: usize) -> LamPoly {
    let mut out = LamPoly::new();
    let mut subset = vec![0u16; n];
    fn rec(start: usize, left: usize, n: usize, subset: &mut Vec<u16>, out: &mut LamPoly) {
        if left == 0 {
            out.insert(subset.clone(), one());
            return;
        }
        for i in start..n {
            subset[i] = 1;
            rec(i + 1, left - 1, n, subset, out);
            subset[i] = 0;
        }
    }
    rec(0, k, n, &mut subset, &mut out);
    out
}

impl RingElem {
    pub fn zero(rank: usize) -> Self {
        RingElem { coords: vec![LamPoly::new(); rank] }
    }

    pub fn basis(rank: usize, i: usize, n_lambda: usize) -> Self {
        let mut e = RingElem::zero(rank);
        e.coords[i] = lam_const(one(), n_lambda);
        e
    }

    pub fn from_rats(c: &[Rat], n_lambda: usize) -> Self {
        RingElem { coords: c.iter().map(|x| lam_const(x.clone(), n_lambda)).collect() }
    }

    /// Coordinates at `λ = 0`.
    pub fn at_lambda_zero(&self) -> Vec<Rat> {
        self.coords.iter().map(lam_at_zero).collect()
    }
}

impl RingPresentation {
    /// Products never lower the grading, so positive-degree basis vectors
    /// span a nilpotent ideal.
    pub fn is_graded_nilpotent(&self) -> bool {
        let g = &self.grading;
        self.products.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, e)| e.coords.iter().enumerate().all(|(k, c)| c.values().all(is_zero) || g[k] >= g[i] + g[j]))
        })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn is_equivariant(&self) -> bool {
        self.n_lambda > 0
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let r = self.rank();
        let mut out = RingElem::zero(r);
        for i in 0..r {
            if a.coords[i].is_empty() {
                continue;
            }
            for j in 0..r {
                if b.coords[j].is_empty() {
                    continue;
                }
                let ab = lam_mul(&a.coords[i], &b.coords[j]);
                for k in 0..r {
                    let c = &self.products[i][j].coords[k];
                    if !c.is_empty() {
                        out.coords[k] = lam_add(&out.coords[k], &lam_mul(&ab, c));
                    }
                }
            }
        }
        out
    }

    pub fn pair(&self, a: &RingElem, b: &RingElem) -> LamPoly {
        let r = self.rank();
        let mut acc = LamPoly::new();
        for i in 0..r {
            for j in 0..r {
                if a.coords[i].is_empty() || b.coords[j].is_empty() || self.gram[i][j].is_empty() {
                    continue;
                }
                let t = lam_mul(&lam_mul(&a.coords[i], &b.coords[j]), &self.gram[i][j]);
                acc = lam_add(&acc, &t);
            }
        }
        acc
    }

    /// The hyperplane class `p` (cohomology, equivariant), or `P = 1 - (1-P)`
    /// on the K side.
    pub fn hyperplane(&self) -> RingElem {
        let n = self.n;
        match self.kind {
            RingKind::KTheory => {
                let mut e = RingElem::basis(n, 0, 0);
                if n > 1 {
                    e.coords[1] = lam_const(-one(), 0);
                }
                e
            }
            RingKind::Equivariant if n == 1 => {
                let mut e = RingElem::zero(1);
                e.coords[0].insert(vec![1], one());
                e
            }
            _ if n > 1 => RingElem::basis(n, 1, self.n_lambda),
            _ => RingElem::zero(n),
        }
    }

    pub fn basis(&self, i: usize) -> RingElem {
        RingElem::basis(self.rank(), i, self.n_lambda)
    }

    /// Coordinates of the product of basis elements, truncated to the
    /// given `λ`-order.
    pub fn dual_basis(&self, lambda_order: u32) -> Result<Vec<RingElem>> {
        let inv = invert_lam_matrix(&self.gram, self.n_lambda, lambda_order)?;
        // φ^β = Σ_α (G^{-1})_{αβ} φ_α
        let r = self.rank();
        Ok((0..r).map(|b| RingElem { coords: (0..r).map(|a| inv[a][b].clone()).collect() }).collect())
    }

    /// Ring-theoretic self-checks: commutativity, associativity, symmetry
    /// of the pairing and the Frobenius identity, over all basis triples.
    pub fn check_axioms(&self) -> std::result::Result<(), String> {
        let r = self.rank();
        let b: Vec<RingElem> = (0..r).map(|i| self.basis(i)).collect();
        for i in 0..r {
            for j in 0..r {
                if self.mul(&b[i], &b[j]) != self.mul(&b[j], &b[i]) {
                    return Err(format!("not commutative at ({i},{j})"));
                }
                if self.gram[i][j] != self.gram[j][i] {
                    return Err(format!("pairing not symmetric at ({i},{j})"));
                }
                for k in 0..r {
                    let ij = self.mul(&b[i], &b[j]);
                    let jk = self.mul(&b[j], &b[k]);
                    if self.mul(&ij, &b[k]) != self.mul(&b[i], &jk) {
                        return Err(format!("not associative at ({i},{j},{k})"));
                    }
                    if self.pair(&ij, &b[k]) != self.pair(&b[i], &jk) {
                        return Err(format!("Frobenius identity fails at ({i},{j},{k})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// JSON document with rational entries as `"a/b"` strings.
    pub fn to_json(&self) -> Value {
        let lam = |p: &LamPoly| -> Value {
            if self.n_lambda == 0 {
                Value::String(rational::to_canonical(&lam_at_zero(p)))
            } else {
                Value::Array(p.iter().map(|(e, c)| json!({"lambda": e, "coeff": rational::to_canonical(c)})).collect())
            }
        };
        let r = self.rank();
        let mut products = Vec::new();
        for i in 0..r {
            for j in 0..r {
                let coords: Vec<Value> = self.products[i][j].coords.iter().map(lam).collect();
                products.push(json!({"i": i, "j": j, "coords": coords}));
            }
        }
        let gram: Vec<Vec<Value>> = self.gram.iter().map(|row| row.iter().map(lam).collect()).collect();
        json!({
            "kind": format!("{:?}", self.kind),
            "n": self.n,
            "basis": self.labels,
            "grading": self.grading,
            "divisor_indices": self.divisor_indices,
            "novikov_rank": self.novikov_rank,
            "n_lambda": self.n_lambda,
            "structure_constants": products,
            "gram": gram,
        })
    }
}

/// Inverse of a matrix over `Q[[λ]]` modulo `λ`-degree `order + 1`.
pub fn invert_lam_matrix(m: &[Vec<LamPoly>], n_lambda: usize, order: u32) -> Result<Vec<Vec<LamPoly>>> {
    let r = m.len();
    let m0: Vec<Vec<Rat>> = m.iter().map(|row| row.iter().map(lam_at_zero).collect()).collect();
    let inv0 = invert_rat_matrix(&m0).ok_or(Error::SingularPairing)?;
    let inv0_l: Vec<Vec<LamPoly>> =
        inv0.iter().map(|row| row.iter().map(|c| lam_const(c.clone(), n_lambda)).collect()).collect();
    if n_lambda == 0 {
        return Ok(inv0_l);
    }
    // M = M0 (I + N), N = M0^{-1}(M - M0);  M^{-1} = Σ (-N)^k M0^{-1}
    let mut rest = m.to_vec();
    for (i, row) in rest.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = lam_add(e, &lam_const(-m0[i][j].clone(), n_lambda));
        }
    }
    let neg_n = lam_matmul(&inv0_l, &rest, order);
    let neg_n: Vec<Vec<LamPoly>> = neg_n
        .iter()
        .map(|row| row.iter().map(|p| p.iter().map(|(e, c)| (e.clone(), -c)).collect()).collect())
        .collect();
    let mut acc = inv0_l.clone();
    let mut term = inv0_l;
    for _ in 0..order {
        term = lam_matmul(&neg_n, &term, order);
        for i in 0..r {
            for j in 0..r {
                acc[i][j] = lam_add(&acc[i][j], &term[i][j]);
            }
        }
    }
    Ok(acc)
}

fn lam_matmul(a: &[Vec<LamPoly>], b: &[Vec<LamPoly>], order: u32) -> Vec<Vec<LamPoly>> {
    let r = a.len();
    let mut out = vec![vec![LamPoly::new(); r]; r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                out[i][j] = lam_add(&out[i][j], &lam_truncate(&lam_mul(&a[i][k], &b[k][j]), order));
            }
        }
    }
    out
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert_rat_matrix(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { one() } else { zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !is_zero(&a[r][col]))?;
        a.swap(col, piv);
        let inv = recip(&a[col][col]);
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    Ok(())
}

fn power_labels(sym: &str, n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => sym.to_string(),
            _ => format!("{sym}^{i}"),
        })
        .collect()
}

/// `H^*(CP^{n-1}) = Q[p]/(p^n)` with `∫ p^{n-1} = 1`.
pub fn projective_ring(n: usize) -> Result<RingPresentation> {
    check_n(n)?;
    let products = (0..n)
        .map(|i| (0..n).map(|j| if i + j < n { RingElem::basis(n, i + j, 0) } else { RingElem::zero(n) }).collect())
        .collect();
    let gram =
        (0..n).map(|i| (0..n).map(|j| lam_const(if i + j == n - 1 { one() } else { zero() }, 0)).collect()).collect();
    Ok(RingPresentation {
        kind: RingKind::Cohomology,
        n,
        labels: power_labels("p", n),
        grading: (0..n as u32).map(|i| 2 * i).collect(),
        products,
        gram,
        divisor_indices: if n > 1 { vec![1] } else { vec![] },
        novikov_rank: 1,
        n_lambda: 0,
    })
}

/// `T^n`-equivariant cohomology of `CP^{n-1}`: `p^n = Σ (-1)^{i+1} e_i(λ) p^{n-i}`.
pub fn equivariant_projective_ring(n: usize) -> Result<RingPresentation> {
    check_n(n)?;
    // reduce p^k for k < 2n-1 into the basis 1..p^{n-1}
    let mut powers: Vec<RingElem> = (0..n).map(|i| RingElem::basis(n, i, n)).collect();
    let relation: Vec<LamPoly> = (0..n)
        .map(|j| {
            // coefficient of p^j in p^n
            let i = n - j;
            let e = elementary(i, n);
            if i % 2 == 1 {
                e
            } else {
                e.into_iter().map(|(k, c)| (k, -c)).collect()
            }
        })
        .collect();
    for k in n..(2 * n - 1).max(n) {
        // p^k = p * p^{k-1}
        let prev = &powers[k - 1];
        let mut next = RingElem::zero(n);
        for j in 0..n {
            if prev.coords[j].is_empty() {
                continue;
            }
            if j + 1 < n {
                next.coords[j + 1] = lam_add(&next.coords[j + 1], &prev.coords[j]);
            } else {
                for (t, rel) in relation.iter().enumerate() {
                    next.coords[t] = lam_add(&next.coords[t], &lam_mul(&prev.coords[j], rel));
                }
            }
        }
        powers.push(next);
    }
    let products: Vec<Vec<RingElem>> = (0..n).map(|i| (0..n).map(|j| powers[i + j].clone()).collect()).collect();
    let gram = (0..n).map(|i| (0..n).map(|j| powers[i + j].coords[n - 1].clone()).collect()).collect();
    Ok(RingPresentation {
        kind: RingKind::Equivariant,
        n,
        labels: power_labels("p", n),
        grading: (0..n as u32).map(|i| 2 * i).collect(),
        products,
        gram,
        divisor_indices: if n > 1 { vec![1] } else { vec![] },
        novikov_rank: 1,
        n_lambda: n,
    })
}

/// `K^0(CP^{n-1}) = Q[P]/((1-P)^n)` in the basis `(1-P)^i`, with the pairing
/// `χ(A ⊗ B)` computed by Hirzebruch–Riemann–Roch.
pub fn ktheory_projective_ring(n: usize) -> Result<RingPresentation> {
    check_n(n)?;
    let products = (0..n)
        .map(|i| (0..n).map(|j| if i + j < n { RingElem::basis(n, i + j, 0) } else { RingElem::zero(n) }).collect())
        .collect();
    let chi: Vec<Rat> = (0..2 * n).map(|k| euler_characteristic_eps_power(n, k)).collect();
    let gram = (0..n).map(|i| (0..n).map(|j| lam_const(chi[i + j].clone(), 0)).collect()).collect();
    let labels = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "(1-P)".to_string(),
            _ => format!("(1-P)^{i}"),
        })
        .collect();
    Ok(RingPresentation {
        kind: RingKind::KTheory,
        n,
        labels,
        grading: (0..n as u32).collect(),
        products,
        gram,
        divisor_indices: if n > 1 { vec![1] } else { vec![] },
        novikov_rank: 1,
        n_lambda: 0,
    })
}

/// The field of rationals as a rank-one ring.
pub fn scalar_ring() -> RingPresentation {
    RingPresentation {
        kind: RingKind::Scalar,
        n: 1,
        labels: vec!["1".into()],
        grading: vec![0],
        products: vec![vec![RingElem::basis(1, 0, 0)]],
        gram: vec![vec![lam_const(one(), 0)]],
        divisor_indices: vec![],
        novikov_rank: 1,
        n_lambda: 0,
    }
}

/// Truncated power series in `p` (degree < n), dense.
fn ps_mul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![zero(); n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < n {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn ps_inv(a: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![zero(); n];
    let a0inv = recip(&a[0]);
    out[0] = a0inv.clone();
    for k in 1..n {
        let mut s = zero();
        for j in 1..=k {
            s += &a[j] * &out[k - j];
        }
        out[k] = -(s * &a0inv);
    }
    out
}

/// `χ(CP^{n-1}; (1-P)^k) = ∫ ch(1-P)^k td`, with `ch(P) = e^{-p}` and
/// `td = (p/(1-e^{-p}))^n`.
fn euler_characteristic_eps_power(n: usize, k: usize) -> Rat {
    if k >= n {
        return zero();
    }
    // f(p) = (1 - e^{-p}) / p = Σ (-1)^m p^m / (m+1)!
    let f: Vec<Rat> = (0..n)
        .map(|m| {
            let s = if m % 2 == 0 { one() } else { -one() };
            s / factorial(m as u32 + 1)
        })
        .collect();
    // integrand p^k f^k · f^{-n} p^n / p^n ... = p^k f^{k-n}; read coefficient of p^{n-1}
    let finv = ps_inv(&f, n);
    let mut acc: Vec<Rat> = (0..n).map(|i| if i == 0 { one() } else { zero() }).collect();
    for _ in 0..(n - k) {
        acc = ps_mul(&acc, &finv, n);
    }
    acc[n - 1 - k].clone()
}

/// `χ(CP^{n-1}; O(m)) = C(n-1+m, n-1)` for `m ≥ 0`.
pub fn chi_line_bundle(n: usize, m: i64) -> Rat {
    binomial(n as i64 - 1 + m, n as i64 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn consts(g: &[Vec<LamPoly>]) -> Vec<Vec<Rat>> {
        g.iter().map(|r| r.iter().map(lam_at_zero).collect()).collect()
    }

    #[test]
    fn projective_pairings() {
        let r2 = projective_ring(2).unwrap();
        assert_eq!(consts(&r2.gram), vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        let r3 = projective_ring(3).unwrap();
        assert_eq!(r3.mul(&r3.basis(1), &r3.basis(2)), RingElem::zero(3));
        assert_eq!(lam_at_zero(&r3.pair(&r3.basis(1), &r3.basis(1))), int(1));
        assert_eq!(lam_at_zero(&r3.pair(&r3.basis(0), &r3.basis(1))), int(0));
        assert!(projective_ring(0).is_err());
    }

    #[test]
    fn dual_bases() {
        let r3 = projective_ring(3).unwrap();
        let d = r3.dual_basis(0).unwrap();
        for (i, e) in d.iter().enumerate() {
            assert_eq!(*e, r3.basis(2 - i));
        }
        let k2 = ktheory_projective_ring(2).unwrap();
        let d = k2.dual_basis(0).unwrap();
        // dual of (1, 1-P) is (1-P, P) = (1-P, 1 - (1-P))
        assert_eq!(d[0].at_lambda_zero(), vec![int(0), int(1)]);
        assert_eq!(d[1].at_lambda_zero(), vec![int(1), int(-1)]);
    }

    #[test]
    fn ktheory_gram_cp1() {
        let k2 = ktheory_projective_ring(2).unwrap();
        assert_eq!(consts(&k2.gram), vec![vec![int(1), int(1)], vec![int(1), int(0)]]);
    }

    #[test]
    fn ktheory_gram_matches_line_bundle_euler_characteristics() {
        // χ(P^{-m}) = χ(O(m)) = C(n-1+m, n-1); expand P^j = (1-ε)^j
        for n in 1..=4usize {
            let k = ktheory_projective_ring(n).unwrap();
            for j in 0..n as i64 {
                // χ(P^j) = χ(O(-j)); for 0 ≤ j < n this is 1 if j = 0, else 0
                let mut chi = zero();
                for i in 0..n {
                    let c = binomial(j, i as i64) * if i % 2 == 0 { one() } else { -one() };
                    chi += c * lam_at_zero(&k.gram[0][i]);
                }
                let expected = if j == 0 { one() } else { zero() };
                assert_eq!(chi, expected, "n={n} j={j}");
            }
            assert_eq!(lam_at_zero(&k.gram[0][0]), chi_line_bundle(n, 0));
        }
    }

    #[test]
    fn equivariant_relation_and_degeneration() {
        let e2 = equivariant_projective_ring(2).unwrap();
        let p2 = e2.mul(&e2.basis(1), &e2.basis(1));
        // p^2 = (λ1+λ2) p - λ1 λ2
        let mut c1 = LamPoly::new();
        c1.insert(vec![1, 0], one());
        c1.insert(vec![0, 1], one());
        let mut c0 = LamPoly::new();
        c0.insert(vec![1, 1], -one());
        assert_eq!(p2.coords, vec![c0, c1]);
        for n in 1..=4 {
            let e = equivariant_projective_ring(n).unwrap();
            let c = projective_ring(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(e.products[i][j].at_lambda_zero(), c.products[i][j].at_lambda_zero());
                    assert_eq!(lam_at_zero(&e.gram[i][j]), lam_at_zero(&c.gram[i][j]));
                }
            }
        }
    }

    #[test]
    fn equivariant_cube_reduction() {
        // p^3 = ((λ1+λ2)^2 - λ1λ2) p - (λ1+λ2) λ1 λ2
        let e2 = equivariant_projective_ring(2).unwrap();
        let p = e2.basis(1);
        let p3 = e2.mul(&e2.mul(&p, &p), &p);
        let mut lin = LamPoly::new();
        lin.insert(vec![2, 0], one());
        lin.insert(vec![1, 1], one());
        lin.insert(vec![0, 2], one());
        let mut cst = LamPoly::new();
        cst.insert(vec![2, 1], -one());
        cst.insert(vec![1, 2], -one());
        assert_eq!(p3.coords, vec![cst, lin]);
    }

    #[test]
    fn axioms_hold_for_all_constructors() {
        for n in 1..=4 {
            projective_ring(n).unwrap().check_axioms().unwrap();
            ktheory_projective_ring(n).unwrap().check_axioms().unwrap();
            equivariant_projective_ring(n).unwrap().check_axioms().unwrap();
        }
    }

    #[test]
    fn dual_basis_completeness() {
        for ring in [projective_ring(3).unwrap(), ktheory_projective_ring(3).unwrap()] {
            let d = ring.dual_basis(0).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    let v = lam_at_zero(&ring.pair(&ring.basis(a), &d[b]));
                    assert_eq!(v, if a == b { one() } else { zero() });
                }
            }
        }
        let e = equivariant_projective_ring(2).unwrap();
        let d = e.dual_basis(3).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let v = lam_truncate(&e.pair(&e.basis(a), &d[b]), 3);
                assert_eq!(v, lam_const(if a == b { one() } else { zero() }, 2));
            }
        }
        let _ = rat(1, 2);
    }
}
