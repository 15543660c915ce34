//! Square matrices of scalar series, plus the polarization (`+`/`-` split)
//! shared by the cohomological and K-theoretic loop spaces.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::ring::invert_rat_matrix;
use crate::series::{Algebra, Coeff, HSeries, KSeries, Mono, Series};

/// The two loop-space polarizations: `H = H₊ ⊕ H₋` and `K = K₊ ⊕ K₋`.
pub trait Polarized: Sized {
    /// `(plus, minus)` parts.
    fn split(&self) -> (Self, Self);
    fn plus(&self) -> Self {
        self.split().0
    }
    fn minus(&self) -> Self {
        self.split().1
    }
}

impl Polarized for HSeries {
    fn split(&self) -> (Self, Self) {
        (self.h_plus(), self.h_minus())
    }
}

impl Polarized for KSeries {
    fn split(&self) -> (Self, Self) {
        self.k_split()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<C: Coeff> {
    pub rows: Vec<Vec<Series<C>>>,
}

pub type HMat = Mat<Rat>;
pub type KMat = Mat<crate::ratfn::RatFn>;

impl<C: Coeff> Mat<C> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Series<C>) -> Self {
        Mat { rows: (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn identity(alg: &Arc<Algebra>, n: usize) -> Self {
        Mat::from_fn(n, |i, j| if i == j { Series::one(alg) } else { Series::zero(alg) })
    }

    pub fn zero(alg: &Arc<Algebra>, n: usize) -> Self {
        Mat::from_fn(n, |_, _| Series::zero(alg))
    }

    pub fn from_rat(alg: &Arc<Algebra>, m: &[Vec<Rat>]) -> Self {
        Mat::from_fn(m.len(), |i, j| Series::constant(alg, C::from_rat(m[i][j].clone())))
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn alg(&self) -> &Arc<Algebra> {
        self.rows[0][0].alg()
    }

    pub fn get(&self, i: usize, j: usize) -> &Series<C> {
        &self.rows[i][j]
    }

    pub fn map(&self, f: impl Fn(&Series<C>) -> Series<C>) -> Self {
        Mat { rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Series<C>) -> Result<Series<C>>) -> Result<Self> {
        Ok(Mat { rows: self.rows.iter().map(|r| r.iter().map(&f).collect::<Result<_>>()).collect::<Result<_>>()? })
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.n(), |i, j| self.rows[j][i].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|e| e.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat::from_fn(self.n(), |i, j| &self.rows[i][j] + &o.rows[i][j])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat::from_fn(self.n(), |i, j| &self.rows[i][j] - &o.rows[i][j])
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n();
        Mat::from_fn(n, |i, j| {
            let mut acc = Series::zero(self.alg());
            for k in 0..n {
                if !self.rows[i][k].is_zero() && !o.rows[k][j].is_zero() {
                    acc = &acc + &(&self.rows[i][k] * &o.rows[k][j]);
                }
            }
            acc
        })
    }

    /// Terms of filtration grade zero, entrywise.
    pub fn grade_zero(&self) -> Self {
        self.map(|e| e.grade_zero_part())
    }

    pub fn is_grade_zero(&self) -> bool {
        self.rows.iter().flatten().all(|e| e.min_grade().is_none_or(|g| g == 0) && *e == e.grade_zero_part())
    }

    /// The matrix as rationals, if every entry is a rational constant.
    pub fn as_rat(&self) -> Option<Vec<Vec<Rat>>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| match e.terms().len() {
                        0 => Some(crate::rational::zero()),
                        1 => {
                            let ((m, comp), c) = e.terms().iter().next().unwrap();
                            (*m == Mono::ONE && *comp == 0).then(|| c.as_rat()).flatten()
                        }
                        _ => None,
                    })
                    .collect()
            })
            .collect()
    }

    /// Determinant by cofactor expansion (small ranks only).
    pub fn det(&self) -> Series<C> {
        fn rec<C: Coeff>(m: &Mat<C>, rows: &[usize], cols: &[usize]) -> Series<C> {
            if rows.len() == 1 {
                return m.rows[rows[0]][cols[0]].clone();
            }
            let mut acc = Series::zero(m.alg());
            for (k, &c) in cols.iter().enumerate() {
                let e = &m.rows[rows[0]][c];
                if e.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let minor = e * &rec(m, &rows[1..], &rest);
                acc = if k % 2 == 0 { &acc + &minor } else { &acc - &minor };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.n()).collect();
        rec(self, &idx, &idx)
    }

    fn adjugate(&self) -> Self {
        let n = self.n();
        if n == 1 {
            return Mat::identity(self.alg(), 1);
        }
        Mat::from_fn(n, |i, j| {
            let minor = Mat {
                rows: (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| self.rows[r][c].clone()).collect())
                    .collect(),
            };
            let d = minor.det();
            if (i + j) % 2 == 0 {
                d
            } else {
                d.neg()
            }
        })
    }

    /// Inverse of a matrix whose grade-zero part is invertible.
    ///
    /// A rational grade-zero part is inverted by Gauss–Jordan; otherwise
    /// through the adjugate and [`Series::invert_unit`] of the determinant.
    /// Higher grades follow by the terminating Neumann series.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = self.grade_zero();
        let a0_inv = match a0.as_rat() {
            Some(r) => {
                let inv = invert_rat_matrix(&r)
                    .ok_or_else(|| Error::SingularLeadingTerm("leading matrix is singular".into()))?;
                Mat::from_rat(self.alg(), &inv)
            }
            None => {
                if self.n() > 6 {
                    return Err(Error::InvalidArgument("non-constant leading matrices limited to rank 6".into()));
                }
                let d = a0.det().invert_unit().map_err(|e| Error::SingularLeadingTerm(e.to_string()))?;
                a0.adjugate().map(|x| x * &d)
            }
        };
        let rest = self.sub(&a0);
        if rest.is_zero() {
            return Ok(a0_inv);
        }
        // A⁻¹ = Σ (-A0⁻¹ R)^k A0⁻¹
        let step = a0_inv.mul(&rest).scale(&crate::rational::int(-1));
        let mut acc = a0_inv.clone();
        let mut term = a0_inv.clone();
        for _ in 0..self.alg().nilpotency_bound() {
            term = step.mul(&term);
            if term.is_zero() {
                return Ok(acc);
            }
            acc = acc.add(&term);
        }
        Err(Error::SingularLeadingTerm("higher-order part is not nilpotent".into()))
    }
}

impl<C: Coeff> Mat<C>
where
    Series<C>: Polarized,
{
    pub fn plus(&self) -> Self {
        self.map(|e| e.plus())
    }

    pub fn minus(&self) -> Self {
        self.map(|e| e.minus())
    }

    pub fn is_plus(&self) -> bool {
        self.minus().is_zero()
    }
}

impl HMat {
    /// `z ↦ -z` entrywise.
    pub fn negate_z(&self) -> Self {
        self.map(|e| e.negate_z())
    }

    pub fn z_coeff(&self, k: i16) -> Self {
        self.map(|e| e.z_coeff(k))
    }
}
