//! Dense square matrices and the basic operations the rest of the crate
//! is built on: products, norms, LU inverses, the Neumann-series inverse,
//! commutators and the adjoint action.

use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use smallvec::SmallVec;

use crate::{eigen, Error, NumericOptions, Result};

type Storage = SmallVec<[f64; 16]>;

/// Dense `n × n` real matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Storage,
}

impl SquareMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(n: usize, entries: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("matrix dimension must be at least 1"));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SquareMatrix {
            n,
            data: Storage::from_slice(entries),
        })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        SquareMatrix {
            n,
            data: smallvec::smallvec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from a fixed-size array of rows.
    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        let mut data = Storage::with_capacity(N * N);
        for row in rows.iter() {
            data.extend_from_slice(row);
        }
        SquareMatrix { n: N, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &SquareMatrix) -> Self {
        self.check_dim(other);
        SquareMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Induced 2-norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        if self.n == 1 {
            return self.data[0].abs();
        }
        let gram = &self.transpose() * self;
        let top = eigen::symmetric_eigenvalues(&gram)
            .into_iter()
            .fold(0.0_f64, f64::max);
        libm::sqrt(top.max(0.0))
    }

    /// `‖self − Iₙ‖` in the induced 2-norm.
    pub fn distance_to_identity(&self) -> f64 {
        (self - &Self::identity(self.n)).operator_norm()
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn determinant(&self) -> f64 {
        match Lu::factor(self) {
            Ok(lu) => lu.determinant(),
            Err(_) => 0.0,
        }
    }

    /// `A · B⁻¹` via an LU solve on the transposed system.
    pub fn solve_right(&self, b: &SquareMatrix) -> Result<SquareMatrix> {
        self.check_same(b)?;
        let lu = Lu::factor(&b.transpose())?;
        Ok(lu.solve(&self.transpose()).transpose())
    }

    /// `A⁻¹ · B` via an LU solve.
    pub fn solve_left(&self, b: &SquareMatrix) -> Result<SquareMatrix> {
        self.check_same(b)?;
        Ok(Lu::factor(self)?.solve(b))
    }

    pub(crate) fn check_same(&self, other: &SquareMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    #[inline]
    fn check_dim(&self, other: &SquareMatrix) {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{:?}", self[(i, j)])?;
            }
        }
        f.write_str("]")
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        self.add_scaled(-1.0, rhs)
    }
}

impl AddAssign<&SquareMatrix> for SquareMatrix {
    fn add_assign(&mut self, rhs: &SquareMatrix) {
        self.check_dim(rhs);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
    }
}

impl SubAssign<&SquareMatrix> for SquareMatrix {
    fn sub_assign(&mut self, rhs: &SquareMatrix) {
        self.check_dim(rhs);
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        self.scale(-1.0)
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        self.check_dim(rhs);
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul<&SquareMatrix> for f64 {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        rhs.scale(self)
    }
}

/// LU factorisation with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: SquareMatrix,
    perm: SmallVec<[usize; 8]>,
    sign: f64,
}

impl Lu {
    /// Factors `a`; fails with [`Error::Singular`] when a pivot falls below
    /// `n · ε · max|a|`.
    pub fn factor(a: &SquareMatrix) -> Result<Lu> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: SmallVec<[usize; 8]> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.max_abs();
        if scale == 0.0 {
            return Err(Error::Singular);
        }
        let threshold = (n as f64) * f64::EPSILON * scale;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn determinant(&self) -> f64 {
        (0..self.lu.n).map(|i| self.lu[(i, i)]).product::<f64>() * self.sign
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &SquareMatrix) -> SquareMatrix {
        let n = self.lu.n;
        let mut x = SquareMatrix::zeros(n);
        for col in 0..n {
            let mut y: SmallVec<[f64; 8]> = (0..n).map(|i| b[(self.perm[i], col)]).collect();
            for i in 0..n {
                let mut s = y[i];
                for j in 0..i {
                    s -= self.lu[(i, j)] * y[j];
                }
                y[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in (i + 1)..n {
                    s -= self.lu[(i, j)] * y[j];
                }
                y[i] = s / self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, col)] = y[i];
            }
        }
        x
    }

    pub fn inverse(&self) -> SquareMatrix {
        self.solve(&SquareMatrix::identity(self.lu.n))
    }
}

/// Inverse by LU with partial pivoting.
pub fn inverse_general(x: &SquareMatrix) -> Result<SquareMatrix> {
    Ok(Lu::factor(x)?.inverse())
}

/// Inverse through the Neumann series `Σ (Iₙ − X)ᵏ`, valid when
/// `‖X − Iₙ‖ < 1`.
///
/// The partial sums are accumulated in Euler's product form
/// `Π (Iₙ + M^(2ʲ))`, which doubles the number of series terms per
/// iteration; the iteration cap in `opts` counts product factors.
pub fn inverse_neumann(x: &SquareMatrix, opts: &NumericOptions) -> Result<SquareMatrix> {
    let n = x.dim();
    let id = SquareMatrix::identity(n);
    let m = &id - x;
    let radius = m.operator_norm();
    if radius >= 1.0 {
        return Err(Error::domain(alloc::format!(
            "Neumann inverse needs ‖X − I‖ < 1, got {radius}"
        )));
    }
    let mut sum = &id + &m;
    let mut power = m;
    for _ in 0..opts.max_iter {
        // the unsummed tail is bounded by ‖M^(2ʲ)‖² / (1 − ‖M‖)
        let p = power.operator_norm();
        if p * p / (1.0 - radius) <= opts.tol * sum.operator_norm() {
            return Ok(sum);
        }
        power = &power * &power;
        sum = &sum + &(&sum * &power);
    }
    Err(Error::NonConvergence {
        what: "Neumann inverse",
        iterations: opts.max_iter,
    })
}

/// `[A, B] = AB − BA`
pub fn commutator(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix> {
    a.check_same(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `Ad_X(A) = X A X⁻¹`
pub fn adjoint(x: &SquareMatrix, a: &SquareMatrix) -> Result<SquareMatrix> {
    x.check_same(a)?;
    (x * a).solve_right(x)
}
