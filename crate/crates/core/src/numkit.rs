//! Dense complex linear algebra for the small matrices used throughout the
//! crate (side lengths up to about 16).
//!
//! Everything here is a pure function over [`CMatrix`] values: Kronecker
//! products, partial traces, a cyclic Jacobi eigensolver for Hermitian
//! matrices, a scaling-and-squaring matrix exponential and the PSD fourth
//! root that shows up in the joint input-output state.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Off-diagonal Frobenius norm below which the Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-12;
/// Sweep cap for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues in `[-PSD_TOL, 0)` are clipped to zero.
pub const PSD_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |m - m^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is not positive semidefinite (eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("invalid shape {rows}x{cols} for {len} entries")]
    InvalidShape {
        rows: usize,
        cols: usize,
        len: usize,
    },
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, NumError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(NumError::InvalidShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, NumError> {
        Self::new(rows, cols, entries.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, NumError> {
        let r = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != ncols) {
            return Err(NumError::DimMismatch("ragged rows".into()));
        }
        Self::new(r, ncols, rows.concat())
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        m
    }

    /// `|u><v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self, NumError> {
        let ncols = columns.len();
        let nrows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != nrows) {
            return Err(NumError::DimMismatch("columns of unequal length".into()));
        }
        if ncols == 0 || nrows == 0 {
            return Err(NumError::InvalidShape {
                rows: nrows,
                cols: ncols,
                len: 0,
            });
        }
        Ok(Self::from_fn(nrows, ncols, |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(c(k, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m - m^H|`, infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &CMatrix) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    /// Sub-matrix of `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product; entry `(r_a*rows_b + r_b, c_a*cols_b + c_b)` is `a[r_a,c_a]*b[r_b,c_b]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of `m` on `C^d1 ⊗ C^d2`, keeping the requested factor.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Keep) -> Result<CMatrix, NumError> {
    let (d1, d2) = dims;
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if d1 == 0 || d2 == 0 || m.rows != d1 * d2 {
        return Err(NumError::DimMismatch(format!(
            "side {} does not factor as {d1}*{d2}",
            m.rows
        )));
    }
    let out = match keep {
        Keep::First => CMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Keep::Second => CMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
        }),
    };
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix; values descending, vectors in columns.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigDecomposition {
    /// `V diag(f(λ)) V^H`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// The input is symmetrized as `(m + m^H)/2` after the Hermiticity check so
/// that deviations within `tol` do not leak into the result.
pub fn hermitian_eig(m: &CMatrix, tol: f64) -> Result<EigDecomposition, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(NumError::NotHermitian { deviation });
    }
    let n = m.rows;
    let mut a = (m + &m.adjoint()).scale_real(0.5);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&a) <= JACOBI_TOL * scale;
    let mut sweep = 0;
    while !converged {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(NumError::NoConvergence { sweeps: sweep });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // G[p,p] = G[q,q] = cs, G[p,q] = sn*phase, G[q,p] = -sn*conj(phase)
                let g_pq = phase * sn;
                let g_qp = -phase.conj() * sn;
                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cs + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * cs;
                }
                // A <- G^H A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * cs + aqk * g_qp.conj();
                    a[(q, k)] = apk * g_pq.conj() + aqk * cs;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                // V <- V G
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cs + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * cs;
                }
            }
        }
        sweep += 1;
        converged = off_norm(&a) <= JACOBI_TOL * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the original column order among equal eigenvalues
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigDecomposition { values, vectors })
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn matrix_exp(m: &CMatrix) -> Result<CMatrix, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let norm = m.frobenius_norm();
    if norm == 0.0 {
        return Ok(CMatrix::identity(n));
    }
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let a = m.scale_real(0.5f64.powi(squarings as i32));
    let mut result = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() < 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Hermitian PSD fourth root `rho^{1/4}`.
pub fn matrix_quarter_power(rho: &CMatrix, tol: f64) -> Result<CMatrix, NumError> {
    let eig = hermitian_eig(rho, tol)?;
    let clipped = clip_psd(&eig.values, tol)?;
    let clipped = EigDecomposition {
        values: clipped,
        vectors: eig.vectors,
    };
    Ok(clipped.reconstruct_with(|x| x.powf(0.25)))
}

/// Zeroes eigenvalues in `[-tol, 0)`; fails for anything below `-tol`.
pub fn clip_psd(values: &[f64], tol: f64) -> Result<Vec<f64>, NumError> {
    values
        .iter()
        .map(|&x| {
            if x < -tol {
                Err(NumError::NotPsd { min_eig: x })
            } else {
                Ok(x.max(0.0))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sigma1() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn random_hermitian(n: usize, entries: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        let mut it = entries.iter().copied().cycle();
        for i in 0..n {
            m[(i, i)] = c(it.next().unwrap(), 0.0);
            for j in (i + 1)..n {
                let z = c(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn eig_identity() {
        let e = hermitian_eig(&CMatrix::identity(2), 1e-12).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.max_abs_diff(&CMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn eig_already_diagonal() {
        let e = hermitian_eig(&CMatrix::diag_real(&[0.75, 0.25]), 1e-12).unwrap();
        assert_eq!(e.values, vec![0.75, 0.25]);
        assert!(e.vectors.max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn eig_sorts_descending() {
        let e = hermitian_eig(&CMatrix::diag_real(&[0.25, 0.75]), 1e-12).unwrap();
        assert_eq!(e.values, vec![0.75, 0.25]);
        assert_abs_diff_eq!(e.vectors[(1, 0)].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn eig_half_projector() {
        let m = CMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let e = hermitian_eig(&m, 1e-12).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 0.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // eigenvectors fixed up to a phase
        let v0 = e.vectors.column(0);
        let v1 = e.vectors.column(1);
        let ov0 = (v0[0] * s + v0[1] * s).norm();
        let ov1 = (v1[0] * s - v1[1] * s).norm();
        assert_abs_diff_eq!(ov0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ov1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&rect, 1e-12),
            Err(NumError::NotSquare { .. })
        ));
        let m = CMatrix::from_real(2, 2, &[1.0, 0.3, 0.0, 1.0]).unwrap();
        assert!(matches!(
            hermitian_eig(&m, 1e-12),
            Err(NumError::NotHermitian { .. })
        ));
    }

    #[test]
    fn eig_complex_offdiagonal() {
        // [[1, i],[-i, 1]] has eigenvalues 2 and 0
        let m = CMatrix::new(2, 2, vec![ONE, c(0.0, 1.0), c(0.0, -1.0), ONE]).unwrap();
        let e = hermitian_eig(&m, 1e-12).unwrap();
        assert_abs_diff_eq!(e.values[0], 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e.values[1], 0.0, epsilon = 1e-13);
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp(&CMatrix::zeros(4, 4)).unwrap();
        assert_eq!(e, CMatrix::identity(4));
    }

    #[test]
    fn exp_of_diagonal() {
        let e = matrix_exp(&CMatrix::diag_real(&[-1.0, -2.0])).unwrap();
        assert_abs_diff_eq!(e[(0, 0)].re, (-1.0f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 1)].re, (-2.0f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn exp_of_dephasing_generator() {
        // basis {I, s3, s1, s2}; gamma = 1, omega = 0, t = 1
        #[rustfmt::skip]
        let l = CMatrix::from_real(4, 4, &[
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, -1.0, 0.0,
            0.0, 0.0, 0.0, -1.0,
        ]).unwrap();
        let e = matrix_exp(&l).unwrap();
        assert_eq!(e.column(0), vec![ONE, ZERO, ZERO, ZERO]);
        assert_abs_diff_eq!(e[(2, 2)].re, (-1.0f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn exp_rotation_generator() {
        // exp([[0, -t],[t, 0]]) is a rotation by t
        let t = 2.7;
        let m = CMatrix::from_real(2, 2, &[0.0, -t, t, 0.0]).unwrap();
        let e = matrix_exp(&m).unwrap();
        let want = CMatrix::from_real(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]).unwrap();
        assert!(e.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(
            kron(&CMatrix::identity(2), &CMatrix::identity(2)),
            CMatrix::identity(4)
        );
        let p = 0.3;
        let k = kron(
            &CMatrix::diag_real(&[1.0, 0.0]),
            &CMatrix::diag_real(&[p, 1.0 - p]),
        );
        assert_eq!(k, CMatrix::diag_real(&[p, 1.0 - p, 0.0, 0.0]));
        let s = kron(&sigma1(), &sigma1());
        assert_eq!(s[(0, 3)], ONE);
        assert_eq!(s[(0, 0)], ZERO);
    }

    #[test]
    fn kron_row_index_arithmetic() {
        let a = CMatrix::from_fn(2, 3, |i, j| c((i * 3 + j) as f64, 0.0));
        let b = CMatrix::from_fn(3, 2, |i, j| c(0.0, (i * 2 + j + 1) as f64));
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for ra in 0..2 {
            for ca in 0..3 {
                for rb in 0..3 {
                    for cb in 0..2 {
                        assert_eq!(k[(ra * 3 + rb, ca * 2 + cb)], a[(ra, ca)] * b[(rb, cb)]);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let a = CMatrix::from_real(2, 2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let b = CMatrix::new(
            3,
            3,
            vec![
                c(0.2, 0.0),
                c(0.0, 0.1),
                ZERO,
                c(0.0, -0.1),
                c(0.5, 0.0),
                ZERO,
                ZERO,
                ZERO,
                c(0.3, 0.0),
            ],
        )
        .unwrap();
        let ab = kron(&a, &b);
        let pa = partial_trace(&ab, (2, 3), Keep::First).unwrap();
        assert!(pa.max_abs_diff(&a.scale(b.trace())) < 1e-15);
        let pb = partial_trace(&ab, (2, 3), Keep::Second).unwrap();
        assert!(pb.max_abs_diff(&b.scale(a.trace())) < 1e-15);
    }

    #[test]
    fn partial_trace_bell_state() {
        let mut bell = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = c(0.5, 0.0);
        }
        let r = partial_trace(&bell, (2, 2), Keep::First).unwrap();
        assert!(r.max_abs_diff(&CMatrix::diag_real(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_dim_mismatch() {
        let m = CMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, (3, 2), Keep::First),
            Err(NumError::DimMismatch(_))
        ));
    }

    #[test]
    fn quarter_power_examples() {
        let q = matrix_quarter_power(&CMatrix::diag_real(&[0.5, 0.5]), PSD_TOL).unwrap();
        let s = 2f64.powf(-0.25);
        assert!(q.max_abs_diff(&CMatrix::diag_real(&[s, s])) < 1e-14);

        let q = matrix_quarter_power(&CMatrix::diag_real(&[1.0, 0.0]), PSD_TOL).unwrap();
        assert!(q.max_abs_diff(&CMatrix::diag_real(&[1.0, 0.0])) < 1e-14);

        let q =
            matrix_quarter_power(&CMatrix::diag_real(&[1.0 / 16.0, 15.0 / 16.0]), PSD_TOL).unwrap();
        let want = CMatrix::diag_real(&[0.5, (15.0f64 / 16.0).powf(0.25)]);
        assert!(q.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn quarter_power_clips_roundoff_and_rejects_negative() {
        let q = matrix_quarter_power(&CMatrix::diag_real(&[1.0, -1e-14]), PSD_TOL).unwrap();
        assert_eq!(q[(1, 1)], ZERO);
        assert!(matches!(
            matrix_quarter_power(&CMatrix::diag_real(&[1.0, -1e-3]), PSD_TOL),
            Err(NumError::NotPsd { .. })
        ));
    }

    fn hermitian_strategy() -> impl Strategy<Value = CMatrix> {
        (1usize..=6, prop::collection::vec(-1.0f64..1.0, 64))
            .prop_map(|(n, entries)| random_hermitian(n, &entries))
    }

    proptest! {
        #[test]
        fn eig_reconstructs(m in hermitian_strategy()) {
            let e = hermitian_eig(&m, 1e-12).unwrap();
            prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-9);
            let n = m.rows();
            let vv = &e.vectors.adjoint() * &e.vectors;
            prop_assert!(vv.max_abs_diff(&CMatrix::identity(n)) < 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn exp_respects_direct_sums(a in hermitian_strategy(), b in hermitian_strategy()) {
            // anti-Hermitian generators keep the exponentials bounded
            let ia = a.scale(c(0.0, 1.0));
            let nb = b.scale_real(-0.7);
            let lhs = matrix_exp(&ia.direct_sum(&nb)).unwrap();
            let rhs = matrix_exp(&ia).unwrap().direct_sum(&matrix_exp(&nb).unwrap());
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }

        #[test]
        fn partial_trace_preserves_trace(m in hermitian_strategy(), n in hermitian_strategy()) {
            let k = kron(&m, &n);
            let dims = (m.rows(), n.rows());
            let t = k.trace();
            for keep in [Keep::First, Keep::Second] {
                let p = partial_trace(&k, dims, keep).unwrap();
                prop_assert!((p.trace() - t).norm() < 1e-12);
            }
        }

        #[test]
        fn quarter_power_fourth_power(m in hermitian_strategy()) {
            let rho = &m * &m.adjoint();
            let rho = rho.scale_real(1.0 / rho.trace().re.max(1e-12));
            let q = matrix_quarter_power(&rho, PSD_TOL).unwrap();
            let q2 = &q * &q;
            let q4 = &q2 * &q2;
            prop_assert!(q4.max_abs_diff(&rho) < 1e-9);
        }
    }
}
