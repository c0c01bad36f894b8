//! Density matrices, von Neumann entropy and the qubit operator-basis
//! coordinates `{I, σ3, σ1, σ2}`.

use num_complex::Complex64;
use thiserror::Error;

use crate::numkit::{self, c, CMatrix, NumError, ONE, PSD_TOL, ZERO};

/// Tolerance for the density-matrix invariants.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros in entropy sums.
pub const ENTROPY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("density matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("density matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates `mat` against the density-matrix invariants at [`STATE_TOL`].
    pub fn new(mat: CMatrix) -> Result<Self, StateError> {
        Self::with_tol(mat, STATE_TOL)
    }

    pub fn with_tol(mat: CMatrix, tol: f64) -> Result<Self, StateError> {
        if !mat.is_square() {
            return Err(StateError::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        let dev = mat.hermitian_deviation();
        if dev > tol {
            return Err(StateError::NotHermitian(dev));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > tol {
            return Err(StateError::BadTrace(tr.re));
        }
        let eig = numkit::hermitian_eig(&mat, tol)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(StateError::NotPsd(min));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is known to be a density matrix by construction.
    pub(crate) fn from_trusted(mat: CMatrix) -> Self {
        debug_assert!(mat.is_square());
        Self { mat }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self, StateError> {
        let norm = psi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 {
            return Err(StateError::DimMismatch("zero state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            mat: CMatrix::outer(&v, &v),
        })
    }

    /// `|k><k|` in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut mat = CMatrix::zeros(dim, dim);
        mat[(k, k)] = ONE;
        Self { mat }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self, StateError> {
        Self::new(CMatrix::diag_real(probs))
    }

    /// Qubit state `[[rho11, rho12],[rho12*, 1 - rho11]]`.
    pub fn qubit(rho11: f64, rho12: Complex64) -> Result<Self, StateError> {
        Self::new(CMatrix::new(
            2,
            2,
            vec![c(rho11, 0.0), rho12, rho12.conj(), c(1.0 - rho11, 0.0)],
        )?)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Eigenvalues (descending) clipped at zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, StateError> {
        let eig = numkit::hermitian_eig(&self.mat, STATE_TOL)?;
        Ok(numkit::clip_psd(&eig.values, PSD_TOL)?)
    }

    /// `U rho U^H`
    pub fn transform(&self, u: &CMatrix) -> Self {
        Self {
            mat: &(u * &self.mat) * &u.adjoint(),
        }
    }
}

/// Shannon entropy in bits of a list of probabilities, skipping entries at
/// or below [`ENTROPY_FLOOR`].
pub fn shannon_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > ENTROPY_FLOOR)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Von Neumann entropy `-Tr rho log2 rho` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, StateError> {
    Ok(shannon_bits(&rho.eigenvalues()?))
}

/// Entrywise complex conjugate in the computational basis.
pub fn conjugate_state(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix {
        mat: rho.mat.conj(),
    }
}

/// Qubit coordinates in the operator basis `{I, σ3, σ1, σ2}`:
/// `rho = (I + r1 σ3 + r2 σ1 + r3 σ2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBloch {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl QubitBloch {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Self {
        Self { r1, r2, r3 }
    }

    pub fn norm(&self) -> f64 {
        (self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3).sqrt()
    }
}

/// Pauli matrices in the `{I, σ3, σ1, σ2}` order.
pub fn operator_basis() -> [CMatrix; 4] {
    let i = c(0.0, 1.0);
    [
        CMatrix::identity(2),
        CMatrix::new(2, 2, vec![ONE, ZERO, ZERO, -ONE]).unwrap(),
        CMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap(),
        CMatrix::new(2, 2, vec![ZERO, -i, i, ZERO]).unwrap(),
    ]
}

pub fn bloch_to_density(b: QubitBloch) -> Result<DensityMatrix, StateError> {
    let n = b.norm();
    if n > 1.0 + STATE_TOL {
        return Err(StateError::BlochNormExceeded(n));
    }
    let [id, s3, s1, s2] = operator_basis();
    let m = &(&(&id + &s3.scale_real(b.r1)) + &s1.scale_real(b.r2)) + &s2.scale_real(b.r3);
    Ok(DensityMatrix::from_trusted(m.scale_real(0.5)))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<QubitBloch, StateError> {
    if rho.dim() != 2 {
        return Err(StateError::DimMismatch(format!(
            "Bloch coordinates need a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let [_, s3, s1, s2] = operator_basis();
    let coord = |s: &CMatrix| (s * rho.matrix()).trace().re;
    Ok(QubitBloch::new(coord(&s3), coord(&s1), coord(&s2)))
}
