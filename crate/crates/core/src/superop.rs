//! Superoperators stored as the block family `ŝ_kl = S(|k><l|)`.
//!
//! A channel `S` acts on an operator `X` as `S(X) = Σ_kl <k|X|l> ŝ_kl`,
//! where `|k>` runs over the declared input basis (computational unless set
//! otherwise). The block operator `(ŝ_kl)` doubles as the Choi matrix used
//! for the complete-positivity check.

use thiserror::Error;

use crate::numkit::{self, c, CMatrix, Keep, NumError, ONE, ZERO};
use crate::qstate::{self, DensityMatrix, StateError};

/// Tolerance used by constructors that must produce a valid channel.
pub const CHANNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuperopError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("superoperator is not trace preserving (max |Tr ŝ_kl - δ_kl| = {0:e})")]
    NotTp(f64),
    #[error("superoperator is not completely positive (min Choi eigenvalue {0:e})")]
    CpViolated(f64),
    #[error("matrix is not unitary (max |U^H U - I| = {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not an orthogonal projector (deviation {0:e})")]
    NotProjector(f64),
    #[error("basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Linear map from `dim_in x dim_in` to `dim_out x dim_out` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim_in: usize,
    dim_out: usize,
    /// `blocks[k * dim_in + l] = ŝ_kl`
    blocks: Vec<CMatrix>,
    /// Input basis vectors as columns.
    basis_in: CMatrix,
}

impl Superoperator {
    /// Assembles a superoperator from its blocks in the computational input
    /// basis. Only shapes are checked; use [`check_cp_tp`] to audit physicality.
    pub fn from_blocks(
        dim_in: usize,
        dim_out: usize,
        blocks: Vec<CMatrix>,
    ) -> Result<Self, SuperopError> {
        Self::from_blocks_in_basis(dim_in, dim_out, blocks, CMatrix::identity(dim_in.max(1)))
    }

    /// Like [`Superoperator::from_blocks`], with `ŝ_kl = S(|b_k><b_l|)` for the
    /// orthonormal columns `b_k` of `basis`.
    pub fn from_blocks_in_basis(
        dim_in: usize,
        dim_out: usize,
        blocks: Vec<CMatrix>,
        basis: CMatrix,
    ) -> Result<Self, SuperopError> {
        if dim_in == 0 || dim_out == 0 {
            return Err(SuperopError::DimMismatch(
                "dimensions must be positive".into(),
            ));
        }
        if blocks.len() != dim_in * dim_in {
            return Err(SuperopError::DimMismatch(format!(
                "expected {} blocks, got {}",
                dim_in * dim_in,
                blocks.len()
            )));
        }
        if let Some(b) = blocks
            .iter()
            .find(|b| b.rows() != dim_out || b.cols() != dim_out)
        {
            return Err(SuperopError::DimMismatch(format!(
                "block is {}x{}, expected {dim_out}x{dim_out}",
                b.rows(),
                b.cols()
            )));
        }
        if basis.rows() != dim_in || basis.cols() != dim_in {
            return Err(SuperopError::DimMismatch(
                "basis must be dim_in x dim_in".into(),
            ));
        }
        let dev = unitarity_deviation(&basis);
        if dev > CHANNEL_TOL {
            return Err(SuperopError::NotOrthonormal(dev));
        }
        Ok(Self {
            dim_in,
            dim_out,
            blocks,
            basis_in: basis,
        })
    }

    /// Builds the blocks from a closure `(k, l) -> ŝ_kl`.
    pub fn from_block_fn(
        dim_in: usize,
        dim_out: usize,
        f: impl FnMut(usize, usize) -> CMatrix,
    ) -> Result<Self, SuperopError> {
        Self::from_blocks(dim_in, dim_out, collect_blocks(dim_in, f))
    }

    /// `ŝ_kl = |k><l|`
    pub fn identity(dim: usize) -> Self {
        let blocks = collect_blocks(dim, |k, l| unit(dim, k, l));
        Self::from_blocks(dim, dim, blocks).expect("identity blocks are well formed")
    }

    /// Full dephasing in the computational basis, `ŝ_kl = δ_kl |k><k|`.
    pub fn reduction(dim: usize) -> Self {
        let blocks = collect_blocks(dim, |k, l| {
            if k == l {
                unit(dim, k, k)
            } else {
                CMatrix::zeros(dim, dim)
            }
        });
        Self::from_blocks(dim, dim, blocks).expect("reduction blocks are well formed")
    }

    /// The trace functional, `ŝ_kl = δ_kl` with a one-dimensional output.
    pub fn trace_functional(dim: usize) -> Self {
        let blocks = collect_blocks(dim, |k, l| {
            CMatrix::diag_real(&[if k == l { 1.0 } else { 0.0 }])
        });
        Self::from_blocks(dim, 1, blocks).expect("trace blocks are well formed")
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn block(&self, k: usize, l: usize) -> &CMatrix {
        &self.blocks[k * self.dim_in + l]
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn basis_in(&self) -> &CMatrix {
        &self.basis_in
    }

    /// `S(X)` for an arbitrary `dim_in x dim_in` operator.
    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix, SuperopError> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(SuperopError::DimMismatch(format!(
                "operator is {}x{}, channel input dimension is {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        // coefficients <b_k|X|b_l>
        let coeffs = &(&self.basis_in.adjoint() * x) * &self.basis_in;
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in 0..self.dim_in {
            for l in 0..self.dim_in {
                let w = coeffs[(k, l)];
                if w == ZERO {
                    continue;
                }
                out = &out + &self.block(k, l).scale(w);
            }
        }
        Ok(out)
    }

    /// `S(rho)`. The result is returned as a density matrix without
    /// re-validation; physicality follows from [`check_cp_tp`].
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, SuperopError> {
        let out = self.apply_operator(rho.matrix())?;
        Ok(DensityMatrix::from_trusted(out))
    }

    /// Same channel with blocks re-expressed in the computational input basis.
    pub fn to_computational(&self) -> Self {
        let d = self.dim_in;
        let blocks = collect_blocks(d, |a, b| {
            self.apply_operator(&unit(d, a, b))
                .expect("unit operator has input dimension")
        });
        Self {
            dim_in: d,
            dim_out: self.dim_out,
            blocks,
            basis_in: CMatrix::identity(d),
        }
    }

    /// Block operator `(ŝ_kl)` of side `dim_in * dim_out`, entry
    /// `[(k, a), (l, b)] = (ŝ_kl)_ab`.
    pub fn choi(&self) -> CMatrix {
        let (di, d) = (self.dim_in, self.dim_out);
        CMatrix::from_fn(di * d, di * d, |r, s| {
            let (k, a) = (r / d, r % d);
            let (l, b) = (s / d, s % d);
            self.block(k, l)[(a, b)]
        })
    }

    /// Maximum entrywise deviation between two channels, compared in the
    /// computational input basis.
    pub fn max_block_diff(&self, other: &Superoperator) -> f64 {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return f64::INFINITY;
        }
        let a = self.to_computational();
        let b = other.to_computational();
        a.blocks
            .iter()
            .zip(&b.blocks)
            .map(|(x, y)| x.max_abs_diff(y))
            .fold(0.0, f64::max)
    }

    fn ensure_channel(self) -> Result<Self, SuperopError> {
        let report = check_cp_tp(&self, CHANNEL_TOL);
        if !report.tp {
            return Err(SuperopError::NotTp(report.max_trace_dev));
        }
        if !report.cp {
            return Err(SuperopError::CpViolated(report.min_choi_eig));
        }
        Ok(self)
    }
}

fn collect_blocks(dim: usize, mut f: impl FnMut(usize, usize) -> CMatrix) -> Vec<CMatrix> {
    let mut blocks = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        for l in 0..dim {
            blocks.push(f(k, l));
        }
    }
    blocks
}

/// `|k><l|` on `C^dim`.
pub fn unit(dim: usize, k: usize, l: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(k, l)] = ONE;
    m
}

/// `max |U^H U - I|`, infinite for non-square input.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&u.adjoint() * u).max_abs_diff(&CMatrix::identity(u.rows()))
}

/// `s2 ∘ s1`, with blocks `apply(s2, ŝ¹_kl)` in the input basis of `s1`.
pub fn compose(s2: &Superoperator, s1: &Superoperator) -> Result<Superoperator, SuperopError> {
    if s1.dim_out != s2.dim_in {
        return Err(SuperopError::DimMismatch(format!(
            "cannot compose: inner dimensions {} and {}",
            s1.dim_out, s2.dim_in
        )));
    }
    let blocks = s1
        .blocks
        .iter()
        .map(|b| s2.apply_operator(b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Superoperator {
        dim_in: s1.dim_in,
        dim_out: s2.dim_out,
        blocks,
        basis_in: s1.basis_in.clone(),
    })
}

/// Unitary channel `ŝ_kl = U|k><l|U^H`.
pub fn from_unitary(u: &CMatrix) -> Result<Superoperator, SuperopError> {
    let dev = unitarity_deviation(u);
    if dev > CHANNEL_TOL {
        return Err(SuperopError::NotUnitary(dev));
    }
    let d = u.rows();
    let cols: Vec<_> = (0..d).map(|j| u.column(j)).collect();
    let blocks = collect_blocks(d, |k, l| CMatrix::outer(&cols[k], &cols[l]));
    Superoperator::from_blocks(d, d, blocks)?.ensure_channel()
}

/// Real 4x4 matrix of a qubit superoperator (or generator) in the operator
/// basis `{I, σ3, σ1, σ2}`, acting on coordinate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasisMatrix(CMatrix);

impl OperatorBasisMatrix {
    pub fn new(mat: CMatrix) -> Result<Self, SuperopError> {
        if mat.rows() != 4 || mat.cols() != 4 {
            return Err(SuperopError::DimMismatch(format!(
                "operator-basis matrix must be 4x4, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self(mat))
    }

    pub fn from_real(entries: &[f64; 16]) -> Self {
        Self(CMatrix::from_real(4, 4, entries).expect("16 entries"))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// A generator keeps the trace fixed iff nothing feeds the identity
    /// coordinate, i.e. its first row vanishes.
    pub fn generator_preserves_trace(&self) -> bool {
        (0..4).all(|j| self.0[(0, j)].norm() <= CHANNEL_TOL)
    }
}

/// Channel with operator-basis matrix `S = exp(L t)`, converted to blocks via
/// `ŝ_kl = Σ_mn S_mn <l|ê_n|k> ê_m` with `ê = {I, σ3, σ1, σ2}/√2`.
pub fn from_bloch_generator(
    generator: &OperatorBasisMatrix,
    t: f64,
) -> Result<Superoperator, SuperopError> {
    if !t.is_finite() || t < 0.0 {
        return Err(SuperopError::Domain(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    let s = numkit::matrix_exp(&generator.matrix().scale_real(t))?;
    let basis = qstate::operator_basis().map(|e| e.scale_real(std::f64::consts::FRAC_1_SQRT_2));
    let blocks = collect_blocks(2, |k, l| {
        let mut out = CMatrix::zeros(2, 2);
        for (m, em) in basis.iter().enumerate() {
            let mut coeff = ZERO;
            for (n, en) in basis.iter().enumerate() {
                coeff += s[(m, n)] * en[(l, k)];
            }
            if coeff != ZERO {
                out = &out + &em.scale(coeff);
            }
        }
        out
    });
    Superoperator::from_blocks(2, 2, blocks)?.ensure_channel()
}

/// Which subsystem's final state is traced out in [`reduce_joint_channel`].
/// Only the first system is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traced {
    First,
}

/// Channel from system 1 to system 2 induced by joint dynamics `s12` with
/// system 2 prepared in `rho2`:
/// `ŝ_kl = Σ_κλ <κ|rho2|λ> Tr_1 ŝ_{kκ,lλ}`.
pub fn reduce_joint_channel(
    s12: &Superoperator,
    rho2: &DensityMatrix,
    traced: Traced,
) -> Result<Superoperator, SuperopError> {
    let Traced::First = traced;
    let d2 = rho2.dim();
    let dim = s12.dim_in;
    if s12.dim_out != dim {
        return Err(SuperopError::DimMismatch(
            "joint dynamics must map the joint space to itself".into(),
        ));
    }
    if !dim.is_multiple_of(d2) {
        return Err(SuperopError::DimMismatch(format!(
            "joint dimension {dim} is not a multiple of {d2}"
        )));
    }
    let d1 = dim / d2;
    let joint = s12.to_computational();
    let r2 = rho2.matrix();
    let blocks = collect_blocks(d1, |k, l| {
        let mut acc = CMatrix::zeros(dim, dim);
        for kappa in 0..d2 {
            for lambda in 0..d2 {
                let w = r2[(kappa, lambda)];
                if w == ZERO {
                    continue;
                }
                acc = &acc + &joint.block(k * d2 + kappa, l * d2 + lambda).scale(w);
            }
        }
        numkit::partial_trace(&acc, (d1, d2), Keep::Second).expect("square joint block")
    });
    Superoperator::from_blocks(d1, d2, blocks)
}

/// Choice map `P X P + |0><0| Tr((1-P) X)` into the space extended by a
/// vacuum state appended as the last basis vector.
pub fn choice_superoperator(p_a: &CMatrix, dim_ext: usize) -> Result<Superoperator, SuperopError> {
    if !p_a.is_square() {
        return Err(SuperopError::DimMismatch("projector must be square".into()));
    }
    let n = p_a.rows();
    if dim_ext != n + 1 {
        return Err(SuperopError::DimMismatch(format!(
            "extended dimension must be {}, got {dim_ext}",
            n + 1
        )));
    }
    let dev = p_a.hermitian_deviation().max((p_a * p_a).max_abs_diff(p_a));
    if dev > CHANNEL_TOL {
        return Err(SuperopError::NotProjector(dev));
    }
    let complement = &CMatrix::identity(n) - p_a;
    let blocks = collect_blocks(n, |k, l| {
        let kept = &(p_a * &unit(n, k, l)) * p_a;
        let mut out = kept.direct_sum(&CMatrix::zeros(1, 1));
        out[(n, n)] = complement[(l, k)];
        out
    });
    Superoperator::from_blocks(n, dim_ext, blocks)?.ensure_channel()
}

/// Outcome of [`check_cp_tp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpTpReport {
    pub cp: bool,
    pub tp: bool,
    /// Smallest eigenvalue of the Hermitian part of the block operator,
    /// normalized by `dim_in` so that it is a state for a channel.
    pub min_choi_eig: f64,
    pub max_trace_dev: f64,
    /// `max |ŝ_lk - ŝ_kl^H|`
    pub max_hermiticity_dev: f64,
}

/// Reports trace preservation, Hermiticity preservation and complete
/// positivity. Never fails.
pub fn check_cp_tp(s: &Superoperator, tol: f64) -> CpTpReport {
    let d = s.dim_in;
    let mut max_trace_dev: f64 = 0.0;
    let mut max_herm_dev: f64 = 0.0;
    for k in 0..d {
        for l in 0..d {
            let want = if k == l { ONE } else { ZERO };
            max_trace_dev = max_trace_dev.max((s.block(k, l).trace() - want).norm());
            max_herm_dev = max_herm_dev.max(s.block(l, k).max_abs_diff(&s.block(k, l).adjoint()));
        }
    }
    let choi = s.choi().scale_real(1.0 / d as f64);
    let sym = (&choi + &choi.adjoint()).scale_real(0.5);
    let min_choi_eig = match numkit::hermitian_eig(&sym, f64::INFINITY) {
        Ok(e) => e.values.last().copied().unwrap_or(0.0),
        Err(_) => f64::NEG_INFINITY,
    };
    CpTpReport {
        cp: max_herm_dev <= tol && min_choi_eig >= -tol,
        tp: max_trace_dev <= tol,
        min_choi_eig,
        max_trace_dev,
        max_hermiticity_dev: max_herm_dev,
    }
}

/// Transpose map `ŝ_kl = |l><k|`: positive and trace preserving but not
/// completely positive.
pub fn transpose_map(dim: usize) -> Superoperator {
    Superoperator::from_blocks(dim, dim, collect_blocks(dim, |k, l| unit(dim, l, k)))
        .expect("transpose blocks are well formed")
}

/// Exchange unitary `exp(-iθ(σ+⊗σ- + σ-⊗σ+))` on two qubits.
pub fn exchange_unitary(theta: f64) -> CMatrix {
    let mut u = CMatrix::identity(4);
    let (cs, sn) = (theta.cos(), theta.sin());
    u[(1, 1)] = c(cs, 0.0);
    u[(2, 2)] = c(cs, 0.0);
    u[(1, 2)] = c(0.0, -sn);
    u[(2, 1)] = c(0.0, -sn);
    u
}
