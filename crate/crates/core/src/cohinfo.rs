//! Joint input-output state, entropy exchange and coherent information.
//!
//! For an input `rho_in = Σ p_i |i><i|` the joint state on `H_out ⊗ H_in` is
//!
//! ```text
//! rho_alpha = Σ_ij sqrt(p_i p_j) S(|i><j|) ⊗ |ī><j̄|
//! ```
//!
//! with `|ī>` the complex conjugate of `|i>` in the computational basis. Its
//! entropy is the entropy exchange `S_e`, and the coherent information is
//! `I_c = S_out - S_e`, reported both raw and clamped at zero.

use thiserror::Error;

use crate::numkit::{self, c, kron, CMatrix, Keep, NumError, PSD_TOL};
use crate::qstate::{self, DensityMatrix, StateError, ENTROPY_FLOOR, STATE_TOL};
use crate::superop::{check_cp_tp, SuperopError, Superoperator};

/// Trace-preservation tolerance required before building a joint state.
pub const TP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CohError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("channel is not trace preserving (deviation {0:e})")]
    NotTp(f64),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Superop(#[from] SuperopError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Joint input-output density matrix, output factor first.
#[derive(Debug, Clone)]
pub struct JointState {
    pub rho_alpha: DensityMatrix,
    pub dim_out: usize,
    pub dim_in: usize,
}

impl JointState {
    /// Marginal on the output factor; equals `S(rho_in)`.
    pub fn output_marginal(&self) -> CMatrix {
        numkit::partial_trace(
            self.rho_alpha.matrix(),
            (self.dim_out, self.dim_in),
            Keep::First,
        )
        .expect("joint state factors by construction")
    }

    /// Marginal on the input factor; equals the conjugate of `rho_in`.
    pub fn input_marginal(&self) -> CMatrix {
        numkit::partial_trace(
            self.rho_alpha.matrix(),
            (self.dim_out, self.dim_in),
            Keep::Second,
        )
        .expect("joint state factors by construction")
    }
}

/// Entropies (bits) and spectra of one channel evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub s_in: f64,
    pub s_out: f64,
    pub s_e: f64,
    /// `max(0, raw_ic)`
    pub i_c: f64,
    /// `s_out - s_e`
    pub raw_ic: f64,
    /// Eigenvalues of the output state, descending.
    pub eig_out: Vec<f64>,
    /// Eigenvalues of the joint input-output state, descending.
    pub eig_alpha: Vec<f64>,
}

pub fn joint_state(s: &Superoperator, rho_in: &DensityMatrix) -> Result<JointState, CohError> {
    if rho_in.dim() != s.dim_in() {
        return Err(CohError::DimMismatch(format!(
            "input state has dimension {}, channel expects {}",
            rho_in.dim(),
            s.dim_in()
        )));
    }
    let report = check_cp_tp(s, TP_TOL);
    if !report.tp {
        return Err(CohError::NotTp(report.max_trace_dev));
    }
    let eig = numkit::hermitian_eig(rho_in.matrix(), STATE_TOL)?;
    let probs = numkit::clip_psd(&eig.values, PSD_TOL)?;
    let vectors: Vec<_> = (0..rho_in.dim()).map(|j| eig.vectors.column(j)).collect();
    joint_state_from_eigensystem(s, &probs, &vectors)
}

/// Joint state for an explicitly supplied eigensystem of the input.
pub(crate) fn joint_state_from_eigensystem(
    s: &Superoperator,
    probs: &[f64],
    vectors: &[Vec<num_complex::Complex64>],
) -> Result<JointState, CohError> {
    let (d_out, d_in) = (s.dim_out(), s.dim_in());
    let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    let conj: Vec<Vec<_>> = vectors
        .iter()
        .map(|v| v.iter().map(|z| z.conj()).collect())
        .collect();
    let mut alpha = CMatrix::zeros(d_out * d_in, d_out * d_in);
    for &i in &support {
        for &j in &support {
            let w = (probs[i] * probs[j]).sqrt();
            let image = s.apply_operator(&CMatrix::outer(&vectors[i], &vectors[j]))?;
            let reference = CMatrix::outer(&conj[i], &conj[j]);
            alpha = &alpha + &kron(&image, &reference).scale(c(w, 0.0));
        }
    }
    Ok(JointState {
        rho_alpha: DensityMatrix::from_trusted(alpha),
        dim_out: d_out,
        dim_in: d_in,
    })
}

/// Eigenvalues of a state with entries below [`ENTROPY_FLOOR`] set to zero.
fn floored_spectrum(m: &CMatrix) -> Result<Vec<f64>, CohError> {
    let eig = numkit::hermitian_eig(m, STATE_TOL)?;
    let vals = numkit::clip_psd(&eig.values, PSD_TOL)?;
    Ok(vals
        .into_iter()
        .map(|v| if v < ENTROPY_FLOOR { 0.0 } else { v })
        .collect())
}

pub fn coherent_information(
    s: &Superoperator,
    rho_in: &DensityMatrix,
) -> Result<ChannelReport, CohError> {
    let joint = joint_state(s, rho_in)?;
    let out = s.apply_operator(rho_in.matrix())?;
    let eig_out = floored_spectrum(&out)?;
    let eig_alpha = floored_spectrum(joint.rho_alpha.matrix())?;
    let s_in = qstate::von_neumann_entropy(rho_in)?;
    let s_out = qstate::shannon_bits(&eig_out);
    let s_e = qstate::shannon_bits(&eig_alpha);
    let raw_ic = s_out - s_e;
    Ok(ChannelReport {
        s_in,
        s_out,
        s_e,
        i_c: raw_ic.max(0.0),
        raw_ic,
        eig_out,
        eig_alpha,
    })
}

/// Unclamped `S(Tr_1 rho) - S(rho)` for a joint state on `C^d1 ⊗ C^d2`.
pub fn one_time_raw(rho_joint: &DensityMatrix, dims: (usize, usize)) -> Result<f64, CohError> {
    let (d1, d2) = dims;
    if rho_joint.dim() != d1 * d2 {
        return Err(CohError::DimMismatch(format!(
            "joint state of dimension {} does not factor as {d1}*{d2}",
            rho_joint.dim()
        )));
    }
    let rho2 = numkit::partial_trace(rho_joint.matrix(), dims, Keep::Second)?;
    let s2 = qstate::shannon_bits(&floored_spectrum(&rho2)?);
    let s12 = qstate::shannon_bits(&floored_spectrum(rho_joint.matrix())?);
    Ok(s2 - s12)
}

/// One-time coherent information of system 2 about system 1, clamped at 0.
pub fn one_time_coherent_information(
    rho_joint: &DensityMatrix,
    dims: (usize, usize),
) -> Result<f64, CohError> {
    Ok(one_time_raw(rho_joint, dims)?.max(0.0))
}
