//! Concrete atomic channels and the closed forms used to check them.
//!
//! Qubit conventions: index 0 is the lower (ground) level and index 1 the
//! upper level. For photon outputs index 0 is the vacuum and index 1 the
//! one-photon state. Qubit operator-basis matrices use `{I, σ3, σ1, σ2}`.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

use crate::numkit::{c, kron, CMatrix, ONE, ZERO};
use crate::qstate::{self, DensityMatrix, StateError};
pub use crate::superop::exchange_unitary;
use crate::superop::{
    self, check_cp_tp, from_bloch_generator, from_unitary, reduce_joint_channel,
    unitarity_deviation, OperatorBasisMatrix, SuperopError, Superoperator, Traced,
};

/// Tolerance for POVM completeness, projector and basis checks.
pub const CATALOG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("operators do not form a POVM: {0}")]
    NotPovm(String),
    #[error("pointer projectors are not mutually orthogonal projectors (deviation {0:e})")]
    ProjectorsOverlap(f64),
    #[error(transparent)]
    Superop(#[from] SuperopError),
    #[error(transparent)]
    State(#[from] StateError),
}

fn domain(msg: impl Into<String>) -> ChannelError {
    ChannelError::Domain(msg.into())
}

fn finite_nonneg(name: &str, v: f64) -> Result<(), ChannelError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Constructors return channels that passed [`check_cp_tp`] at this tolerance.
fn verified(s: Superoperator) -> Result<Superoperator, ChannelError> {
    let r = check_cp_tp(&s, CATALOG_TOL);
    if !r.tp {
        return Err(SuperopError::NotTp(r.max_trace_dev).into());
    }
    if !r.cp {
        return Err(SuperopError::CpViolated(r.min_choi_eig).into());
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Driven two-level atom with pure dephasing

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingRabiParams {
    /// Pure dephasing rate Γ.
    pub gamma: f64,
    /// Rabi frequency Ω.
    pub omega: f64,
    pub t: f64,
}

impl DephasingRabiParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        finite_nonneg("gamma", self.gamma)?;
        finite_nonneg("omega", self.omega)?;
        finite_nonneg("t", self.t)
    }
}

/// Liouvillian of pure dephasing plus resonant driving in `{I, σ3, σ1, σ2}`.
pub fn dephasing_generator(gamma: f64, omega: f64) -> OperatorBasisMatrix {
    #[rustfmt::skip]
    let l = [
        0.0, 0.0,    0.0,    0.0,
        0.0, 0.0,    0.0,    omega,
        0.0, 0.0,    -gamma, 0.0,
        0.0, -omega, 0.0,    -gamma,
    ];
    OperatorBasisMatrix::from_real(&l)
}

pub fn dephasing_rabi(p: DephasingRabiParams) -> Result<Superoperator, ChannelError> {
    p.validate()?;
    let s = from_bloch_generator(&dephasing_generator(p.gamma, p.omega), p.t)?;
    verified(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianAnalysis {
    /// Eigenvalues sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalue whose eigenvector is reported.
    pub k_min_eigenvalue: Complex64,
    /// Right eigenvector in `{I, σ3, σ1, σ2}` coordinates, scaled so the σ2
    /// coordinate is 1 when it is nonzero.
    pub k_min_vector: Vec<Complex64>,
    /// Identity (trace) coordinate of `k_min_vector`.
    pub trace_component: Complex64,
}

/// Spectrum of the dephasing Liouvillian and the eigenvector of the slowest
/// nonzero decay mode.
pub fn liouvillian_analysis(gamma: f64, omega: f64) -> Result<LiouvillianAnalysis, ChannelError> {
    finite_nonneg("gamma", gamma)?;
    finite_nonneg("omega", omega)?;
    if gamma == 0.0 && omega == 0.0 {
        return Err(domain("gamma and omega cannot both be zero"));
    }
    let gen = dephasing_generator(gamma, omega);
    let l = Matrix4::from_fn(|i, j| gen.matrix()[(i, j)].re);
    let mut eigenvalues = blockwise_eigenvalues(&DMatrix::from_fn(4, 4, |i, j| l[(i, j)]));
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));

    let scale = gamma.max(omega);
    let k_min_eigenvalue = eigenvalues
        .iter()
        .copied()
        .filter(|z| z.norm() > 1e-9 * scale)
        .min_by(|a, b| {
            a.re.abs()
                .total_cmp(&b.re.abs())
                .then(b.im.total_cmp(&a.im))
        })
        .ok_or_else(|| domain("generator has no decaying mode"))?;

    // right null vector of (L - λI) from the smallest singular value
    let shifted = DMatrix::<Complex64>::from_fn(4, 4, |i, j| {
        let diag = if i == j { k_min_eigenvalue } else { ZERO };
        c(l[(i, j)], 0.0) - diag
    });
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("four singular values");
    let mut v: Vec<Complex64> = (0..4).map(|j| v_t[(imin, j)].conj()).collect();
    let pivot = if v[3].norm() > 1e-12 {
        v[3]
    } else {
        *v.iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap()
    };
    for z in &mut v {
        *z /= pivot;
    }
    Ok(LiouvillianAnalysis {
        eigenvalues,
        k_min_eigenvalue,
        trace_component: v[0],
        k_min_vector: v,
    })
}

/// Eigenvalues of a real matrix, split into the blocks of its coupling graph.
/// Blocks of size one and two are solved in closed form, which keeps
/// defective double roots exact.
fn blockwise_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let n = m.nrows();
    let mut component = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut members = vec![start];
        component[start] = id;
        let mut k = 0;
        while k < members.len() {
            let i = members[k];
            for j in 0..n {
                if component[j] == usize::MAX && (m[(i, j)] != 0.0 || m[(j, i)] != 0.0) {
                    component[j] = id;
                    members.push(j);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        blocks.push(members);
    }
    let mut out = Vec::with_capacity(n);
    for b in blocks {
        match b[..] {
            [i] => out.push(c(m[(i, i)], 0.0)),
            [i, j] => {
                let half_tr = 0.5 * (m[(i, i)] + m[(j, j)]);
                let det = m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)];
                let root = c(half_tr * half_tr - det, 0.0).sqrt();
                out.push(c(half_tr, 0.0) + root);
                out.push(c(half_tr, 0.0) - root);
            }
            _ => {
                let sub = DMatrix::from_fn(b.len(), b.len(), |r, s| m[(b[r], b[s])]);
                out.extend(sub.complex_eigenvalues().iter().copied());
            }
        }
    }
    out
}

/// `{0, -Γ, -(Γ + √(Γ²-4Ω²))/2, -(Γ - √(Γ²-4Ω²))/2}`
pub fn liouvillian_eigenvalues_closed_form(gamma: f64, omega: f64) -> [Complex64; 4] {
    let root = c(gamma * gamma - 4.0 * omega * omega, 0.0).sqrt();
    [
        ZERO,
        c(-gamma, 0.0),
        -(c(gamma, 0.0) + root) / 2.0,
        -(c(gamma, 0.0) - root) / 2.0,
    ]
}

// ---------------------------------------------------------------------------
// Stark-coupled hydrogen n=2 channel

/// Channel from the {1s, 2s} pair to the {1s, 2p} pair plus a vacuum state,
/// with `x = sin(ω_s t)`. Output order: 1s, 2p, vacuum.
pub fn hydrogen_stark(x: f64) -> Result<Superoperator, ChannelError> {
    if x.is_nan() || x.abs() > 1.0 {
        return Err(domain(format!(
            "x = sin(ω_s t) must lie in [-1, 1], got {x}"
        )));
    }
    let mut s11 = CMatrix::zeros(3, 3);
    s11[(0, 0)] = ONE;
    let mut s12 = CMatrix::zeros(3, 3);
    s12[(0, 1)] = c(x, 0.0);
    let s21 = s12.adjoint();
    let s22 = CMatrix::diag_real(&[0.0, x * x, 1.0 - x * x]);
    verified(Superoperator::from_blocks(2, 3, vec![s11, s12, s21, s22])?)
}

/// `[(1+x²) log2(1+x²) - x² log2(x²)] / 2`
pub fn hydrogen_ic_analytic(x: f64) -> f64 {
    let x2 = x * x;
    let xlx = if x2 > 0.0 { x2 * x2.log2() } else { 0.0 };
    ((1.0 + x2) * (1.0 + x2).log2() - xlx) / 2.0
}

/// Mean of [`hydrogen_ic_analytic`] over `n` equally spaced phases `ω_s t`
/// in `[0, 2π)`.
pub fn hydrogen_time_average(n: usize) -> f64 {
    let step = std::f64::consts::TAU / n as f64;
    (0..n)
        .map(|k| hydrogen_ic_analytic((k as f64 * step).sin()))
        .sum::<f64>()
        / n as f64
}

// ---------------------------------------------------------------------------
// Two unitarily coupled two-level atoms

/// Pure qubit state with populations `(rho11, 1 - rho11)` and real positive
/// coherence `sqrt(rho11 (1 - rho11))`.
pub fn pure_qubit(rho11: f64) -> Result<DensityMatrix, ChannelError> {
    if !(0.0..=1.0).contains(&rho11) {
        return Err(domain(format!("rho11 must lie in [0, 1], got {rho11}")));
    }
    Ok(DensityMatrix::pure(&[
        c(rho11.sqrt(), 0.0),
        c((1.0 - rho11).sqrt(), 0.0),
    ])?)
}

/// Channel from atom 1 to atom 2 for joint unitary `u` and atom 2 prepared in `rho2`.
pub fn coupled_tlas(u: &CMatrix, rho2: &DensityMatrix) -> Result<Superoperator, ChannelError> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(SuperopError::DimMismatch("two-atom unitary must be 4x4".into()).into());
    }
    if rho2.dim() != 2 {
        return Err(SuperopError::DimMismatch("atom 2 must be a qubit".into()).into());
    }
    let joint = from_unitary(u)?;
    verified(reduce_joint_channel(&joint, rho2, Traced::First)?)
}

// ---------------------------------------------------------------------------
// Measurement channels

fn basis_matrix(basis: &[Vec<Complex64>]) -> Result<CMatrix, ChannelError> {
    let m =
        CMatrix::from_columns(basis).map_err(|_| ChannelError::NotOrthonormal(f64::INFINITY))?;
    if !m.is_square() {
        return Err(ChannelError::NotOrthonormal(f64::INFINITY));
    }
    let dev = unitarity_deviation(&m);
    if dev > CATALOG_TOL {
        return Err(ChannelError::NotOrthonormal(dev));
    }
    Ok(m)
}

/// Full von Neumann measurement in `basis`, leaving the pointer state
/// `|φ_k><φ_k|` with probability `<φ_k|rho|φ_k>`.
pub fn direct_measurement(basis: &[Vec<Complex64>]) -> Result<Superoperator, ChannelError> {
    let b = basis_matrix(basis)?;
    let d = b.rows();
    let mut blocks = Vec::with_capacity(d * d);
    for (k, bk) in basis.iter().enumerate() {
        for l in 0..d {
            blocks.push(if k == l {
                CMatrix::outer(bk, bk)
            } else {
                CMatrix::zeros(d, d)
            });
        }
    }
    verified(Superoperator::from_blocks_in_basis(d, d, blocks, b)?)
}

/// Rank-one pointer projectors on the computational basis of `C^n`.
pub fn pointer_projectors(n: usize) -> Vec<CMatrix> {
    (0..n).map(|q| superop::unit(n, q, q)).collect()
}

/// Symmetric three-outcome qubit POVM `(2/3)|θ_q><θ_q|`, Bloch angles 0, 120°, 240°.
pub fn trine_povm() -> Vec<CMatrix> {
    (0..3)
        .map(|q| {
            let half = q as f64 * std::f64::consts::PI / 3.0;
            let v = [c(half.cos(), 0.0), c(half.sin(), 0.0)];
            CMatrix::outer(&v, &v).scale_real(2.0 / 3.0)
        })
        .collect()
}

/// Indirect measurement `Σ_q P_q Tr(E_q ·)`. Each pointer projector is
/// normalized by its trace so that the map is trace preserving.
pub fn indirect_measurement(
    projectors: &[CMatrix],
    povm: &[CMatrix],
) -> Result<Superoperator, ChannelError> {
    if projectors.is_empty() || projectors.len() != povm.len() {
        return Err(ChannelError::NotPovm(format!(
            "{} projectors for {} POVM elements",
            projectors.len(),
            povm.len()
        )));
    }
    let d = povm[0].rows();
    let dp = projectors[0].rows();
    if povm.iter().any(|e| e.rows() != d || e.cols() != d) {
        return Err(ChannelError::NotPovm("elements differ in shape".into()));
    }
    if projectors.iter().any(|p| p.rows() != dp || p.cols() != dp) {
        return Err(ChannelError::ProjectorsOverlap(f64::INFINITY));
    }
    let mut total = CMatrix::zeros(d, d);
    for e in povm {
        let dev = e.hermitian_deviation();
        if dev > CATALOG_TOL {
            return Err(ChannelError::NotPovm(format!(
                "element not Hermitian ({dev:e})"
            )));
        }
        let eig = crate::numkit::hermitian_eig(e, CATALOG_TOL)
            .map_err(|err| ChannelError::NotPovm(err.to_string()))?;
        if let Some(&min) = eig.values.last() {
            if min < -CATALOG_TOL {
                return Err(ChannelError::NotPovm(format!(
                    "element has eigenvalue {min:e}"
                )));
            }
        }
        total = &total + e;
    }
    let completeness = total.max_abs_diff(&CMatrix::identity(d));
    if completeness > CATALOG_TOL {
        return Err(ChannelError::NotPovm(format!(
            "elements sum to identity only within {completeness:e}"
        )));
    }
    let mut overlap: f64 = 0.0;
    for (q, p) in projectors.iter().enumerate() {
        overlap = overlap
            .max(p.hermitian_deviation())
            .max((p * p).max_abs_diff(p));
        if p.trace().re < 0.5 {
            return Err(ChannelError::ProjectorsOverlap(f64::INFINITY));
        }
        for r in projectors.iter().skip(q + 1) {
            overlap = overlap.max((p * r).max_abs());
        }
    }
    if overlap > CATALOG_TOL {
        return Err(ChannelError::ProjectorsOverlap(overlap));
    }
    let states: Vec<CMatrix> = projectors
        .iter()
        .map(|p| p.scale_real(1.0 / p.trace().re))
        .collect();
    let mut blocks = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let mut acc = CMatrix::zeros(dp, dp);
            for (e, st) in povm.iter().zip(&states) {
                // Tr(E |k><l|) = <l|E|k>
                acc = &acc + &st.scale(e[(l, k)]);
            }
            blocks.push(acc);
        }
    }
    verified(Superoperator::from_blocks(d, dp, blocks)?)
}

/// Coherent duplication `|φ_i> -> |φ_i>|φ_i>` into `C^d ⊗ C^d`.
pub fn duplication(basis: &[Vec<Complex64>], d: usize) -> Result<Superoperator, ChannelError> {
    let b = basis_matrix(basis)?;
    if b.rows() != d {
        return Err(SuperopError::DimMismatch(format!(
            "basis has dimension {}, expected {d}",
            b.rows()
        ))
        .into());
    }
    let doubled: Vec<Vec<Complex64>> = basis
        .iter()
        .map(|v| {
            let col = CMatrix::from_columns(std::slice::from_ref(v)).expect("nonempty");
            kron(&col, &col).column(0)
        })
        .collect();
    let mut blocks = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            blocks.push(CMatrix::outer(&doubled[k], &doubled[l]));
        }
    }
    verified(Superoperator::from_blocks_in_basis(d, d * d, blocks, b)?)
}

// ---------------------------------------------------------------------------
// Atom to vacuum field

/// Channel from an atom to the (two-level truncated) photon field after
/// dimensionless time `γt`, with `x = exp(-γt)` the surviving excitation.
pub fn atom_field(gamma_t: f64) -> Result<Superoperator, ChannelError> {
    finite_nonneg("gamma_t", gamma_t)?;
    decay_channel((-gamma_t).exp(), ONE)
}

/// Shared block structure of the atom-field and two-atom channels:
/// `ŝ11 = diag(1,0)`, `ŝ12 = [[0, a],[0, 0]]`, `ŝ22 = diag(x, |a|²)` with
/// `|a|² = 1 - x` and `a = phase * sqrt(1 - x)`.
fn decay_channel(x: f64, phase: Complex64) -> Result<Superoperator, ChannelError> {
    let amp = phase * (1.0 - x).max(0.0).sqrt();
    decay_channel_with_amplitude(x, amp)
}

fn decay_channel_with_amplitude(x: f64, amp: Complex64) -> Result<Superoperator, ChannelError> {
    let s11 = CMatrix::diag_real(&[1.0, 0.0]);
    let mut s12 = CMatrix::zeros(2, 2);
    s12[(0, 1)] = amp;
    let s21 = s12.adjoint();
    let s22 = CMatrix::diag_real(&[x, amp.norm_sqr()]);
    verified(Superoperator::from_blocks(2, 2, vec![s11, s12, s21, s22])?)
}

/// Atom ⊗ field unitary (atom index first) truncated to at most one photon:
/// `|e,0> -> √x |e,0> + √(1-x) |g,1>`, with `|g,0>` and `|e,1>` fixed.
pub fn atom_field_unitary(gamma_t: f64) -> Result<CMatrix, ChannelError> {
    finite_nonneg("gamma_t", gamma_t)?;
    let x = (-gamma_t).exp();
    let (a, b) = (x.sqrt(), (1.0 - x).sqrt());
    // basis order |g0>, |g1>, |e0>, |e1>
    #[rustfmt::skip]
    let u = CMatrix::from_real(4, 4, &[
        1.0, 0.0, 0.0, 0.0,
        0.0, -a,  b,   0.0,
        0.0, b,   a,   0.0,
        0.0, 0.0, 0.0, 1.0,
    ]).expect("16 entries");
    Ok(u)
}

/// Joint atom ⊗ field state after `γt` for the atom prepared in `rho_atom`
/// and the field in vacuum.
pub fn atom_field_joint_state(
    gamma_t: f64,
    rho_atom: &DensityMatrix,
) -> Result<DensityMatrix, ChannelError> {
    if rho_atom.dim() != 2 {
        return Err(SuperopError::DimMismatch("atom must be a qubit".into()).into());
    }
    let u = atom_field_unitary(gamma_t)?;
    let initial = kron(rho_atom.matrix(), DensityMatrix::basis_state(2, 0).matrix());
    Ok(DensityMatrix::from_trusted(&(&u * &initial) * &u.adjoint()))
}

fn xlog2x(v: f64) -> f64 {
    if v > 0.0 {
        v * v.log2()
    } else {
        0.0
    }
}

/// Unclamped closed form of the atom-field coherent information for a
/// diagonal input with excited population `rho22`, `x = exp(-γt)`.
pub fn atom_field_ic_raw(x: f64, rho22: f64) -> f64 {
    xlog2x(x * rho22) - xlog2x(1.0 - (1.0 - x) * rho22) + xlog2x(1.0 - x * rho22)
        - xlog2x(rho22 - x * rho22)
}

/// [`atom_field_ic_raw`] clamped at zero.
pub fn atom_field_ic_analytic(x: f64, rho22: f64) -> f64 {
    atom_field_ic_raw(x, rho22).max(0.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    qstate::shannon_bits(&[p, 1.0 - p])
}

// ---------------------------------------------------------------------------
// Two atoms coupled through the free-space field

/// Whether the dipole-dipole shift Λ is physical or switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DickeShift {
    #[default]
    Physical,
    /// Λ = 0 with unchanged decay rates; a diagnostic counterfactual.
    Zero,
}

/// Two identical atoms with parallel dipoles perpendicular to their axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeParams {
    /// Dimensionless distance `φ = k0 R`.
    pub phi: f64,
    /// Dimensionless time `γt`.
    pub gamma_t: f64,
    pub shift: DickeShift,
}

impl DickeParams {
    pub fn new(phi: f64, gamma_t: f64) -> Self {
        Self {
            phi,
            gamma_t,
            shift: DickeShift::Physical,
        }
    }

    pub fn without_shift(phi: f64, gamma_t: f64) -> Self {
        Self {
            phi,
            gamma_t,
            shift: DickeShift::Zero,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.phi.is_finite() && self.phi > 0.0) {
            return Err(domain(format!(
                "phi must be finite and > 0, got {}",
                self.phi
            )));
        }
        finite_nonneg("gamma_t", self.gamma_t)
    }

    /// Collective coupling `g = (3/2)(sin φ/φ + cos φ/φ² - sin φ/φ³)`.
    pub fn g(&self) -> f64 {
        let p = self.phi;
        1.5 * (p.sin() / p + p.cos() / (p * p) - p.sin() / (p * p * p))
    }

    /// `γ_s / γ`
    pub fn gamma_s(&self) -> f64 {
        1.0 + self.g()
    }

    /// `γ_a / γ`
    pub fn gamma_a(&self) -> f64 {
        1.0 - self.g()
    }

    /// `Λ / γ`
    pub fn lambda_shift(&self) -> f64 {
        match self.shift {
            DickeShift::Physical => 0.75 / self.phi.powi(3),
            DickeShift::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeAmplitudes {
    pub f: f64,
    pub f_s: Complex64,
    pub f_a: Complex64,
}

impl DickeAmplitudes {
    /// `f² + |f_s|²`, the weight left in atom 2's ground state.
    pub fn ground_weight(&self) -> f64 {
        self.f * self.f + self.f_s.norm_sqr()
    }
}

pub fn dicke_amplitudes(p: &DickeParams) -> Result<DickeAmplitudes, ChannelError> {
    p.validate()?;
    let t = p.gamma_t;
    let (gs, ga, lam) = (p.gamma_s(), p.gamma_a(), p.lambda_shift());
    let sym = (-c(gs / 2.0, lam) * t).exp();
    let anti = (-c(ga / 2.0, -lam) * t).exp();
    let f2 = 1.0 - ((-gs * t).exp() + (-ga * t).exp()) / 2.0;
    Ok(DickeAmplitudes {
        f: f2.max(0.0).sqrt(),
        f_s: (sym + anti) / 2.0,
        f_a: (sym - anti) / 2.0,
    })
}

/// Channel from atom 1 to atom 2, averaged over atom 1's final state and
/// the random vacuum phase.
pub fn two_atom_channel(p: &DickeParams) -> Result<Superoperator, ChannelError> {
    let amp = dicke_amplitudes(p)?;
    decay_channel_with_amplitude(amp.ground_weight(), amp.f_a.conj())
}

/// Excited population `n2 = |f_a|²` of atom 2 when atom 1 starts excited.
pub fn two_atom_population(p: &DickeParams) -> Result<f64, ChannelError> {
    Ok(dicke_amplitudes(p)?.f_a.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohinfo::{coherent_information, joint_state, one_time_coherent_information};
    use crate::numkit::{hermitian_eig, partial_trace, Keep};
    use crate::random::{random_basis, random_density, random_povm, Rng64};
    use crate::superop::{choice_superoperator, compose};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mixed() -> DensityMatrix {
        DensityMatrix::maximally_mixed(2)
    }

    fn std_basis(d: usize) -> Vec<Vec<Complex64>> {
        (0..d)
            .map(|k| (0..d).map(|i| if i == k { ONE } else { ZERO }).collect())
            .collect()
    }

    fn ic(s: &Superoperator, rho: &DensityMatrix) -> f64 {
        coherent_information(s, rho).unwrap().i_c
    }

    fn deph(gamma: f64, omega: f64, t: f64) -> Superoperator {
        dephasing_rabi(DephasingRabiParams { gamma, omega, t }).unwrap()
    }

    #[test]
    fn dephasing_at_zero_time_is_identity() {
        let s = deph(1.0, 2.0, 0.0);
        assert!(s.max_block_diff(&Superoperator::identity(2)) < 1e-15);
        assert_abs_diff_eq!(ic(&s, &mixed()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dephasing_long_time_kills_information() {
        let s = deph(1.0, 0.0, 40.0);
        assert!(ic(&s, &mixed()) < 1e-12);
    }

    #[test]
    fn dephasing_ic_matches_coherence_decay() {
        // Ω = 0: ρ_α is Bell-diagonal with weights (1 ± e^{-Γt})/2
        for t in [0.1f64, 0.4, 1.0] {
            let e = (-t).exp();
            let want = 1.0 - binary_entropy((1.0 + e) / 2.0);
            let r = coherent_information(&deph(1.0, 0.0, t), &mixed()).unwrap();
            assert_abs_diff_eq!(r.raw_ic, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn dephasing_rejects_negative_params() {
        assert!(matches!(
            dephasing_rabi(DephasingRabiParams {
                gamma: -1.0,
                omega: 0.0,
                t: 1.0
            }),
            Err(ChannelError::Domain(_))
        ));
        assert!(matches!(
            dephasing_rabi(DephasingRabiParams {
                gamma: 1.0,
                omega: 0.0,
                t: f64::NAN
            }),
            Err(ChannelError::Domain(_))
        ));
    }

    fn assert_spectrum(gamma: f64, omega: f64) {
        let a = liouvillian_analysis(gamma, omega).unwrap();
        let mut want = liouvillian_eigenvalues_closed_form(gamma, omega).to_vec();
        want.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        for (got, w) in a.eigenvalues.iter().zip(&want) {
            assert!((got - w).norm() < 1e-12, "{got} vs {w}");
        }
    }

    #[test]
    fn liouvillian_spectra() {
        let a = liouvillian_analysis(1.0, 0.0).unwrap();
        let re: Vec<f64> = a.eigenvalues.iter().map(|z| z.re).collect();
        assert_eq!(re.len(), 4);
        assert_abs_diff_eq!(re[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[2], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(re[3], -1.0, epsilon = 1e-12);

        let b = liouvillian_analysis(1.0, 0.5).unwrap();
        let re: Vec<f64> = b.eigenvalues.iter().map(|z| z.re).collect();
        assert_abs_diff_eq!(re[0], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(re[1], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(re[2], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(re[3], -1.0, epsilon = 1e-10);

        assert_spectrum(1.0, 0.0);
        assert_spectrum(1.0, 0.3);
        assert_spectrum(1.0, 2.0);
        assert_spectrum(0.2, 1.0);
    }

    #[test]
    fn slowest_mode_is_traceless() {
        for (g, o) in [(1.0, 0.2), (1.0, 0.45), (1.0, 2.0), (0.5, 3.0), (1.0, 0.0)] {
            let a = liouvillian_analysis(g, o).unwrap();
            assert!(a.trace_component.norm() < 1e-10, "({g}, {o})");
            let lv = dephasing_generator(g, o).matrix().matvec(&a.k_min_vector);
            for (x, y) in lv.iter().zip(&a.k_min_vector) {
                assert!((x - a.k_min_eigenvalue * y).norm() < 1e-9);
            }
        }
        // real branch: σ3 coordinate has magnitude (Γ + √(Γ² - 4Ω²)) / 2Ω
        let (g, o) = (1.0f64, 0.2f64);
        let a = liouvillian_analysis(g, o).unwrap();
        let want = (g + (g * g - 4.0 * o * o).sqrt()) / (2.0 * o);
        assert_abs_diff_eq!(a.k_min_vector[1].norm(), want, epsilon = 1e-9);
        assert_abs_diff_eq!(a.k_min_vector[2].norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(a.k_min_vector[3].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn liouvillian_rejects_trivial_generator() {
        assert!(matches!(
            liouvillian_analysis(0.0, 0.0),
            Err(ChannelError::Domain(_))
        ));
    }

    #[test]
    fn hydrogen_endpoints() {
        assert_abs_diff_eq!(
            ic(&hydrogen_stark(0.0).unwrap(), &mixed()),
            0.0,
            epsilon = 1e-12
        );
        for x in [1.0, -1.0] {
            assert_abs_diff_eq!(
                ic(&hydrogen_stark(x).unwrap(), &mixed()),
                1.0,
                epsilon = 1e-12
            );
        }
        assert_eq!(hydrogen_ic_analytic(1.0), 1.0);
        assert_eq!(hydrogen_ic_analytic(0.0), 0.0);
        assert!(matches!(hydrogen_stark(1.5), Err(ChannelError::Domain(_))));
    }

    #[test]
    fn hydrogen_matches_closed_form() {
        for k in 0..=20 {
            let x = -1.0 + 0.1 * k as f64;
            let got = ic(&hydrogen_stark(x).unwrap(), &mixed());
            assert_abs_diff_eq!(got, hydrogen_ic_analytic(x), epsilon = 1e-10);
        }
    }

    #[test]
    fn hydrogen_from_choice_and_rotation() {
        // H = span{1s, 2s, 2p}; input subset A = {1s, 2s}, output subset B = {1s, 2p}
        let x: f64 = 0.6;
        let wt = x.asin();
        let mut u = CMatrix::identity(3);
        u[(1, 1)] = c(wt.cos(), 0.0);
        u[(2, 1)] = c(wt.sin(), 0.0);
        u[(1, 2)] = c(-wt.sin(), 0.0);
        u[(2, 2)] = c(wt.cos(), 0.0);
        let embed = Superoperator::from_block_fn(2, 3, |k, l| superop::unit(3, k, l)).unwrap();
        let evolve = from_unitary(&u).unwrap();
        let p_b = CMatrix::diag_real(&[1.0, 0.0, 1.0]);
        let choose = choice_superoperator(&p_b, 4).unwrap();
        let chain = compose(&choose, &compose(&evolve, &embed).unwrap()).unwrap();
        // drop the unused 2s output row/column: (1s, 2s, 2p, vac) -> (1s, 2p, vac)
        let keep = [0usize, 2, 3];
        let squeezed = Superoperator::from_block_fn(2, 3, |k, l| {
            CMatrix::from_fn(3, 3, |i, j| chain.block(k, l)[(keep[i], keep[j])])
        })
        .unwrap();
        assert!(squeezed.max_block_diff(&hydrogen_stark(x).unwrap()) < 1e-14);
        assert_abs_diff_eq!(
            ic(&chain, &mixed()),
            hydrogen_ic_analytic(x),
            epsilon = 1e-10
        );
    }

    #[test]
    fn coupled_product_unitary_transmits_nothing() {
        let mut rng = Rng64::seeded(4);
        let u1 = crate::random::random_unitary(&mut rng, 2);
        let u2 = crate::random::random_unitary(&mut rng, 2);
        let rho2 = random_density(&mut rng, 2);
        let s = coupled_tlas(&kron(&u1, &u2), &rho2).unwrap();
        let rho_in = random_density(&mut rng, 2);
        assert_eq!(ic(&s, &rho_in), 0.0);
    }

    #[test]
    fn coupled_exchange_endpoints() {
        let ground = DensityMatrix::basis_state(2, 0);
        let full = coupled_tlas(&exchange_unitary(std::f64::consts::FRAC_PI_2), &ground).unwrap();
        assert_abs_diff_eq!(ic(&full, &mixed()), 1.0, epsilon = 1e-10);
        let none = coupled_tlas(&exchange_unitary(0.0), &ground).unwrap();
        assert_abs_diff_eq!(ic(&none, &mixed()), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coupled_pure_rho2_reproduces_single_index_sum() {
        // ŝ_kl[μ,ν] = Σ_m U[mμ, k α0] U*[mν, l α0]
        let u = exchange_unitary(0.7);
        let a0 = 1;
        let s = coupled_tlas(&u, &DensityMatrix::basis_state(2, a0)).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                let want = CMatrix::from_fn(2, 2, |mu, nu| {
                    (0..2)
                        .map(|m| u[(m * 2 + mu, k * 2 + a0)] * u[(m * 2 + nu, l * 2 + a0)].conj())
                        .sum()
                });
                assert!(s.block(k, l).max_abs_diff(&want) < 1e-14);
            }
        }
    }

    #[test]
    fn direct_measurement_examples() {
        let m = direct_measurement(&std_basis(2)).unwrap();
        let r = coherent_information(&m, &mixed()).unwrap();
        assert_eq!(r.i_c, 0.0);
        let out = m.apply(&mixed()).unwrap();
        assert!(out.matrix().max_abs_diff(&CMatrix::diag_real(&[0.5, 0.5])) < 1e-15);

        let diag = DensityMatrix::diagonal(&[0.8, 0.2]).unwrap();
        let out = m.apply(&diag).unwrap();
        assert!(out.matrix().max_abs_diff(diag.matrix()) < 1e-15);
        assert_eq!(ic(&m, &diag), 0.0);

        let mut rng = Rng64::seeded(8);
        let rotated = direct_measurement(&random_basis(&mut rng, 3)).unwrap();
        assert_eq!(ic(&rotated, &random_density(&mut rng, 3)), 0.0);
    }

    #[test]
    fn direct_measurement_output_and_joint_spectra_coincide() {
        let mut rng = Rng64::seeded(12);
        let basis = random_basis(&mut rng, 2);
        let m = direct_measurement(&basis).unwrap();
        let rho = random_density(&mut rng, 2);
        let r = coherent_information(&m, &rho).unwrap();
        // p̃_k = <φ_k|ρ|φ_k> are the nonzero eigenvalues of both states
        let mut p: Vec<f64> = basis
            .iter()
            .map(|v| {
                let rv = rho.matrix().matvec(v);
                v.iter()
                    .zip(&rv)
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex64>()
                    .re
            })
            .collect();
        p.sort_by(|a, b| b.total_cmp(a));
        for (k, pk) in p.iter().enumerate() {
            assert_abs_diff_eq!(r.eig_out[k], *pk, epsilon = 1e-10);
            assert_abs_diff_eq!(r.eig_alpha[k], *pk, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(r.raw_ic, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn direct_measurement_rejects_bad_basis() {
        let bad = vec![vec![ONE, ZERO], vec![ONE, ONE]];
        assert!(matches!(
            direct_measurement(&bad),
            Err(ChannelError::NotOrthonormal(_))
        ));
    }

    #[test]
    fn indirect_measurement_examples() {
        let orth = indirect_measurement(&pointer_projectors(2), &pointer_projectors(2)).unwrap();
        let direct = direct_measurement(&std_basis(2)).unwrap();
        assert!(orth.max_block_diff(&direct) < 1e-15);

        let trine = indirect_measurement(&pointer_projectors(3), &trine_povm()).unwrap();
        let r = coherent_information(&trine, &mixed()).unwrap();
        // rank-one elements: S_out and S_e are both log2(3)
        assert_abs_diff_eq!(r.s_out, 3f64.log2(), epsilon = 1e-12);
        assert!(r.raw_ic.abs() < 1e-10);

        let single = indirect_measurement(&pointer_projectors(1), &[CMatrix::identity(2)]).unwrap();
        assert_eq!(single.dim_out(), 1);
        assert_eq!(ic(&single, &mixed()), 0.0);
    }

    #[test]
    fn indirect_measurement_joint_state_structure() {
        // ρ_α = Σ_qij √(p_i p_j) <j|E_q|i> P_q ⊗ |ī><j̄|
        let mut rng = Rng64::seeded(31);
        let povm = random_povm(&mut rng, 2, 3);
        let m = indirect_measurement(&pointer_projectors(3), &povm).unwrap();
        let rho = random_density(&mut rng, 2);
        let joint = joint_state(&m, &rho).unwrap();
        let eig = hermitian_eig(rho.matrix(), 1e-10).unwrap();
        let mut want = CMatrix::zeros(6, 6);
        for (q, e) in povm.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    let vi = eig.vectors.column(i);
                    let vj = eig.vectors.column(j);
                    let ev = e.matvec(&vi);
                    let amp: Complex64 = vj.iter().zip(&ev).map(|(a, b)| a.conj() * b).sum();
                    let w = (eig.values[i] * eig.values[j]).sqrt();
                    let bi: Vec<_> = vi.iter().map(|z| z.conj()).collect();
                    let bj: Vec<_> = vj.iter().map(|z| z.conj()).collect();
                    let term = kron(&superop::unit(3, q, q), &CMatrix::outer(&bi, &bj));
                    want = &want + &term.scale(amp * w);
                }
            }
        }
        assert!(joint.rho_alpha.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn indirect_measurement_errors() {
        let half = vec![
            CMatrix::diag_real(&[0.5, 0.5]),
            CMatrix::diag_real(&[0.4, 0.5]),
        ];
        assert!(matches!(
            indirect_measurement(&pointer_projectors(2), &half),
            Err(ChannelError::NotPovm(_))
        ));
        let overlapping = vec![
            CMatrix::diag_real(&[1.0, 0.0]),
            CMatrix::diag_real(&[1.0, 0.0]),
        ];
        assert!(matches!(
            indirect_measurement(&overlapping, &pointer_projectors(2)),
            Err(ChannelError::ProjectorsOverlap(_))
        ));
        assert!(matches!(
            indirect_measurement(&pointer_projectors(3), &pointer_projectors(2)),
            Err(ChannelError::NotPovm(_))
        ));
    }

    #[test]
    fn duplication_preserves_source_entropy() {
        let q = duplication(&std_basis(2), 2).unwrap();
        let r = coherent_information(&q, &mixed()).unwrap();
        assert_abs_diff_eq!(r.s_out, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.s_in, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.s_e, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.i_c, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn duplication_marginals_are_measurements() {
        let mut rng = Rng64::seeded(17);
        let basis = random_basis(&mut rng, 2);
        let q = duplication(&basis, 2).unwrap();
        let m = direct_measurement(&basis).unwrap();
        let rho = random_density(&mut rng, 2);
        let out = q.apply(&rho).unwrap();
        let want = m.apply(&rho).unwrap();
        for keep in [Keep::First, Keep::Second] {
            let marginal = partial_trace(out.matrix(), (2, 2), keep).unwrap();
            assert!(marginal.max_abs_diff(want.matrix()) < 1e-12);
        }
    }

    #[test]
    fn atom_field_blocks_and_limits() {
        let s = atom_field(0.0).unwrap();
        let rho = DensityMatrix::qubit(0.3, c(0.2, 0.0)).unwrap();
        let out = s.apply(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(&CMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
        assert_eq!(ic(&s, &rho), 0.0);

        let late = atom_field(60.0).unwrap();
        let diag = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_abs_diff_eq!(ic(&late, &diag), binary_entropy(0.7), epsilon = 1e-10);
    }

    #[test]
    fn atom_field_output_matches_closed_form() {
        let gt = 0.8f64;
        let x = (-gt).exp();
        let (r11, r12) = (0.35, 0.3);
        let r22 = 1.0 - r11;
        let rho = DensityMatrix::qubit(r11, c(r12, 0.0)).unwrap();
        let out = atom_field(gt).unwrap().apply(&rho).unwrap();
        let off = r12 * (1.0 - x).sqrt();
        let want = CMatrix::from_real(2, 2, &[r11 + r22 * x, off, off, r22 * (1.0 - x)]).unwrap();
        assert!(out.matrix().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn atom_field_joint_state_closed_form() {
        let gt = 1.3f64;
        let x = (-gt).exp();
        let (r11, r22) = (0.4, 0.6);
        let rho = DensityMatrix::diagonal(&[r11, r22]).unwrap();
        let j = joint_state(&atom_field(gt).unwrap(), &rho).unwrap();
        let off = (r11 * r22 * (1.0 - x)).sqrt();
        #[rustfmt::skip]
        let want = CMatrix::from_real(4, 4, &[
            r11, 0.0,     0.0, off,
            0.0, r22 * x, 0.0, 0.0,
            0.0, 0.0,     0.0, 0.0,
            off, 0.0,     0.0, r22 * (1.0 - x),
        ]).unwrap();
        assert!(j.rho_alpha.matrix().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn atom_field_channel_is_reduced_unitary_dynamics() {
        for gt in [0.0, 0.3, 2.0] {
            let u = atom_field_unitary(gt).unwrap();
            let via_joint = coupled_tlas(&u, &DensityMatrix::basis_state(2, 0)).unwrap();
            assert!(via_joint.max_block_diff(&atom_field(gt).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn atom_field_analytic_values() {
        assert_eq!(atom_field_ic_analytic(1.0, 0.3), 0.0);
        for r22 in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(atom_field_ic_raw(0.5, r22), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(atom_field_ic_analytic(1e-12, 0.5), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn atom_field_one_time_information() {
        let excited = DensityMatrix::basis_state(2, 1);
        let gt = std::f64::consts::LN_2;
        let joint = atom_field_joint_state(gt, &excited).unwrap();
        let i = one_time_coherent_information(&joint, (2, 2)).unwrap();
        assert_abs_diff_eq!(i, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dicke_geometry() {
        let p = DickeParams::new(0.5, 1.0);
        assert_abs_diff_eq!(p.gamma_s() + p.gamma_a(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.lambda_shift(), 6.0, epsilon = 1e-12);
        assert_eq!(DickeParams::without_shift(0.5, 1.0).lambda_shift(), 0.0);
        // g -> 1 as φ -> 0 and g -> 0 as φ -> ∞
        assert_abs_diff_eq!(DickeParams::new(1e-3, 0.0).g(), 1.0, epsilon = 1e-5);
        assert!(DickeParams::new(1e4, 0.0).g().abs() < 1e-3);
        for k in 0..64 {
            let phi = 0.3 + 2.7 * k as f64 / 63.0;
            assert!(DickeParams::new(phi, 0.0).g().abs() <= 1.0);
        }
    }

    #[test]
    fn dicke_amplitude_limits() {
        let a = dicke_amplitudes(&DickeParams::new(0.7, 0.0)).unwrap();
        assert_eq!(a.f, 0.0);
        assert_abs_diff_eq!(a.f_s.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.f_a.norm(), 0.0, epsilon = 1e-15);

        let late = dicke_amplitudes(&DickeParams::new(2.0, 200.0)).unwrap();
        assert_abs_diff_eq!(late.f, 1.0, epsilon = 1e-12);
        assert!(late.f_s.norm() < 1e-12 && late.f_a.norm() < 1e-12);
    }

    #[test]
    fn dicke_decoupled_limit() {
        // far apart: g ~ 0 and Λ ~ 0, so f_a vanishes
        for gt in [0.1, 1.0, 3.0] {
            let n2 = two_atom_population(&DickeParams::new(1e5, gt)).unwrap();
            assert!(n2 < 1e-9);
        }
    }

    #[test]
    fn two_atom_channel_blocks() {
        let p = DickeParams::new(0.9, 0.7);
        let a = dicke_amplitudes(&p).unwrap();
        let s = two_atom_channel(&p).unwrap();
        assert_eq!(s.block(0, 1)[(0, 1)], a.f_a.conj());
        assert_eq!(s.block(1, 0)[(1, 0)], a.f_a);
        assert_abs_diff_eq!(s.block(1, 1)[(0, 0)].re, a.ground_weight(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.block(1, 1)[(1, 1)].re, a.f_a.norm_sqr(), epsilon = 1e-15);

        let start = two_atom_channel(&DickeParams::new(0.5, 0.0)).unwrap();
        assert_eq!(ic(&start, &mixed()), 0.0);
        assert_eq!(
            two_atom_population(&DickeParams::new(0.5, 0.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn two_atom_ic_follows_atom_field_formula() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        for gt in [0.1, 0.26, 0.5, 1.5] {
            let p = DickeParams::new(0.5, gt);
            let x = dicke_amplitudes(&p).unwrap().ground_weight();
            let r = coherent_information(&two_atom_channel(&p).unwrap(), &rho).unwrap();
            assert_abs_diff_eq!(r.raw_ic, atom_field_ic_raw(x, 0.5), epsilon = 1e-10);
        }
    }

    #[test]
    fn two_atom_rejects_bad_geometry() {
        assert!(matches!(
            two_atom_channel(&DickeParams::new(0.0, 1.0)),
            Err(ChannelError::Domain(_))
        ));
        assert!(matches!(
            two_atom_channel(&DickeParams::new(1.0, -1.0)),
            Err(ChannelError::Domain(_))
        ));
    }

    proptest! {
        #[test]
        fn dicke_normalization(phi in 0.3f64..3.0, gt in 0.0f64..6.0, zero in any::<bool>()) {
            let p = if zero { DickeParams::without_shift(phi, gt) } else { DickeParams::new(phi, gt) };
            let a = dicke_amplitudes(&p).unwrap();
            prop_assert!((a.f * a.f + a.f_s.norm_sqr() + a.f_a.norm_sqr() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn no_shift_population_bounded(phi in 0.05f64..5.0, gt in 0.0f64..10.0) {
            let n2 = two_atom_population(&DickeParams::without_shift(phi, gt)).unwrap();
            prop_assert!(n2 <= 0.25 + 1e-12);
        }

        #[test]
        fn duplication_keeps_all_information(seed in any::<u64>(), d in 2usize..=3) {
            let mut rng = Rng64::seeded(seed);
            let basis = random_basis(&mut rng, d);
            let rho = random_density(&mut rng, d);
            let r = coherent_information(&duplication(&basis, d).unwrap(), &rho).unwrap();
            prop_assert!(r.s_e <= 1e-9);
            prop_assert!((r.i_c - r.s_in).abs() <= 1e-9);
        }

        #[test]
        fn random_povms_carry_no_information(seed in any::<u64>(), outcomes in 1usize..=4) {
            let mut rng = Rng64::seeded(seed);
            let povm = random_povm(&mut rng, 2, outcomes);
            let m = indirect_measurement(&pointer_projectors(outcomes), &povm).unwrap();
            let rho = random_density(&mut rng, 2);
            let r = coherent_information(&m, &rho).unwrap();
            prop_assert!(r.raw_ic <= 1e-9);
        }
    }

    #[test]
    fn joint_entropy_constant_under_unitary_with_pure_field() {
        use crate::numkit::kron;
        use crate::qstate::von_neumann_entropy;
        use crate::superop::from_unitary;
        let mut rng = Rng64::seeded(17);
        let rho1 = random_density(&mut rng, 2);
        let vacuum = DensityMatrix::basis_state(2, 0);
        let start = DensityMatrix::new(kron(rho1.matrix(), vacuum.matrix())).unwrap();
        let s0 = von_neumann_entropy(&rho1).unwrap();
        for gt in [0.0, 0.3, 1.0, 4.0] {
            let u = from_unitary(&atom_field_unitary(gt).unwrap()).unwrap();
            let s = von_neumann_entropy(&u.apply(&start).unwrap()).unwrap();
            assert_abs_diff_eq!(s, s0, epsilon = 1e-10);
        }
    }
}
