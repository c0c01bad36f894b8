//! C ABI for the `cohinfo` library.
//!
//! Channels and states are opaque handles created by `coh_*_new` style
//! constructors and released with the matching `*_free`. Complex matrices
//! cross the boundary as interleaved `(re, im)` doubles in row-major order.
//! Every fallible call returns a [`CohStatus`]; the message for the most
//! recent failure on the calling thread is available from
//! [`coh_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use cohinfo::chanfile::{self, FileError};
use cohinfo::channels::{self, ChannelError, DephasingRabiParams, DickeParams};
use cohinfo::cohinfo::{coherent_information, CohError};
use cohinfo::numkit::CMatrix;
use cohinfo::qstate::{DensityMatrix, StateError};
use cohinfo::superop::{check_cp_tp, SuperopError, Superoperator};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NotPhysical = 4,
    Parse = 5,
    Panic = 6,
}

/// Opaque channel handle.
pub struct CohChannel {
    inner: Superoperator,
}

/// Opaque density-matrix handle.
pub struct CohState {
    inner: DensityMatrix,
}

/// Physicality audit of a channel.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CohCpTpReport {
    pub cp: bool,
    pub tp: bool,
    pub min_choi_eig: f64,
    pub max_trace_dev: f64,
    pub max_hermiticity_dev: f64,
}

/// Entropies in bits for a channel acting on an input state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CohReport {
    pub s_in: f64,
    pub s_out: f64,
    pub s_e: f64,
    /// Coherent information clamped at zero.
    pub i_c: f64,
    /// Unclamped `s_out - s_e`.
    pub raw_ic: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

struct Fail(CohStatus, String);

impl Fail {
    fn null(what: &str) -> Self {
        Fail(CohStatus::NullPointer, format!("{what} is null"))
    }

    fn arg(msg: impl Into<String>) -> Self {
        Fail(CohStatus::InvalidArgument, msg.into())
    }
}

impl From<StateError> for Fail {
    fn from(e: StateError) -> Self {
        let status = match e {
            StateError::DimMismatch(_) | StateError::NotSquare { .. } => CohStatus::InvalidArgument,
            _ => CohStatus::NotPhysical,
        };
        Fail(status, e.to_string())
    }
}

impl From<SuperopError> for Fail {
    fn from(e: SuperopError) -> Self {
        let status = match e {
            SuperopError::DimMismatch(_) => CohStatus::InvalidArgument,
            SuperopError::Domain(_) => CohStatus::Domain,
            _ => CohStatus::NotPhysical,
        };
        Fail(status, e.to_string())
    }
}

impl From<ChannelError> for Fail {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::Domain(_) => Fail(CohStatus::Domain, e.to_string()),
            ChannelError::Superop(inner) => inner.into(),
            ChannelError::State(inner) => inner.into(),
            _ => Fail(CohStatus::InvalidArgument, e.to_string()),
        }
    }
}

impl From<CohError> for Fail {
    fn from(e: CohError) -> Self {
        let status = match e {
            CohError::DimMismatch(_) => CohStatus::InvalidArgument,
            _ => CohStatus::NotPhysical,
        };
        Fail(status, e.to_string())
    }
}

/// Runs `f`, converting failures and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CohStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CohStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CohStatus::Panic
        }
    }
}

/// # Safety
/// `data` must point to `2 * rows * cols` readable doubles.
unsafe fn read_matrix(data: *const f64, rows: usize, cols: usize) -> Result<CMatrix, Fail> {
    if data.is_null() {
        return Err(Fail::null("matrix data"));
    }
    let n = rows
        .checked_mul(cols)
        .and_then(|v| v.checked_mul(2))
        .ok_or_else(|| Fail::arg("size overflow"))?;
    let raw = std::slice::from_raw_parts(data, n);
    let entries = raw
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    CMatrix::new(rows, cols, entries).map_err(|e| Fail::arg(e.to_string()))
}

/// # Safety
/// `out` must be null or point to a writable `*mut T`.
unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn emit_channel(out: *mut *mut CohChannel, s: Superoperator) -> Result<(), Fail> {
    emit(out, CohChannel { inner: s })
}

fn positive(dim: usize, what: &str) -> Result<usize, Fail> {
    if dim == 0 {
        Err(Fail::arg(format!("{what} must be positive")))
    } else {
        Ok(dim)
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn coh_status_message(status: CohStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CohStatus::Ok => c"ok",
        CohStatus::NullPointer => c"null pointer argument",
        CohStatus::InvalidArgument => c"invalid argument",
        CohStatus::Domain => c"parameter outside its domain",
        CohStatus::NotPhysical => c"not a valid state or channel",
        CohStatus::Parse => c"parse error",
        CohStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message for the most recent call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn coh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn coh_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Density matrix from `2 * dim * dim` interleaved doubles.
///
/// # Safety
/// `data` must point to `2 * dim * dim` readable doubles and `out` to a
/// writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_state_new(
    dim: usize,
    data: *const f64,
    out: *mut *mut CohState,
) -> CohStatus {
    guard(|| {
        let m = read_matrix(data, positive(dim, "dim")?, dim)?;
        emit(
            out,
            CohState {
                inner: DensityMatrix::new(m)?,
            },
        )
    })
}

/// The maximally mixed state `I / dim`.
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_state_maximally_mixed(
    dim: usize,
    out: *mut *mut CohState,
) -> CohStatus {
    guard(|| {
        let d = positive(dim, "dim")?;
        emit(
            out,
            CohState {
                inner: DensityMatrix::maximally_mixed(d),
            },
        )
    })
}

/// Dimension of a state, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn coh_state_dim(state: *const CohState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.dim())
}

/// Copies the `2 * dim * dim` interleaved entries into `out`.
///
/// # Safety
/// `state` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn coh_state_entries(
    state: *const CohState,
    out: *mut f64,
    len: usize,
) -> CohStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| Fail::null("state"))?;
        if out.is_null() {
            return Err(Fail::null("output buffer"));
        }
        let m = s.inner.matrix();
        let need = 2 * m.rows() * m.cols();
        if len < need {
            return Err(Fail::arg(format!(
                "buffer holds {len} doubles, need {need}"
            )));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (pair, z) in dst.chunks_exact_mut(2).zip(m.as_slice()) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `state` must be a live handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn coh_state_entropy(state: *const CohState, out: *mut f64) -> CohStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| Fail::null("state"))?;
        let out = out.as_mut().ok_or_else(|| Fail::null("output"))?;
        *out = cohinfo::qstate::von_neumann_entropy(&s.inner)?;
        Ok(())
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn coh_state_free(state: *mut CohState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Channel from `dim_in * dim_in` blocks of `dim_out x dim_out` entries,
/// block `(k, l)` at offset `2 * (k * dim_in + l) * dim_out * dim_out`.
/// Only shapes are checked; audit with [`coh_channel_check`].
///
/// # Safety
/// `blocks` must point to `2 * dim_in^2 * dim_out^2` readable doubles and
/// `out` to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_from_blocks(
    dim_in: usize,
    dim_out: usize,
    blocks: *const f64,
    out: *mut *mut CohChannel,
) -> CohStatus {
    guard(|| {
        let (di, d) = (positive(dim_in, "dim_in")?, positive(dim_out, "dim_out")?);
        let all = read_matrix(blocks, di * di * d, d)?;
        let list = (0..di * di).map(|b| all.block(b * d, 0, d, d)).collect();
        emit_channel(out, Superoperator::from_blocks(di, d, list)?)
    })
}

/// Parses the text channel format. On a parse error `*error_line` (if not
/// null) receives the 1-based line number.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a writable handle pointer
/// and `error_line` null or writable.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_parse(
    text: *const c_char,
    out: *mut *mut CohChannel,
    error_line: *mut usize,
) -> CohStatus {
    guard(|| {
        if text.is_null() {
            return Err(Fail::null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Fail::arg("text is not UTF-8"))?;
        let file = chanfile::parse_channel(text).map_err(|e| {
            if let (Some(line), Some(slot)) = (e.line(), error_line.as_mut()) {
                *slot = line;
            }
            match e {
                FileError::Parse { .. } => Fail(CohStatus::Parse, e.to_string()),
                FileError::Io { .. } => Fail::arg(e.to_string()),
            }
        })?;
        emit_channel(
            out,
            Superoperator::from_blocks(file.dim_in, file.dim_out, file.blocks)?,
        )
    })
}

/// Driven two-level atom with pure dephasing rate `gamma` and Rabi frequency `omega`.
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_dephasing(
    gamma: f64,
    omega: f64,
    t: f64,
    out: *mut *mut CohChannel,
) -> CohStatus {
    guard(|| {
        emit_channel(
            out,
            channels::dephasing_rabi(DephasingRabiParams { gamma, omega, t })?,
        )
    })
}

/// Stark-coupled hydrogen channel with `x = sin(omega_s t)`.
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_hydrogen(x: f64, out: *mut *mut CohChannel) -> CohStatus {
    guard(|| emit_channel(out, channels::hydrogen_stark(x)?))
}

/// Exchange-coupled atoms at precession angle `theta`, atom 2 in the pure
/// state with ground population `rho11`.
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_coupled_exchange(
    theta: f64,
    rho11: f64,
    out: *mut *mut CohChannel,
) -> CohStatus {
    guard(|| {
        let rho2 = channels::pure_qubit(rho11)?;
        emit_channel(
            out,
            channels::coupled_tlas(&channels::exchange_unitary(theta), &rho2)?,
        )
    })
}

/// Full measurement in the orthonormal basis given by the columns of a
/// `dim x dim` interleaved matrix.
///
/// # Safety
/// `basis` must point to `2 * dim * dim` readable doubles and `out` to a
/// writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_direct_measurement(
    dim: usize,
    basis: *const f64,
    out: *mut *mut CohChannel,
) -> CohStatus {
    guard(|| {
        let m = read_matrix(basis, positive(dim, "dim")?, dim)?;
        let cols: Vec<_> = (0..dim).map(|j| m.column(j)).collect();
        emit_channel(out, channels::direct_measurement(&cols)?)
    })
}

/// Coherent duplication in the basis given by the columns of `basis`.
///
/// # Safety
/// As [`coh_channel_direct_measurement`].
#[no_mangle]
pub unsafe extern "C" fn coh_channel_duplication(
    dim: usize,
    basis: *const f64,
    out: *mut *mut CohChannel,
) -> CohStatus {
    guard(|| {
        let m = read_matrix(basis, positive(dim, "dim")?, dim)?;
        let cols: Vec<_> = (0..dim).map(|j| m.column(j)).collect();
        emit_channel(out, channels::duplication(&cols, dim)?)
    })
}

/// Atom decaying into the vacuum field after dimensionless time `gamma_t`.
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_atom_field(
    gamma_t: f64,
    out: *mut *mut CohChannel,
) -> CohStatus {
    guard(|| emit_channel(out, channels::atom_field(gamma_t)?))
}

/// Atom 1 to atom 2 through the shared field at distance `phi = k0 R`.
/// `dipole_shift = false` switches the dipole-dipole shift off.
///
/// # Safety
/// `out` must point to a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_two_atoms(
    phi: f64,
    gamma_t: f64,
    dipole_shift: bool,
    out: *mut *mut CohChannel,
) -> CohStatus {
    guard(|| {
        let p = if dipole_shift {
            DickeParams::new(phi, gamma_t)
        } else {
            DickeParams::without_shift(phi, gamma_t)
        };
        emit_channel(out, channels::two_atom_channel(&p)?)
    })
}

/// Input and output dimensions; either pointer may be null.
///
/// # Safety
/// `ch` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_dims(
    ch: *const CohChannel,
    dim_in: *mut usize,
    dim_out: *mut usize,
) -> CohStatus {
    guard(|| {
        let ch = ch.as_ref().ok_or_else(|| Fail::null("channel"))?;
        if let Some(d) = dim_in.as_mut() {
            *d = ch.inner.dim_in();
        }
        if let Some(d) = dim_out.as_mut() {
            *d = ch.inner.dim_out();
        }
        Ok(())
    })
}

/// Complete-positivity and trace-preservation audit at tolerance `tol`.
///
/// # Safety
/// `ch` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_check(
    ch: *const CohChannel,
    tol: f64,
    out: *mut CohCpTpReport,
) -> CohStatus {
    guard(|| {
        let ch = ch.as_ref().ok_or_else(|| Fail::null("channel"))?;
        let out = out.as_mut().ok_or_else(|| Fail::null("output"))?;
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Fail::arg("tol must be finite and >= 0"));
        }
        let r = check_cp_tp(&ch.inner, tol);
        *out = CohCpTpReport {
            cp: r.cp,
            tp: r.tp,
            min_choi_eig: r.min_choi_eig,
            max_trace_dev: r.max_trace_dev,
            max_hermiticity_dev: r.max_hermiticity_dev,
        };
        Ok(())
    })
}

/// Output state of `ch` for input `state`.
///
/// # Safety
/// `ch` and `state` must be live handles and `out` a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_apply(
    ch: *const CohChannel,
    state: *const CohState,
    out: *mut *mut CohState,
) -> CohStatus {
    guard(|| {
        let ch = ch.as_ref().ok_or_else(|| Fail::null("channel"))?;
        let st = state.as_ref().ok_or_else(|| Fail::null("state"))?;
        let r = check_cp_tp(&ch.inner, 1e-9);
        if !(r.cp && r.tp) {
            return Err(Fail(CohStatus::NotPhysical, "channel is not CP/TP".into()));
        }
        emit(
            out,
            CohState {
                inner: ch.inner.apply(&st.inner)?,
            },
        )
    })
}

/// Coherent information of `ch` for input `state`.
///
/// # Safety
/// `ch` and `state` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coh_coherent_information(
    ch: *const CohChannel,
    state: *const CohState,
    out: *mut CohReport,
) -> CohStatus {
    guard(|| {
        let ch = ch.as_ref().ok_or_else(|| Fail::null("channel"))?;
        let st = state.as_ref().ok_or_else(|| Fail::null("state"))?;
        let out = out.as_mut().ok_or_else(|| Fail::null("output"))?;
        let r = coherent_information(&ch.inner, &st.inner)?;
        *out = CohReport {
            s_in: r.s_in,
            s_out: r.s_out,
            s_e: r.s_e,
            i_c: r.i_c,
            raw_ic: r.raw_ic,
        };
        Ok(())
    })
}

/// Releases a channel. Null is ignored.
///
/// # Safety
/// `ch` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn coh_channel_free(ch: *mut CohChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}
