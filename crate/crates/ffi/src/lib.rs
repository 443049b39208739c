//! C interface to the spinquench simulator.
//!
//! Objects are opaque heap handles created by `*_new` functions and released
//! with the matching `*_free`. Every function returns an [`SqStatus`]; on
//! failure [`sq_last_error`] describes the problem. Panics are caught at the
//! boundary and reported as [`SqStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use spinquench::dynamics::{evolve_each, EvolutionConfig, Method};
use spinquench::model::{build_hamiltonian, ModelParams, SparseOperator};
use spinquench::observables::{magnetization_profile as magnetization, ObservableSeries};
use spinquench::{Error, SpinBasis, StateVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EmptySector = 3,
    Capacity = 4,
    DimensionMismatch = 5,
    BasisMismatch = 6,
    Convergence = 7,
    Config = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqMethod {
    Dense = 0,
    Krylov = 1,
}

/// Chain parameters. When `use_theta` is true the couplings are
/// `(j0 cos θ, j0 sin θ)` and `j1`, `j2` are ignored.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SqModelParams {
    pub length: usize,
    pub two_s: u32,
    pub use_theta: bool,
    pub j0: f64,
    pub theta: f64,
    pub j1: f64,
    pub j2: f64,
    pub h0: f64,
    pub gamma: f64,
    pub d: f64,
}

/// Opaque spin basis.
pub struct SqBasis(SpinBasis);

/// Opaque sparse Hamiltonian.
pub struct SqOperator(SparseOperator);

/// Opaque state vector.
pub struct SqState(StateVector);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> SqStatus {
    match err {
        Error::InvalidArgument(_) | Error::SiteOutOfRange { .. } => SqStatus::InvalidArgument,
        Error::EmptySector { .. } => SqStatus::EmptySector,
        Error::Capacity { .. } => SqStatus::Capacity,
        Error::DimensionMismatch(_) => SqStatus::DimensionMismatch,
        Error::BasisMismatch => SqStatus::BasisMismatch,
        Error::Convergence(_) => SqStatus::Convergence,
        Error::Config(_) => SqStatus::Config,
        Error::Io(_) => SqStatus::Io,
    }
}

fn guard<F>(f: F) -> SqStatus
where
    F: FnOnce() -> Result<(), SqStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SqStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            SqStatus::Panic
        }
    }
}

fn check<T>(r: spinquench::Result<T>) -> Result<T, SqStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), SqStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(SqStatus::NullPointer);
    }
    Ok(())
}

fn invalid(msg: &str) -> SqStatus {
    set_error(msg);
    SqStatus::InvalidArgument
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `(Sᶻ_tot / (L·S))²`; returns NaN for `length == 0` or `two_s == 0`.
#[no_mangle]
pub extern "C" fn sq_thermal_imbalance(length: usize, two_s: u32, two_sz_total: i64) -> f64 {
    if length == 0 || two_s == 0 {
        return f64::NAN;
    }
    spinquench::thermal_imbalance(length, two_s, two_sz_total)
}

/// Build the basis of all configurations with `2Sᶻ_tot = two_sz_total`, or
/// the full product space when `constrained` is false.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sq_basis_new(
    length: usize,
    two_s: u32,
    constrained: bool,
    two_sz_total: i64,
    out: *mut *mut SqBasis,
) -> SqStatus {
    guard(|| {
        non_null(out, "out")?;
        let basis = check(SpinBasis::new(length, two_s, constrained.then_some(two_sz_total)))?;
        // SAFETY: checked non-null; caller guarantees validity.
        unsafe { *out = Box::into_raw(Box::new(SqBasis(basis))) };
        Ok(())
    })
}

/// # Safety
/// `basis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sq_basis_len(basis: *const SqBasis, out: *mut usize) -> SqStatus {
    guard(|| {
        non_null(basis, "basis")?;
        non_null(out, "out")?;
        // SAFETY: checked non-null; caller guarantees validity.
        unsafe { *out = (*basis).0.len() };
        Ok(())
    })
}

/// Ordinal of the configuration `pattern` (`length` entries of `m_j = 2Sᶻ_j`).
/// Sets `*found` to false when the configuration is outside the basis.
///
/// # Safety
/// `pattern` must point to `length` readable values; `out` and `found` writable.
#[no_mangle]
pub unsafe extern "C" fn sq_basis_index_of(
    basis: *const SqBasis,
    pattern: *const i32,
    length: usize,
    out: *mut usize,
    found: *mut bool,
) -> SqStatus {
    guard(|| {
        non_null(basis, "basis")?;
        non_null(pattern, "pattern")?;
        non_null(out, "out")?;
        non_null(found, "found")?;
        // SAFETY: checked non-null; caller guarantees `length` readable entries.
        let config = unsafe { std::slice::from_raw_parts(pattern, length) };
        let basis = unsafe { &(*basis).0 };
        if length != basis.length() {
            return Err(invalid("pattern length differs from the chain length"));
        }
        let idx = basis.index_of(config);
        unsafe {
            *found = idx.is_some();
            *out = idx.unwrap_or(0);
        }
        Ok(())
    })
}

/// # Safety
/// `basis` must be null or a handle from [`sq_basis_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sq_basis_free(basis: *mut SqBasis) {
    if !basis.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(basis) });
    }
}

fn model_params(p: &SqModelParams) -> ModelParams {
    let base = if p.use_theta {
        ModelParams::with_theta(p.length, p.two_s, p.j0, p.theta)
    } else {
        let mut m = ModelParams::with_couplings(p.length, p.two_s, p.j1, p.j2);
        m.j0 = p.j0;
        m
    };
    base.field(p.h0, p.gamma).anisotropy(p.d)
}

/// Assemble the Hamiltonian on `basis`.
///
/// # Safety
/// `basis` must be a live handle, `params` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sq_hamiltonian_new(
    basis: *const SqBasis,
    params: *const SqModelParams,
    out: *mut *mut SqOperator,
) -> SqStatus {
    guard(|| {
        non_null(basis, "basis")?;
        non_null(params, "params")?;
        non_null(out, "out")?;
        // SAFETY: checked non-null; caller guarantees validity.
        let (basis, params) = unsafe { (&(*basis).0, &*params) };
        let op = check(build_hamiltonian(&model_params(params), basis))?;
        unsafe { *out = Box::into_raw(Box::new(SqOperator(op))) };
        Ok(())
    })
}

/// # Safety
/// `op` must be a live handle; `dim` and `nnz` writable.
#[no_mangle]
pub unsafe extern "C" fn sq_operator_shape(op: *const SqOperator, dim: *mut usize, nnz: *mut usize) -> SqStatus {
    guard(|| {
        non_null(op, "op")?;
        non_null(dim, "dim")?;
        non_null(nnz, "nnz")?;
        // SAFETY: checked non-null; caller guarantees validity.
        unsafe {
            *dim = (*op).0.dim();
            *nnz = (*op).0.nnz();
        }
        Ok(())
    })
}

/// Matrix element `⟨row|H|col⟩`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sq_operator_get(op: *const SqOperator, row: usize, col: usize, out: *mut f64) -> SqStatus {
    guard(|| {
        non_null(op, "op")?;
        non_null(out, "out")?;
        // SAFETY: checked non-null; caller guarantees validity.
        let op = unsafe { &(*op).0 };
        if row >= op.dim() || col >= op.dim() {
            return Err(invalid("matrix index out of range"));
        }
        unsafe { *out = op.get(row, col) };
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from [`sq_hamiltonian_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sq_operator_free(op: *mut SqOperator) {
    if !op.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(op) });
    }
}

/// Product state `|m_1 … m_L⟩` on `basis`.
///
/// # Safety
/// `pattern` must point to `length` readable values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sq_state_product(
    basis: *const SqBasis,
    pattern: *const i32,
    length: usize,
    out: *mut *mut SqState,
) -> SqStatus {
    guard(|| {
        non_null(basis, "basis")?;
        non_null(pattern, "pattern")?;
        non_null(out, "out")?;
        // SAFETY: checked non-null; caller guarantees `length` readable entries.
        let config = unsafe { std::slice::from_raw_parts(pattern, length) };
        let basis = unsafe { &(*basis).0 };
        let state = check(StateVector::product(basis, config))?;
        unsafe { *out = Box::into_raw(Box::new(SqState(state))) };
        Ok(())
    })
}

/// `⟨Sᶻ_j⟩` for `j = 1..=L` into `out[0..L]`.
///
/// # Safety
/// `out` must have room for `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn sq_state_magnetization(
    state: *const SqState,
    basis: *const SqBasis,
    out: *mut f64,
    capacity: usize,
) -> SqStatus {
    guard(|| {
        non_null(state, "state")?;
        non_null(basis, "basis")?;
        non_null(out, "out")?;
        // SAFETY: checked non-null; caller guarantees validity.
        let (state, basis) = unsafe { (&(*state).0, &(*basis).0) };
        if capacity < basis.length() {
            return Err(invalid("output buffer shorter than the chain"));
        }
        let profile = check(magnetization(state, basis))?;
        let dst = unsafe { std::slice::from_raw_parts_mut(out, profile.len()) };
        dst.copy_from_slice(&profile);
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle from [`sq_state_product`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sq_state_free(state: *mut SqState) {
    if !state.is_null() {
        // SAFETY: ownership returns from the caller.
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Evolve `state` under `op` and record the imbalance and the entanglement
/// entropy (bits, bond after site `cut`) at each of the `n_times` ascending
/// times starting at 0. Either output pointer may be null.
///
/// # Safety
/// `times` must hold `n_times` values; non-null outputs must have room for `n_times`.
#[no_mangle]
pub unsafe extern "C" fn sq_simulate(
    op: *const SqOperator,
    basis: *const SqBasis,
    state: *const SqState,
    method: SqMethod,
    times: *const f64,
    n_times: usize,
    cut: usize,
    imbalance_out: *mut f64,
    entropy_out: *mut f64,
) -> SqStatus {
    guard(|| {
        non_null(op, "op")?;
        non_null(basis, "basis")?;
        non_null(state, "state")?;
        non_null(times, "times")?;
        // SAFETY: checked non-null; caller guarantees validity and lengths.
        let (op, basis, psi0) = unsafe { (&(*op).0, &(*basis).0, &(*state).0) };
        let times = unsafe { std::slice::from_raw_parts(times, n_times) };
        let method = match method {
            SqMethod::Dense => Method::Dense,
            SqMethod::Krylov => Method::Krylov,
        };
        let config = EvolutionConfig::with_grid(method, times.to_vec());
        let initial = check(magnetization(psi0, basis))?;
        let mut series = ObservableSeries::new(cut);
        check(evolve_each(op, psi0, &config, |_, t, psi| series.record(t, psi, basis, &initial)))?;
        if !imbalance_out.is_null() {
            unsafe { std::slice::from_raw_parts_mut(imbalance_out, n_times) }.copy_from_slice(&series.imbalance);
        }
        if !entropy_out.is_null() {
            unsafe { std::slice::from_raw_parts_mut(entropy_out, n_times) }.copy_from_slice(&series.entropy);
        }
        Ok(())
    })
}
