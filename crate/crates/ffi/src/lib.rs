//! C ABI over the eigsolve core.
//!
//! All handles are opaque. Functions return `EigStatus`; on any failure
//! the thread-local error message is readable through `eig_last_error`.
//! Strings returned by this library are heap-allocated and must be
//! released with `eig_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use eigsolve::environment::Observable;
use eigsolve::experiment::{self, CompareReport};
use eigsolve::rlsolver::{run_protocol, ProtocolOptions, RunRecord};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An index argument was out of range.
    IndexOutOfRange = 3,
    /// The operation failed; see `eig_last_error`.
    Failed = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(message: String) -> EigStatus {
    set_last_error(message);
    EigStatus::Failed
}

/// Opaque handle for a Hermitian observable.
pub struct EigObservable {
    inner: Observable,
}

/// Opaque handle for a completed protocol run.
pub struct EigRunRecord {
    observable: Observable,
    record: RunRecord,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, EigStatus> {
    if ptr.is_null() {
        return Err(EigStatus::NullPointer);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_last_error("string argument is not valid UTF-8".to_string());
        EigStatus::InvalidUtf8
    })
}

fn string_out(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Copy of the most recent error message on this thread, or null if none.
#[no_mangle]
pub extern "C" fn eig_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|c| string_out(c.to_string_lossy().into_owned()))
            .unwrap_or(ptr::null_mut())
    })
}

/// Release a string returned by this library.
#[no_mangle]
pub extern "C" fn eig_string_free(s: *mut c_char) {
    if !s.is_null() {
        unsafe { drop(CString::from_raw(s)) };
    }
}

/// Load an observable from a preset name or an observable file path.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn eig_observable_load(
    spec: *const c_char,
    out: *mut *mut EigObservable,
) -> EigStatus {
    if out.is_null() {
        return EigStatus::NullPointer;
    }
    let spec = match unsafe { read_str(spec) } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match eigsolve::io::load_observable(spec) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(EigObservable { inner })) };
            EigStatus::Ok
        }
        Err(e) => fail(e.to_string()),
    }
}

/// Matrix dimension of the observable, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn eig_observable_dim(obs: *const EigObservable) -> usize {
    if obs.is_null() {
        return 0;
    }
    unsafe { &*obs }.inner.dim()
}

/// Label of the observable. Free with `eig_string_free`.
#[no_mangle]
pub extern "C" fn eig_observable_label(obs: *const EigObservable) -> *mut c_char {
    if obs.is_null() {
        return ptr::null_mut();
    }
    string_out(unsafe { &*obs }.inner.label().to_string())
}

/// Release an observable handle.
#[no_mangle]
pub extern "C" fn eig_observable_free(obs: *mut EigObservable) {
    if !obs.is_null() {
        unsafe { drop(Box::from_raw(obs)) };
    }
}

/// Run the staged protocol with the per-preset default schedule.
///
/// # Safety
/// `obs` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn eig_run(
    obs: *const EigObservable,
    seed: u64,
    out: *mut *mut EigRunRecord,
) -> EigStatus {
    if obs.is_null() || out.is_null() {
        return EigStatus::NullPointer;
    }
    let observable = unsafe { &*obs }.inner.clone();
    let schedule = experiment::default_schedule(observable.label());
    match run_protocol(&observable, &schedule, seed, &ProtocolOptions::default()) {
        Ok(record) => {
            unsafe { *out = Box::into_raw(Box::new(EigRunRecord { observable, record })) };
            EigStatus::Ok
        }
        Err(e) => fail(e.to_string()),
    }
}

/// Total single-shot measurements consumed by the run.
#[no_mangle]
pub extern "C" fn eig_run_total_iterations(rec: *const EigRunRecord) -> u64 {
    if rec.is_null() {
        return 0;
    }
    unsafe { &*rec }.record.total_iterations
}

/// 1 if every stage reached the reward threshold, 0 otherwise.
#[no_mangle]
pub extern "C" fn eig_run_converged(rec: *const EigRunRecord) -> i32 {
    if rec.is_null() {
        return 0;
    }
    unsafe { &*rec }.record.converged as i32
}

/// Exact eigenvector overlap fidelity of one agent column.
///
/// # Safety
/// `rec` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn eig_run_overlap_fidelity(
    rec: *const EigRunRecord,
    basis_index: usize,
    out: *mut f64,
) -> EigStatus {
    if rec.is_null() || out.is_null() {
        return EigStatus::NullPointer;
    }
    let handle = unsafe { &*rec };
    if basis_index >= handle.observable.dim() {
        return EigStatus::IndexOutOfRange;
    }
    match eigsolve::analysis::exact_overlap_fidelity(
        &handle.observable,
        &handle.record.final_agent,
        basis_index,
    ) {
        Ok((fidelity, _)) => {
            unsafe { *out = fidelity };
            EigStatus::Ok
        }
        Err(e) => fail(e.to_string()),
    }
}

/// Full run record serialized as JSON. Free with `eig_string_free`.
#[no_mangle]
pub extern "C" fn eig_run_to_json(rec: *const EigRunRecord) -> *mut c_char {
    if rec.is_null() {
        return ptr::null_mut();
    }
    match serde_json::to_string(&unsafe { &*rec }.record) {
        Ok(json) => string_out(json),
        Err(e) => {
            set_last_error(e.to_string());
            ptr::null_mut()
        }
    }
}

/// Release a run record handle.
#[no_mangle]
pub extern "C" fn eig_run_free(rec: *mut EigRunRecord) {
    if !rec.is_null() {
        unsafe { drop(Box::from_raw(rec)) };
    }
}

/// RL versus VQE shot comparison serialized as JSON.
/// `vqe_shots` of 0 selects the per-preset default. Free the result
/// with `eig_string_free`; null signals failure.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn eig_compare_json(
    spec: *const c_char,
    seed: u64,
    vqe_shots: usize,
) -> *mut c_char {
    let spec = match unsafe { read_str(spec) } {
        Ok(s) => s,
        Err(_) => return ptr::null_mut(),
    };
    let shots = if vqe_shots == 0 { None } else { Some(vqe_shots) };
    let report: Result<CompareReport, _> = experiment::compare(spec, seed, shots);
    match report.and_then(|r| serde_json::to_string(&r).map_err(Into::into)) {
        Ok(json) => string_out(json),
        Err(e) => {
            set_last_error(e.to_string());
            ptr::null_mut()
        }
    }
}
