//! C ABI over the ctxprob library.
//!
//! The surface follows the usual conventions: opaque handles behind
//! pointers, status codes for every fallible call, `ctxprob_last_error_message`
//! for the detail of the most recent failure on the calling thread, and
//! explicit free functions for everything this library allocates. The
//! header `include/ctxprob.h` is generated by cbindgen at build time.
//!
//! Complex matrices cross the boundary as row-major interleaved doubles:
//! entry (i,j) of a dim×dim matrix occupies slots `2*(i*dim+j)` (real) and
//! `2*(i*dim+j)+1` (imaginary).

use ctxprob::quantum::{born, lueders, quantum_conditional, CMatrix, DensityOperator, Projector, C64};
use ctxprob::runner::{run_scenario, RunConfig};
use ctxprob::scenario::Scenario;
use ctxprob::Error;
use libc::c_char;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

/// Status of a call. Anything other than `Ok` leaves a message retrievable
/// via `ctxprob_last_error_message`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CtxprobStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The scenario could not be parsed or referenced missing fixtures.
    ParseError = 3,
    /// File system failure.
    IoError = 4,
    /// A domain precondition failed (dimensions, zero branches, ...).
    DomainError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> CtxprobStatus {
    match err {
        Error::Scenario(_) | Error::Syntax { .. } => CtxprobStatus::ParseError,
        Error::Io(_) => CtxprobStatus::IoError,
        _ => CtxprobStatus::DomainError,
    }
}

fn fail(err: &Error) -> CtxprobStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Opaque handle to a loaded scenario.
pub struct CtxprobScenario {
    inner: Scenario,
}

/// Options for `ctxprob_scenario_run`. Zero-initialize (or use
/// `ctxprob_run_options_default`) and set what you need.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct CtxprobRunOptions {
    pub has_seed: bool,
    pub seed: u64,
    pub has_tolerance: bool,
    pub tolerance: f64,
    pub parallel: bool,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ctxprob_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn ctxprob_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Default-initialized run options (no overrides, sequential).
#[no_mangle]
pub extern "C" fn ctxprob_run_options_default() -> CtxprobRunOptions {
    CtxprobRunOptions {
        has_seed: false,
        seed: 0,
        has_tolerance: false,
        tolerance: 0.0,
        parallel: false,
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, CtxprobStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(CtxprobStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CtxprobStatus::InvalidUtf8
    })
}

/// Loads a scenario from a TOML file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer. On
/// `Ok` the handle in `*out` must be released with `ctxprob_scenario_free`.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_scenario_load(
    path: *const c_char,
    out: *mut *mut CtxprobScenario,
) -> CtxprobStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CtxprobStatus::NullPointer;
    }
    let path = match read_str(path) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match Scenario::load(path) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CtxprobScenario { inner }));
            CtxprobStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Parses a scenario from TOML text.
///
/// # Safety
/// As `ctxprob_scenario_load`, with `text` the document itself.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_scenario_parse(
    text: *const c_char,
    out: *mut *mut CtxprobScenario,
) -> CtxprobStatus {
    if out.is_null() {
        set_error("null output pointer");
        return CtxprobStatus::NullPointer;
    }
    let text = match read_str(text) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match Scenario::parse(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CtxprobScenario { inner }));
            CtxprobStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Scenario name as a newly allocated string; free with
/// `ctxprob_string_free`.
///
/// # Safety
/// `scenario` must be a live handle from a load/parse call.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_scenario_name(scenario: *const CtxprobScenario) -> *mut c_char {
    if scenario.is_null() {
        return ptr::null_mut();
    }
    let name = (*scenario).inner.name.replace('\0', " ");
    CString::new(name)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Runs every task of the scenario and returns the JSON report.
///
/// On `Ok`, `*json_out` holds the report (free with `ctxprob_string_free`)
/// and, when `pass_out` is non-null, `*pass_out` says whether every task
/// passed. A report whose tasks fail still returns `Ok`; inspect the JSON.
///
/// # Safety
/// `scenario` must be a live handle; `options` may be null for defaults;
/// `json_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_scenario_run(
    scenario: *const CtxprobScenario,
    options: *const CtxprobRunOptions,
    json_out: *mut *mut c_char,
    pass_out: *mut bool,
) -> CtxprobStatus {
    if scenario.is_null() || json_out.is_null() {
        set_error("null scenario or output pointer");
        return CtxprobStatus::NullPointer;
    }
    let opts = if options.is_null() {
        ctxprob_run_options_default()
    } else {
        *options
    };
    let config = RunConfig {
        seed_override: opts.has_seed.then_some(opts.seed),
        tolerance_override: opts.has_tolerance.then_some(opts.tolerance),
        task_filter: Vec::new(),
        parallel: opts.parallel,
        trials_override: None,
    };
    match run_scenario(&(*scenario).inner, &config) {
        Ok(outcome) => {
            let mut bytes = outcome.report.to_json_bytes();
            bytes.retain(|&b| b != 0);
            let json = CString::new(bytes).expect("no interior NULs");
            *json_out = json.into_raw();
            if !pass_out.is_null() {
                *pass_out = outcome.report.pass;
            }
            CtxprobStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Releases a scenario handle. Null is a no-op.
///
/// # Safety
/// `scenario` must have come from a load/parse call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_scenario_free(scenario: *mut CtxprobScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Releases a string allocated by this library. Null is a no-op.
///
/// # Safety
/// `s` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn matrix_from_interleaved(dim: usize, data: *const f64) -> CMatrix {
    CMatrix::from_fn(dim, dim, |i, j| {
        let base = 2 * (i * dim + j);
        C64::new(*data.add(base), *data.add(base + 1))
    })
}

unsafe fn matrix_to_interleaved(m: &CMatrix, out: *mut f64) {
    let dim = m.nrows();
    for i in 0..dim {
        for j in 0..dim {
            let base = 2 * (i * dim + j);
            *out.add(base) = m[(i, j)].re;
            *out.add(base + 1) = m[(i, j)].im;
        }
    }
}

/// Born probability of a projector in a state.
///
/// `rho` and `projector` are dim×dim row-major interleaved complex
/// matrices (2·dim·dim doubles each); both must satisfy the usual
/// operator invariants.
///
/// # Safety
/// The matrix pointers must reference at least 2·dim·dim readable doubles
/// and `out` one writable double.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_born(
    dim: usize,
    rho: *const f64,
    projector: *const f64,
    out: *mut f64,
) -> CtxprobStatus {
    if rho.is_null() || projector.is_null() || out.is_null() {
        set_error("null matrix or output pointer");
        return CtxprobStatus::NullPointer;
    }
    let build = || -> ctxprob::Result<f64> {
        let rho = DensityOperator::new(matrix_from_interleaved(dim, rho))?;
        let p = Projector::new(matrix_from_interleaved(dim, projector))?;
        born(&rho, &p)
    };
    match build() {
        Ok(v) => {
            *out = v;
            CtxprobStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Post-measurement state update; writes the updated density matrix into
/// `out` (2·dim·dim doubles, same layout).
///
/// # Safety
/// As `ctxprob_born`, with `out` holding 2·dim·dim writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_lueders(
    dim: usize,
    rho: *const f64,
    projector: *const f64,
    out: *mut f64,
) -> CtxprobStatus {
    if rho.is_null() || projector.is_null() || out.is_null() {
        set_error("null matrix or output pointer");
        return CtxprobStatus::NullPointer;
    }
    let build = || -> ctxprob::Result<DensityOperator> {
        let rho = DensityOperator::new(matrix_from_interleaved(dim, rho))?;
        let p = Projector::new(matrix_from_interleaved(dim, projector))?;
        lueders(&rho, &p)
    };
    match build() {
        Ok(updated) => {
            matrix_to_interleaved(updated.matrix(), out);
            CtxprobStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Probability of `e` after a measurement of `f` in state `rho`.
///
/// # Safety
/// As `ctxprob_born`, with three input matrices.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_quantum_conditional(
    dim: usize,
    rho: *const f64,
    e: *const f64,
    f: *const f64,
    out: *mut f64,
) -> CtxprobStatus {
    if rho.is_null() || e.is_null() || f.is_null() || out.is_null() {
        set_error("null matrix or output pointer");
        return CtxprobStatus::NullPointer;
    }
    let build = || -> ctxprob::Result<f64> {
        let rho = DensityOperator::new(matrix_from_interleaved(dim, rho))?;
        let pe = Projector::new(matrix_from_interleaved(dim, e))?;
        let pf = Projector::new(matrix_from_interleaved(dim, f))?;
        quantum_conditional(&rho, &pe, &pf)
    };
    match build() {
        Ok(v) => {
            *out = v;
            CtxprobStatus::Ok
        }
        Err(e) => fail(&e),
    }
}
