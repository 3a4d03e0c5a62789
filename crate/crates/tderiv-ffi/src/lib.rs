//! C ABI over the nest-algebra toolkit. Handles are opaque, every call
//! returns a status code, and failure details are retrievable per thread
//! via `td_last_error`. All returned strings are UTF-8, allocated by this
//! library, and must be released with `td_string_free`.
//!
//! Status codes mirror the command-line tool: 0 success, 2 bad input,
//! 3 broken internal guarantee, plus 4 for null arguments and 5 for a
//! caught panic (which indicates a bug in this library, not the caller).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use tderiv::engine::{OpMap, ZVerdict};
use tderiv::error::Error;
use tderiv::nest::{NestAlgebra, NestSpec};
use tderiv::report::{
    parse_map, run_corollaries, run_counterexample, run_solve, run_verify, CampaignConfig,
};
use tderiv::scalar::FieldMode;

pub const TD_OK: i32 = 0;
pub const TD_ERR_INPUT: i32 = 2;
pub const TD_ERR_VIOLATION: i32 = 3;
pub const TD_ERR_NULL: i32 = 4;
pub const TD_ERR_PANIC: i32 = 5;

/// A nest algebra handle. Create with `td_algebra_new`, release with
/// `td_algebra_free`.
pub struct TdAlgebra(Arc<NestAlgebra>);

/// A linear map on one algebra. Create with `td_map_parse`, release with
/// `td_map_free`.
pub struct TdMap(OpMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).ok();
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn code_of(e: &Error) -> i32 {
    i32::from(e.exit_code())
}

/// Run a fallible body with a panic shield; the body returns a status code
/// and is responsible for setting the error message on failure.
fn guarded(body: impl FnOnce() -> i32) -> i32 {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            TD_ERR_PANIC
        }
    }
}

fn fail(e: &Error) -> i32 {
    set_last_error(&e.to_string());
    code_of(e)
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> i32 {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            TD_OK
        }
        Err(_) => {
            set_last_error("output contained an interior NUL byte");
            TD_ERR_PANIC
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, i32> {
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("argument is not valid UTF-8");
        TD_ERR_INPUT
    })
}

/// Last failure message for the current thread, or null when the most
/// recent call succeeded. The pointer stays valid until the next call into
/// this library from the same thread; do not free it.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Release a string returned by this library. Null is accepted and ignored.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn td_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build the algebra of the nest with cut points `dims[0..len]` (strictly
/// increasing, last entry = ambient size). On success writes a fresh handle
/// to `out`.
///
/// # Safety
/// `dims` must point to `len` readable entries and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn td_algebra_new(
    dims: *const usize,
    len: usize,
    out: *mut *mut TdAlgebra,
) -> i32 {
    guarded(|| {
        if dims.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        let dims = std::slice::from_raw_parts(dims, len).to_vec();
        match NestSpec::new(dims) {
            Ok(spec) => {
                let handle = Box::new(TdAlgebra(Arc::new(NestAlgebra::new(spec))));
                *out = Box::into_raw(handle);
                TD_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Linear dimension of the algebra (the number of basis matrix units).
///
/// # Safety
/// `alg` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_algebra_dim(alg: *const TdAlgebra, out: *mut usize) -> i32 {
    guarded(|| {
        if alg.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        *out = (*alg).0.dim();
        TD_OK
    })
}

/// Release an algebra handle. Null is accepted and ignored.
///
/// # Safety
/// `alg` must be a handle from `td_algebra_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_algebra_free(alg: *mut TdAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Parse a map for the algebra from matrix text: one row per line, exact
/// scalar entries (`3`, `-1/2`, `1/2+3*i`, ...) separated by whitespace.
/// The matrix must be d x d for the algebra's dimension d.
///
/// # Safety
/// `alg` must be a live handle, `text` a NUL-terminated string, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn td_map_parse(
    alg: *const TdAlgebra,
    text: *const c_char,
    out: *mut *mut TdMap,
) -> i32 {
    guarded(|| {
        if alg.is_null() || text.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match parse_map(&(*alg).0, text) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(TdMap(map)));
                TD_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Render a map back to the matrix text format accepted by `td_map_parse`.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_map_format(map: *const TdMap, out: *mut *mut c_char) -> i32 {
    guarded(|| {
        if map.is_null() || out.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        write_string(out, (*map).0.mat().to_text())
    })
}

/// Release a map handle. Null is accepted and ignored.
///
/// # Safety
/// `map` must be a handle from `td_map_parse`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn td_map_free(map: *mut TdMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Decide whether (delta, tau) respects zero products and, when it does,
/// complete the pair. Writes a JSON report (verdict, implementing triple or
/// witness, completed map, step trace). Returns 3 — with the report still
/// written — only if the pair is judged infeasible without a witness, which
/// would contradict an internal guarantee.
///
/// # Safety
/// Both maps must be live handles on the same algebra; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn td_solve(
    delta: *const TdMap,
    tau: *const TdMap,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if delta.is_null() || tau.is_null() || out_json.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        let delta = &(*delta).0;
        let tau = &(*tau).0;
        match run_solve(delta, tau) {
            Ok(outcome) => {
                let json = outcome.to_json(delta.alg(), None).to_string();
                let code = write_string(out_json, json);
                if code != TD_OK {
                    return code;
                }
                if outcome.z.verdict == ZVerdict::Inconclusive {
                    set_last_error("pair is infeasible yet no witness was found");
                    TD_ERR_VIOLATION
                } else {
                    TD_OK
                }
            }
            Err(e) => fail(&e),
        }
    })
}

unsafe fn campaign_config(
    alg: *const TdAlgebra,
    field: *const c_char,
    trials: u64,
    seed: u64,
) -> Result<CampaignConfig, i32> {
    if field.is_null() {
        set_last_error("null pointer argument");
        return Err(TD_ERR_NULL);
    }
    let field: FieldMode = match read_str(field)?.parse() {
        Ok(f) => f,
        Err(e) => {
            return Err(fail(&e));
        }
    };
    Ok(CampaignConfig {
        nest: (*alg).0.spec().dims().to_vec(),
        field,
        trials,
        seed,
    })
}

/// Run the seeded verification sweep (round-trips plus decided controls) on
/// the algebra. `field` is "rational" or "gaussian". Writes a JSON report
/// without a timing field, so equal seeds give byte-equal reports.
///
/// # Safety
/// `alg` must be a live handle, `field` NUL-terminated, `out_json`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn td_verify(
    alg: *const TdAlgebra,
    field: *const c_char,
    trials: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if alg.is_null() || out_json.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        let config = match campaign_config(alg, field, trials, seed) {
            Ok(c) => c,
            Err(code) => return code,
        };
        match run_verify(&config) {
            Ok(report) => write_string(out_json, report.to_json(None).to_string()),
            Err(e) => fail(&e),
        }
    })
}

/// Run every specialized checker over `trials` constructed positives and
/// `trials` random negatives. Writes the JSON report even when rows are
/// dirty; a misclassification returns 3 so callers cannot miss it.
///
/// # Safety
/// Same contract as `td_verify`.
#[no_mangle]
pub unsafe extern "C" fn td_corollaries(
    alg: *const TdAlgebra,
    field: *const c_char,
    trials: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if alg.is_null() || out_json.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        let config = match campaign_config(alg, field, trials, seed) {
            Ok(c) => c,
            Err(code) => return code,
        };
        match run_corollaries(&config) {
            Ok(report) => {
                let clean = report.all_clean();
                let code = write_string(out_json, report.to_json(None).to_string());
                if code != TD_OK {
                    return code;
                }
                if clean {
                    TD_OK
                } else {
                    set_last_error("checker campaign has misclassifications");
                    TD_ERR_VIOLATION
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Replay the four-dimensional contrast algebra: compatibility certificate,
/// completion infeasibility with the forced-value contradiction, the
/// smallest-nest comparison, and the dimension census. Returns 3 if any
/// part leaves its expected script.
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn td_counterexample(
    samples: u64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if out_json.is_null() {
            set_last_error("null pointer argument");
            return TD_ERR_NULL;
        }
        match run_counterexample(samples as usize, seed) {
            Ok(outcome) => {
                let ok = outcome.ok();
                let code = write_string(out_json, outcome.to_json(None).to_string());
                if code != TD_OK {
                    return code;
                }
                if ok {
                    TD_OK
                } else {
                    set_last_error("contrast-algebra replay left its expected script");
                    TD_ERR_VIOLATION
                }
            }
            Err(e) => fail(&e),
        }
    })
}
