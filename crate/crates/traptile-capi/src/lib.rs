//! C ABI over the tiling library: opaque handles, integer status codes, and
//! JSON/SVG strings for structured results.
//!
//! Ownership rules: every pointer returned by a `*_new`, `*_tile_*`,
//! `*_from_json`, or `*_to_*` function is owned by the caller and must be
//! released with the matching `*_free` function. Status codes are written
//! through an optional out-pointer; `traptile_last_error` returns a
//! thread-local message describing the most recent failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use traptile_core::analysis::check_conditions;
use traptile_core::analysis::DEFAULT_PRECISION_CAP;
use traptile_core::circuit::verify_kenyon;
use traptile_core::field::{parse_qnum, parse_rational};
use traptile_core::geometry::{realize, to_svg, verify_exact, SvgOptions, Tiling};
use traptile_core::synth::{tile_quadratic, tile_rational, SynthError};
use traptile_core::FieldContext;

/// Success.
pub const TRAPTILE_OK: i32 = 0;
/// A required pointer argument was null.
pub const TRAPTILE_ERR_NULL_ARGUMENT: i32 = 1;
/// A string argument did not parse (UTF-8 or number grammar).
pub const TRAPTILE_ERR_PARSE: i32 = 2;
/// Inputs violate a documented precondition.
pub const TRAPTILE_ERR_DOMAIN: i32 = 3;
/// A verification check ran and returned FAIL.
pub const TRAPTILE_ERR_VERIFY_FAIL: i32 = 4;
/// Construction exceeded the piece budget.
pub const TRAPTILE_ERR_BUDGET: i32 = 5;
/// Any other internal failure.
pub const TRAPTILE_ERR_INTERNAL: i32 = 6;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let stored = CString::new(message.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("invalid error text").expect("static text"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(stored));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn write_status(out: *mut i32, code: i32) {
    if !out.is_null() {
        unsafe { *out = code };
    }
}

/// Field context handle; wraps the discriminant and number parsing rules.
pub struct TraptileContext(FieldContext);

/// Verified-geometry handle: a target figure plus scaled piece placements.
pub struct TraptileTiling(Tiling);

fn synth_code(e: &SynthError) -> i32 {
    match e {
        SynthError::Domain(_) | SynthError::Precondition(_) => TRAPTILE_ERR_DOMAIN,
        SynthError::Budget(_) => TRAPTILE_ERR_BUDGET,
        SynthError::Figure(_) => TRAPTILE_ERR_DOMAIN,
    }
}

/// # Safety
/// `s` must be null or a valid NUL-terminated C string.
unsafe fn required_str<'a>(s: *const c_char, status: *mut i32) -> Option<&'a str> {
    if s.is_null() {
        set_error("null string argument");
        write_status(status, TRAPTILE_ERR_NULL_ARGUMENT);
        return None;
    }
    match unsafe { CStr::from_ptr(s) }.to_str() {
        Ok(text) => Some(text),
        Err(_) => {
            set_error("argument is not valid UTF-8");
            write_status(status, TRAPTILE_ERR_PARSE);
            None
        }
    }
}

fn into_c_string(text: String) -> *mut c_char {
    match CString::new(text) {
        Ok(s) => s.into_raw(),
        Err(_) => {
            set_error("result contained an interior NUL byte");
            ptr::null_mut()
        }
    }
}

/// Returns the message for the most recent error on this thread, or null.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn traptile_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |s| s.as_ptr())
    })
}

/// Creates a field context for Q[sqrt(d)]; `d` is a rational string such as
/// "2" or "5/4" and must be positive and not a perfect square.
///
/// # Safety
/// `d` must be a valid NUL-terminated C string; `status` may be null.
#[no_mangle]
pub unsafe extern "C" fn traptile_context_new(
    d: *const c_char,
    status: *mut i32,
) -> *mut TraptileContext {
    clear_error();
    let Some(text) = (unsafe { required_str(d, status) }) else {
        return ptr::null_mut();
    };
    let parsed = match parse_rational(text) {
        Ok(r) => r,
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_PARSE);
            return ptr::null_mut();
        }
    };
    match FieldContext::new(parsed) {
        Ok(ctx) => {
            write_status(status, TRAPTILE_OK);
            Box::into_raw(Box::new(TraptileContext(ctx)))
        }
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_DOMAIN);
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `ctx` must be null or a pointer from [`traptile_context_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn traptile_context_free(ctx: *mut TraptileContext) {
    if !ctx.is_null() {
        drop(unsafe { Box::from_raw(ctx) });
    }
}

unsafe fn borrow_context<'a>(
    ctx: *const TraptileContext,
    status: *mut i32,
) -> Option<&'a FieldContext> {
    if ctx.is_null() {
        set_error("null context handle");
        write_status(status, TRAPTILE_ERR_NULL_ARGUMENT);
        return None;
    }
    Some(unsafe { &(*ctx).0 })
}

unsafe fn borrow_tiling<'a>(
    tiling: *const TraptileTiling,
    status: *mut i32,
) -> Option<&'a Tiling> {
    if tiling.is_null() {
        set_error("null tiling handle");
        write_status(status, TRAPTILE_ERR_NULL_ARGUMENT);
        return None;
    }
    Some(unsafe { &(*tiling).0 })
}

/// Builds a verified-by-construction tiling of t(b) by homotheties of t(a);
/// both midlines are rational strings greater than 1.
///
/// # Safety
/// `ctx` must be a live context handle; `a` and `b` valid C strings;
/// `status` may be null.
#[no_mangle]
pub unsafe extern "C" fn traptile_tile_rational(
    ctx: *const TraptileContext,
    a: *const c_char,
    b: *const c_char,
    status: *mut i32,
) -> *mut TraptileTiling {
    clear_error();
    let Some(ctx) = (unsafe { borrow_context(ctx, status) }) else {
        return ptr::null_mut();
    };
    let (Some(a_text), Some(b_text)) =
        (unsafe { required_str(a, status) }, unsafe { required_str(b, status) })
    else {
        return ptr::null_mut();
    };
    let parse = |text: &str| {
        parse_rational(text).map_err(|e| {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_PARSE);
        })
    };
    let (Ok(a), Ok(b)) = (parse(a_text), parse(b_text)) else {
        return ptr::null_mut();
    };
    match tile_rational(ctx, &a, &b) {
        Ok(tree) => {
            write_status(status, TRAPTILE_OK);
            Box::into_raw(Box::new(TraptileTiling(realize(&tree))))
        }
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, synth_code(&e));
            ptr::null_mut()
        }
    }
}

/// Builds a verified tiling of t(c) by homotheties of t(a) and t(b); the
/// midlines are quadratic strings such as "3+1*sqrt(2)".
///
/// # Safety
/// Same contract as [`traptile_tile_rational`], plus `c`.
#[no_mangle]
pub unsafe extern "C" fn traptile_tile_quadratic(
    ctx: *const TraptileContext,
    a: *const c_char,
    b: *const c_char,
    c: *const c_char,
    status: *mut i32,
) -> *mut TraptileTiling {
    clear_error();
    let Some(ctx) = (unsafe { borrow_context(ctx, status) }) else {
        return ptr::null_mut();
    };
    let texts = [
        unsafe { required_str(a, status) },
        unsafe { required_str(b, status) },
        unsafe { required_str(c, status) },
    ];
    let [Some(a_text), Some(b_text), Some(c_text)] = texts else {
        return ptr::null_mut();
    };
    let parse = |text: &str| {
        parse_qnum(text, ctx).map_err(|e| {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_PARSE);
        })
    };
    let (Ok(a), Ok(b), Ok(c)) = (parse(a_text), parse(b_text), parse(c_text)) else {
        return ptr::null_mut();
    };
    match tile_quadratic(&a, &b, &c) {
        Ok(tree) => {
            write_status(status, TRAPTILE_OK);
            Box::into_raw(Box::new(TraptileTiling(realize(&tree))))
        }
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, synth_code(&e));
            ptr::null_mut()
        }
    }
}

/// Parses a tiling from its JSON file format.
///
/// # Safety
/// `json` must be a valid C string; `status` may be null.
#[no_mangle]
pub unsafe extern "C" fn traptile_tiling_from_json(
    json: *const c_char,
    status: *mut i32,
) -> *mut TraptileTiling {
    clear_error();
    let Some(text) = (unsafe { required_str(json, status) }) else {
        return ptr::null_mut();
    };
    let value: serde_json::Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_PARSE);
            return ptr::null_mut();
        }
    };
    match Tiling::from_json(&value) {
        Ok(tiling) => {
            write_status(status, TRAPTILE_OK);
            Box::into_raw(Box::new(TraptileTiling(tiling)))
        }
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_PARSE);
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `tiling` must be null or a live tiling handle, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn traptile_tiling_free(tiling: *mut TraptileTiling) {
    if !tiling.is_null() {
        drop(unsafe { Box::from_raw(tiling) });
    }
}

/// Number of piece placements.
///
/// # Safety
/// `tiling` must be null or a live tiling handle.
#[no_mangle]
pub unsafe extern "C" fn traptile_piece_count(tiling: *const TraptileTiling) -> usize {
    unsafe { borrow_tiling(tiling, ptr::null_mut()) }.map_or(0, |t| t.placements.len())
}

/// Re-runs the exact boundary-cancellation check. Returns `TRAPTILE_OK`,
/// `TRAPTILE_ERR_VERIFY_FAIL` (with the residue in the error message), or an
/// error code for malformed handles.
///
/// # Safety
/// `tiling` must be a live tiling handle.
#[no_mangle]
pub unsafe extern "C" fn traptile_verify(tiling: *const TraptileTiling) -> i32 {
    clear_error();
    let Some(tiling) = (unsafe { borrow_tiling(tiling, ptr::null_mut()) }) else {
        return TRAPTILE_ERR_NULL_ARGUMENT;
    };
    match verify_exact(tiling) {
        Ok(report) if report.pass() => TRAPTILE_OK,
        Ok(report) => {
            set_error(&report.to_string());
            TRAPTILE_ERR_VERIFY_FAIL
        }
        Err(e) => {
            set_error(&e.to_string());
            TRAPTILE_ERR_DOMAIN
        }
    }
}

/// Runs the electrical-network check and returns its report as JSON.
/// Writes `TRAPTILE_OK` when the network is consistent with a tiling,
/// `TRAPTILE_ERR_VERIFY_FAIL` otherwise.
///
/// # Safety
/// `tiling` must be a live tiling handle; `status` may be null.
#[no_mangle]
pub unsafe extern "C" fn traptile_kenyon_report(
    tiling: *const TraptileTiling,
    status: *mut i32,
) -> *mut c_char {
    clear_error();
    let Some(tiling) = (unsafe { borrow_tiling(tiling, status) }) else {
        return ptr::null_mut();
    };
    match verify_kenyon(tiling) {
        Ok(report) => {
            write_status(
                status,
                if report.pass() {
                    TRAPTILE_OK
                } else {
                    TRAPTILE_ERR_VERIFY_FAIL
                },
            );
            into_c_string(report.to_json().to_string())
        }
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_DOMAIN);
            ptr::null_mut()
        }
    }
}

/// Serializes the tiling to its JSON file format.
///
/// # Safety
/// `tiling` must be a live tiling handle; `status` may be null.
#[no_mangle]
pub unsafe extern "C" fn traptile_tiling_to_json(
    tiling: *const TraptileTiling,
    status: *mut i32,
) -> *mut c_char {
    clear_error();
    let Some(tiling) = (unsafe { borrow_tiling(tiling, status) }) else {
        return ptr::null_mut();
    };
    write_status(status, TRAPTILE_OK);
    into_c_string(tiling.to_json().to_string())
}

/// Renders the tiling as an SVG document.
///
/// # Safety
/// `tiling` must be a live tiling handle; `status` may be null.
#[no_mangle]
pub unsafe extern "C" fn traptile_tiling_to_svg(
    tiling: *const TraptileTiling,
    status: *mut i32,
) -> *mut c_char {
    clear_error();
    let Some(tiling) = (unsafe { borrow_tiling(tiling, status) }) else {
        return ptr::null_mut();
    };
    write_status(status, TRAPTILE_OK);
    into_c_string(to_svg(tiling, &SvgOptions::default()))
}

/// Evaluates the necessary tileability conditions for candidate midline `b`
/// against prototile midline `a`; returns the report as JSON.
///
/// # Safety
/// `ctx` must be a live context handle; `a`, `b` valid C strings; `status`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn traptile_check_conditions(
    ctx: *const TraptileContext,
    a: *const c_char,
    b: *const c_char,
    status: *mut i32,
) -> *mut c_char {
    clear_error();
    let Some(ctx) = (unsafe { borrow_context(ctx, status) }) else {
        return ptr::null_mut();
    };
    let (Some(a_text), Some(b_text)) =
        (unsafe { required_str(a, status) }, unsafe { required_str(b, status) })
    else {
        return ptr::null_mut();
    };
    let parse = |text: &str| {
        parse_qnum(text, ctx).map_err(|e| {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_PARSE);
        })
    };
    let (Ok(a), Ok(b)) = (parse(a_text), parse(b_text)) else {
        return ptr::null_mut();
    };
    match check_conditions(&a, &b, DEFAULT_PRECISION_CAP) {
        Ok(report) => {
            write_status(status, TRAPTILE_OK);
            into_c_string(report.to_json().to_string())
        }
        Err(e) => {
            set_error(&e.to_string());
            write_status(status, TRAPTILE_ERR_DOMAIN);
            ptr::null_mut()
        }
    }
}

/// Releases a string returned by any `*_to_json`, `*_to_svg`, or report
/// function.
///
/// # Safety
/// `s` must be null or a string pointer returned by this library, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn traptile_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
