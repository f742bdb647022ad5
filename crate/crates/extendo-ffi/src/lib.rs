//! C ABI for the extendo pricing engine.
//!
//! Conventions: handles are opaque pointers created and destroyed by this
//! library; every fallible call returns a status code and writes its result
//! through out-pointers only on success; the failure message for the most
//! recent failing call on the current thread is available from
//! `extendo_last_error_message`. Strings returned through out-pointers are
//! owned by the caller and must be released with `extendo_string_free`.

use extendo::{
    mc_price, price, solve_call_boundaries, solve_put_boundaries, Boundary, ContractSpec,
    MarketData, McConfig, OptionKind, PriceForm, PricingError,
};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

/// Opaque market handle.
pub struct ExtendoMarket(MarketData);

/// Opaque contract handle.
pub struct ExtendoSpec(ContractSpec);

/// Status code of every fallible call. Matches the CLI exit-code classes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtendoStatus {
    Ok = 0,
    InvalidInput = 2,
    NumericFailure = 3,
}

/// Option kind for `extendo_spec_new`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ExtendoKind {
    Call = 0,
    Put = 1,
}

/// Algebraic form of the closed-form evaluation.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ExtendoForm {
    Rectangle = 0,
    Difference = 1,
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

fn fail(e: &PricingError) -> ExtendoStatus {
    set_error(&e.to_string());
    if e.is_numeric_failure() {
        ExtendoStatus::NumericFailure
    } else {
        ExtendoStatus::InvalidInput
    }
}

fn fail_input(message: &str) -> ExtendoStatus {
    set_error(message);
    ExtendoStatus::InvalidInput
}

unsafe fn utf8_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, ExtendoStatus> {
    if ptr.is_null() {
        return Err(fail_input(&format!("null pointer: {name}")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail_input(&format!("{name} is not valid UTF-8")))
}

unsafe fn handle_arg<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, ExtendoStatus> {
    if ptr.is_null() {
        Err(fail_input(&format!("null pointer: {name}")))
    } else {
        Ok(&*ptr)
    }
}

fn out_arg<T>(ptr: *mut T, name: &str) -> Result<(), ExtendoStatus> {
    if ptr.is_null() {
        Err(fail_input(&format!("null pointer: {name}")))
    } else {
        Ok(())
    }
}

macro_rules! ffi_try {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn extendo_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message for the most recent failing call on this thread. The pointer
/// stays valid until the next failing call on the same thread. Empty
/// string when nothing has failed yet.
#[no_mangle]
pub extern "C" fn extendo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Parse a market document (curves inline, as file references resolved
/// against `base_dir`, or the flat shorthand). `base_dir` may be null when
/// the document references no files.
///
/// # Safety
/// `text` and `base_dir` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_market_parse_json(
    text: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut ExtendoMarket,
) -> ExtendoStatus {
    ffi_try!(out_arg(out, "out"));
    let text = ffi_try!(utf8_arg(text, "text"));
    let base = if base_dir.is_null() {
        Path::new(".")
    } else {
        Path::new(ffi_try!(utf8_arg(base_dir, "base_dir")))
    };
    match MarketData::load_json(text, base) {
        Ok(market) => {
            *out = Box::into_raw(Box::new(ExtendoMarket(market)));
            ExtendoStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Build a market with flat curves.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_market_constant(
    spot: f64,
    rate: f64,
    carry: f64,
    sigma: f64,
    out: *mut *mut ExtendoMarket,
) -> ExtendoStatus {
    ffi_try!(out_arg(out, "out"));
    match MarketData::constant(spot, rate, carry, sigma) {
        Ok(market) => {
            *out = Box::into_raw(Box::new(ExtendoMarket(market)));
            ExtendoStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Release a market handle. Null is a no-op.
///
/// # Safety
/// `market` must have come from this library and not been freed already.
#[no_mangle]
pub unsafe extern "C" fn extendo_market_free(market: *mut ExtendoMarket) {
    if !market.is_null() {
        drop(Box::from_raw(market));
    }
}

/// Parse a contract document: `{"kind","K1","K2","T1","T2","A"}`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_spec_parse_json(
    text: *const c_char,
    out: *mut *mut ExtendoSpec,
) -> ExtendoStatus {
    ffi_try!(out_arg(out, "out"));
    let text = ffi_try!(utf8_arg(text, "text"));
    match ContractSpec::load_json(text) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(ExtendoSpec(spec)));
            ExtendoStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Build a contract from scalars.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_spec_new(
    kind: ExtendoKind,
    k1: f64,
    k2: f64,
    t1: f64,
    t2: f64,
    fee: f64,
    out: *mut *mut ExtendoSpec,
) -> ExtendoStatus {
    ffi_try!(out_arg(out, "out"));
    let kind = match kind {
        ExtendoKind::Call => OptionKind::Call,
        ExtendoKind::Put => OptionKind::Put,
    };
    match ContractSpec::new(kind, k1, k2, t1, t2, fee) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(ExtendoSpec(spec)));
            ExtendoStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Release a contract handle. Null is a no-op.
///
/// # Safety
/// `spec` must have come from this library and not been freed already.
#[no_mangle]
pub unsafe extern "C" fn extendo_spec_free(spec: *mut ExtendoSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Closed-form price in the chosen algebraic form.
///
/// # Safety
/// `spec` and `market` must be live handles; `out_price` must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_price(
    spec: *const ExtendoSpec,
    market: *const ExtendoMarket,
    form: ExtendoForm,
    out_price: *mut f64,
) -> ExtendoStatus {
    ffi_try!(out_arg(out_price, "out_price"));
    let spec = ffi_try!(handle_arg(spec, "spec"));
    let market = ffi_try!(handle_arg(market, "market"));
    let form = match form {
        ExtendoForm::Rectangle => PriceForm::Rectangle,
        ExtendoForm::Difference => PriceForm::Difference,
    };
    match price(&spec.0, &market.0, form) {
        Ok(report) => {
            *out_price = report.price;
            ExtendoStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Full price report (price, decomposition, boundaries, period parameters,
/// extension probability) as a canonical JSON string. Release the string
/// with `extendo_string_free`.
///
/// # Safety
/// `spec` and `market` must be live handles; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_price_report_json(
    spec: *const ExtendoSpec,
    market: *const ExtendoMarket,
    form: ExtendoForm,
    out_json: *mut *mut c_char,
) -> ExtendoStatus {
    ffi_try!(out_arg(out_json, "out_json"));
    let spec = ffi_try!(handle_arg(spec, "spec"));
    let market = ffi_try!(handle_arg(market, "market"));
    let form = match form {
        ExtendoForm::Rectangle => PriceForm::Rectangle,
        ExtendoForm::Difference => PriceForm::Difference,
    };
    let report = match price(&spec.0, &market.0, form) {
        Ok(report) => report,
        Err(e) => return fail(&e),
    };
    let json = match extendo::report::to_canonical_json(&report) {
        Ok(json) => json,
        Err(e) => return fail(&e),
    };
    match CString::new(json) {
        Ok(s) => {
            *out_json = s.into_raw();
            ExtendoStatus::Ok
        }
        Err(_) => fail_input("report contained an interior NUL"),
    }
}

/// Extension decision boundaries. A degenerate lower boundary is reported
/// as 0.0 and a degenerate upper boundary as +infinity, matching their
/// mathematical limits; `out_never_extended` is set when extension is never
/// optimal and the contract prices exactly as the base option.
///
/// # Safety
/// `spec` and `market` must be live handles; out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_boundaries(
    spec: *const ExtendoSpec,
    market: *const ExtendoMarket,
    out_i1: *mut f64,
    out_i2: *mut f64,
    out_never_extended: *mut bool,
) -> ExtendoStatus {
    ffi_try!(out_arg(out_i1, "out_i1"));
    ffi_try!(out_arg(out_i2, "out_i2"));
    ffi_try!(out_arg(out_never_extended, "out_never_extended"));
    let spec = ffi_try!(handle_arg(spec, "spec"));
    let market = ffi_try!(handle_arg(market, "market"));
    let params = match extendo::period_params(&market.0, spec.0.t1, spec.0.t2) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let solved = match spec.0.kind {
        OptionKind::Call => solve_call_boundaries(&spec.0, &params),
        OptionKind::Put => solve_put_boundaries(&spec.0, &params),
    };
    match solved {
        Ok(b) => {
            let level = |boundary: Boundary| match boundary {
                Boundary::Zero => 0.0,
                Boundary::Finite(v) => v,
                Boundary::Infinite => f64::INFINITY,
            };
            *out_i1 = level(b.i1);
            *out_i2 = level(b.i2);
            *out_never_extended = b.never_extended;
            ExtendoStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Monte Carlo estimate from the exact-sampling oracle. Deterministic for
/// fixed (paths, seed, antithetic) regardless of worker count.
///
/// # Safety
/// `spec` and `market` must be live handles; out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn extendo_mc_price(
    spec: *const ExtendoSpec,
    market: *const ExtendoMarket,
    paths: u64,
    seed: u64,
    antithetic: bool,
    out_mean: *mut f64,
    out_std_error: *mut f64,
) -> ExtendoStatus {
    ffi_try!(out_arg(out_mean, "out_mean"));
    ffi_try!(out_arg(out_std_error, "out_std_error"));
    let spec = ffi_try!(handle_arg(spec, "spec"));
    let market = ffi_try!(handle_arg(market, "market"));
    let config = match McConfig::new(paths, seed, antithetic) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match mc_price(&spec.0, &market.0, config) {
        Ok(est) => {
            *out_mean = est.mean;
            *out_std_error = est.std_error;
            ExtendoStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have come from this library and not been freed already.
#[no_mangle]
pub unsafe extern "C" fn extendo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
