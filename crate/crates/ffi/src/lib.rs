//! C interface to `ctxprob`.
//!
//! Models are opaque `CtxModel` handles created by one of the constructors
//! and released with `ctxprob_model_free`. Every fallible call returns a
//! `CtxStatus`; on failure `ctxprob_last_error_message` describes the error.
//! Strings handed out by the library are freed with `ctxprob_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ctxprob::canonical::to_canonical_string;
use ctxprob::interference::{Branch, ContextClass, InterferenceCoefficients};
use ctxprob::model::{generate_kq, Model};
use ctxprob::prob::Event;
use ctxprob::report::{analyze, represent};
use ctxprob::verify::{context_family, verify_model, Suite, VerifyOptions};
use ctxprob::Error;

/// Opaque model handle.
pub struct CtxModel {
    inner: Model,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtxStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Validation = 3,
    UnknownContext = 4,
    Precondition = 5,
    Computation = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtxContextClass {
    Trigonometric = 0,
    Hyperbolic = 1,
    Mixed = 2,
    Boundary = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtxReportKind {
    Analyze = 0,
    Represent = 1,
    Verify = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CtxVerifySummary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CtxStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation(_) => CtxStatus::Validation,
            Error::UnknownContext(_) => CtxStatus::UnknownContext,
            Error::Precondition(_) | Error::QOutOfRange(_) | Error::ConstraintUnsatisfiable(_) => {
                CtxStatus::Precondition
            }
            _ => CtxStatus::Computation,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CtxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CtxStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CtxStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CtxStatus::NullArgument, format!("`{what}` is null"))
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(CtxStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

/// # Safety
/// `p` is null or a live handle.
unsafe fn model<'a>(p: *const CtxModel) -> Result<&'a Model, Failure> {
    p.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

/// Declared contexts, Omega and the `a=v` / `b=v` cells.
fn lookup(model: &Model, name: &str) -> Result<Event, Failure> {
    if let Some((_, e)) = context_family(model).into_iter().find(|(n, _)| n == name) {
        return Ok(e);
    }
    // The family drops cells equal to a declared context, so resolve them here.
    let cell = name.split_once('=').and_then(|(var, value)| {
        let v = model.variables.get(var)?;
        let value: f64 = value.parse().ok()?;
        let e = v.level_set(value);
        (!e.is_empty()).then_some(e)
    });
    cell.ok_or_else(|| Error::UnknownContext(name.to_string()).into())
}

unsafe fn hand_out(out: *mut *mut CtxModel, m: Model) -> Result<(), Failure> {
    *out = Box::into_raw(Box::new(CtxModel { inner: m }));
    Ok(())
}

/// Parses and validates a model document.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_model_load_json(json: *const c_char, out: *mut *mut CtxModel) -> CtxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        hand_out(out, Model::from_json_str(text(json, "json")?)?)
    })
}

/// Loads a model document from a file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_model_load_file(path: *const c_char, out: *mut *mut CtxModel) -> CtxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        hand_out(out, Model::load(text(path, "path")?)?)
    })
}

/// The four-point model with weights (q, 1/2 − q, q, 1/2 − q), 0 < q < 1/2.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_model_generate_kq(q: f64, out: *mut *mut CtxModel) -> CtxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        hand_out(out, generate_kq(q)?.compile()?)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `model` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_model_free(model: *mut CtxModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of values of the `b` variable, i.e. the buffer length needed by
/// `ctxprob_analyze_context`.
///
/// # Safety
/// `model` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_model_outcome_count(model: *const CtxModel, out: *mut usize) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        *out.as_mut().ok_or_else(|| null("out"))? = m.pair.b_values().len();
        Ok(())
    })
}

/// P(B | C) for two named contexts.
///
/// # Safety
/// `model` is a live handle; names are NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_conditional_probability(
    model: *const CtxModel,
    event: *const c_char,
    context: *const c_char,
    out: *mut f64,
) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        let b = lookup(m, text(event, "event")?)?;
        let c = lookup(m, text(context, "context")?)?;
        *out.as_mut().ok_or_else(|| null("out"))? = m.space.conditional(&b, &c)?;
        Ok(())
    })
}

/// Interference coefficients δ(x) and λ(x) of a named context.
///
/// `delta` and `lambda` must each hold `capacity` doubles; `len` receives
/// the number of `b`-values. A too-small buffer yields `BufferTooSmall`
/// with `len` still set.
///
/// # Safety
/// `model` is a live handle; `name` is NUL-terminated; the out pointers are
/// writable for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_analyze_context(
    model: *const CtxModel,
    name: *const c_char,
    class: *mut CtxContextClass,
    delta: *mut f64,
    lambda: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        let ctx = lookup(m, text(name, "name")?)?;
        let co = InterferenceCoefficients::compute(&m.space, &m.pair, &ctx)?;
        let n = co.lambda.len();
        *len.as_mut().ok_or_else(|| null("len"))? = n;
        if capacity < n {
            return Err(Failure(
                CtxStatus::BufferTooSmall,
                format!("need {n} entries, got {capacity}"),
            ));
        }
        if delta.is_null() || lambda.is_null() || class.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(co.delta.as_ptr(), delta, n);
        ptr::copy_nonoverlapping(co.lambda.as_ptr(), lambda, n);
        *class = match co.class() {
            ContextClass::Trigonometric => CtxContextClass::Trigonometric,
            ContextClass::Hyperbolic => CtxContextClass::Hyperbolic,
            ContextClass::Mixed => CtxContextClass::Mixed,
            ContextClass::Boundary => CtxContextClass::Boundary,
        };
        Ok(())
    })
}

/// Runs a verification suite (`core`, `complex`, `hyperbolic`,
/// `multivalued` or `all`). A NaN tolerance keeps each check's default.
/// Returns `Ok` whenever the suite ran; inspect `failed` for the verdict.
///
/// # Safety
/// `model` is a live handle; `suite` is NUL-terminated; `summary` is writable.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_verify(
    model: *const CtxModel,
    suite: *const c_char,
    tolerance: f64,
    summary: *mut CtxVerifySummary,
) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        let suite: Suite = text(suite, "suite")?
            .parse()
            .map_err(|e: String| Failure(CtxStatus::Precondition, e))?;
        let opts = VerifyOptions {
            tolerance: (!tolerance.is_nan()).then_some(tolerance),
        };
        let r = verify_model(m, suite, opts);
        *summary.as_mut().ok_or_else(|| null("summary"))? = CtxVerifySummary {
            passed: r.passed,
            failed: r.failed,
            skipped: r.skipped,
        };
        Ok(())
    })
}

/// Canonical JSON for one of the reports. `context` may be null to cover
/// every context. The string is released with `ctxprob_string_free`.
///
/// # Safety
/// `model` is a live handle; `context` is null or NUL-terminated; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_report_json(
    model: *const CtxModel,
    kind: CtxReportKind,
    context: *const c_char,
    out: *mut *mut c_char,
) -> CtxStatus {
    guard(|| {
        let m = self::model(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let ctx = if context.is_null() {
            None
        } else {
            Some(text(context, "context")?)
        };
        let json = match kind {
            CtxReportKind::Analyze => to_canonical_string(&analyze(m, ctx)?),
            CtxReportKind::Represent => to_canonical_string(&represent(m, ctx, Branch::Principal, None)?),
            CtxReportKind::Verify => to_canonical_string(&verify_model(m, Suite::All, VerifyOptions::default())),
        }
        .map_err(|e| Failure(CtxStatus::Computation, e.to_string()))?;
        *out = CString::new(json)
            .map_err(|e| Failure(CtxStatus::Computation, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ctxprob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ctxprob_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
