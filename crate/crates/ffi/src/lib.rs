//! C interface to `eigensphere`.
//!
//! Polynomials are passed as opaque `EsPolynomial` handles created by
//! [`es_polynomial_parse`] and released with [`es_polynomial_free`]. Every
//! fallible call returns an [`EsStatus`]; on failure a message is available
//! from [`es_last_error_message`] on the same thread. Strings handed out by the
//! library must be released with [`es_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eigensphere::eigen::verify_eigenfunction;
use eigensphere::geometry::NewtonOptions;
use eigensphere::minimality::{
    check_minimal_codim1, check_minimal_codim2, classify_lawson, LawsonType, MinimalityOptions, MinimalityStatus,
};
use num_rational::BigRational;
use eigensphere::{Error, FailedCondition, Polynomial};
use num_traits::ToPrimitive;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    NotAnEigenfunction = 5,
    Numerical = 6,
    /// A rational result does not fit in 64-bit integers.
    Overflow = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EsFailedCondition {
    None = 0,
    Homogeneity = 1,
    LaplacianP = 2,
    LaplacianP2 = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EsMinimality {
    ExactMinimal = 0,
    NumericMinimal = 1,
    NotMinimal = 2,
    Inconclusive = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EsLawsonType {
    Sphere = 0,
    Torus = 1,
    KleinBottle = 2,
}

/// Outcome of [`es_eigen_check`]. `lambda` and `mu` are `num / den` and are
/// only meaningful when `is_eigen` is true.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EsEigenReport {
    pub is_eigen: bool,
    pub degree: u32,
    pub lambda_num: i64,
    pub lambda_den: i64,
    pub mu_num: i64,
    pub mu_den: i64,
    pub failure: EsFailedCondition,
}

/// Sampling parameters for the minimality checks.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EsMinimalityOptions {
    pub samples: usize,
    pub tol: f64,
    pub reject: f64,
    pub seed: u64,
}

/// Opaque polynomial handle.
pub struct EsPolynomial(Polynomial);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EsStatus {
    match e {
        Error::Syntax { .. } | Error::VariableOutOfRange { .. } | Error::NegativeExponent { .. } => EsStatus::Parse,
        Error::NotAnEigenfunction(_) => EsStatus::NotAnEigenfunction,
        Error::NonConvergence(_)
        | Error::SingularJacobian(_)
        | Error::OffVariety(_)
        | Error::DegeneratePoint(_)
        | Error::PoleSingularity
        | Error::InsufficientYield { .. }
        | Error::EmptyFiber
        | Error::SingularFiber(_) => EsStatus::Numerical,
        Error::Io(_) | Error::Csv(_) | Error::MalformedCloud(_) => EsStatus::Io,
        _ => EsStatus::InvalidArgument,
    }
}

fn fail(status: EsStatus, message: impl Into<String>) -> EsStatus {
    set_error(message.into());
    status
}

/// Runs `f`, recording errors and converting panics to [`EsStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), EsStatus>) -> EsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(EsStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: eigensphere::Result<T>) -> Result<T, EsStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn poly_ref<'a>(p: *const EsPolynomial) -> Result<&'a Polynomial, EsStatus> {
    // SAFETY: callers pass either null or a live handle from es_polynomial_parse.
    unsafe { p.as_ref() }
        .map(|h| &h.0)
        .ok_or_else(|| fail(EsStatus::NullPointer, "null polynomial handle"))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, EsStatus> {
    // SAFETY: callers pass either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| fail(EsStatus::NullPointer, "null output pointer"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn rational(num: i64, den: i64) -> Result<BigRational, EsStatus> {
    if den == 0 {
        return Err(fail(EsStatus::InvalidArgument, "zero denominator"));
    }
    Ok(BigRational::new(num.into(), den.into()))
}

fn split(r: &Option<BigRational>) -> Result<(i64, i64), EsStatus> {
    match r {
        None => Ok((0, 1)),
        Some(r) => match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Ok((n, d)),
            _ => Err(fail(EsStatus::Overflow, format!("{r} does not fit in 64 bits"))),
        },
    }
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn es_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn es_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `text` as a polynomial in `nvars` real variables.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn es_polynomial_parse(text: *const c_char, nvars: usize, out: *mut *mut EsPolynomial) -> EsStatus {
    guard(|| {
        let out = unsafe { out_ref(out)? };
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(fail(EsStatus::NullPointer, "null text"));
        }
        // SAFETY: text is non-null and nul-terminated per the contract.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|_| fail(EsStatus::InvalidUtf8, "text is not UTF-8"))?;
        let p = lift(eigensphere::parse(text, nvars))?;
        *out = Box::into_raw(Box::new(EsPolynomial(p)));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from [`es_polynomial_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn es_polynomial_free(p: *mut EsPolynomial) {
    if !p.is_null() {
        // SAFETY: p came from Box::into_raw in es_polynomial_parse.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn es_polynomial_nvars(p: *const EsPolynomial) -> usize {
    // SAFETY: per the contract.
    unsafe { p.as_ref() }.map_or(0, |h| h.0.nvars())
}

/// Canonical text of the polynomial; free with [`es_string_free`].
///
/// # Safety
/// `p` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn es_polynomial_render(p: *const EsPolynomial, out: *mut *mut c_char) -> EsStatus {
    guard(|| {
        let out = unsafe { out_ref(out)? };
        *out = ptr::null_mut();
        let p = unsafe { poly_ref(p)? };
        *out = into_c_string(eigensphere::render(p));
        Ok(())
    })
}

/// Evaluates at the real point `x[0..len]`, writing the complex value.
///
/// # Safety
/// `x` must point to `len` doubles; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn es_polynomial_evaluate(
    p: *const EsPolynomial,
    x: *const f64,
    len: usize,
    re: *mut f64,
    im: *mut f64,
) -> EsStatus {
    guard(|| {
        let p = unsafe { poly_ref(p)? };
        let (re, im) = unsafe { (out_ref(re)?, out_ref(im)?) };
        if x.is_null() {
            return Err(fail(EsStatus::NullPointer, "null point"));
        }
        // SAFETY: x points to len doubles per the contract.
        let x = unsafe { std::slice::from_raw_parts(x, len) };
        let v = lift(p.evaluate(x))?;
        (*re, *im) = (v.re, v.im);
        Ok(())
    })
}

/// Exact eigenfunction test on the sphere of dimension `n`.
///
/// A polynomial that is not an eigenfunction is not an error: the call
/// returns [`EsStatus::Ok`] with `is_eigen == false` and `failure` set.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn es_eigen_check(p: *const EsPolynomial, n: usize, out: *mut EsEigenReport) -> EsStatus {
    guard(|| {
        let p = unsafe { poly_ref(p)? };
        let out = unsafe { out_ref(out)? };
        let report = lift(verify_eigenfunction(p, n))?;
        let (lambda_num, lambda_den) = split(&report.lambda)?;
        let (mu_num, mu_den) = split(&report.mu)?;
        let failure = match report.failure.as_ref().map(|f| f.condition) {
            None => EsFailedCondition::None,
            Some(FailedCondition::Homogeneity) => EsFailedCondition::Homogeneity,
            Some(FailedCondition::LaplacianP) => EsFailedCondition::LaplacianP,
            Some(FailedCondition::LaplacianP2) => EsFailedCondition::LaplacianP2,
        };
        *out = EsEigenReport {
            is_eigen: report.is_eigen,
            degree: report.k,
            lambda_num,
            lambda_den,
            mu_num,
            mu_den,
            failure,
        };
        Ok(())
    })
}

/// Default sampling parameters.
#[no_mangle]
pub extern "C" fn es_minimality_options_default() -> EsMinimalityOptions {
    let d = MinimalityOptions::default();
    EsMinimalityOptions { samples: d.samples, tol: d.tol, reject: d.reject, seed: d.seed }
}

fn options(o: &EsMinimalityOptions) -> MinimalityOptions {
    MinimalityOptions {
        samples: o.samples,
        tol: o.tol,
        reject: o.reject,
        seed: o.seed,
        cross_check: true,
        newton: NewtonOptions::default(),
    }
}

fn status(s: MinimalityStatus) -> EsMinimality {
    match s {
        MinimalityStatus::ExactMinimal => EsMinimality::ExactMinimal,
        MinimalityStatus::NumericMinimal => EsMinimality::NumericMinimal,
        MinimalityStatus::NotMinimal => EsMinimality::NotMinimal,
        MinimalityStatus::Inconclusive => EsMinimality::Inconclusive,
    }
}

unsafe fn write_verdict(
    v: &eigensphere::minimality::MinimalityVerdict,
    out_status: *mut EsMinimality,
    out_json: *mut *mut c_char,
) -> Result<(), EsStatus> {
    *unsafe { out_ref(out_status)? } = status(v.status);
    // SAFETY: out_json is null or writable per the contract.
    if let Some(json) = unsafe { out_json.as_mut() } {
        *json = into_c_string(serde_json::to_string(v).expect("serializable"));
    }
    Ok(())
}

/// Minimality of the preimage of the line `a Re F + b Im F = 0` with
/// `a = a_num / a_den`, `b = b_num / b_den`. When `out_json` is non-null it
/// receives the full verdict as JSON; free it with [`es_string_free`].
///
/// # Safety
/// `f` must be a live handle; `opts` null or readable; `out_status`
/// writable; `out_json` null or writable.
#[no_mangle]
pub unsafe extern "C" fn es_minimal_line(
    f: *const EsPolynomial,
    a_num: i64,
    a_den: i64,
    b_num: i64,
    b_den: i64,
    n: usize,
    opts: *const EsMinimalityOptions,
    out_status: *mut EsMinimality,
    out_json: *mut *mut c_char,
) -> EsStatus {
    guard(|| {
        let f = unsafe { poly_ref(f)? };
        // SAFETY: opts is null or readable per the contract.
        let opts = unsafe { opts.as_ref() }.copied().unwrap_or_else(|| es_minimality_options_default());
        let (a, b) = (rational(a_num, a_den)?, rational(b_num, b_den)?);
        let v = lift(check_minimal_codim1(f, &a, &b, n, &options(&opts)))?;
        unsafe { write_verdict(&v, out_status, out_json) }
    })
}

/// Minimality of the zero fiber `F = 0` on the sphere of dimension `n`.
///
/// # Safety
/// As for [`es_minimal_line`].
#[no_mangle]
pub unsafe extern "C" fn es_minimal_zero(
    f: *const EsPolynomial,
    n: usize,
    opts: *const EsMinimalityOptions,
    out_status: *mut EsMinimality,
    out_json: *mut *mut c_char,
) -> EsStatus {
    guard(|| {
        let f = unsafe { poly_ref(f)? };
        // SAFETY: opts is null or readable per the contract.
        let opts = unsafe { opts.as_ref() }.copied().unwrap_or_else(|| es_minimality_options_default());
        let v = lift(check_minimal_codim2(f, n, &options(&opts)))?;
        unsafe { write_verdict(&v, out_status, out_json) }
    })
}

/// Topological type of the Lawson surface with parameters `(n, m)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn es_classify_lawson(n: u32, m: u32, out: *mut EsLawsonType) -> EsStatus {
    guard(|| {
        let out = unsafe { out_ref(out)? };
        *out = match lift(classify_lawson(n, m))? {
            LawsonType::Sphere => EsLawsonType::Sphere,
            LawsonType::Torus => EsLawsonType::Torus,
            LawsonType::KleinBottle => EsLawsonType::KleinBottle,
        };
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn es_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: s came from CString::into_raw.
        drop(unsafe { CString::from_raw(s) });
    }
}
