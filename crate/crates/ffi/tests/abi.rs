use std::ffi::{CStr, CString};
use std::ptr;

use eigensphere_ffi::*;

fn parse(text: &str, nvars: usize) -> *mut EsPolynomial {
    let c = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { es_polynomial_parse(c.as_ptr(), nvars, &mut p) }, EsStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let msg = es_last_error_message();
    assert!(!msg.is_null());
    unsafe { CStr::from_ptr(msg) }.to_string_lossy().into_owned()
}

#[test]
fn parse_render_evaluate() {
    let p = parse("z1^2", 4);
    unsafe {
        assert_eq!(es_polynomial_nvars(p), 4);
        let mut s = ptr::null_mut();
        assert_eq!(es_polynomial_render(p, &mut s), EsStatus::Ok);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "x1^2 + 2*i*x1*x2 - x2^2");
        es_string_free(s);
        let x = [1.0, 2.0, 0.0, 0.0];
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(es_polynomial_evaluate(p, x.as_ptr(), 4, &mut re, &mut im), EsStatus::Ok);
        assert_eq!((re, im), (-3.0, 4.0));
        assert_eq!(es_polynomial_evaluate(p, x.as_ptr(), 3, &mut re, &mut im), EsStatus::InvalidArgument);
        es_polynomial_free(p);
    }
}

#[test]
fn parse_errors_carry_messages() {
    let c = CString::new("x1 +").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { es_polynomial_parse(c.as_ptr(), 4, &mut p) }, EsStatus::Parse);
    assert!(p.is_null());
    assert!(last_error().contains("syntax"));
    assert_eq!(unsafe { es_polynomial_parse(ptr::null(), 4, &mut p) }, EsStatus::NullPointer);
    let c = CString::new("x5").unwrap();
    assert_eq!(unsafe { es_polynomial_parse(c.as_ptr(), 4, &mut p) }, EsStatus::Parse);
}

#[test]
fn eigen_report() {
    let p = parse("z1^2 + z2^2", 4);
    let mut r = EsEigenReport {
        is_eigen: false,
        degree: 0,
        lambda_num: 0,
        lambda_den: 0,
        mu_num: 0,
        mu_den: 0,
        failure: EsFailedCondition::None,
    };
    unsafe {
        assert_eq!(es_eigen_check(p, 3, &mut r), EsStatus::Ok);
        assert!(r.is_eigen);
        assert_eq!((r.degree, r.lambda_num, r.lambda_den, r.mu_num, r.mu_den), (2, -8, 1, -4, 1));
        assert_eq!(es_eigen_check(p, 2, &mut r), EsStatus::InvalidArgument);
        es_polynomial_free(p);
        let q = parse("x1^2", 4);
        assert_eq!(es_eigen_check(q, 3, &mut r), EsStatus::Ok);
        assert!(!r.is_eigen);
        assert_eq!(r.failure, EsFailedCondition::LaplacianP);
        es_polynomial_free(q);
    }
}

#[test]
fn minimality_calls() {
    let f = parse("z1^2 + z2^2", 4);
    let mut opts = es_minimality_options_default();
    opts.samples = 50;
    let mut status = EsMinimality::Inconclusive;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(es_minimal_line(f, 1, 1, 0, 1, 3, &opts, &mut status, &mut json), EsStatus::Ok);
        assert_eq!(status, EsMinimality::ExactMinimal);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["certificate"], "8");
        es_string_free(json);

        assert_eq!(es_minimal_line(f, 0, 1, 0, 1, 3, &opts, &mut status, ptr::null_mut()), EsStatus::InvalidArgument);
        assert_eq!(es_minimal_line(f, 1, 0, 0, 1, 3, &opts, &mut status, ptr::null_mut()), EsStatus::InvalidArgument);

        assert_eq!(es_minimal_zero(f, 3, ptr::null(), &mut status, ptr::null_mut()), EsStatus::Ok);
        assert_eq!(status, EsMinimality::NumericMinimal);
        es_polynomial_free(f);

        let g = parse("x1 + x2", 4);
        assert_eq!(es_minimal_line(g, 1, 1, 0, 1, 3, &opts, &mut status, ptr::null_mut()), EsStatus::NotAnEigenfunction);
        es_polynomial_free(g);
    }
}

#[test]
fn lawson_and_null_handling() {
    let mut t = EsLawsonType::Sphere;
    unsafe {
        assert_eq!(es_classify_lawson(1, 3, &mut t), EsStatus::Ok);
        assert_eq!(t, EsLawsonType::Torus);
        assert_eq!(es_classify_lawson(0, 0, &mut t), EsStatus::InvalidArgument);
        assert_eq!(es_classify_lawson(1, 1, ptr::null_mut()), EsStatus::NullPointer);
        es_polynomial_free(ptr::null_mut());
        es_string_free(ptr::null_mut());
        assert_eq!(es_polynomial_nvars(ptr::null()), 0);
    }
    let v = unsafe { CStr::from_ptr(es_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
