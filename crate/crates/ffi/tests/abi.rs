use std::ffi::{c_char, c_int, CStr, CString};
use std::process::Command;
use std::ptr;

use folia_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn poly(s: &str, projective: bool) -> *mut FoliaPoly {
    let mut p = ptr::null_mut();
    let text = cstr(s);
    assert_eq!(unsafe { folia_poly_parse(text.as_ptr(), projective as c_int, &mut p) }, FoliaStatus::Ok);
    p
}

fn printed(p: *const FoliaPoly) -> String {
    let mut s: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { folia_poly_print(p, &mut s) }, FoliaStatus::Ok);
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { folia_string_free(s) };
    out
}

fn last_error() -> String {
    let e = folia_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

#[test]
fn parse_print_and_degree() {
    let p = poly("y^2 + x*y - 3/2*x + i", false);
    assert_eq!(printed(p), "x*y + y^2 - 3/2*x + i");
    let mut d = 0;
    assert_eq!(unsafe { folia_poly_degree(p, &mut d) }, FoliaStatus::Ok);
    assert_eq!(d, 2);
    unsafe { folia_poly_free(p) };
}

#[test]
fn parse_errors_are_reported() {
    let mut p = ptr::null_mut();
    let bad = cstr("x^^2");
    assert_eq!(unsafe { folia_poly_parse(bad.as_ptr(), 0, &mut p) }, FoliaStatus::Parse);
    assert!(p.is_null());
    assert!(!last_error().is_empty());
    let wrong = cstr("X + y");
    assert_eq!(unsafe { folia_poly_parse(wrong.as_ptr(), 1, &mut p) }, FoliaStatus::Parse);
}

#[test]
fn null_arguments() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { folia_poly_parse(ptr::null(), 0, &mut p) }, FoliaStatus::NullPointer);
    let mut d = 0;
    assert_eq!(unsafe { folia_poly_degree(ptr::null(), &mut d) }, FoliaStatus::NullPointer);
    unsafe {
        folia_poly_free(ptr::null_mut());
        folia_field_free(ptr::null_mut());
        folia_form_free(ptr::null_mut());
        folia_string_free(ptr::null_mut());
    }
}

#[test]
fn invariance_cofactor_and_iif() {
    // rotation field and the unit circle
    let (p, q) = (poly("-y", false), poly("x", false));
    let mut field = ptr::null_mut();
    assert_eq!(unsafe { folia_field_new(p, q, &mut field) }, FoliaStatus::Ok);
    let circle = poly("x^2 + y^2 - 1", false);
    let mut inv = -1;
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { folia_check_invariant(field, circle, &mut inv, &mut k) }, FoliaStatus::Ok);
    assert_eq!(inv, 1);
    assert_eq!(printed(k), "0");
    let line = poly("x - 1", false);
    assert_eq!(unsafe { folia_check_invariant(field, line, &mut inv, ptr::null_mut()) }, FoliaStatus::Ok);
    assert_eq!(inv, 0);
    let mut iif = -1;
    assert_eq!(unsafe { folia_iif_check(field, circle, &mut iif) }, FoliaStatus::Ok);
    assert_eq!(iif, 1);
    unsafe {
        folia_poly_free(k);
        folia_poly_free(line);
        folia_poly_free(circle);
        folia_field_free(field);
        folia_poly_free(p);
        folia_poly_free(q);
    }
}

#[test]
fn document_and_projectivize() {
    let doc = cstr("[field X]\np = y*(1 - x)\nq = -x*(1 + y)\n");
    let name = cstr("X");
    let mut field = ptr::null_mut();
    assert_eq!(unsafe { folia_field_from_document(doc.as_ptr(), name.as_ptr(), &mut field) }, FoliaStatus::Ok);
    let mut form = ptr::null_mut();
    assert_eq!(unsafe { folia_projectivize(field, &mut form) }, FoliaStatus::Ok);
    let mut m = 0;
    assert_eq!(unsafe { folia_form_degree(form, &mut m) }, FoliaStatus::Ok);
    assert_eq!(m, 2);
    // X P + Y Q + Z R = 0
    let mut cs = [ptr::null_mut(); 3];
    for (k, c) in cs.iter_mut().enumerate() {
        assert_eq!(unsafe { folia_form_coefficient(form, k as u32, c) }, FoliaStatus::Ok);
    }
    let mut extra = ptr::null_mut();
    assert_eq!(unsafe { folia_form_coefficient(form, 3, &mut extra) }, FoliaStatus::InvalidArgument);
    let sum = format!("X*({}) + Y*({}) + Z*({})", printed(cs[0]), printed(cs[1]), printed(cs[2]));
    assert_eq!(printed(poly(&sum, true)), "0");
    let other = cstr("Y");
    let mut missing = ptr::null_mut();
    assert_eq!(unsafe { folia_field_from_document(doc.as_ptr(), other.as_ptr(), &mut missing) }, FoliaStatus::NotFound);
    unsafe {
        for c in cs {
            folia_poly_free(c);
        }
        folia_form_free(form);
        folia_field_free(field);
    }
}

#[test]
fn ovals_and_bounds() {
    let quartic = poly("(x^2 + 2*y^2 - 1)*(2*x^2 + y^2 - 1) + 1/100", false);
    let (mut n, mut c) = (0usize, 0usize);
    assert_eq!(unsafe { folia_count_ovals(quartic, 256, &mut n, &mut c) }, FoliaStatus::Ok);
    assert_eq!((n, c), (4, 4));
    unsafe { folia_poly_free(quartic) };
    let table = [
        (FoliaTheorem::Thm1, 4, 4),
        (FoliaTheorem::Thm1, 6, 11),
        (FoliaTheorem::Thm2a, 2, 2),
        (FoliaTheorem::Thm2a, 3, 3),
        (FoliaTheorem::Thm2b, 2, 4),
        (FoliaTheorem::Thm2b, 3, 6),
        (FoliaTheorem::DegreeNodal, 5, 7),
    ];
    for (t, m, want) in table {
        let mut v = 0u64;
        assert_eq!(unsafe { folia_bound(t, m, &mut v) }, FoliaStatus::Ok);
        assert_eq!(v, want, "{t:?} m = {m}");
    }
    let mut v = 0u64;
    assert_eq!(unsafe { folia_bound(FoliaTheorem::Thm1, 0, &mut v) }, FoliaStatus::InvalidArgument);
}

#[test]
fn header_is_valid_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/folia.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for sym in ["folia_poly_parse", "folia_check_invariant", "folia_last_error", "FOLIA_STATUS_OK", "FoliaField"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", &header]).status() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
}
