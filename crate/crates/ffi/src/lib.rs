//! C ABI over folia-core.
//!
//! Every object crosses the boundary as an opaque pointer owned by the
//! caller and released with its `_free` function. Functions return a
//! `FoliaStatus`; on failure `folia_last_error` describes the cause until
//! the next call on the same thread. Strings handed out must be released
//! with `folia_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use folia::bounds::{nodal_degree_bound, nondicritical_degree_bound, thm1_bound, thm2_bound, thm4_bound};
use folia::field::{iif_check, invariance_check, projectivize, AffineVectorField, Invariance, ProjectiveOneForm};
use folia::polyring::{Arity, MultiPoly};
use folia::realtopo::count_ovals_default;
use folia::textio::{parse_poly, parse_system, print_poly};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoliaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Computation = 5,
    NotFound = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoliaTheorem {
    Thm1 = 0,
    Thm2a = 1,
    Thm2b = 2,
    Thm4 = 3,
    DegreeNodal = 4,
    DegreeNondicritical = 5,
}

/// A polynomial in `x, y` or `X, Y, Z` with Gaussian-rational coefficients.
pub struct FoliaPoly(MultiPoly);

/// A planar polynomial vector field.
pub struct FoliaField(AffineVectorField);

/// A projective one-form `P dX + Q dY + R dZ`.
pub struct FoliaForm(ProjectiveOneForm);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

struct Failure(FoliaStatus, String);

impl Failure {
    fn new(status: FoliaStatus, msg: impl ToString) -> Self {
        Self(status, msg.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FoliaStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FoliaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            FoliaStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::new(FoliaStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure::new(FoliaStatus::InvalidUtf8, e))
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::new(FoliaStatus::NullPointer, "null handle"))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(FoliaStatus::NullPointer, "null output pointer"));
    }
    out.write(v);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior NUL").into_raw()
}

fn computation(e: impl ToString) -> Failure {
    Failure::new(FoliaStatus::Computation, e)
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library.
#[no_mangle]
pub extern "C" fn folia_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn folia_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `text`; `projective` selects `X, Y, Z` over `x, y`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_poly_parse(text: *const c_char, projective: c_int, out: *mut *mut FoliaPoly) -> FoliaStatus {
    guard(|| {
        let s = str_arg(text)?;
        let arity = if projective != 0 { Arity::Projective } else { Arity::Affine };
        let p = parse_poly(s, arity).map_err(|e| Failure::new(FoliaStatus::Parse, e))?;
        put(out, boxed(FoliaPoly(p)))
    })
}

/// Canonical text of a polynomial.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_poly_print(p: *const FoliaPoly, out: *mut *mut c_char) -> FoliaStatus {
    guard(|| {
        let p = obj(p)?;
        put(out, c_string(print_poly(&p.0)))
    })
}

/// Total degree, or -1 for the zero polynomial.
///
/// # Safety
/// `p` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn folia_poly_degree(p: *const FoliaPoly, out: *mut c_int) -> FoliaStatus {
    guard(|| {
        let p = obj(p)?;
        put(out, p.0.degree().map_or(-1, |d| d as c_int))
    })
}

/// # Safety
/// `p` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn folia_poly_free(p: *mut FoliaPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The field `x' = p, y' = q`.
///
/// # Safety
/// `p` and `q` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_field_new(p: *const FoliaPoly, q: *const FoliaPoly, out: *mut *mut FoliaField) -> FoliaStatus {
    guard(|| {
        let (p, q) = (obj(p)?, obj(q)?);
        let f = AffineVectorField::planar(p.0.clone(), q.0.clone())
            .map_err(|e| Failure::new(FoliaStatus::InvalidArgument, e))?;
        put(out, boxed(FoliaField(f)))
    })
}

/// The `[field name]` section of a `.fol` document.
///
/// # Safety
/// `text` and `name` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_field_from_document(
    text: *const c_char,
    name: *const c_char,
    out: *mut *mut FoliaField,
) -> FoliaStatus {
    guard(|| {
        let doc = parse_system(str_arg(text)?).map_err(|e| Failure::new(FoliaStatus::Parse, e))?;
        let name = str_arg(name)?;
        let f = doc.field(name).ok_or_else(|| Failure::new(FoliaStatus::NotFound, format!("no [field {name}]")))?;
        put(out, boxed(FoliaField(f.clone())))
    })
}

/// # Safety
/// `f` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn folia_field_free(f: *mut FoliaField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Exact test of `Xf = K f`. On success `*invariant` is 0 or 1; when it is
/// 1 and `cofactor` is non-NULL the cofactor handle is written there.
///
/// # Safety
/// Handles must be live and `invariant` writable; `cofactor` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn folia_check_invariant(
    field: *const FoliaField,
    curve: *const FoliaPoly,
    invariant: *mut c_int,
    cofactor: *mut *mut FoliaPoly,
) -> FoliaStatus {
    guard(|| {
        let (x, f) = (obj(field)?, obj(curve)?);
        match invariance_check(&x.0, &f.0).map_err(computation)? {
            Invariance::Invariant(c) => {
                put(invariant, 1)?;
                if !cofactor.is_null() {
                    cofactor.write(boxed(FoliaPoly(c.cofactor)));
                }
            }
            Invariance::NotInvariant => put(invariant, 0)?,
        }
        Ok(())
    })
}

/// Exact test of `XV = div(X) V`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_iif_check(field: *const FoliaField, v: *const FoliaPoly, out: *mut c_int) -> FoliaStatus {
    guard(|| {
        let ok = iif_check(&obj(field)?.0, &obj(v)?.0).map_err(computation)?;
        put(out, ok as c_int)
    })
}

/// Saturated projective one-form of a field.
///
/// # Safety
/// `field` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_projectivize(field: *const FoliaField, out: *mut *mut FoliaForm) -> FoliaStatus {
    guard(|| {
        let form = projectivize(&obj(field)?.0).map_err(computation)?;
        put(out, boxed(FoliaForm(form)))
    })
}

/// Degree of the foliation.
///
/// # Safety
/// `form` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_form_degree(form: *const FoliaForm, out: *mut u32) -> FoliaStatus {
    guard(|| put(out, obj(form)?.0.degree()))
}

/// Coefficient `index` (0 = P, 1 = Q, 2 = R) as a new polynomial handle.
///
/// # Safety
/// `form` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_form_coefficient(form: *const FoliaForm, index: u32, out: *mut *mut FoliaPoly) -> FoliaStatus {
    guard(|| {
        let form = obj(form)?;
        let c = form
            .0
            .coefficients()
            .get(index as usize)
            .map(|c| (*c).clone())
            .ok_or_else(|| Failure::new(FoliaStatus::InvalidArgument, format!("coefficient index {index} out of range")))?;
        put(out, boxed(FoliaPoly(c)))
    })
}

/// # Safety
/// `form` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn folia_form_free(form: *mut FoliaForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Real ovals of an affine curve in its default box.
///
/// # Safety
/// `curve` must be live; `count` and `certified` writable.
#[no_mangle]
pub unsafe extern "C" fn folia_count_ovals(
    curve: *const FoliaPoly,
    resolution: u32,
    count: *mut usize,
    certified: *mut usize,
) -> FoliaStatus {
    guard(|| {
        let set = count_ovals_default(&obj(curve)?.0, resolution as usize)
            .map_err(|e| Failure::new(FoliaStatus::InvalidArgument, e))?;
        put(count, set.count())?;
        put(certified, set.certified_count())
    })
}

/// Closed-form bound for a foliation degree `m`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn folia_bound(theorem: FoliaTheorem, m: u32, out: *mut u64) -> FoliaStatus {
    guard(|| {
        let arg = |e: folia::bounds::BoundsError| Failure::new(FoliaStatus::InvalidArgument, e);
        let r = match theorem {
            FoliaTheorem::Thm1 => thm1_bound(m).map_err(arg)?,
            FoliaTheorem::Thm2a => thm2_bound(m, true).map_err(arg)?,
            FoliaTheorem::Thm2b => thm2_bound(m, false).map_err(arg)?,
            FoliaTheorem::Thm4 => thm4_bound(m).map_err(arg)?,
            FoliaTheorem::DegreeNodal => nodal_degree_bound(m),
            FoliaTheorem::DegreeNondicritical => nondicritical_degree_bound(m),
        };
        put(out, r.value)
    })
}
