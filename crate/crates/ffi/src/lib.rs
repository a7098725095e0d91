//! C interface to `nilkill`.
//!
//! Algebras cross the boundary as opaque `NkAlgebra` handles created by
//! [`nk_algebra_from_json`] or [`nk_algebra_catalog`] and released with
//! [`nk_algebra_free`]. Every fallible function returns an [`NkStatus`];
//! on failure [`nk_last_error`] describes the problem. Strings returned
//! through `char **` belong to the caller and are released with
//! [`nk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nilkill::catalog::{self, Params};
use nilkill::killing::{self, Method};
use nilkill::{io, report, structure, AdaptedFrame, Error, MetricLieAlgebra};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidAlgebra = 4,
    Numerical = 5,
    UnknownCatalogEntry = 6,
    InvalidArgument = 7,
    Panic = 8,
    Other = 9,
}

/// Opaque metric Lie algebra.
pub struct NkAlgebra {
    inner: MetricLieAlgebra,
}

/// Dimensions of the Killing 2- and 3-form spaces with the data of the
/// decomposition they come from.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NkKillingDims {
    pub dim_k2: usize,
    pub dim_k3: usize,
    /// Dimension of the abelian factor.
    pub d: usize,
    /// Irreducible factors with a bi-invariant orthogonal complex structure.
    pub r2: usize,
    /// Naturally reductive irreducible factors.
    pub r3: usize,
}

/// Solver for [`nk_killing_dim`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NkMethod {
    Brute = 0,
    Structured = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: &Error) -> NkStatus {
    match e {
        Error::Parse(_) | Error::Io(_) => NkStatus::Parse,
        Error::InvalidAlgebra(_) | Error::AlgebraAbelian => NkStatus::InvalidAlgebra,
        Error::NumericalRankFailure { .. }
        | Error::DecompositionAmbiguous(_)
        | Error::InternalInvariantViolation(_) => NkStatus::Numerical,
        Error::UnknownCatalogEntry(_) => NkStatus::UnknownCatalogEntry,
        Error::DimensionMismatch(_) | Error::DegreeOverflow { .. } => NkStatus::InvalidArgument,
        _ => NkStatus::Other,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (NkStatus, String)>) -> NkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NkStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NkStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (NkStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (NkStatus, String)> {
    if s.is_null() {
        return Err((NkStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (NkStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn algebra_ref<'a>(a: *const NkAlgebra) -> Result<&'a MetricLieAlgebra, (NkStatus, String)> {
    a.as_ref()
        .map(|a| &a.inner)
        .ok_or((NkStatus::NullArgument, "algebra handle is null".into()))
}

fn check_tol(tol: f64) -> Result<(), (NkStatus, String)> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err((
            NkStatus::InvalidArgument,
            format!("tolerance must be positive, got {tol}"),
        ))
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (NkStatus, String)> {
    if out.is_null() {
        return Err((NkStatus::NullArgument, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| (NkStatus::Other, "string contains a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write_algebra(
    out: *mut *mut NkAlgebra,
    l: MetricLieAlgebra,
) -> Result<(), (NkStatus, String)> {
    if out.is_null() {
        return Err((NkStatus::NullArgument, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(NkAlgebra { inner: l }));
    Ok(())
}

/// Parses an algebra from the JSON file format and validates it.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_algebra_from_json(
    json: *const c_char,
    out: *mut *mut NkAlgebra,
) -> NkStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let l = io::parse_algebra(text).map_err(lib_err)?;
        l.ensure_valid(nilkill::linalg::DEFAULT_TOL)
            .map_err(lib_err)?;
        write_algebra(out, l)
    })
}

/// Builds a catalog algebra. `lambda` and `l` parametrize
/// `complex_heisenberg` and `heisenberg`; a negative `d` means no flat
/// summand (for `euclidean` it is the dimension).
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_algebra_catalog(
    name: *const c_char,
    lambda: f64,
    l: usize,
    d: i64,
    out: *mut *mut NkAlgebra,
) -> NkStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let params = Params {
            lambda,
            l,
            d: usize::try_from(d).ok(),
        };
        let alg = catalog::lookup(name, &params).map_err(lib_err)?;
        write_algebra(out, alg)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `a` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nk_algebra_free(a: *mut NkAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Dimension of the algebra, 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nk_algebra_dim(a: *const NkAlgebra) -> usize {
    a.as_ref().map(|a| a.inner.dim()).unwrap_or(0)
}

/// Writes the algebra in the JSON file format.
///
/// # Safety
/// `a` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_algebra_to_json(
    a: *const NkAlgebra,
    out: *mut *mut c_char,
) -> NkStatus {
    guard(|| {
        let l = algebra_ref(a)?;
        write_string(out, io::to_json_string(l))
    })
}

/// Killing form dimensions from the decomposition.
///
/// # Safety
/// `a` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_killing_dimensions(
    a: *const NkAlgebra,
    tol: f64,
    out: *mut NkKillingDims,
) -> NkStatus {
    guard(|| {
        let l = algebra_ref(a)?;
        check_tol(tol)?;
        if out.is_null() {
            return Err((NkStatus::NullArgument, "output pointer is null".into()));
        }
        let k = structure::killing_dimensions(l, tol).map_err(lib_err)?;
        *out = NkKillingDims {
            dim_k2: k.dim_k2,
            dim_k3: k.dim_k3,
            d: k.d,
            r2: k.r2,
            r3: k.r3,
        };
        Ok(())
    })
}

/// Dimension of the space of Killing `degree`-forms. The structured method
/// exists for degrees 2 and 3.
///
/// # Safety
/// `a` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_killing_dim(
    a: *const NkAlgebra,
    degree: usize,
    method: NkMethod,
    tol: f64,
    out: *mut usize,
) -> NkStatus {
    guard(|| {
        let l = algebra_ref(a)?;
        check_tol(tol)?;
        if out.is_null() {
            return Err((NkStatus::NullArgument, "output pointer is null".into()));
        }
        if degree == 0 || degree > l.dim() {
            return Err((
                NkStatus::InvalidArgument,
                format!("degree {degree} outside 1..={}", l.dim()),
            ));
        }
        let dim = match method {
            NkMethod::Brute => {
                let frame = AdaptedFrame::new(l, tol).map_err(lib_err)?;
                killing::killing_nullspace_brute(l, &frame, degree, tol)
                    .map_err(lib_err)?
                    .dim()
            }
            NkMethod::Structured if degree == 2 || degree == 3 => {
                killing::solve(l, degree, Method::Structured, tol)
                    .map_err(lib_err)?
                    .dim()
            }
            NkMethod::Structured => {
                return Err((
                    NkStatus::InvalidArgument,
                    format!("no structured solver for degree {degree}"),
                ))
            }
        };
        *out = dim;
        Ok(())
    })
}

/// The analysis record as JSON (the `analyze --json` output).
///
/// # Safety
/// `a` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn nk_analyze_json(
    a: *const NkAlgebra,
    tol: f64,
    out: *mut *mut c_char,
) -> NkStatus {
    guard(|| {
        let l = algebra_ref(a)?;
        check_tol(tol)?;
        let r = report::analyze(l, tol).map_err(lib_err)?;
        write_string(
            out,
            serde_json::to_string(&r).expect("plain data serializes"),
        )
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn nk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn nk_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
