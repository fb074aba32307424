//! C ABI over `sumint`.
//!
//! Objects are opaque handles created by `*_from_json` or
//! `sumint_map_standard` and released with the matching `*_free`. Every fallible
//! call returns a [`SumintStatus`]; on failure a message is available from
//! [`sumint_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and must be released with
//! [`sumint_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sumint::cli::todd_report;
use sumint::complement::ComplementMap;
use sumint::geometry::Polytope;
use sumint::interpolator::mu_table;
use sumint::io::{
    count_json, map_to_json, mu_table_json, parse_map, parse_polytope, report_json, to_pretty,
};
use sumint::valuations::{count_from_table, edge_directions, verify_interpolator, Direction};
use sumint::{Error, ErrorClass};

/// Result of a C ABI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumintStatus {
    Ok = 0,
    /// Malformed input, dimension mismatch, or another caller error.
    Usage = 1,
    /// A cone is not generic for the map, or a polytope is not integral.
    NotGeneric = 2,
    /// The sum-integral identity or a count check failed.
    VerificationFailed = 3,
    /// Internal inconsistency between independent computations.
    Internal = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Opaque integral polytope.
pub struct SumintPolytope(Polytope);

/// Opaque complement map.
pub struct SumintMap(ComplementMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> SumintStatus {
    match e.class() {
        ErrorClass::Usage => SumintStatus::Usage,
        ErrorClass::NotGeneric => SumintStatus::NotGeneric,
        ErrorClass::Internal => SumintStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<SumintStatus, (SumintStatus, String)>) -> SumintStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            if s == SumintStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic in sumint");
            SumintStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SumintStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (SumintStatus, String)> {
    if s.is_null() {
        return Err((SumintStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (SumintStatus::InvalidUtf8, e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, (SumintStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (SumintStatus::NullPointer, "null handle".into()))
}

unsafe fn write_out<T>(out: *mut *mut T, value: *mut T) -> Result<(), (SumintStatus, String)> {
    if out.is_null() {
        return Err((SumintStatus::NullPointer, "null out parameter".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (SumintStatus, String)> {
    let c = CString::new(s).map_err(|e| (SumintStatus::Internal, e.to_string()))?;
    write_out(out, c.into_raw())
}

fn check_dims(p: &Polytope, m: &ComplementMap) -> Result<(), (SumintStatus, String)> {
    if p.ambient() != m.ambient() {
        return Err((
            SumintStatus::Usage,
            format!(
                "map on dimension {} for polytope in dimension {}",
                m.ambient(),
                p.ambient()
            ),
        ));
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn sumint_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sumint_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a polytope from `{"vertices": [[...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sumint_polytope_from_json(
    json: *const c_char,
    out: *mut *mut SumintPolytope,
) -> SumintStatus {
    guard(|| {
        let p = parse_polytope(read_str(json)?).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(SumintPolytope(p))))?;
        Ok(SumintStatus::Ok)
    })
}

/// Ambient dimension of a polytope, or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sumint_polytope_ambient(p: *const SumintPolytope) -> usize {
    p.as_ref().map_or(0, |p| p.0.ambient())
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sumint_polytope_free(p: *mut SumintPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// The standard inner product on `R^ambient`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sumint_map_standard(
    ambient: usize,
    out: *mut *mut SumintMap,
) -> SumintStatus {
    guard(|| {
        write_out(
            out,
            Box::into_raw(Box::new(SumintMap(ComplementMap::standard_inner_product(
                ambient,
            )))),
        )?;
        Ok(SumintStatus::Ok)
    })
}

/// Parses a complement map from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sumint_map_from_json(
    json: *const c_char,
    out: *mut *mut SumintMap,
) -> SumintStatus {
    guard(|| {
        let m = parse_map(read_str(json)?).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(SumintMap(m))))?;
        Ok(SumintStatus::Ok)
    })
}

/// Serializes a map back to JSON.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sumint_map_to_json(
    m: *const SumintMap,
    out: *mut *mut c_char,
) -> SumintStatus {
    guard(|| {
        let m = deref(m)?;
        write_string(out, to_pretty(&map_to_json(&m.0)))?;
        Ok(SumintStatus::Ok)
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sumint_map_free(m: *mut SumintMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// JSON array with one row per face of `p`: normal cone, `mu` series
/// through `degree`, and its constant term.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sumint_mu_table_json(
    p: *const SumintPolytope,
    m: *const SumintMap,
    degree: u32,
    out: *mut *mut c_char,
) -> SumintStatus {
    guard(|| {
        let (p, m) = (deref(p)?, deref(m)?);
        check_dims(&p.0, &m.0)?;
        let table = mu_table(&p.0, &m.0, degree, false).map_err(lib_err)?;
        write_string(out, to_pretty(&mu_table_json(&table)))?;
        Ok(SumintStatus::Ok)
    })
}

/// Number of lattice points of `p` by the local formula. Fails with
/// `VerificationFailed` if it disagrees with direct enumeration.
///
/// # Safety
/// Handles must be live; `count` must be writable. `json_out` may be null;
/// otherwise it receives the per-face breakdown.
#[no_mangle]
pub unsafe extern "C" fn sumint_count(
    p: *const SumintPolytope,
    m: *const SumintMap,
    count: *mut u64,
    json_out: *mut *mut c_char,
) -> SumintStatus {
    guard(|| {
        let (p, m) = (deref(p)?, deref(m)?);
        if count.is_null() {
            return Err((SumintStatus::NullPointer, "null out parameter".into()));
        }
        check_dims(&p.0, &m.0)?;
        let table = mu_table(&p.0, &m.0, 0, false).map_err(lib_err)?;
        let local = count_from_table(&p.0, &table).map_err(lib_err)?;
        let brute = p.0.lattice_points().map_err(lib_err)?.len();
        let report = count_json(&local, brute, &m.0.id());
        if !json_out.is_null() {
            write_string(json_out, to_pretty(&report))?;
        }
        *count = brute as u64;
        if report.matches {
            Ok(SumintStatus::Ok)
        } else {
            Err((
                SumintStatus::VerificationFailed,
                format!(
                    "local count {} differs from enumeration {brute}",
                    local.count
                ),
            ))
        }
    })
}

/// Checks the sum-integral identity for `p` along a direction sampled from
/// `seed`, comparing through the default order. The report is written to
/// `out` whether or not the check passes.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sumint_verify_json(
    p: *const SumintPolytope,
    m: *const SumintMap,
    degree: u32,
    seed: u64,
    out: *mut *mut c_char,
) -> SumintStatus {
    guard(|| {
        let (p, m) = (deref(p)?, deref(m)?);
        check_dims(&p.0, &m.0)?;
        let dir =
            Direction::sample(p.0.ambient(), seed, &edge_directions(&p.0)).map_err(lib_err)?;
        let report = verify_interpolator(&p.0, &m.0, &dir, degree, None, "ffi").map_err(lib_err)?;
        let pass = report.pass();
        write_string(out, to_pretty(&report_json(&report)))?;
        if pass {
            Ok(SumintStatus::Ok)
        } else {
            set_error("nonzero residual");
            Ok(SumintStatus::VerificationFailed)
        }
    })
}

/// Coefficients of `td(z)` and `T(z)` through `z^order` as
/// `{"todd": [...], "t": [...]}` with rational strings.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sumint_todd_json(order: usize, out: *mut *mut c_char) -> SumintStatus {
    guard(|| {
        write_string(out, to_pretty(&todd_report(order)))?;
        Ok(SumintStatus::Ok)
    })
}
