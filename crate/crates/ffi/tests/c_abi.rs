use std::ffi::{CStr, CString};
use std::ptr;

use sumint_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { sumint_string_free(s) };
    out
}

fn polytope(json: &str) -> *mut SumintPolytope {
    let j = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_polytope_from_json(j.as_ptr(), &mut p) },
        SumintStatus::Ok
    );
    p
}

#[test]
fn triangle_count_and_table() {
    let p = polytope(r#"{"vertices":[[0,0],[3,0],[0,3]]}"#);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sumint_map_standard(2, &mut m) }, SumintStatus::Ok);
    let mut count = 0u64;
    let mut json = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_count(p, m, &mut count, &mut json) },
        SumintStatus::Ok
    );
    assert_eq!(count, 10);
    assert!(take(json).contains("\"match\": true"));

    let mut table = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_mu_table_json(p, m, 2, &mut table) },
        SumintStatus::Ok
    );
    let table = take(table);
    assert_eq!(table.matches("\"mu0\": \"3/8\"").count(), 2);
    assert_eq!(table.matches("\"mu0\": \"1/4\"").count(), 1);

    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_verify_json(p, m, 4, 7, &mut report) },
        SumintStatus::Ok
    );
    assert!(take(report).contains("\"pass\": true"));
    unsafe {
        sumint_map_free(m);
        sumint_polytope_free(p);
    }
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("{not json").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_polytope_from_json(bad.as_ptr(), &mut p) },
        SumintStatus::Usage
    );
    assert!(p.is_null());
    assert!(!sumint_last_error().is_null());

    assert_eq!(
        unsafe { sumint_polytope_from_json(ptr::null(), &mut p) },
        SumintStatus::NullPointer
    );

    let p = polytope(r#"{"vertices":[[0,0],[1,0],[0,1]]}"#);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { sumint_map_standard(3, &mut m) }, SumintStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_mu_table_json(p, m, 1, &mut out) },
        SumintStatus::Usage
    );
    assert!(out.is_null());
    unsafe {
        sumint_map_free(m);
        sumint_polytope_free(p);
        sumint_string_free(ptr::null_mut());
    }
}

#[test]
fn non_generic_flag_map() {
    // the flag's first line lies in the orthogonal complement of a ray
    let j = CString::new(r#"{"type":"flag","basis":[[0,1],[1,0]]}"#).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_map_from_json(j.as_ptr(), &mut m) },
        SumintStatus::Ok
    );
    let p = polytope(r#"{"vertices":[[0,0],[1,0],[0,1],[1,1]]}"#);
    let mut out = ptr::null_mut();
    let s = unsafe { sumint_mu_table_json(p, m, 1, &mut out) };
    assert_eq!(s, SumintStatus::NotGeneric);
    let msg = unsafe { CStr::from_ptr(sumint_last_error()) }
        .to_str()
        .unwrap();
    assert!(!msg.is_empty());
    unsafe {
        sumint_map_free(m);
        sumint_polytope_free(p);
    }
}

#[test]
fn map_round_trip_and_todd() {
    let j = CString::new(r#"{"type":"inner_product","gram":[[2,1],[1,2]]}"#).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { sumint_map_from_json(j.as_ptr(), &mut m) },
        SumintStatus::Ok
    );
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sumint_map_to_json(m, &mut out) }, SumintStatus::Ok);
    assert!(take(out).contains("inner_product"));
    unsafe { sumint_map_free(m) };

    let mut t = ptr::null_mut();
    assert_eq!(unsafe { sumint_todd_json(4, &mut t) }, SumintStatus::Ok);
    let t: String = take(t).split_whitespace().collect();
    assert_eq!(
        t,
        r#"{"todd":["1","1/2","1/12","0","-1/720"],"t":["1/2","1/12","0","-1/720","0"]}"#
    );
}

#[test]
fn header_is_generated() {
    let h =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sumint.h")).unwrap();
    for name in [
        "sumint_polytope_from_json",
        "sumint_count",
        "sumint_last_error",
        "SUMINT_STATUS_NOT_GENERIC",
        "typedef struct SumintPolytope",
    ] {
        assert!(h.contains(name), "{name} missing from header");
    }
}
