use std::ffi::{CStr, CString};
use std::ptr;

use ovoid_ffi::*;

fn take_string(s: *mut std::os::raw::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { ovoid_string_free(s) };
    out
}

fn last_error() -> String {
    let e = ovoid_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

struct Handles {
    field: *mut OvoidField,
    model: *mut OvoidModel,
}

impl Handles {
    fn new(q: u32, kind: OvoidModelKind) -> Self {
        let mut field = ptr::null_mut();
        let mut model = ptr::null_mut();
        unsafe {
            assert_eq!(ovoid_field_new(q, &mut field), OvoidStatus::Ok);
            assert_eq!(ovoid_model_new(field, kind, &mut model), OvoidStatus::Ok);
        }
        Handles { field, model }
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            ovoid_model_free(self.model);
            ovoid_field_free(self.field);
        }
    }
}

#[test]
fn field_arithmetic_and_errors() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(ovoid_field_new(9, &mut f), OvoidStatus::Ok);
        assert_eq!(ovoid_field_order(f), 9);
        let mut r = u32::MAX;
        // every nonzero element times its inverse is 1
        for a in 1..9 {
            let mut inv = 0;
            assert_eq!(ovoid_field_div(f, 1, a, &mut inv), OvoidStatus::Ok);
            assert_eq!(ovoid_field_mul(f, a, inv, &mut r), OvoidStatus::Ok);
            assert_eq!(r, 1);
        }
        assert_eq!(ovoid_field_add(f, 3, 3, &mut r), OvoidStatus::Ok);
        assert_eq!(r, 6);
        assert_eq!(ovoid_field_div(f, 2, 0, &mut r), OvoidStatus::Field);
        assert!(!last_error().is_empty());
        assert_eq!(ovoid_field_add(f, 9, 0, &mut r), OvoidStatus::Field);
        assert_eq!(ovoid_field_add(f, 1, 1, ptr::null_mut()), OvoidStatus::NullPointer);
        ovoid_field_free(f);

        let mut g = ptr::null_mut();
        assert_eq!(ovoid_field_new(6, &mut g), OvoidStatus::Field);
        assert!(g.is_null());
        ovoid_field_free(ptr::null_mut());
    }
}

#[test]
fn model_counts_in_both_models() {
    for kind in [OvoidModelKind::Q4, OvoidModelKind::T2] {
        let h = Handles::new(3, kind);
        let (mut p, mut l, mut s, mut t) = (0, 0, 0, 0);
        let st = unsafe { ovoid_model_counts(h.model, &mut p, &mut l, &mut s, &mut t) };
        assert_eq!(st, OvoidStatus::Ok);
        assert_eq!((p, l, s, t), (40, 40, 3, 3));
    }
}

#[test]
fn search_roundtrip_and_reports() {
    let h = Handles::new(5, OvoidModelKind::Q4);
    let opts = ovoid_search_options_default();
    let mut k = ptr::null_mut();
    unsafe {
        assert_eq!(ovoid_search(h.model, &opts, &mut k), OvoidStatus::Ok);
        assert_eq!(ovoid_partial_ovoid_len(k), 24);
        let mut maximal = false;
        assert_eq!(ovoid_partial_ovoid_is_maximal(h.model, k, &mut maximal), OvoidStatus::Ok);
        assert!(maximal);

        let n = ovoid_partial_ovoid_members(k, ptr::null_mut(), 0);
        let mut members = vec![0usize; n];
        assert_eq!(ovoid_partial_ovoid_members(k, members.as_mut_ptr(), n), 24);
        assert!(members.windows(2).all(|w| w[0] < w[1]));

        let mut s = ptr::null_mut();
        assert_eq!(ovoid_partial_ovoid_to_json(h.model, k, &mut s), OvoidStatus::Ok);
        let json = CString::new(take_string(s)).unwrap();
        let mut k2 = ptr::null_mut();
        assert_eq!(ovoid_partial_ovoid_from_json(h.model, json.as_ptr(), &mut k2), OvoidStatus::Ok);
        let mut members2 = vec![0usize; 24];
        ovoid_partial_ovoid_members(k2, members2.as_mut_ptr(), 24);
        assert_eq!(members, members2);

        let mut s = ptr::null_mut();
        assert_eq!(ovoid_census_json(h.model, k, &mut s), OvoidStatus::Ok);
        let census: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
        assert_eq!(census["census"]["elliptic_values"], serde_json::json!([0, 2, 3, 5, 8, 12]));

        let mut s = ptr::null_mut();
        assert_eq!(ovoid_verify_json(h.model, k, &mut s), OvoidStatus::Ok);
        let verify: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
        assert_eq!(verify["passed"], true);

        ovoid_partial_ovoid_free(k2);
        ovoid_partial_ovoid_free(k);
    }
}

#[test]
fn invalid_partial_ovoids_are_rejected() {
    let h = Handles::new(3, OvoidModelKind::Q4);
    let mut k = ptr::null_mut();
    unsafe {
        // out-of-range index
        let bad = [0usize, 4000];
        assert_ne!(ovoid_partial_ovoid_new(h.model, bad.as_ptr(), 2, &mut k), OvoidStatus::Ok);
        assert!(k.is_null());
        let empty = ovoid_partial_ovoid_new(h.model, ptr::null(), 0, &mut k);
        assert_eq!(empty, OvoidStatus::Ok);
        assert_eq!(ovoid_partial_ovoid_len(k), 0);

        let other = Handles::new(5, OvoidModelKind::Q4);
        let mut m = false;
        assert_eq!(
            ovoid_partial_ovoid_is_maximal(other.model, k, &mut m),
            OvoidStatus::InvalidArgument
        );
        ovoid_partial_ovoid_free(k);

        let garbage = CString::new("{not json").unwrap();
        let mut k = ptr::null_mut();
        assert_ne!(ovoid_partial_ovoid_from_json(h.model, garbage.as_ptr(), &mut k), OvoidStatus::Ok);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn residues_and_unsupported_orders() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ovoid_residues_json(11, &mut s), OvoidStatus::Ok);
        assert_eq!(take_string(s), "[0,4,5,8,9,10]");
        assert_eq!(ovoid_residues_json(9, &mut s), OvoidStatus::Unsupported);
        assert_eq!(ovoid_pipeline_json(9, 1, &mut s), OvoidStatus::Unsupported);
    }
}

#[test]
fn pipeline_at_five() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ovoid_pipeline_json(5, 2, &mut s) }, OvoidStatus::Ok);
    let run: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(run["report"]["size"], 24);
}
