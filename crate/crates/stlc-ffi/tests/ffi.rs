use std::ffi::{CStr, CString};
use std::ptr;

use stlc_ffi::*;

fn build(name: &str) -> *mut StlcBasis {
    let name = CString::new(name).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { stlc_basis_build(name.as_ptr(), 0, &mut out) }, StlcStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = stlc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn build_classify_free() {
    let b = build("srinath_rajan");
    let mut p = std::mem::MaybeUninit::<StlcProfile>::uninit();
    assert_eq!(unsafe { stlc_classify(b, 8, 1, p.as_mut_ptr()) }, StlcStatus::Ok);
    let p = unsafe { p.assume_init() };
    assert_eq!(p.family, StlcFamily::ConditionalMultiGroup);
    assert_eq!((p.k, p.k_prime, p.group_count, p.conditioned_count), (16, 10, 4, 8));
    assert!((p.reduction_pct - 37.5).abs() < 1e-9);

    let (mut nt, mut t, mut k) = (0, 0, 0);
    assert_eq!(unsafe { stlc_basis_shape(b, &mut nt, &mut t, &mut k) }, StlcStatus::Ok);
    assert_eq!((nt, t, k), (4, 4, 16));
    unsafe { stlc_basis_free(b) };
}

#[test]
fn golden_block_orthogonal_fields() {
    let b = build("golden");
    let mut p = std::mem::MaybeUninit::<StlcProfile>::uninit();
    assert_eq!(unsafe { stlc_classify(b, 8, 1, p.as_mut_ptr()) }, StlcStatus::Ok);
    let p = unsafe { p.assume_init() };
    assert_eq!((p.k_prime, p.bo_g, p.bo_k, p.bo_p), (6, 2, 2, 2));
    assert!(!p.fast_decodable);
    unsafe { stlc_basis_free(b) };
}

#[test]
fn lattice_values() {
    let b = build("alamouti");
    let (mut vol, mut d) = (0.0, 0.0);
    assert_eq!(unsafe { stlc_lattice_volume(b, &mut vol) }, StlcStatus::Ok);
    assert!((vol - 4.0).abs() < 1e-9);
    assert_eq!(unsafe { stlc_min_det(b, 2, &mut d) }, StlcStatus::Ok);
    assert!((d - 1.0).abs() < 1e-12);

    let (mut re, mut im) = ([0.0; 4], [0.0; 4]);
    assert_eq!(unsafe { stlc_basis_matrix(b, 2, re.as_mut_ptr(), im.as_mut_ptr(), 4) }, StlcStatus::Ok);
    assert_eq!((re, im), ([0.0, -1.0, 1.0, 0.0], [0.0; 4]));
    assert_eq!(unsafe { stlc_basis_matrix(b, 4, re.as_mut_ptr(), im.as_mut_ptr(), 4) }, StlcStatus::InvalidInput);
    unsafe { stlc_basis_free(b) };

    let big = build("mimo_relay");
    assert_eq!(unsafe { stlc_min_det(big, 3, &mut d) }, StlcStatus::SearchTooLarge);
    unsafe { stlc_basis_free(big) };
}

#[test]
fn json_roundtrip() {
    let b = build("silver");
    let s = unsafe { stlc_basis_to_json(b) };
    assert!(!s.is_null());
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { stlc_basis_from_json(s, &mut back) }, StlcStatus::Ok);
    let s2 = unsafe { stlc_basis_to_json(back) };
    assert_eq!(unsafe { CStr::from_ptr(s) }, unsafe { CStr::from_ptr(s2) });
    unsafe {
        stlc_string_free(s);
        stlc_string_free(s2);
        stlc_basis_free(b);
        stlc_basis_free(back);
    }
}

#[test]
fn sphere_decode_noiseless() {
    let b = build("alamouti");
    let h_re = [0.3, -1.1, 0.7, 0.2];
    let h_im = [0.5, 0.4, -0.9, 1.3];
    // X = s·B with s = (1, -1, 1, 1): [[1-i, -1+i], [1+i, 1+i]]
    let x = [(1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (1.0, 1.0)];
    let (mut y_re, mut y_im) = ([0.0; 4], [0.0; 4]);
    for r in 0..2 {
        for c in 0..2 {
            for m in 0..2 {
                let (hr, hi) = (h_re[r * 2 + m], h_im[r * 2 + m]);
                let (xr, xi) = x[m * 2 + c];
                y_re[r * 2 + c] += hr * xr - hi * xi;
                y_im[r * 2 + c] += hr * xi + hi * xr;
            }
        }
    }
    let alphabet = [-1i64, 1];
    let mut coeffs = [0i64; 4];
    let mut nodes = 0u64;
    let st = unsafe {
        stlc_sphere_decode(
            b,
            2,
            h_re.as_ptr(),
            h_im.as_ptr(),
            y_re.as_ptr(),
            y_im.as_ptr(),
            alphabet.as_ptr(),
            2,
            coeffs.as_mut_ptr(),
            &mut nodes,
        )
    };
    assert_eq!(st, StlcStatus::Ok);
    assert_eq!(coeffs, [1, -1, 1, 1]);
    assert!(nodes > 0);
    unsafe { stlc_basis_free(b) };
}

#[test]
fn error_statuses() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { stlc_basis_build(ptr::null(), 0, &mut out) }, StlcStatus::NullPointer);
    let name = CString::new("alamouti").unwrap();
    assert_eq!(unsafe { stlc_basis_build(name.as_ptr(), 0, ptr::null_mut()) }, StlcStatus::NullPointer);

    let bad = CString::new("nonesuch").unwrap();
    assert_eq!(unsafe { stlc_basis_build(bad.as_ptr(), 0, &mut out) }, StlcStatus::InvalidInput);
    assert!(last_error().contains("nonesuch"));

    let relay = CString::new("mimo_relay").unwrap();
    assert_eq!(unsafe { stlc_basis_build(relay.as_ptr(), 4, &mut out) }, StlcStatus::InvalidInput);

    let invalid_utf8 = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { stlc_basis_build(invalid_utf8.as_ptr().cast(), 0, &mut out) }, StlcStatus::InvalidString);

    let json = CString::new("{not json").unwrap();
    assert_eq!(unsafe { stlc_basis_from_json(json.as_ptr(), &mut out) }, StlcStatus::InvalidInput);

    let mut v = 0.0;
    assert_eq!(unsafe { stlc_lattice_volume(ptr::null(), &mut v) }, StlcStatus::NullPointer);
    assert!(unsafe { stlc_basis_to_json(ptr::null()) }.is_null());
    unsafe {
        stlc_basis_free(ptr::null_mut());
        stlc_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/stlc.h")).unwrap();
    for sym in [
        "stlc_basis_build",
        "stlc_classify",
        "stlc_sphere_decode",
        "StlcStatus",
        "StlcProfile",
        "typedef struct StlcBasis StlcBasis",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
