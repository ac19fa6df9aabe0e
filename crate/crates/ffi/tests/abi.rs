use smc_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    smc_string_free(p);
    s
}

unsafe fn load(name: &str) -> *mut SmcModel {
    let mut h = ptr::null_mut();
    assert_eq!(smc_model_preset(c(name).as_ptr(), &mut h), SmcStatus::Ok);
    h
}

#[test]
fn exact_values_through_the_abi() {
    unsafe {
        let h = load("eg3");
        let mut out = ptr::null_mut();
        assert_eq!(smc_green(h, c("a").as_ptr(), c("bca").as_ptr(), &mut out), SmcStatus::Ok);
        assert_eq!(take(out), "1/16");
        assert_eq!(smc_kernel(h, c("ba").as_ptr(), c("bca").as_ptr(), &mut out), SmcStatus::Ok);
        assert_eq!(take(out), "4");
        assert_eq!(smc_theta(h, c("bca").as_ptr(), c("ba").as_ptr(), &mut out), SmcStatus::Ok);
        assert_eq!(take(out), "1/16");
        assert_eq!(smc_transition_prob(h, c("a").as_ptr(), c("ab").as_ptr(), &mut out), SmcStatus::Ok);
        assert_eq!(take(out), "1/4");
        smc_model_free(h);
    }
}

#[test]
fn frequencies_and_buffer_checks() {
    unsafe {
        let h = load("eg2");
        assert_eq!(smc_model_alphabet_len(h), 2);
        let mut rho = 0.0;
        let mut e = [0.0f64; 2];
        assert_eq!(smc_frequencies(h, &mut rho, e.as_mut_ptr(), 2), SmcStatus::Ok);
        assert!((rho - 2.0).abs() < 1e-12);
        assert!((e[0] - 2.0 / 3.0).abs() < 1e-12 && (e[1] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(smc_frequencies(h, &mut rho, e.as_mut_ptr(), 1), SmcStatus::BufferTooSmall);
        smc_model_free(h);
    }
}

#[test]
fn errors_set_the_thread_message() {
    unsafe {
        let h = load("eg1");
        let mut out = ptr::null_mut();
        assert_eq!(smc_green(h, c("b").as_ptr(), c("b").as_ptr(), &mut out), SmcStatus::Domain);
        let msg = CStr::from_ptr(smc_last_error()).to_str().unwrap();
        assert!(msg.starts_with("NonTransient"), "{msg}");
        assert_eq!(smc_green(h, c("z").as_ptr(), c("b").as_ptr(), &mut out), SmcStatus::Parse);
        assert_eq!(smc_green(ptr::null(), c("a").as_ptr(), c("b").as_ptr(), &mut out), SmcStatus::NullPointer);
        smc_model_free(h);
        let mut h = ptr::null_mut();
        assert_eq!(smc_model_preset(c("nope").as_ptr(), &mut h), SmcStatus::Domain);
        assert_eq!(smc_model_parse(c("alphabet = a\nrule a = 1/2: a").as_ptr(), &mut h), SmcStatus::Parse);
        smc_model_free(ptr::null_mut());
        smc_string_free(ptr::null_mut());
    }
}

#[test]
fn boundary_functions() {
    unsafe {
        let mut r = 0.0;
        assert_eq!(smc_eg3_rho(c("1/2,b,c").as_ptr(), c("1/2,c,b").as_ptr(), &mut r), SmcStatus::Ok);
        assert!((r - 30.0 / 49.0).abs() < 1e-15);
        assert_eq!(smc_eg3_rho(c("2,b,c").as_ptr(), c("1/2,c,b").as_ptr(), &mut r), SmcStatus::Parse);
        let mut p = [0.0f64; 3];
        assert_eq!(smc_eg3_psi(c("0,-,(b)").as_ptr(), 40, p.as_mut_ptr()), SmcStatus::Ok);
        assert_eq!(p[0], 0.0);
        let mut out = ptr::null_mut();
        assert_eq!(smc_eg3_cloud(4, 40, 9, &mut out), SmcStatus::Ok);
        let a = take(out);
        assert_eq!(smc_eg3_cloud(4, 40, 9, &mut out), SmcStatus::Ok);
        assert_eq!(a, take(out));
        assert_eq!(a.lines().count(), 5);
    }
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/smc.h")).unwrap();
    for f in ["smc_model_preset", "smc_green", "smc_eg3_cloud", "SMC_STATUS_DOMAIN", "typedef struct SmcModel"] {
        assert!(h.contains(f), "{f}");
    }
}
