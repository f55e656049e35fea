use std::ffi::CStr;
use std::ptr;

use gkz_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; gkz_last_error_length() + 1];
    assert_eq!(
        unsafe { gkz_last_error_message(buf.as_mut_ptr(), buf.len()) },
        GKZ_OK
    );
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

fn problem(a: &[i64], rows: usize, cols: usize) -> *mut GkzProblem {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { gkz_problem_new(a.as_ptr(), rows, cols, ptr::null(), 0, &mut p) },
        GKZ_OK
    );
    assert!(!p.is_null());
    p
}

#[test]
fn kernel_round_trip() {
    let p = problem(&[1, -1, 0, 0, 1, -1], 2, 3);
    let (mut n, mut m, mut rank) = (0, 0, 0);
    assert_eq!(
        unsafe { gkz_problem_dims(p, &mut n, &mut m, &mut rank) },
        GKZ_OK
    );
    assert_eq!((n, m, rank), (3, 2, 1));

    let mut written = 0;
    let mut small = [0i64; 2];
    assert_eq!(
        unsafe { gkz_problem_lattice(p, small.as_mut_ptr(), 2, &mut written) },
        GKZ_ERR_BUFFER
    );
    assert_eq!(written, 3);
    let mut buf = [0i64; 3];
    assert_eq!(
        unsafe { gkz_problem_lattice(p, buf.as_mut_ptr(), 3, &mut written) },
        GKZ_OK
    );
    assert_eq!(buf, [1, 1, 1]);
    unsafe { gkz_problem_free(p) };
}

#[test]
fn gamma_function_value() {
    let p = problem(&[1], 1, 1);
    let mut v = GkzValue::default();
    let rc = unsafe {
        gkz_eval_gg(
            p,
            [2.0].as_ptr(),
            [0.0].as_ptr(),
            [1.0].as_ptr(),
            1,
            0,
            &mut v,
        )
    };
    assert_eq!(rc, GKZ_OK);
    assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-14);
    unsafe { gkz_problem_free(p) };
}

#[test]
fn error_codes() {
    let mut p = ptr::null_mut();
    // Columns (2, 4) do not generate Z.
    let rc = unsafe { gkz_problem_new([2i64, 4].as_ptr(), 1, 2, ptr::null(), 0, &mut p) };
    assert_eq!(rc, GKZ_ERR_VALIDATION);
    assert!(p.is_null());
    assert!(last_error().contains("generate"), "{}", last_error());

    let rc = unsafe { gkz_problem_new([1i64].as_ptr(), 1, 1, ptr::null(), 0, ptr::null_mut()) };
    assert_eq!(rc, GKZ_ERR_NULL);

    let p = problem(&[1], 1, 1);
    let mut v = GkzValue::default();
    let rc = unsafe {
        gkz_eval_gg(
            p,
            [-0.5].as_ptr(),
            [0.0].as_ptr(),
            [1.0].as_ptr(),
            1,
            0,
            &mut v,
        )
    };
    assert_eq!(rc, GKZ_ERR_DOMAIN);
    assert!(last_error().contains("chamber"));
    let rc = unsafe {
        gkz_eval_gg(
            p,
            [1.0].as_ptr(),
            [0.0].as_ptr(),
            [1.0, 2.0].as_ptr(),
            2,
            0,
            &mut v,
        )
    };
    assert_eq!(rc, GKZ_ERR_VALIDATION);
    unsafe { gkz_problem_free(p) };

    let mut tiny = [0 as std::ffi::c_char; 1];
    assert_eq!(
        unsafe { gkz_last_error_message(tiny.as_mut_ptr(), 1) },
        GKZ_ERR_BUFFER
    );
}

#[test]
fn exponential_problem_without_torus() {
    let mut p = ptr::null_mut();
    let rc = unsafe { gkz_problem_new(ptr::null(), 0, 1, [1i64].as_ptr(), 1, &mut p) };
    assert_eq!(rc, GKZ_OK);
    let mut v = GkzValue::default();
    let rc = unsafe {
        gkz_eval_gg(
            p,
            [0.5].as_ptr(),
            [0.0].as_ptr(),
            [2.0].as_ptr(),
            1,
            0,
            &mut v,
        )
    };
    assert_eq!(rc, GKZ_OK);
    let expected = 2f64.powf(0.5) * (-2f64).exp();
    assert!((v.re - expected).abs() <= 1e-12 * expected);
    unsafe { gkz_problem_free(p) };
}

#[test]
fn whittaker_matches_bessel() {
    let (nu, x) = (0.3, 0.4);
    let mut w = GkzValue::default();
    assert_eq!(
        unsafe { gkz_whittaker_max(1, [nu, -nu].as_ptr(), x, 0, &mut w) },
        GKZ_OK
    );
    let mut k = GkzValue::default();
    let z = 2.0 * (x / 2.0f64).exp();
    assert_eq!(unsafe { gkz_bessel_k(2.0 * nu, 0.0, z, &mut k) }, GKZ_OK);
    // 2 e^{(l1 + l2) x / 2} K_{l1 - l2}(2 e^{x/2}) with l1 + l2 = 0.
    let expected = 2.0 * k.re;
    assert!(
        (w.re - expected).abs() <= 1e-9 * expected,
        "{} vs {expected}",
        w.re
    );
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/gkz.h");
    for name in [
        "gkz_problem_new",
        "gkz_problem_free",
        "gkz_problem_dims",
        "gkz_problem_lattice",
        "gkz_eval_gg",
        "gkz_whittaker_max",
        "gkz_bessel_k",
        "gkz_last_error_length",
        "gkz_last_error_message",
        "GKZ_ERR_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
