use cornerlab_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn ones(n: usize) -> *mut ClGrid {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cl_grid_ones(n, &mut g) }, ClStatus::Ok);
    g
}

#[test]
fn corners_on_full_two_by_two() {
    let g = ones(2);
    let mut r = ClOperatorResult::default();
    let st = unsafe { cl_lambda_corners(g, g, g, 2, &mut r) };
    assert_eq!(st, ClStatus::Ok);
    assert!((r.value_re - 2.5).abs() < 1e-12);
    assert!(r.path_agreement_error < 1e-12);
    unsafe { cl_grid_free(g) };
}

#[test]
fn wtrick_roundtrip() {
    let src = CString::new("-1+z^2").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cl_poly_parse(src.as_ptr(), &mut p) }, ClStatus::Ok);
    let mut deg = 0;
    assert_eq!(unsafe { cl_poly_degree(p, &mut deg) }, ClStatus::Ok);
    assert_eq!(deg, 2);

    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { cl_wtrick_new(p, 1, 5.0, &mut ctx) }, ClStatus::Ok);
    let mut c = [0i64; 3];
    for (j, slot) in c.iter_mut().enumerate() {
        assert_eq!(unsafe { cl_wtrick_coeff(ctx, j, slot) }, ClStatus::Ok);
    }
    assert_eq!(c, [0, 1, 6]);
    let mut k = 0;
    assert_eq!(unsafe { cl_wtrick_k(ctx, 7776, &mut k) }, ClStatus::Ok);
    assert_eq!(k, 36);

    let g = ones(96);
    let mut r = ClOperatorResult::default();
    assert_eq!(unsafe { cl_lambda_w(g, g, g, ctx, 96, &mut r) }, ClStatus::Ok);
    assert!(r.path_agreement_error < 1e-9);

    unsafe {
        cl_grid_free(g);
        cl_wtrick_free(ctx);
        cl_poly_free(p);
    }
}

#[test]
fn errors_map_to_codes() {
    let src = CString::new("1+z^2").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cl_poly_parse(src.as_ptr(), &mut p) }, ClStatus::Ok);
    let mut ctx = ptr::null_mut();
    assert_eq!(unsafe { cl_wtrick_new(p, 1, 5.0, &mut ctx) }, ClStatus::NotARoot);
    assert!(ctx.is_null());

    let bad = CString::new("z^^").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { cl_poly_parse(bad.as_ptr(), &mut q) }, ClStatus::Parse);
    assert_eq!(unsafe { cl_poly_parse(ptr::null(), &mut q) }, ClStatus::NullPointer);
    assert_eq!(unsafe { cl_grid_ones(3, ptr::null_mut()) }, ClStatus::NullPointer);

    let name = unsafe { CStr::from_ptr(cl_status_name(ClStatus::NotARoot)) };
    assert_eq!(name.to_str().unwrap(), "not-a-root");
    unsafe { cl_poly_free(p) };
}

#[test]
fn grid_from_values_and_norm() {
    let n = 8;
    let re: Vec<f64> = (0..n * n).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cl_grid_new(n, re.as_ptr(), ptr::null(), &mut g) }, ClStatus::Ok);
    let mut size = 0;
    assert_eq!(unsafe { cl_grid_size(g, &mut size) }, ClStatus::Ok);
    assert_eq!(size, n);

    let spec = CString::new("e1:2;e2:2").unwrap();
    let mut v = 0.0;
    assert_eq!(unsafe { cl_box_norm(g, spec.as_ptr(), 1e9, &mut v) }, ClStatus::Ok);
    assert!(v.is_finite() && v >= 0.0);

    let mut tiny = 0.0;
    assert_eq!(unsafe { cl_box_norm(g, spec.as_ptr(), 1.0, &mut tiny) }, ClStatus::WorkBudget);
    unsafe { cl_grid_free(g) };
}

#[test]
fn weyl_sum_at_zero_is_k() {
    let src = CString::new("z^2").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { cl_poly_parse(src.as_ptr(), &mut p) }, ClStatus::Ok);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { cl_weyl_sum(p, 50, 0.0, &mut re, &mut im) }, ClStatus::Ok);
    assert_eq!((re, im), (50.0, 0.0));
    unsafe { cl_poly_free(p) };
}

#[test]
fn free_accepts_null() {
    unsafe {
        cl_grid_free(ptr::null_mut());
        cl_poly_free(ptr::null_mut());
        cl_wtrick_free(ptr::null_mut());
    }
    assert_eq!(cl_version(), 1);
}
