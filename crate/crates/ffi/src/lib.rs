//! C ABI over cornerlab.
//!
//! Objects are opaque heap handles released with the matching `_free`
//! function. Every fallible call returns a `ClStatus`; outputs go through
//! pointer arguments and are written only on `CL_STATUS_OK`.

use cornerlab::counting::{lambda_corners, lambda_model, lambda_star, lambda_w, OperatorResult};
use cornerlab::norms::{box_norm, BoxSpec};
use cornerlab::{circle, poly, Error, GridFn, IntPolynomial, WTrickContext, C64};
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes shared by all entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    NullPointer = 1,
    Argument = 2,
    NotARoot = 3,
    RootMultiplicity = 4,
    Degree = 5,
    NTooSmall = 6,
    WorkBudget = 7,
    GridResolution = 8,
    NotABasis = 9,
    Parse = 10,
    Io = 11,
    Overflow = 12,
    Utf8 = 13,
    Panic = 14,
}

impl From<&Error> for ClStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Argument(_) => ClStatus::Argument,
            Error::NotARoot => ClStatus::NotARoot,
            Error::RootMultiplicity => ClStatus::RootMultiplicity,
            Error::Degree(_) => ClStatus::Degree,
            Error::NTooSmall => ClStatus::NTooSmall,
            Error::WorkBudget { .. } => ClStatus::WorkBudget,
            Error::GridResolution => ClStatus::GridResolution,
            Error::NotABasis => ClStatus::NotABasis,
            Error::Parse(_) => ClStatus::Parse,
            Error::Io(_) => ClStatus::Io,
            Error::Overflow => ClStatus::Overflow,
        }
    }
}

/// Opaque grid function on [n]^2.
pub struct ClGrid(GridFn);

/// Opaque integer polynomial.
pub struct ClPoly(IntPolynomial);

/// Opaque W-trick context.
pub struct ClWTrick(WTrickContext);

/// Result of a counting operator.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ClOperatorResult {
    pub value_re: f64,
    pub value_im: f64,
    pub normalization: f64,
    pub count_equivalent: f64,
    pub path_agreement_error: f64,
}

impl From<OperatorResult> for ClOperatorResult {
    fn from(r: OperatorResult) -> Self {
        ClOperatorResult {
            value_re: r.value.re,
            value_im: r.value.im,
            normalization: r.normalization,
            count_equivalent: r.count_equivalent,
            path_agreement_error: r.path_agreement_error,
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), ClStatus>) -> ClStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ClStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => ClStatus::Panic,
    }
}

fn lift<T>(r: cornerlab::Result<T>) -> Result<T, ClStatus> {
    r.map_err(|e| ClStatus::from(&e))
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, ClStatus> {
    p.as_ref().ok_or(ClStatus::NullPointer)
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), ClStatus> {
    if out.is_null() {
        return Err(ClStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, ClStatus> {
    if p.is_null() {
        return Err(ClStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| ClStatus::Utf8)
}

#[no_mangle]
pub extern "C" fn cl_version() -> u32 {
    1
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn cl_status_name(status: ClStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        ClStatus::Ok => b"ok\0",
        ClStatus::NullPointer => b"null-pointer\0",
        ClStatus::Argument => b"argument\0",
        ClStatus::NotARoot => b"not-a-root\0",
        ClStatus::RootMultiplicity => b"root-multiplicity\0",
        ClStatus::Degree => b"degree\0",
        ClStatus::NTooSmall => b"N-too-small\0",
        ClStatus::WorkBudget => b"work-budget\0",
        ClStatus::GridResolution => b"grid-resolution\0",
        ClStatus::NotABasis => b"not-a-basis\0",
        ClStatus::Parse => b"parse\0",
        ClStatus::Io => b"io\0",
        ClStatus::Overflow => b"overflow\0",
        ClStatus::Utf8 => b"utf8\0",
        ClStatus::Panic => b"panic\0",
    };
    s.as_ptr() as *const c_char
}

/// The all-ones function on [n]^2.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_grid_ones(n: usize, out: *mut *mut ClGrid) -> ClStatus {
    guard(|| put(out, Box::into_raw(Box::new(ClGrid(GridFn::ones(n))))))
}

/// A grid from n*n values in row-major order (index x*n + y); `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to n*n doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_grid_new(n: usize, re: *const f64, im: *const f64, out: *mut *mut ClGrid) -> ClStatus {
    guard(|| {
        if re.is_null() {
            return Err(ClStatus::NullPointer);
        }
        let len = n.checked_mul(n).ok_or(ClStatus::Overflow)?;
        let re = std::slice::from_raw_parts(re, len);
        let values: Vec<C64> = if im.is_null() {
            re.iter().map(|&r| C64::new(r, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect()
        };
        let g = lift(GridFn::from_values(n, values))?;
        put(out, Box::into_raw(Box::new(ClGrid(g))))
    })
}

/// # Safety
/// `grid` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cl_grid_free(grid: *mut ClGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `grid` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_grid_size(grid: *const ClGrid, out: *mut usize) -> ClStatus {
    guard(|| put(out, get(grid)?.0.n()))
}

/// Parses "c0+c1*z+c2*z^2".
///
/// # Safety
/// `src` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_poly_parse(src: *const c_char, out: *mut *mut ClPoly) -> ClStatus {
    guard(|| {
        let p = lift(IntPolynomial::parse(text(src)?))?;
        put(out, Box::into_raw(Box::new(ClPoly(p))))
    })
}

/// # Safety
/// `p` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cl_poly_free(p: *mut ClPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_poly_degree(p: *const ClPoly, out: *mut usize) -> ClStatus {
    guard(|| put(out, get(p)?.0.degree()))
}

/// Builds the W-trick context of P at root rho with W the product of primes below w.
///
/// # Safety
/// `p` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_wtrick_new(p: *const ClPoly, rho: i64, w: f64, out: *mut *mut ClWTrick) -> ClStatus {
    guard(|| {
        let ctx = lift(poly::build_w_trick(&get(p)?.0, rho, w))?;
        put(out, Box::into_raw(Box::new(ClWTrick(ctx))))
    })
}

/// # Safety
/// `ctx` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cl_wtrick_free(ctx: *mut ClWTrick) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Coefficient j of P~ as a 64-bit integer.
///
/// # Safety
/// `ctx` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_wtrick_coeff(ctx: *const ClWTrick, j: usize, out: *mut i64) -> ClStatus {
    guard(|| {
        let c = get(ctx)?.0.p_tilde.coeff(j);
        let v = i64::try_from(c).map_err(|_| ClStatus::Overflow)?;
        put(out, v)
    })
}

/// K = floor((N / W_d)^{1/d}).
///
/// # Safety
/// `ctx` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_wtrick_k(ctx: *const ClWTrick, n: u64, out: *mut usize) -> ClStatus {
    guard(|| put(out, get(ctx)?.0.k_for(n)))
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_lambda_corners(
    f0: *const ClGrid,
    f1: *const ClGrid,
    f2: *const ClGrid,
    n: usize,
    out: *mut ClOperatorResult,
) -> ClStatus {
    guard(|| {
        let r = lambda_corners(&get(f0)?.0, &get(f1)?.0, &get(f2)?.0, n);
        put(out, r.into())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_lambda_w(
    f0: *const ClGrid,
    f1: *const ClGrid,
    f2: *const ClGrid,
    ctx: *const ClWTrick,
    n: usize,
    out: *mut ClOperatorResult,
) -> ClStatus {
    guard(|| {
        let r = lift(lambda_w(&get(f0)?.0, &get(f1)?.0, &get(f2)?.0, &get(ctx)?.0, n))?;
        put(out, r.into())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_lambda_model(
    f0: *const ClGrid,
    f1: *const ClGrid,
    f2: *const ClGrid,
    n: usize,
    d: u32,
    out: *mut ClOperatorResult,
) -> ClStatus {
    guard(|| {
        let r = lift(lambda_model(&get(f0)?.0, &get(f1)?.0, &get(f2)?.0, n, d))?;
        put(out, r.into())
    })
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_lambda_star(
    f0: *const ClGrid,
    f1: *const ClGrid,
    f2: *const ClGrid,
    ctx: *const ClWTrick,
    n: usize,
    out: *mut ClOperatorResult,
) -> ClStatus {
    guard(|| {
        let r = lift(lambda_star(&get(f0)?.0, &get(f1)?.0, &get(f2)?.0, &get(ctx)?.0, n))?;
        put(out, r.into())
    })
}

/// value_pow of the box norm described by `spec`, e.g. "e1:4;e2:4".
///
/// # Safety
/// `grid`, `spec` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_box_norm(grid: *const ClGrid, spec: *const c_char, budget: f64, out: *mut f64) -> ClStatus {
    guard(|| {
        let spec = lift(BoxSpec::parse(text(spec)?))?;
        let r = lift(box_norm(&get(grid)?.0, &spec, budget))?;
        put(out, r.value_pow)
    })
}

/// S(xi) = sum_{z in [K]} e(xi Q(z)).
///
/// # Safety
/// `q`, `re` and `im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_weyl_sum(q: *const ClPoly, k: usize, xi: f64, re: *mut f64, im: *mut f64) -> ClStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(ClStatus::NullPointer);
        }
        let s = lift(circle::weyl_sum(&get(q)?.0, k, xi))?;
        put(re, s.re)?;
        put(im, s.im)
    })
}
