//! Discrete Fourier analysis on Z with the convention f^(xi) = sum_x f(x) e(xi x).

use crate::error::{arg, Result};
use crate::grid::{e, LineFn, C64, ZERO};
use rustfft::FftPlanner;

/// sum_j a_j e(k j / M) for k in [M], folding indices mod M.
pub fn dft_positive(a: &[C64], m: usize) -> Vec<C64> {
    let mut buf = vec![ZERO; m];
    for (j, &v) in a.iter().enumerate() {
        buf[j % m] += v;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(m).process(&mut buf);
    buf
}

/// f^(k/M) for k in [M], requiring M >= 3 len.
pub fn dft_line(f: &LineFn, m: usize) -> Result<Vec<C64>> {
    if m < 3 * f.len() {
        return arg(format!("M = {m} is below 3 * len = {}", 3 * f.len()));
    }
    Ok(dft_offset(f.values(), f.offset(), m))
}

/// Transform of values sitting at `offset, offset + 1, ...`.
pub fn dft_offset(values: &[C64], offset: i64, m: usize) -> Vec<C64> {
    let mut out = dft_positive(values, m);
    if offset != 0 {
        let o = offset.rem_euclid(m as i64) as u128;
        for (k, v) in out.iter_mut().enumerate() {
            let phase = ((k as u128 * o) % m as u128) as f64 / m as f64;
            *v *= e(phase);
        }
    }
    out
}

/// f^(theta) by direct summation.
pub fn fourier_at(f: &LineFn, theta: f64) -> C64 {
    let mut acc = ZERO;
    for (i, &v) in f.values().iter().enumerate() {
        let x = f.offset() + i as i64;
        acc += v * e(frac_mul(theta, x));
    }
    acc
}

/// c(t) = sum_x a(x) b(x + t) for t in -(len a - 1) ..= len b - 1, returned
/// with index t + len a - 1.
pub fn cross_correlation(a: &[C64], b: &[C64]) -> Vec<C64> {
    let (la, lb) = (a.len(), b.len());
    let len = la + lb - 1;
    let m = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    // convolution of reversed a with b
    let mut fa = vec![ZERO; m];
    for (i, &v) in a.iter().enumerate() {
        fa[la - 1 - i] = v;
    }
    let mut fb = vec![ZERO; m];
    fb[..lb].copy_from_slice(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / m as f64;
    fa.truncate(len);
    fa.iter().map(|v| v * scale).collect()
}

/// Fractional part of xi * n computed exactly from the binary expansion of xi.
pub fn frac_mul(xi: f64, n: i64) -> f64 {
    if n == 0 || xi == 0.0 {
        return 0.0;
    }
    let bits = xi.to_bits();
    let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac_bits, -1074)
    } else {
        (frac_bits | (1u64 << 52), exp_bits - 1075)
    };
    if exp >= 0 {
        return 0.0;
    }
    let s = -exp;
    let p = sign * mant as i128 * n as i128;
    if s >= 120 {
        let v = p as f64 * 2f64.powi(exp);
        return v - v.floor();
    }
    let modulus = 1i128 << s;
    let r = p.rem_euclid(modulus);
    let v = r as f64 * 2f64.powi(exp);
    if v >= 1.0 {
        0.0
    } else {
        v
    }
}

/// Golden-section search for a maximum of `f` on [lo, hi].
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iter = 0;
    while (b - a) > tol && iter < 200 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        iter += 1;
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
