//! Counting operators for corners and polynomial corners, their dual
//! functions, and the weight-form identities.
//!
//! Every operator is evaluated along two paths: the dual-function path sums
//! over z inside each point (x, y); the slice path forms, for each shift t,
//! the full-grid correlation C(t) = sum_{x,y} f0(x,y) f1(x+t,y) f2(x,y+t) and
//! then sums C against the weight attached to t.

use crate::error::{arg, Error, Result};
use crate::fourier::frac_mul;
use crate::grid::{e, GridFn, LineFn, PhaseFn, C64, ZERO};
use crate::poly::{int_root_floor, v_trick_poly, IntPolynomial, WTrickContext};
use crate::reduce;
use crate::weights::{tilde_k, weight_nu, weight_nu_star_k, weight_nu_tilde_k, Weight};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorResult {
    pub value: C64,
    /// Denominator of the z-average.
    pub normalization: f64,
    /// normalization * Re(value); the raw configuration count for indicators.
    pub count_equivalent: f64,
    /// Relative difference between the two evaluation paths.
    pub path_agreement_error: f64,
}

impl OperatorResult {
    fn from_paths(a: C64, b: C64, normalization: f64) -> Self {
        OperatorResult {
            value: a,
            normalization,
            count_equivalent: normalization * a.re,
            path_agreement_error: rel_err(a, b),
        }
    }
}

/// |a - b| / max(|a|, |b|), and 0 when both vanish.
pub fn rel_err(a: C64, b: C64) -> f64 {
    let m = a.norm().max(b.norm());
    if m == 0.0 {
        0.0
    } else {
        (a - b).norm() / m
    }
}

fn common_n(fs: &[&GridFn]) -> usize {
    fs.iter().map(|f| f.n()).max().unwrap_or(0)
}

fn pad(f: &GridFn, n: usize) -> GridFn {
    if f.n() == n {
        f.clone()
    } else {
        f.resized(n)
    }
}

/// D(x, y) = (1/norm) sum_{(t, w)} w f1(x + t, y) f2(x, y + t) on [n]^2.
pub fn dual_weighted(f1: &GridFn, f2: &GridFn, terms: &[(i64, f64)], norm: f64) -> GridFn {
    let n = common_n(&[f1, f2]);
    let (f1, f2) = (pad(f1, n), pad(f2, n));
    let ni = n as i64;
    let rows: Vec<Vec<C64>> = reduce::map_indexed(n, |x| {
        let mut out = vec![ZERO; n];
        let r2 = f2.row(x);
        for &(t, w) in terms {
            let xt = x as i64 + t;
            if xt < 0 || xt >= ni {
                continue;
            }
            let r1 = f1.row(xt as usize);
            let (lo, hi) = (0i64.max(-t) as usize, ni.min(ni - t).max(0) as usize);
            for y in lo..hi {
                out[y] += r1[y] * r2[(y as i64 + t) as usize] * w;
            }
        }
        for v in out.iter_mut() {
            *v /= norm;
        }
        out
    });
    GridFn::from_values(n, rows.concat()).expect("square")
}

/// C(t) = sum_{x,y} f0(x,y) f1(x+t,y) f2(x,y+t) on a common grid.
pub fn slice_correlation(f0: &GridFn, f1: &GridFn, f2: &GridFn, t: i64) -> C64 {
    let n = f0.n();
    let ni = n as i64;
    let (lo, hi) = (0i64.max(-t) as usize, ni.min(ni - t).max(0) as usize);
    let mut acc = ZERO;
    for x in 0..n {
        let xt = x as i64 + t;
        if xt < 0 || xt >= ni {
            continue;
        }
        let (r0, r1, r2) = (f0.row(x), f1.row(xt as usize), f2.row(x));
        for y in lo..hi {
            acc += r0[y] * r1[y] * r2[(y as i64 + t) as usize];
        }
    }
    acc
}

/// Dual-function path: sum_{x,y} f0 * D(f1, f2).
pub fn corner_sum_direct(f0: &GridFn, f1: &GridFn, f2: &GridFn, terms: &[(i64, f64)], norm: f64) -> C64 {
    let n = common_n(&[f0, f1, f2]);
    let (f0, f1, f2) = (pad(f0, n), pad(f1, n), pad(f2, n));
    let d = dual_weighted(&f1, &f2, terms, norm);
    reduce::sum_c64(n, 8, |rows| {
        let mut acc = ZERO;
        for x in rows {
            for (a, b) in f0.row(x).iter().zip(d.row(x)) {
                acc += a * b;
            }
        }
        acc
    })
}

/// Slice path: (1/norm) sum_t w(t) C(t) over the distinct shifts of `weights`.
pub fn corner_sum_slices(f0: &GridFn, f1: &GridFn, f2: &GridFn, weights: &[(i64, f64)], norm: f64) -> C64 {
    let n = common_n(&[f0, f1, f2]);
    let (f0, f1, f2) = (pad(f0, n), pad(f1, n), pad(f2, n));
    let parts = reduce::map_indexed(weights.len(), |i| {
        let (t, w) = weights[i];
        slice_correlation(&f0, &f1, &f2, t) * w
    });
    parts.into_iter().fold(ZERO, |a, b| a + b) / norm
}

/// Shift list of an unweighted average over z in [K] of Q(z).
fn shift_terms(values: &[i64]) -> Vec<(i64, f64)> {
    values.iter().map(|&t| (t, 1.0)).collect()
}

/// Histogram of shifts, as (t, multiplicity) pairs.
fn shift_histogram(values: &[i64]) -> Vec<(i64, f64)> {
    let mut map: BTreeMap<i64, f64> = BTreeMap::new();
    for &t in values {
        *map.entry(t).or_insert(0.0) += 1.0;
    }
    map.into_iter().collect()
}

fn weight_terms(w: &Weight) -> Vec<(i64, f64)> {
    w.support()
}

/// sum_{x,y} E_{z in [N]} f0(x,y) f1(x+z,y) f2(x,y+z).
pub fn lambda_corners(f0: &GridFn, f1: &GridFn, f2: &GridFn, n: usize) -> OperatorResult {
    let shifts: Vec<i64> = (0..n as i64).collect();
    let a = corner_sum_direct(f0, f1, f2, &shift_terms(&shifts), n as f64);
    let ones: Vec<(i64, f64)> = shifts.iter().map(|&t| (t, 1.0)).collect();
    let b = corner_sum_slices(f0, f1, f2, &ones, n as f64);
    OperatorResult::from_paths(a, b, n as f64)
}

/// K = floor((N / beta_d)^{1/d}) for the leading coefficient beta_d of P.
pub fn poly_k(p: &IntPolynomial, n: usize) -> Result<usize> {
    let lead = p.leading();
    if !lead.is_positive() {
        return arg("the leading coefficient of P must be positive");
    }
    let k = int_root_floor(&(BigInt::from(n) / lead), p.degree().max(1) as u32);
    if k == 0 {
        Err(Error::NTooSmall)
    } else {
        Ok(k)
    }
}

/// sum_{x,y} E_{z in [K]} f0(x,y) f1(x+P(z),y) f2(x,y+P(z)).
pub fn lambda_poly(f0: &GridFn, f1: &GridFn, f2: &GridFn, p: &IntPolynomial, n: usize) -> Result<OperatorResult> {
    let k = poly_k(p, n)?;
    let values = p.values_on(k)?;
    let a = corner_sum_direct(f0, f1, f2, &shift_terms(&values), k as f64);
    let b = corner_sum_slices(f0, f1, f2, &shift_histogram(&values), k as f64);
    Ok(OperatorResult::from_paths(a, b, k as f64))
}

/// Corner sum weighted by nu(z) on [N].
pub fn lambda_model(f0: &GridFn, f1: &GridFn, f2: &GridFn, n: usize, d: u32) -> Result<OperatorResult> {
    if d < 2 {
        return arg("d must be at least 2");
    }
    let nu = weight_nu(n, d);
    Ok(weighted_operator(f0, f1, f2, &nu, n))
}

/// Corner sum against an arbitrary weight, normalised by 1/N.
pub fn weighted_operator(f0: &GridFn, f1: &GridFn, f2: &GridFn, w: &Weight, n: usize) -> OperatorResult {
    let terms = weight_terms(w);
    let a = corner_sum_direct(f0, f1, f2, &terms, n as f64);
    let b = corner_sum_slices(f0, f1, f2, &terms, n as f64);
    OperatorResult::from_paths(a, b, n as f64)
}

/// sum_{x,y} E_{z in [K]} f0(x,y) f1(x+P~(z),y) f2(x,y+P~(z)).
pub fn lambda_w(f0: &GridFn, f1: &GridFn, f2: &GridFn, ctx: &WTrickContext, n: usize) -> Result<OperatorResult> {
    let k = tilde_k(ctx, n)?;
    lambda_w_k(f0, f1, f2, ctx, n, k)
}

/// Lambda^W with an explicit K; the slice path uses the nu~ weight form.
pub fn lambda_w_k(
    f0: &GridFn,
    f1: &GridFn,
    f2: &GridFn,
    ctx: &WTrickContext,
    n: usize,
    k: usize,
) -> Result<OperatorResult> {
    let values = ctx.p_tilde.values_on(k)?;
    let a = corner_sum_direct(f0, f1, f2, &shift_terms(&values), k as f64);
    let tilde = weight_nu_tilde_k(ctx, n, k)?;
    let b = corner_sum_slices(f0, f1, f2, &weight_terms(&tilde), n as f64);
    Ok(OperatorResult::from_paths(a, b, k as f64))
}

/// Lambda* = Lambda^W - Lambda^Model, and the single nu* weighted sum.
pub fn lambda_star(f0: &GridFn, f1: &GridFn, f2: &GridFn, ctx: &WTrickContext, n: usize) -> Result<OperatorResult> {
    let k = tilde_k(ctx, n)?;
    let d = ctx.degree() as u32;
    let values = ctx.p_tilde.values_on(k)?;
    let w = corner_sum_direct(f0, f1, f2, &shift_terms(&values), k as f64);
    let nu = weight_nu(n, d);
    let m = corner_sum_direct(f0, f1, f2, &weight_terms(&nu), n as f64);
    let a = w - m;
    let star = weight_nu_star_k(ctx, n, k)?;
    let b = corner_sum_slices(f0, f1, f2, &weight_terms(&star), n as f64);
    Ok(OperatorResult::from_paths(a, b, n as f64))
}

/// K' = floor(K / V) for the V-tricked average.
pub fn prime_k(ctx: &WTrickContext, n: usize, v: i64) -> Result<usize> {
    if v <= 0 {
        return arg("V must be positive");
    }
    let k = ctx.k_for(n as u64) / v as usize;
    if k == 0 {
        Err(Error::NTooSmall)
    } else {
        Ok(k)
    }
}

/// The phase grid e(a(y) x) on [n]^2.
pub fn phase_grid(a: &PhaseFn, n: usize) -> GridFn {
    GridFn::from_fn(n, |x, y| e(frac_mul(a.get(y as i64), x as i64)))
}

/// sum_{x,y} E_{z in [K']} e(a(y) x) f1(x+Q(z),y) f2(x,y+Q(z)) with Q = P~_{[r,V]}.
pub fn lambda_prime(
    a: &PhaseFn,
    f1: &GridFn,
    f2: &GridFn,
    ctx: &WTrickContext,
    v: i64,
    r: i64,
    n: usize,
) -> Result<OperatorResult> {
    let kp = prime_k(ctx, n, v)?;
    let q = v_trick_poly(&ctx.p_tilde, r, v)?;
    let values = q.values_on(kp)?;
    let size = common_n(&[f1, f2]);
    let f0 = phase_grid(a, size);
    let x = corner_sum_direct(&f0, f1, f2, &shift_terms(&values), kp as f64);
    let y = corner_sum_slices(&f0, f1, f2, &shift_histogram(&values), kp as f64);
    Ok(OperatorResult::from_paths(x, y, kp as f64))
}

fn double_prime_setup(ctx: &WTrickContext, v: i64, r: i64, n: usize) -> Result<(Vec<i64>, usize)> {
    let kp = prime_k(ctx, n, v)?;
    let q = v_trick_poly(&ctx.p_tilde, r, v)?;
    Ok((q.values_on(kp)?, n / v as usize))
}

/// sum_{y in [N/V]} |E_{z in [K']} e(-a(y) Q(z)) b1(y + Q(z))|.
pub fn lambda_double_prime(a: &PhaseFn, b1: &LineFn, ctx: &WTrickContext, v: i64, r: i64, n: usize) -> Result<f64> {
    let (values, ny) = double_prime_setup(ctx, v, r, n)?;
    let kp = values.len() as f64;
    Ok(reduce::sum_f64(ny, 64, |ys| {
        let mut acc = 0.0;
        for y in ys {
            let ay = a.get(y as i64);
            let mut inner = ZERO;
            for &t in &values {
                inner += e(-frac_mul(ay, t)) * b1.get(y as i64 + t);
            }
            acc += inner.norm() / kp;
        }
        acc
    }))
}

/// The same quantity with the z-average grouped by distinct values of Q(z).
pub fn lambda_double_prime_grouped(
    a: &PhaseFn,
    b1: &LineFn,
    ctx: &WTrickContext,
    v: i64,
    r: i64,
    n: usize,
) -> Result<f64> {
    let (values, ny) = double_prime_setup(ctx, v, r, n)?;
    let kp = values.len() as f64;
    let hist = shift_histogram(&values);
    let mut total = 0.0;
    for y in 0..ny as i64 {
        let ay = a.get(y);
        let inner = hist
            .iter()
            .fold(ZERO, |acc, &(t, m)| acc + e(-frac_mul(ay, t)) * b1.get(y + t) * m);
        total += (inner / kp).norm();
    }
    Ok(total)
}

/// D0(f1, f2)(x, y) = E_{z in [K]} f1(x + P~(z), y) f2(x, y + P~(z)).
pub fn dual_d0(f1: &GridFn, f2: &GridFn, ctx: &WTrickContext, n: usize) -> Result<GridFn> {
    let k = tilde_k(ctx, n)?;
    let values = ctx.p_tilde.values_on(k)?;
    Ok(dual_weighted(f1, f2, &shift_terms(&values), k as f64))
}

/// D1(f0, f2)(x, y) = E_{z in [K]} f0(x - P~(z), y) f2(x - P~(z), y + P~(z)), on the grid.
pub fn dual_d1(f0: &GridFn, f2: &GridFn, ctx: &WTrickContext, n: usize) -> Result<GridFn> {
    let k = tilde_k(ctx, n)?;
    let values = ctx.p_tilde.values_on(k)?;
    let size = common_n(&[f0, f2]);
    let (f0, f2) = (pad(f0, size), pad(f2, size));
    let kf = k as f64;
    let rows: Vec<Vec<C64>> = reduce::map_indexed(size, |x| {
        (0..size)
            .map(|y| {
                values.iter().fold(ZERO, |acc, &t| {
                    let xs = x as i64 - t;
                    acc + f0.get(xs, y as i64) * f2.get(xs, y as i64 + t)
                }) / kf
            })
            .collect()
    });
    Ok(GridFn::from_values(size, rows.concat()).expect("square"))
}

/// D0* = D0 - E_{z in [N]} f1(x+z,y) f2(x,y+z) nu(z).
pub fn dual_d0_star(f1: &GridFn, f2: &GridFn, ctx: &WTrickContext, n: usize) -> Result<GridFn> {
    let d0 = dual_d0(f1, f2, ctx, n)?;
    let nu = weight_nu(n, ctx.degree() as u32);
    let model = dual_weighted(f1, f2, &weight_terms(&nu), n as f64);
    Ok(d0.lin_comb(C64::new(1.0, 0.0), &model, C64::new(-1.0, 0.0)))
}

/// D0* in weight form, E_{z in [N]} f1(x+z,y) f2(x,y+z) nu*(z).
pub fn dual_d0_star_weighted(f1: &GridFn, f2: &GridFn, ctx: &WTrickContext, n: usize) -> Result<GridFn> {
    let k = tilde_k(ctx, n)?;
    let star = weight_nu_star_k(ctx, n, k)?;
    Ok(dual_weighted(f1, f2, &weight_terms(&star), n as f64))
}

/// sum_{x,y} f(x,y) g(x,y) over the common grid.
pub fn inner_sum(f: &GridFn, g: &GridFn) -> C64 {
    let n = common_n(&[f, g]);
    let mut acc = ZERO;
    for x in 0..n as i64 {
        for y in 0..n as i64 {
            acc += f.get(x, y) * g.get(x, y);
        }
    }
    acc
}

/// The reflected function f~(x, y) = f(2N - 1 - (x + y), y) on [2N]^2.
pub fn reflect(f: &GridFn, n: usize) -> GridFn {
    let m = 2 * n as i64;
    GridFn::from_fn(2 * n, |x, y| f.get(m - 1 - (x as i64 + y as i64), y as i64))
}

/// Whether an operator has a real-valued result on real inputs, to 1e-9 relative.
pub fn is_real(r: &OperatorResult) -> bool {
    r.value.im.abs() <= 1e-9 * r.value.norm().max(1.0) || r.value.im.is_zero()
}
