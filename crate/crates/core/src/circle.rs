//! Weyl sums, complete sums, major/minor arcs, the uniformity scan of nu*,
//! and even-moment diagnostics.

use crate::error::{arg, Error, Result};
use crate::fourier::{dft_positive, frac_mul, golden_max};
use crate::grid::{e, C64, ZERO};
use crate::poly::{IntPolynomial, WTrickContext};
use crate::weights::weight_nu_star;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

/// S(xi) = sum_{z in [K]} e(xi Q(z)).
pub fn weyl_sum(q: &IntPolynomial, k: usize, xi: f64) -> Result<C64> {
    let values = q.values_on(k)?;
    Ok(weyl_sum_values(&values, xi))
}

pub fn weyl_sum_values(values: &[i64], xi: f64) -> C64 {
    values.iter().fold(ZERO, |acc, &t| acc + e(frac_mul(xi, t)))
}

/// S(a, q) = E_{u in [q]} e(a Q(u) / q).
pub fn complete_sum(p: &IntPolynomial, a: i64, q: u64) -> Result<C64> {
    if q == 0 {
        return arg("q must be positive");
    }
    let qb = BigInt::from(q);
    if !BigInt::from(a).gcd(&qb).is_one() {
        return arg(format!("gcd({a}, {q}) != 1"));
    }
    let ab = BigInt::from(a);
    let mut acc = ZERO;
    for u in 0..q {
        let r = (&ab * p.eval(&BigInt::from(u))).mod_floor(&qb);
        acc += e(r.to_f64().unwrap() / q as f64);
    }
    Ok(acc / q as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcLabel {
    pub major: bool,
    pub a: u64,
    pub q: u64,
    pub dist: f64,
}

/// Circular distance between xi and a/q in R/Z.
pub fn circ_dist(xi: f64, a: u64, q: u64) -> f64 {
    let t = xi - a as f64 / q as f64;
    (t - t.round()).abs()
}

/// Height bound floor(K^eps) and radius K^{-(d - eps)} of the major arcs.
pub fn arc_parameters(k: usize, d: u32, epsilon: f64) -> (u64, f64) {
    let kf = k as f64;
    let qmax = (kf.powf(epsilon) + 1e-9).floor().max(1.0) as u64;
    (qmax, kf.powf(-(d as f64 - epsilon)))
}

/// Finds the major arc containing xi, or reports the nearest small-height rational.
pub fn classify_arc(xi: f64, k: usize, d: u32, epsilon: f64) -> ArcLabel {
    let (qmax, radius) = arc_parameters(k, d, epsilon);
    let xi = xi - xi.floor();
    let mut nearest = ArcLabel { major: false, a: 0, q: 1, dist: circ_dist(xi, 0, 1) };
    for q in 1..=qmax {
        let base = (xi * q as f64).floor() as u64;
        for cand in [base, base + 1] {
            let a = cand % q;
            if a.gcd(&q) != 1 {
                continue;
            }
            let dist = circ_dist(xi, a, q);
            if dist <= radius {
                return ArcLabel { major: true, a, q, dist };
            }
            if dist < nearest.dist {
                nearest = ArcLabel { major: false, a, q, dist };
            }
        }
    }
    nearest
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityReport {
    pub max_abs: f64,
    pub argmax_theta: f64,
    pub argmax_r: u64,
    pub trivial_bound: f64,
}

/// max over r in [V] and theta of |sum_z e(theta z) nu*(Vz + r)|.
pub fn uniformity_scan(ctx: &WTrickContext, n: usize, v: u64, grid_mult: usize) -> Result<UniformityReport> {
    if v == 0 || grid_mult == 0 {
        return arg("V and grid_mult must be positive");
    }
    let mut rest = BigInt::from(v);
    loop {
        let g = rest.gcd(&ctx.big_w);
        if g.is_one() {
            break;
        }
        rest /= g;
    }
    if !rest.is_one() {
        return arg("every prime factor of V must divide W");
    }
    let star = weight_nu_star(ctx, n)?;
    let vi = v as i64;
    let seqs: Vec<(i64, Vec<f64>)> = (0..vi)
        .map(|r| {
            let zlo = (star.offset() - r).div_euclid(vi)
                + i64::from((star.offset() - r).rem_euclid(vi) != 0);
            let zhi = (star.end() - 1 - r).div_euclid(vi);
            let c: Vec<f64> = (zlo..=zhi).map(|z| star.get(vi * z + r)).collect();
            (zlo, c)
        })
        .collect();
    let g = grid_mult * n.div_ceil(v as usize);
    let eval = |r: usize, theta: f64| -> f64 {
        let (zlo, c) = &seqs[r];
        let mut acc = ZERO;
        for (j, &w) in c.iter().enumerate() {
            acc += e(frac_mul(theta, zlo + j as i64)) * w;
        }
        acc.norm()
    };
    let mut best = (f64::NEG_INFINITY, 0usize, 0.0f64);
    for (r, (_, c)) in seqs.iter().enumerate() {
        let cc: Vec<C64> = c.iter().map(|&w| C64::new(w, 0.0)).collect();
        let spec = dft_positive(&cc, g);
        for (k, s) in spec.iter().enumerate() {
            let val = s.norm();
            if val > best.0 {
                best = (val, r, k as f64 / g as f64);
            }
        }
    }
    let (grid_val, r, theta0) = best;
    let h = 1.0 / g as f64;
    let (t_ref, v_ref) = golden_max(|t| eval(r, t), theta0 - h, theta0 + h, 1e-12);
    let (max_abs, theta) = if v_ref > grid_val { (v_ref, t_ref - t_ref.floor()) } else { (grid_val, theta0) };
    let trivial_bound = seqs[r].1.iter().map(|w| w.abs()).sum();
    Ok(UniformityReport { max_abs, argmax_theta: theta, argmax_r: r as u64, trivial_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub minor_moment: f64,
    pub major_moment: f64,
    pub total_moment: f64,
    pub bound_ratio: f64,
    pub grid: u64,
}

/// Even moments of S(xi) on the default grid of 64 K^d points.
pub fn moment_report(q: &IntPolynomial, k: usize, d: u32, epsilon: f64, s: u32) -> Result<MomentReport> {
    let m = 64u64
        .checked_mul((k as u64).checked_pow(d).ok_or(Error::Overflow)?)
        .ok_or(Error::Overflow)?;
    moment_report_grid(q, k, d, epsilon, s, m as usize)
}

/// Splits (1/M) sum_k |S(k/M)|^{2s} into major- and minor-arc parts.
pub fn moment_report_grid(
    q: &IntPolynomial,
    k: usize,
    d: u32,
    epsilon: f64,
    s: u32,
    m: usize,
) -> Result<MomentReport> {
    if d < 2 || q.degree() < 2 {
        return Err(Error::Degree("moment report needs degree >= 2".into()));
    }
    if s < d + 1 {
        return arg("s must be at least d + 1");
    }
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return arg("epsilon must lie in (0, 1/3)");
    }
    let (_, radius) = arc_parameters(k, d, epsilon);
    if 2.0 * radius * (m as f64) < 8.0 {
        return Err(Error::GridResolution);
    }
    let mut hist = vec![ZERO; m];
    for t in q.values_on(k)? {
        hist[t.rem_euclid(m as i64) as usize] += 1.0;
    }
    let spec = dft_positive(&hist, m);
    let (mut major, mut minor) = (0.0, 0.0);
    for (i, sv) in spec.iter().enumerate() {
        let p = sv.norm().powi(2 * s as i32);
        if classify_arc(i as f64 / m as f64, k, d, epsilon).major {
            major += p;
        } else {
            minor += p;
        }
    }
    let (major, minor) = (major / m as f64, minor / m as f64);
    let total = major + minor;
    let lead = q.leading().to_f64().unwrap_or(f64::INFINITY);
    let kf = k as f64;
    let shape = kf.powi(2 * s as i32) / (lead * kf.powi(d as i32));
    Ok(MomentReport {
        minor_moment: minor,
        major_moment: major,
        total_moment: total,
        bound_ratio: total / shape,
        grid: m as u64,
    })
}
