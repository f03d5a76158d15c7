//! Constructive witnesses for the U^1, U^2, U^1 x U^1 and U^2 x U^1 inverse theorems.

use crate::error::{arg, Error, Result};
use crate::fourier::{dft_line, fourier_at, frac_mul, golden_max};
use crate::grid::{dist_z, e, wrap01, Direction, GridFn, LineFn, PhaseFn, C64, ZERO};
use crate::norms::{box_norm_fft, unnormalized_box_norm, unnormalized_line_norm, BoxFactor, BoxSpec};
use crate::reduce;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    U1,
    U2,
    U1xU1,
    U2xU1,
}

impl WitnessKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "u1" => WitnessKind::U1,
            "u2" => WitnessKind::U2,
            "u1xu1" => WitnessKind::U1xU1,
            "u2xu1" => WitnessKind::U2xU1,
            other => return Err(Error::Parse(format!("unknown witness kind '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Unimodular constant c with c * sum f = |sum f|.
    Constant(C64),
    /// e(a x + b).
    Phase { a: f64, b: f64 },
    /// b1(m) b2(n) in the coordinates x = v1 m + v2 n.
    Product { b1: LineFn, b2: LineFn },
    /// g(x) e(a(y) x + b(y)).
    Modulated { g: LineFn, a: PhaseFn, b: PhaseFn, z0: usize },
}

impl Payload {
    pub fn is_one_bounded(&self) -> bool {
        match self {
            Payload::Constant(c) => c.norm() <= 1.0 + 1e-12,
            Payload::Phase { .. } => true,
            Payload::Product { b1, b2 } => b1.is_one_bounded() && b2.is_one_bounded(),
            Payload::Modulated { g, .. } => g.is_one_bounded(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub payload: Payload,
    /// Achieved sum of f against the structured function.
    pub correlation: f64,
    pub norm_pow: f64,
    /// Whether the hypotheses of the inverse statement hold for this input.
    pub hypothesis: bool,
    /// Explicit lower bound implied by the norm, when one is checked.
    pub bound: f64,
    pub direction_ok: bool,
    pub realized_constant: f64,
}

/// U^1 witness on the line: correlation |sum f| against the Fejer norm at scale N'.
pub fn u1_witness_line(f: &LineFn, n: usize, n_prime: i64) -> Result<Witness> {
    if n == 0 || n_prime < 1 {
        return arg("N and N' must be positive");
    }
    let total = f.sum();
    let correlation = total.norm();
    let constant = if correlation > 0.0 { total.conj() / correlation } else { C64::new(1.0, 0.0) };
    let mut norm = ZERO;
    let vals = f.values();
    for (i, &a) in vals.iter().enumerate() {
        for (j, &b) in vals.iter().enumerate() {
            norm += a * b.conj() * crate::norms::fejer(n_prime, j as i64 - i as i64);
        }
    }
    let norm_pow = norm.re.max(0.0);
    let nf = n as f64;
    let delta = (norm_pow / nf).min(1.0);
    let hypothesis = delta > 0.0
        && n_prime as f64 >= nf / delta.sqrt()
        && nf >= 1.0 / delta.sqrt()
        && f.offset() >= 0
        && f.end() <= n as i64;
    let bound = delta.powf(0.25) * nf / 8.0;
    let realized = if delta > 0.0 { correlation / (delta.powf(0.25) * nf) } else { f64::INFINITY };
    Ok(Witness {
        kind: WitnessKind::U1,
        payload: Payload::Constant(constant),
        correlation,
        norm_pow,
        hypothesis,
        bound,
        direction_ok: !hypothesis || correlation >= bound,
        realized_constant: realized,
    })
}

/// Maximises |f^(theta)| on the grid k/M, then refines by golden section.
/// Returns (theta, f^(theta)).
pub fn peak_frequency(f: &LineFn, m: usize) -> Result<(f64, C64)> {
    let spec = dft_line(f, m)?;
    let (k, _) = spec
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (k, v)| if v.norm() > best.1 { (k, v.norm()) } else { best });
    Ok(refine(f, k as f64 / m as f64, m))
}

fn refine(f: &LineFn, theta0: f64, m: usize) -> (f64, C64) {
    let h = 1.0 / m as f64;
    let at0 = fourier_at(f, theta0);
    let (t, _) = golden_max(|t| fourier_at(f, t).norm(), theta0 - h, theta0 + h, GOLDEN_TOL);
    let at = fourier_at(f, t);
    if at.norm() >= at0.norm() {
        (wrap01(t), at)
    } else {
        (theta0, at0)
    }
}

/// b with value * e(b) = |value|.
fn aligning_phase(value: C64) -> f64 {
    if value.norm() == 0.0 {
        0.0
    } else {
        wrap01(-value.arg() / (2.0 * PI))
    }
}

/// U^2 witness on the line: the phase e(a x + b) maximising sum f(x) e(a x + b).
pub fn u2_witness_line(f: &LineFn, m: usize) -> Result<Witness> {
    let (a, value) = peak_frequency(f, m)?;
    let b = aligning_phase(value);
    let correlation = f
        .values()
        .iter()
        .enumerate()
        .fold(ZERO, |acc, (i, &v)| acc + v * e(wrap01(frac_mul(a, f.offset() + i as i64) + b)))
        .re;
    let norm_pow = unnormalized_line_norm(f, &[1, 1], f64::INFINITY)?.value_pow;
    let l2 = f.l2_sq();
    // ||f||_{U^2}^4 <= ||f||_2^2 ||f^||_inf^2
    let realized = if norm_pow > 0.0 { correlation * correlation * l2 / norm_pow } else { f64::INFINITY };
    let bound = if l2 > 0.0 { (norm_pow / l2).sqrt() } else { 0.0 };
    Ok(Witness {
        kind: WitnessKind::U2,
        payload: Payload::Phase { a, b },
        correlation,
        norm_pow,
        hypothesis: norm_pow > 0.0,
        bound,
        direction_ok: norm_pow <= 0.0 || realized >= 0.5,
        realized_constant: realized,
    })
}

/// Grid values in the coordinates (m, n) with x = v1 m + v2 n.
struct Basis {
    m0: i64,
    n0: i64,
    mlen: usize,
    nlen: usize,
    values: Vec<C64>,
}

impl Basis {
    fn new(f: &GridFn, v1: Direction, v2: Direction) -> Result<Self> {
        let (a, c) = v1.v;
        let (b, d) = v2.v;
        let det = a * d - b * c;
        if det.abs() != 1 {
            return Err(Error::NotABasis);
        }
        let n = f.n() as i64;
        let to_mn = |x: i64, y: i64| ((d * x - b * y) * det, (-c * x + a * y) * det);
        let corners = [(0, 0), (n - 1, 0), (0, n - 1), (n - 1, n - 1)].map(|(x, y)| to_mn(x, y));
        let m0 = corners.iter().map(|p| p.0).min().unwrap();
        let m1 = corners.iter().map(|p| p.0).max().unwrap();
        let n0 = corners.iter().map(|p| p.1).min().unwrap();
        let n1 = corners.iter().map(|p| p.1).max().unwrap();
        let (mlen, nlen) = ((m1 - m0 + 1) as usize, (n1 - n0 + 1) as usize);
        let mut values = vec![ZERO; mlen * nlen];
        for x in 0..n {
            for y in 0..n {
                let (m, k) = to_mn(x, y);
                values[(m - m0) as usize * nlen + (k - n0) as usize] = f.get(x, y);
            }
        }
        Ok(Basis { m0, n0, mlen, nlen, values })
    }

    #[inline]
    fn at(&self, m: usize, n: usize) -> C64 {
        self.values[m * self.nlen + n]
    }
}

/// U^1 x U^1 witness along a basis (v1, v2), following the pigeonhole in n'.
pub fn u1xu1_witness(f: &GridFn, v1: Direction, v2: Direction) -> Result<Witness> {
    let g = Basis::new(f, v1, v2)?;
    let (ml, nl) = (g.mlen, g.nlen);
    // c(n, n') = sum_m g(m, n) conj g(m, n')
    let rows = reduce::map_indexed(nl, |np| {
        (0..nl)
            .map(|n| (0..ml).fold(ZERO, |acc, m| acc + g.at(m, n) * g.at(m, np).conj()))
            .collect::<Vec<C64>>()
    });
    let scores: Vec<f64> = rows.iter().map(|r| r.iter().map(|c| c.norm_sqr()).sum()).collect();
    let norm_pow: f64 = scores.iter().sum();
    let (best, &a_best) = scores
        .iter()
        .enumerate()
        .fold((0, &-1.0), |acc, (i, s)| if *s > *acc.1 { (i, s) } else { acc });
    let support = (0..ml).filter(|&m| g.at(m, best) != ZERO).count().max(1) as f64;
    let b1 = LineFn::new(g.m0, (0..ml).map(|m| g.at(m, best).conj()).collect())?;
    let b2 = LineFn::new(g.n0, rows[best].iter().map(|c| c.conj() / support).collect())?;
    let correlation = a_best.max(0.0) / support;
    let n_range = scores.iter().filter(|&&s| s > 0.0).count().max(1) as f64;
    let bound = norm_pow / (n_range * support);
    let n2 = (f.n() * f.n()) as f64;
    let realized = if correlation > 0.0 { norm_pow / (n2 * correlation) } else { 0.0 };
    Ok(Witness {
        kind: WitnessKind::U1xU1,
        payload: Payload::Product { b1, b2 },
        correlation,
        norm_pow,
        hypothesis: norm_pow > 0.0,
        bound,
        direction_ok: correlation >= bound * (1.0 - 1e-9),
        realized_constant: realized,
    })
}

/// Evaluates sum_{m,n} f(v1 m + v2 n) b1(m) b2(n).
pub fn product_correlation(f: &GridFn, v1: Direction, v2: Direction, b1: &LineFn, b2: &LineFn) -> Result<C64> {
    let g = Basis::new(f, v1, v2)?;
    let mut acc = ZERO;
    for m in 0..g.mlen {
        for n in 0..g.nlen {
            acc += g.at(m, n) * b1.get(g.m0 + m as i64) * b2.get(g.n0 + n as i64);
        }
    }
    Ok(acc)
}

/// Unnormalised ||f||^4 along (v1, v2), computed by the norms module.
pub fn u1xu1_norm(f: &GridFn, v1: Direction, v2: Direction, budget: f64) -> Result<f64> {
    Ok(unnormalized_box_norm(f, &[v1, v2], budget)?.value_pow)
}

/// U^2 x U^1 witness for the box e1[+-H], e1[+-H], e2[+-H].
pub fn u2xu1_witness(f: &GridFn, big_h: i64, budget: f64) -> Result<Witness> {
    let n = f.n();
    if big_h < 1 {
        return arg("H must be positive");
    }
    let spec = BoxSpec::new(vec![
        BoxFactor::new(Direction::e1(), 1, big_h)?,
        BoxFactor::new(Direction::e1(), 1, big_h)?,
        BoxFactor::new(Direction::e2(), 1, big_h)?,
    ])?;
    let norm_pow = box_norm_fft(f, &spec, budget)?.value_pow;
    let m = 4 * n.max(1);
    let work = (n * n) as f64 * m as f64 * (m as f64).log2().max(1.0);
    if work > budget {
        return Err(Error::WorkBudget { needed: work, budget });
    }
    let row = |y: usize, z: usize| -> LineFn {
        LineFn::from_fn(0, n, |x| f.get(x, y as i64) * f.get(x, z as i64).conj())
    };
    // grid maxima of |r^| for every pair (y, z), z-major
    let peaks: Vec<Vec<(usize, f64)>> = reduce::map_indexed(n, |z| {
        let mut planner = FftPlanner::<f64>::new();
        let plan = planner.plan_fft_inverse(m);
        let mut buf = vec![ZERO; m];
        (0..n)
            .map(|y| {
                buf.iter_mut().for_each(|v| *v = ZERO);
                for x in 0..n {
                    buf[x] = f.get(x as i64, y as i64) * f.get(x as i64, z as i64).conj();
                }
                plan.process(&mut buf);
                buf.iter()
                    .enumerate()
                    .fold((0, -1.0), |best, (k, v)| if v.norm() > best.1 { (k, v.norm()) } else { best })
            })
            .collect()
    });
    let totals: Vec<f64> = peaks.iter().map(|p| p.iter().map(|&(_, v)| v).sum()).collect();
    let z0 = totals
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (z, &t)| if t > best.1 { (z, t) } else { best })
        .0;
    let refined = reduce::map_indexed(n, |y| {
        let r = row(y, z0);
        let (a, v) = refine(&r, peaks[z0][y].0 as f64 / m as f64, m);
        (a, aligning_phase(v))
    });
    let a = PhaseFn::new(refined.iter().map(|p| p.0).collect())?;
    let b = PhaseFn::new(refined.iter().map(|p| p.1).collect())?;
    let g = LineFn::from_fn(0, n, |x| f.get(x, z0 as i64).conj());
    let correlation = modulated_correlation(f, &g, &a, &b).re;
    let h3 = ((2 * big_h - 1) as f64).powi(3);
    let bound = 0.5 * norm_pow * h3 / (n as f64).powi(3);
    let n2 = (n * n) as f64;
    let delta = norm_pow / n2;
    let realized = if delta > 0.0 { correlation / (delta * n2) } else { f64::INFINITY };
    Ok(Witness {
        kind: WitnessKind::U2xU1,
        payload: Payload::Modulated { g, a, b, z0 },
        correlation,
        norm_pow,
        hypothesis: norm_pow > 0.0,
        bound,
        direction_ok: correlation >= bound * (1.0 - 1e-9),
        realized_constant: realized,
    })
}

/// sum_{x,y} f(x,y) g(x) e(a(y) x + b(y)).
pub fn modulated_correlation(f: &GridFn, g: &LineFn, a: &PhaseFn, b: &PhaseFn) -> C64 {
    let n = f.n();
    let parts = reduce::map_indexed(n, |y| {
        let (ay, by) = (a.get(y as i64), b.get(y as i64));
        (0..n).fold(ZERO, |acc, x| {
            acc + f.at(x, y) * g.get(x as i64) * e(wrap01(frac_mul(ay, x as i64) + by))
        })
    });
    parts.into_iter().fold(ZERO, |s, v| s + v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseClass {
    pub j: usize,
    pub alpha: f64,
    pub hit_fraction: f64,
    pub samples: usize,
}

/// For each residue class j mod V', the circular median of V' a(V' y + j) and
/// the fraction of samples within `tol` of it.
pub fn popular_phase_detect(a: &PhaseFn, v_prime: usize, tol: f64) -> Result<Vec<PhaseClass>> {
    if v_prime == 0 {
        return arg("V' must be positive");
    }
    let n = a.n();
    Ok(reduce::map_indexed(v_prime, |j| {
        let samples: Vec<f64> = (j..n)
            .step_by(v_prime)
            .map(|y| wrap01(frac_mul(a.phases()[y], v_prime as i64)))
            .collect();
        if samples.is_empty() {
            return PhaseClass { j, alpha: 0.0, hit_fraction: 0.0, samples: 0 };
        }
        let mut best = (f64::INFINITY, 0.0);
        for &c in &samples {
            let cost: f64 = samples.iter().map(|&s| dist_z(s - c)).sum();
            if cost < best.0 {
                best = (cost, c);
            }
        }
        let alpha = best.1;
        let hits = samples.iter().filter(|&&s| dist_z(s - alpha) <= tol).count();
        PhaseClass { j, alpha, hit_fraction: hits as f64 / samples.len() as f64, samples: samples.len() }
    }))
}
