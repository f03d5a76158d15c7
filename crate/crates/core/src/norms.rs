//! Fejer kernels, box and Gowers norms, and the inequalities built on them.

use crate::error::{arg, Error, Result};
use crate::fourier::{frac_mul};
use crate::grid::{e, Direction, GridFn, LineFn, C64, ZERO};
use crate::reduce;
use num_integer::Integer;
use rustfft::FftPlanner;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

pub const DEFAULT_BUDGET: f64 = 2e9;

/// mu_H(h) = (1/(2H-1)) (1 - |h|/(2H-1))_+.
pub fn fejer(big_h: i64, h: i64) -> f64 {
    let m = (2 * big_h - 1) as f64;
    let v = 1.0 - h.abs() as f64 / m;
    if v > 0.0 {
        v / m
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FejerKernel {
    pub h: i64,
}

impl FejerKernel {
    /// Builds the kernel after checking sum_h mu_H(h) = 1 in exact integer arithmetic.
    pub fn new(h: i64) -> Result<Self> {
        if h < 1 {
            return arg("H must be at least 1");
        }
        let m = 2 * h as i128 - 1;
        let numer: i128 = (-(m - 1)..=(m - 1)).map(|j| m - j.abs()).sum();
        if numer != m * m {
            return Err(Error::Argument("Fejer normalisation failed".into()));
        }
        Ok(FejerKernel { h })
    }

    pub fn value(&self, h: i64) -> f64 {
        fejer(self.h, h)
    }

    /// Largest |h| with nonzero weight.
    pub fn reach(&self) -> i64 {
        2 * self.h - 2
    }
}

/// One differencing set E = q * v * [+-H].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxFactor {
    pub dir: Direction,
    pub step: i64,
    pub half: i64,
}

impl BoxFactor {
    pub fn new(dir: Direction, step: i64, half: i64) -> Result<Self> {
        if step < 1 || half < 1 {
            return arg("step and half-length must be positive");
        }
        Ok(BoxFactor { dir, step, half })
    }

    /// Number of elements |E| = 2H - 1.
    pub fn card(&self) -> i64 {
        2 * self.half - 1
    }

    fn offset(&self, h: i64) -> (i64, i64) {
        (self.dir.v.0 * self.step * h, self.dir.v.1 * self.step * h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSpec {
    pub factors: Vec<BoxFactor>,
}

impl BoxSpec {
    pub fn new(factors: Vec<BoxFactor>) -> Result<Self> {
        if factors.is_empty() {
            return arg("box spec needs at least one factor");
        }
        Ok(BoxSpec { factors })
    }

    pub fn s(&self) -> usize {
        self.factors.len()
    }

    /// Parses "e1*2:5;e2:3", each factor "(e1|e2|e2-e1)[*step]:halflen".
    pub fn parse(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (lhs, half) = part
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("factor '{part}' lacks ':halflen'")))?;
            let half: i64 = half
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad half-length in '{part}'")))?;
            let (dir, step) = match lhs.split_once('*') {
                Some((d, q)) => (
                    d,
                    q.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad step in '{part}'")))?,
                ),
                None => (lhs, 1),
            };
            factors.push(BoxFactor::new(Direction::parse(dir)?, step, half)?);
        }
        Self::new(factors)
    }
}

impl fmt::Display for BoxSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|b| {
                if b.step == 1 {
                    format!("{}:{}", b.dir.name(), b.half)
                } else {
                    format!("{}*{}:{}", b.dir.name(), b.step, b.half)
                }
            })
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    /// The 2^s-th power, clamped at zero.
    pub value_pow: f64,
    pub s: usize,
    pub value: f64,
    /// Imaginary part of the raw sum.
    pub imag_residue: f64,
    /// Magnitude of a negative real part removed by the clamp.
    pub negative_residue: f64,
}

impl NormResult {
    fn from_raw(raw: C64, s: usize) -> Self {
        let negative_residue = if raw.re < 0.0 { -raw.re } else { 0.0 };
        let value_pow = raw.re.max(0.0);
        NormResult {
            value_pow,
            s,
            value: value_pow.powf(1.0 / (1u64 << s) as f64),
            imag_residue: raw.im,
            negative_residue,
        }
    }
}

fn check_budget(needed: f64, budget: f64) -> Result<()> {
    if needed > budget {
        Err(Error::WorkBudget { needed, budget })
    } else {
        Ok(())
    }
}

/// Delta_u g(x) = g(x) conj g(x + u) on the grid.
pub fn delta_grid(g: &GridFn, u: (i64, i64)) -> GridFn {
    GridFn::from_fn(g.n(), |x, y| {
        let (x, y) = (x as i64, y as i64);
        g.get(x, y) * g.get(x + u.0, y + u.1).conj()
    })
}

fn reaches_outside(n: usize, u: (i64, i64)) -> bool {
    u.0.abs() >= n as i64 || u.1.abs() >= n as i64
}

fn box_rec(g: &GridFn, factors: &[BoxFactor]) -> C64 {
    let Some((fac, rest)) = factors.split_first() else {
        return g.sum();
    };
    let reach = 2 * fac.half - 2;
    let hs: Vec<i64> = (-reach..=reach)
        .filter(|&h| !reaches_outside(g.n(), fac.offset(h)))
        .collect();
    let parts = reduce::map_indexed(hs.len(), |i| {
        let h = hs[i];
        box_rec(&delta_grid(g, fac.offset(h)), rest) * fejer(fac.half, h)
    });
    parts.into_iter().fold(ZERO, |a, b| a + b)
}

fn box_work(n: usize, spec: &BoxSpec) -> f64 {
    spec.factors
        .iter()
        .fold((n * n) as f64, |acc, f| acc * (4 * f.half - 3) as f64)
}

/// Normalised box norm by direct summation over x and h_1, ..., h_s.
pub fn box_norm(f: &GridFn, spec: &BoxSpec, budget: f64) -> Result<NormResult> {
    check_budget(box_work(f.n(), spec), budget)?;
    Ok(NormResult::from_raw(box_rec(f, &spec.factors), spec.s()))
}

/// Raw complex value of the box-norm sum; used by the property checks.
pub fn box_sum(f: &GridFn, factors: &[BoxFactor]) -> C64 {
    box_rec(f, factors)
}

fn is_axis(f: &BoxFactor, axis: usize) -> bool {
    match axis {
        0 => f.dir.v == (1, 0),
        _ => f.dir.v == (0, 1),
    }
}

/// Box norm evaluated with FFT autocorrelations for one e1 and one e2 factor.
pub fn box_norm_fft(f: &GridFn, spec: &BoxSpec, budget: f64) -> Result<NormResult> {
    let i1 = spec.factors.iter().position(|b| is_axis(b, 0));
    let i2 = spec.factors.iter().position(|b| is_axis(b, 1));
    let (Some(i1), Some(i2)) = (i1, i2) else {
        return arg("the FFT path needs one e1 factor and one e2 factor");
    };
    let rest: Vec<BoxFactor> = spec
        .factors
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != i1 && *i != i2)
        .map(|(_, b)| *b)
        .collect();
    let (b1, b2) = (spec.factors[i1], spec.factors[i2]);
    let n = f.n();
    let m = (2 * n).next_power_of_two();
    let outer: f64 = rest.iter().fold(1.0, |acc, b| acc * (4 * b.half - 3) as f64);
    let needed = outer * (n * n) as f64 * (4 * b2.half - 3) as f64 * (m as f64).log2().max(1.0) * 2.0;
    check_budget(needed, budget)?;
    Ok(NormResult::from_raw(fft_rec(f, &rest, b1, b2), spec.s()))
}

fn fft_rec(g: &GridFn, rest: &[BoxFactor], b1: BoxFactor, b2: BoxFactor) -> C64 {
    let Some((fac, tail)) = rest.split_first() else {
        return fft_base(g, b1, b2);
    };
    let reach = 2 * fac.half - 2;
    let hs: Vec<i64> = (-reach..=reach)
        .filter(|&h| !reaches_outside(g.n(), fac.offset(h)))
        .collect();
    let parts = reduce::map_indexed(hs.len(), |i| {
        let h = hs[i];
        fft_rec(&delta_grid(g, fac.offset(h)), tail, b1, b2) * fejer(fac.half, h)
    });
    parts.into_iter().fold(ZERO, |a, b| a + b)
}

/// sum_{h1,h2} mu mu sum_x Delta_{a e1, b e2} g(x), via autocorrelations along e1.
fn fft_base(g: &GridFn, b1: BoxFactor, b2: BoxFactor) -> C64 {
    let n = g.n();
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let reach2 = 2 * b2.half - 2;
    let reach1 = 2 * b1.half - 2;
    let mut total = ZERO;
    for h2 in -reach2..=reach2 {
        let b = b2.step * h2;
        if b.abs() >= n as i64 {
            continue;
        }
        let mut power = vec![0.0f64; m];
        let mut buf = vec![ZERO; m];
        for y in 0..n as i64 {
            if y + b < 0 || y + b >= n as i64 {
                continue;
            }
            for x in 0..m {
                buf[x] = if x < n {
                    g.get(x as i64, y) * g.get(x as i64, y + b).conj()
                } else {
                    ZERO
                };
            }
            fwd.process(&mut buf);
            for (p, v) in power.iter_mut().zip(&buf) {
                *p += v.norm_sqr();
            }
        }
        let mut corr: Vec<C64> = power.iter().map(|&p| C64::new(p, 0.0)).collect();
        inv.process(&mut corr);
        // corr[a] / m = sum_x conj u(x) u(x + a); R(a) is its conjugate.
        let mut inner = ZERO;
        for h1 in -reach1..=reach1 {
            let a = b1.step * h1;
            if a.abs() >= n as i64 {
                continue;
            }
            let r = corr[a.rem_euclid(m as i64) as usize].conj() / m as f64;
            inner += r * fejer(b1.half, h1);
        }
        total += inner * fejer(b2.half, h2);
    }
    total
}

fn unnorm_base_grid(g: &GridFn, v: Direction) -> C64 {
    let (a, b) = v.v;
    let gg = a.abs().gcd(&b.abs());
    let (a0, b0) = (a / gg, b / gg);
    let modulus = (a0 * a0 + b0 * b0) * gg;
    let mut sums: HashMap<(i64, i64), C64> = HashMap::new();
    let n = g.n() as i64;
    for x in 0..n {
        for y in 0..n {
            let val = g.get(x, y);
            if val == ZERO {
                continue;
            }
            let key = (b0 * x - a0 * y, (a0 * x + b0 * y).rem_euclid(modulus));
            *sums.entry(key).or_insert(ZERO) += val;
        }
    }
    let mut keys: Vec<_> = sums.keys().copied().collect();
    keys.sort_unstable();
    let total: f64 = keys.iter().map(|k| sums[k].norm_sqr()).sum();
    C64::new(total, 0.0)
}

fn unnorm_rec_grid(g: &GridFn, dirs: &[Direction]) -> C64 {
    match dirs {
        [] => g.sum(),
        [v] => unnorm_base_grid(g, *v),
        [v, rest @ ..] => {
            let reach = (g.n() as i64 - 1) / v.v.0.abs().max(v.v.1.abs());
            let parts = reduce::map_indexed((2 * reach + 1) as usize, |i| {
                let h = i as i64 - reach;
                unnorm_rec_grid(&delta_grid(g, (v.v.0 * h, v.v.1 * h)), rest)
            });
            parts.into_iter().fold(ZERO, |a, b| a + b)
        }
    }
}

/// Unnormalised box norm: differencing parameters range over all of Z.
pub fn unnormalized_box_norm(f: &GridFn, dirs: &[Direction], budget: f64) -> Result<NormResult> {
    if dirs.is_empty() {
        return arg("need at least one direction");
    }
    let n = f.n() as f64;
    let needed = n * n * (2.0 * n).powi(dirs.len() as i32 - 1);
    check_budget(needed, budget)?;
    Ok(NormResult::from_raw(unnorm_rec_grid(f, dirs), dirs.len()))
}

/// Delta_u g(x) = g(x) conj g(x + u) on the line's own range.
pub fn delta_line(g: &LineFn, u: i64) -> LineFn {
    LineFn::from_fn(g.offset(), g.len(), |x| g.get(x) * g.get(x + u).conj())
}

fn unnorm_rec_line(g: &LineFn, steps: &[i64]) -> C64 {
    match steps {
        [] => g.sum(),
        [q] => {
            let q = q.abs().max(1);
            let mut sums = vec![ZERO; q as usize];
            for (i, &v) in g.values().iter().enumerate() {
                sums[(g.offset() + i as i64).rem_euclid(q) as usize] += v;
            }
            C64::new(sums.iter().map(|s| s.norm_sqr()).sum(), 0.0)
        }
        [q, rest @ ..] => {
            let reach = (g.len() as i64 - 1) / q.abs().max(1);
            let parts = reduce::map_indexed((2 * reach + 1) as usize, |i| {
                let h = i as i64 - reach;
                unnorm_rec_line(&delta_line(g, q * h), rest)
            });
            parts.into_iter().fold(ZERO, |a, b| a + b)
        }
    }
}

/// Unnormalised norm on Z along steps q_1, ..., q_s; all ones gives ||f||_{U^s}^{2^s}.
pub fn unnormalized_line_norm(f: &LineFn, steps: &[i64], budget: f64) -> Result<NormResult> {
    if steps.is_empty() || steps.contains(&0) {
        return arg("steps must be nonzero and nonempty");
    }
    let l = f.len() as f64;
    check_budget(l * (2.0 * l).powi(steps.len() as i32 - 1), budget)?;
    Ok(NormResult::from_raw(unnorm_rec_line(f, steps), steps.len()))
}

fn line_rec(g: &LineFn, factors: &[(i64, i64)]) -> C64 {
    let Some((&(q, big_h), rest)) = factors.split_first() else {
        return g.sum();
    };
    let reach = 2 * big_h - 2;
    let hs: Vec<i64> = (-reach..=reach).filter(|h| (q * h).abs() < g.len() as i64).collect();
    let parts = reduce::map_indexed(hs.len(), |i| {
        let h = hs[i];
        line_rec(&delta_line(g, q * h), rest) * fejer(big_h, h)
    });
    parts.into_iter().fold(ZERO, |a, b| a + b)
}

/// Normalised box norm on Z with factors (step, half-length).
pub fn line_box_norm(f: &LineFn, factors: &[(i64, i64)], budget: f64) -> Result<NormResult> {
    if factors.iter().any(|&(q, h)| q < 1 || h < 1) {
        return arg("steps and half-lengths must be positive");
    }
    let needed = factors.iter().fold(f.len() as f64, |acc, &(_, h)| acc * (4 * h - 3) as f64);
    check_budget(needed, budget)?;
    Ok(NormResult::from_raw(line_rec(f, factors), factors.len()))
}

/// ||f||_{U^s(q [+-H])}.
pub fn gowers_norm_line(f: &LineFn, s: usize, q: i64, big_h: i64, budget: f64) -> Result<NormResult> {
    if s < 1 {
        return arg("s must be at least 1");
    }
    line_box_norm(f, &vec![(q, big_h); s], budget)
}

/// Which part of the box-norm lemma to check.
#[derive(Debug, Clone, PartialEq)]
pub enum Property {
    Inductive,
    Permutation,
    Monotonicity,
    Enlarging { factor: i64 },
    Trimming { kappa: f64 },
    SubProgression { q: i64 },
}

impl Property {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "inductive" => Property::Inductive,
            "permutation" => Property::Permutation,
            "monotonicity" => Property::Monotonicity,
            "enlarging" => Property::Enlarging { factor: 2 },
            "trimming" => Property::Trimming { kappa: 0.5 },
            "subprogression" => Property::SubProgression { q: 2 },
            other => return Err(Error::Parse(format!("unknown property '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Property::Inductive => "inductive",
            Property::Permutation => "permutation",
            Property::Monotonicity => "monotonicity",
            Property::Enlarging { .. } => "enlarging",
            Property::Trimming { .. } => "trimming",
            Property::SubProgression { .. } => "subprogression",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs for the identities; the realised constant for inequalities.
    pub realized: f64,
    pub holds: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

/// |[n]^2 + (-E)| for E = q v [+-H].
pub fn sumset_card(n: usize, fac: &BoxFactor) -> usize {
    let mut pts = std::collections::HashSet::new();
    let reach = fac.half - 1;
    for h in -reach..=reach {
        let (dx, dy) = fac.offset(h);
        for x in 0..n as i64 {
            for y in 0..n as i64 {
                pts.insert((x - dx, y - dy));
            }
        }
    }
    pts.len()
}

/// Evaluates both sides of one property of box norms on `f`.
pub fn check_box_properties(f: &GridFn, spec: &BoxSpec, variant: &Property, budget: f64) -> Result<PropertyReport> {
    let s = spec.s();
    let nd = (f.n() * f.n()) as f64;
    check_budget(box_work(f.n(), spec) * 4.0, budget)?;
    let full = box_norm(f, spec, budget)?.value_pow;
    let report = |lhs: f64, rhs: f64, realized: f64, holds: bool| PropertyReport {
        property: variant.name().into(),
        lhs,
        rhs,
        realized,
        holds,
    };
    match variant {
        Property::Inductive => {
            // expand the last factor first
            let last = *spec.factors.last().unwrap();
            let head = &spec.factors[..s - 1];
            let reach = 2 * last.half - 2;
            let mut rhs = ZERO;
            for h in -reach..=reach {
                if reaches_outside(f.n(), last.offset(h)) {
                    continue;
                }
                rhs += box_sum(&delta_grid(f, last.offset(h)), head) * fejer(last.half, h);
            }
            let err = rel(full, rhs.re);
            Ok(report(full, rhs.re, err, err <= 1e-8))
        }
        Property::Permutation => {
            let mut rev = spec.factors.clone();
            rev.reverse();
            let other = box_sum(f, &rev).re.max(0.0);
            let err = rel(full, other);
            Ok(report(full, other, err, err <= 1e-8))
        }
        Property::Monotonicity => {
            if s < 2 {
                return arg("monotonicity needs s >= 2");
            }
            let sub = box_sum(f, &spec.factors[..s - 1]).re;
            let delta = sub / nd;
            let c = sumset_card(f.n(), spec.factors.last().unwrap()) as f64 / nd;
            let bound = delta * delta * nd / c;
            let holds = delta <= 0.0 || full >= bound * (1.0 - 1e-9);
            let realized = if bound > 0.0 { full / bound } else { f64::INFINITY };
            Ok(report(full, bound, realized, holds))
        }
        Property::Enlarging { factor } => {
            if s < 2 {
                return arg("enlarging needs s >= 2");
            }
            let big: Vec<BoxFactor> = spec
                .factors
                .iter()
                .map(|b| BoxFactor { half: b.half * factor.max(&1), ..*b })
                .collect();
            let big_pow = box_sum(f, &big).re.max(0.0);
            let ratio: f64 = spec
                .factors
                .iter()
                .zip(&big)
                .map(|(a, b)| b.card() as f64 / a.card() as f64)
                .product();
            // ||f||_E^{2^s} <= ratio^2 ||f||_{E'}^{2^s}
            let bound = ratio * ratio * big_pow;
            let realized = if bound > 0.0 { full / bound } else { 0.0 };
            Ok(report(full, bound, realized, full <= bound * (1.0 + 1e-9) + 1e-12))
        }
        Property::Trimming { kappa } => {
            let small: Vec<BoxFactor> = spec
                .factors
                .iter()
                .map(|b| BoxFactor { half: ((b.half as f64 * kappa).round() as i64).max(1), ..*b })
                .collect();
            let trimmed = box_sum(f, &small).re.max(0.0);
            let delta = full / nd;
            let p = (1u64 << s) as f64;
            let shape = delta.powf(p) * (1f64).min(delta.powf(p) / kappa).powi(2 * s as i32) * nd;
            let realized = if shape > 0.0 { trimmed / shape } else { f64::INFINITY };
            Ok(report(trimmed, shape, realized, delta <= 0.0 || trimmed > 0.0))
        }
        Property::SubProgression { q } => {
            let sub: Vec<BoxFactor> = spec
                .factors
                .iter()
                .map(|b| BoxFactor { step: b.step * q, half: (b.half / q).max(1), ..*b })
                .collect();
            let value = box_sum(f, &sub).re.max(0.0);
            let delta = full / nd;
            let shape = delta * nd;
            let realized = if shape > 0.0 { value / shape } else { f64::INFINITY };
            Ok(report(value, shape, realized, delta <= 0.0 || value > 0.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VdcReport {
    pub lhs: f64,
    pub rhs1: f64,
    pub rhs2: f64,
    pub rhs2_imag: f64,
    pub hypothesis: bool,
    pub holds: bool,
}

/// Van der Corput: |E f| >= delta and H <= delta^2 N / 4 imply both
/// conclusions are at least delta^2 / 4.
pub fn van_der_corput_check(f: &LineFn, n: usize, big_h: i64, delta: f64) -> Result<VdcReport> {
    if n == 0 || big_h < 1 {
        return arg("N and H must be positive");
    }
    let nf = n as f64;
    let mean = (0..n as i64).fold(ZERO, |a, x| a + f.get(x)) / nf;
    let lhs = mean.norm();
    let hypothesis = lhs >= delta && (big_h as f64) <= delta * delta * nf / 4.0;
    let card = (2 * big_h - 1) as f64;
    let mut rhs1 = 0.0;
    for x in 0..n as i64 {
        let s = (-(big_h - 1)..big_h).fold(ZERO, |a, h| a + f.get(x + h));
        rhs1 += s.norm_sqr() / (card * card);
    }
    rhs1 /= nf;
    let reach = 2 * big_h - 2;
    let mut rhs2 = ZERO;
    for h in -reach..=reach {
        let c = (0..n as i64).fold(ZERO, |a, x| a + f.get(x) * f.get(x + h).conj());
        rhs2 += c * fejer(big_h, h);
    }
    rhs2 /= nf;
    let target = delta * delta / 4.0;
    let holds = !hypothesis || (rhs1 >= target && rhs2.re >= target);
    Ok(VdcReport { lhs, rhs1, rhs2: rhs2.re, rhs2_imag: rhs2.im, hypothesis, holds })
}

/// F(x) = E_{z in Z} f(x, z), given by its slices f(., z).
#[derive(Debug, Clone)]
pub struct DualForm {
    pub slices: Vec<GridFn>,
}

impl DualForm {
    pub fn new(slices: Vec<GridFn>) -> Result<Self> {
        if slices.is_empty() {
            return arg("dual form needs at least one slice");
        }
        let n = slices[0].n();
        if slices.iter().any(|g| g.n() != n) {
            return arg("slices must share a grid");
        }
        Ok(DualForm { slices })
    }

    pub fn average(&self) -> GridFn {
        let n = self.slices[0].n();
        let z = self.slices.len() as f64;
        let mut acc = vec![ZERO; n * n];
        for g in &self.slices {
            for (a, b) in acc.iter_mut().zip(g.values()) {
                *a += b;
            }
        }
        GridFn::from_values(n, acc.into_iter().map(|v| v / z).collect()).expect("square")
    }

    /// F^{h_1..h_r} = E_z Delta_{h_1, ..., h_r} f(., z).
    pub fn differenced(&self, shifts: &[(i64, i64)]) -> GridFn {
        let diffed: Vec<GridFn> = self
            .slices
            .iter()
            .map(|g| shifts.iter().fold(g.clone(), |acc, &u| delta_grid(&acc, u)))
            .collect();
        DualForm { slices: diffed }.average()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualDifferenceReport {
    pub lhs_pow: f64,
    pub rhs: f64,
    pub delta: f64,
    /// rhs / (delta^{2^r} N^2).
    pub realized: f64,
    /// For r = 1, the Cauchy-Schwarz bound rhs >= lhs^2 / |supp - E_1|.
    pub explicit_bound: Option<f64>,
    pub holds: bool,
}

fn dd_rec(form: &DualForm, spec: &BoxSpec, r: usize, shifts: &mut Vec<(i64, i64)>, out: &mut C64, weight: f64) {
    let depth = shifts.len();
    if depth == r {
        let g = form.differenced(shifts);
        *out += box_sum(&g, &spec.factors[r..]) * weight;
        return;
    }
    let fac = spec.factors[depth];
    let reach = 2 * fac.half - 2;
    let n = form.slices[0].n();
    for h in -reach..=reach {
        if reaches_outside(n, fac.offset(h)) {
            continue;
        }
        shifts.push(fac.offset(h));
        dd_rec(form, spec, r, shifts, out, weight * fejer(fac.half, h));
        shifts.pop();
    }
}

/// Dual-difference interchange: moves the first r differencings inside the z-average.
pub fn dual_difference_check(form: &DualForm, spec: &BoxSpec, r: usize, budget: f64) -> Result<DualDifferenceReport> {
    let s = spec.s();
    if r < 1 || r > s {
        return arg("need 1 <= r <= s");
    }
    let n = form.slices[0].n();
    let zc = form.slices.len() as f64;
    check_budget(box_work(n, spec) * (1.0 + zc), budget)?;
    let f = form.average();
    let lhs_pow = box_sum(&f, &spec.factors).re.max(0.0);
    let nd = (n * n) as f64;
    let delta = lhs_pow / nd;
    let mut acc = ZERO;
    dd_rec(form, spec, r, &mut Vec::new(), &mut acc, 1.0);
    let rhs = acc.re;
    let shape = delta.powi(1 << r) * nd;
    let realized = if shape > 0.0 { rhs / shape } else { f64::INFINITY };
    let explicit_bound = (r == 1).then(|| {
        let support = sumset_card(n, &spec.factors[0]) as f64;
        lhs_pow * lhs_pow / support
    });
    let mut holds = lhs_pow <= 0.0 || rhs > 0.0;
    if let Some(b) = explicit_bound {
        holds &= rhs >= b * (1.0 - 1e-9) - 1e-12;
    }
    Ok(DualDifferenceReport { lhs_pow, rhs, delta, realized, explicit_bound, holds })
}

/// sum_x f(x) e(theta x) for a line function, exact in the phase.
pub fn line_phase_sum(f: &LineFn, theta: f64) -> C64 {
    f.values()
        .iter()
        .enumerate()
        .fold(ZERO, |a, (i, &v)| a + v * e(frac_mul(theta, f.offset() + i as i64)))
}
