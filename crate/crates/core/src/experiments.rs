//! Experiment harnesses: point sets, exact corner counts, supersaturation,
//! the Lambda^W versus Lambda^Model study, smoothed weights and Sarkozy checks.

use crate::circle::uniformity_scan;
use crate::counting::{poly_k, rel_err};
use crate::error::{arg, Error, Result};
use crate::fourier::{cross_correlation, frac_mul};
use crate::grid::{e, Direction, GridFn, LineFn, C64, ZERO};
use crate::io::{parse_input, Input};
use crate::poly::{gcd_coprimality_check, smoothness_norm, v_trick_poly, IntPolynomial, RealPolynomial, WTrickContext};
use crate::reduce;
use crate::weights::{tilde_k, weight_nu, weight_nu_star_k, Weight};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;

/// A subset of [n]^2, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet2D {
    n: usize,
    points: Vec<(usize, usize)>,
}

impl PointSet2D {
    pub fn new(n: usize, mut points: Vec<(usize, usize)>) -> Result<Self> {
        if points.iter().any(|&(x, y)| x >= n || y >= n) {
            return arg("point outside [n]^2");
        }
        points.sort_unstable();
        let len = points.len();
        points.dedup();
        if points.len() != len {
            return arg("duplicate points");
        }
        Ok(PointSet2D { n, points })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn density(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.points.len() as f64 / (self.n * self.n) as f64
        }
    }

    pub fn indicator(&self) -> GridFn {
        GridFn::indicator(self.n, &self.points).expect("points validated")
    }

    pub fn bits(&self) -> BitGrid {
        BitGrid::from_points(self.n, &self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Random { density: f64 },
    DiagonalFree,
    File(std::path::PathBuf),
}

/// Builds a point set; `seed` only matters for the random kind.
pub fn generate_set(kind: &SetKind, n: usize, seed: u64) -> Result<PointSet2D> {
    match kind {
        SetKind::Random { density } => {
            if !(*density > 0.0 && *density <= 1.0) {
                return arg("density must lie in (0, 1]");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    if rng.gen_bool(*density) {
                        pts.push((x, y));
                    }
                }
            }
            PointSet2D::new(n, pts)
        }
        SetKind::DiagonalFree => {
            let s = greedy_ap_free(3 * n.max(1) - 2);
            let mut member = vec![false; 3 * n.max(1)];
            for v in s {
                member[v] = true;
            }
            let mut pts = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    if member[x + 2 * y] {
                        pts.push((x, y));
                    }
                }
            }
            PointSet2D::new(n, pts)
        }
        SetKind::File(path) => load_set(path),
    }
}

pub fn load_set(path: &Path) -> Result<PointSet2D> {
    let text = std::fs::read_to_string(path)?;
    match parse_input(&text)? {
        Input::Set { n, points } => PointSet2D::new(n, points),
        _ => Err(Error::Parse("expected a set2d document".into())),
    }
}

/// First-fit subset of [0, m] without three-term progressions.
pub fn greedy_ap_free(m: usize) -> Vec<usize> {
    let mut member = vec![false; m + 1];
    let mut s = Vec::new();
    for c in 0..=m {
        let blocked = s.iter().any(|&b: &usize| 2 * b >= c && member[2 * b - c] && 2 * b - c != b);
        if !blocked {
            member[c] = true;
            s.push(c);
        }
    }
    s
}

/// Rows indexed by x, bits indexed by y.
#[derive(Debug, Clone)]
pub struct BitGrid {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitGrid {
    pub fn from_points(n: usize, points: &[(usize, usize)]) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut data = vec![0u64; n * words];
        for &(x, y) in points {
            data[x * words + y / 64] |= 1u64 << (y % 64);
        }
        BitGrid { n, words, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn row(&self, x: usize) -> &[u64] {
        &self.data[x * self.words..(x + 1) * self.words]
    }

    /// Word i of the row shifted so bit y holds A(x, y + t), for t >= 0.
    #[inline]
    fn shifted_down(row: &[u64], t: usize, i: usize) -> u64 {
        let (q, r) = (t / 64, t % 64);
        let lo = row.get(i + q).copied().unwrap_or(0);
        if r == 0 {
            return lo;
        }
        let hi = row.get(i + q + 1).copied().unwrap_or(0);
        (lo >> r) | (hi << (64 - r))
    }

    /// Word i of the row shifted so bit y holds A(x, y - t), for t >= 0.
    #[inline]
    fn shifted_up(row: &[u64], t: usize, i: usize) -> u64 {
        let (q, r) = (t / 64, t % 64);
        if i < q {
            return 0;
        }
        let hi = row[i - q];
        if r == 0 {
            return hi;
        }
        let lo = if i > q { row[i - q - 1] } else { 0 };
        (hi << r) | (lo >> (64 - r))
    }

    /// C(t) = #{(x, y) : A(x,y), A(x+t,y), A(x,y+t)}.
    pub fn corner_slice(&self, t: i64) -> u64 {
        let n = self.n as i64;
        if t.abs() >= n {
            return 0;
        }
        let mut total = 0u64;
        let xs = if t >= 0 { 0..n - t } else { -t..n };
        for x in xs {
            let r0 = self.row(x as usize);
            let r1 = self.row((x + t) as usize);
            for i in 0..self.words {
                let s = if t >= 0 {
                    Self::shifted_down(r0, t as usize, i)
                } else {
                    Self::shifted_up(r0, (-t) as usize, i)
                };
                total += (r0[i] & r1[i] & s).count_ones() as u64;
            }
        }
        total
    }

    /// C(t) for t in [0, len).
    pub fn corner_slices(&self, len: usize) -> Vec<u64> {
        reduce::map_indexed(len, |t| self.corner_slice(t as i64))
    }
}

/// Side-length rule for count_corners.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// z in [N].
    Linear,
    /// P(z) for z in [K], K = floor((N / lead)^{1/d}).
    Poly(IntPolynomial),
}

/// Exact number of configurations (x,y), (x+s,y), (x,y+s) in A over the admissible sides s.
pub fn count_corners(a: &PointSet2D, shape: &Shape, nontrivial_only: bool) -> Result<u64> {
    let sides: Vec<i64> = match shape {
        Shape::Linear => (0..a.n() as i64).collect(),
        Shape::Poly(p) => {
            if p.degree() < 1 {
                return Err(Error::Degree("P must be nonconstant".into()));
            }
            p.values_on(poly_k(p, a.n())?)?
        }
    };
    let bits = a.bits();
    let per = reduce::map_indexed(sides.len(), |i| {
        let s = sides[i];
        if nontrivial_only && s == 0 {
            0
        } else {
            bits.corner_slice(s)
        }
    });
    Ok(per.into_iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsampleRow {
    pub d: usize,
    pub cells: usize,
    pub coverage_sum: u64,
    pub coverage_ok: bool,
    pub good: usize,
    /// (delta / 9) n^2.
    pub good_bound: f64,
    pub cells_with_corner: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsampleReport {
    pub m: usize,
    pub density: f64,
    pub good_pairs: usize,
    pub coverage_check: bool,
    pub cells_with_corner: usize,
    pub corner_lower_bound: u64,
    pub rows: Vec<SubsampleRow>,
}

/// Cells lambda(d, u) = A cap (u + d [M]^2) for 1 <= d <= n / (3M), u in [-d(M-1), n-1]^2.
pub fn varnavides_subsample(a: &PointSet2D, m: usize) -> Result<SubsampleReport> {
    let n = a.n();
    if m == 0 || 3 * m > n {
        return arg("need 1 <= M <= n/3");
    }
    if m > 64 {
        return arg("M above 64 is not supported");
    }
    let density = a.density();
    let grid = a.indicator();
    let size = a.len() as u64;
    let dmax = n / (3 * m);
    let threshold = density / 2.0 * (m * m) as f64;
    let rows = reduce::map_indexed(dmax, |i| {
        let d = i + 1;
        let span = d * (m - 1);
        let side = n + span;
        let at = |x: i64, y: i64| -> u32 { u32::from(grid.get(x, y).re != 0.0) };
        // row pass: r(u1, y) = sum_i A(u1 + d i, y)
        let mut rsum = vec![0u32; side * n];
        for u1 in 0..side {
            let x0 = u1 as i64 - span as i64;
            for y in 0..n {
                rsum[u1 * n + y] = (0..m).map(|k| at(x0 + (d * k) as i64, y as i64)).sum();
            }
        }
        let mut coverage_sum = 0u64;
        let mut good = 0usize;
        let mut with_corner = 0usize;
        for u1 in 0..side {
            for u2 in 0..side {
                let y0 = u2 as i64 - span as i64;
                let c: u32 = (0..m)
                    .map(|k| {
                        let y = y0 + (d * k) as i64;
                        if (0..n as i64).contains(&y) {
                            rsum[u1 * n + y as usize]
                        } else {
                            0
                        }
                    })
                    .sum();
                coverage_sum += c as u64;
                if c as f64 >= threshold {
                    good += 1;
                    let x0 = u1 as i64 - span as i64;
                    if cell_has_corner(&grid, x0, y0, d, m) {
                        with_corner += 1;
                    }
                }
            }
        }
        SubsampleRow {
            d,
            cells: side * side,
            coverage_sum,
            coverage_ok: coverage_sum == (m * m) as u64 * size,
            good,
            good_bound: density / 9.0 * (n * n) as f64,
            cells_with_corner: with_corner,
        }
    });
    let good_pairs = rows.iter().map(|r| r.good).sum();
    let cells_with_corner: usize = rows.iter().map(|r| r.cells_with_corner).sum();
    let m3 = (m * m * m) as u64;
    Ok(SubsampleReport {
        m,
        density,
        good_pairs,
        coverage_check: rows.iter().all(|r| r.coverage_ok),
        cells_with_corner,
        corner_lower_bound: (cells_with_corner as u64).div_ceil(m3),
        rows,
    })
}

fn cell_has_corner(grid: &GridFn, x0: i64, y0: i64, d: usize, m: usize) -> bool {
    let rows: Vec<u64> = (0..m)
        .map(|i| {
            (0..m).fold(0u64, |acc, j| {
                let v = grid.get(x0 + (d * i) as i64, y0 + (d * j) as i64);
                if v.re != 0.0 {
                    acc | (1u64 << j)
                } else {
                    acc
                }
            })
        })
        .collect();
    for s in 1..m {
        for i in 0..m - s {
            if rows[i] & rows[i + s] & (rows[i] >> s) != 0 {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub w: u64,
    pub density: f64,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub lambda_w: f64,
    pub lambda_model: f64,
    pub lambda_star: f64,
    pub lambda_star_slices: f64,
    pub agreement: f64,
    pub star_over_n2: f64,
    pub uniformity_max: f64,
}

/// Lambda^W, Lambda^Model and Lambda* on random indicator sets, via the exact slice counts C(t).
pub fn compare_study(ctx: &WTrickContext, n: usize, densities: &[f64], seeds: &[u64]) -> Result<Vec<CompareRow>> {
    let k = tilde_k(ctx, n)?;
    let values = ctx.p_tilde.values_on(k)?;
    let d = ctx.degree() as u32;
    let nu = weight_nu(n, d);
    let star = weight_nu_star_k(ctx, n, k)?;
    let uniformity = uniformity_scan(ctx, n, 1, 4)?.max_abs;
    let w = ctx.big_w.to_u64().unwrap_or(u64::MAX);
    let nf = n as f64;
    let mut rows = Vec::new();
    for &density in densities {
        for &seed in seeds {
            let set = generate_set(&SetKind::Random { density }, n, seed)?;
            let bits = set.bits();
            let c = bits.corner_slices(n);
            let slice = |t: i64| -> f64 {
                if (0..n as i64).contains(&t) {
                    c[t as usize] as f64
                } else {
                    bits.corner_slice(t) as f64
                }
            };
            let lw = values.iter().map(|&t| slice(t)).sum::<f64>() / k as f64;
            let lm = weighted_slices(&nu, &slice) / nf;
            let ls = weighted_slices(&star, &slice) / nf;
            let direct = lw - lm;
            rows.push(CompareRow {
                w,
                density,
                seed,
                n,
                k,
                lambda_w: lw,
                lambda_model: lm,
                lambda_star: direct,
                lambda_star_slices: ls,
                agreement: rel_err(C64::new(direct, 0.0), C64::new(ls, 0.0)),
                star_over_n2: direct.abs() / (nf * nf),
                uniformity_max: uniformity,
            });
        }
    }
    Ok(rows)
}

fn weighted_slices(w: &Weight, slice: &dyn Fn(i64) -> f64) -> f64 {
    w.support().iter().map(|&(t, v)| v * slice(t)).sum()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let l = values.len();
    if l == 0 {
        f64::NAN
    } else if l % 2 == 1 {
        values[l / 2]
    } else {
        (values[l / 2 - 1] + values[l / 2]) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothReport {
    pub n: usize,
    pub d: u32,
    pub epsilon: f64,
    pub l1_distance: f64,
    /// l1_distance / (epsilon^{1/d} N).
    pub ratio: f64,
    pub lipschitz: f64,
    /// lipschitz * epsilon^3 * N.
    pub lipschitz_constant: f64,
    /// nu_eps = nu on [2 eps N, (1 - eps) N - 1].
    pub interior_equal: bool,
}

/// Cut-off profile: 0 outside [eps N, N-1], 1 on [2 eps N, (1-eps) N - 1], linear between.
pub fn cutoff(n: usize, epsilon: f64, z: f64) -> f64 {
    let nf = n as f64;
    let (a, b) = (epsilon * nf, 2.0 * epsilon * nf);
    let (c, dd) = ((1.0 - epsilon) * nf - 1.0, nf - 1.0);
    if z <= a || z >= dd {
        0.0
    } else if z < b {
        (z - a) / (b - a)
    } else if z <= c {
        1.0
    } else {
        (dd - z) / (dd - c)
    }
}

pub fn smoothed_weight(n: usize, d: u32, epsilon: f64) -> Result<(Weight, SmoothReport)> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return arg("epsilon must lie in (0, 1/4)");
    }
    if d < 1 || n == 0 {
        return arg("need d >= 1 and N >= 1");
    }
    let nu = weight_nu(n, d);
    let values: Vec<f64> = (0..n).map(|z| nu.values()[z] * cutoff(n, epsilon, z as f64)).collect();
    let l1: f64 = values.iter().zip(nu.values()).map(|(a, b)| (a - b).abs()).sum();
    let lipschitz = values.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let nf = n as f64;
    let lo = (2.0 * epsilon * nf).ceil() as usize;
    let hi = ((1.0 - epsilon) * nf - 1.0).floor() as usize;
    let interior_equal = (lo..=hi.min(n - 1)).all(|z| values[z] == nu.values()[z]);
    let report = SmoothReport {
        n,
        d,
        epsilon,
        l1_distance: l1,
        ratio: l1 / (epsilon.powf(1.0 / d as f64) * nf),
        lipschitz,
        lipschitz_constant: lipschitz * epsilon.powi(3) * nf,
        interior_equal,
    };
    Ok((Weight::new(n, 0, values), report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearScore {
    pub q: i64,
    /// min over the N' grid of sum_x |E_{z in [N']} f1(x + q v z)| / N^D.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SarkozyReport {
    pub k: usize,
    pub poly_correlation: f64,
    /// poly_correlation / N^D.
    pub delta: f64,
    pub path_agreement_error: f64,
    pub best_q: i64,
    pub best_linear: f64,
    pub n_primes: Vec<usize>,
    pub scores: Vec<LinearScore>,
    /// best_linear / delta.
    pub realized_constant: f64,
    pub holds: bool,
}

fn progression_grid(k: usize, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [k, 2 * k, 4 * k].iter().map(|&x| x.clamp(1, n.max(1))).collect();
    v.dedup();
    v
}

fn finish_sarkozy(
    k: usize,
    poly: C64,
    check: C64,
    nd: f64,
    n_primes: Vec<usize>,
    scores: Vec<LinearScore>,
) -> SarkozyReport {
    let best = scores
        .iter()
        .fold(None::<&LinearScore>, |b, s| match b {
            Some(b) if b.score >= s.score => Some(b),
            _ => Some(s),
        })
        .expect("nonempty q range");
    let delta = poly.norm() / nd;
    SarkozyReport {
        k,
        poly_correlation: poly.norm(),
        delta,
        path_agreement_error: rel_err(poly, check),
        best_q: best.q,
        best_linear: best.score,
        n_primes,
        realized_constant: if delta > 0.0 { best.score / delta } else { f64::INFINITY },
        holds: delta <= 0.0 || best.score > 0.0,
        scores,
    }
}

/// Two-point polynomial correlation on the line, with a search over linear progressions.
pub fn sarkozy_check_line(f0: &LineFn, f1: &LineFn, q: &IntPolynomial, n: usize, q_max: i64) -> Result<SarkozyReport> {
    if q.degree() < 2 {
        return Err(Error::Degree("Q must have degree at least 2".into()));
    }
    if q_max < 1 {
        return arg("q_max must be positive");
    }
    let k = poly_k(q, n)?;
    let shifts = q.values_on(k)?;
    let corr = cross_correlation(f0.values(), f1.values());
    let la = f0.len() as i64;
    let lag = |t: i64| -> C64 {
        let idx = t + f0.offset() - f1.offset() + la - 1;
        if idx < 0 || idx >= corr.len() as i64 {
            ZERO
        } else {
            corr[idx as usize]
        }
    };
    let poly = shifts.iter().fold(ZERO, |a, &t| a + lag(t)) / k as f64;
    let direct = shifts
        .iter()
        .fold(ZERO, |a, &t| a + f0.values().iter().enumerate().fold(ZERO, |b, (i, &v)| b + v * f1.get(f0.offset() + i as i64 + t)))
        / k as f64;
    let n_primes = progression_grid(k, n);
    let nf = n as f64;
    let scores = (1..=q_max)
        .map(|qq| {
            let score = n_primes
                .iter()
                .map(|&np| {
                    let mut acc = 0.0;
                    for x in -(n as i64) + 1..n as i64 {
                        let s = (0..np as i64).fold(ZERO, |a, z| a + f1.get(x + qq * z));
                        acc += s.norm() / np as f64;
                    }
                    acc / nf
                })
                .fold(f64::INFINITY, f64::min);
            LinearScore { q: qq, score }
        })
        .collect();
    Ok(finish_sarkozy(k, poly, direct, nf, n_primes, scores))
}

/// Grid version along a direction v.
pub fn sarkozy_check_grid(
    f0: &GridFn,
    f1: &GridFn,
    q: &IntPolynomial,
    v: Direction,
    n: usize,
    q_max: i64,
) -> Result<SarkozyReport> {
    if q.degree() < 2 {
        return Err(Error::Degree("Q must have degree at least 2".into()));
    }
    if q_max < 1 {
        return arg("q_max must be positive");
    }
    let k = poly_k(q, n)?;
    let shifts = q.values_on(k)?;
    let g = f0.n() as i64;
    let per = reduce::map_indexed(shifts.len(), |i| {
        let t = shifts[i];
        let mut acc = ZERO;
        for x in 0..g {
            for y in 0..g {
                let a = f0.get(x, y);
                if a != ZERO {
                    acc += a * f1.get(x + v.v.0 * t, y + v.v.1 * t);
                }
            }
        }
        acc
    });
    let poly = per.iter().fold(ZERO, |a, &b| a + b) / k as f64;
    // second path: group by line x - t v
    let mut hist = std::collections::BTreeMap::new();
    for &t in &shifts {
        *hist.entry(t).or_insert(0u64) += 1;
    }
    let check = hist.iter().fold(ZERO, |a, (&t, &c)| {
        let shifted = GridFn::from_fn(f0.n(), |x, y| f1.get(x as i64 + v.v.0 * t, y as i64 + v.v.1 * t));
        a + crate::counting::inner_sum(f0, &shifted) * c as f64
    }) / k as f64;
    let n_primes = progression_grid(k, n);
    let nd = (n * n) as f64;
    let scores = (1..=q_max)
        .map(|qq| {
            let score = n_primes
                .iter()
                .map(|&np| {
                    let rows = reduce::map_indexed((2 * g - 1) as usize, |i| {
                        let x = i as i64 - g + 1;
                        let mut acc = 0.0;
                        for y in -g + 1..g {
                            let s = (0..np as i64)
                                .fold(ZERO, |a, z| a + f1.get(x + qq * v.v.0 * z, y + qq * v.v.1 * z));
                            acc += s.norm() / np as f64;
                        }
                        acc
                    });
                    rows.iter().sum::<f64>() / nd
                })
                .fold(f64::INFINITY, f64::min);
            LinearScore { q: qq, score }
        })
        .collect();
    Ok(finish_sarkozy(k, poly, check, nd, n_primes, scores))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionReport {
    /// ||R o P~_{[r,V]}||_{C^infty[(T / V_d)^{1/d}]}.
    pub q_norm: f64,
    pub r_norm: f64,
    pub ratio: Option<f64>,
    pub scale: f64,
    pub v_d: String,
    pub v_is_power_of_w: bool,
    pub r_in_range: bool,
    pub prime_factors_in_w: bool,
}

pub fn fraction_comparison_report(
    rpoly: &RealPolynomial,
    ctx: &WTrickContext,
    v: i64,
    r: i64,
    t: f64,
) -> Result<FractionReport> {
    if v < 1 || t <= 0.0 {
        return arg("need V >= 1 and T > 0");
    }
    let r_in_range = (0..v).contains(&r);
    let tricked = v_trick_poly(&ctx.p_tilde, r.rem_euclid(v), v)?;
    let v_d = tricked.leading();
    let d = ctx.degree() as f64;
    let scale = (t / v_d.to_f64().unwrap_or(f64::INFINITY)).powf(1.0 / d);
    let composed = rpoly.compose_int(&tricked);
    let q_norm = smoothness_norm(&composed, scale)?;
    let r_norm = smoothness_norm(rpoly, t)?;
    let mut vv = BigInt::from(v);
    while !vv.is_one() && (&vv % &ctx.big_w).is_zero() && !ctx.big_w.is_one() {
        vv /= &ctx.big_w;
    }
    let v_is_power_of_w = vv.is_one();
    let prime_factors_in_w = gcd_coprimality_check(ctx, v, r.rem_euclid(v))?.reason.is_none();
    Ok(FractionReport {
        q_norm,
        r_norm,
        ratio: (q_norm > 0.0).then(|| r_norm / q_norm),
        scale,
        v_d: v_d.to_string(),
        v_is_power_of_w,
        r_in_range,
        prime_factors_in_w,
    })
}

/// Pure phase e(theta x) on [n].
pub fn phase_line(n: usize, theta: f64) -> LineFn {
    LineFn::from_fn(0, n, |x| e(frac_mul(theta, x)))
}

/// Seeded random +-1 line function on [n].
pub fn random_sign_line(n: usize, seed: u64) -> LineFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..n).map(|_| C64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)).collect();
    LineFn::new(0, v).expect("bounded")
}

/// Seeded random +-1 grid function on [n]^2.
pub fn random_sign_grid(n: usize, seed: u64) -> GridFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..n * n).map(|_| C64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)).collect();
    GridFn::from_values(n, v).expect("bounded")
}

/// Seeded random unimodular grid function.
pub fn random_phase_grid(n: usize, seed: u64) -> GridFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<C64> = (0..n * n).map(|_| e(rng.gen::<f64>())).collect();
    GridFn::from_values(n, v).expect("bounded")
}
