//! Functions on [N] and [N]^2 with zero extension, and the V-trick.

use crate::error::{arg, Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// e(theta) = exp(2 pi i theta), reduced mod 1 before the exponential.
#[inline]
pub fn e(theta: f64) -> C64 {
    let t = theta - theta.floor();
    C64::from_polar(1.0, TAU * t)
}

/// Distance from `t` to the nearest integer.
#[inline]
pub fn dist_z(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// Complex function on Z^2 supported on [n]^2, stored densely with
/// index `x * n + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    n: usize,
    values: Vec<C64>,
    extent: (usize, usize),
    one_bounded: bool,
}

impl GridFn {
    pub fn zeros(n: usize) -> Self {
        GridFn { n, values: vec![ZERO; n * n], extent: (n, n), one_bounded: true }
    }

    pub fn ones(n: usize) -> Self {
        GridFn { n, values: vec![ONE; n * n], extent: (n, n), one_bounded: true }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                values.push(f(x, y));
            }
        }
        Self::from_values(n, values).expect("length matches")
    }

    pub fn from_values(n: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != n * n {
            return arg(format!("grid of size {n} needs {} values, got {}", n * n, values.len()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return arg("grid values must be finite");
        }
        let one_bounded = values.iter().all(|v| v.norm() <= 1.0 + 1e-12);
        Ok(GridFn { n, values, extent: (n, n), one_bounded })
    }

    pub fn indicator(n: usize, points: &[(usize, usize)]) -> Result<Self> {
        let mut g = GridFn::zeros(n);
        for &(x, y) in points {
            if x >= n || y >= n {
                return arg(format!("point ({x},{y}) outside [{n}]^2"));
            }
            g.values[x * n + y] = ONE;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// True extents (x, y) of the support; differs from (n, n) after a
    /// non-square V-trick.
    pub fn extent(&self) -> (usize, usize) {
        self.extent
    }

    pub fn is_one_bounded(&self) -> bool {
        self.one_bounded
    }

    #[inline]
    pub fn get(&self, x: i64, y: i64) -> C64 {
        let n = self.n as i64;
        if x < 0 || y < 0 || x >= n || y >= n {
            ZERO
        } else {
            self.values[(x * n + y) as usize]
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> C64 {
        self.values[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[C64] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    pub fn set(&mut self, x: usize, y: usize, v: C64) {
        self.values[x * self.n + y] = v;
        if v.norm() > 1.0 + 1e-12 {
            self.one_bounded = false;
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> GridFn {
        let values: Vec<C64> = self.values.iter().map(|&v| f(v)).collect();
        let one_bounded = values.iter().all(|v| v.norm() <= 1.0 + 1e-12);
        GridFn { n: self.n, values, extent: self.extent, one_bounded }
    }

    pub fn conj(&self) -> GridFn {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: C64) -> GridFn {
        self.map(|v| v * c)
    }

    /// Pointwise linear combination `a*self + b*other` on the larger grid.
    pub fn lin_comb(&self, a: C64, other: &GridFn, b: C64) -> GridFn {
        let n = self.n.max(other.n);
        GridFn::from_fn(n, |x, y| {
            a * self.get(x as i64, y as i64) + b * other.get(x as i64, y as i64)
        })
    }

    /// Copy onto a larger (or smaller) square grid with zero extension.
    pub fn resized(&self, n: usize) -> GridFn {
        GridFn::from_fn(n, |x, y| self.get(x as i64, y as i64))
    }

    pub fn sum(&self) -> C64 {
        self.values.iter().fold(ZERO, |a, &b| a + b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, b| a.max(b.norm()))
    }

    pub fn l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Complex function on Z supported on `offset .. offset + len`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFn {
    offset: i64,
    values: Vec<C64>,
}

impl LineFn {
    pub fn new(offset: i64, values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return arg("line function needs at least one value");
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return arg("line values must be finite");
        }
        Ok(LineFn { offset, values })
    }

    pub fn from_fn(offset: i64, len: usize, f: impl Fn(i64) -> C64) -> Self {
        let values = (0..len as i64).map(|i| f(offset + i)).collect();
        LineFn { offset, values }
    }

    /// The indicator of [N] = {0, ..., N-1}.
    pub fn interval(n: usize) -> Self {
        LineFn { offset: 0, values: vec![ONE; n.max(1)] }
    }

    /// A zero function on the symmetric range [-N+1, N-1].
    pub fn symmetric(n: usize) -> Self {
        LineFn { offset: 1 - n as i64, values: vec![ZERO; 2 * n.max(1) - 1] }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: i64) -> C64 {
        let i = x - self.offset;
        if i < 0 || i >= self.values.len() as i64 {
            ZERO
        } else {
            self.values[i as usize]
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> LineFn {
        LineFn { offset: self.offset, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn conj(&self) -> LineFn {
        self.map(|v| v.conj())
    }

    pub fn sum(&self) -> C64 {
        self.values.iter().fold(ZERO, |a, &b| a + b)
    }

    pub fn l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn is_one_bounded(&self) -> bool {
        self.values.iter().all(|v| v.norm() <= 1.0 + 1e-12)
    }
}

/// Phase function a : [n] -> R/Z, stored as representatives in [0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFn {
    phases: Vec<f64>,
}

impl PhaseFn {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.iter().any(|p| !p.is_finite()) {
            return arg("phases must be finite");
        }
        Ok(PhaseFn { phases: phases.into_iter().map(wrap01).collect() })
    }

    pub fn constant(n: usize, alpha: f64) -> Self {
        PhaseFn { phases: vec![wrap01(alpha); n] }
    }

    pub fn n(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Out-of-range reads return the zero phase.
    #[inline]
    pub fn get(&self, y: i64) -> f64 {
        if y < 0 || y >= self.phases.len() as i64 {
            0.0
        } else {
            self.phases[y as usize]
        }
    }
}

/// Representative of `t` in [0, 1).
pub fn wrap01(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A nonzero integer direction in Z^2 with coordinates bounded by 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    pub v: (i64, i64),
}

impl Direction {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a == 0 && b == 0 {
            return arg("direction must be nonzero");
        }
        if a.abs() > 8 || b.abs() > 8 {
            return arg("direction coordinates must have magnitude at most 8");
        }
        Ok(Direction { v: (a, b) })
    }

    pub fn e1() -> Self {
        Direction { v: (1, 0) }
    }

    pub fn e2() -> Self {
        Direction { v: (0, 1) }
    }

    pub fn e2_minus_e1() -> Self {
        Direction { v: (-1, 1) }
    }

    pub fn name(&self) -> String {
        match self.v {
            (1, 0) => "e1".into(),
            (0, 1) => "e2".into(),
            (-1, 1) => "e2-e1".into(),
            (a, b) => format!("({a},{b})"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "e1" => Ok(Self::e1()),
            "e2" => Ok(Self::e2()),
            "e2-e1" => Ok(Self::e2_minus_e1()),
            other => {
                let inner = other
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("unknown direction '{other}'")))?;
                let mut it = inner.split(',').map(|t| t.trim().parse::<i64>());
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(a)), Some(Ok(b)), None) => Self::new(a, b),
                    _ => Err(Error::Parse(format!("unknown direction '{other}'"))),
                }
            }
        }
    }
}

/// g(x, y) = f(Vx + r1, Vy + r2).
pub fn v_trick_grid(f: &GridFn, r1: i64, r2: i64, v: i64) -> Result<GridFn> {
    if v <= 0 {
        return arg("V must be positive");
    }
    if !(0..v).contains(&r1) || !(0..v).contains(&r2) {
        return arg("residues must lie in [0, V)");
    }
    let n = f.n as i64;
    let ex = ((n - r1).max(0) + v - 1) / v;
    let ey = ((n - r2).max(0) + v - 1) / v;
    let m = ex.max(ey).max(1) as usize;
    let mut g = GridFn::from_fn(m, |x, y| f.get(v * x as i64 + r1, v * y as i64 + r2));
    g.extent = (ex as usize, ey as usize);
    g.one_bounded = f.one_bounded;
    Ok(g)
}

/// g(x) = f(Vx + r), on the smallest interval containing the preimage of the support.
pub fn v_trick_line(f: &LineFn, r: i64, v: i64) -> Result<LineFn> {
    if v <= 0 {
        return arg("V must be positive");
    }
    if !(0..v).contains(&r) {
        return arg("residue must lie in [0, V)");
    }
    let lo = (f.offset - r).div_euclid(v) + i64::from((f.offset - r).rem_euclid(v) != 0);
    let hi = (f.end() - 1 - r).div_euclid(v);
    if hi < lo {
        return Ok(LineFn { offset: 0, values: vec![ZERO] });
    }
    Ok(LineFn::from_fn(lo, (hi - lo + 1) as usize, |x| f.get(v * x + r)))
}

/// g(x, y) = f(x + dx, y + dy) on the same grid, zero extended.
pub fn shift_grid(f: &GridFn, dx: i64, dy: i64) -> GridFn {
    let mut g = GridFn::from_fn(f.n, |x, y| f.get(x as i64 + dx, y as i64 + dy));
    g.extent = f.extent;
    g
}
