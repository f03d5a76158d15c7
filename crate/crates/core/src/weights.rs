//! The weights nu, nu~ and nu* = nu~ - nu.

use crate::error::{Error, Result};
use crate::poly::WTrickContext;

/// A real weight on the integers, stored on `offset .. offset + values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    n: usize,
    offset: i64,
    values: Vec<f64>,
}

impl Weight {
    pub fn new(n: usize, offset: i64, values: Vec<f64>) -> Self {
        Weight { n, offset, values }
    }

    /// The scale N the weight was built for.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    #[inline]
    pub fn get(&self, z: i64) -> f64 {
        let i = z - self.offset;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Nonzero entries as (z, weight) pairs in increasing z.
    pub fn support(&self) -> Vec<(i64, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, w)| (self.offset + i as i64, *w))
            .collect()
    }

    /// Pointwise difference on the union of the two ranges.
    pub fn minus(&self, other: &Weight) -> Weight {
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let values = (lo..hi).map(|z| self.get(z) - other.get(z)).collect();
        Weight { n: self.n, offset: lo, values }
    }
}

/// nu(z) = d^{-1} (N / (z + 1))^{(d-1)/d} on [N].
pub fn weight_nu(n: usize, d: u32) -> Weight {
    let expo = (d as f64 - 1.0) / d as f64;
    let values = (0..n)
        .map(|z| (n as f64 / (z as f64 + 1.0)).powf(expo) / d as f64)
        .collect();
    Weight { n, offset: 0, values }
}

/// K = floor((N / W_d)^{1/d}), failing when it is zero.
pub fn tilde_k(ctx: &WTrickContext, n: usize) -> Result<usize> {
    let k = ctx.k_for(n as u64);
    if k == 0 {
        Err(Error::NTooSmall)
    } else {
        Ok(k)
    }
}

/// nu~ = (N/K) * multiset indicator of P~([K]).
pub fn weight_nu_tilde(ctx: &WTrickContext, n: usize) -> Result<Weight> {
    let k = tilde_k(ctx, n)?;
    weight_nu_tilde_k(ctx, n, k)
}

/// nu~ with an explicit K.
pub fn weight_nu_tilde_k(ctx: &WTrickContext, n: usize, k: usize) -> Result<Weight> {
    if k == 0 {
        return Err(Error::NTooSmall);
    }
    let image = ctx.p_tilde.values_on(k)?;
    let lo = image.iter().copied().min().unwrap().min(0);
    let hi = image.iter().copied().max().unwrap().saturating_add(1).max(n as i64);
    let mut counts = vec![0u64; (hi - lo) as usize];
    for t in image {
        counts[(t - lo) as usize] += 1;
    }
    let scale = n as f64 / k as f64;
    let values = counts.into_iter().map(|c| c as f64 * scale).collect();
    Ok(Weight { n, offset: lo, values })
}

/// nu* = nu~ - nu.
pub fn weight_nu_star(ctx: &WTrickContext, n: usize) -> Result<Weight> {
    let k = tilde_k(ctx, n)?;
    weight_nu_star_k(ctx, n, k)
}

pub fn weight_nu_star_k(ctx: &WTrickContext, n: usize, k: usize) -> Result<Weight> {
    let tilde = weight_nu_tilde_k(ctx, n, k)?;
    Ok(tilde.minus(&weight_nu(n, ctx.degree() as u32)))
}
