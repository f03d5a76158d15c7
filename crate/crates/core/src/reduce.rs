//! Deterministic parallel reductions.
//!
//! Work is split into fixed-size blocks that do not depend on the number of
//! threads; partial results are collected in block order and summed serially,
//! so results are bit-identical for any thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::Range;

pub const BLOCK: usize = 64;

fn blocks(len: usize, block: usize) -> Vec<Range<usize>> {
    let block = block.max(1);
    (0..len.div_ceil(block))
        .map(|b| b * block..((b + 1) * block).min(len))
        .collect()
}

pub fn sum_c64<F>(len: usize, block: usize, f: F) -> Complex64
where
    F: Fn(Range<usize>) -> Complex64 + Sync,
{
    let parts: Vec<Complex64> = blocks(len, block).into_par_iter().map(&f).collect();
    parts.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

pub fn sum_f64<F>(len: usize, block: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync,
{
    let parts: Vec<f64> = blocks(len, block).into_par_iter().map(&f).collect();
    parts.into_iter().fold(0.0, |a, b| a + b)
}

/// Evaluates `f` at every index in parallel, preserving order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..len).into_par_iter().map(&f).collect()
}
