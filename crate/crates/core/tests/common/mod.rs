#![allow(dead_code)]

use cornerlab::{GridFn, LineFn, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(r: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, TAU * r.gen::<f64>())
}

/// Random complex values in the closed unit disc.
pub fn disc(r: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(r.gen::<f64>().sqrt(), TAU * r.gen::<f64>())
}

pub fn random_grid(n: usize, r: &mut ChaCha8Rng) -> GridFn {
    let v: Vec<C64> = (0..n * n).map(|_| disc(r)).collect();
    GridFn::from_values(n, v).unwrap()
}

pub fn random_unit_grid(n: usize, r: &mut ChaCha8Rng) -> GridFn {
    let v: Vec<C64> = (0..n * n).map(|_| unit(r)).collect();
    GridFn::from_values(n, v).unwrap()
}

pub fn random_indicator(n: usize, p: f64, r: &mut ChaCha8Rng) -> GridFn {
    let v: Vec<C64> = (0..n * n).map(|_| C64::new(if r.gen_bool(p) { 1.0 } else { 0.0 }, 0.0)).collect();
    GridFn::from_values(n, v).unwrap()
}

pub fn random_line(offset: i64, len: usize, r: &mut ChaCha8Rng) -> LineFn {
    LineFn::new(offset, (0..len).map(|_| disc(r)).collect()).unwrap()
}

pub fn e(t: f64) -> C64 {
    let t = t - t.floor();
    C64::from_polar(1.0, TAU * t)
}

pub fn rel(a: C64, b: C64) -> f64 {
    let m = a.norm().max(b.norm());
    if m == 0.0 {
        0.0
    } else {
        (a - b).norm() / m
    }
}

pub fn relf(a: f64, b: f64) -> f64 {
    rel(C64::new(a, 0.0), C64::new(b, 0.0))
}
