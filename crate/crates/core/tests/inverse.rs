mod common;

use common::*;
use cornerlab::experiments::{random_sign_grid, random_sign_line};
use cornerlab::inverse::*;
use cornerlab::norms::unnormalized_box_norm;
use cornerlab::{Direction, GridFn, LineFn, PhaseFn, C64};
use rand::Rng;

fn circ(a: f64, b: f64) -> f64 {
    let t = a - b;
    (t - t.round()).abs()
}

#[test]
fn u1_examples() {
    let n = 64;
    let w = u1_witness_line(&LineFn::interval(n), n, n as i64).unwrap();
    assert!((w.correlation - n as f64).abs() < 1e-12);
    assert!(w.direction_ok);
    assert!(w.payload.is_one_bounded());

    let f = LineFn::from_fn(0, n, |x| e(x as f64 / n as f64));
    let w = u1_witness_line(&f, n, n as i64).unwrap();
    assert!(w.correlation < 1e-9);
    assert!(w.direction_ok);

    for seed in 0..50 {
        let f = random_sign_line(256, seed);
        let w = u1_witness_line(&f, 256, 1024).unwrap();
        assert!(w.direction_ok, "{w:?}");
        assert!((w.correlation - f.sum().norm()).abs() < 1e-9);
    }
}

#[test]
fn u2_recovers_pure_phases() {
    let n = 64;
    let m = 4 * n;
    let f = LineFn::from_fn(0, n, |x| e(3.0 * x as f64 / 64.0));
    let w = u2_witness_line(&f, m).unwrap();
    let Payload::Phase { a, .. } = w.payload else { panic!() };
    assert!(circ(-a, 3.0 / 64.0) <= 1.0 / (2.0 * m as f64) + 1e-8);
    assert!((w.correlation - 64.0).abs() < 1e-8);
    assert!(w.direction_ok);

    let mut r = rng(60);
    for _ in 0..50 {
        let th: f64 = r.gen();
        let len = r.gen_range(8..200);
        let f = LineFn::from_fn(0, len, |x| e(th * x as f64));
        let w = u2_witness_line(&f, 4 * len).unwrap();
        let Payload::Phase { a, .. } = w.payload else { panic!() };
        assert!(circ(-a, th) <= 1.0 / (8.0 * len as f64) + 1e-8);
        assert!((w.correlation - len as f64).abs() < 1e-6 * len as f64);
    }

    let d = LineFn::new(0, vec![C64::new(1.0, 0.0)]).unwrap();
    let w = u2_witness_line(&d, 4).unwrap();
    assert!((w.correlation - 1.0).abs() < 1e-12);
}

#[test]
fn u2_correlation_is_the_spectral_peak() {
    let mut r = rng(61);
    for _ in 0..20 {
        let f = random_line(0, 40, &mut r);
        let w = u2_witness_line(&f, 160).unwrap();
        let Payload::Phase { a, b } = w.payload else { panic!() };
        let direct: C64 = (0..40i64).map(|x| f.get(x) * e(a * x as f64 + b)).sum();
        assert!((direct.re - w.correlation).abs() < 1e-9);
        assert!(direct.im.abs() < 1e-9);
        // the refined peak dominates every grid point
        let dense = (0..160).map(|k| {
            let th = k as f64 / 160.0;
            (0..40i64).map(|x| f.get(x) * e(th * x as f64)).sum::<C64>().norm()
        });
        let best = dense.fold(0.0, f64::max);
        assert!(w.correlation >= best * (1.0 - 1e-9));
        // U^2 upper bound chain: ||f||_U2^4 <= ||f||_2^2 ||f^||_inf^2
        assert!(w.norm_pow <= f.l2_sq() * w.correlation.powi(2) * (1.0 + 1e-9));
        assert!(w.direction_ok);
    }
}

#[test]
fn u1xu1_rank_one() {
    let n = 24;
    let mut r = rng(62);
    let gx: Vec<C64> = (0..n).map(|_| unit(&mut r)).collect();
    let hy: Vec<C64> = (0..n).map(|_| unit(&mut r)).collect();
    let f = GridFn::from_fn(n, |x, y| gx[x] * hy[y]);
    let w = u1xu1_witness(&f, Direction::e1(), Direction::e2()).unwrap();
    assert!(relf(w.correlation, (n * n) as f64) < 1e-12);
    assert!(w.direction_ok);
    assert!(w.payload.is_one_bounded());
    let Payload::Product { b1, b2 } = &w.payload else { panic!() };
    let c = product_correlation(&f, Direction::e1(), Direction::e2(), b1, b2).unwrap();
    assert!(relf(c.re, w.correlation) < 1e-12 && c.im.abs() < 1e-9);
}

#[test]
fn u1xu1_random_and_structured() {
    let basis = [
        (Direction::e1(), Direction::e2()),
        (Direction::e1(), Direction::e2_minus_e1()),
        (Direction::new(1, 1).unwrap(), Direction::e2()),
    ];
    for seed in 0..10 {
        let f = random_sign_grid(32, seed);
        for &(v1, v2) in &basis {
            let w = u1xu1_witness(&f, v1, v2).unwrap();
            assert!(w.direction_ok, "{w:?}");
            assert!(w.payload.is_one_bounded());
            let un = unnormalized_box_norm(&f, &[v1, v2], 1e12).unwrap().value_pow;
            assert!(relf(un, w.norm_pow) < 1e-9);
            let Payload::Product { b1, b2 } = &w.payload else { panic!() };
            let c = product_correlation(&f, v1, v2, b1, b2).unwrap();
            assert!(relf(c.re, w.correlation) < 1e-9);
            assert!(w.correlation <= (32 * 32) as f64);
        }
    }
    let n = 64;
    let f = GridFn::from_fn(n, |x, y| e((x * y) as f64 / n as f64));
    let w = u1xu1_witness(&f, Direction::e1(), Direction::e2()).unwrap();
    assert!(w.direction_ok);
    assert!(w.norm_pow <= (n * n * n) as f64 * 1.0001);
    assert!(w.correlation <= 2.0 * n as f64);
}

#[test]
fn u1xu1_modulation_invariant() {
    let mut r = rng(63);
    let f = random_grid(20, &mut r);
    let (al, be) = (r.gen::<f64>(), r.gen::<f64>());
    let g = GridFn::from_fn(20, |x, y| f.at(x, y) * e(al * x as f64 + be * y as f64));
    for (v1, v2) in [(Direction::e1(), Direction::e2()), (Direction::e1(), Direction::e2_minus_e1())] {
        let a = u1xu1_witness(&f, v1, v2).unwrap();
        let b = u1xu1_witness(&g, v1, v2).unwrap();
        assert!(relf(a.correlation, b.correlation) < 1e-9);
        assert!(relf(a.norm_pow, b.norm_pow) < 1e-9);
    }
}

#[test]
fn u1xu1_rejects_non_basis() {
    let f = GridFn::ones(4);
    let r = u1xu1_witness(&f, Direction::new(1, 1).unwrap(), Direction::new(1, -1).unwrap());
    assert!(matches!(r, Err(cornerlab::Error::NotABasis)));
}

#[test]
fn u2xu1_constructed_rows() {
    let n = 32;
    let q = |y: usize| (y % 3) as f64 / 7.0;
    let f = GridFn::from_fn(n, |x, y| e(q(y) * x as f64));
    let w = u2xu1_witness(&f, 3, 1e12).unwrap();
    let m = 4 * n;
    let Payload::Modulated { a, z0, g, .. } = &w.payload else { panic!() };
    let good = (0..n).filter(|&y| circ(a.get(y as i64), q(*z0) - q(y)) <= 1.0 / (2.0 * m as f64) + 1e-8).count();
    assert!(good as f64 >= 0.9 * n as f64);
    assert!(w.correlation >= 0.9 * (n * n) as f64);
    assert!(w.direction_ok);
    assert!(g.is_one_bounded());

    let one = GridFn::ones(16);
    let w = u2xu1_witness(&one, 2, 1e12).unwrap();
    let Payload::Modulated { a, .. } = &w.payload else { panic!() };
    assert!(a.phases().iter().all(|&t| circ(t, 0.0) < 1e-8));
    assert!(relf(w.correlation, 256.0) < 1e-9);
}

#[test]
fn u2xu1_random_signs() {
    for seed in 0..10 {
        let f = random_sign_grid(32, seed);
        let w = u2xu1_witness(&f, 3, 1e12).unwrap();
        assert!(w.direction_ok, "{w:?}");
        let Payload::Modulated { g, a, b, .. } = &w.payload else { panic!() };
        let c = modulated_correlation(&f, g, a, b);
        assert!((c.re - w.correlation).abs() < 1e-9 * w.correlation.max(1.0));
    }
    assert!(u2xu1_witness(&GridFn::ones(8), 0, 1e12).is_err());
}

#[test]
fn popular_phases() {
    let n = 600;
    let alpha = 0.3141;
    let a = PhaseFn::constant(n, alpha);
    for vp in [1usize, 2, 5] {
        let classes = popular_phase_detect(&a, vp, 1e-9).unwrap();
        assert_eq!(classes.len(), vp);
        for c in classes {
            assert_eq!(c.hit_fraction, 1.0);
            assert!(circ(c.alpha, vp as f64 * alpha) < 1e-12);
        }
    }

    let mut r = rng(64);
    let tol = 0.02;
    let noisy = PhaseFn::new((0..n).map(|_| (alpha + r.gen_range(-tol / 4.0..tol / 4.0)).rem_euclid(1.0)).collect()).unwrap();
    for c in popular_phase_detect(&noisy, 1, tol).unwrap() {
        assert!(c.hit_fraction >= 0.95);
    }

    let uniform = PhaseFn::new((0..n).map(|_| r.gen()).collect()).unwrap();
    for c in popular_phase_detect(&uniform, 3, 0.01).unwrap() {
        assert!(c.hit_fraction < 0.1, "{c:?}");
    }
    assert!(popular_phase_detect(&uniform, 0, 0.01).is_err());
}

#[test]
fn kind_parse() {
    for (s, k) in [("u1", WitnessKind::U1), ("u2", WitnessKind::U2), ("u1xu1", WitnessKind::U1xU1), ("u2xu1", WitnessKind::U2xU1)] {
        assert_eq!(WitnessKind::parse(s).unwrap(), k);
    }
    assert!(WitnessKind::parse("u3").is_err());
}
