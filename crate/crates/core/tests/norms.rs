mod common;

use common::*;
use cornerlab::counting::dual_d0;
use cornerlab::fourier::dft_line;
use cornerlab::norms::*;
use cornerlab::poly::build_w_trick;
use cornerlab::{Direction, GridFn, IntPolynomial, LineFn, C64};
use proptest::prelude::*;
use rand::Rng;

const BUDGET: f64 = 1e12;

fn mu(big_h: i64, h: i64) -> f64 {
    let c = (2 * big_h - 1) as f64;
    (1.0 - h.abs() as f64 / c).max(0.0) / c
}

/// sum_x sum_{h_1..h_s} prod mu(h_i) prod_{w in {0,1}^s} C^{|w|} f(x + sum w_i u_i).
fn brute_box(f: &GridFn, factors: &[(Direction, i64, i64)]) -> C64 {
    let s = factors.len();
    let n = f.n() as i64;
    let ranges: Vec<Vec<i64>> = factors.iter().map(|&(_, _, h)| (-(2 * h - 2)..=2 * h - 2).collect()).collect();
    let mut idx = vec![0usize; s];
    let mut total = C64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        let mut us = Vec::with_capacity(s);
        for i in 0..s {
            let (dir, q, big_h) = factors[i];
            let h = ranges[i][idx[i]];
            w *= mu(big_h, h);
            us.push((dir.v.0 * q * h, dir.v.1 * q * h));
        }
        if w != 0.0 {
            for x in 0..n {
                for y in 0..n {
                    let mut p = C64::new(1.0, 0.0);
                    for mask in 0..(1u32 << s) {
                        let (mut a, mut b) = (x, y);
                        for (i, u) in us.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                a += u.0;
                                b += u.1;
                            }
                        }
                        let v = f.get(a, b);
                        p *= if mask.count_ones() % 2 == 1 { v.conj() } else { v };
                    }
                    total += p * w;
                }
            }
        }
        let mut i = 0;
        loop {
            if i == s {
                return total;
            }
            idx[i] += 1;
            if idx[i] < ranges[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn spec(fs: &[(Direction, i64, i64)]) -> BoxSpec {
    BoxSpec::new(fs.iter().map(|&(d, q, h)| BoxFactor::new(d, q, h).unwrap()).collect()).unwrap()
}

fn e1() -> Direction {
    Direction::e1()
}
fn e2() -> Direction {
    Direction::e2()
}

#[test]
fn fejer_values() {
    assert_eq!(fejer(1, 0), 1.0);
    assert_eq!(fejer(1, 1), 0.0);
    assert_eq!(fejer(1, -1), 0.0);
    for big_h in [1i64, 2, 3, 10, 77, 1000] {
        let c = (2 * big_h - 1) as f64;
        let total: f64 = (-(2 * big_h)..=2 * big_h).map(|h| fejer(big_h, h)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for h in -(2 * big_h + 2)..=2 * big_h + 2 {
            assert_eq!(fejer(big_h, h), fejer(big_h, -h));
            assert!(fejer(big_h, h) <= 1.0 / c + 1e-15);
            if h.abs() >= 2 * big_h - 1 {
                assert_eq!(fejer(big_h, h), 0.0);
            }
        }
    }
    assert!(FejerKernel::new(0).is_err());
    let k = FejerKernel::new(5).unwrap();
    assert_eq!(k.reach(), 8);
    assert_eq!(k.value(3), fejer(5, 3));
}

#[test]
fn fejer_integer_normalisation() {
    // sum_h (2H-1-|h|) = (2H-1)^2
    for big_h in 1..=3000i64 {
        let c = 2 * big_h - 1;
        let s: i64 = (-(c - 1)..c).map(|h| c - h.abs()).sum();
        assert_eq!(s, c * c);
        FejerKernel::new(big_h).unwrap();
    }
}

#[test]
fn spec_parse_and_display() {
    let s = BoxSpec::parse("e1*2:5;e2:3;e2-e1:2").unwrap();
    assert_eq!(s.s(), 3);
    assert_eq!(s.factors[0].step, 2);
    assert_eq!(s.factors[2].dir.v, (-1, 1));
    assert_eq!(s.to_string(), "e1*2:5;e2:3;e2-e1:2");
    for bad in ["", "e1", "e3:2", "e1:0", "e1*0:2", "e1:x"] {
        assert!(BoxSpec::parse(bad).is_err(), "{bad}");
    }
}

#[test]
fn box_norm_matches_brute_force() {
    let mut r = rng(40);
    let diag = Direction::e2_minus_e1();
    let cases: Vec<Vec<(Direction, i64, i64)>> = vec![
        vec![(e1(), 1, 3)],
        vec![(e1(), 1, 2), (e2(), 1, 3)],
        vec![(e1(), 2, 2), (e1(), 1, 3)],
        vec![(diag, 1, 2), (e2(), 1, 2)],
        vec![(e1(), 1, 2), (e2(), 2, 2), (diag, 1, 2)],
    ];
    for c in cases {
        let f = random_grid(7, &mut r);
        let got = box_norm(&f, &spec(&c), BUDGET).unwrap();
        let want = brute_box(&f, &c);
        assert!(relf(got.value_pow, want.re.max(0.0)) < 1e-10, "{c:?}");
        assert!(want.im.abs() < 1e-9 * want.norm().max(1.0));
        assert!(got.imag_residue.abs() < 1e-9 * got.value_pow.max(1.0));
        assert!((got.value - got.value_pow.powf(1.0 / (1u64 << c.len()) as f64)).abs() < 1e-12);
    }
}

#[test]
fn box_norm_examples() {
    let n = 8;
    let one = GridFn::ones(n);
    let got = box_norm(&one, &spec(&[(e1(), 1, n as i64)]), BUDGET).unwrap();
    let want: f64 = n as f64 * (-(2 * n as i64)..=2 * n as i64).map(|h| mu(n as i64, h) * (n as f64 - h.abs() as f64).max(0.0)).sum::<f64>();
    assert!(relf(got.value_pow, want) < 1e-12);

    let alpha = 1.0 / 3.0;
    let f = GridFn::from_fn(n, |x, _| e(alpha * x as f64));
    for c in [vec![(e1(), 1, 3), (e1(), 1, 3)], vec![(e1(), 1, 2), (e2(), 1, 4)]] {
        let got = box_norm(&f, &spec(&c), BUDGET).unwrap().value_pow;
        assert!(relf(got, brute_box(&f, &c).re) < 1e-10);
    }
    let z = GridFn::zeros(n);
    assert_eq!(box_norm(&z, &spec(&[(e1(), 1, 2), (e2(), 1, 2)]), BUDGET).unwrap().value_pow, 0.0);
    assert!(matches!(
        box_norm(&one, &spec(&[(e1(), 1, 2), (e2(), 1, 2)]), 10.0),
        Err(cornerlab::Error::WorkBudget { .. })
    ));
}

#[test]
fn box_norm_is_nonnegative() {
    let mut r = rng(41);
    for _ in 0..20 {
        let n = r.gen_range(3..12);
        let f = random_grid(n, &mut r);
        let c = vec![(e1(), r.gen_range(1..3), r.gen_range(1..4)), (e2(), 1, r.gen_range(1..4))];
        let res = box_norm(&f, &spec(&c), BUDGET).unwrap();
        assert!(res.negative_residue <= 1e-9);
        assert!(res.imag_residue.abs() <= 1e-9 * res.value_pow.max(1.0));
    }
}

#[test]
fn fft_path_matches_direct() {
    let mut r = rng(42);
    for (n, h1, h2, extra) in [(16usize, 3i64, 2i64, false), (40, 4, 5, false), (64, 3, 3, true), (128, 3, 2, false)] {
        let f = random_grid(n, &mut r);
        let mut c = vec![(e1(), 1, h1), (e2(), 2, h2)];
        if extra {
            c.push((Direction::e2_minus_e1(), 1, 2));
        }
        let sp = spec(&c);
        let a = box_norm(&f, &sp, BUDGET).unwrap().value_pow;
        let b = box_norm_fft(&f, &sp, BUDGET).unwrap().value_pow;
        assert!(relf(a, b) < 1e-8, "n={n}: {a} vs {b}");
    }
    let f = random_grid(8, &mut r);
    assert!(box_norm_fft(&f, &spec(&[(e1(), 1, 2), (e1(), 1, 2)]), BUDGET).is_err());
}

#[test]
fn u2_fourier_identity() {
    let mut r = rng(43);
    for len in [1usize, 5, 64, 333, 1024, 2048] {
        let f = random_line(r.gen_range(-20..20), len, &mut r);
        let u2 = unnormalized_line_norm(&f, &[1, 1], BUDGET).unwrap().value_pow;
        let m = 3 * len;
        let s = dft_line(&f, m).unwrap();
        let four: f64 = s.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() / m as f64;
        assert!(relf(u2, four) < 1e-9, "len={len}");
    }
}

#[test]
fn unnormalized_delta_is_one() {
    let d = LineFn::new(0, vec![C64::new(1.0, 0.0)]).unwrap();
    for s in 1..=4 {
        let steps = vec![1i64; s];
        assert!((unnormalized_line_norm(&d, &steps, BUDGET).unwrap().value_pow - 1.0).abs() < 1e-15);
    }
    let g = GridFn::indicator(5, &[(2, 3)]).unwrap();
    let dirs = [e1(), e2(), Direction::e2_minus_e1()];
    assert!((unnormalized_box_norm(&g, &dirs, BUDGET).unwrap().value_pow - 1.0).abs() < 1e-15);
}

#[test]
fn unnormalized_grid_norm_brute_force() {
    let mut r = rng(44);
    let n = 6;
    let f = random_grid(n, &mut r);
    let dirs = [e1(), Direction::new(1, 1).unwrap()];
    let got = unnormalized_box_norm(&f, &dirs, BUDGET).unwrap().value_pow;
    let mut want = C64::new(0.0, 0.0);
    let reach = 2 * n as i64;
    for h1 in -reach..=reach {
        for h2 in -reach..=reach {
            for x in 0..n as i64 {
                for y in 0..n as i64 {
                    let u = (h1, 0);
                    let v = (h2, h2);
                    want += f.get(x, y) * f.get(x + u.0, y + u.1).conj() * f.get(x + v.0, y + v.1).conj()
                        * f.get(x + u.0 + v.0, y + u.1 + v.1);
                }
            }
        }
    }
    assert!(relf(got, want.re) < 1e-10);
}

#[test]
fn normalized_below_unnormalized() {
    let mut r = rng(45);
    for _ in 0..10 {
        let n = r.gen_range(4..10);
        let f = random_grid(n, &mut r);
        let (h1, h2) = (r.gen_range(1..5), r.gen_range(1..5));
        for (d1, d2) in [(e1(), e2()), (e1(), Direction::e2_minus_e1()), (e2(), e2())] {
            let norm = box_norm(&f, &spec(&[(d1, 1, h1), (d2, 1, h2)]), BUDGET).unwrap().value_pow;
            let un = unnormalized_box_norm(&f, &[d1, d2], BUDGET).unwrap().value_pow;
            assert!(norm <= un / ((2 * h1 - 1) * (2 * h2 - 1)) as f64 * (1.0 + 1e-10) + 1e-12);
        }
        let l = random_line(0, 3 * n, &mut r);
        let norm = line_box_norm(&l, &[(1, h1), (1, h2), (1, 2)], BUDGET).unwrap().value_pow;
        let un = unnormalized_line_norm(&l, &[1, 1, 1], BUDGET).unwrap().value_pow;
        assert!(norm <= un / ((2 * h1 - 1) * (2 * h2 - 1) * 3) as f64 * (1.0 + 1e-10) + 1e-12);
    }
}

#[test]
fn gowers_line_examples() {
    let n = 16usize;
    let f = LineFn::from_fn(0, n, |x| e(0.37 * x as f64));
    let got = gowers_norm_line(&f, 2, 1, 4, BUDGET).unwrap().value_pow;
    let mut want = C64::new(0.0, 0.0);
    for h1 in -6i64..=6 {
        for h2 in -6i64..=6 {
            for x in 0..n as i64 {
                want += f.get(x) * f.get(x + h1).conj() * f.get(x + h2).conj() * f.get(x + h1 + h2) * mu(4, h1) * mu(4, h2);
            }
        }
    }
    assert!(relf(got, want.re) < 1e-10);

    let one = LineFn::interval(n);
    let got = gowers_norm_line(&one, 1, 1, n as i64, BUDGET).unwrap().value_pow;
    let want: f64 = (-(2 * n as i64)..=2 * n as i64).map(|h| mu(n as i64, h) * (n as f64 - h.abs() as f64).max(0.0)).sum();
    assert!(relf(got, want) < 1e-12);

    let g = random_line(0, 20, &mut rng(46));
    let c = e(0.123);
    let gc = g.map(|v| v * c);
    for s in 1..=3 {
        let a = gowers_norm_line(&g, s, 2, 3, BUDGET).unwrap().value_pow;
        let b = gowers_norm_line(&gc, s, 2, 3, BUDGET).unwrap().value_pow;
        assert!(relf(a, b) < 1e-12);
    }
}

#[test]
fn identity_properties() {
    let mut r = rng(47);
    for _ in 0..20 {
        let n = r.gen_range(4..10);
        let f = random_grid(n, &mut r);
        let sp = spec(&[(e1(), r.gen_range(1..3), r.gen_range(1..4)), (e2(), 1, r.gen_range(1..4))]);
        for p in [Property::Inductive, Property::Permutation] {
            let rep = check_box_properties(&f, &sp, &p, BUDGET).unwrap();
            assert!(rep.holds, "{rep:?}");
            assert!(rep.realized <= 1e-8);
        }
    }
}

#[test]
fn permutation_swap_matches_brute_force() {
    let f = random_grid(8, &mut rng(48));
    let a = box_norm(&f, &spec(&[(e1(), 1, 3), (e2(), 1, 2)]), BUDGET).unwrap().value_pow;
    let b = box_norm(&f, &spec(&[(e2(), 1, 2), (e1(), 1, 3)]), BUDGET).unwrap().value_pow;
    assert!(relf(a, b) < 1e-12);
}

#[test]
fn inequality_properties_hold_in_direction() {
    let mut r = rng(49);
    for _ in 0..10 {
        let n = r.gen_range(6..12);
        let f = random_indicator(n, 0.7, &mut r);
        let sp = spec(&[(e1(), 1, r.gen_range(2..4)), (e2(), 1, r.gen_range(2..4))]);
        for p in [
            Property::Monotonicity,
            Property::Enlarging { factor: 2 },
            Property::Trimming { kappa: 0.5 },
            Property::SubProgression { q: 2 },
        ] {
            let rep = check_box_properties(&f, &sp, &p, BUDGET).unwrap();
            assert!(rep.holds, "{rep:?}");
            assert!(rep.realized > 0.0);
        }
    }
    for name in ["inductive", "permutation", "monotonicity", "enlarging", "trimming", "subprogression"] {
        assert_eq!(Property::parse(name).unwrap().name(), name);
    }
    assert!(Property::parse("bogus").is_err());
}

#[test]
fn sumset_card_brute_force() {
    for (n, dir, q, h) in [(5usize, e1(), 1i64, 3i64), (4, e2(), 2, 2), (6, Direction::e2_minus_e1(), 1, 3)] {
        let f = BoxFactor::new(dir, q, h).unwrap();
        let mut pts = std::collections::BTreeSet::new();
        for x in 0..n as i64 {
            for y in 0..n as i64 {
                for t in -(h - 1)..=h - 1 {
                    pts.insert((x - dir.v.0 * q * t, y - dir.v.1 * q * t));
                }
            }
        }
        assert_eq!(sumset_card(n, &f), pts.len());
    }
}

#[test]
fn van_der_corput_examples() {
    let rep = van_der_corput_check(&LineFn::interval(64), 64, 4, 0.5).unwrap();
    assert_eq!(rep.lhs, 1.0);
    assert!(rep.hypothesis && rep.holds);
    let n = 128;
    let f = LineFn::from_fn(0, n, |x| e(x as f64 / n as f64));
    let rep = van_der_corput_check(&f, n, 2, 0.3).unwrap();
    assert!(rep.lhs < 1e-9);
    assert!(!rep.hypothesis && rep.holds);
}

#[test]
fn van_der_corput_random() {
    let mut r = rng(50);
    let n = 512;
    let mut met = 0;
    while met < 100 {
        let spread: f64 = r.gen_range(0.1..0.45);
        let f = LineFn::from_fn(0, n, |_| C64::new(0.0, 0.0));
        let vals: Vec<C64> = (0..n).map(|_| e(r.gen_range(-spread..spread))).collect();
        let f = LineFn::new(f.offset(), vals).unwrap();
        let rep = van_der_corput_check(&f, n, 10, 0.3).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!(rep.rhs2_imag.abs() < 1e-9);
        if rep.hypothesis {
            met += 1;
        }
    }
}

#[test]
fn dual_difference() {
    let mut r = rng(51);
    let n = 12;
    let single = DualForm::new(vec![random_grid(n, &mut r)]).unwrap();
    let sp = spec(&[(e1(), 1, 2), (e2(), 1, 3)]);
    let rep = dual_difference_check(&single, &sp, 1, BUDGET).unwrap();
    assert!(relf(rep.lhs_pow, rep.rhs) < 1e-10);
    assert!(rep.holds);

    let zero = DualForm::new(vec![GridFn::zeros(n); 3]).unwrap();
    let rep = dual_difference_check(&zero, &sp, 1, BUDGET).unwrap();
    assert_eq!((rep.lhs_pow, rep.rhs), (0.0, 0.0));

    let ctx = build_w_trick(&IntPolynomial::from_i64(&[-1, 0, 1]), 1, 5.0).unwrap();
    for _ in 0..5 {
        let a = random_indicator(n, 0.6, &mut r);
        let b = random_indicator(n, 0.6, &mut r);
        let d0 = dual_d0(&a, &b, &ctx, n).unwrap();
        let slices: Vec<GridFn> = (0..4).map(|_| random_grid(n, &mut r).lin_comb(C64::new(0.2, 0.0), &d0, C64::new(0.8, 0.0))).collect();
        let form = DualForm::new(slices).unwrap();
        for rr in [1, 2] {
            let rep = dual_difference_check(&form, &sp, rr, BUDGET).unwrap();
            assert!(rep.holds, "{rep:?}");
        }
    }
    assert!(dual_difference_check(&single, &sp, 3, BUDGET).is_err());
}

#[test]
fn dual_form_differenced_average() {
    let mut r = rng(52);
    let slices: Vec<GridFn> = (0..3).map(|_| random_grid(5, &mut r)).collect();
    let form = DualForm::new(slices.clone()).unwrap();
    let g = form.differenced(&[(1, 0)]);
    for x in 0..5i64 {
        for y in 0..5i64 {
            let want: C64 = slices.iter().map(|s| s.get(x, y) * s.get(x + 1, y).conj()).sum::<C64>() / 3.0;
            assert!((g.get(x, y) - want).norm() < 1e-14);
        }
    }
    assert!(DualForm::new(vec![]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn fft_equals_direct(seed in any::<u64>(), n in 2usize..24, h1 in 1i64..4, h2 in 1i64..4, q in 1i64..3) {
        let f = random_grid(n, &mut rng(seed));
        let sp = spec(&[(e2(), q, h2), (e1(), 1, h1)]);
        let a = box_norm(&f, &sp, BUDGET).unwrap().value_pow;
        let b = box_norm_fft(&f, &sp, BUDGET).unwrap().value_pow;
        prop_assert!(relf(a, b) < 1e-8 || (a - b).abs() < 1e-10);
    }

    #[test]
    fn permutation_invariant(seed in any::<u64>(), n in 2usize..10, h1 in 1i64..4, h2 in 1i64..4) {
        let f = random_grid(n, &mut rng(seed));
        let a = box_norm(&f, &spec(&[(e1(), 1, h1), (Direction::e2_minus_e1(), 1, h2)]), BUDGET).unwrap().value_pow;
        let b = box_norm(&f, &spec(&[(Direction::e2_minus_e1(), 1, h2), (e1(), 1, h1)]), BUDGET).unwrap().value_pow;
        prop_assert!(relf(a, b) < 1e-8 || (a - b).abs() < 1e-10);
    }
}
