mod common;

use ankh_core::kernel::{erfc, h_derivatives, h_eval, pair_interaction, self_energy};
use ankh_core::model::{MultipoleSource, ParticleSystem, Vec3};
use ankh_core::oracle::{pair_energy, XiMode};
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn erfc_matches_series_and_continued_fraction() {
    for i in 0..400 {
        let x = i as f64 * 0.0137;
        let (a, b) = (erfc(x), erfc_oracle(x));
        // the series loses relative digits to cancellation as erfc shrinks
        assert!((a - b).abs() < 1e-13 * b.max(1e-2), "x={x}: {a} vs {b}");
    }
}

#[test]
fn h_eval_examples() {
    let one = h_eval([1.0, 0.0, 0.0], [0.0; 3], 0.01).unwrap();
    assert!(rel(one, erfc_oracle(0.01)) < 1e-14);
    assert!((one - 0.98871658).abs() < 1e-8);
    let two = h_eval([2.0, 0.0, 0.0], [0.0; 3], 0.01).unwrap();
    assert!(rel(two, erfc_oracle(0.02) / 2.0) < 1e-14);
    assert!(h_eval([0.5; 3], [0.5; 3], 0.01).is_err());
    assert!(h_derivatives([0.5; 3], [0.5; 3], 0.01).is_err());
}

#[test]
fn h_eval_positive_and_decreasing() {
    let mut prev = f64::INFINITY;
    for i in 1..200 {
        let v = h_eval([0.05 * i as f64, 0.0, 0.0], [0.0; 3], 0.7).unwrap();
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
}

/// Central difference of `f` along `x`-argument axes `path`.
fn fd(f: &dyn Fn(Vec3) -> f64, x: Vec3, path: &[usize], h: f64) -> f64 {
    match path.split_first() {
        None => f(x),
        Some((&a, rest)) => (fd(f, shifted(x, a, h), rest, h) - fd(f, shifted(x, a, -h), rest, h)) / (2.0 * h),
    }
}

fn multi(path: &[usize]) -> [usize; 3] {
    let mut g = [0; 3];
    for &a in path {
        g[a] += 1;
    }
    g
}

#[test]
fn derivatives_match_finite_differences() {
    let err = derivative_fd_error(11);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn second_derivatives_match_nested_differences() {
    let mut r = rng(12);
    for _ in 0..20 {
        let x = random_point(&mut r, 1.0);
        let mut y = random_point(&mut r, 1.0);
        y[2] -= 3.0;
        let d = h_derivatives(x, y, 0.3).unwrap();
        let f = |p: Vec3| h_eval(p, y, 0.3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let approx = fd(&f, x, &[i, j], 1e-3);
                let exact = d.partial(multi(&[i, j]));
                assert!((exact - approx).abs() < 1e-5 * d.partial([2, 0, 0]).abs().max(exact.abs()));
            }
        }
    }
}

#[test]
fn y_derivatives_flip_sign() {
    let x = [0.4, -0.3, 0.9];
    let y = [-1.1, 0.5, 0.2];
    let xi = 0.2;
    let d = h_derivatives(x, y, xi).unwrap();
    let f = |p: Vec3| h_eval(x, p, xi).unwrap();
    let h = 1e-5;
    for a in 0..3 {
        let mut b = [0; 3];
        b[a] = 1;
        let approx = (f(shifted(y, a, h)) - f(shifted(y, a, -h))) / (2.0 * h);
        assert!(rel(approx, d.get([0; 3], b)) < 1e-6);
    }
    assert_eq!(d.get([1, 0, 0], [0, 1, 0]), -d.partial([1, 1, 0]));
    assert_eq!(d.get([0, 1, 0], [1, 0, 0]), d.get([1, 0, 0], [0, 1, 0]));
}

#[test]
fn pair_examples() {
    let one = MultipoleSource::charge(1.0);
    let e = pair_interaction([0.0; 3], &one, [1.0, 0.0, 0.0], &one, 0.01).unwrap();
    assert!(rel(e, erfc_oracle(0.01)) < 1e-14);

    // charge at the origin, dipole along x at (2, 0, 0)
    let dip = MultipoleSource::new(0.0, [1.0, 0.0, 0.0], [0.0; 6]);
    let e = pair_interaction([0.0; 3], &one, [2.0, 0.0, 0.0], &dip, 0.01).unwrap();
    let h = 1e-5;
    let f = |s: f64| h_eval([0.0; 3], [2.0 + s, 0.0, 0.0], 0.01).unwrap();
    assert!(rel(e, (f(h) - f(-h)) / (2.0 * h)) < 1e-7);

    let zero = MultipoleSource::default();
    assert_eq!(pair_interaction([0.0; 3], &zero, [1.0, 2.0, 0.0], &dip, 0.01).unwrap(), 0.0);
    assert!(pair_interaction([1.0; 3], &one, [1.0; 3], &one, 0.01).is_err());
}

#[test]
fn quadrupole_pair_matches_finite_differences() {
    // 𝔇_a 𝔇_b applied numerically to h_eval
    let mut r = rng(5);
    let xi = 0.4;
    for _ in 0..20 {
        let xa = random_point(&mut r, 0.5);
        let mut xb = random_point(&mut r, 0.5);
        xb[2] += 2.5;
        let sa = random_source(&mut r, 2);
        let sb = random_source(&mut r, 2);
        let h = 2e-3;
        let apply_b = |xa: Vec3| -> f64 {
            let g = |p: Vec3| h_eval(xa, p, xi).unwrap();
            let mut v = sb.q * g(xb);
            for i in 0..3 {
                v += sb.mu[i] * fd(&g, xb, &[i], h);
                for j in 0..3 {
                    v += sb.theta_matrix()[i][j] * fd(&g, xb, &[i, j], h);
                }
            }
            v
        };
        let mut e = sa.q * apply_b(xa);
        for i in 0..3 {
            e += sa.mu[i] * fd(&apply_b, xa, &[i], h);
            for j in 0..3 {
                e += sa.theta_matrix()[i][j] * fd(&apply_b, xa, &[i, j], h);
            }
        }
        let exact = pair_interaction(xa, &sa, xb, &sb, xi).unwrap();
        assert!((exact - e).abs() < 1e-5 * exact.abs().max(0.1), "{exact} vs {e}");
    }
}

#[test]
fn tensor_contraction_matches_scalar_oracle() {
    let mut r = rng(99);
    for mode in [XiMode::Bare, XiMode::Screened(0.01), XiMode::Screened(0.8)] {
        let xi = match mode {
            XiMode::Bare => 0.0,
            XiMode::Screened(x) => x,
        };
        for _ in 0..200 {
            let xa = random_point(&mut r, 1.0);
            let xb = random_point(&mut r, 1.0);
            let (oa, ob) = (r.gen_range(0..3), r.gen_range(0..3));
            let sa = random_source(&mut r, oa);
            let sb = random_source(&mut r, ob);
            let a = pair_interaction(xa, &sa, xb, &sb, xi).unwrap();
            let z = [xa[0] - xb[0], xa[1] - xb[1], xa[2] - xb[2]];
            let b = pair_energy(z, &sa, &sb, mode);
            assert!((a - b).abs() < 1e-11 * a.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn self_energy_is_nonpositive() {
    let mut r = rng(3);
    for _ in 0..50 {
        let s = ParticleSystem::new(vec![[0.0; 3]], vec![random_source(&mut r, 2)], 1.0).unwrap();
        assert!(self_energy(&s, r.gen_range(0.01..3.0)) <= 0.0);
    }
}

#[test]
fn self_energy_is_screened_limit() {
    // -½ lim_{y→x} 𝔇_x 𝔇_y erf(ξ|x-y|)/|x-y| equals the self term; check at
    // a small separation through H: erf/r = 1/r - erfc/r
    let mut r = rng(8);
    let xi = 0.7;
    for _ in 0..10 {
        let s = random_source(&mut r, 2);
        let sys = ParticleSystem::new(vec![[0.0; 3]], vec![s], 1.0).unwrap();
        // even in d, so Richardson on d and d/2 removes the d² term
        let at = |d: f64| {
            let mut acc = 0.0;
            // averaging over ±axis directions cancels odd terms
            for a in 0..3 {
                for sign in [-1.0, 1.0] {
                    let mut x = [0.0; 3];
                    x[a] = sign * d;
                    acc += pair_energy(x, &s, &s, XiMode::Bare) - pair_energy(x, &s, &s, XiMode::Screened(xi));
                }
            }
            -0.5 * acc / 6.0
        };
        let limit = (4.0 * at(0.02) - at(0.04)) / 3.0;
        let exact = self_energy(&sys, xi);
        assert!((limit - exact).abs() < 1e-4 * exact.abs(), "{limit} vs {exact}");
    }
}

proptest! {
    #[test]
    fn pair_symmetric(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let xa = random_point(&mut r, 1.0);
        let xb = random_point(&mut r, 1.0);
        let sa = random_source(&mut r, 2);
        let sb = random_source(&mut r, 2);
        let xi = r.gen_range(0.0..2.0);
        let ab = pair_interaction(xa, &sa, xb, &sb, xi).unwrap();
        let ba = pair_interaction(xb, &sb, xa, &sa, xi).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1e-3));
    }

    #[test]
    fn translation_invariant(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let x = random_point(&mut r, 1.0);
        let mut y = random_point(&mut r, 1.0);
        y[1] += 2.5;
        let t: Vec3 = [(); 3].map(|_| r.gen_range(-4.0..4.0) / 8.0);
        let a = h_derivatives(x, y, 0.2).unwrap();
        let xt = [x[0] + t[0], x[1] + t[1], x[2] + t[2]];
        let yt = [y[0] + t[0], y[1] + t[1], y[2] + t[2]];
        let b = h_derivatives(xt, yt, 0.2).unwrap();
        for g in 0..125usize {
            let gam = [g / 25, (g / 5) % 5, g % 5];
            if gam.iter().sum::<usize>() > 4 { continue; }
            let (u, v) = (a.partial(gam), b.partial(gam));
            prop_assert!((u - v).abs() <= 1e-13 * u.abs().max(1e-6) + 1e-12 * a.partial([0;3]));
        }
    }

    #[test]
    fn mixed_partials_commute(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let x = random_point(&mut r, 1.0);
        let mut y = random_point(&mut r, 1.0);
        y[0] -= 2.5;
        let d = h_derivatives(x, y, 0.05).unwrap();
        let (i, j) = (r.gen_range(0..3), r.gen_range(0..3));
        let mut a = [0; 3];
        let mut b = [0; 3];
        a[i] += 1;
        b[j] += 1;
        prop_assert_eq!(d.get(a, b), d.get(b, a));
    }
}
