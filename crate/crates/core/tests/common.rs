#![allow(dead_code)]

use ankh_core::chebyshev::{lagrange_derivative, CellGeometry, DiffOperator, Grid1D};
use ankh_core::kernel::{h_derivatives, h_eval};
use ankh_core::model::{MultipoleSource, ParticleSystem, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// erfc from the Maclaurin series of erf (x < 2) or the Laplace continued
/// fraction (x >= 2).
pub fn erfc_oracle(x: f64) -> f64 {
    let sqpi = std::f64::consts::PI.sqrt();
    if x < 2.0 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        1.0 - 2.0 / sqpi * sum
    } else {
        let mut f = x;
        for n in (1..200).rev() {
            f = x + (n as f64 / 2.0) / f;
        }
        (-x * x).exp() / sqpi / f
    }
}

pub fn random_source<R: Rng>(r: &mut R, order: usize) -> MultipoleSource {
    let mut s = MultipoleSource::charge(r.gen_range(-1.0..1.0));
    if order >= 1 {
        s.mu = [(); 3].map(|_| r.gen_range(-0.5..0.5));
    }
    if order >= 2 {
        s.theta = [(); 6].map(|_| r.gen_range(-0.3..0.3));
    }
    s
}

pub fn random_point<R: Rng>(r: &mut R, half: f64) -> Vec3 {
    [(); 3].map(|_| r.gen_range(-half..half))
}

/// Neutral `±1` charges at uniform positions.
pub fn random_charges(seed: u64, n: usize, box_radius: f64) -> ParticleSystem {
    let mut r = rng(seed);
    let pos = (0..n).map(|_| random_point(&mut r, box_radius)).collect();
    let q: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    ParticleSystem::charges(pos, &q, box_radius).unwrap()
}

/// Uniform positions with random charges, dipoles and quadrupoles.
pub fn random_multipoles(seed: u64, n: usize, box_radius: f64) -> ParticleSystem {
    let mut r = rng(seed);
    let pos = (0..n).map(|_| random_point(&mut r, box_radius)).collect();
    let src = (0..n).map(|_| random_source(&mut r, 2)).collect();
    ParticleSystem::new(pos, src, box_radius).unwrap()
}

/// Half-width of a leaf holding ~64 atoms at liquid-water density (Å).
pub const LEAF_HALF: f64 = 4.0;

/// Max over 100 random pairs of `|∂^α_x ∂^β_y (H - I)|`, divided by the max
/// of `|H|`, for two cells of half-width `half` separated by one cell.
/// Returns `(|α|, |β|, error)` for |α|, |β| ≤ 2.
pub fn interpolation_errors(l: usize, half: f64, seed: u64) -> Vec<(usize, usize, f64)> {
    let g = Grid1D::chebyshev(l);
    let d = DiffOperator::new(&g);
    let xi = 0.01;
    let t = CellGeometry { center: [0.0; 3], half };
    let s = CellGeometry { center: [4.0 * half, 0.0, 0.0], half };
    let k3 = l * l * l;
    let mut kmat = vec![0.0; k3 * k3];
    for a in 0..k3 {
        let xa = t.node(&g, [a / (l * l), (a / l) % l, a % l]);
        for b in 0..k3 {
            let yb = s.node(&g, [b / (l * l), (b / l) % l, b % l]);
            kmat[a * k3 + b] = h_eval(xa, yb, xi).unwrap();
        }
    }
    let mut r = rng(seed);
    let pairs: Vec<(Vec3, Vec3)> = (0..100)
        .map(|_| {
            let x = random_point(&mut r, half);
            let y = random_point(&mut r, half);
            (x, [y[0] + 4.0 * half, y[1], y[2]])
        })
        .collect();
    let hmax = pairs.iter().map(|(x, y)| h_eval(*x, *y, xi).unwrap()).fold(0.0, f64::max);
    // (|α|, |β|) representatives
    let reps: [[usize; 3]; 3] = [[0, 0, 0], [1, 0, 0], [1, 1, 0]];
    let mut out = Vec::new();
    for (na, alpha) in reps.iter().enumerate() {
        for (nb, beta) in reps.iter().enumerate() {
            let mut worst = 0.0f64;
            for (x, y) in &pairs {
                let basis = |c: &CellGeometry, p: Vec3, m: &[usize; 3]| -> Vec<f64> {
                    let u = c.local(p).unwrap();
                    let f: Vec<Vec<f64>> = (0..3)
                        .map(|ax| {
                            let v = lagrange_derivative(&d, &g, m[ax], u[ax]).unwrap();
                            v.iter().map(|w| w / c.half.powi(m[ax] as i32)).collect()
                        })
                        .collect();
                    (0..k3).map(|n| f[0][n / (l * l)] * f[1][(n / l) % l] * f[2][n % l]).collect()
                };
                let bx = basis(&t, *x, alpha);
                let by = basis(&s, *y, beta);
                let interp: f64 = (0..k3).map(|a| bx[a] * (0..k3).map(|b| kmat[a * k3 + b] * by[b]).sum::<f64>()).sum();
                let exact = h_derivatives(*x, *y, xi).unwrap().get(*alpha, *beta);
                worst = worst.max((exact - interp).abs());
            }
            out.push((na, nb, worst / hmax));
        }
    }
    out
}

pub fn shifted(x: Vec3, a: usize, h: f64) -> Vec3 {
    let mut y = x;
    y[a] += h;
    y
}

/// Worst relative error over 100 random well-separated pairs when every entry
/// of order `n + 1` is compared with a central difference (step 1e-5) of the
/// order-`n` entries, starting from `h_eval` itself. Entries are scaled by the
/// largest entry of the same order so near-zero components are not divided by
/// round-off.
pub fn derivative_fd_error(seed: u64) -> f64 {
    let mut r = rng(seed);
    let step = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let xi = r.gen_range(0.01..1.0);
        let x = random_point(&mut r, 1.0);
        let mut y = random_point(&mut r, 1.0);
        y[r.gen_range(0..3)] += 3.0;
        let d = h_derivatives(x, y, xi).unwrap();
        for order in 1..=4usize {
            let gammas: Vec<[usize; 3]> = (0..125)
                .map(|g| [g / 25, (g / 5) % 5, g % 5])
                .filter(|g| g.iter().sum::<usize>() == order)
                .collect();
            let scale = gammas.iter().map(|&g| d.partial(g).abs()).fold(0.0, f64::max);
            for g in gammas {
                let a = (0..3).find(|&a| g[a] > 0).unwrap();
                let mut lower = g;
                lower[a] -= 1;
                let f = |p: Vec3| {
                    if order == 1 {
                        h_eval(p, y, xi).unwrap()
                    } else {
                        h_derivatives(p, y, xi).unwrap().partial(lower)
                    }
                };
                let approx = (f(shifted(x, a, step)) - f(shifted(x, a, -step))) / (2.0 * step);
                let exact = d.partial(g);
                worst = worst.max((exact - approx).abs() / exact.abs().max(1e-3 * scale));
            }
        }
    }
    worst
}
