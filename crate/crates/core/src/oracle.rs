// Copyright 2026 The ankh authors
//
// Licensed under the Apache license, version 2.0 (the "license");
// you may not use this file except in compliance with the license.
// You may obtain a copy of the license at
//
//     http://www.apache.org/licenses/license-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the license is distributed on an "as is" basis,
// without warranties or conditions of any kind, either express or implied.
// See the license for the specific language governing permissions and
// limitations under the license.

//! Slow reference sums.
//!
//! Pair energies here are written in the scalar form `Σ_n G_n B_n` with
//! `G_n` built from `μ·r`, `rᵀΘr`, `tr Θ` and friends, independently of the
//! Cartesian tensor contraction in [`crate::kernel`].

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{AnkhError, Result};
use crate::kernel::self_energy;
use crate::model::{EnergyReport, EwaldConfig, MultipoleSource, ParticleSystem, PhaseTimings, Vec3};

/// Maximum number of distinct pair-image evaluations.
pub const BUDGET: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum XiMode {
    /// Plain Coulomb `1/r`.
    Bare,
    Screened(f64),
}

#[inline]
fn radial(r: f64, mode: XiMode, nmax: usize) -> [f64; 5] {
    let mut b = [0.0; 5];
    let ir2 = 1.0 / (r * r);
    match mode {
        XiMode::Bare => {
            b[0] = 1.0 / r;
            for n in 1..=nmax {
                b[n] = b[n - 1] * (2 * n - 1) as f64 * ir2;
            }
        }
        XiMode::Screened(xi) => {
            b[0] = libm::erfc(xi * r) / r;
            let gauss = 2.0 * xi / PI.sqrt() * (-(xi * r) * (xi * r)).exp();
            let mut pw = 1.0;
            for n in 1..=nmax {
                b[n] = ((2 * n - 1) as f64 * b[n - 1] + pw * gauss) * ir2;
                pw *= 2.0 * xi * xi;
            }
        }
    }
    b
}

fn mat_vec(t: &[f64; 6], r: Vec3) -> Vec3 {
    [
        t[0] * r[0] + t[1] * r[1] + t[2] * r[2],
        t[1] * r[0] + t[3] * r[1] + t[4] * r[2],
        t[2] * r[0] + t[4] * r[1] + t[5] * r[2],
    ]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `𝔇_a 𝔇_b K(x_a - x_b)` for separation `r = x_a - x_b`.
pub fn pair_energy(r: Vec3, a: &MultipoleSource, b: &MultipoleSource, mode: XiMode) -> f64 {
    let dist = dot(r, r).sqrt();
    let ordered = |s: &MultipoleSource| {
        if s.theta.iter().any(|&v| v != 0.0) {
            2
        } else if s.mu.iter().any(|&v| v != 0.0) {
            1
        } else {
            0
        }
    };
    let nmax = ordered(a) + ordered(b);
    let bn = radial(dist, mode, nmax);
    if nmax == 0 {
        return a.q * b.q * bn[0];
    }
    let (da, db) = (dot(a.mu, r), dot(b.mu, r));
    let (tha, thb) = (mat_vec(&a.theta, r), mat_vec(&b.theta, r));
    let (qa, qb) = (dot(r, tha), dot(r, thb));
    let ta = a.theta[0] + a.theta[3] + a.theta[5];
    let tb = b.theta[0] + b.theta[3] + b.theta[5];
    let (x, y) = (&a.theta, &b.theta);
    let tt = x[0] * y[0] + x[3] * y[3] + x[5] * y[5] + 2.0 * (x[1] * y[1] + x[2] * y[2] + x[4] * y[4]);
    let g0 = a.q * b.q;
    let g1 = a.q * db - b.q * da + dot(a.mu, b.mu) - a.q * tb - b.q * ta;
    let g2 = -da * db + a.q * qb + b.q * qa + 2.0 * dot(a.mu, thb) + tb * da - 2.0 * dot(b.mu, tha) - ta * db
        + ta * tb
        + 2.0 * tt;
    let g3 = -da * qb + db * qa - ta * qb - tb * qa - 4.0 * dot(tha, thb);
    let g4 = qa * qb;
    g0 * bn[0] + g1 * bn[1] + g2 * bn[2] + g3 * bn[3] + g4 * bn[4]
}

pub fn lattice_evaluations(n: usize, p: usize) -> f64 {
    let n = n as f64;
    n * (n + 1.0) / 2.0 * ((2 * p + 1) as f64).powi(3)
}

/// `½ Σ_{t ∈ 2r_B Z_p} Σ_x Σ_y 𝔇_x 𝔇_y K(x - y - t)` without the `x = y, t = 0`
/// terms.
pub fn direct_lattice_energy(system: &ParticleSystem, mode: XiMode, p: usize) -> Result<f64> {
    let evaluations = lattice_evaluations(system.len(), p);
    if evaluations > BUDGET {
        return Err(AnkhError::Budget { evaluations, limit: BUDGET });
    }
    let n = system.len();
    let period = 2.0 * system.box_radius;
    let pi = p as i32;
    let shifts: Vec<Vec3> = (-pi..=pi)
        .flat_map(|i| (-pi..=pi).flat_map(move |j| (-pi..=pi).map(move |k| [i, j, k])))
        .map(|v: [i32; 3]| v.map(|c| period * c as f64))
        .collect();
    let pos = &system.positions;
    let src = &system.sources;
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut acc = 0.0;
            for b in a..n {
                let base = [pos[a][0] - pos[b][0], pos[a][1] - pos[b][1], pos[a][2] - pos[b][2]];
                let mut row = 0.0;
                for t in &shifts {
                    let r = [base[0] - t[0], base[1] - t[1], base[2] - t[2]];
                    if r == [0.0; 3] {
                        continue;
                    }
                    row += pair_energy(r, &src[a], &src[b], mode);
                }
                acc += if a == b { 0.5 * row } else { row };
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum())
}

/// Smooth part `(2π/V) Σ_{m≠0} exp(-k²/4ξ²)/k² |S(k)|²` with `k = π m / r_B`
/// and `S(k) = Σ (q + i μ·k - Θ:kkᵀ) e^{i k·x}`.
pub fn reciprocal_energy(system: &ParticleSystem, xi: f64, cutoff: usize) -> Result<f64> {
    if cutoff < 1 {
        return Err(AnkhError::Config("reciprocal cutoff must be >= 1".into()));
    }
    let rb = system.box_radius;
    let kc = cutoff as i32;
    let unit = PI / rb;
    // e^{i unit m x_a} for m in [-K, K], per particle and axis
    let phase: Vec<[Vec<Complex64>; 3]> = system
        .positions
        .iter()
        .map(|x| x.map(|c| (-kc..=kc).map(|m| Complex64::from_polar(1.0, unit * m as f64 * c)).collect()))
        .collect();
    let vectors: Vec<[i32; 3]> = (-kc..=kc)
        .flat_map(|i| (-kc..=kc).flat_map(move |j| (-kc..=kc).map(move |k| [i, j, k])))
        .filter(|m| *m > [0, 0, 0])
        .collect();
    let volume = (2.0 * rb).powi(3);
    let terms: Vec<f64> = vectors
        .par_iter()
        .map(|m| {
            let k = m.map(|c| unit * c as f64);
            let k2 = dot(k, k);
            let damp = (-k2 / (4.0 * xi * xi)).exp() / k2;
            if damp == 0.0 {
                return 0.0;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for (src, ph) in system.sources.iter().zip(&phase) {
                let e = ph[0][(m[0] + kc) as usize] * ph[1][(m[1] + kc) as usize] * ph[2][(m[2] + kc) as usize];
                let re = src.q - dot(k, mat_vec(&src.theta, k));
                let im = dot(src.mu, k);
                s += Complex64::new(re, im) * e;
            }
            2.0 * damp * s.norm_sqr()
        })
        .collect();
    Ok(2.0 * PI / volume * terms.iter().sum::<f64>())
}

/// Ewald sum: screened real part over `Z_p` images, reciprocal part up to
/// `recip_cutoff`, and the self term.
pub fn ewald_energy(system: &ParticleSystem, config: &EwaldConfig) -> Result<EnergyReport> {
    let start = std::time::Instant::now();
    let real = direct_lattice_energy(system, XiMode::Screened(config.xi), config.images)?;
    let t_real = start.elapsed().as_secs_f64();
    let start = std::time::Instant::now();
    let rec = reciprocal_energy(system, config.xi, config.recip_cutoff)?;
    let t_rec = start.elapsed().as_secs_f64();
    let mut r = EnergyReport::from_parts(self_energy(system, config.xi), real, 0.0, 0.0, rec);
    r.timings = PhaseTimings { near_field: t_real, far_field: t_rec, ..Default::default() };
    Ok(r)
}

/// Largest dense far-field matrix handled.
pub const DENSE_LIMIT: usize = 4096;

/// Dense far-field matrix between equispaced leaf nodes, ordered as the FFT
/// engine's global vector; blocks of adjacent leaves (wrapped when `images >
/// 0`) are zero.
pub fn dense_far_matrix(depth: usize, order: usize, box_radius: f64, xi: f64, images: usize) -> Result<Vec<f64>> {
    let n = 1usize << depth;
    let m = n * order;
    let size = m * m * m;
    if size > DENSE_LIMIT {
        return Err(AnkhError::Budget { evaluations: size as f64, limit: DENSE_LIMIT as f64 });
    }
    let h = box_radius / n as f64;
    let coord = |i: usize| {
        let (c, k) = (i / order, i % order);
        let u = -1.0 + 2.0 * k as f64 / (order - 1) as f64;
        -box_radius + (2 * c + 1) as f64 * h + h * u
    };
    let axis: Vec<(usize, f64)> = (0..m).map(|i| (i / order, coord(i))).collect();
    let ip = images as i32;
    let period = 2.0 * box_radius;
    let mut a = vec![0.0; size * size];
    a.par_chunks_mut(size).enumerate().for_each(|(row, out)| {
        let ti = [row / (m * m), (row / m) % m, row % m].map(|i| axis[i]);
        for (col, v) in out.iter_mut().enumerate().skip(row) {
            let si = [col / (m * m), (col / m) % m, col % m].map(|i| axis[i]);
            let mut acc = 0.0;
            for i in -ip..=ip {
                for j in -ip..=ip {
                    for k in -ip..=ip {
                        let img = [i, j, k];
                        let sep = (0..3).map(|d| (ti[d].0 as i32 - si[d].0 as i32 + n as i32 * img[d]).abs()).max().unwrap();
                        if sep < 2 {
                            continue;
                        }
                        let z = [0, 1, 2].map(|d| ti[d].1 - si[d].1 + period * img[d] as f64);
                        let r = dot(z, z).sqrt();
                        acc += libm::erfc(xi * r) / r;
                    }
                }
            }
            *v = acc;
        }
    });
    // mirror so that A = Aᵀ holds bit for bit
    for i in 0..size {
        for j in 0..i {
            a[i * size + j] = a[j * size + i];
        }
    }
    Ok(a)
}
