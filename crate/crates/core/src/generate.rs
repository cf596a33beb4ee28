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

//! Reproducible test systems.
//!
//! Particles come in inversion pairs `(x, -x)` sharing the charge, with
//! opposite dipoles and equal quadrupoles. Charges alternate in sign between
//! pairs. The result is neutral with zero net dipole, so truncated cubic
//! lattice sums converge to the Ewald value.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{AnkhError, Result};
use crate::model::{MultipoleSource, ParticleSystem, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Uniform,
    LatticeJittered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Moments {
    Charges,
    Dipoles,
    /// Charges, dipoles and traceless quadrupoles.
    Quadrupoles,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub layout: Layout,
    pub count: usize,
    pub box_radius: f64,
    pub moments: Moments,
    pub seed: u64,
}

/// Largest dipole norm and quadrupole Frobenius norm relative to `|q|`.
pub const MOMENT_SCALE: f64 = 0.1;

pub fn generate(spec: &GenSpec) -> Result<ParticleSystem> {
    if spec.count == 0 {
        return Err(AnkhError::Config("particle count must be >= 1".into()));
    }
    if !(spec.box_radius.is_finite() && spec.box_radius > 0.0) {
        return Err(AnkhError::Config("box radius must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pairs = spec.count / 2;
    let sites = match spec.layout {
        Layout::Uniform => uniform_sites(&mut rng, pairs, spec.box_radius),
        Layout::LatticeJittered => lattice_sites(&mut rng, pairs, spec.box_radius),
    };
    let mut positions = Vec::with_capacity(spec.count);
    let mut sources = Vec::with_capacity(spec.count);
    for (i, x) in sites.into_iter().enumerate() {
        let q = if pairs % 2 == 1 && i == pairs - 1 {
            0.0
        } else if i % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        let s = moments(&mut rng, q, spec.moments);
        positions.push(x);
        sources.push(s);
        positions.push(x.map(|v| -v));
        sources.push(MultipoleSource { mu: s.mu.map(|v| -v), ..s });
    }
    if spec.count % 2 == 1 {
        positions.push([0.0; 3]);
        sources.push(MultipoleSource::default());
    }
    ParticleSystem::new(positions, sources, spec.box_radius)
}

fn uniform_sites(rng: &mut ChaCha8Rng, pairs: usize, rb: f64) -> Vec<Vec3> {
    (0..pairs)
        .map(|_| loop {
            let x: Vec3 = [(); 3].map(|_| rng.gen_range(-rb..rb));
            // keep pairs and the origin distinct
            if x.iter().any(|&v| v.abs() > 1e-9 * rb) {
                break x;
            }
        })
        .collect()
}

/// Cells of an `m^3` lattice symmetric about the origin, half of them drawn at
/// random, each jittered by up to a quarter spacing.
fn lattice_sites(rng: &mut ChaCha8Rng, pairs: usize, rb: f64) -> Vec<Vec3> {
    let mut m = 1usize;
    while m * m * m / 2 < pairs {
        m += 1;
    }
    let a = 2.0 * rb / m as f64;
    let coord = |i: usize| (i as f64 + 0.5 - m as f64 / 2.0) * a;
    let mut half = Vec::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let idx = [i, j, k];
                let mirror = idx.map(|v| m - 1 - v);
                if idx > mirror {
                    half.push([coord(i), coord(j), coord(k)]);
                }
            }
        }
    }
    half.shuffle(rng);
    half.truncate(pairs);
    half.into_iter()
        .map(|s| s.map(|c| c + rng.gen_range(-0.25..0.25) * a))
        .collect()
}

fn moments(rng: &mut ChaCha8Rng, q: f64, mode: Moments) -> MultipoleSource {
    let scale = MOMENT_SCALE * q.abs();
    let mut s = MultipoleSource::charge(q);
    if mode == Moments::Charges || scale == 0.0 {
        return s;
    }
    let dir = unit(rng);
    let mag = scale * rng.gen::<f64>();
    s.mu = dir.map(|v| v * mag);
    if mode == Moments::Quadrupoles {
        let mut t: [f64; 6] = [(); 6].map(|_| rng.gen_range(-1.0..1.0));
        let tr = (t[0] + t[3] + t[5]) / 3.0;
        t[0] -= tr;
        t[3] -= tr;
        t[5] -= tr;
        let frob = (t[0] * t[0] + t[3] * t[3] + t[5] * t[5] + 2.0 * (t[1] * t[1] + t[2] * t[2] + t[4] * t[4])).sqrt();
        let mag = scale * rng.gen::<f64>() / frob;
        s.theta = t.map(|v| v * mag);
    }
    s
}

fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v: Vec3 = [(); 3].map(|_| rng.gen_range(-1.0..1.0));
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.map(|c| c / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(count: usize, layout: Layout) -> GenSpec {
        GenSpec { layout, count, box_radius: 2.0, moments: Moments::Quadrupoles, seed: 7 }
    }

    #[test]
    fn neutral_without_dipole() {
        for layout in [Layout::Uniform, Layout::LatticeJittered] {
            for count in [1, 2, 5, 6, 64, 101] {
                let s = generate(&spec(count, layout)).unwrap();
                assert_eq!(s.len(), count);
                assert_eq!(s.total_charge(), 0.0);
                assert!(s.net_dipole().iter().all(|v| v.abs() < 1e-12));
                assert!(s.validated().is_ok(), "{layout:?} {count}");
            }
        }
    }

    #[test]
    fn moment_bounds() {
        let s = generate(&spec(200, Layout::Uniform)).unwrap();
        for src in &s.sources {
            let mu = src.mu.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(mu <= MOMENT_SCALE * src.q.abs() + 1e-15);
            assert!(src.theta_trace().abs() < 1e-15);
        }
    }

    #[test]
    fn reproducible() {
        let a = generate(&spec(50, Layout::LatticeJittered)).unwrap();
        let b = generate(&spec(50, Layout::LatticeJittered)).unwrap();
        assert_eq!(a, b);
    }
}
