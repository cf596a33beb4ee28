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

//! Particles, multipoles, configuration and energy reports.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AnkhError, Result};

pub type Vec3 = [f64; 3];

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Charge, dipole and quadrupole of one particle.
///
/// The quadrupole is a general symmetric matrix stored as
/// `[xx, xy, xz, yy, yz, zz]` and acts as `Σ_ij Θ_ij ∂_i ∂_j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MultipoleSource {
    pub q: f64,
    pub mu: Vec3,
    pub theta: [f64; 6],
}

impl MultipoleSource {
    pub fn charge(q: f64) -> Self {
        Self { q, ..Default::default() }
    }

    pub fn new(q: f64, mu: Vec3, theta: [f64; 6]) -> Self {
        Self { q, mu, theta }
    }

    pub fn theta_matrix(&self) -> [[f64; 3]; 3] {
        let t = &self.theta;
        [[t[0], t[1], t[2]], [t[1], t[3], t[4]], [t[2], t[4], t[5]]]
    }

    pub fn theta_trace(&self) -> f64 {
        self.theta[0] + self.theta[3] + self.theta[5]
    }

    /// Highest derivative order carried by the source: 0, 1 or 2.
    pub fn order(&self) -> usize {
        if self.theta.iter().any(|&t| t != 0.0) {
            2
        } else if self.mu.iter().any(|&m| m != 0.0) {
            1
        } else {
            0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.q == 0.0 && self.order() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.mu.iter().all(|v| v.is_finite()) && self.theta.iter().all(|v| v.is_finite())
    }
}

/// Point multipoles in the centered cube `[-r_B, r_B]^3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleSystem {
    pub positions: Vec<Vec3>,
    pub sources: Vec<MultipoleSource>,
    pub box_radius: f64,
}

impl ParticleSystem {
    pub fn new(positions: Vec<Vec3>, sources: Vec<MultipoleSource>, box_radius: f64) -> Result<Self> {
        if positions.len() != sources.len() {
            return Err(AnkhError::Dimension { expected: positions.len(), got: sources.len() });
        }
        Ok(Self { positions, sources, box_radius })
    }

    /// Unit-free constructor for plain charges.
    pub fn charges(positions: Vec<Vec3>, q: &[f64], box_radius: f64) -> Result<Self> {
        Self::new(positions, q.iter().map(|&q| MultipoleSource::charge(q)).collect(), box_radius)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_charge(&self) -> f64 {
        self.sources.iter().map(|s| s.q).sum()
    }

    /// Net dipole `Σ (q x + μ)`.
    pub fn net_dipole(&self) -> Vec3 {
        let mut d = [0.0; 3];
        for (x, s) in self.positions.iter().zip(&self.sources) {
            for a in 0..3 {
                d[a] += s.q * x[a] + s.mu[a];
            }
        }
        d
    }

    pub fn max_order(&self) -> usize {
        self.sources.iter().map(|s| s.order()).max().unwrap_or(0)
    }

    /// Fails with the full violation list if any invariant is broken.
    pub fn validated(&self) -> Result<()> {
        let v = validate_system(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(AnkhError::InvalidSystem(v))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    BoxRadius,
    NonFinite,
    OutsideBox,
    DuplicatePosition { other: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::BoxRadius => write!(f, "box radius must be positive and finite"),
            Rule::NonFinite => write!(f, "particle {}: non-finite value", self.index),
            Rule::OutsideBox => write!(f, "particle {}: outside box", self.index),
            Rule::DuplicatePosition { other } => {
                write!(f, "particle {}: duplicate position of particle {}", self.index, other)
            }
        }
    }
}

/// Lists every broken invariant; empty when the system is valid.
pub fn validate_system(system: &ParticleSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    let rb = system.box_radius;
    if !(rb.is_finite() && rb > 0.0) {
        out.push(Violation { index: 0, rule: Rule::BoxRadius });
        return out;
    }
    for (i, (x, s)) in system.positions.iter().zip(&system.sources).enumerate() {
        if !x.iter().all(|v| v.is_finite()) || !s.is_finite() {
            out.push(Violation { index: i, rule: Rule::NonFinite });
        } else if x.iter().any(|v| v.abs() > rb) {
            out.push(Violation { index: i, rule: Rule::OutsideBox });
        }
    }
    let mut order: Vec<usize> = (0..system.len()).collect();
    let key = |i: usize| system.positions[i];
    order.sort_by(|&a, &b| {
        let (pa, pb) = (key(a), key(b));
        pa[0].total_cmp(&pb[0]).then(pa[1].total_cmp(&pb[1])).then(pa[2].total_cmp(&pb[2])).then(a.cmp(&b))
    });
    for w in order.windows(2) {
        if key(w[0]) == key(w[1]) {
            out.push(Violation { index: w[1], rule: Rule::DuplicatePosition { other: w[0] } });
        }
    }
    out.sort_by_key(|v| v.index);
    out
}

/// Parameters shared by the engines and the oracle.
///
/// `images` is the image half-width `p`; zero means an isolated box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EwaldConfig {
    pub xi: f64,
    pub images: usize,
    pub order_cheb: usize,
    pub order_equi: usize,
    /// Octree depth; chosen from the particle count when `None`.
    pub depth: Option<usize>,
    pub svd_tol: f64,
    pub recip_cutoff: usize,
    /// Order of the far-image interpolation table; `order_cheb + 1` when `None`.
    pub far_order: Option<usize>,
}

impl Default for EwaldConfig {
    fn default() -> Self {
        Self {
            xi: 0.01,
            images: 15,
            order_cheb: 8,
            order_equi: 8,
            depth: None,
            svd_tol: 1e-7,
            recip_cutoff: 8,
            far_order: None,
        }
    }
}

impl EwaldConfig {
    pub fn periodic(&self) -> bool {
        self.images > 0
    }

    pub fn far_table_order(&self) -> usize {
        self.far_order.unwrap_or(self.order_cheb + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(AnkhError::Config(m.to_string()));
        if !(self.xi.is_finite() && self.xi > 0.0) {
            return bad("xi must be positive");
        }
        if self.images == 1 {
            return bad("periodic evaluation needs images >= 2");
        }
        if self.order_cheb < 2 || self.order_equi < 2 {
            return bad("interpolation orders must be >= 2");
        }
        if self.depth == Some(0) {
            return bad("depth must be >= 1");
        }
        if !(self.svd_tol > 0.0 && self.svd_tol < 1.0) {
            return bad("svd_tol must lie in (0, 1)");
        }
        if self.far_order.is_some_and(|o| o < 2) {
            return bad("far-image table order must be >= 2");
        }
        Ok(())
    }
}

/// Wall-clock seconds per phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub precompute: f64,
    pub interpolation: f64,
    pub far_field: f64,
    pub near_field: f64,
    pub periodic_far: f64,
    pub self_energy: f64,
}

impl PhaseTimings {
    /// Evaluation time, precompute excluded.
    pub fn evaluation(&self) -> f64 {
        self.interpolation + self.far_field + self.near_field + self.periodic_far + self.self_energy
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_total: f64,
    pub e_self: f64,
    pub e_near: f64,
    pub e_far: f64,
    pub e_periodic_far: f64,
    pub e_reciprocal: f64,
    pub timings: PhaseTimings,
}

impl EnergyReport {
    pub fn from_parts(e_self: f64, e_near: f64, e_far: f64, e_periodic_far: f64, e_reciprocal: f64) -> Self {
        let mut r = Self { e_self, e_near, e_far, e_periodic_far, e_reciprocal, ..Default::default() };
        r.e_total = r.component_sum();
        r
    }

    pub fn component_sum(&self) -> f64 {
        self.e_self + self.e_near + self.e_far + self.e_periodic_far + self.e_reciprocal
    }
}
