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

//! Screened Coulomb kernel `H(x, y) = erfc(ξ|x - y|) / |x - y|`, its Cartesian
//! derivatives and the point-multipole pair energy.
//!
//! Derivatives are assembled from the radial functions
//! `B_n = (-1/r d/dr)^n B_0`, which obey an upward recurrence. For a radial
//! function `F(r²/2)` the partial derivative along `γ = (a, b, c)` is
//!
//! ```text
//! ∂^γ F = Σ_{i,j,k} c(a,i) c(b,j) c(c,k) x^{a-2i} y^{b-2j} z^{c-2k} (-1)^m B_m,
//! m = |γ| - i - j - k,  c(a,i) = a! / (2^i i! (a-2i)!)
//! ```

use std::f64::consts::PI;

use crate::error::{AnkhError, Result};
use crate::model::{norm, sub, MultipoleSource, ParticleSystem, Vec3};

/// Complementary error function.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn h_eval(x: Vec3, y: Vec3, xi: f64) -> Result<f64> {
    let r = norm(sub(x, y));
    if r == 0.0 {
        return Err(AnkhError::Singular);
    }
    Ok(erfc(xi * r) / r)
}

/// `B_0..B_nmax` at distance `r`; `xi = 0` gives the bare Coulomb kernel.
#[inline]
pub fn radial_functions(r: f64, xi: f64, nmax: usize) -> [f64; 5] {
    let mut b = [0.0; 5];
    let r2inv = 1.0 / (r * r);
    if xi == 0.0 {
        b[0] = 1.0 / r;
        for n in 1..=nmax {
            b[n] = (2 * n - 1) as f64 * b[n - 1] * r2inv;
        }
        return b;
    }
    let xr = xi * r;
    b[0] = erfc(xr) / r;
    if nmax == 0 {
        return b;
    }
    let g = (-xr * xr).exp() / PI.sqrt();
    // (2ξ²)^n / ξ, starting at n = 1
    let mut s = 2.0 * xi;
    let xi2 = 2.0 * xi * xi;
    for n in 1..=nmax {
        b[n] = ((2 * n - 1) as f64 * b[n - 1] + s * g) * r2inv;
        s *= xi2;
    }
    b
}

const HERMITE: [[f64; 3]; 5] = [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 3.0, 0.0], [1.0, 6.0, 3.0]];

#[inline]
fn slot(g: [usize; 3]) -> usize {
    g[0] * 25 + g[1] * 5 + g[2]
}

/// All partials `∂_z^γ H(z)` with `|γ| <= 4`, `z = x - y`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTensor {
    d: [f64; 125],
    max_order: usize,
}

impl DerivativeTensor {
    /// Builds the tensor up to `max_order <= 4` from the radial functions at `z`.
    pub fn from_radial(z: Vec3, b: &[f64; 5], max_order: usize) -> Self {
        assert!(max_order <= 4);
        let mut d = [0.0; 125];
        let mut pw = [[1.0; 5]; 3];
        for a in 0..3 {
            for k in 1..5 {
                pw[a][k] = pw[a][k - 1] * z[a];
            }
        }
        for ga in 0..=max_order {
            for gb in 0..=max_order - ga {
                for gc in 0..=max_order - ga - gb {
                    let tot = ga + gb + gc;
                    let mut v = 0.0;
                    for i in 0..=ga / 2 {
                        for j in 0..=gb / 2 {
                            for k in 0..=gc / 2 {
                                let m = tot - i - j - k;
                                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                                v += HERMITE[ga][i] * HERMITE[gb][j] * HERMITE[gc][k]
                                    * pw[0][ga - 2 * i]
                                    * pw[1][gb - 2 * j]
                                    * pw[2][gc - 2 * k]
                                    * sign
                                    * b[m];
                            }
                        }
                    }
                    d[slot([ga, gb, gc])] = v;
                }
            }
        }
        Self { d, max_order }
    }

    /// `∂_z^γ H` for `|γ| <= max_order`.
    #[inline]
    pub fn partial(&self, g: [usize; 3]) -> f64 {
        debug_assert!(g[0] + g[1] + g[2] <= self.max_order);
        self.d[slot(g)]
    }

    /// `∂_x^α ∂_y^β H(x, y)`, using `∂_y = -∂_z`.
    pub fn get(&self, alpha: [usize; 3], beta: [usize; 3]) -> f64 {
        let nb = beta[0] + beta[1] + beta[2];
        let v = self.partial([alpha[0] + beta[0], alpha[1] + beta[1], alpha[2] + beta[2]]);
        if nb % 2 == 0 {
            v
        } else {
            -v
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }
}

pub fn h_derivatives(x: Vec3, y: Vec3, xi: f64) -> Result<DerivativeTensor> {
    let z = sub(x, y);
    let r = norm(z);
    if r == 0.0 {
        return Err(AnkhError::Singular);
    }
    Ok(DerivativeTensor::from_radial(z, &radial_functions(r, xi, 4), 4))
}

/// Multi-indices and weights of `q + μ·∇ + Σ Θ_ij ∂_i ∂_j`.
pub(crate) fn operator_terms(s: &MultipoleSource, order: usize) -> ([([usize; 3], f64); 10], usize) {
    let mut t = [([0usize; 3], 0.0); 10];
    t[0] = ([0, 0, 0], s.q);
    let mut n = 1;
    if order >= 1 {
        for a in 0..3 {
            let mut g = [0; 3];
            g[a] = 1;
            t[n] = (g, s.mu[a]);
            n += 1;
        }
    }
    if order >= 2 {
        let th = &s.theta;
        t[n] = ([2, 0, 0], th[0]);
        t[n + 1] = ([1, 1, 0], 2.0 * th[1]);
        t[n + 2] = ([1, 0, 1], 2.0 * th[2]);
        t[n + 3] = ([0, 2, 0], th[3]);
        t[n + 4] = ([0, 1, 1], 2.0 * th[4]);
        t[n + 5] = ([0, 0, 2], th[5]);
        n += 6;
    }
    (t, n)
}

/// Pair energy for a precomputed separation `z = xa - xb`, `r = |z| > 0`.
#[inline]
pub(crate) fn pair_energy(z: Vec3, r: f64, sa: &MultipoleSource, sb: &MultipoleSource, xi: f64) -> f64 {
    let (oa, ob) = (sa.order(), sb.order());
    if oa + ob == 0 {
        return sa.q * sb.q * radial_functions(r, xi, 0)[0];
    }
    let b = radial_functions(r, xi, oa + ob);
    let d = DerivativeTensor::from_radial(z, &b, oa + ob);
    let (ta, na) = operator_terms(sa, oa);
    let (tb, nb) = operator_terms(sb, ob);
    let mut e = 0.0;
    for &(beta, wb) in &tb[..nb] {
        if wb == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for &(alpha, wa) in &ta[..na] {
            row += wa * d.get(alpha, beta);
        }
        e += wb * row;
    }
    e
}

/// `𝔇_a 𝔇_b H(xa, xb)`.
pub fn pair_interaction(xa: Vec3, sa: &MultipoleSource, xb: Vec3, sb: &MultipoleSource, xi: f64) -> Result<f64> {
    let z = sub(xa, xb);
    let r = norm(z);
    if r == 0.0 {
        return Err(AnkhError::Singular);
    }
    Ok(pair_energy(z, r, sa, sb, xi))
}

/// Self-interaction correction of the screened sum.
///
/// For traceless quadrupoles this is
/// `-ξ/√π Σ (q² + 2ξ²/3 |μ|² + 8ξ⁴/5 Θ:Θ)`; general symmetric quadrupoles add
/// the trace terms.
pub fn self_energy(system: &ParticleSystem, xi: f64) -> f64 {
    let x2 = xi * xi;
    let x4 = x2 * x2;
    let mut acc = 0.0;
    for s in &system.sources {
        let tr = s.theta_trace();
        let t = &s.theta;
        let tt = t[0] * t[0] + t[3] * t[3] + t[5] * t[5] + 2.0 * (t[1] * t[1] + t[2] * t[2] + t[4] * t[4]);
        let mu2 = s.mu[0] * s.mu[0] + s.mu[1] * s.mu[1] + s.mu[2] * s.mu[2];
        acc += s.q * s.q + 2.0 * x2 / 3.0 * mu2 - 4.0 * x2 / 3.0 * s.q * tr + 0.8 * x4 * tr * tr + 1.6 * x4 * tt;
    }
    -xi / PI.sqrt() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_distance_zero_xi() {
        assert_eq!(h_eval([1.0, 0.0, 0.0], [0.0; 3], 0.0).unwrap(), 1.0);
        assert!(matches!(h_eval([1.0; 3], [1.0; 3], 0.01), Err(AnkhError::Singular)));
    }

    #[test]
    fn zeroth_entry_is_kernel() {
        let x = [0.3, -0.4, 0.5];
        let y = [-0.2, 0.1, 0.0];
        let d = h_derivatives(x, y, 0.3).unwrap();
        assert_eq!(d.get([0; 3], [0; 3]), h_eval(x, y, 0.3).unwrap());
    }

    #[test]
    fn mixed_symmetry() {
        let d = h_derivatives([0.7, 0.2, -0.9], [0.0, 0.5, 0.1], 0.8).unwrap();
        let a = d.get([1, 0, 0], [0, 1, 0]);
        let b = d.get([0, 1, 0], [1, 0, 0]);
        assert!((a - b).abs() <= 1e-15 * a.abs());
    }

    #[test]
    fn bare_radial_matches_limit() {
        let b0 = radial_functions(1.7, 0.0, 4);
        let b1 = radial_functions(1.7, 1e-9, 4);
        for n in 0..5 {
            assert!((b0[n] - b1[n]).abs() < 1e-8 * b0[n]);
        }
    }

    #[test]
    fn self_energy_closed_forms() {
        let one = ParticleSystem::charges(vec![[0.0; 3]], &[1.0], 1.0).unwrap();
        assert!((self_energy(&one, 0.01) + 0.01 / PI.sqrt()).abs() < 1e-18);
        let dip = ParticleSystem::new(vec![[0.0; 3]], vec![MultipoleSource::new(0.0, [1.0, 0.0, 0.0], [0.0; 6])], 1.0).unwrap();
        assert!((self_energy(&dip, 1.0) + 2.0 / 3.0 / PI.sqrt()).abs() < 1e-15);
        let empty = ParticleSystem::charges(vec![], &[], 1.0).unwrap();
        assert_eq!(self_energy(&empty, 0.5), 0.0);
    }
}
