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

//! Far periodic images `|I|∞ >= 2` acting on the root expansion.
//!
//! With equispaced root nodes, `Σ_I C[B, B+I]` is a 3-level Toeplitz matrix in
//! the node index difference. It is embedded in a circulant of size
//! `(2L-1)^3` and applied through its DFT diagonal.

use std::collections::HashMap;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{AnkhError, Result};
use crate::kernel::erfc;
use crate::spectral::FftNd;

pub struct PeriodicOperator {
    order: usize,
    /// Circulant eigenvalues divided by the embedding size.
    diag: Vec<Complex64>,
    fft: FftNd,
}

/// `Σ_{I ∈ Z_p, |I|∞ >= pmin} H(z + 2 r_B I)`.
pub(crate) fn image_shell_sum(z: [f64; 3], box_radius: f64, xi: f64, pmin: usize, p: usize) -> f64 {
    let p = p as i32;
    let pmin = pmin as i32;
    let period = 2.0 * box_radius;
    let mut acc = 0.0;
    for i in -p..=p {
        let x = z[0] + period * i as f64;
        for j in -p..=p {
            let y = z[1] + period * j as f64;
            let inner = i.abs().max(j.abs()) >= pmin;
            for k in -p..=p {
                if !inner && k.abs() < pmin {
                    continue;
                }
                let w = z[2] + period * k as f64;
                let r = (x * x + y * y + w * w).sqrt();
                acc += erfc(xi * r) / r;
            }
        }
    }
    acc
}

impl PeriodicOperator {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    /// `½ mᵀ (Σ_I C[B, B+I]) m` for an expansion on the equispaced root grid.
    pub fn energy(&self, m: &[f64]) -> Result<f64> {
        let l = self.order;
        if m.len() != l * l * l {
            return Err(AnkhError::Dimension { expected: l * l * l, got: m.len() });
        }
        let p = 2 * l - 1;
        let mut buf = vec![Complex64::new(0.0, 0.0); p * p * p];
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    buf[(i * p + j) * p + k].re = m[(i * l + j) * l + k];
                }
            }
        }
        self.fft.forward(&mut buf);
        buf.iter_mut().zip(&self.diag).for_each(|(b, d)| *b *= d);
        self.fft.inverse(&mut buf);
        let mut acc = 0.0;
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    acc += m[(i * l + j) * l + k] * buf[(i * p + j) * p + k].re;
                }
            }
        }
        Ok(0.5 * acc)
    }
}

/// Operator over images `2 r_B I`, `2 <= |I|∞ <= p`, on an order-`order`
/// equispaced grid of the box.
pub fn build_periodic_operator(order: usize, box_radius: f64, xi: f64, p: usize) -> Result<PeriodicOperator> {
    if p < 2 {
        return Err(AnkhError::Config("periodic far images need p >= 2".into()));
    }
    if order < 2 {
        return Err(AnkhError::Config("root grid order must be >= 2".into()));
    }
    let l = order as i32;
    let n = 2 * order - 1;
    let step = 2.0 * box_radius / (l - 1) as f64;
    // the image set is invariant under signed axis permutations
    let mut keys: Vec<[i32; 3]> = Vec::new();
    for a in 0..l {
        for b in a..l {
            for c in b..l {
                keys.push([a, b, c]);
            }
        }
    }
    let values: HashMap<[i32; 3], f64> = keys
        .par_iter()
        .map(|&d| (d, image_shell_sum(d.map(|v| v as f64 * step), box_radius, xi, 2, p)))
        .collect();
    let mut col = vec![Complex64::new(0.0, 0.0); n * n * n];
    let wrap = |m: usize| if m < order { m as i32 } else { m as i32 - n as i32 };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut d = [wrap(i).abs(), wrap(j).abs(), wrap(k).abs()];
                d.sort_unstable();
                col[(i * n + j) * n + k].re = values[&d];
            }
        }
    }
    let fft = FftNd::new(&[n, n, n]);
    fft.forward(&mut col);
    let scale = 1.0 / (n * n * n) as f64;
    col.iter_mut().for_each(|c| *c *= scale);
    Ok(PeriodicOperator { order, diag: col, fft })
}
