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

//! Translation-invariant M2L operators between well-separated cells.
//!
//! The 316 admissible offsets fall into 16 orbits of the cube symmetry group.
//! Only one representative per orbit is assembled and compressed; any other
//! offset reuses it after permuting the node indices of both expansions.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::chebyshev::Grid1D;
use crate::error::{AnkhError, Result};
use crate::kernel::erfc;

/// Signed axis permutation with `Δ_i = sign_i · rep_{perm_i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub perm: [usize; 3],
    pub flip: [bool; 3],
}

/// Orbit representative (sorted absolute values) and the map back to `d`.
pub fn canonical(d: [i32; 3]) -> ([i32; 3], Symmetry) {
    let abs = d.map(|v| v.abs());
    let mut axes = [0usize, 1, 2];
    axes.sort_by_key(|&a| abs[a]);
    let mut perm = [0usize; 3];
    for (rank, &a) in axes.iter().enumerate() {
        perm[a] = rank;
    }
    let rep = [abs[axes[0]], abs[axes[1]], abs[axes[2]]];
    (rep, Symmetry { perm, flip: d.map(|v| v < 0) })
}

impl Symmetry {
    /// `out[k] = m[g(k)]` where node `g(k)` is the image of node `k`.
    pub fn gather(&self, m: &[f64], l: usize, out: &mut [f64]) {
        let mut k = [0usize; 3];
        for (n, o) in out.iter_mut().enumerate() {
            k[0] = n / (l * l);
            k[1] = (n / l) % l;
            k[2] = n % l;
            let g = [0, 1, 2].map(|i| {
                let v = k[self.perm[i]];
                if self.flip[i] {
                    l - 1 - v
                } else {
                    v
                }
            });
            *o = m[(g[0] * l + g[1]) * l + g[2]];
        }
    }
}

#[derive(Clone, Debug)]
pub enum M2lKind {
    Dense(Vec<f64>),
    /// `C ≈ Lᵀ R` with `rank x K` factors.
    Factored { rank: usize, left: Vec<f64>, right: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct M2LOperator {
    pub offset: [i32; 3],
    pub size: usize,
    pub kind: M2lKind,
}

impl M2LOperator {
    /// `ptᵀ C ps`.
    pub fn quad(&self, pt: &[f64], ps: &[f64]) -> f64 {
        let k = self.size;
        match &self.kind {
            M2lKind::Dense(c) => c.chunks_exact(k).zip(pt).map(|(row, &a)| a * dotv(row, ps)).sum(),
            M2lKind::Factored { rank, left, right } => (0..*rank)
                .map(|r| dotv(&left[r * k..(r + 1) * k], pt) * dotv(&right[r * k..(r + 1) * k], ps))
                .sum(),
        }
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            M2lKind::Dense(_) => self.size,
            M2lKind::Factored { rank, .. } => *rank,
        }
    }

    pub fn dense(&self) -> Vec<f64> {
        let k = self.size;
        match &self.kind {
            M2lKind::Dense(c) => c.clone(),
            M2lKind::Factored { rank, left, right } => {
                let mut c = vec![0.0; k * k];
                for r in 0..*rank {
                    for i in 0..k {
                        let a = left[r * k + i];
                        for j in 0..k {
                            c[i * k + j] += a * right[r * k + j];
                        }
                    }
                }
                c
            }
        }
    }
}

#[inline]
pub(crate) fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `C[k][l] = H(x_k - x_l - 2hΔ)` over tensor Chebyshev nodes of half side `h`.
pub fn dense_m2l(grid: &Grid1D, half: f64, xi: f64, offset: [i32; 3]) -> Vec<f64> {
    let l = grid.order();
    let k3 = l * l * l;
    let nodes: Vec<[f64; 3]> = (0..k3)
        .map(|n| {
            let r = grid.nodes();
            [half * r[n / (l * l)], half * r[(n / l) % l], half * r[n % l]]
        })
        .collect();
    let shift = offset.map(|d| 2.0 * half * d as f64);
    let mut c = vec![0.0; k3 * k3];
    c.par_chunks_mut(k3).enumerate().for_each(|(i, row)| {
        let x = nodes[i];
        for (j, v) in row.iter_mut().enumerate() {
            let y = nodes[j];
            let z = [x[0] - y[0] - shift[0], x[1] - y[1] - shift[1], x[2] - y[2] - shift[2]];
            let r = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
            *v = erfc(xi * r) / r;
        }
    });
    c
}

/// Truncated SVD keeping singular values above `tol·σ_0`, extended so a
/// cluster of (numerically) equal singular values is never split.
pub fn compress(c: &[f64], k: usize, tol: f64) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let m = faer::Mat::<f64>::from_fn(k, k, |i, j| c[i * k + j]);
    let svd = m.thin_svd().map_err(|_| AnkhError::Svd)?;
    let s = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    let s0 = s[0];
    let mut rank = (0..k).take_while(|&i| s[i] > tol * s0).count().max(1);
    while rank < k && s[rank] >= s[rank - 1] * (1.0 - 1e-6) {
        rank += 1;
    }
    let mut left = vec![0.0; rank * k];
    let mut right = vec![0.0; rank * k];
    for r in 0..rank {
        for i in 0..k {
            left[r * k + i] = u[(i, r)] * s[r];
            right[r * k + i] = v[(i, r)];
        }
    }
    Ok((rank, left, right))
}

/// Orbit representatives of all offsets with `max|Δ| ∈ {2, 3}`.
pub fn representatives() -> Vec<[i32; 3]> {
    let mut reps = Vec::new();
    for c in 2..=3 {
        for b in 0..=c {
            for a in 0..=b {
                reps.push([a, b, c]);
            }
        }
    }
    reps
}

/// Operators of one tree level.
#[derive(Clone, Debug)]
pub struct M2lTable {
    pub level: usize,
    pub order: usize,
    ops: BTreeMap<[i32; 3], M2LOperator>,
}

impl M2lTable {
    pub fn build(grid: &Grid1D, level: usize, half: f64, xi: f64, compressed: Option<f64>) -> Result<Self> {
        let l = grid.order();
        let k = l * l * l;
        let ops = representatives()
            .into_iter()
            .map(|rep| {
                let c = dense_m2l(grid, half, xi, rep);
                let kind = match compressed {
                    Some(tol) => {
                        let (rank, left, right) = compress(&c, k, tol)?;
                        M2lKind::Factored { rank, left, right }
                    }
                    None => M2lKind::Dense(c),
                };
                Ok((rep, M2LOperator { offset: rep, size: k, kind }))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self { level, order: l, ops })
    }

    pub fn operator(&self, rep: [i32; 3]) -> Option<&M2LOperator> {
        self.ops.get(&rep)
    }

    pub fn operators(&self) -> impl Iterator<Item = &M2LOperator> {
        self.ops.values()
    }

    /// `M_tᵀ C_Δ M_s`, with scratch buffers of length `L³`.
    pub fn energy(&self, offset: [i32; 3], mt: &[f64], ms: &[f64], scratch: &mut (Vec<f64>, Vec<f64>)) -> f64 {
        let (rep, sym) = canonical(offset);
        let op = &self.ops[&rep];
        sym.gather(mt, self.order, &mut scratch.0);
        sym.gather(ms, self.order, &mut scratch.1);
        op.quad(&scratch.0, &scratch.1)
    }
}
