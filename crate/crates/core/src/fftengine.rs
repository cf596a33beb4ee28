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

//! Block-Toeplitz FFT engine.
//!
//! Leaf modified charges are moved onto equispaced leaf grids and concatenated
//! into one vector `v` ordered by `(cell_x, node_x, cell_y, node_y, cell_z,
//! node_z)`. The far-field matrix `A` between non-adjacent leaves depends only
//! on cell and node differences, so it embeds in a 6-level circulant of shape
//! `(2n-1, 2L-1)` per axis. Its spectrum is real, and
//! `vᵀ A v = Σ_k Re(d_k) |w_k|²` with `w = DFT(pad(v))` needs one transform.
//!
//! In periodic mode each kernel entry is the lattice sum over images: those in
//! `Z_2` directly, the rest through an interpolated table over `[-2r_B, 2r_B]^3`.

use std::time::Instant;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::chebyshev::{cheb_to_equi_1d, ChargeInterpolator, Grid1D};
use crate::error::{AnkhError, Result};
use crate::fmm::{image_shell_sum, leaf_charges, near_sorted, LeafSorted};
use crate::kernel::{erfc, self_energy};
use crate::model::{EnergyReport, EwaldConfig, ParticleSystem, PhaseTimings, Vec3};
use crate::octree::{build_tree, default_depth, interaction_lists, PerfectOctree};
use crate::spectral::FftNd;
use crate::tensor::apply3;

/// Interpolated lattice sum over images `3 <= |I|∞ <= p`.
#[derive(Clone, Debug)]
pub struct FarImageTable {
    box_radius: f64,
    grid: Grid1D,
    values: Vec<f64>,
}

pub fn build_far_image_table(config: &EwaldConfig, box_radius: f64) -> Result<FarImageTable> {
    let p = config.images;
    if p < 2 {
        return Err(AnkhError::Config("far-image table needs p >= 2".into()));
    }
    let l = config.far_table_order();
    let grid = Grid1D::equispaced(l);
    let mut values = vec![0.0; l * l * l];
    if p >= 3 {
        // symmetric grid: nodes k and l-1-k are mirror images
        let fold = |k: usize| k.min(l - 1 - k);
        let half = l.div_ceil(2);
        let mut keys = Vec::new();
        for a in 0..half {
            for b in a..half {
                for c in b..half {
                    keys.push([a, b, c]);
                }
            }
        }
        let nodes = grid.nodes().to_vec();
        let sums: Vec<f64> = keys
            .par_iter()
            .map(|k| image_shell_sum(k.map(|i| 2.0 * box_radius * nodes[i]), box_radius, config.xi, 3, p))
            .collect();
        let idx = |k: [usize; 3]| keys.binary_search(&k).unwrap();
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    let mut key = [fold(i), fold(j), fold(k)];
                    key.sort_unstable();
                    values[(i * l + j) * l + k] = sums[idx(key)];
                }
            }
        }
    }
    Ok(FarImageTable { box_radius, grid, values })
}

impl FarImageTable {
    pub fn order(&self) -> usize {
        self.grid.order()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interpolated `Σ_{3 <= |I|∞ <= p} H(z + 2 r_B I)` for `z ∈ [-2r_B, 2r_B]^3`.
    pub fn eval_far(&self, z: Vec3) -> f64 {
        let l = self.grid.order();
        let s = 0.5 / self.box_radius;
        let b = z.map(|v| self.grid.basis((v * s).clamp(-1.0, 1.0)));
        let mut acc = 0.0;
        for i in 0..l {
            for j in 0..l {
                let w = b[0][i] * b[1][j];
                if w == 0.0 {
                    continue;
                }
                let row = &self.values[(i * l + j) * l..(i * l + j + 1) * l];
                acc += w * row.iter().zip(&b[2]).map(|(x, y)| x * y).sum::<f64>();
            }
        }
        acc
    }
}

/// Leaf equispaced expansions in the 6D order; length `(n L)^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalChargeVector {
    pub cells: usize,
    pub order: usize,
    pub values: Vec<f64>,
}

impl GlobalChargeVector {
    /// Position of node `k` of cell `c` in `v`.
    pub fn index(cells: usize, order: usize, c: [usize; 3], k: [usize; 3]) -> usize {
        let m = cells * order;
        let f = [0, 1, 2].map(|a| c[a] * order + k[a]);
        (f[0] * m + f[1]) * m + f[2]
    }
}

/// Maps leaf Chebyshev expansions through `E` (`L_u x L_c`) and scatters them
/// into the global vector.
pub fn assemble_v(tree: &PerfectOctree, leaves: &[f64], to_equi: &[f64], order_cheb: usize, order_equi: usize) -> Result<GlobalChargeVector> {
    let kc = order_cheb.pow(3);
    let n = 1usize << tree.depth();
    if leaves.len() != tree.n_leaves() * kc || to_equi.len() != order_equi * order_cheb {
        return Err(AnkhError::Dimension { expected: tree.n_leaves() * kc, got: leaves.len() });
    }
    let l = order_equi;
    let mut values = vec![0.0; (n * l).pow(3)];
    let mapped: Vec<Option<Vec<f64>>> = leaves
        .par_chunks(kc)
        .map(|q| q.iter().any(|&v| v != 0.0).then(|| apply3(to_equi, to_equi, to_equi, l, order_cheb, q)))
        .collect();
    for (leaf, m) in mapped.iter().enumerate() {
        let Some(m) = m else { continue };
        let c = tree.triple(tree.depth(), leaf);
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    values[GlobalChargeVector::index(n, l, c, [i, j, k])] = m[(i * l + j) * l + k];
                }
            }
        }
    }
    Ok(GlobalChargeVector { cells: n, order: l, values })
}

/// DFT diagonal of the circulant embedding of `A`, divided by its size.
pub struct SpectralDiagonal {
    cells: usize,
    order: usize,
    diag: Vec<Complex64>,
    fft: FftNd,
}

/// Kernel between node offsets: cell offset `dc` and node offset `dk`, summed
/// over images when periodic, masked to pairs of non-adjacent leaves.
struct EntryKernel<'a> {
    cells: i32,
    half: f64,
    step: f64,
    box_radius: f64,
    xi: f64,
    near_images: i32,
    far: Option<&'a FarImageTable>,
}

impl EntryKernel<'_> {
    fn eval(&self, dc: [i32; 3], dk: [i32; 3]) -> f64 {
        let z = [0, 1, 2].map(|a| 2.0 * self.half * dc[a] as f64 + self.step * dk[a] as f64);
        let p = self.near_images;
        let period = 2.0 * self.box_radius;
        let mut acc = 0.0;
        for i in -p..=p {
            for j in -p..=p {
                for k in -p..=p {
                    let img = [i, j, k];
                    let sep = (0..3).map(|a| (dc[a] + self.cells * img[a]).abs()).max().unwrap();
                    if sep < 2 {
                        continue;
                    }
                    let w = [0, 1, 2].map(|a| z[a] + period * img[a] as f64);
                    let r = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
                    acc += erfc(self.xi * r) / r;
                }
            }
        }
        if let Some(t) = self.far {
            acc += t.eval_far(z);
        }
        acc
    }
}

pub fn build_spectral_diagonal(
    config: &EwaldConfig,
    box_radius: f64,
    depth: usize,
    far_table: Option<&FarImageTable>,
) -> Result<SpectralDiagonal> {
    config.validate()?;
    let n = 1usize << depth;
    let l = config.order_equi;
    let (pc, pn) = (2 * n - 1, 2 * l - 1);
    let f = pc * pn;
    let half = box_radius / n as f64;
    let kernel = EntryKernel {
        cells: n as i32,
        half,
        step: 2.0 * half / (l - 1) as f64,
        box_radius,
        xi: config.xi,
        near_images: if config.periodic() { config.images.min(2) as i32 } else { 0 },
        far: if config.periodic() && config.images >= 3 { far_table } else { None },
    };
    if config.periodic() && config.images >= 3 && far_table.is_none() {
        return Err(AnkhError::Config("periodic diagonal needs a far-image table".into()));
    }
    // per-axis atom (dc, dk); the kernel is invariant under negating an atom
    // and under permuting axes, so only sorted non-negative triples are computed
    let atom = |fused: usize| -> (i32, i32) {
        let (rc, rk) = (fused / pn, fused % pn);
        let dc = if rc < n { rc as i32 } else { rc as i32 - pc as i32 };
        let dk = if rk < l { rk as i32 } else { rk as i32 - pn as i32 };
        (dc, dk)
    };
    let canon: Vec<(i32, i32)> = (0..f)
        .map(|i| {
            let a = atom(i);
            if a >= (0, 0) {
                a
            } else {
                (-a.0, -a.1)
            }
        })
        .collect();
    let mut reps: Vec<(i32, i32)> = canon.clone();
    reps.sort_unstable();
    reps.dedup();
    let nr = reps.len();
    let rank: Vec<usize> = canon.iter().map(|a| reps.binary_search(a).unwrap()).collect();
    let mut keys = Vec::new();
    for a in 0..nr {
        for b in a..nr {
            for c in b..nr {
                keys.push([a, b, c]);
            }
        }
    }
    let vals: Vec<f64> = keys
        .par_iter()
        .map(|k| {
            let (x, y, z) = (reps[k[0]], reps[k[1]], reps[k[2]]);
            kernel.eval([x.0, y.0, z.0], [x.1, y.1, z.1])
        })
        .collect();
    // offsets of sorted triples in `keys`
    let mut first = vec![0usize; nr + 1];
    let mut second = vec![0usize; nr + 1];
    for i in 0..nr {
        first[i + 1] = first[i] + (nr - i) * (nr - i + 1) / 2;
        second[i + 1] = second[i] + (nr - i);
    }
    let lookup = |a: usize, b: usize, c: usize| {
        let mut s = [a, b, c];
        s.sort_unstable();
        let [a, b, c] = s;
        vals[first[a] + second[b] - second[a] + (c - b)]
    };
    let mut col = vec![Complex64::new(0.0, 0.0); f * f * f];
    col.par_chunks_mut(f * f).enumerate().for_each(|(x, plane)| {
        for y in 0..f {
            for z in 0..f {
                plane[y * f + z].re = lookup(rank[x], rank[y], rank[z]);
            }
        }
    });
    let fft = FftNd::new(&[pc, pn, pc, pn, pc, pn]);
    fft.forward(&mut col);
    let scale = 1.0 / (f * f * f) as f64;
    col.par_iter_mut().for_each(|c| *c *= scale);
    Ok(SpectralDiagonal { cells: n, order: l, diag: col, fft })
}

impl SpectralDiagonal {
    pub fn embedding_dims(&self) -> (usize, usize) {
        (2 * self.cells - 1, 2 * self.order - 1)
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    /// Largest `|Im d| / max|d|`.
    pub fn max_relative_imag(&self) -> f64 {
        let scale = self.diag.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        self.diag.iter().map(|d| d.im.abs()).fold(0.0, f64::max) / scale
    }

    fn pad(&self, v: &[f64]) -> Result<Vec<Complex64>> {
        let (n, l) = (self.cells, self.order);
        let m = n * l;
        if v.len() != m * m * m {
            return Err(AnkhError::Dimension { expected: m * m * m, got: v.len() });
        }
        let (_, pn) = self.embedding_dims();
        let f = (2 * n - 1) * pn;
        let mut buf = vec![Complex64::new(0.0, 0.0); f * f * f];
        let fused = |i: usize| (i / l) * pn + i % l;
        for x in 0..m {
            for y in 0..m {
                let base = (fused(x) * f + fused(y)) * f;
                let src = &v[(x * m + y) * m..(x * m + y + 1) * m];
                for (z, &val) in src.iter().enumerate() {
                    buf[base + fused(z)].re = val;
                }
            }
        }
        Ok(buf)
    }

    /// `Σ_k Re(d_k) |w_k|²` with `w = DFT(pad(v))`, equal to `vᵀ A v`.
    pub fn quadratic(&self, v: &[f64]) -> Result<f64> {
        let mut w = self.pad(v)?;
        self.fft.forward(&mut w);
        let part: Vec<f64> = w
            .par_chunks(1 << 12)
            .zip(self.diag.par_chunks(1 << 12))
            .map(|(w, d)| w.iter().zip(d).map(|(w, d)| d.re * w.norm_sqr()).sum())
            .collect();
        Ok(part.iter().sum())
    }

    /// `A v` by forward transform, diagonal scaling, inverse transform and
    /// restriction.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut w = self.pad(v)?;
        self.fft.forward(&mut w);
        w.iter_mut().zip(&self.diag).for_each(|(w, d)| *w *= d);
        self.fft.inverse(&mut w);
        let (n, l) = (self.cells, self.order);
        let m = n * l;
        let (_, pn) = self.embedding_dims();
        let f = (2 * n - 1) * pn;
        let fused = |i: usize| (i / l) * pn + i % l;
        let mut out = vec![0.0; m * m * m];
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    out[(x * m + y) * m + z] = w[(fused(x) * f + fused(y)) * f + fused(z)].re;
                }
            }
        }
        Ok(out)
    }
}

/// Precomputed diagonal and interpolation operators for one box and depth.
pub struct FftEngine {
    config: EwaldConfig,
    box_radius: f64,
    depth: usize,
    interp: ChargeInterpolator,
    to_equi: Vec<f64>,
    far_table: Option<FarImageTable>,
    diag: SpectralDiagonal,
    precompute: f64,
}

impl FftEngine {
    pub fn new(config: &EwaldConfig, box_radius: f64, depth: usize) -> Result<Self> {
        config.validate()?;
        if depth == 0 {
            return Err(AnkhError::Config("tree depth must be >= 1".into()));
        }
        if !(box_radius.is_finite() && box_radius > 0.0) {
            return Err(AnkhError::Config("box radius must be positive".into()));
        }
        let start = Instant::now();
        let interp = ChargeInterpolator::new(config.order_cheb);
        let to_equi = cheb_to_equi_1d(interp.grid(), &Grid1D::equispaced(config.order_equi));
        let far_table = if config.periodic() && config.images >= 3 {
            Some(build_far_image_table(config, box_radius)?)
        } else {
            None
        };
        let diag = build_spectral_diagonal(config, box_radius, depth, far_table.as_ref())?;
        Ok(Self {
            config: config.clone(),
            box_radius,
            depth,
            interp,
            to_equi,
            far_table,
            diag,
            precompute: start.elapsed().as_secs_f64(),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn precompute_seconds(&self) -> f64 {
        self.precompute
    }

    pub fn diagonal(&self) -> &SpectralDiagonal {
        &self.diag
    }

    pub fn far_table(&self) -> Option<&FarImageTable> {
        self.far_table.as_ref()
    }

    /// Global vector `v` of a system.
    pub fn charge_vector(&self, system: &ParticleSystem) -> Result<GlobalChargeVector> {
        let tree = build_tree(system, self.depth)?;
        let data = LeafSorted::new(&tree, system);
        let leaves = leaf_charges(&self.interp, &tree, &data)?;
        assemble_v(&tree, &leaves, &self.to_equi, self.config.order_cheb, self.config.order_equi)
    }

    pub fn evaluate(&self, system: &ParticleSystem) -> Result<EnergyReport> {
        system.validated()?;
        if system.box_radius != self.box_radius {
            return Err(AnkhError::Config(format!(
                "engine built for box radius {}, system has {}",
                self.box_radius, system.box_radius
            )));
        }
        let xi = self.config.xi;
        let mut times = PhaseTimings { precompute: self.precompute, ..Default::default() };

        let clock = Instant::now();
        let tree = build_tree(system, self.depth)?;
        let lists = interaction_lists(&tree, self.config.periodic());
        let data = LeafSorted::new(&tree, system);
        let leaves = leaf_charges(&self.interp, &tree, &data)?;
        let v = assemble_v(&tree, &leaves, &self.to_equi, self.config.order_cheb, self.config.order_equi)?;
        times.interpolation = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let e_far = 0.5 * self.diag.quadratic(&v.values)?;
        times.far_field = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let e_near = near_sorted(&tree, &lists, &data, xi);
        times.near_field = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let e_self = self_energy(system, xi);
        times.self_energy = clock.elapsed().as_secs_f64();

        let mut report = EnergyReport::from_parts(e_self, e_near, e_far, 0.0, 0.0);
        report.timings = times;
        Ok(report)
    }
}

/// One-shot FFT energy; depth from the configuration or the particle count.
pub fn fft_energy(system: &ParticleSystem, config: &EwaldConfig) -> Result<EnergyReport> {
    let depth = config.depth.unwrap_or_else(|| default_depth(system.len()));
    FftEngine::new(config, system.box_radius, depth)?.evaluate(system)
}
