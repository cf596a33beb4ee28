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

//! Interpolated fast multipole engine.
//!
//! Leaf modified charges are aggregated up the tree by M2M. The far field is
//! the sum of `M_tᵀ C[t,s] M_s` over interaction-list pairs, each unordered
//! pair evaluated once. Near images are reached through wrapped lists; images
//! with `|I|∞ >= 2` act on the root expansion through [`PeriodicOperator`].

mod m2l;
mod near;
mod periodic;

use std::time::Instant;

use rayon::prelude::*;

pub use m2l::{canonical, compress, dense_m2l, representatives, M2LOperator, M2lKind, M2lTable, Symmetry};
pub(crate) use near::{near_sorted, LeafSorted};
pub use near::{near_field_energy, near_field_energy_full};
pub use periodic::{build_periodic_operator, PeriodicOperator};
pub(crate) use periodic::image_shell_sum;

use crate::chebyshev::{cheb_to_equi_1d, m2m_1d, CellGeometry, ChargeInterpolator, Grid1D};
use crate::error::{AnkhError, Result};
use crate::kernel::self_energy;
use crate::model::{EnergyReport, EwaldConfig, ParticleSystem, PhaseTimings};
use crate::octree::{build_tree, default_depth, interaction_lists, lambda_offsets, positive, InteractionLists, PerfectOctree};
use crate::tensor::{apply3, apply3_add};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum M2lMode {
    /// Truncated SVD factors with relative cutoff `svd_tol`.
    Compressed,
    Dense,
}

/// Precomputed operators for one box size, depth and configuration.
pub struct FmmEngine {
    config: EwaldConfig,
    box_radius: f64,
    depth: usize,
    interp: ChargeInterpolator,
    m2m: [Vec<f64>; 2],
    tables: Vec<Option<M2lTable>>,
    to_equi: Vec<f64>,
    periodic: Option<PeriodicOperator>,
    precompute: f64,
}

impl FmmEngine {
    pub fn new(config: &EwaldConfig, box_radius: f64, depth: usize) -> Result<Self> {
        Self::with_mode(config, box_radius, depth, M2lMode::Compressed)
    }

    pub fn with_mode(config: &EwaldConfig, box_radius: f64, depth: usize, mode: M2lMode) -> Result<Self> {
        config.validate()?;
        if depth == 0 {
            return Err(AnkhError::Config("tree depth must be >= 1".into()));
        }
        if !(box_radius.is_finite() && box_radius > 0.0) {
            return Err(AnkhError::Config("box radius must be positive".into()));
        }
        let start = Instant::now();
        let interp = ChargeInterpolator::new(config.order_cheb);
        let grid = interp.grid().clone();
        let periodic_mode = config.periodic();
        let first = if periodic_mode { 1 } else { 2 };
        let tol = match mode {
            M2lMode::Compressed => Some(config.svd_tol),
            M2lMode::Dense => None,
        };
        let mut tables = Vec::with_capacity(depth + 1);
        for level in 0..=depth {
            tables.push(if level >= first {
                Some(M2lTable::build(&grid, level, box_radius / (1u64 << level) as f64, config.xi, tol)?)
            } else {
                None
            });
        }
        let equi = Grid1D::equispaced(config.order_equi);
        let periodic = if periodic_mode {
            Some(build_periodic_operator(config.order_equi, box_radius, config.xi, config.images)?)
        } else {
            None
        };
        Ok(Self {
            config: config.clone(),
            box_radius,
            depth,
            m2m: [m2m_1d(&grid, 0), m2m_1d(&grid, 1)],
            to_equi: cheb_to_equi_1d(&grid, &equi),
            interp,
            tables,
            periodic,
            precompute: start.elapsed().as_secs_f64(),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn config(&self) -> &EwaldConfig {
        &self.config
    }

    pub fn precompute_seconds(&self) -> f64 {
        self.precompute
    }

    pub fn table(&self, level: usize) -> Option<&M2lTable> {
        self.tables.get(level).and_then(|t| t.as_ref())
    }

    pub fn periodic_operator(&self) -> Option<&PeriodicOperator> {
        self.periodic.as_ref()
    }

    fn k3(&self) -> usize {
        let l = self.config.order_cheb;
        l * l * l
    }

    /// Chebyshev grid of the cell expansions.
    pub fn grid(&self) -> &Grid1D {
        self.interp.grid()
    }

    /// Modified charges of every leaf of `tree`, concatenated in leaf order.
    pub fn leaf_expansions(&self, tree: &PerfectOctree, system: &ParticleSystem) -> Result<Vec<f64>> {
        leaf_charges(&self.interp, tree, &LeafSorted::new(tree, system))
    }

    /// Expansions at every level, root first; `leaves` becomes the last entry.
    pub fn upward_pass(&self, leaves: Vec<f64>) -> Vec<Vec<f64>> {
        let k = self.k3();
        let l = self.config.order_cheb;
        let mut levels = vec![Vec::new(); self.depth + 1];
        levels[self.depth] = leaves;
        for e in (0..self.depth).rev() {
            let nc = 1usize << (e + 1);
            let np = 1usize << e;
            let child = &levels[e + 1];
            let mut parent = vec![0.0; np * np * np * k];
            parent.par_chunks_mut(k).enumerate().for_each(|(p, out)| {
                let pi = [p / (np * np), (p / np) % np, p % np];
                for b in 0..8 {
                    let bits = [b >> 2, (b >> 1) & 1, b & 1];
                    let c = [0, 1, 2].map(|a| 2 * pi[a] + bits[a]);
                    let ci = (c[0] * nc + c[1]) * nc + c[2];
                    let m = &child[ci * k..(ci + 1) * k];
                    if m.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    apply3_add(&self.m2m[bits[0]], &self.m2m[bits[1]], &self.m2m[bits[2]], l, l, m, out);
                }
            });
            levels[e] = parent;
        }
        levels
    }

    /// `ℱ_real`; `mutual` evaluates each unordered pair once instead of both
    /// orderings with weight 1/2.
    pub fn far_field(&self, lists: &InteractionLists, levels: &[Vec<f64>], mutual: bool) -> f64 {
        let k = self.k3();
        let mut total = 0.0;
        for (e, table) in self.tables.iter().enumerate() {
            let Some(table) = table else { continue };
            let n = 1usize << e;
            let exp = &levels[e];
            let nonzero: Vec<bool> = exp.chunks(k).map(|m| m.iter().any(|&v| v != 0.0)).collect();
            let partial: Vec<f64> = (0..n * n * n)
                .into_par_iter()
                .map_init(
                    || (vec![0.0; k], vec![0.0; k]),
                    |scratch, t| {
                        if !nonzero[t] {
                            return 0.0;
                        }
                        let ti = [t / (n * n), (t / n) % n, t % n];
                        let mt = &exp[t * k..(t + 1) * k];
                        let mut acc = 0.0;
                        for d in lambda_offsets(ti) {
                            if mutual && !positive(d) {
                                continue;
                            }
                            let Some(s) = lists.resolve(e, ti, d) else { continue };
                            let si = (s.cell[0] * n + s.cell[1]) * n + s.cell[2];
                            if !nonzero[si] {
                                continue;
                            }
                            acc += table.energy(d, mt, &exp[si * k..(si + 1) * k], scratch);
                        }
                        if mutual {
                            acc
                        } else {
                            0.5 * acc
                        }
                    },
                )
                .collect();
            total += partial.iter().sum::<f64>();
        }
        total
    }

    /// Root expansion on the equispaced grid used by the periodic operator.
    pub fn root_equispaced(&self, root: &[f64]) -> Vec<f64> {
        apply3(&self.to_equi, &self.to_equi, &self.to_equi, self.config.order_equi, self.config.order_cheb, root)
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
        let levels = self.upward_pass(leaf_charges(&self.interp, &tree, &data)?);
        times.interpolation = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let e_far = self.far_field(&lists, &levels, true);
        times.far_field = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let e_near = near_sorted(&tree, &lists, &data, xi);
        times.near_field = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let e_per = match &self.periodic {
            Some(op) => op.energy(&self.root_equispaced(&levels[0]))?,
            None => 0.0,
        };
        times.periodic_far = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let e_self = self_energy(system, xi);
        times.self_energy = clock.elapsed().as_secs_f64();

        let mut report = EnergyReport::from_parts(e_self, e_near, e_far, e_per, 0.0);
        report.timings = times;
        Ok(report)
    }
}

/// Modified charges of every leaf, concatenated in leaf order.
pub(crate) fn leaf_charges(interp: &ChargeInterpolator, tree: &PerfectOctree, data: &LeafSorted) -> Result<Vec<f64>> {
    let l = interp.grid().order();
    let k = l * l * l;
    let e = tree.depth();
    let mut out = vec![0.0; tree.n_leaves() * k];
    out.par_chunks_mut(k).enumerate().try_for_each(|(leaf, q)| {
        let r = tree.leaf_range(leaf);
        if r.is_empty() {
            return Ok(());
        }
        let cell = CellGeometry { center: tree.center(e, tree.triple(e, leaf)), half: tree.half(e) };
        interp.accumulate(&cell, &data.pos[r.clone()], &data.src[r], q)
    })?;
    Ok(out)
}

/// One-shot FMM energy; depth from the configuration or the particle count.
pub fn fmm_energy(system: &ParticleSystem, config: &EwaldConfig) -> Result<EnergyReport> {
    let depth = config.depth.unwrap_or_else(|| default_depth(system.len()));
    FmmEngine::new(config, system.box_radius, depth)?.evaluate(system)
}
