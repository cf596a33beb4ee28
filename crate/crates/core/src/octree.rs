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

//! Perfect octree over the simulation box and its interaction lists.
//!
//! Cells at level `e` are indexed by `(i, j, k) ∈ [0, 2^e)^3`, linearly as
//! `(i*n + j)*n + k`. Two same-level cells are well separated when their index
//! triples differ by at least 2 in some axis. In periodic mode the lists wrap
//! across the box boundary; a wrapped entry keeps the box cell index and the
//! image shift `I ∈ {-1, 0, 1}^3` of the copy it stands for.

use crate::error::{AnkhError, Result};
use crate::model::{ParticleSystem, Vec3};

/// Target number of particles per leaf for the depth heuristic.
pub const LEAF_TARGET: usize = 64;

/// Smallest `E >= 1` with `8^E * LEAF_TARGET >= n`.
pub fn default_depth(n: usize) -> usize {
    let mut e = 1;
    while LEAF_TARGET << (3 * e) < n {
        e += 1;
    }
    e
}

#[derive(Clone, Debug)]
pub struct PerfectOctree {
    depth: usize,
    box_radius: f64,
    /// Particle indices grouped by leaf.
    order: Vec<usize>,
    /// CSR offsets into `order`, one slot per leaf plus one.
    starts: Vec<usize>,
}

pub fn build_tree(system: &ParticleSystem, depth: usize) -> Result<PerfectOctree> {
    if depth == 0 {
        return Err(AnkhError::Config("tree depth must be >= 1".into()));
    }
    if depth > 10 {
        return Err(AnkhError::Config(format!("tree depth {depth} too large")));
    }
    let n = 1usize << depth;
    let rb = system.box_radius;
    let side = 2.0 * rb / n as f64;
    let bucket = |v: f64| (((v + rb) / side).floor().max(0.0) as usize).min(n - 1);
    let leaf_of: Vec<usize> = system
        .positions
        .iter()
        .map(|x| (bucket(x[0]) * n + bucket(x[1])) * n + bucket(x[2]))
        .collect();
    let mut starts = vec![0usize; n * n * n + 1];
    for &l in &leaf_of {
        starts[l + 1] += 1;
    }
    for i in 0..n * n * n {
        starts[i + 1] += starts[i];
    }
    let mut fill = starts.clone();
    let mut order = vec![0; leaf_of.len()];
    for (p, &l) in leaf_of.iter().enumerate() {
        order[fill[l]] = p;
        fill[l] += 1;
    }
    Ok(PerfectOctree { depth, box_radius: rb, order, starts })
}

impl PerfectOctree {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    pub fn side(&self, level: usize) -> usize {
        1 << level
    }

    pub fn n_leaves(&self) -> usize {
        1 << (3 * self.depth)
    }

    /// Half side of a cell at `level`.
    pub fn half(&self, level: usize) -> f64 {
        self.box_radius / (1u64 << level) as f64
    }

    pub fn center(&self, level: usize, idx: [usize; 3]) -> Vec3 {
        let h = self.half(level);
        idx.map(|i| -self.box_radius + (2 * i + 1) as f64 * h)
    }

    pub fn linear(&self, level: usize, idx: [usize; 3]) -> usize {
        let n = self.side(level);
        (idx[0] * n + idx[1]) * n + idx[2]
    }

    pub fn triple(&self, level: usize, lin: usize) -> [usize; 3] {
        let n = self.side(level);
        [lin / (n * n), (lin / n) % n, lin % n]
    }

    pub fn leaf_particles(&self, leaf: usize) -> &[usize] {
        &self.order[self.starts[leaf]..self.starts[leaf + 1]]
    }

    /// Particle indices grouped by leaf.
    pub fn sorted_indices(&self) -> &[usize] {
        &self.order
    }

    pub fn leaf_range(&self, leaf: usize) -> std::ops::Range<usize> {
        self.starts[leaf]..self.starts[leaf + 1]
    }

    pub fn bucket_sizes(&self) -> Vec<usize> {
        self.starts.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Same-level cell reached from a target by `offset`; `image` is nonzero only
/// for wrapped periodic entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellRef {
    pub cell: [usize; 3],
    pub image: [i32; 3],
    pub offset: [i32; 3],
}

#[derive(Clone, Copy, Debug)]
pub struct InteractionLists {
    depth: usize,
    periodic: bool,
}

pub fn interaction_lists(tree: &PerfectOctree, periodic: bool) -> InteractionLists {
    InteractionLists { depth: tree.depth, periodic }
}

/// Offsets `Δ` with `max|Δ| >= 2` whose parents are adjacent, for a cell with
/// the given per-axis child bits.
pub fn lambda_offsets(cell: [usize; 3]) -> Vec<[i32; 3]> {
    let lo = cell.map(|c| -2 - (c & 1) as i32);
    let mut out = Vec::with_capacity(189);
    for dx in lo[0]..=lo[0] + 5 {
        for dy in lo[1]..=lo[1] + 5 {
            for dz in lo[2]..=lo[2] + 5 {
                if dx.abs().max(dy.abs()).max(dz.abs()) >= 2 {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

/// `Δ > 0` in lexicographic order.
#[inline]
pub fn positive(d: [i32; 3]) -> bool {
    d > [0, 0, 0]
}

impl InteractionLists {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    /// Resolves `cell + offset` at `level`, wrapping in periodic mode.
    #[inline]
    pub fn resolve(&self, level: usize, cell: [usize; 3], offset: [i32; 3]) -> Option<CellRef> {
        let n = 1i32 << level;
        let mut out = [0usize; 3];
        let mut image = [0i32; 3];
        for a in 0..3 {
            let v = cell[a] as i32 + offset[a];
            if self.periodic {
                image[a] = v.div_euclid(n);
                out[a] = v.rem_euclid(n) as usize;
            } else if (0..n).contains(&v) {
                out[a] = v as usize;
            } else {
                return None;
            }
        }
        Some(CellRef { cell: out, image, offset })
    }

    /// Adjacent cells including the cell itself.
    pub fn neighbors(&self, level: usize, cell: [usize; 3]) -> Vec<CellRef> {
        let mut out = Vec::with_capacity(27);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    out.extend(self.resolve(level, cell, [dx, dy, dz]));
                }
            }
        }
        out
    }

    /// Well-separated cells whose parents are not well separated.
    pub fn interaction_list(&self, level: usize, cell: [usize; 3]) -> Vec<CellRef> {
        if level == 0 {
            return Vec::new();
        }
        lambda_offsets(cell).into_iter().filter_map(|d| self.resolve(level, cell, d)).collect()
    }

    /// Leaves not adjacent to (nor equal to) `leaf`, as box cell indices.
    pub fn extended_list(&self, leaf: [usize; 3]) -> Vec<[usize; 3]> {
        let n = 1usize << self.depth;
        let near: std::collections::HashSet<[usize; 3]> =
            self.neighbors(self.depth, leaf).into_iter().map(|c| c.cell).collect();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !near.contains(&[i, j, k]) {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }
}
