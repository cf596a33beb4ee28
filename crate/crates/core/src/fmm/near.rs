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

//! Direct interactions between adjacent leaves.

use rayon::prelude::*;

use crate::kernel::pair_energy;
use crate::model::{norm, sub, MultipoleSource, ParticleSystem, Vec3};
use crate::octree::{positive, InteractionLists, PerfectOctree};

/// Particles copied into leaf order.
pub(crate) struct LeafSorted {
    pub pos: Vec<Vec3>,
    pub src: Vec<MultipoleSource>,
}

impl LeafSorted {
    pub fn new(tree: &PerfectOctree, system: &ParticleSystem) -> Self {
        let idx = tree.sorted_indices();
        Self {
            pos: idx.iter().map(|&i| system.positions[i]).collect(),
            src: idx.iter().map(|&i| system.sources[i]).collect(),
        }
    }
}

fn block(data: &LeafSorted, ta: std::ops::Range<usize>, sb: std::ops::Range<usize>, shift: Vec3, xi: f64) -> f64 {
    let mut e = 0.0;
    for a in ta {
        let (xa, sa) = (data.pos[a], &data.src[a]);
        for b in sb.clone() {
            let y = data.pos[b];
            let z = sub(xa, [y[0] + shift[0], y[1] + shift[1], y[2] + shift[2]]);
            e += pair_energy(z, norm(z), sa, &data.src[b], xi);
        }
    }
    e
}

fn intra(data: &LeafSorted, r: std::ops::Range<usize>, xi: f64) -> f64 {
    let mut e = 0.0;
    for a in r.clone() {
        for b in a + 1..r.end {
            let z = sub(data.pos[a], data.pos[b]);
            e += pair_energy(z, norm(z), &data.src[a], &data.src[b], xi);
        }
    }
    e
}

fn shift_of(image: [i32; 3], box_radius: f64) -> Vec3 {
    image.map(|i| 2.0 * box_radius * i as f64)
}

const POSITIVE_NEAR: [[i32; 3]; 13] = {
    let mut out = [[0; 3]; 13];
    let mut n = 0;
    let mut d = 0;
    while d < 27 {
        let v = [d / 9 - 1, (d / 3) % 3 - 1, d % 3 - 1];
        if v[0] > 0 || (v[0] == 0 && (v[1] > 0 || (v[1] == 0 && v[2] > 0))) {
            out[n] = v;
            n += 1;
        }
        d += 1;
    }
    out
};

pub(crate) fn near_sorted(tree: &PerfectOctree, lists: &InteractionLists, data: &LeafSorted, xi: f64) -> f64 {
    let e = tree.depth();
    let rb = tree.box_radius();
    let partial: Vec<f64> = (0..tree.n_leaves())
        .into_par_iter()
        .map(|leaf| {
            let rt = tree.leaf_range(leaf);
            if rt.is_empty() {
                return 0.0;
            }
            let t = tree.triple(e, leaf);
            let mut acc = intra(data, rt.clone(), xi);
            for d in POSITIVE_NEAR {
                debug_assert!(positive(d));
                if let Some(s) = lists.resolve(e, t, d) {
                    let rs = tree.leaf_range(tree.linear(e, s.cell));
                    if !rs.is_empty() {
                        acc += block(data, rt.clone(), rs, shift_of(s.image, rb), xi);
                    }
                }
            }
            acc
        })
        .collect();
    partial.iter().sum()
}

/// Near-field energy `𝒩_real`: each unordered pair of particles in adjacent
/// (or identical) leaves counted once, wrapped into the nearest images when
/// `lists` is periodic.
pub fn near_field_energy(tree: &PerfectOctree, lists: &InteractionLists, system: &ParticleSystem, xi: f64) -> f64 {
    near_sorted(tree, lists, &LeafSorted::new(tree, system), xi)
}

/// Same quantity by the ordered double loop with weight 1/2.
pub fn near_field_energy_full(tree: &PerfectOctree, lists: &InteractionLists, system: &ParticleSystem, xi: f64) -> f64 {
    let data = LeafSorted::new(tree, system);
    let e = tree.depth();
    let rb = tree.box_radius();
    let partial: Vec<f64> = (0..tree.n_leaves())
        .into_par_iter()
        .map(|leaf| {
            let rt = tree.leaf_range(leaf);
            let t = tree.triple(e, leaf);
            let mut acc = 0.0;
            for s in lists.neighbors(e, t) {
                let rs = tree.leaf_range(tree.linear(e, s.cell));
                let shift = shift_of(s.image, rb);
                for a in rt.clone() {
                    for b in rs.clone() {
                        if s.offset == [0, 0, 0] && a == b {
                            continue;
                        }
                        let y = data.pos[b];
                        let z = sub(data.pos[a], [y[0] + shift[0], y[1] + shift[1], y[2] + shift[2]]);
                        acc += 0.5 * pair_energy(z, norm(z), &data.src[a], &data.src[b], xi);
                    }
                }
            }
            acc
        })
        .collect();
    partial.iter().sum()
}
