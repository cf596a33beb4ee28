mod common;

use std::collections::{HashMap, HashSet};

use ankh_core::model::ParticleSystem;
use ankh_core::octree::*;
use common::*;
use proptest::prelude::*;

fn grid(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n * n * n).map(move |i| [i / (n * n), (i / n) % n, i % n])
}

fn dummy_tree(depth: usize) -> PerfectOctree {
    build_tree(&random_charges(0, 2, 1.0), depth).unwrap()
}

#[test]
fn single_particle_partition() {
    let s = ParticleSystem::charges(vec![[0.3, -0.2, 0.9]], &[1.0], 1.0).unwrap();
    let t = build_tree(&s, 1).unwrap();
    assert_eq!(t.n_leaves(), 8);
    let sizes = t.bucket_sizes();
    assert_eq!(sizes.iter().filter(|&&n| n > 0).count(), 1);
    assert_eq!(sizes.iter().sum::<usize>(), 1);
    assert!(build_tree(&s, 0).is_err());
}

#[test]
fn half_open_buckets() {
    let s = ParticleSystem::charges(vec![[0.0; 3], [1.0, 1.0, 1.0], [-1.0, -1.0, -1.0]], &[1.0, -1.0, 0.0], 1.0).unwrap();
    let t = build_tree(&s, 1).unwrap();
    assert_eq!(t.leaf_particles(t.linear(1, [1, 1, 1])), &[0, 1]);
    assert_eq!(t.leaf_particles(t.linear(1, [0, 0, 0])), &[2]);
}

#[test]
fn thousand_particles_partition() {
    let s = random_charges(5, 1000, 2.0);
    let t = build_tree(&s, 3).unwrap();
    assert_eq!(t.n_leaves(), 512);
    assert_eq!(t.bucket_sizes().iter().sum::<usize>(), 1000);
    let mut seen: Vec<usize> = t.sorted_indices().to_vec();
    seen.sort_unstable();
    assert_eq!(seen, (0..1000).collect::<Vec<_>>());
    for leaf in 0..t.n_leaves() {
        let c = t.center(3, t.triple(3, leaf));
        let h = t.half(3);
        for &p in t.leaf_particles(leaf) {
            for a in 0..3 {
                assert!((s.positions[p][a] - c[a]).abs() <= h * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn geometry_per_level() {
    let t = dummy_tree(3);
    for e in 0..=3 {
        assert_eq!(t.side(e), 1 << e);
        assert!((2.0 * t.half(e) - 2.0 / (1 << e) as f64).abs() < 1e-15);
        for c in grid(1 << e) {
            assert_eq!(t.triple(e, t.linear(e, c)), c);
        }
    }
}

#[test]
fn depth_one_has_no_extended_list() {
    let lists = interaction_lists(&dummy_tree(1), false);
    for c in grid(2) {
        assert_eq!(lists.neighbors(1, c).len(), 8);
        assert!(lists.extended_list(c).is_empty());
        assert!(lists.interaction_list(1, c).is_empty());
    }
}

#[test]
fn depth_two_corner_counts() {
    let lists = interaction_lists(&dummy_tree(2), false);
    assert_eq!(lists.neighbors(2, [0, 0, 0]).len(), 8);
    // brute force: children of the parent's neighbours minus own neighbours
    let brute = grid(4).filter(|c| c.iter().all(|&v| v <= 3) && c.iter().any(|&v| v >= 2)).count();
    assert_eq!(brute, 56);
    assert_eq!(lists.interaction_list(2, [0, 0, 0]).len(), brute);
    assert_eq!(lists.extended_list([0, 0, 0]).len(), 56);
}

#[test]
fn depth_two_periodic_counts() {
    let lists = interaction_lists(&dummy_tree(2), true);
    for c in grid(4) {
        let nb = lists.neighbors(2, c);
        assert_eq!(nb.len(), 27);
        assert_eq!(nb.iter().map(|r| r.cell).collect::<HashSet<_>>().len(), 27);
        assert_eq!(lists.extended_list(c).len(), 37);
        assert_eq!(lists.interaction_list(2, c).len(), 189);
    }
}

#[test]
fn interior_lambda_size() {
    let lists = interaction_lists(&dummy_tree(3), false);
    for c in grid(8) {
        let n = lists.interaction_list(3, c).len();
        assert!(n <= 189);
        if c.iter().all(|&v| (2..=5).contains(&v)) {
            assert_eq!(n, 189);
        }
    }
}

fn key(r: &CellRef) -> ([usize; 3], [i32; 3]) {
    (r.cell, r.image)
}

#[test]
fn lists_are_symmetric() {
    for depth in 1..=3 {
        for periodic in [false, true] {
            let lists = interaction_lists(&dummy_tree(depth), periodic);
            for e in 1..=depth {
                let n = 1 << e;
                let all: HashMap<[usize; 3], HashSet<_>> =
                    grid(n).map(|c| (c, lists.interaction_list(e, c).iter().map(key).collect())).collect();
                for t in grid(n) {
                    for (s, img) in &all[&t] {
                        assert!(all[s].contains(&(t, img.map(|v| -v))), "E={depth} e={e} {t:?} {s:?}");
                    }
                }
            }
            let n = 1 << depth;
            let ext: HashMap<_, HashSet<_>> = grid(n).map(|c| (c, lists.extended_list(c).into_iter().collect())).collect();
            for t in grid(n) {
                for s in &ext[&t] {
                    assert!(ext[s].contains(&t));
                }
            }
        }
    }
}

#[test]
fn lists_partition_all_pairs() {
    for depth in 1..=3 {
        for periodic in [false, true] {
            let lists = interaction_lists(&dummy_tree(depth), periodic);
            let n = 1i32 << depth;
            // targets in global (unwrapped) leaf indices; periodic covers the 3³ image block
            let (lo, hi) = if periodic { (-n, 2 * n) } else { (0, n) };
            for t in grid(n as usize) {
                let mut count: HashMap<[i32; 3], usize> = HashMap::new();
                for r in lists.neighbors(depth, t) {
                    let g: [i32; 3] = std::array::from_fn(|a| r.cell[a] as i32 + r.image[a] * n);
                    assert_eq!(g, std::array::from_fn(|a| t[a] as i32 + r.offset[a]));
                    *count.entry(g).or_default() += 1;
                }
                for e in 1..=depth {
                    let shift = depth - e;
                    let anc = t.map(|v| v >> shift);
                    let ne = 1i32 << e;
                    for r in lists.interaction_list(e, anc) {
                        let g: [i32; 3] = std::array::from_fn(|a| r.cell[a] as i32 + r.image[a] * ne);
                        assert_eq!(g, std::array::from_fn(|a| anc[a] as i32 + r.offset[a]));
                        let w = 1i32 << shift;
                        for i in 0..w {
                            for j in 0..w {
                                for k in 0..w {
                                    *count.entry([g[0] * w + i, g[1] * w + j, g[2] * w + k]).or_default() += 1;
                                }
                            }
                        }
                    }
                }
                let span = (hi - lo) as usize;
                assert_eq!(count.len(), span * span * span, "E={depth} periodic={periodic} t={t:?}");
                for (g, c) in count {
                    assert!(g.iter().all(|v| (lo..hi).contains(v)));
                    assert_eq!(c, 1);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn buckets_partition(seed in 0u64..500, n in 1usize..300, depth in 1usize..4) {
        let s = random_charges(seed, n, 1.5);
        let t = build_tree(&s, depth).unwrap();
        let mut seen = vec![0; n];
        for leaf in 0..t.n_leaves() {
            for &p in t.leaf_particles(leaf) {
                seen[p] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }
}
