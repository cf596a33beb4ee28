mod common;

use ankh_core::error::AnkhError;
use ankh_core::kernel::self_energy;
use ankh_core::model::{EwaldConfig, MultipoleSource, ParticleSystem};
use ankh_core::oracle::*;
use common::*;

#[test]
fn two_charges_bare() {
    let s = ParticleSystem::charges(vec![[0.1, 0.2, 0.3], [0.1, -0.5, 0.3]], &[1.0, 1.0], 1.0).unwrap();
    let e = direct_lattice_energy(&s, XiMode::Bare, 0).unwrap();
    assert!(rel(e, 1.0 / 0.7) < 1e-15);
}

#[test]
fn one_charge_first_shell() {
    let rb = 1.7;
    let s = ParticleSystem::charges(vec![[0.3, -0.1, 0.2]], &[1.0], rb).unwrap();
    let e = direct_lattice_energy(&s, XiMode::Bare, 1).unwrap();
    // 6 faces at 2r_B, 12 edges at 2√2 r_B, 8 corners at 2√3 r_B
    let want = 0.5 / (2.0 * rb) * (6.0 + 12.0 / 2f64.sqrt() + 8.0 / 3f64.sqrt());
    assert!(rel(e, want) < 1e-14, "{e} vs {want}");
}

#[test]
fn zero_moments_give_zero() {
    let mut s = random_charges(1, 12, 1.0);
    s.sources.iter_mut().for_each(|m| *m = MultipoleSource::default());
    assert_eq!(direct_lattice_energy(&s, XiMode::Bare, 2).unwrap(), 0.0);
    assert_eq!(reciprocal_energy(&s, 0.5, 4).unwrap(), 0.0);
}

#[test]
fn budget_guard() {
    assert_eq!(lattice_evaluations(2, 0), 3.0);
    let s = random_charges(2, 900, 1.0);
    match direct_lattice_energy(&s, XiMode::Bare, 15) {
        Err(AnkhError::Budget { evaluations, limit }) => assert!(evaluations > limit),
        other => panic!("{other:?}"),
    }
    // the 648-particle, p = 15 configuration fits
    assert!(lattice_evaluations(648, 15) <= BUDGET);
}

#[test]
fn reciprocal_part_vanishes_at_small_xi() {
    let s = random_charges(3, 10, 10.0);
    let cfg = EwaldConfig { images: 2, ..Default::default() };
    let r = ewald_energy(&s, &cfg).unwrap();
    assert!(r.e_reciprocal.abs() <= 1e-12 * r.e_near.abs(), "{} vs {}", r.e_reciprocal, r.e_near);
    assert_eq!(r.e_self, self_energy(&s, 0.01));
    assert!(reciprocal_energy(&s, 0.01, 0).is_err());
}

fn neutral_multipoles(seed: u64, n: usize, rb: f64) -> ParticleSystem {
    let mut s = random_multipoles(seed, n, rb);
    let q = s.total_charge() / n as f64;
    s.sources.iter_mut().for_each(|m| m.q -= q);
    s
}

#[test]
fn ewald_total_is_independent_of_xi() {
    let rb = 1.0;
    let two = ParticleSystem::charges(vec![[0.2, 0.1, -0.3], [-0.4, 0.5, 0.6]], &[1.0, -1.0], rb).unwrap();
    for s in [two, neutral_multipoles(4, 6, rb)] {
        let total = |xi: f64| {
            let cfg = EwaldConfig { xi, images: 1, recip_cutoff: 32, ..Default::default() };
            ewald_energy(&s, &cfg).unwrap().e_total
        };
        let (a, b) = (total(5.0 / rb), total(6.0 / rb));
        assert!(rel(a, b) < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn ewald_matches_bare_sum_of_neutral_charges() {
    // the bare lattice sum of a neutral, dipole-free cluster converges to the
    // Ewald value; checked on the inversion-symmetric pair layout
    let base = random_charges(5, 8, 0.6);
    let mut pos = base.positions.clone();
    pos.extend(base.positions.iter().map(|x| x.map(|v| -v)));
    let mut q: Vec<f64> = base.sources.iter().map(|m| m.q).collect();
    q.extend(q.clone());
    let s = ParticleSystem::charges(pos, &q, 1.0).unwrap();
    assert!(s.total_charge().abs() < 1e-14 && s.net_dipole().iter().all(|d| d.abs() < 1e-14));
    let cfg = EwaldConfig { xi: 3.0, images: 2, recip_cutoff: 16, ..Default::default() };
    let ewald = ewald_energy(&s, &cfg).unwrap().e_total;
    let bare = direct_lattice_energy(&s, XiMode::Bare, 15).unwrap();
    assert!(rel(bare, ewald) < 1e-4, "{bare} vs {ewald}");
}

#[test]
fn dense_far_matrix_examples() {
    let a = dense_far_matrix(1, 2, 1.0, 0.01, 0).unwrap();
    assert_eq!(a.len(), 64 * 64);
    assert!(a.iter().all(|&v| v == 0.0));
    for images in [0, 2] {
        let a = dense_far_matrix(2, 2, 1.0, 0.01, images).unwrap();
        let n = 512;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(a[i * n + j], a[j * n + i]);
            }
        }
        assert!(a.iter().any(|&v| v != 0.0));
    }
}
