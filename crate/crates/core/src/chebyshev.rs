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

//! Lagrange interpolation on Chebyshev and equispaced grids, Chebyshev
//! differentiation, and modified charges.
//!
//! Cells are mapped affinely onto `[-1, 1]^3`. Derivatives of the Lagrange
//! basis go through Chebyshev coefficient space,
//! `S^(n)(x) = H (Dᵀ)^n T(x)`, which stays finite at the interval ends where
//! the trigonometric closed form divides by `sqrt(1 - x²)`.

use std::f64::consts::PI;

use crate::error::{AnkhError, Result};
use crate::model::{MultipoleSource, Vec3};

const EDGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    Chebyshev,
    Equispaced,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    kind: GridKind,
    nodes: Vec<f64>,
    /// Barycentric weights.
    weights: Vec<f64>,
}

impl Grid1D {
    pub fn new(kind: GridKind, order: usize) -> Self {
        assert!(order >= 2, "grid order must be >= 2");
        let l = order as f64;
        let nodes: Vec<f64> = match kind {
            GridKind::Chebyshev => (0..order).map(|k| ((2 * k + 1) as f64 * PI / (2.0 * l)).cos()).collect(),
            GridKind::Equispaced => (0..order).map(|k| -1.0 + 2.0 * k as f64 / (l - 1.0)).collect(),
        };
        let weights = (0..order)
            .map(|k| 1.0 / (0..order).filter(|&j| j != k).map(|j| nodes[k] - nodes[j]).product::<f64>())
            .collect();
        Self { kind, nodes, weights }
    }

    pub fn chebyshev(order: usize) -> Self {
        Self::new(GridKind::Chebyshev, order)
    }

    pub fn equispaced(order: usize) -> Self {
        Self::new(GridKind::Equispaced, order)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// All basis values `[S_0(x), ..., S_{L-1}(x)]`.
    pub fn basis(&self, x: f64) -> Vec<f64> {
        let l = self.order();
        match self.kind {
            GridKind::Chebyshev => {
                let t = chebyshev_t(x, l);
                (0..l).map(|k| cheb_cardinal(self.nodes[k], &t)).collect()
            }
            GridKind::Equispaced => {
                let mut out = vec![0.0; l];
                if let Some(j) = self.nodes.iter().position(|&n| n == x) {
                    out[j] = 1.0;
                    return out;
                }
                let mut den = 0.0;
                for k in 0..l {
                    out[k] = self.weights[k] / (x - self.nodes[k]);
                    den += out[k];
                }
                out.iter_mut().for_each(|v| *v /= den);
                out
            }
        }
    }
}

/// `[T_0(x), ..., T_{n-1}(x)]` by the three-term recurrence.
pub fn chebyshev_t(x: f64, n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n];
    t[0] = 1.0;
    if n > 1 {
        t[1] = x;
    }
    for m in 2..n {
        t[m] = 2.0 * x * t[m - 1] - t[m - 2];
    }
    t
}

fn cheb_cardinal(rk: f64, tx: &[f64]) -> f64 {
    let l = tx.len();
    let tr = chebyshev_t(rk, l);
    let s: f64 = (1..l).map(|m| tr[m] * tx[m]).sum();
    (1.0 + 2.0 * s) / l as f64
}

/// Lagrange basis polynomial `S_k` of `grid` evaluated at `x`.
pub fn lagrange_eval(grid: &Grid1D, k: usize, x: f64) -> Result<f64> {
    let l = grid.order();
    if k >= l {
        return Err(AnkhError::OutOfRange(format!("node index {k}")));
    }
    if !(-1.0 - EDGE_TOL..=1.0 + EDGE_TOL).contains(&x) {
        return Err(AnkhError::OutOfRange(format!("abscissa {x}")));
    }
    Ok(match grid.kind {
        GridKind::Chebyshev => cheb_cardinal(grid.nodes[k], &chebyshev_t(x, l)),
        GridKind::Equispaced => grid.basis(x)[k],
    })
}

/// Differentiation of the Chebyshev Lagrange basis in coefficient space.
#[derive(Clone, Debug)]
pub struct DiffOperator {
    order: usize,
    /// `H[k][m]`: Lagrange values from Chebyshev polynomial values.
    h_mat: Vec<f64>,
    /// `D[j][m]`: coefficient of `T_j` in `T_m'`.
    d_mat: Vec<f64>,
    /// `H (Dᵀ)^n` for n = 0, 1, 2.
    stacked: [Vec<f64>; 3],
}

impl DiffOperator {
    pub fn new(grid: &Grid1D) -> Self {
        assert_eq!(grid.kind, GridKind::Chebyshev, "differentiation needs a Chebyshev grid");
        let l = grid.order();
        let mut h_mat = vec![0.0; l * l];
        for k in 0..l {
            let tr = chebyshev_t(grid.nodes[k], l);
            h_mat[k * l] = 1.0 / l as f64;
            for m in 1..l {
                h_mat[k * l + m] = 2.0 * tr[m] / l as f64;
            }
        }
        let mut d_mat = vec![0.0; l * l];
        for m in 1..l {
            for j in (0..m).rev().step_by(2) {
                d_mat[j * l + m] = if j == 0 { m as f64 } else { 2.0 * m as f64 };
            }
        }
        let mut m1 = vec![0.0; l * l];
        let mut m2 = vec![0.0; l * l];
        // (H Dᵀ)[k][j] = Σ_m H[k][m] D[j][m]
        for k in 0..l {
            for j in 0..l {
                m1[k * l + j] = (0..l).map(|m| h_mat[k * l + m] * d_mat[j * l + m]).sum();
            }
        }
        for k in 0..l {
            for j in 0..l {
                m2[k * l + j] = (0..l).map(|m| m1[k * l + m] * d_mat[j * l + m]).sum();
            }
        }
        Self { order: l, stacked: [h_mat.clone(), m1, m2], h_mat, d_mat }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn h_mat(&self) -> &[f64] {
        &self.h_mat
    }

    pub fn d_mat(&self) -> &[f64] {
        &self.d_mat
    }

    /// `[S_k^(n)(x)]_k` for `n <= 2` on `[-1, 1]`.
    #[inline]
    fn derivs(&self, n: usize, t: &[f64], out: &mut [f64]) {
        let l = self.order;
        let m = &self.stacked[n];
        for k in 0..l {
            out[k] = m[k * l..(k + 1) * l].iter().zip(t).map(|(a, b)| a * b).sum();
        }
    }
}

pub fn lagrange_derivative(diffop: &DiffOperator, grid: &Grid1D, n: usize, x: f64) -> Result<Vec<f64>> {
    if n > 2 {
        return Err(AnkhError::OutOfRange(format!("derivative order {n}")));
    }
    if grid.kind != GridKind::Chebyshev || grid.order() != diffop.order {
        return Err(AnkhError::Dimension { expected: diffop.order, got: grid.order() });
    }
    if !(-1.0 - EDGE_TOL..=1.0 + EDGE_TOL).contains(&x) {
        return Err(AnkhError::OutOfRange(format!("abscissa {x}")));
    }
    let mut out = vec![0.0; diffop.order];
    diffop.derivs(n, &chebyshev_t(x, diffop.order), &mut out);
    Ok(out)
}

/// Axis-aligned cube with center `center` and half side `half`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGeometry {
    pub center: Vec3,
    pub half: f64,
}

impl CellGeometry {
    /// Local coordinates in `[-1, 1]^3`; `None` outside the cell.
    pub fn local(&self, x: Vec3) -> Option<Vec3> {
        let mut u = [0.0; 3];
        for a in 0..3 {
            let v = (x[a] - self.center[a]) / self.half;
            if !(v.abs() <= 1.0 + EDGE_TOL) {
                return None;
            }
            u[a] = v.clamp(-1.0, 1.0);
        }
        Some(u)
    }

    pub fn node(&self, grid: &Grid1D, idx: [usize; 3]) -> Vec3 {
        let n = grid.nodes();
        [0, 1, 2].map(|a| self.center[a] + self.half * n[idx[a]])
    }
}

/// Modified charges of one leaf on its `L³` tensor-product Chebyshev nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafExpansion {
    pub cell: usize,
    pub values: Vec<f64>,
}

/// Precomputed basis derivatives for accumulating modified charges.
#[derive(Clone, Debug)]
pub struct ChargeInterpolator {
    grid: Grid1D,
    diff: DiffOperator,
}

impl ChargeInterpolator {
    pub fn new(order: usize) -> Self {
        let grid = Grid1D::chebyshev(order);
        let diff = DiffOperator::new(&grid);
        Self { grid, diff }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn diff(&self) -> &DiffOperator {
        &self.diff
    }

    /// Adds `Σ 𝔇_x S_k(x)` of the given particles into `out` (length `L³`).
    pub fn accumulate(&self, cell: &CellGeometry, positions: &[Vec3], sources: &[MultipoleSource], out: &mut [f64]) -> Result<()> {
        let l = self.diff.order;
        if out.len() != l * l * l {
            return Err(AnkhError::Dimension { expected: l * l * l, got: out.len() });
        }
        let inv = 1.0 / cell.half;
        let mut s = [[vec![0.0; l], vec![0.0; l], vec![0.0; l]], [vec![0.0; l], vec![0.0; l], vec![0.0; l]], [vec![0.0; l], vec![0.0; l], vec![0.0; l]]];
        let mut m0 = vec![0.0; l * l];
        let mut m1 = vec![0.0; l * l];
        let mut m2 = vec![0.0; l * l];
        for (x, src) in positions.iter().zip(sources) {
            let u = cell.local(*x).ok_or_else(|| AnkhError::OutOfRange(format!("particle at {x:?} outside its cell")))?;
            let ord = src.order();
            for a in 0..3 {
                let t = chebyshev_t(u[a], l);
                let mut scale = 1.0;
                for n in 0..=ord {
                    self.diff.derivs(n, &t, &mut s[a][n]);
                    if n > 0 {
                        scale *= inv;
                        s[a][n].iter_mut().for_each(|v| *v *= scale);
                    }
                }
            }
            let [sx, sy, sz] = &s;
            let th = &src.theta;
            let mu = &src.mu;
            for j in 0..l {
                for k in 0..l {
                    let jk = j * l + k;
                    let (y0, z0) = (sy[0][j], sz[0][k]);
                    let mut v0 = src.q * y0 * z0;
                    let (mut v1, mut v2) = (0.0, 0.0);
                    if ord >= 1 {
                        let (y1, z1) = (sy[1][j], sz[1][k]);
                        v0 += mu[1] * y1 * z0 + mu[2] * y0 * z1;
                        v1 = mu[0] * y0 * z0;
                        if ord >= 2 {
                            let (y2, z2) = (sy[2][j], sz[2][k]);
                            v0 += th[3] * y2 * z0 + 2.0 * th[4] * y1 * z1 + th[5] * y0 * z2;
                            v1 += 2.0 * th[1] * y1 * z0 + 2.0 * th[2] * y0 * z1;
                            v2 = th[0] * y0 * z0;
                        }
                    }
                    m0[jk] = v0;
                    m1[jk] = v1;
                    m2[jk] = v2;
                }
            }
            for i in 0..l {
                let row = &mut out[i * l * l..(i + 1) * l * l];
                let a0 = sx[0][i];
                match ord {
                    0 => row.iter_mut().zip(&m0).for_each(|(o, v)| *o += a0 * v),
                    1 => {
                        let a1 = sx[1][i];
                        for jk in 0..l * l {
                            row[jk] += a0 * m0[jk] + a1 * m1[jk];
                        }
                    }
                    _ => {
                        let (a1, a2) = (sx[1][i], sx[2][i]);
                        for jk in 0..l * l {
                            row[jk] += a0 * m0[jk] + a1 * m1[jk] + a2 * m2[jk];
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Modified charges of the particles of one leaf.
pub fn modified_charges(
    cell_id: usize,
    positions: &[Vec3],
    sources: &[MultipoleSource],
    cell: &CellGeometry,
    interp: &ChargeInterpolator,
) -> Result<LeafExpansion> {
    let l = interp.grid.order();
    let mut values = vec![0.0; l * l * l];
    interp.accumulate(cell, positions, sources, &mut values)?;
    Ok(LeafExpansion { cell: cell_id, values })
}

/// `R[i][k] = S_k(dst_i)` for 1D destinations in `[-1, 1]`.
pub fn reinterpolation_1d(src: &Grid1D, dst: &[f64]) -> Vec<f64> {
    let l = src.order();
    let mut m = vec![0.0; dst.len() * l];
    for (i, &x) in dst.iter().enumerate() {
        m[i * l..(i + 1) * l].copy_from_slice(&src.basis(x));
    }
    m
}

/// `|dst| x L³` matrix of tensor-product basis values `S_k[c](dst_i)`.
pub fn reinterpolation_matrix(src: &Grid1D, cell: &CellGeometry, dst: &[Vec3]) -> Result<Vec<f64>> {
    let l = src.order();
    let k3 = l * l * l;
    let mut m = vec![0.0; dst.len() * k3];
    for (i, x) in dst.iter().enumerate() {
        let u = cell.local(*x).ok_or_else(|| AnkhError::OutOfRange(format!("node {x:?} outside cell")))?;
        let b = [src.basis(u[0]), src.basis(u[1]), src.basis(u[2])];
        let row = &mut m[i * k3..(i + 1) * k3];
        for a in 0..l {
            for c in 0..l {
                let w = b[0][a] * b[1][c];
                for e in 0..l {
                    row[(a * l + c) * l + e] = w * b[2][e];
                }
            }
        }
    }
    Ok(m)
}

/// 1D transfer from a child (`bit` 0 = lower half) to its parent:
/// `V[i][a] = S_i(child node a in parent coordinates)`.
pub fn m2m_1d(grid: &Grid1D, bit: usize) -> Vec<f64> {
    let off = if bit == 0 { -0.5 } else { 0.5 };
    let dst: Vec<f64> = grid.nodes().iter().map(|&r| off + 0.5 * r).collect();
    crate::tensor::transpose(&reinterpolation_1d(grid, &dst), grid.order(), grid.order())
}

/// `L_u x L_c` map taking Chebyshev modified charges to equispaced ones:
/// `E[i][k] = U_i(r_k)`.
pub fn cheb_to_equi_1d(cheb: &Grid1D, equi: &Grid1D) -> Vec<f64> {
    let r = reinterpolation_1d(equi, cheb.nodes());
    crate::tensor::transpose(&r, cheb.order(), equi.order())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_formulas() {
        let g = Grid1D::chebyshev(4);
        assert!((g.nodes()[0] - (PI / 8.0).cos()).abs() < 1e-15);
        let e = Grid1D::equispaced(5);
        assert_eq!(e.nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn d_mat_of_t1_is_constant() {
        let g = Grid1D::chebyshev(6);
        let d = DiffOperator::new(&g);
        let l = 6;
        let col: Vec<f64> = (0..l).map(|j| d.d_mat()[j * l + 1]).collect();
        assert_eq!(col, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        for j in 0..l {
            for m in 0..=j {
                assert_eq!(d.d_mat()[j * l + m], 0.0);
            }
        }
    }

    #[test]
    fn out_of_range() {
        let g = Grid1D::chebyshev(3);
        assert!(lagrange_eval(&g, 3, 0.0).is_err());
        let d = DiffOperator::new(&g);
        assert!(lagrange_derivative(&d, &g, 3, 0.0).is_err());
    }
}
