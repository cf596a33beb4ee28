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

//! Mode products on cubic tensors stored x-major (`i*n*n + j*n + k`).

/// `out[i,j,k] += Σ mx[i,a] my[j,b] mz[k,c] input[a,b,c]` with `rows x cols` matrices.
pub(crate) fn apply3_add(mx: &[f64], my: &[f64], mz: &[f64], rows: usize, cols: usize, input: &[f64], out: &mut [f64]) {
    debug_assert_eq!(input.len(), cols * cols * cols);
    debug_assert_eq!(out.len(), rows * rows * rows);
    // contract z
    let mut t1 = vec![0.0; cols * cols * rows];
    for ab in 0..cols * cols {
        let src = &input[ab * cols..(ab + 1) * cols];
        let dst = &mut t1[ab * rows..(ab + 1) * rows];
        for (k, d) in dst.iter_mut().enumerate() {
            let m = &mz[k * cols..(k + 1) * cols];
            *d = m.iter().zip(src).map(|(a, b)| a * b).sum();
        }
    }
    // contract y
    let mut t2 = vec![0.0; cols * rows * rows];
    for a in 0..cols {
        for j in 0..rows {
            let dst = &mut t2[(a * rows + j) * rows..(a * rows + j + 1) * rows];
            for b in 0..cols {
                let w = my[j * cols + b];
                if w == 0.0 {
                    continue;
                }
                let src = &t1[(a * cols + b) * rows..(a * cols + b + 1) * rows];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    // contract x
    let plane = rows * rows;
    for i in 0..rows {
        let dst = &mut out[i * plane..(i + 1) * plane];
        for a in 0..cols {
            let w = mx[i * cols + a];
            if w == 0.0 {
                continue;
            }
            for (d, s) in dst.iter_mut().zip(&t2[a * plane..(a + 1) * plane]) {
                *d += w * s;
            }
        }
    }
}

pub(crate) fn apply3(mx: &[f64], my: &[f64], mz: &[f64], rows: usize, cols: usize, input: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rows * rows * rows];
    apply3_add(mx, my, mz, rows, cols, input, &mut out);
    out
}

pub(crate) fn transpose(m: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; m.len()];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = m[i * cols + j];
        }
    }
    t
}
