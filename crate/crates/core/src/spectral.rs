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

//! Multidimensional complex DFT over row-major arrays.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct FftNd {
    dims: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl FftNd {
    pub fn new(dims: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dims: dims.to_vec(),
            forward: dims.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: dims.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse transform in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        assert_eq!(data.len(), self.len());
        let total = data.len();
        for (a, plan) in plans.iter().enumerate() {
            let n = self.dims[a];
            if n == 1 {
                continue;
            }
            let stride: usize = self.dims[a + 1..].iter().product();
            let block = n * stride;
            if stride == 1 {
                data.par_chunks_mut(block.max(1 << 14) / block * block).for_each(|c| plan.process(c));
                continue;
            }
            // each block is an (n, stride) matrix: transpose, transform rows, transpose back
            data.par_chunks_mut(block).for_each_init(
                || vec![Complex64::new(0.0, 0.0); block],
                |buf, chunk| {
                    for i in 0..n {
                        for s in 0..stride {
                            buf[s * n + i] = chunk[i * stride + s];
                        }
                    }
                    plan.process(buf);
                    for i in 0..n {
                        for s in 0..stride {
                            chunk[i * stride + s] = buf[s * n + i];
                        }
                    }
                },
            );
            debug_assert_eq!(total % block, 0);
        }
    }
}
