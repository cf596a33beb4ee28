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

//! Periodic electrostatic energy of point-multipole systems.
//!
//! The energy of a cubic periodic box is split into a screened real-space sum
//! with a small splitting parameter, so the reciprocal part vanishes to working
//! precision. The real-space sum is evaluated either by an interpolated fast
//! multipole method ([`fmm`]) or by a block-Toeplitz FFT scheme
//! ([`fftengine`]). Multipoles are folded into plain charges on interpolation
//! nodes by differentiating the Lagrange basis ([`chebyshev`]).
//!
//! [`oracle`] holds slow reference sums used to validate both engines.

pub mod chebyshev;
pub mod error;
pub mod fftengine;
pub mod fmm;
pub mod generate;
pub mod kernel;
pub mod model;
pub mod octree;
pub mod oracle;
mod spectral;
mod tensor;

pub use error::{AnkhError, Result};
pub use fftengine::{fft_energy, FftEngine};
pub use fmm::{fmm_energy, FmmEngine};
pub use model::{EnergyReport, EwaldConfig, MultipoleSource, ParticleSystem, PhaseTimings, Vec3};
