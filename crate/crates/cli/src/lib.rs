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


//! Particle files, run documents and error codes for the `ankh` binary.

pub mod error;
pub mod particles;
pub mod report;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fmm,
    Fft,
    /// Bare lattice sum.
    Direct,
    /// Screened lattice sum plus reciprocal and self terms.
    Ewald,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fmm => "fmm",
            Method::Fft => "fft",
            Method::Direct => "direct",
            Method::Ewald => "ewald",
        }
    }
}
