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

use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, AnkhError>;

#[derive(Debug, Error)]
pub enum AnkhError {
    #[error("kernel evaluated at coincident points")]
    Singular,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid particle system: {}", summarize(.0))]
    InvalidSystem(Vec<Violation>),
    #[error("oracle budget exceeded: {evaluations:.3e} pair-image evaluations > {limit:.0e}")]
    Budget { evaluations: f64, limit: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0} out of range")]
    OutOfRange(String),
    #[error("svd failed to converge")]
    Svd,
}

fn summarize(v: &[Violation]) -> String {
    let mut s = v.iter().take(3).map(|x| x.to_string()).collect::<Vec<_>>().join("; ");
    if v.len() > 3 {
        s.push_str(&format!("; and {} more", v.len() - 3));
    }
    s
}
