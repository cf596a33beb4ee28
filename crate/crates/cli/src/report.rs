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


//! JSON documents with every float printed to 17 significant digits.

use std::io;

use ankh_core::{EnergyReport, EwaldConfig, PhaseTimings};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::Method;

/// Everything needed to rerun an evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub method: Method,
    pub config: EwaldConfig,
    pub input: Option<String>,
    pub output: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyDocument {
    pub manifest: RunManifest,
    pub particles: usize,
    pub box_radius: f64,
    pub report: EnergyReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: Method,
    pub order_cheb: usize,
    pub order_equi: usize,
    pub e_total: f64,
    /// `|E_ref - E| / |E_ref|` against the first row.
    pub r: f64,
    pub timings: PhaseTimings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareDocument {
    pub reference: Method,
    pub config: EwaldConfig,
    pub particles: usize,
    pub rows: Vec<CompareRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub particles: usize,
    pub method: Method,
    pub depth: usize,
    pub precompute: f64,
    pub interpolation: f64,
    pub far_field: f64,
    pub near_field: f64,
    pub periodic_far: f64,
    pub self_energy: f64,
    /// Evaluation time without precompute.
    pub evaluation: f64,
    pub e_total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchDocument {
    pub config: EwaldConfig,
    pub density: f64,
    pub rows: Vec<BenchRow>,
}

pub const BENCH_COLUMNS: [&str; 11] = [
    "particles",
    "method",
    "depth",
    "precompute",
    "interpolation",
    "far_field",
    "near_field",
    "periodic_far",
    "self_energy",
    "evaluation",
    "e_total",
];

impl BenchRow {
    pub fn tsv(&self) -> String {
        let t = [
            self.precompute,
            self.interpolation,
            self.far_field,
            self.near_field,
            self.periodic_far,
            self.self_energy,
            self.evaluation,
            self.e_total,
        ];
        let mut cells = vec![self.particles.to_string(), self.method.name().to_string(), self.depth.to_string()];
        cells.extend(t.iter().map(|v| format!("{v:.16e}")));
        cells.join("\t")
    }
}

struct Precise<'a>(PrettyFormatter<'a>);

impl Formatter for Precise<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("documents serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}
