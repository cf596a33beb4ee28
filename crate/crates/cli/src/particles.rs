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


//! Plain-text particle files.
//!
//! Lines starting with `#` and blank lines are ignored. The first data line
//! holds `N r_B`; each of the next `N` lines holds
//! `x y z q μx μy μz Θxx Θxy Θxz Θyy Θyz Θzz`.

use std::fmt::Write as _;

use ankh_core::{MultipoleSource, ParticleSystem};

use crate::error::CliError;

pub const COLUMNS: usize = 13;

fn number(token: &str, line: usize) -> Result<f64, CliError> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Parse(format!("line {line}: `{token}` is not a finite number"))),
    }
}

pub fn parse(text: &str) -> Result<ParticleSystem, CliError> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line, header) = rows.next().ok_or_else(|| CliError::Parse("empty particle file".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(CliError::Parse(format!("line {line}: expected `N r_B`, found {} values", head.len())));
    }
    let count: usize = head[0]
        .parse()
        .map_err(|_| CliError::Parse(format!("line {line}: `{}` is not a particle count", head[0])))?;
    let box_radius = number(head[1], line)?;

    let mut positions = Vec::with_capacity(count);
    let mut sources = Vec::with_capacity(count);
    for (line, row) in rows {
        if positions.len() == count {
            return Err(CliError::Parse(format!("line {line}: more than {count} particle rows")));
        }
        let values = row.split_whitespace().map(|t| number(t, line)).collect::<Result<Vec<_>, _>>()?;
        if values.len() != COLUMNS {
            return Err(CliError::Parse(format!(
                "line {line}: expected {COLUMNS} values, found {}",
                values.len()
            )));
        }
        positions.push([values[0], values[1], values[2]]);
        let mut theta = [0.0; 6];
        theta.copy_from_slice(&values[7..]);
        sources.push(MultipoleSource::new(values[3], [values[4], values[5], values[6]], theta));
    }
    if positions.len() != count {
        return Err(CliError::Parse(format!("expected {count} particle rows, found {}", positions.len())));
    }
    Ok(ParticleSystem::new(positions, sources, box_radius)?)
}

/// Every value is written with 17 significant digits, so reading the file back
/// gives the same system bit for bit.
pub fn format(system: &ParticleSystem) -> String {
    let mut out = String::new();
    out.push_str("# x y z q mux muy muz txx txy txz tyy tyz tzz\n");
    writeln!(out, "{} {:.16e}", system.len(), system.box_radius).unwrap();
    for (x, s) in system.positions.iter().zip(&system.sources) {
        let q = [s.q];
        let row = x.iter().chain(&q).chain(&s.mu).chain(&s.theta);
        let row: Vec<String> = row.map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
