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


use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use ankh_core::generate::{generate, GenSpec, Layout, Moments};
use ankh_core::octree::default_depth;
use ankh_core::oracle::{direct_lattice_energy, ewald_energy, XiMode};
use ankh_core::{fft_energy, fmm_energy, EnergyReport, EwaldConfig, ParticleSystem, PhaseTimings};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ankh_cli::error::CliError;
use ankh_cli::particles;
use ankh_cli::report::*;
use ankh_cli::Method;

#[derive(Parser, Debug)]
#[command(name = "ankh", version, about = "Periodic electrostatic energy of point-multipole systems")]
struct Cli {
    /// Worker threads; 1 gives bit-reproducible runs.
    #[arg(long, global = true, env = "ANKH_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the energy of a particle file with one method.
    Energy {
        #[arg(long, default_value = "fft")]
        method: Method,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Evaluate several methods and report relative differences to the first.
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<Method>,
        /// Rerun every method after the first at each of these Chebyshev orders.
        #[arg(long, value_delimiter = ',')]
        sweep_cheb: Vec<usize>,
        #[arg(long, default_value = "json")]
        format: Format,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Write a generated particle file.
    Gen {
        #[arg(long, default_value = "uniform")]
        kind: Kind,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        box_radius: f64,
        #[arg(long, default_value = "charges")]
        moments: MomentArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time the engines on generated systems of increasing size.
    Bench {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "fft,fmm")]
        methods: Vec<Method>,
        /// Particles per cubic unit; sets the box radius for each size.
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        #[arg(long, default_value = "uniform")]
        kind: Kind,
        #[arg(long, default_value = "charges")]
        moments: MomentArg,
        #[arg(long, default_value = "json")]
        format: Format,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct EngineArgs {
    #[arg(long, default_value_t = 0.01)]
    xi: f64,
    /// Image half-width p; 0 evaluates the isolated box.
    #[arg(long, default_value_t = 15)]
    images: usize,
    #[arg(long, default_value_t = 8)]
    order_cheb: usize,
    /// Defaults to min(order-cheb, 8).
    #[arg(long)]
    order_equi: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, default_value_t = 1e-7)]
    svd_tol: f64,
    /// Reciprocal-space cutoff; ewald only.
    #[arg(long)]
    recip_cutoff: Option<usize>,
    /// Seed recorded with the run; used by the generators.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
struct IoArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Uniform,
    LatticeJittered,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MomentArg {
    Charges,
    Dipoles,
    Quadrupoles,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

impl EngineArgs {
    /// Configuration for a run of `methods`.
    fn config(&self, methods: &[Method]) -> Result<EwaldConfig, CliError> {
        if self.recip_cutoff.is_some() && !methods.contains(&Method::Ewald) {
            return Err(CliError::Config("--recip-cutoff applies to ewald only".into()));
        }
        let defaults = EwaldConfig::default();
        Ok(EwaldConfig {
            xi: self.xi,
            images: self.images,
            order_cheb: self.order_cheb,
            order_equi: self.order_equi.unwrap_or(self.order_cheb.min(8)),
            depth: self.depth,
            svd_tol: self.svd_tol,
            recip_cutoff: self.recip_cutoff.unwrap_or(defaults.recip_cutoff),
            far_order: None,
        })
    }
}

fn layout(kind: Kind) -> Layout {
    match kind {
        Kind::Uniform => Layout::Uniform,
        Kind::LatticeJittered => Layout::LatticeJittered,
    }
}

fn moments(m: MomentArg) -> Moments {
    match m {
        MomentArg::Charges => Moments::Charges,
        MomentArg::Dipoles => Moments::Dipoles,
        MomentArg::Quadrupoles => Moments::Quadrupoles,
    }
}

fn evaluate(method: Method, system: &ParticleSystem, config: &EwaldConfig) -> Result<EnergyReport, CliError> {
    Ok(match method {
        Method::Fmm => fmm_energy(system, config)?,
        Method::Fft => fft_energy(system, config)?,
        Method::Ewald => {
            if !(config.xi.is_finite() && config.xi > 0.0) {
                return Err(CliError::Config("xi must be positive".into()));
            }
            ewald_energy(system, config)?
        }
        Method::Direct => {
            system.validated()?;
            let clock = Instant::now();
            let e = direct_lattice_energy(system, XiMode::Bare, config.images)?;
            let mut r = EnergyReport::from_parts(0.0, e, 0.0, 0.0, 0.0);
            r.timings = PhaseTimings { near_field: clock.elapsed().as_secs_f64(), ..Default::default() };
            r
        }
    })
}

fn read_system(path: &PathBuf) -> Result<ParticleSystem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    particles::parse(&text)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn path_string(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = cli.threads;
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Energy { method, engine, io } => {
            let config = engine.config(&[method])?;
            let system = read_system(&io.input)?;
            let report = evaluate(method, &system, &config)?;
            let doc = EnergyDocument {
                manifest: RunManifest {
                    method,
                    config,
                    input: Some(io.input.display().to_string()),
                    output: path_string(&io.output),
                    seed: engine.seed,
                    threads,
                },
                particles: system.len(),
                box_radius: system.box_radius,
                report,
            };
            emit(io.output.as_ref(), &to_json(&doc))
        }
        Command::Compare { methods, sweep_cheb, format, engine, io } => {
            if methods.len() < 2 {
                return Err(CliError::Config("compare needs at least two methods".into()));
            }
            let reference = methods[0];
            let base = engine.config(&methods)?;
            let system = read_system(&io.input)?;
            let mut rows = Vec::new();
            let e_ref = evaluate(reference, &system, &base)?;
            let mut push = |method: Method, config: &EwaldConfig, r: EnergyReport| {
                rows.push(CompareRow {
                    method,
                    order_cheb: config.order_cheb,
                    order_equi: config.order_equi,
                    e_total: r.e_total,
                    r: (e_ref.e_total - r.e_total).abs() / e_ref.e_total.abs(),
                    timings: r.timings,
                });
            };
            push(reference, &base, e_ref.clone());
            let orders = if sweep_cheb.is_empty() { vec![base.order_cheb] } else { sweep_cheb };
            for l in orders {
                for &m in &methods[1..] {
                    let mut config = base.clone();
                    config.order_cheb = l;
                    if engine.order_equi.is_none() {
                        config.order_equi = l;
                    }
                    let r = evaluate(m, &system, &config)?;
                    push(m, &config, r);
                }
            }
            let text = match format {
                Format::Json => to_json(&CompareDocument { reference, config: base, particles: system.len(), rows }),
                Format::Tsv => {
                    let mut s = String::from("method\torder_cheb\torder_equi\te_total\tr\tevaluation\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{}\t{}\t{}\t{:.16e}\t{:.16e}\t{:.16e}\n",
                            r.method.name(),
                            r.order_cheb,
                            r.order_equi,
                            r.e_total,
                            r.r,
                            r.timings.evaluation()
                        ));
                    }
                    s
                }
            };
            emit(io.output.as_ref(), &text)
        }
        Command::Gen { kind, count, box_radius, moments: m, seed, output } => {
            let system = generate(&GenSpec { layout: layout(kind), count, box_radius, moments: moments(m), seed })?;
            emit(output.as_ref(), &particles::format(&system))
        }
        Command::Bench { sizes, methods, density, kind, moments: m, format, engine, output } => {
            if sizes.windows(2).any(|w| w[0] > w[1]) {
                return Err(CliError::Config("sizes must be sorted ascending".into()));
            }
            if !(density.is_finite() && density > 0.0) {
                return Err(CliError::Config("density must be positive".into()));
            }
            if methods.is_empty() {
                return Err(CliError::Config("bench needs at least one method".into()));
            }
            let mut rows = Vec::new();
            for &n in &sizes {
                let box_radius = 0.5 * (n as f64 / density).cbrt();
                let spec = GenSpec { layout: layout(kind), count: n, box_radius, moments: moments(m), seed: engine.seed.unwrap_or(0) };
                let system = generate(&spec)?;
                for &method in &methods {
                    let config = engine.config(&methods)?;
                    let r = evaluate(method, &system, &config)?;
                    let t = &r.timings;
                    rows.push(BenchRow {
                        particles: n,
                        method,
                        depth: config.depth.unwrap_or_else(|| default_depth(n)),
                        precompute: t.precompute,
                        interpolation: t.interpolation,
                        far_field: t.far_field,
                        near_field: t.near_field,
                        periodic_far: t.periodic_far,
                        self_energy: t.self_energy,
                        evaluation: t.evaluation(),
                        e_total: r.e_total,
                    });
                }
            }
            let text = match format {
                Format::Json => to_json(&BenchDocument { config: engine.config(&methods)?, density, rows }),
                Format::Tsv => {
                    let mut s = BENCH_COLUMNS.join("\t");
                    s.push('\n');
                    for r in &rows {
                        s.push_str(&r.tsv());
                        s.push('\n');
                    }
                    s
                }
            };
            emit(output.as_ref(), &text)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ankh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
