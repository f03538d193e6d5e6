//! Command-line front end: each subcommand reads a JSON config, runs one
//! stage of the pipeline and renders a JSON report or a CSV table.

pub mod config;
pub mod error;
pub mod report;

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use gravtritter::fock::{evolve_two_photon, hom_record, trace_out_third, DEFAULT_CUTOFF};
use gravtritter::geometry::{schwarzschild_ln_chi, weak_field_redshift};
use gravtritter::modes::orthonormalize_pair;
use gravtritter::search::{
    evaluate_mixer, find_hom, sweep_chi, write_roots_csv, write_sweep_csv, PreparedFamily,
};
use gravtritter::tritter::{build_tritter, nogo_normalization, tritter_from_modes};
use gravtritter::{MixerMatrix, SweepSpec, TritterAngles, VERSION};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::config::{GeometryConfig, MixerConfig, NogoConfig, Source};
use crate::error::CliError;
use crate::report::*;

#[derive(Debug, Parser)]
#[command(
    name = "gravtritter",
    version,
    about = "Gravitational redshift as a three-mode mixer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for `random_angles` mixers; overrides the config's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Redshift χ from a Schwarzschild or weak-field geometry.
    Chi,
    /// Tritter angles and mixer for a mode pair.
    Tritter,
    /// Two-photon output state, reduced state, negativity and HOM record.
    Evolve,
    /// Table of the protocol across a χ grid.
    Sweep,
    /// Refined zeros of the coincidence amplitude.
    FindHom,
    /// Norm of a sharply shifted mode, showing unitarity fails off χ = 1.
    Nogo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Chi => "chi",
            Command::Tritter => "tritter",
            Command::Evolve => "evolve",
            Command::Sweep => "sweep",
            Command::FindHom => "find-hom",
            Command::Nogo => "nogo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Runs the command and returns the rendered output.
pub fn run(cli: &Cli) -> Result<Vec<u8>, CliError> {
    let cmd = cli.command;
    let format = cli.format.unwrap_or(match cmd {
        Command::Sweep | Command::FindHom => Format::Csv,
        _ => Format::Json,
    });
    if format == Format::Csv && matches!(cmd, Command::Chi | Command::Tritter | Command::Evolve) {
        return Err(CliError::Schema(format!(
            "`{}` only writes json",
            cmd.name()
        )));
    }
    let config_path = || {
        cli.config
            .as_deref()
            .ok_or_else(|| CliError::Schema(format!("`{}` needs --config", cmd.name())))
    };

    match cmd {
        Command::Chi => {
            let cfg: GeometryConfig = config::load(config_path()?)?;
            json_report(cmd, &cfg, &chi_output(&cfg)?)
        }
        Command::Tritter => {
            let mut cfg: MixerConfig = config::load(config_path()?)?;
            let mixer = resolve_mixer(&mut cfg, cli.seed)?;
            json_report(cmd, &cfg, &mixer)
        }
        Command::Evolve => {
            let mut cfg: MixerConfig = config::load(config_path()?)?;
            let out = evolve(&mut cfg, cli.seed)?;
            json_report(cmd, &cfg, &out)
        }
        Command::Sweep => {
            let spec: SweepSpec = config::load(config_path()?)?;
            let rows = sweep_chi(&spec)?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                log::warn!("{failed} of {} rows failed", rows.len());
            }
            match format {
                Format::Json => json_report(cmd, &spec, &rows),
                Format::Csv => csv_table(cmd, &spec, |w| write_sweep_csv(&rows, w)),
            }
        }
        Command::FindHom => {
            let spec: SweepSpec = config::load(config_path()?)?;
            let roots = find_hom(&spec)?;
            log::info!("{} HOM root(s)", roots.len());
            for r in roots.iter().filter(|r| !r.converged) {
                log::warn!(
                    "bisection did not converge near {} = {}",
                    r.parameter,
                    r.value
                );
            }
            match format {
                Format::Json => json_report(cmd, &spec, &roots),
                Format::Csv => csv_table(cmd, &spec, |w| write_roots_csv(&roots, w)),
            }
        }
        Command::Nogo => {
            let cfg = match &cli.config {
                Some(p) => config::load(p)?,
                None => NogoConfig::default(),
            };
            let rows = nogo_rows(&cfg)?;
            match format {
                Format::Json => json_report(cmd, &cfg, &rows),
                Format::Csv => csv_table(cmd, &cfg, |w| {
                    writeln!(w, "chi,normalization,unitary,verdict")?;
                    for r in &rows {
                        writeln!(
                            w,
                            "{:.15e},{:.15e},{},{}",
                            r.chi, r.normalization, r.unitary, r.verdict
                        )?;
                    }
                    Ok(())
                }),
            }
        }
    }
}

pub fn chi_output(cfg: &GeometryConfig) -> Result<ChiOutput, CliError> {
    let (model, ln_chi) = match cfg {
        GeometryConfig::Schwarzschild(s) => ("schwarzschild", schwarzschild_ln_chi(s)?),
        GeometryConfig::WeakField(w) => ("weak_field", weak_field_redshift(w.g, w.h, w.c)?.ln_1p()),
    };
    let chi = ln_chi.exp();
    Ok(ChiOutput {
        model: model.into(),
        chi,
        chi_minus_one: ln_chi.exp_m1(),
        ln_chi,
        chi_squared: chi * chi,
        frequency_ratio: (-2.0 * ln_chi).exp(),
    })
}

fn angles_output(chi: Option<f64>, angles: TritterAngles, matrix: MixerMatrix) -> MixerOutput {
    let det = matrix.determinant();
    MixerOutput {
        chi,
        angles,
        matrix,
        unitarity_residual: matrix.unitarity_residual(),
        determinant: [det.re, det.im],
        overlaps: None,
    }
}

/// Builds the mixer described by `cfg`, recording the seed actually used.
pub fn resolve_mixer(
    cfg: &mut MixerConfig,
    seed_flag: Option<u64>,
) -> Result<MixerOutput, CliError> {
    if seed_flag.is_some() && cfg.random_angles {
        cfg.seed = seed_flag;
    }
    // combination rules before any physics, so they report as schema errors
    cfg.source()?;
    let chi = match (&cfg.chi, &cfg.geometry) {
        (Some(c), _) => Some(*c),
        (None, Some(g)) => Some(chi_output(g)?.chi),
        (None, None) => None,
    };
    let source = cfg.source()?;
    let out = match source {
        Source::Modes(pair) => {
            let chi = chi.expect("checked by source()");
            let (a, b) = if cfg.orthonormalize {
                orthonormalize_pair(&pair.first, &pair.second)?
            } else {
                (pair.first.clone(), pair.second.clone())
            };
            let t = tritter_from_modes(&a, &b, chi)?;
            MixerOutput {
                overlaps: Some(t.overlaps),
                ..angles_output(Some(chi), t.angles, t.matrix)
            }
        }
        Source::Family(family) => {
            let chi = chi.expect("checked by source()");
            match family.prepare()? {
                PreparedFamily::Modes(a, b) => {
                    let t = tritter_from_modes(&a, &b, chi)?;
                    MixerOutput {
                        overlaps: Some(t.overlaps),
                        ..angles_output(Some(chi), t.angles, t.matrix)
                    }
                }
                p @ PreparedFamily::Angles { .. } => {
                    let (angles, m) = p.mixer(chi)?;
                    angles_output(Some(chi), angles, m)
                }
            }
        }
        Source::Angles([t, f, p]) => {
            let a = TritterAngles::new(t, f, p)?;
            angles_output(None, a, build_tritter(&a))
        }
        Source::Random(seed) => {
            cfg.seed = Some(seed);
            let mut rng = StdRng::seed_from_u64(seed);
            let mut draw = || rng.gen_range(0.0..=FRAC_PI_2);
            let a = TritterAngles::new(draw(), draw(), draw())?;
            log::info!("random angles from seed {seed}: {a:?}");
            angles_output(None, a, build_tritter(&a))
        }
    };
    if out.unitarity_residual > gravtritter::fock::UNITARITY_TOL {
        log::warn!("mixer unitarity residual {:.3e}", out.unitarity_residual);
    }
    Ok(out)
}

pub fn evolve(cfg: &mut MixerConfig, seed_flag: Option<u64>) -> Result<EvolveOutput, CliError> {
    let mixer = resolve_mixer(cfg, seed_flag)?;
    let state = evolve_two_photon(&mixer.matrix)?;
    let rho = trace_out_third(&state, DEFAULT_CUTOFF)?;
    // same path as a sweep row, so the figures agree bit for bit
    let point = evaluate_mixer(mixer.chi.unwrap_or(1.0), mixer.angles, mixer.matrix)?;
    let op = rho.operator();
    let dim = op.labels().len();
    let matrix = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let z = op.matrix().get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    Ok(EvolveOutput {
        mixer,
        state: state
            .basis()
            .iter()
            .zip(state.amplitudes())
            .map(|(occ, z)| Amplitude {
                occupation: *occ,
                amplitude: [z.re, z.im],
            })
            .collect(),
        reduced: ReducedState {
            labels: op.labels(),
            matrix,
        },
        purity: rho.purity(),
        rho2020: point.rho2020,
        rho0202: point.rho0202,
        rho1111: point.rho1111,
        negativity: point.negativity,
        negativity_bound: point.negativity_bound,
        hom: hom_record(&mixer.matrix, cfg.hom_tolerance),
    })
}

pub fn nogo_rows(cfg: &NogoConfig) -> Result<Vec<NogoRow>, CliError> {
    cfg.chi
        .iter()
        .map(|&chi| {
            let normalization = nogo_normalization(chi)?;
            let unitary = normalization == 1.0;
            Ok(NogoRow {
                chi,
                normalization,
                unitary,
                verdict: if unitary {
                    "unitary shift possible"
                } else {
                    "unitary shift impossible"
                }
                .into(),
            })
        })
        .collect()
}

fn json_report<C: Serialize, R: Serialize>(
    cmd: Command,
    config: &C,
    result: &R,
) -> Result<Vec<u8>, CliError> {
    let report = Report {
        version: VERSION.to_string(),
        command: cmd.name().to_string(),
        config,
        result,
    };
    let mut buf =
        serde_json::to_vec_pretty(&report).map_err(|e| CliError::Output(e.to_string()))?;
    buf.push(b'\n');
    Ok(buf)
}

fn csv_table<C: Serialize>(
    cmd: Command,
    config: &C,
    body: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<Vec<u8>, CliError> {
    let header = Header {
        version: VERSION.to_string(),
        command: cmd.name().to_string(),
        config,
    };
    let mut buf = b"# ".to_vec();
    serde_json::to_writer(&mut buf, &header).map_err(|e| CliError::Output(e.to_string()))?;
    buf.push(b'\n');
    body(&mut buf).map_err(|e| CliError::Output(e.to_string()))?;
    Ok(buf)
}

/// Writes `bytes` to `out`, or standard output when `None`.
pub fn emit(out: Option<&std::path::Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output(e.to_string()))
        }
    }
}
