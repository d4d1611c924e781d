//! Command-line grammar and its mapping onto a run configuration.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use dicke_core::lms::Strategy;
use dicke_core::qstate::Plane;

use crate::config::{RunConfig, StateSpec};
use crate::{CliError, Command};

#[derive(Parser, Debug)]
#[command(name = "dicke", version, about = "Six-photon Dicke state simulator")]
pub struct Cli {
    /// JSON run configuration; absent sections take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving reports, states and CSV tables.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Builds a register: `dicke N m`, `ghz N`, `w N`, or the configured state.
    State { spec: Vec<String> },
    /// Source simulation, optionally with a calibration sweep.
    Simulate,
    /// Spin witness values and pair correlations.
    Witness {
        #[arg(long)]
        alpha: Vec<f64>,
    },
    /// Biseparable bounds by see-saw.
    Bound {
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long = "alpha-grid", value_delimiter = ',', allow_hyphen_values = true)]
        alpha_grid: Option<Vec<f64>>,
    },
    /// Full-register correlator along an in-plane axis.
    Scan {
        #[arg(long, value_parser = parse_plane)]
        plane: Option<Plane>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Pauli decomposition and measurement-setting plan.
    Lms {
        #[arg(long)]
        strategy: Option<Strategy>,
    },
    /// Sampled counts and the fidelity estimate.
    Sample {
        #[arg(long)]
        events: Option<u64>,
    },
    /// Pair channels, open-destination teleportation and secret sharing.
    Protocols {
        #[command(subcommand)]
        which: ProtocolCmd,
    },
    /// Secret-sharing error rate.
    Qss {
        #[arg(long)]
        rounds: Option<u64>,
    },
    /// Computed values in --out next to the published ones.
    Compare {
        #[arg(long = "rep-rate-hz")]
        rep_rate_hz: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ProtocolCmd {
    Pairs,
    Odt {
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        keep: Option<Vec<usize>>,
    },
    Qss {
        #[arg(long)]
        rounds: Option<u64>,
    },
}

fn parse_plane(s: &str) -> Result<Plane, String> {
    match s {
        "xz" => Ok(Plane::Xz),
        "yz" => Ok(Plane::Yz),
        other => Err(format!("plane must be xz or yz, got {other}")),
    }
}

fn parse_state(words: &[String]) -> Result<StateSpec, CliError> {
    let nums = |k: usize| -> Result<Vec<usize>, CliError> {
        if words.len() != k + 1 {
            return Err(CliError::Config(format!("`{}` takes {k} integer argument(s)", words[0])));
        }
        words[1..].iter().map(|w| w.parse().map_err(|e| CliError::Config(format!("{w}: {e}")))).collect()
    };
    match words[0].as_str() {
        "dicke" => nums(2).map(|v| StateSpec::Dicke { n: v[0], m: v[1] }),
        "ghz" => nums(1).map(|v| StateSpec::Ghz { n: v[0] }),
        "w" => nums(1).map(|v| StateSpec::W { n: v[0] }),
        other => Err(CliError::Config(format!("unknown state `{other}`; use dicke N m, ghz N or w N"))),
    }
}

/// Applies command-line flags to the loaded configuration.
pub fn resolve(cli: &Cli) -> Result<(Command, RunConfig), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.sample.seed = seed;
        cfg.protocols.seed = seed;
        cfg.bound.seesaw.seed = seed;
    }
    let command = match &cli.command {
        Cmd::State { spec } => {
            if !spec.is_empty() {
                cfg.state.state = parse_state(spec)?;
            }
            Command::State
        }
        Cmd::Simulate => Command::Simulate,
        Cmd::Witness { alpha } => {
            if !alpha.is_empty() {
                cfg.witness.alphas = alpha.clone();
            }
            Command::Witness
        }
        Cmd::Bound { n, alpha_grid } => {
            if let Some(n) = n {
                cfg.bound.n = *n;
            }
            if let Some(a) = alpha_grid {
                cfg.bound.alphas = a.clone();
            }
            Command::Bound
        }
        Cmd::Scan { plane, points } => {
            if let Some(p) = plane {
                cfg.scan.plane = *p;
            }
            if let Some(p) = points {
                cfg.scan.points = *p;
            }
            Command::Scan
        }
        Cmd::Lms { strategy } => {
            if let Some(s) = strategy {
                cfg.lms.strategy = *s;
            }
            Command::Lms
        }
        Cmd::Sample { events } => {
            if let Some(e) = events {
                cfg.sample.events = *e;
            }
            Command::Sample
        }
        Cmd::Protocols { which } => match which {
            ProtocolCmd::Pairs => Command::ProtocolsPairs,
            ProtocolCmd::Odt { keep } => {
                if let Some(k) = keep {
                    cfg.protocols.keep = [k[0], k[1]];
                }
                Command::ProtocolsOdt
            }
            ProtocolCmd::Qss { rounds } => {
                if let Some(r) = rounds {
                    cfg.protocols.rounds = *r;
                }
                Command::ProtocolsQss
            }
        },
        Cmd::Qss { rounds } => {
            if let Some(r) = rounds {
                cfg.protocols.rounds = *r;
            }
            Command::Qss
        }
        Cmd::Compare { rep_rate_hz } => {
            if rep_rate_hz.is_some() {
                cfg.compare.rep_rate_hz = *rep_rate_hz;
            }
            Command::Compare
        }
    };
    Ok((command, cfg))
}
