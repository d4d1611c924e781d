//! Batch front-end: parses a run configuration, dispatches one subcommand,
//! and writes its report, state files and plot-ready CSV into an output
//! directory.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod plotdata;

use std::path::{Path, PathBuf};

use dicke_core::reference::{self, ReferenceValue};
use serde::Serialize;
use thiserror::Error;

use crate::config::RunConfig;
use crate::output::{config_hash, versions, write_json, Envelope};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

/// Subcommand with the flags that are not config sections.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    State,
    Simulate,
    Witness,
    Bound,
    Scan,
    Lms,
    Sample,
    ProtocolsPairs,
    ProtocolsOdt,
    ProtocolsQss,
    Qss,
    Compare,
}

impl Command {
    /// Stem of the report file.
    pub fn name(&self) -> &'static str {
        match self {
            Command::State => "state_report",
            Command::Simulate => "simulate",
            Command::Witness => "witness",
            Command::Bound => "bound",
            Command::Scan => "scan",
            Command::Lms => "lms",
            Command::Sample => "sample",
            Command::ProtocolsPairs => "protocols_pairs",
            Command::ProtocolsOdt => "protocols_odt",
            Command::ProtocolsQss => "protocols_qss",
            Command::Qss => "qss",
            Command::Compare => "compare",
        }
    }
}

/// A protocol result with the published values it relates to.
#[derive(Clone, Debug, Serialize)]
pub struct WithReference<R: Serialize> {
    #[serde(flatten)]
    pub result: R,
    pub reference: Vec<&'static ReferenceValue>,
}

fn with_reference<R: Serialize>(result: R, keys: &[&str]) -> WithReference<R> {
    WithReference { result, reference: keys.iter().filter_map(|k| reference::lookup(k)).collect() }
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    State(commands::StateReport),
    Simulate(commands::SimulateReport),
    Witness(commands::WitnessReport),
    Bound(commands::BoundReport),
    Scan(commands::ScanReport),
    Lms(commands::LmsReport),
    Sample(commands::SampleReport),
    Pairs(WithReference<dicke_core::protocols::TelecloningReport>),
    Odt(WithReference<dicke_core::protocols::OdtResult>),
    Qss(WithReference<dicke_core::protocols::QssResult>),
    Compare(commands::CompareReport),
}

/// Files written by one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub report_path: PathBuf,
    pub plot_paths: Vec<PathBuf>,
}

/// Runs `command` under `config`, writing every artifact into `out`.
pub fn run(command: &Command, config: &RunConfig, out: &Path) -> Result<RunOutput, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let report = match command {
        Command::State => Report::State(commands::state(&config.state, out)?),
        Command::Simulate => Report::Simulate(commands::simulate(&config.simulate, out)?),
        Command::Witness => Report::Witness(commands::witness(&config.witness)?),
        Command::Bound => Report::Bound(commands::bound(&config.bound)?),
        Command::Scan => Report::Scan(commands::scan(&config.scan)?),
        Command::Lms => Report::Lms(commands::lms(&config.lms, out)?),
        Command::Sample => Report::Sample(commands::sample(&config.sample, out)?),
        Command::ProtocolsPairs => Report::Pairs(with_reference(commands::protocols_pairs(&config.protocols)?, &[])),
        Command::ProtocolsOdt => Report::Odt(with_reference(
            commands::protocols_odt(&config.protocols)?,
            &["odt_mean_p_success", "odt_mean_fidelity"],
        )),
        Command::ProtocolsQss | Command::Qss => {
            Report::Qss(with_reference(commands::protocols_qss(&config.protocols)?, &["qber_N4", "qber_N6"]))
        }
        Command::Compare => Report::Compare(commands::compare(&config.compare, out)?),
    };
    let hash = config_hash(config);
    let envelope = Envelope { command: command.name(), config_hash: &hash, versions: versions(), report: &report };
    let report_path = write_json(out, &format!("{}.json", command.name()), &envelope)?;
    let plot_paths = plotdata::emit_plotdata(&report, out)?;
    Ok(RunOutput { report_path, plot_paths })
}
