//! Flat TOML experiment configuration.
//!
//! A config file is one table of `key = value` pairs. The reserved keys
//! `experiment` and `seed` select the experiment and the seed; every other key
//! is a parameter of that experiment. Unknown keys are rejected.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    AnnulusCount,
    HypothesisScan,
    ReductionVerify,
    HSpectrum,
    StrichartzScan,
    TrilinearScan,
    SymbolBoundScan,
    EnergyTrack,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::AnnulusCount,
        ExperimentId::HypothesisScan,
        ExperimentId::ReductionVerify,
        ExperimentId::HSpectrum,
        ExperimentId::StrichartzScan,
        ExperimentId::TrilinearScan,
        ExperimentId::SymbolBoundScan,
        ExperimentId::EnergyTrack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::AnnulusCount => "annulus-count",
            ExperimentId::HypothesisScan => "hypothesis-scan",
            ExperimentId::ReductionVerify => "reduction-verify",
            ExperimentId::HSpectrum => "h-spectrum",
            ExperimentId::StrichartzScan => "strichartz-scan",
            ExperimentId::TrilinearScan => "trilinear-scan",
            ExperimentId::SymbolBoundScan => "symbol-bound-scan",
            ExperimentId::EnergyTrack => "energy-track",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::usage("experiment", format!("unknown experiment id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    /// Parameter table without the reserved keys.
    pub params: toml::Table,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        ExperimentConfig { experiment, params: toml::Table::new(), seed: DEFAULT_SEED }
    }

    /// Parses a config document. `experiment` may come from the command line
    /// instead; if both are present they must agree.
    pub fn parse(text: &str, experiment: Option<ExperimentId>) -> Result<Self, CliError> {
        let mut table: toml::Table =
            text.parse().map_err(|e: toml::de::Error| CliError::usage("config", e.message().to_string()))?;
        let from_file = match table.remove("experiment") {
            Some(toml::Value::String(s)) => Some(s.parse::<ExperimentId>()?),
            Some(_) => return Err(CliError::usage("experiment", "must be a string")),
            None => None,
        };
        let experiment = match (experiment, from_file) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::usage("experiment", format!("config is for `{b}`, command is `{a}`")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(CliError::usage("experiment", "no experiment given")),
        };
        let seed = match table.remove("seed") {
            Some(toml::Value::Integer(s)) if s >= 0 => s as u64,
            Some(_) => return Err(CliError::usage("seed", "must be a nonnegative integer")),
            None => DEFAULT_SEED,
        };
        Ok(ExperimentConfig { experiment, params: table, seed })
    }

    pub fn load(path: &Path, experiment: Option<ExperimentId>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text, experiment)
    }

    /// Typed parameters, with defaults for absent keys.
    pub fn typed<T: serde::de::DeserializeOwned>(&self) -> Result<T, CliError> {
        toml::Value::Table(self.params.clone()).try_into().map_err(|e: toml::de::Error| {
            let msg = e.message().to_string();
            let path = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field"))
                .unwrap_or("params")
                .to_string();
            CliError::usage(path, msg)
        })
    }
}
