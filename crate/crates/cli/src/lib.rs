//! Experiment runner for the `quintic-lab` laboratory.
//!
//! Each experiment takes a flat TOML parameter table and produces a report
//! with one row per measurement.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

use std::time::Instant;

use serde::Serialize;

pub use config::{ExperimentConfig, ExperimentId, Format, DEFAULT_SEED};
pub use error::CliError;
pub use report::{Meta, Report, RunOutput};

use experiments::*;

fn finish<P: Serialize>(cfg: &ExperimentConfig, params: &P, table: Table, start: Instant) -> RunOutput {
    RunOutput {
        report: Report {
            experiment: cfg.experiment.name().to_string(),
            params: serde_json::to_value(params).expect("parameters serialize"),
            rows: table.rows,
            meta: Meta {
                seed: cfg.seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
                wall_ms: start.elapsed().as_millis() as u64,
            },
        },
        columns: table.columns,
    }
}

/// Runs the experiment named in `cfg`.
pub fn run_config(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let seed = cfg.seed;
    macro_rules! go {
        ($ty:ty, $f:expr) => {{
            let p: $ty = cfg.typed()?;
            let table = $f(&p)?;
            Ok(finish(cfg, &p, table, start))
        }};
    }
    match cfg.experiment {
        ExperimentId::AnnulusCount => go!(AnnulusCountParams, annulus_count),
        ExperimentId::HypothesisScan => go!(HypothesisScanParams, |p| hypothesis_scan(p, seed)),
        ExperimentId::ReductionVerify => go!(ReductionVerifyParams, reduction_verify),
        ExperimentId::HSpectrum => go!(HSpectrumParams, |p| h_spectrum_table(p, seed)),
        ExperimentId::StrichartzScan => go!(StrichartzScanParams, |p| strichartz_table(p, seed)),
        ExperimentId::TrilinearScan => go!(TrilinearScanParams, trilinear_table),
        ExperimentId::SymbolBoundScan => go!(SymbolBoundParams, |p| symbol_bound_table(p, seed)),
        ExperimentId::EnergyTrack => go!(EnergyTrackParams, energy_track),
    }
}
