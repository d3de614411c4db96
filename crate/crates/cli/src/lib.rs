//! Batch driver for variational response spectra: configuration parsing,
//! operator loading, sweep orchestration and CSV/JSON output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, parse_config_str, ConfigErrors, E0Source, Format, NoisePreset, RunConfig};
pub use output::{emit, from_json, render, to_csv, to_json};
pub use run::{load, run, run_oracle, sha256_hex, RunError, RunOptions, RunRecord};
