//! Experiment orchestration for the lens-based mmWave feedback simulator:
//! config parsing, seeded Monte Carlo sweeps over SNR and schemes, and
//! deterministic CSV emission.

pub mod config;
pub mod csv;
pub mod experiment;

pub use config::parse_config;
pub use csv::{csv_bytes, emit_csv};
pub use experiment::{run_experiment, ExperimentResult, ResultRow, SchemeLabel, SimError};
