//! Batch CLI for the lens-based mmWave limited-feedback simulator.

use anyhow::{Context, Result};
use clap::Parser;
use lensfb_sim::config::{parse_bits_rule, parse_grid_mode, parse_schemes};
use lensfb_sim::{emit_csv, parse_config, run_experiment};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Monte Carlo sweep over SNR and feedback schemes; emits one CSV row per
/// (SNR, scheme). Flags override config-file values.
#[derive(Parser, Debug)]
#[command(name = "lensfb", version, about)]
struct Cli {
    /// Config file: flat key=value lines, `#` comments.
    #[arg(long)]
    config: Option<PathBuf>,

    /// SNR grid in dB, comma separated (e.g. `0,5,10,15`).
    #[arg(long)]
    snr: Option<String>,

    /// Monte Carlo trials per SNR point.
    #[arg(long)]
    trials: Option<usize>,

    /// Root seed for all RNG streams.
    #[arg(long)]
    seed: Option<u64>,

    /// Feedback scheme(s): subspace, rvq, or both.
    #[arg(long)]
    scheme: Option<String>,

    /// AoD placement: on (lens grid) or off (uniform angles).
    #[arg(long)]
    grid: Option<String>,

    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Explicit feedback bits (single value or one per SNR point),
    /// overriding the SNR scaling law.
    #[arg(long)]
    bits: Option<String>,
}

fn run(cli: Cli) -> Result<()> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;

    if let Some(snr) = &cli.snr {
        cfg.snr_grid_db = snr
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .context("parsing --snr")?;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = cli.seed {
        cfg.root_seed = seed;
    }
    if let Some(scheme) = &cli.scheme {
        cfg.schemes = parse_schemes(scheme).map_err(anyhow::Error::msg)?;
    }
    if let Some(grid) = &cli.grid {
        cfg.aod_grid_mode = parse_grid_mode(grid).map_err(anyhow::Error::msg)?;
    }
    if let Some(bits) = &cli.bits {
        cfg.bits_rule = parse_bits_rule(bits).map_err(anyhow::Error::msg)?;
    }
    cfg.validate()?;

    let result = run_experiment(&cfg)?;
    match &cli.out {
        Some(path) => {
            let file = fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            emit_csv(&result, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit_csv(&result, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
