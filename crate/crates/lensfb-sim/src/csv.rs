//! Deterministic CSV emission of experiment results.
//!
//! One data row per (SNR, scheme), ascending SNR with scheme order
//! ideal/subspace/rvq, 15 decimal places on every statistic. The layout is
//! gnuplot-friendly: e.g. `plot "out.csv" using 1:4` after filtering a
//! scheme with `awk -F, '$2=="subspace"'`.

use crate::experiment::ExperimentResult;
use std::io::{self, Write};

pub const CSV_HEADER: &str = "snr_db,scheme,bits,mean_rate,mean_gap,bound,trials,seed,std_err";

pub fn emit_csv<W: Write>(result: &ExperimentResult, out: &mut W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &result.rows {
        let bits = row.bits.map(|b| b.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{:.15},{:.15},{:.15},{},{},{:.15}",
            row.snr_db,
            row.scheme,
            bits,
            row.mean_rate,
            row.mean_gap,
            row.bound,
            row.trials,
            row.seed,
            row.std_err
        )?;
    }
    Ok(())
}

/// In-memory rendering, for byte-level comparisons.
pub fn csv_bytes(result: &ExperimentResult) -> Vec<u8> {
    let mut buf = Vec::new();
    emit_csv(result, &mut buf).expect("write to Vec cannot fail");
    buf
}
