//! Flat `key=value` configuration documents, with `#` comments.
//!
//! Keys match the `SystemConfig` field names (case-insensitive, so the
//! conventional `K=8` spelling works). Missing keys take the defaults of
//! the standard scenario: `(M, N_RF, K, P) = (128, 24, 8, 3)`, half-wave
//! spacing, SNR grid {0, 5, 10, 15} dB, 500 trials, on-grid AoDs, both
//! schemes, and feedback bits from the scaling law.

use lensfb_core::channel::{AodGridMode, BitsRule, SchemeSet, SystemConfig};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}`: {msg}")]
    BadValue {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("line {line}: expected `key=value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("{0}")]
    Constraint(lensfb_core::Error),
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| format!("{e}")))
        .collect()
}

pub fn parse_schemes(value: &str) -> Result<SchemeSet, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "both" | "subspace,rvq" | "rvq,subspace" => Ok(SchemeSet::BOTH),
        "subspace" => Ok(SchemeSet {
            subspace: true,
            rvq: false,
        }),
        "rvq" => Ok(SchemeSet {
            subspace: false,
            rvq: true,
        }),
        other => Err(format!(
            "expected one of subspace, rvq, both (got `{other}`)"
        )),
    }
}

pub fn parse_bits_rule(value: &str) -> Result<BitsRule, String> {
    let v = value.trim().to_ascii_lowercase();
    if v == "auto" || v == "scaling_law" {
        return Ok(BitsRule::ScalingLaw);
    }
    parse_list::<u32>(&v).map(BitsRule::Explicit)
}

pub fn parse_grid_mode(value: &str) -> Result<AodGridMode, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "on_grid" | "on" => Ok(AodGridMode::OnGrid),
        "off_grid" | "off" => Ok(AodGridMode::OffGrid),
        other => Err(format!("expected on_grid or off_grid (got `{other}`)")),
    }
}

/// Parse a configuration document into a validated `SystemConfig`.
pub fn parse_config(text: &str) -> Result<SystemConfig, ConfigError> {
    let mut cfg = SystemConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: stripped.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let bad = |msg: String| ConfigError::BadValue {
            line,
            key: key.to_string(),
            msg,
        };
        match key.to_ascii_lowercase().as_str() {
            "m" => cfg.m = value.parse().map_err(|e| bad(format!("{e}")))?,
            "n_rf" => cfg.n_rf = value.parse().map_err(|e| bad(format!("{e}")))?,
            "k" => cfg.k = value.parse().map_err(|e| bad(format!("{e}")))?,
            "p" => cfg.p = value.parse().map_err(|e| bad(format!("{e}")))?,
            "d_over_lambda" => {
                cfg.d_over_lambda = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "snr_grid_db" => cfg.snr_grid_db = parse_list(value).map_err(bad)?,
            "trials" => cfg.trials = value.parse().map_err(|e| bad(format!("{e}")))?,
            "root_seed" => cfg.root_seed = value.parse().map_err(|e| bad(format!("{e}")))?,
            "schemes" => cfg.schemes = parse_schemes(value).map_err(bad)?,
            "bits_rule" => cfg.bits_rule = parse_bits_rule(value).map_err(bad)?,
            "aod_grid_mode" => cfg.aod_grid_mode = parse_grid_mode(value).map_err(bad)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
    }
    cfg.validate().map_err(ConfigError::Constraint)?;
    Ok(cfg)
}
