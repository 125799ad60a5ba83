//! Seeded Monte Carlo sweeps over SNR points and feedback schemes.
//!
//! Each (trial, SNR point) pair gets its own RNG stream with
//! `stream_id = trial * grid_len + snr_index`, so trials are independent
//! work units and results are identical for any degree of parallelism.
//! Within one trial the stream is consumed in a fixed order: AoDs, per-user
//! gains, subspace codebooks (users in order), RVQ codebooks (users in
//! order). Aggregation is a sequential reduction in ascending trial order.

use lensfb_core::beamspace::{
    beamspace_channel, effective_steering_fast, select_beams, BeamSelector,
};
use lensfb_core::channel::{
    generate_channel, sample_aods, AodGridMode, BitsRule, SpatialChannel, SystemConfig,
    UserPathSet,
};
use lensfb_core::codebook::{
    quantize_rvq_streaming, quantize_subspace_streaming, quantize_subspace_streaming_fast,
};
use lensfb_core::numerics::{vec_norm, vec_normalize, ComplexMatrix, RngStream, C64};
use lensfb_core::precoding::{
    ideal_rates, rate_gap_bound, realized_rates, required_bits, snr_to_power, zf_precoder,
};
use rayon::prelude::*;
use thiserror::Error;

/// RVQ exhaustive search gets expensive past this many bits; trials for
/// the RVQ scheme are then capped (deterministically) at `RVQ_TRIAL_CAP`.
pub const RVQ_WIDE_SEARCH_BITS: u32 = 14;
pub const RVQ_TRIAL_CAP: usize = 100;

/// Stream id reserved for the off-grid pilot estimate of E[||h^e||^2].
const PILOT_STREAM_ID: u64 = u64::MAX;
const PILOT_REALIZATIONS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0}")]
    Core(#[from] lensfb_core::Error),
    #[error("trial {trial}, snr {snr_db} dB: {source}")]
    Trial {
        trial: usize,
        snr_db: f64,
        source: lensfb_core::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeLabel {
    Ideal,
    Subspace,
    Rvq,
}

impl std::fmt::Display for SchemeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SchemeLabel::Ideal => "ideal",
            SchemeLabel::Subspace => "subspace",
            SchemeLabel::Rvq => "rvq",
        })
    }
}

/// One aggregated (SNR, scheme) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub scheme: SchemeLabel,
    /// Feedback bits; absent for the ideal rows.
    pub bits: Option<u32>,
    pub mean_rate: f64,
    pub mean_gap: f64,
    /// Analytic rate-gap bound (0 for ideal rows).
    pub bound: f64,
    pub trials: usize,
    pub seed: u64,
    /// Standard error of the mean gap (of the mean rate for ideal rows).
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
}

struct TrialOutput {
    ideal_mean: f64,
    subspace: Option<(f64, f64)>, // (mean rate, mean gap)
    rvq: Option<(f64, f64)>,
}

struct TrialChannels {
    users: Vec<UserPathSet>,
    chans: Vec<SpatialChannel>,
    sel: BeamSelector,
    equivalent: Vec<Vec<C64>>,
    h_true: ComplexMatrix,
}

fn draw_channels(rng: &mut RngStream, cfg: &SystemConfig) -> lensfb_core::Result<TrialChannels> {
    let users = sample_aods(rng, cfg)?;
    let chans: Vec<SpatialChannel> = users
        .iter()
        .map(|u| generate_channel(rng, u, cfg.m))
        .collect::<lensfb_core::Result<_>>()?;
    let beamspace: Vec<Vec<C64>> = users
        .iter()
        .zip(&chans)
        .map(|(u, c)| beamspace_channel(&u.psis, &c.gains, cfg.m))
        .collect::<lensfb_core::Result<_>>()?;
    let sel = select_beams(&beamspace, cfg.n_rf)?;
    let equivalent: Vec<Vec<C64>> = beamspace
        .iter()
        .map(|hb| lensfb_core::beamspace::equivalent_channel(&sel, hb))
        .collect::<lensfb_core::Result<_>>()?;
    let h_true = ComplexMatrix::from_columns(&equivalent)?;
    Ok(TrialChannels {
        users,
        chans,
        sel,
        equivalent,
        h_true,
    })
}

/// Gap and rate of one scheme within one trial, paired against the ideal
/// per-user rates of the same channel realization.
fn evaluate_feedback(
    h_true: &ComplexMatrix,
    h_hat_cols: &[Vec<C64>],
    ideal_per_user: &[f64],
    gamma: f64,
) -> lensfb_core::Result<(f64, f64)> {
    let h_hat = ComplexMatrix::from_columns(h_hat_cols)?;
    let precoder = zf_precoder(&h_hat)?;
    let rates = realized_rates(h_true, &precoder, gamma)?;
    let k = rates.len() as f64;
    let mean_rate = rates.iter().map(|r| r.per_user_rate).sum::<f64>() / k;
    let mean_gap = ideal_per_user
        .iter()
        .zip(&rates)
        .map(|(i, r)| i - r.per_user_rate)
        .sum::<f64>()
        / k;
    Ok((mean_rate, mean_gap))
}

fn run_trial(
    cfg: &SystemConfig,
    snr_index: usize,
    trial: usize,
    bits: u32,
    gamma: f64,
    rvq_active: bool,
) -> lensfb_core::Result<TrialOutput> {
    let grid_len = cfg.snr_grid_db.len() as u64;
    let mut rng = RngStream::new(cfg.root_seed, trial as u64 * grid_len + snr_index as u64);
    let tc = draw_channels(&mut rng, cfg)?;

    let ideal = ideal_rates(&tc.h_true, gamma)?;
    let ideal_per_user: Vec<f64> = ideal.iter().map(|r| r.per_user_rate).collect();
    let ideal_mean = ideal_per_user.iter().sum::<f64>() / cfg.k as f64;

    let subspace = if cfg.schemes.subspace {
        let mut cols = Vec::with_capacity(cfg.k);
        for k_i in 0..cfg.k {
            let t = effective_steering_fast(&tc.sel, &tc.users[k_i].psis, cfg.m)?;
            let he = &tc.equivalent[k_i];
            let magnitude = vec_norm(he);
            let (report, _sin2, codeword) = match cfg.aod_grid_mode {
                AodGridMode::OnGrid => {
                    let g_tilde = vec_normalize(&tc.chans[k_i].gains)?;
                    quantize_subspace_streaming_fast(&mut rng, &t, bits, &g_tilde, magnitude)?
                }
                AodGridMode::OffGrid => quantize_subspace_streaming(&mut rng, &t, bits, he)?,
            };
            cols.push(
                codeword
                    .iter()
                    .map(|x| x * report.magnitude)
                    .collect::<Vec<C64>>(),
            );
        }
        Some(evaluate_feedback(&tc.h_true, &cols, &ideal_per_user, gamma)?)
    } else {
        None
    };

    let rvq = if cfg.schemes.rvq && rvq_active {
        let mut cols = Vec::with_capacity(cfg.k);
        for k_i in 0..cfg.k {
            let he = &tc.equivalent[k_i];
            let (report, _sin2, codeword) =
                quantize_rvq_streaming(&mut rng, cfg.n_rf, bits, he)?;
            cols.push(
                codeword
                    .iter()
                    .map(|x| x * report.magnitude)
                    .collect::<Vec<C64>>(),
            );
        }
        Some(evaluate_feedback(&tc.h_true, &cols, &ideal_per_user, gamma)?)
    } else {
        None
    };

    Ok(TrialOutput {
        ideal_mean,
        subspace,
        rvq,
    })
}

/// Off-grid E[||h^e||^2], estimated once per experiment on a reserved
/// stream (on-grid the analytic value P is used instead).
fn estimate_e_norm2(cfg: &SystemConfig) -> lensfb_core::Result<f64> {
    let mut rng = RngStream::new(cfg.root_seed, PILOT_STREAM_ID);
    let mut acc = 0.0;
    for _ in 0..PILOT_REALIZATIONS {
        let tc = draw_channels(&mut rng, cfg)?;
        acc += tc
            .equivalent
            .iter()
            .map(|he| vec_norm(he).powi(2))
            .sum::<f64>()
            / cfg.k as f64;
    }
    Ok(acc / PILOT_REALIZATIONS as f64)
}

fn mean_and_std_err(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Run the full sweep described by `cfg`.
pub fn run_experiment(cfg: &SystemConfig) -> Result<ExperimentResult, SimError> {
    cfg.validate()?;
    let grid_len = cfg.snr_grid_db.len();

    let e_norm2 = match cfg.aod_grid_mode {
        AodGridMode::OnGrid => cfg.p as f64,
        AodGridMode::OffGrid => estimate_e_norm2(cfg)?,
    };

    let bits_per_snr: Vec<u32> = cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(s, &snr)| match &cfg.bits_rule {
            BitsRule::ScalingLaw => Ok(required_bits(cfg.p, cfg.k, snr)?.1),
            BitsRule::Explicit(list) => Ok(if list.len() == 1 { list[0] } else { list[s] }),
        })
        .collect::<lensfb_core::Result<_>>()?;
    let gammas: Vec<f64> = cfg
        .snr_grid_db
        .iter()
        .map(|&snr| snr_to_power(snr, cfg.k, e_norm2))
        .collect::<lensfb_core::Result<_>>()?;
    let rvq_trials: Vec<usize> = bits_per_snr
        .iter()
        .map(|&b| {
            if b >= RVQ_WIDE_SEARCH_BITS {
                cfg.trials.min(RVQ_TRIAL_CAP)
            } else {
                cfg.trials
            }
        })
        .collect();

    let mut rows = Vec::new();
    for s in 0..grid_len {
        let snr_db = cfg.snr_grid_db[s];
        let bits = bits_per_snr[s];
        let gamma = gammas[s];

        // trials are independent; collect preserves trial order
        let outputs: Vec<TrialOutput> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                run_trial(cfg, s, t, bits, gamma, t < rvq_trials[s]).map_err(|source| {
                    SimError::Trial {
                        trial: t,
                        snr_db,
                        source,
                    }
                })
            })
            .collect::<Result<_, SimError>>()?;

        let ideal_samples: Vec<f64> = outputs.iter().map(|o| o.ideal_mean).collect();
        let (ideal_mean, ideal_se) = mean_and_std_err(&ideal_samples);
        rows.push(ResultRow {
            snr_db,
            scheme: SchemeLabel::Ideal,
            bits: None,
            mean_rate: ideal_mean,
            mean_gap: 0.0,
            bound: 0.0,
            trials: cfg.trials,
            seed: cfg.root_seed,
            std_err: ideal_se,
        });

        if cfg.schemes.subspace {
            let rates: Vec<f64> = outputs.iter().filter_map(|o| o.subspace.map(|x| x.0)).collect();
            let gaps: Vec<f64> = outputs.iter().filter_map(|o| o.subspace.map(|x| x.1)).collect();
            let (mean_rate, _) = mean_and_std_err(&rates);
            let (mean_gap, se) = mean_and_std_err(&gaps);
            rows.push(ResultRow {
                snr_db,
                scheme: SchemeLabel::Subspace,
                bits: Some(bits),
                mean_rate,
                mean_gap,
                bound: rate_gap_bound(gamma, cfg.k, e_norm2, bits, cfg.p),
                trials: gaps.len(),
                seed: cfg.root_seed,
                std_err: se,
            });
        }

        if cfg.schemes.rvq {
            let rates: Vec<f64> = outputs.iter().filter_map(|o| o.rvq.map(|x| x.0)).collect();
            let gaps: Vec<f64> = outputs.iter().filter_map(|o| o.rvq.map(|x| x.1)).collect();
            let (mean_rate, _) = mean_and_std_err(&rates);
            let (mean_gap, se) = mean_and_std_err(&gaps);
            rows.push(ResultRow {
                snr_db,
                scheme: SchemeLabel::Rvq,
                bits: Some(bits),
                mean_rate,
                mean_gap,
                // same bound expression; the RVQ codeword space has
                // dimension N_RF, so the exponent uses N_RF - 1
                bound: rate_gap_bound(gamma, cfg.k, e_norm2, bits, cfg.n_rf),
                trials: gaps.len(),
                seed: cfg.root_seed,
                std_err: se,
            });
        }
    }

    // ascending SNR; stable sort keeps ideal/subspace/rvq order per point
    rows.sort_by(|a, b| a.snr_db.partial_cmp(&b.snr_db).expect("finite snr"));
    Ok(ExperimentResult { rows })
}
