//! Zero-forcing precoding, analytic per-user rates, and the rate-gap /
//! feedback-bit analytics.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::numerics::{right_pseudo_inverse, vec_inner, vec_norm, ComplexMatrix, C64};

/// ZF precoder: unit-norm columns, `V[:, i] = normalize(pinv(H)[:, i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingMatrix {
    pub v: ComplexMatrix,
}

/// Per-user rate together with the SINR terms it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSample {
    /// bits/s/Hz.
    pub per_user_rate: f64,
    /// `|h_k^H v_k|^2`.
    pub signal_power: f64,
    /// `|h_k^H v_i|^2` for `i != k`, in ascending `i` order.
    pub interference_powers: Vec<f64>,
}

/// Build the ZF precoder from a (possibly fed-back) equivalent channel
/// matrix, N_RF x K with full column rank.
pub fn zf_precoder(h_hat: &ComplexMatrix) -> Result<PrecodingMatrix> {
    let pinv = right_pseudo_inverse(h_hat)?;
    let k = h_hat.cols();
    let cols: Vec<Vec<C64>> = (0..k)
        .map(|i| {
            let c = pinv.column(i);
            let nrm = vec_norm(&c);
            if !(nrm > 0.0) || !nrm.is_finite() {
                return Err(Error::SingularMatrix { rcond: 0.0 });
            }
            Ok(c.iter().map(|x| x / nrm).collect())
        })
        .collect::<Result<_>>()?;
    Ok(PrecodingMatrix {
        v: ComplexMatrix::from_columns(&cols)?,
    })
}

fn log2_1p(x: f64) -> f64 {
    libm::log1p(x) / LN_2
}

/// Rate of user `k` under precoder `V` with the true equivalent channels
/// in the columns of `h_true`: `log2(1 + SINR)` with equal power split.
pub fn realized_rate(
    h_true: &ComplexMatrix,
    precoder: &PrecodingMatrix,
    gamma: f64,
    k: usize,
) -> Result<RateSample> {
    if !(gamma > 0.0) {
        return Err(Error::Domain("transmit power gamma must be positive"));
    }
    let users = h_true.cols();
    if precoder.v.cols() != users || precoder.v.rows() != h_true.rows() {
        return Err(Error::DimensionMismatch {
            what: "precoder shape vs channel matrix",
            expected: h_true.rows() * users,
            got: precoder.v.rows() * precoder.v.cols(),
        });
    }
    if k >= users {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: users,
        });
    }
    let h_k = h_true.column(k);
    let per_user_power = gamma / users as f64;
    let mut signal_power = 0.0;
    let mut interference_powers = Vec::with_capacity(users - 1);
    for i in 0..users {
        let p = vec_inner(&h_k, &precoder.v.column(i)).norm_sqr();
        if i == k {
            signal_power = p;
        } else {
            interference_powers.push(p);
        }
    }
    let interference: f64 = interference_powers.iter().sum();
    let sinr = per_user_power * signal_power / (1.0 + per_user_power * interference);
    Ok(RateSample {
        per_user_rate: log2_1p(sinr),
        signal_power,
        interference_powers,
    })
}

/// All users' rates under one precoder.
pub fn realized_rates(
    h_true: &ComplexMatrix,
    precoder: &PrecodingMatrix,
    gamma: f64,
) -> Result<Vec<RateSample>> {
    (0..h_true.cols())
        .map(|k| realized_rate(h_true, precoder, gamma, k))
        .collect()
}

/// Ideal per-user rates: ZF on the true channels, interference
/// analytically zero.
pub fn ideal_rates(h_true: &ComplexMatrix, gamma: f64) -> Result<Vec<RateSample>> {
    if !(gamma > 0.0) {
        return Err(Error::Domain("transmit power gamma must be positive"));
    }
    let precoder = zf_precoder(h_true)?;
    let users = h_true.cols();
    let per_user_power = gamma / users as f64;
    Ok((0..users)
        .map(|k| {
            let signal_power =
                vec_inner(&h_true.column(k), &precoder.v.column(k)).norm_sqr();
            RateSample {
                per_user_rate: log2_1p(per_user_power * signal_power),
                signal_power,
                interference_powers: alloc::vec![0.0; users - 1],
            }
        })
        .collect())
}

/// Ideal rate of a single user.
pub fn ideal_rate(h_true: &ComplexMatrix, gamma: f64, k: usize) -> Result<RateSample> {
    let mut all = ideal_rates(h_true, gamma)?;
    if k >= all.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: all.len(),
        });
    }
    Ok(all.swap_remove(k))
}

/// Analytic rate-gap upper bound:
/// `log2(1 + γ (K-1)/K · E[‖h^e‖²] · 2^{-B/(P-1)})`.
///
/// Degenerates to 0 for K = 1 (no interference) and for P = 1 (a one-path
/// direction is deterministic given the AoD, so quantization is exact).
pub fn rate_gap_bound(gamma: f64, k: usize, e_norm2: f64, bits: u32, p: usize) -> f64 {
    if k <= 1 || p <= 1 {
        return 0.0;
    }
    let err = libm::exp2(-(bits as f64) / (p as f64 - 1.0));
    log2_1p(gamma * (k as f64 - 1.0) / k as f64 * e_norm2 * err)
}

/// Feedback bits required to hold the rate gap at 1 bps/Hz:
/// `(P-1)/3 · SNR_dB + (P-1) log2(K-1)`, returned raw and as a ceiling
/// clamped at 0.
pub fn required_bits(p: usize, k: usize, snr_db: f64) -> Result<(f64, u32)> {
    if p <= 1 {
        return Ok((0.0, 0));
    }
    if k <= 1 {
        return Err(Error::Domain(
            "required_bits needs K >= 2 (log2(K-1) undefined for K=1)",
        ));
    }
    let pm1 = p as f64 - 1.0;
    let raw = pm1 / 3.0 * snr_db + pm1 * libm::log2(k as f64 - 1.0);
    let ceil = libm::ceil(raw).max(0.0) as u32;
    Ok((raw, ceil))
}

/// Transmit power from receiver SNR: inverts
/// `SNR_dB = 10 log10(γ/K · E[‖h^e‖²])`.
pub fn snr_to_power(snr_db: f64, k: usize, e_norm2: f64) -> Result<f64> {
    if !(e_norm2 > 0.0) {
        return Err(Error::Domain("E[||h^e||^2] must be positive"));
    }
    if k == 0 {
        return Err(Error::Domain("K must be >= 1"));
    }
    Ok(k as f64 * libm::pow(10.0, snr_db / 10.0) / e_norm2)
}
