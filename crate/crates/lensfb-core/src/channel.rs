//! Ray-based mmWave spatial channels: AoDs, ULA steering vectors, path
//! gains, and the per-user channel `h = A g`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{sample_complex_gaussian, ComplexMatrix, RngStream, C64};

/// AoD spatial frequencies closer than this (in ψ) are treated as
/// coincident and resampled.
pub const MIN_PSI_SEPARATION: f64 = 1e-6;

/// Which schemes to evaluate in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeSet {
    pub subspace: bool,
    pub rvq: bool,
}

impl SchemeSet {
    pub const BOTH: SchemeSet = SchemeSet {
        subspace: true,
        rvq: true,
    };
}

/// Feedback-bit selection: the SNR-dependent scaling law, or explicit
/// values (one shared, or one per SNR grid point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BitsRule {
    ScalingLaw,
    Explicit(Vec<u32>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AodGridMode {
    OnGrid,
    OffGrid,
}

/// All scenario scalars for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// BS antenna count M.
    pub m: usize,
    /// RF chain count.
    pub n_rf: usize,
    /// User count.
    pub k: usize,
    /// Paths per user (uniform across users).
    pub p: usize,
    /// Antenna spacing in wavelengths, in (0, 0.5].
    pub d_over_lambda: f64,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub root_seed: u64,
    pub schemes: SchemeSet,
    pub bits_rule: BitsRule,
    pub aod_grid_mode: AodGridMode,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            m: 128,
            n_rf: 24,
            k: 8,
            p: 3,
            d_over_lambda: 0.5,
            snr_grid_db: alloc::vec![0.0, 5.0, 10.0, 15.0],
            trials: 500,
            root_seed: 1,
            schemes: SchemeSet::BOTH,
            bits_rule: BitsRule::ScalingLaw,
            aod_grid_mode: AodGridMode::OnGrid,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.k < 1 {
            return err(format!("K must be >= 1, got {}", self.k));
        }
        if self.n_rf < self.k {
            return err(format!(
                "K ({}) must not exceed N_RF ({})",
                self.k, self.n_rf
            ));
        }
        if self.m < self.n_rf {
            return err(format!(
                "N_RF ({}) must not exceed M ({})",
                self.n_rf, self.m
            ));
        }
        if self.p < 1 {
            return err(format!("P must be >= 1, got {}", self.p));
        }
        if self.n_rf < self.p {
            return err(format!(
                "P ({}) must not exceed N_RF ({})",
                self.p, self.n_rf
            ));
        }
        if !(self.d_over_lambda > 0.0 && self.d_over_lambda <= 0.5) {
            return err(format!(
                "d_over_lambda must lie in (0, 0.5], got {}",
                self.d_over_lambda
            ));
        }
        if self.snr_grid_db.is_empty() {
            return err("snr_grid_db must contain at least one point".into());
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return err("snr_grid_db entries must be finite".into());
        }
        if self.trials < 1 {
            return err(format!("trials must be >= 1, got {}", self.trials));
        }
        if !self.schemes.subspace && !self.schemes.rvq {
            return err("schemes must enable at least one of subspace, rvq".into());
        }
        match &self.bits_rule {
            BitsRule::ScalingLaw => {
                if self.k < 2 {
                    return err("bits_rule=auto requires K >= 2 (log2(K-1) undefined)".into());
                }
            }
            BitsRule::Explicit(list) => {
                if list.len() != 1 && list.len() != self.snr_grid_db.len() {
                    return err(format!(
                        "explicit bits list has {} entries; need 1 or one per SNR point ({})",
                        list.len(),
                        self.snr_grid_db.len()
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Per-user AoDs: spatial frequencies ψ and physical angles θ,
/// with ψ = (d/λ) sin θ entrywise, and ψ pairwise distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPathSet {
    pub psis: Vec<f64>,
    pub thetas: Vec<f64>,
}

/// Steering matrix, freshly drawn path gains, and the resulting channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialChannel {
    /// M x P steering matrix; columns are unit-norm steering vectors.
    pub steering: ComplexMatrix,
    /// P complex path gains.
    pub gains: Vec<C64>,
    /// h = steering * gains.
    pub h: Vec<C64>,
}

/// ULA steering vector: entry `m` is `(1/sqrt(M)) exp(-j 2π ψ m)`.
pub fn steering_vector(psi: f64, m: usize) -> Result<Vec<C64>> {
    if m == 0 {
        return Err(Error::InvalidDimension("steering vector length must be >= 1"));
    }
    let scale = 1.0 / libm::sqrt(m as f64);
    Ok((0..m)
        .map(|n| {
            let (s, c) = libm::sincos(-2.0 * PI * psi * n as f64);
            Complex::new(c * scale, s * scale)
        })
        .collect())
}

/// Wrap a grid frequency `m/M` into `[-1/2, 1/2)`.
fn wrap_half(x: f64) -> f64 {
    if x >= 0.5 {
        x - 1.0
    } else {
        x
    }
}

/// Draw AoDs for all K users.
///
/// Off-grid: θ i.i.d. uniform on [-π/2, π/2], resampled against
/// near-coincidence within a user. On-grid: ψ drawn uniformly without
/// replacement from the lens grid {m/M wrapped to [-1/2, 1/2)}, globally
/// distinct across all users.
pub fn sample_aods(rng: &mut RngStream, cfg: &SystemConfig) -> Result<Vec<UserPathSet>> {
    cfg.validate()?;
    match cfg.aod_grid_mode {
        AodGridMode::OffGrid => {
            let mut users = Vec::with_capacity(cfg.k);
            for _ in 0..cfg.k {
                let mut psis: Vec<f64> = Vec::with_capacity(cfg.p);
                let mut thetas: Vec<f64> = Vec::with_capacity(cfg.p);
                while psis.len() < cfg.p {
                    let theta = (rng.uniform() - 0.5) * PI;
                    let psi = cfg.d_over_lambda * libm::sin(theta);
                    if psis.iter().all(|q| (q - psi).abs() >= MIN_PSI_SEPARATION) {
                        psis.push(psi);
                        thetas.push(theta);
                    }
                }
                users.push(UserPathSet { psis, thetas });
            }
            Ok(users)
        }
        AodGridMode::OnGrid => {
            let delta = 1.0 / cfg.m as f64;
            let mut grid: Vec<f64> = (0..cfg.m)
                .map(|i| wrap_half(i as f64 * delta))
                .filter(|psi| psi.abs() <= cfg.d_over_lambda + 1e-15)
                .collect();
            let needed = cfg.k * cfg.p;
            if needed > grid.len() {
                return Err(Error::InfeasibleGrid {
                    needed,
                    available: grid.len(),
                });
            }
            // partial Fisher-Yates: first `needed` slots become the sample
            for i in 0..needed {
                let j = i + rng.index(grid.len() - i);
                grid.swap(i, j);
            }
            Ok((0..cfg.k)
                .map(|u| {
                    let psis: Vec<f64> = grid[u * cfg.p..(u + 1) * cfg.p].to_vec();
                    let thetas = psis
                        .iter()
                        .map(|psi| libm::asin(psi / cfg.d_over_lambda))
                        .collect();
                    UserPathSet { psis, thetas }
                })
                .collect())
        }
    }
}

/// Build the channel for one user from given gains (test hook / recompute).
pub fn channel_from_gains(paths: &UserPathSet, gains: &[C64], m: usize) -> Result<SpatialChannel> {
    if paths.psis.is_empty() {
        return Err(Error::InvalidDimension("user path set is empty"));
    }
    if gains.len() != paths.psis.len() {
        return Err(Error::DimensionMismatch {
            what: "gain count vs path count",
            expected: paths.psis.len(),
            got: gains.len(),
        });
    }
    let columns: Vec<Vec<C64>> = paths
        .psis
        .iter()
        .map(|&psi| steering_vector(psi, m))
        .collect::<Result<_>>()?;
    let steering = ComplexMatrix::from_columns(&columns)?;
    let h = steering.mul_vec(gains)?;
    Ok(SpatialChannel {
        steering,
        gains: gains.to_vec(),
        h,
    })
}

/// Draw fresh unit-variance complex Gaussian gains and form `h = A g`.
pub fn generate_channel(rng: &mut RngStream, paths: &UserPathSet, m: usize) -> Result<SpatialChannel> {
    let gains = sample_complex_gaussian(rng, paths.psis.len())?;
    channel_from_gains(paths, &gains, m)
}
