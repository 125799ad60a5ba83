//! The lens (spatial DFT matrix), beam selection, equivalent channels, and
//! the effective steering matrix `T = S^H U A`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};

/// The lens front-end: a unitary M x M spatial DFT. Row `r` is the
/// conjugate transpose of the steering vector at grid frequency `r / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LensMatrix {
    m: usize,
    pub u: ComplexMatrix,
}

impl LensMatrix {
    pub fn m(&self) -> usize {
        self.m
    }
}

/// Beam selector: the dense representation of the 0/1 selection matrix S,
/// as a strictly increasing list of `N_RF` beam indices in `[0, M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeamSelector {
    pub indices: Vec<usize>,
}

/// `T = S^H U A`, N_RF x P. On-grid with every active beam selected, T has
/// orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveSteering {
    pub t: ComplexMatrix,
}

impl EffectiveSteering {
    /// Frobenius distance of `T^H T` from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let p = self.t.cols();
        let gram = self.t.conj_transpose().mul(&self.t).expect("square product");
        let eye = ComplexMatrix::identity(p).expect("p >= 1");
        gram.sub(&eye).expect("same shape").frobenius_norm()
    }
}

/// Build the lens DFT matrix for `M` antennas.
pub fn build_lens(m: usize) -> Result<LensMatrix> {
    if m == 0 {
        return Err(Error::InvalidDimension("lens size must be >= 1"));
    }
    let delta = 1.0 / m as f64;
    let u = ComplexMatrix::from_fn(m, m, |r, n| {
        // conj of steering entry: (1/sqrt(M)) exp(+j 2π δ r n)
        let (s, c) = libm::sincos(2.0 * PI * delta * r as f64 * n as f64);
        C64::new(c, s) / libm::sqrt(m as f64)
    })?;
    Ok(LensMatrix { m, u })
}

/// Beamspace channel `h^b = U h`.
pub fn beamspace_transform(lens: &LensMatrix, h: &[C64]) -> Result<Vec<C64>> {
    if h.len() != lens.m {
        return Err(Error::DimensionMismatch {
            what: "channel length vs lens size",
            expected: lens.m,
            got: h.len(),
        });
    }
    lens.u.mul_vec(h)
}

/// Entry of `U a(ψ)` at beam `r`, evaluated in closed form: the normalized
/// Dirichlet kernel at `x = r/M - ψ`, with the argument reduced mod 1
/// before the sine ratio to keep full precision near grid points.
fn lens_kernel(x: f64, m: usize) -> C64 {
    let mf = m as f64;
    let q = libm::round(x);
    let x0 = x - q;
    let sign = if ((m as i64 - 1) * q as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let ratio = if x0 == 0.0 {
        sign * mf
    } else {
        sign * libm::sin(PI * mf * x0) / libm::sin(PI * x0)
    };
    let (s, c) = libm::sincos(PI * x * (mf - 1.0));
    C64::new(c, s) * (ratio / mf)
}

/// Closed-form `U a(ψ)` (one column of `U A`), without materializing `U`.
pub fn lens_response(psi: f64, m: usize) -> Result<Vec<C64>> {
    if m == 0 {
        return Err(Error::InvalidDimension("lens size must be >= 1"));
    }
    let delta = 1.0 / m as f64;
    Ok((0..m)
        .map(|r| lens_kernel(r as f64 * delta - psi, m))
        .collect())
}

/// Closed-form beamspace channel `U A g = Σ_i g_i U a(ψ_i)`.
pub fn beamspace_channel(psis: &[f64], gains: &[C64], m: usize) -> Result<Vec<C64>> {
    if psis.len() != gains.len() {
        return Err(Error::DimensionMismatch {
            what: "gain count vs path count",
            expected: psis.len(),
            got: gains.len(),
        });
    }
    if psis.is_empty() {
        return Err(Error::InvalidDimension("at least one path required"));
    }
    let mut hb = alloc::vec![C64::new(0.0, 0.0); m];
    for (&psi, &g) in psis.iter().zip(gains) {
        for (acc, v) in hb.iter_mut().zip(lens_response(psi, m)?) {
            *acc += g * v;
        }
    }
    Ok(hb)
}

/// Magnitude-based beam selection: per-beam aggregate power over all users,
/// keep the `N_RF` strongest, ties broken by ascending beam index.
pub fn select_beams(beamspace_channels: &[Vec<C64>], n_rf: usize) -> Result<BeamSelector> {
    let Some(first) = beamspace_channels.first() else {
        return Err(Error::InvalidDimension("at least one beamspace channel required"));
    };
    let m = first.len();
    for hb in beamspace_channels {
        if hb.len() != m {
            return Err(Error::DimensionMismatch {
                what: "beamspace channel length",
                expected: m,
                got: hb.len(),
            });
        }
    }
    if n_rf == 0 || n_rf > m {
        return Err(Error::InvalidConfig(alloc::format!(
            "N_RF ({n_rf}) must lie in [1, M={m}]"
        )));
    }
    let mut power = alloc::vec![0.0f64; m];
    for hb in beamspace_channels {
        for (p, x) in power.iter_mut().zip(hb) {
            *p += x.norm_sqr();
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        power[b]
            .partial_cmp(&power[a])
            .expect("finite powers")
            .then(a.cmp(&b))
    });
    let mut indices: Vec<usize> = order[..n_rf].to_vec();
    indices.sort_unstable();
    Ok(BeamSelector { indices })
}

/// Equivalent channel `h^e = S^H h^b`: the selected entries, in selector order.
pub fn equivalent_channel(sel: &BeamSelector, hb: &[C64]) -> Result<Vec<C64>> {
    sel.indices
        .iter()
        .map(|&i| {
            hb.get(i).copied().ok_or(Error::DimensionMismatch {
                what: "beam index vs beamspace length",
                expected: i + 1,
                got: hb.len(),
            })
        })
        .collect()
}

/// `T = S^H U A`: the selected rows of `U A`, via the explicit lens matrix.
pub fn effective_steering(
    sel: &BeamSelector,
    lens: &LensMatrix,
    a: &ComplexMatrix,
) -> Result<EffectiveSteering> {
    if a.rows() != lens.m {
        return Err(Error::DimensionMismatch {
            what: "steering matrix rows vs lens size",
            expected: lens.m,
            got: a.rows(),
        });
    }
    let ua = lens.u.mul(a)?;
    let t = ComplexMatrix::from_fn(sel.indices.len(), a.cols(), |r, c| ua.get(sel.indices[r], c))?;
    Ok(EffectiveSteering { t })
}

/// `T = S^H U A` in closed form from the path frequencies, without
/// materializing `U` or `A`.
pub fn effective_steering_fast(
    sel: &BeamSelector,
    psis: &[f64],
    m: usize,
) -> Result<EffectiveSteering> {
    if psis.is_empty() {
        return Err(Error::InvalidDimension("at least one path required"));
    }
    if let Some(&bad) = sel.indices.iter().find(|&&i| i >= m) {
        return Err(Error::IndexOutOfRange { index: bad, len: m });
    }
    let delta = 1.0 / m as f64;
    let t = ComplexMatrix::from_fn(sel.indices.len(), psis.len(), |r, c| {
        lens_kernel(sel.indices[r] as f64 * delta - psis[c], m)
    })?;
    Ok(EffectiveSteering { t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, sample_aods, steering_vector, SystemConfig};
    use crate::numerics::{sample_complex_gaussian, vec_norm, RngStream};

    fn unitarity_residual(lens: &LensMatrix) -> f64 {
        let prod = lens.u.mul(&lens.u.conj_transpose()).unwrap();
        prod.sub(&ComplexMatrix::identity(lens.m).unwrap())
            .unwrap()
            .frobenius_norm()
    }

    #[test]
    fn lens_two_point_dft() {
        let lens = build_lens(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expect = [[s, s], [s, -s]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((lens.u.get(r, c) - C64::new(expect[r][c], 0.0)).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn lens_unitarity() {
        assert!(unitarity_residual(&build_lens(4).unwrap()) <= 1e-12);
        assert!(unitarity_residual(&build_lens(128).unwrap()) <= 1e-9);
    }

    #[test]
    fn lens_row_is_conjugate_steering() {
        let lens = build_lens(128).unwrap();
        let a = steering_vector(1.0 / 128.0, 128).unwrap();
        for n in 0..128 {
            assert!((lens.u.get(1, n) - a[n].conj()).norm() <= 1e-15);
        }
    }

    #[test]
    fn beamspace_one_hot_for_grid_path() {
        let m = 16;
        let lens = build_lens(m).unwrap();
        let g = C64::new(0.3, -1.2);
        let h: Vec<C64> = steering_vector(5.0 / m as f64, m)
            .unwrap()
            .iter()
            .map(|x| g * x)
            .collect();
        let hb = beamspace_transform(&lens, &h).unwrap();
        for (i, x) in hb.iter().enumerate() {
            if i == 5 {
                assert!((x - g).norm() <= 1e-12);
            } else {
                assert!(x.norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn beamspace_preserves_norm() {
        let m = 128;
        let lens = build_lens(m).unwrap();
        let mut rng = RngStream::new(17, 0);
        let h = sample_complex_gaussian(&mut rng, m).unwrap();
        let hb = beamspace_transform(&lens, &h).unwrap();
        assert!((vec_norm(&hb) - vec_norm(&h)).abs() <= 1e-12);
        let zero = alloc::vec![C64::new(0.0, 0.0); m];
        assert!(vec_norm(&beamspace_transform(&lens, &zero).unwrap()) == 0.0);
    }

    #[test]
    fn lens_response_matches_matrix_route() {
        let m = 128;
        let lens = build_lens(m).unwrap();
        for &psi in &[0.0, 0.123456, -0.4999, 5.0 / 128.0, 5.0 / 128.0 + 1e-9] {
            let a = steering_vector(psi, m).unwrap();
            let via_matrix = beamspace_transform(&lens, &a).unwrap();
            let closed = lens_response(psi, m).unwrap();
            for (x, y) in via_matrix.iter().zip(&closed) {
                assert!((x - y).norm() <= 1e-10, "psi={psi}");
            }
        }
    }

    #[test]
    fn beamspace_channel_matches_matrix_route() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(23, 0);
        let users = sample_aods(&mut rng, &cfg).unwrap();
        let ch = generate_channel(&mut rng, &users[0], cfg.m).unwrap();
        let lens = build_lens(cfg.m).unwrap();
        let slow = beamspace_transform(&lens, &ch.h).unwrap();
        let fast = beamspace_channel(&users[0].psis, &ch.gains, cfg.m).unwrap();
        for (x, y) in slow.iter().zip(&fast) {
            assert!((x - y).norm() <= 1e-10);
        }
    }

    #[test]
    fn select_beams_examples() {
        // the only nonzero beams
        let hb = alloc::vec![
            C64::new(0.0, 0.0),
            C64::new(3.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 1.0),
        ];
        let sel = select_beams(&[hb], 2).unwrap();
        assert_eq!(sel.indices, alloc::vec![1, 3]);

        // union of supports across users
        let mut h1 = alloc::vec![C64::new(0.0, 0.0); 16];
        let mut h2 = h1.clone();
        h1[5] = C64::new(1.0, 0.0);
        h2[9] = C64::new(1.0, 0.0);
        let sel = select_beams(&[h1, h2], 4).unwrap();
        assert!(sel.indices.contains(&5) && sel.indices.contains(&9));

        // all-zero: deterministic ascending tie-break
        let zero = alloc::vec![C64::new(0.0, 0.0); 8];
        let sel = select_beams(&[zero], 3).unwrap();
        assert_eq!(sel.indices, alloc::vec![0, 1, 2]);
    }

    #[test]
    fn select_beams_rejects_bad_nrf() {
        let zero = alloc::vec![C64::new(0.0, 0.0); 4];
        assert!(matches!(
            select_beams(&[zero], 5),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn equivalent_channel_examples() {
        let g = C64::new(0.7, -0.2);
        let hb = alloc::vec![C64::new(0.0, 0.0), g, C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let sel = BeamSelector {
            indices: alloc::vec![1, 3],
        };
        let he = equivalent_channel(&sel, &hb).unwrap();
        assert_eq!(he, alloc::vec![g, C64::new(0.0, 0.0)]);

        // identity selector copies the vector
        let all = BeamSelector {
            indices: (0..4).collect(),
        };
        assert_eq!(equivalent_channel(&all, &hb).unwrap(), hb);
    }

    #[test]
    fn selector_idempotence() {
        let mut rng = RngStream::new(31, 0);
        let hb = sample_complex_gaussian(&mut rng, 16).unwrap();
        let sel = select_beams(&[hb.clone()], 6).unwrap();
        let he = equivalent_channel(&sel, &hb).unwrap();
        // scatter back to M dimensions, re-select
        let mut scattered = alloc::vec![C64::new(0.0, 0.0); 16];
        for (slot, &i) in sel.indices.iter().enumerate() {
            scattered[i] = he[slot];
        }
        let again = equivalent_channel(&sel, &scattered).unwrap();
        assert_eq!(again, he);
    }

    fn on_grid_scenario(
        seed: u64,
    ) -> (SystemConfig, Vec<crate::channel::UserPathSet>, Vec<crate::channel::SpatialChannel>, BeamSelector)
    {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(seed, 0);
        let users = sample_aods(&mut rng, &cfg).unwrap();
        let chans: Vec<_> = users
            .iter()
            .map(|u| generate_channel(&mut rng, u, cfg.m).unwrap())
            .collect();
        let hbs: Vec<_> = users
            .iter()
            .zip(&chans)
            .map(|(u, c)| beamspace_channel(&u.psis, &c.gains, cfg.m).unwrap())
            .collect();
        let sel = select_beams(&hbs, cfg.n_rf).unwrap();
        (cfg, users, chans, sel)
    }

    #[test]
    fn on_grid_effective_steering_is_orthonormal() {
        let (cfg, users, chans, sel) = on_grid_scenario(77);
        let lens = build_lens(cfg.m).unwrap();
        for (u, c) in users.iter().zip(&chans) {
            let t = effective_steering(&sel, &lens, &c.steering).unwrap();
            assert!(t.orthonormality_residual() <= 1e-9);
            let t_fast = effective_steering_fast(&sel, &u.psis, cfg.m).unwrap();
            assert!(t.t.sub(&t_fast.t).unwrap().frobenius_norm() <= 1e-9);
        }
    }

    #[test]
    fn on_grid_equivalent_norm_matches_gains() {
        for seed in 0..20u64 {
            let (cfg, users, chans, sel) = on_grid_scenario(1000 + seed);
            for (u, c) in users.iter().zip(&chans) {
                let hb = beamspace_channel(&u.psis, &c.gains, cfg.m).unwrap();
                let he = equivalent_channel(&sel, &hb).unwrap();
                assert!((vec_norm(&he) - vec_norm(&c.gains)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn on_grid_beamspace_sparsity() {
        let (cfg, users, chans, _sel) = on_grid_scenario(5);
        let mut nonzero = 0usize;
        for (u, c) in users.iter().zip(&chans) {
            let hb = beamspace_channel(&u.psis, &c.gains, cfg.m).unwrap();
            nonzero += hb.iter().filter(|x| x.norm() > 1e-12).count();
        }
        assert_eq!(nonzero, cfg.k * cfg.p);
    }

    #[test]
    fn single_on_grid_path_one_hot_t() {
        let m = 16;
        let psi = 3.0 / m as f64;
        let sel = BeamSelector {
            indices: alloc::vec![1, 3, 8],
        };
        let t = effective_steering_fast(&sel, &[psi], m).unwrap();
        assert!((t.t.get(1, 0) - C64::new(1.0, 0.0)).norm() <= 1e-12);
        assert!(t.t.get(0, 0).norm() <= 1e-12);
        assert!(t.t.get(2, 0).norm() <= 1e-12);
    }

    #[test]
    fn off_grid_leakage_diagonal() {
        let m = 128;
        let psis = [0.1234, -0.3219, 0.0071];
        let sel = BeamSelector {
            indices: (0..24).collect(),
        };
        let t = effective_steering_fast(&sel, &psis, m).unwrap();
        let gram = t.t.conj_transpose().mul(&t.t).unwrap();
        for i in 0..3 {
            let d = gram.get(i, i).re;
            assert!(d > 0.0 && d <= 1.0 + 1e-12, "diag {d}");
        }
    }
}
