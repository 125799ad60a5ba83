//! RVQ and dimension-reduced subspace codebooks, angle-based quantization,
//! and feedback reconstruction.
//!
//! Both codebooks are regenerated per Monte Carlo trial from a shared
//! `RngStream`, so user and BS agree on the codewords. The streaming
//! quantizers consume the stream in exactly the same order as the
//! generate-then-search path and therefore select identical indices.

use alloc::vec::Vec;

use crate::beamspace::EffectiveSteering;
use crate::error::{Error, Result};
use crate::numerics::{
    sample_unit_sphere, vec_inner, vec_norm, vec_normalize, RngStream, C64,
};

/// Hard cap on feedback bits (2^20 codewords).
pub const MAX_BITS: u32 = 20;

/// Tolerance on `T^H T = I` for the fast subspace search.
pub const ORTHONORMALITY_TOL: f64 = 1e-9;

/// A quantization codebook of `2^bits` unit-norm vectors. Subspace
/// codebooks also keep the generating P-dimensional weights for the fast
/// search path.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub entries: Vec<Vec<C64>>,
    pub weights: Option<Vec<Vec<C64>>>,
    pub bits: u32,
}

/// What a user feeds back: the codeword index and the (perfectly known)
/// channel magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackReport {
    pub index: usize,
    pub magnitude: f64,
}

fn check_bits(bits: u32) -> Result<usize> {
    if bits > MAX_BITS {
        return Err(Error::ResourceLimit {
            bits,
            cap: MAX_BITS,
        });
    }
    Ok(1usize << bits)
}

/// Classical RVQ codebook: isotropic unit vectors in dimension `n_rf`.
pub fn gen_rvq_codebook(rng: &mut RngStream, n_rf: usize, bits: u32) -> Result<Codebook> {
    let count = check_bits(bits)?;
    let entries = (0..count)
        .map(|_| sample_unit_sphere(rng, n_rf))
        .collect::<Result<_>>()?;
    Ok(Codebook {
        entries,
        weights: None,
        bits,
    })
}

fn subspace_codeword(t: &EffectiveSteering, w: &[C64]) -> Result<Vec<C64>> {
    let d = t.t.mul_vec(w)?;
    let nrm = vec_norm(&d);
    if nrm < 1e-12 {
        return Err(Error::DegenerateCodeword { norm: nrm });
    }
    Ok(d.iter().map(|x| x / nrm).collect())
}

/// Dimension-reduced subspace codebook: isotropic P-dimensional weights
/// pushed through `T` and normalized; both entries and weights are kept.
pub fn gen_subspace_codebook(
    rng: &mut RngStream,
    t: &EffectiveSteering,
    bits: u32,
) -> Result<Codebook> {
    let count = check_bits(bits)?;
    let p = t.t.cols();
    let mut entries = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for _ in 0..count {
        let w = sample_unit_sphere(rng, p)?;
        entries.push(subspace_codeword(t, &w)?);
        weights.push(w);
    }
    Ok(Codebook {
        entries,
        weights: Some(weights),
        bits,
    })
}

/// Best codeword index by chordal closeness: argmax |d_i^H h̃|² with the
/// lowest index winning ties, plus the achieved sin² of the angle.
fn best_match(candidates: &[Vec<C64>], target: &[C64]) -> (usize, f64) {
    let mut best_idx = 0usize;
    let mut best_cos2 = f64::NEG_INFINITY;
    for (i, d) in candidates.iter().enumerate() {
        let cos2 = vec_inner(d, target).norm_sqr();
        if cos2 > best_cos2 {
            best_cos2 = cos2;
            best_idx = i;
        }
    }
    (best_idx, (1.0 - best_cos2).max(0.0))
}

/// Exhaustive angle-based quantization of an equivalent channel vector.
pub fn quantize(h_e: &[C64], cb: &Codebook) -> Result<(FeedbackReport, f64)> {
    let magnitude = vec_norm(h_e);
    if !(magnitude > 0.0) {
        return Err(Error::ZeroChannel);
    }
    if let Some(first) = cb.entries.first() {
        if first.len() != h_e.len() {
            return Err(Error::DimensionMismatch {
                what: "codeword dimension vs channel dimension",
                expected: first.len(),
                got: h_e.len(),
            });
        }
    }
    let direction = vec_normalize(h_e)?;
    let (index, sin2) = best_match(&cb.entries, &direction);
    Ok((FeedbackReport { index, magnitude }, sin2))
}

fn check_fast_preconditions(cb: &Codebook, t: &EffectiveSteering) -> Result<()> {
    if cb.weights.is_none() {
        return Err(Error::MissingWeights);
    }
    let residual = t.orthonormality_residual();
    if residual > ORTHONORMALITY_TOL {
        return Err(Error::NotOrthonormal { residual });
    }
    Ok(())
}

/// Fast subspace quantization: with `T^H T = I_P`, the codeword angles to
/// `h̃^e = T g̃` equal the weight angles to `g̃`, so the search runs in the
/// P-dimensional weight space. `magnitude` is the fed-back channel norm.
pub fn quantize_fast_subspace(
    g_tilde: &[C64],
    magnitude: f64,
    cb: &Codebook,
    t: &EffectiveSteering,
) -> Result<(FeedbackReport, f64)> {
    check_fast_preconditions(cb, t)?;
    if !(magnitude > 0.0) {
        return Err(Error::ZeroChannel);
    }
    let weights = cb.weights.as_ref().expect("checked above");
    let (index, sin2) = best_match(weights, g_tilde);
    Ok((FeedbackReport { index, magnitude }, sin2))
}

/// BS-side reconstruction `ĥ^e = ‖h^e‖ d_F`.
pub fn reconstruct(report: &FeedbackReport, cb: &Codebook) -> Result<Vec<C64>> {
    let d = cb
        .entries
        .get(report.index)
        .ok_or(Error::IndexOutOfRange {
            index: report.index,
            len: cb.entries.len(),
        })?;
    Ok(d.iter().map(|x| x * report.magnitude).collect())
}

/// Streaming RVQ feedback: generate, score, and discard codewords one at a
/// time, keeping only the winner. Consumes the stream exactly like
/// [`gen_rvq_codebook`] followed by [`quantize`], and returns the winning
/// codeword so nothing needs to be stored.
pub fn quantize_rvq_streaming(
    rng: &mut RngStream,
    n_rf: usize,
    bits: u32,
    h_e: &[C64],
) -> Result<(FeedbackReport, f64, Vec<C64>)> {
    let count = check_bits(bits)?;
    let magnitude = vec_norm(h_e);
    if !(magnitude > 0.0) {
        return Err(Error::ZeroChannel);
    }
    let direction = vec_normalize(h_e)?;
    let mut best_idx = 0usize;
    let mut best_cos2 = f64::NEG_INFINITY;
    let mut best = Vec::new();
    for i in 0..count {
        let d = sample_unit_sphere(rng, n_rf)?;
        let cos2 = vec_inner(&d, &direction).norm_sqr();
        if cos2 > best_cos2 {
            best_cos2 = cos2;
            best_idx = i;
            best = d;
        }
    }
    Ok((
        FeedbackReport {
            index: best_idx,
            magnitude,
        },
        (1.0 - best_cos2).max(0.0),
        best,
    ))
}

/// Streaming subspace feedback, slow route: scores materialized codewords
/// `normalize(T w)` against the channel direction. Valid for any `T`.
pub fn quantize_subspace_streaming(
    rng: &mut RngStream,
    t: &EffectiveSteering,
    bits: u32,
    h_e: &[C64],
) -> Result<(FeedbackReport, f64, Vec<C64>)> {
    let count = check_bits(bits)?;
    let magnitude = vec_norm(h_e);
    if !(magnitude > 0.0) {
        return Err(Error::ZeroChannel);
    }
    let direction = vec_normalize(h_e)?;
    let p = t.t.cols();
    let mut best_idx = 0usize;
    let mut best_cos2 = f64::NEG_INFINITY;
    let mut best = Vec::new();
    for i in 0..count {
        let w = sample_unit_sphere(rng, p)?;
        let d = subspace_codeword(t, &w)?;
        let cos2 = vec_inner(&d, &direction).norm_sqr();
        if cos2 > best_cos2 {
            best_cos2 = cos2;
            best_idx = i;
            best = d;
        }
    }
    Ok((
        FeedbackReport {
            index: best_idx,
            magnitude,
        },
        (1.0 - best_cos2).max(0.0),
        best,
    ))
}

/// Streaming subspace feedback, fast route: scores the weights against the
/// normalized gain vector (valid when `T^H T = I_P`), materializing only
/// the winning codeword.
pub fn quantize_subspace_streaming_fast(
    rng: &mut RngStream,
    t: &EffectiveSteering,
    bits: u32,
    g_tilde: &[C64],
    magnitude: f64,
) -> Result<(FeedbackReport, f64, Vec<C64>)> {
    let count = check_bits(bits)?;
    if !(magnitude > 0.0) {
        return Err(Error::ZeroChannel);
    }
    let residual = t.orthonormality_residual();
    if residual > ORTHONORMALITY_TOL {
        return Err(Error::NotOrthonormal { residual });
    }
    let p = t.t.cols();
    let mut best_idx = 0usize;
    let mut best_cos2 = f64::NEG_INFINITY;
    let mut best_w = Vec::new();
    for i in 0..count {
        let w = sample_unit_sphere(rng, p)?;
        let cos2 = vec_inner(&w, g_tilde).norm_sqr();
        if cos2 > best_cos2 {
            best_cos2 = cos2;
            best_idx = i;
            best_w = w;
        }
    }
    let d = subspace_codeword(t, &best_w)?;
    Ok((
        FeedbackReport {
            index: best_idx,
            magnitude,
        },
        (1.0 - best_cos2).max(0.0),
        d,
    ))
}
