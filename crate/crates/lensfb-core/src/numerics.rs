//! Deterministic random sampling and small dense complex linear algebra.
//!
//! Everything downstream (channels, codebooks, precoders) is built on the
//! two primitives here: reproducible per-trial RNG streams and a row-major
//! complex matrix with a Cholesky-based right pseudo-inverse.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Default reciprocal-condition floor for the Gram solve. ZF on channels
/// this close to collinear is meaningless, so we fail instead.
pub const RCOND_MIN: f64 = 1e-12;

/// A reproducible, splittable random stream.
///
/// Stream derivation (stable across versions): the generator is ChaCha12
/// keyed by `SeedableRng::seed_from_u64(root_seed)` with the 64-bit ChaCha
/// stream counter set to `stream_id`. Equal `(root_seed, stream_id)` pairs
/// produce identical sequences; distinct `stream_id`s index independent
/// keystreams of the same cipher and never overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    root_seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(root_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(root_seed);
        rng.set_stream(stream_id);
        Self {
            root_seed,
            stream_id,
            rng,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }

    /// Uniform integer in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// One standard-normal pair via Box-Muller.
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        let u1: f64 = 1.0 - self.uniform(); // (0, 1]
        let u2: f64 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let (s, c) = libm::sincos(2.0 * PI * u2);
        (r * c, r * s)
    }
}

/// I.i.d. circularly-symmetric complex Gaussian entries with unit variance
/// per entry (real and imaginary parts each of variance 1/2).
pub fn sample_complex_gaussian(rng: &mut RngStream, n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::InvalidDimension("gaussian sample length must be >= 1"));
    }
    let scale = libm::sqrt(0.5);
    Ok((0..n)
        .map(|_| {
            let (re, im) = rng.standard_normal_pair();
            C64::new(re * scale, im * scale)
        })
        .collect())
}

/// Isotropic unit vector on the complex `n`-sphere (normalized Gaussian).
pub fn sample_unit_sphere(rng: &mut RngStream, n: usize) -> Result<Vec<C64>> {
    if n == 0 {
        return Err(Error::InvalidDimension("unit sphere dimension must be >= 1"));
    }
    loop {
        let mut v = sample_complex_gaussian(rng, n)?;
        let nrm = vec_norm(&v);
        if nrm > 1e-150 {
            for x in v.iter_mut() {
                *x /= nrm;
            }
            return Ok(v);
        }
        // astronomically unlikely; redraw
    }
}

/// `x^H y`.
pub fn vec_inner(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Euclidean norm.
pub fn vec_norm(x: &[C64]) -> f64 {
    libm::sqrt(x.iter().map(|a| a.norm_sqr()).sum())
}

/// Unit-norm copy; errors on (numerically) zero input.
pub fn vec_normalize(x: &[C64]) -> Result<Vec<C64>> {
    let nrm = vec_norm(x);
    if nrm <= 0.0 {
        return Err(Error::ZeroChannel);
    }
    Ok(x.iter().map(|a| a / nrm).collect())
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDimension("matrix dimensions must be >= 1"));
        }
        Ok(Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        Ok(m)
    }

    /// Build from column vectors of equal length.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err(Error::InvalidDimension("from_columns needs nonempty columns"));
        }
        let rows = cols[0].len();
        for c in cols {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    what: "column length",
                    expected: rows,
                    got: c.len(),
                });
            }
        }
        Self::from_fn(rows, cols.len(), |r, c| cols[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
            .expect("dimensions already valid")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                what: "matrix product inner dimension",
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                what: "matrix-vector inner dimension",
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c) * x[c]).sum())
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                what: "matrix difference shape",
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - other.get(r, c))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Maximum column sum of entry magnitudes.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
fn cholesky_lower(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            what: "Cholesky operand must be square",
            expected: n,
            got: a.cols(),
        });
    }
    let mut l = ComplexMatrix::zeros(n, n)?;
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::SingularMatrix { rcond: 0.0 });
        }
        let djj = libm::sqrt(d);
        l.set(j, j, C64::new(djj, 0.0));
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / djj);
        }
    }
    Ok(l)
}

/// Solve `L L^H x = b` in place.
fn cholesky_solve(l: &ComplexMatrix, b: &mut [C64]) {
    let n = l.rows();
    // forward: L y = b
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * b[k];
        }
        b[i] = s / l.get(i, i);
    }
    // back: L^H x = y
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l.get(k, i).conj() * b[k];
        }
        b[i] = s / l.get(i, i);
    }
}

/// Inverse of a Hermitian positive-definite matrix via its Cholesky factor.
fn hpd_inverse(l: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = l.rows();
    let mut inv = ComplexMatrix::zeros(n, n)?;
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        col.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
        col[j] = C64::new(1.0, 0.0);
        cholesky_solve(l, &mut col);
        for (i, v) in col.iter().enumerate() {
            inv.set(i, j, *v);
        }
    }
    Ok(inv)
}

/// Moore-Penrose right pseudo-inverse `F (F^H F)^{-1}` of a tall full
/// column-rank matrix, with the default conditioning floor.
pub fn right_pseudo_inverse(f: &ComplexMatrix) -> Result<ComplexMatrix> {
    right_pseudo_inverse_with_rcond(f, RCOND_MIN)
}

/// As [`right_pseudo_inverse`] with an explicit reciprocal-condition floor.
///
/// The Gram system is solved by Cholesky (dimensions here are at most a few
/// dozen). The reciprocal condition estimate is `1 / (‖G‖₁ ‖G⁻¹‖₁)`; inputs
/// below `rcond_min` are rejected with the estimate attached.
pub fn right_pseudo_inverse_with_rcond(f: &ComplexMatrix, rcond_min: f64) -> Result<ComplexMatrix> {
    if f.rows() < f.cols() {
        return Err(Error::InvalidDimension(
            "right pseudo-inverse requires rows >= cols",
        ));
    }
    let gram = f.conj_transpose().mul(f)?;
    let l = cholesky_lower(&gram)?;
    let gram_inv = hpd_inverse(&l)?;
    let rcond = 1.0 / (gram.one_norm() * gram_inv.one_norm());
    if !rcond.is_finite() || rcond < rcond_min {
        return Err(Error::SingularMatrix { rcond });
    }
    let out = f.mul(&gram_inv)?;
    if !out.all_finite() {
        return Err(Error::SingularMatrix { rcond });
    }
    Ok(out)
}
