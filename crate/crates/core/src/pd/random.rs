//! Seeded generators for the random inputs behind every randomized check.
//!
//! All samplers take an explicit RNG; [`random_spd`] wraps one in a ChaCha stream
//! seeded from a 64-bit integer so that `(n, seed, cond)` fixes the output bit for bit.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{symmetrize, SpdMatrix};
use crate::error::{Error, Result};

pub type SpdRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SpdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random SPD matrix `QΛQᵀ` with Haar-distributed `Q` and a spectrum on
/// `[1/√cond, √cond]`.
///
/// For `n ≥ 2` the two extreme eigenvalues sit at the interval ends, so the condition
/// number equals `cond_target`; the remaining eigenvalues are log-uniform.
pub fn random_spd(n: usize, seed: u64, cond_target: f64) -> Result<SpdMatrix> {
    sample_spd(&mut seeded_rng(seed), n, cond_target)
}

pub fn sample_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, cond_target: f64) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(cond_target >= 1.0) || !cond_target.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "condition target {cond_target} must be finite and >= 1"
        )));
    }
    let q = sample_orthogonal(rng, n);
    let half = 0.5 * cond_target.ln();
    let spectrum: Vec<f64> = (0..n)
        .map(|i| match i {
            0 if n > 1 => (-half).exp(),
            1 if n > 1 => half.exp(),
            _ => (-half + 2.0 * half * rng.random::<f64>()).exp(),
        })
        .collect();
    from_spectrum(&q, &spectrum)
}

/// `Q diag(spectrum) Qᵀ`.
pub fn from_spectrum(q: &DMatrix<f64>, spectrum: &[f64]) -> Result<SpdMatrix> {
    let mut scaled = q.clone();
    for (j, &s) in spectrum.iter().enumerate() {
        scaled.column_mut(j).scale_mut(s);
    }
    SpdMatrix::from_symmetric(scaled * q.transpose())
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs of `R`'s
/// diagonal folded into `Q`.
pub fn sample_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Invertible matrix `Q₁ Σ Q₂` with singular values log-uniform on `[1/√cond, √cond]`.
pub fn sample_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, cond: f64) -> DMatrix<f64> {
    let q1 = sample_orthogonal(rng, n);
    let q2 = sample_orthogonal(rng, n);
    let half = 0.5 * cond.max(1.0).ln();
    let mut m = q1;
    for j in 0..n {
        let s = (-half + 2.0 * half * rng.random::<f64>()).exp();
        m.column_mut(j).scale_mut(s);
    }
    m * q2
}

/// Symmetric Gaussian direction with unit Frobenius norm.
pub fn sample_symmetric_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, n, n);
    let s = symmetrize(&g + g.transpose());
    let norm = s.norm();
    if norm > 0.0 {
        s / norm
    } else {
        DMatrix::identity(n, n) / (n as f64).sqrt()
    }
}

/// Positive semidefinite `c·RRᵀ / rank` with `R` an `n × rank` Gaussian matrix.
pub fn sample_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize, scale: f64) -> DMatrix<f64> {
    if rank == 0 {
        return DMatrix::zeros(n, n);
    }
    let r = gaussian_matrix(rng, n, rank);
    symmetrize(&r * r.transpose() * (scale / rank as f64))
}

/// `exp(U(ln lo, ln hi))`.
pub fn sample_log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.random::<f64>()).exp()
}
