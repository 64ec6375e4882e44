//! Determinant-based Gram matrices `h_ij = det(X_i + X_j)^{-β}` and their
//! positive-semidefiniteness.
//!
//! For real `n × n` SPD matrices the kernel is positive definite exactly when `β` lies in
//! `{1/2, 1, …, (n−1)/2} ∪ ((n−1)/2, ∞)`. [`counterexample_bundle`] holds five `2 × 2`
//! matrices whose Gram matrix at `β = 0.1` has a negative eigenvalue near `−0.0017`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::MatrixBundle;
use crate::error::{Error, Result};
use crate::pd::{cholesky, random, seeded_rng, symmetric_eigen, try_cholesky, SpdMatrix};

/// Tolerance of the half-integer membership test.
pub const HALF_INTEGER_TOL: f64 = 1e-12;

/// A Gram matrix is reported PSD when `λ_min ≥ −PSD_TOL·λ_max`.
pub const PSD_TOL: f64 = 1e-10;

/// A search trial counts as indefinite when `λ_min < −INDEFINITE_TOL·λ_max`.
pub const INDEFINITE_TOL: f64 = 1e-8;

/// Largest exponent magnitude passed to `exp`.
const MAX_EXPONENT: f64 = 700.0;

/// Natural-log half-width of the eigenvalue range sampled by [`search_indefinite`].
const SEARCH_LOG_SPREAD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GramVariant {
    /// `det(X_i + X_j)^{-β}`.
    #[default]
    DetSum,
    /// `exp(−β S(X_i, X_j))`, a positive diagonal congruence of `DetSum`.
    Normalized,
}

impl fmt::Display for GramVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GramVariant::DetSum => "det_sum",
            GramVariant::Normalized => "normalized",
        })
    }
}

impl FromStr for GramVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det_sum" => Ok(GramVariant::DetSum),
            "normalized" => Ok(GramVariant::Normalized),
            other => Err(Error::InvalidParameter(format!("unknown kernel variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GramSpec {
    pub bundle: MatrixBundle,
    pub beta: f64,
    pub variant: GramVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub gram: DMatrix<f64>,
    pub min_eig: f64,
    pub max_eig: f64,
    pub psd: bool,
    pub beta_admissible: bool,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta {beta} must be positive and finite")));
    }
    Ok(())
}

/// Whether `β` is in `{j/2 : 1 ≤ j ≤ n−1} ∪ ((n−1)/2, ∞)`.
pub fn beta_admissible(beta: f64, n: usize) -> Result<bool> {
    check_beta(beta)?;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let half_n1 = (n as f64 - 1.0) / 2.0;
    if beta > half_n1 {
        return Ok(true);
    }
    let j = (2.0 * beta).round();
    Ok(j >= 1.0 && j <= (n - 1) as f64 && (2.0 * beta - j).abs() <= HALF_INTEGER_TOL)
}

fn exp_checked(exponent: f64) -> Result<f64> {
    if exponent.abs() > MAX_EXPONENT {
        return Err(Error::Overflow {
            log_magnitude: exponent,
        });
    }
    Ok(exponent.exp())
}

fn report(gram: DMatrix<f64>, beta_admissible: bool) -> Result<GramReport> {
    let eig = symmetric_eigen(&gram)?;
    let (min_eig, max_eig) = (eig.min(), eig.max());
    Ok(GramReport {
        gram,
        min_eig,
        max_eig,
        psd: min_eig >= -PSD_TOL * max_eig.abs(),
        beta_admissible,
    })
}

fn log_det_gram(matrices: &[&SpdMatrix], beta: f64, variant: GramVariant) -> Result<DMatrix<f64>> {
    let m = matrices.len();
    let n = matrices[0].dim() as f64;
    // log det(2X_i) = n log 2 + log det X_i
    let self_terms: Vec<f64> = match variant {
        GramVariant::DetSum => vec![0.0; m],
        GramVariant::Normalized => matrices
            .iter()
            .map(|x| n * std::f64::consts::LN_2 + cholesky(x).log_det())
            .collect(),
    };
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let sum = matrices[i].as_matrix() + matrices[j].as_matrix();
            let mut log_h = -beta * try_cholesky(&sum)?.log_det();
            if variant == GramVariant::Normalized {
                log_h += 0.5 * beta * (self_terms[i] + self_terms[j]);
            }
            let h = exp_checked(log_h)?;
            gram[(i, j)] = h;
            gram[(j, i)] = h;
        }
    }
    Ok(gram)
}

/// Gram matrix of a bundle with its extreme eigenvalues and PSD verdict.
pub fn gram_matrix(spec: &GramSpec) -> Result<GramReport> {
    check_beta(spec.beta)?;
    let matrices: Vec<&SpdMatrix> = spec.bundle.matrices().collect();
    let gram = log_det_gram(&matrices, spec.beta, spec.variant)?;
    report(gram, beta_admissible(spec.beta, spec.bundle.dim())?)
}

/// Gram matrix `[(x_i + x_j)^{-β}]` of positive scalars, PSD for every `β > 0`.
pub fn scalar_gram(xs: &[f64], beta: f64) -> Result<GramReport> {
    check_beta(beta)?;
    if xs.is_empty() {
        return Err(Error::InvalidParameter("no scalars given".into()));
    }
    if let Some(bad) = xs.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveInput(format!("scalar {bad}")));
    }
    let m = xs.len();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let h = exp_checked(-beta * (xs[i] + xs[j]).ln())?;
            gram[(i, j)] = h;
            gram[(j, i)] = h;
        }
    }
    report(gram, true)
}

/// Five `2 × 2` matrices, entries given to four decimals, whose Gram matrix is indefinite at `β = 0.1`.
pub fn counterexample_bundle() -> MatrixBundle {
    let raw: [[f64; 3]; 5] = [
        [0.1406, 0.0347, 0.1779],
        [2.0195, 0.0066, 0.2321],
        [1.0924, 0.0609, 1.2520],
        [1.0309, 0.8694, 1.2310],
        [0.2870, -0.4758, 2.3569],
    ];
    let items = raw
        .iter()
        .enumerate()
        .map(|(i, &[a, b, c])| {
            let m = SpdMatrix::from_rows(&[vec![a, b], vec![b, c]]).expect("counterexample matrices are SPD");
            (format!("X{}", i + 1), m)
        })
        .collect();
    MatrixBundle::new(items, None).expect("counterexample bundle is well formed")
}

/// A bundle found by [`search_indefinite`].
#[derive(Debug, Clone)]
pub struct IndefiniteWitness {
    pub trial: usize,
    pub bundle: MatrixBundle,
    pub min_eig: f64,
    pub max_eig: f64,
}

fn search_trial(n: usize, beta: f64, seed: u64) -> Result<Option<(Vec<SpdMatrix>, f64, f64)>> {
    let mut rng = seeded_rng(seed);
    let mut matrices = Vec::with_capacity(n + 3);
    for _ in 0..n + 3 {
        let q = random::sample_orthogonal(&mut rng, n);
        let spectrum: Vec<f64> = (0..n)
            .map(|_| random::sample_log_uniform(&mut rng, (-SEARCH_LOG_SPREAD).exp(), SEARCH_LOG_SPREAD.exp()))
            .collect();
        matrices.push(random::from_spectrum(&q, &spectrum)?);
    }
    let refs: Vec<&SpdMatrix> = matrices.iter().collect();
    let gram = log_det_gram(&refs, beta, GramVariant::Normalized)?;
    let eig = symmetric_eigen(&gram)?;
    if eig.min() < -INDEFINITE_TOL * eig.max() {
        Ok(Some((matrices, eig.min(), eig.max())))
    } else {
        Ok(None)
    }
}

/// Random search for a bundle of `n + 3` matrices whose Gram matrix is indefinite.
///
/// Trial `k` draws from a generator seeded with `seed ^ k`; matrices have Haar
/// eigenvectors and eigenvalues log-uniform on `[e⁻², e²]`. Trials may run in parallel
/// on the ambient rayon pool; the lowest-indexed hit is returned either way. `None`
/// means no witness within `budget`, which is inconclusive.
pub fn search_indefinite(n: usize, beta: f64, budget: usize, seed: u64) -> Result<Option<IndefiniteWitness>> {
    check_beta(beta)?;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let hit = (0..budget)
        .into_par_iter()
        .map(|k| search_trial(n, beta, seed ^ k as u64).ok().flatten().map(|h| (k, h)))
        .find_first(Option::is_some)
        .flatten();
    match hit {
        None => Ok(None),
        Some((trial, (matrices, min_eig, max_eig))) => Ok(Some(IndefiniteWitness {
            trial,
            bundle: MatrixBundle::from_matrices(matrices)?,
            min_eig,
            max_eig,
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn admissibility_examples() {
        assert!(beta_admissible(0.5, 2).unwrap());
        assert!(!beta_admissible(0.1, 2).unwrap());
        assert!(!beta_admissible(0.75, 3).unwrap());
        assert!(beta_admissible(1.0, 3).unwrap());
        assert!(beta_admissible(1.0 + 1e-13, 3).unwrap());
        assert!(beta_admissible(1.5, 4).unwrap());
        assert!(!beta_admissible(1.25, 4).unwrap());
        assert!(beta_admissible(0.01, 1).unwrap());
        assert!(beta_admissible(0.0, 2).is_err());
        assert!(beta_admissible(f64::NAN, 2).is_err());
    }

    #[test]
    fn counterexample_contents() {
        let b = counterexample_bundle();
        assert_eq!(b.len(), 5);
        assert_eq!(b.dim(), 2);
        assert_eq!(b.items()[4].1.as_matrix()[(0, 1)], -0.4758);
    }

    #[test]
    fn counterexample_is_indefinite() {
        let spec = GramSpec {
            bundle: counterexample_bundle(),
            beta: 0.1,
            variant: GramVariant::DetSum,
        };
        let r = gram_matrix(&spec).unwrap();
        assert_abs_diff_eq!(r.min_eig, -0.0017, epsilon = 2e-4);
        assert!(!r.psd);
        assert!(!r.beta_admissible);
        let r = gram_matrix(&GramSpec { beta: 0.5, ..spec }).unwrap();
        assert!(r.psd);
    }

    #[test]
    fn single_matrix_gram() {
        let bundle = MatrixBundle::from_matrices(vec![SpdMatrix::identity(2)]).unwrap();
        let r = gram_matrix(&GramSpec {
            bundle,
            beta: 0.3,
            variant: GramVariant::DetSum,
        })
        .unwrap();
        assert_abs_diff_eq!(r.gram[(0, 0)], 4f64.powf(-0.3), epsilon = 1e-15);
        assert!(r.psd);
    }

    #[test]
    fn overflow_is_reported() {
        let tiny = SpdMatrix::from_diagonal(&[1e-200, 1e-200]).unwrap();
        let bundle = MatrixBundle::from_matrices(vec![tiny]).unwrap();
        let err = gram_matrix(&GramSpec {
            bundle,
            beta: 2.0,
            variant: GramVariant::DetSum,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }

    #[test]
    fn scalar_gram_examples() {
        let r = scalar_gram(&[1.0], 0.7).unwrap();
        assert_abs_diff_eq!(r.gram[(0, 0)], 2f64.powf(-0.7), epsilon = 1e-15);
        let r = scalar_gram(&[1.0, 2.0, 5.0, 10.0], 0.1).unwrap();
        assert!(r.psd);
        assert!(r.min_eig >= -1e-12 * r.max_eig);
        assert!(matches!(scalar_gram(&[1.0, -1.0], 0.1), Err(Error::NonPositiveInput(_))));
    }

    #[test]
    fn search_finds_counterexample_for_small_beta() {
        let hit = search_indefinite(2, 0.1, 10_000, 7).unwrap().expect("witness");
        assert_eq!(hit.bundle.len(), 5);
        let r = gram_matrix(&GramSpec {
            bundle: hit.bundle,
            beta: 0.1,
            variant: GramVariant::DetSum,
        })
        .unwrap();
        assert!(!r.psd);
    }
}
