use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::matrix::{cholesky_lower, symmetrize, SpdMatrix};
use crate::error::{Error, Result};

/// Default cap on the dimension of a Kronecker product (rows of the result).
pub const KRON_DIM_CAP: usize = 4096;

/// Iteration budget of the symmetric eigensolver, per unit of dimension.
pub const EIG_ITERS_PER_DIM: usize = 30;

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DMatrix<f64>,
}

impl CholeskyFactor {
    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn into_l(self) -> DMatrix<f64> {
        self.l
    }

    /// `log det A = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// `A⁻¹`, symmetrized.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.l.nrows();
        let linv = self
            .l
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("Cholesky factor has a positive diagonal");
        symmetrize(linv.transpose() * linv)
    }

    /// `L⁻¹ M L⁻ᵀ` for symmetric `M`.
    pub fn whiten(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let left = self
            .l
            .solve_lower_triangular(m)
            .expect("Cholesky factor has a positive diagonal");
        let both = self
            .l
            .solve_lower_triangular(&left.transpose())
            .expect("Cholesky factor has a positive diagonal");
        symmetrize(both)
    }
}

/// Cholesky factorization of a matrix already known to be positive definite.
pub fn cholesky(a: &SpdMatrix) -> CholeskyFactor {
    let l = cholesky_lower(a.as_matrix()).expect("SpdMatrix passed Cholesky at construction");
    CholeskyFactor { l }
}

/// Cholesky factorization of an arbitrary symmetric matrix.
pub fn try_cholesky(a: &DMatrix<f64>) -> Result<CholeskyFactor> {
    cholesky_lower(a).map(|l| CholeskyFactor { l })
}

/// Eigenvalues sorted descending with orthonormal eigenvectors in matching columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U f(Λ) Uᵀ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = f(lam);
            scaled.column_mut(j).scale_mut(fl);
        }
        symmetrize(scaled * u.transpose())
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.apply(|x| x)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvalues in ascending order.
    pub fn ascending(&self) -> Vec<f64> {
        self.eigenvalues.iter().rev().copied().collect()
    }
}

fn eig_budget(n: usize) -> usize {
    (EIG_ITERS_PER_DIM * n).max(EIG_ITERS_PER_DIM)
}

/// Eigendecomposition of any real symmetric matrix (implicit-shift QL on the tridiagonal form).
pub fn symmetric_eigen(m: &DMatrix<f64>) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: DVector::zeros(0),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }
    let budget = eig_budget(n);
    let eig = SymmetricEigen::try_new(symmetrize(m.clone()), f64::EPSILON, budget)
        .ok_or(Error::ConvergenceFailure { max_iters: budget })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, sorted descending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let budget = eig_budget(n);
    let eig = SymmetricEigen::try_new(symmetrize(m.clone()), f64::EPSILON, budget)
        .ok_or(Error::ConvergenceFailure { max_iters: budget })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Eigendecomposition of an SPD matrix; every eigenvalue is checked to be positive.
pub fn sym_eig(a: &SpdMatrix) -> Result<EigenDecomposition> {
    let eig = symmetric_eigen(a.as_matrix())?;
    if let Some(k) = eig.eigenvalues.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NotPositiveDefinite { pivot: k });
    }
    Ok(eig)
}

/// Congruence `P` with `PᵀAP = I` and `PᵀBP = diag(D)`.
#[derive(Debug, Clone)]
pub struct CongruencePair {
    pub transform: DMatrix<f64>,
    pub diagonal: DVector<f64>,
}

/// Simultaneous diagonalization of an SPD `A` and a symmetric `B` by congruence.
///
/// With `A = UΛUᵀ` and `S = Λ^{-1/2}`, the symmetric matrix `SUᵀBUS` is diagonalized
/// by an orthogonal `V`; then `P = USV`.
pub fn simultaneous_diagonalize(a: &SpdMatrix, b: &DMatrix<f64>) -> Result<CongruencePair> {
    let n = a.dim();
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.nrows(),
        });
    }
    let eig = sym_eig(a)?;
    let mut us = eig.eigenvectors.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        us.column_mut(j).scale_mut(1.0 / lam.sqrt());
    }
    let inner = us.transpose() * symmetrize(b.clone()) * &us;
    let inner_eig = symmetric_eigen(&inner)?;
    Ok(CongruencePair {
        transform: us * inner_eig.eigenvectors,
        diagonal: inner_eig.eigenvalues,
    })
}

/// Logarithms of the generalized eigenvalues of `(A, B)`, i.e. `log λ(AB⁻¹)`, sorted descending.
///
/// Computed by whitening `A` with the Cholesky factor of `B`; no explicit inverse is formed.
pub fn log_relative_spectrum(a: &SpdMatrix, b: &SpdMatrix) -> Result<Vec<f64>> {
    a.check_dim(b)?;
    let lb = cholesky(b);
    let w = lb.whiten(a.as_matrix());
    let vals = symmetric_eigenvalues(&w)?;
    if let Some(k) = vals.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NotPositiveDefinite { pivot: k });
    }
    Ok(vals.into_iter().map(f64::ln).collect())
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    kron_capped(a, b, KRON_DIM_CAP)
}

pub fn kron_capped(a: &DMatrix<f64>, b: &DMatrix<f64>, cap: usize) -> Result<DMatrix<f64>> {
    let rows = a.nrows().checked_mul(b.nrows());
    let cols = a.ncols().checked_mul(b.ncols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => Ok(a.kronecker(b)),
        (r, c) => Err(Error::DimensionOverflow {
            dim: r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX)),
            cap,
        }),
    }
}

/// Löwner order test `A ≤ B`: `λ_min(B − A) ≥ −tol · max(1, ‖B − A‖_F)`.
pub fn loewner_leq(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    let diff = b - a;
    let scale = diff.norm().max(1.0);
    let vals = symmetric_eigenvalues(&diff)?;
    Ok(vals.last().is_none_or(|&m| m >= -tol * scale))
}
