use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative asymmetry accepted at construction, measured against the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A validated real symmetric positive definite matrix.
///
/// Construction symmetrizes the input exactly with `(A + Aᵀ)/2` and then requires a
/// Cholesky factorization with strictly positive pivots. Values are immutable afterwards.
#[derive(Clone, PartialEq)]
pub struct SpdMatrix {
    inner: DMatrix<f64>,
}

impl SpdMatrix {
    /// Validates `raw` and returns it as an SPD matrix.
    pub fn new(raw: DMatrix<f64>) -> Result<Self> {
        if !raw.is_square() {
            return Err(Error::NotSquare {
                rows: raw.nrows(),
                cols: raw.ncols(),
            });
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asymmetry = max_asymmetry(&raw);
        let allowed = SYMMETRY_TOL * raw.amax();
        if asymmetry > allowed {
            return Err(Error::NotSymmetric { asymmetry, allowed });
        }
        let sym = symmetrize(raw);
        cholesky_lower(&sym)?;
        Ok(SpdMatrix { inner: sym })
    }

    /// Symmetrizes `raw` regardless of its asymmetry and then checks definiteness.
    ///
    /// Used for results of matrix arithmetic whose asymmetry is pure roundoff.
    pub(crate) fn from_symmetric(raw: DMatrix<f64>) -> Result<Self> {
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sym = symmetrize(raw);
        cholesky_lower(&sym)?;
        Ok(SpdMatrix { inner: sym })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }))
    }

    pub fn identity(n: usize) -> Self {
        SpdMatrix {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.inner
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// `c·A` for `c > 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {c} must be positive")));
        }
        Self::from_symmetric(&self.inner * c)
    }

    /// `A + B`, positive definite whenever both summands are.
    pub fn add(&self, other: &SpdMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_symmetric(&self.inner + &other.inner)
    }

    /// `A + P` for a positive semidefinite (or merely symmetric) `P`, validated.
    pub fn add_symmetric(&self, p: &DMatrix<f64>) -> Result<Self> {
        if p.nrows() != self.dim() || p.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.nrows(),
            });
        }
        Self::from_symmetric(&self.inner + p)
    }

    /// `(A + B)/2`.
    pub fn midpoint(&self, other: &SpdMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Self::from_symmetric((&self.inner + &other.inner) * 0.5)
    }

    /// `Pᵀ A P`; fails if `P` is singular enough to destroy definiteness.
    pub fn congruence(&self, p: &DMatrix<f64>) -> Result<Self> {
        if p.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.nrows(),
            });
        }
        Self::from_symmetric(p.transpose() * &self.inner * p)
    }

    pub(crate) fn check_dim(&self, other: &SpdMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpdMatrix")
            .field("n", &self.dim())
            .field("rows", &self.to_rows())
            .finish()
    }
}

impl AsRef<DMatrix<f64>> for SpdMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.inner
    }
}

impl TryFrom<DMatrix<f64>> for SpdMatrix {
    type Error = Error;

    fn try_from(raw: DMatrix<f64>) -> Result<Self> {
        SpdMatrix::new(raw)
    }
}

/// Validating constructor, see [`SpdMatrix::new`].
pub fn make_spd(raw: DMatrix<f64>) -> Result<SpdMatrix> {
    SpdMatrix::new(raw)
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Lower Cholesky factor of a symmetric matrix (only the lower triangle is read).
///
/// On failure reports the index of the first non-positive pivot.
pub(crate) fn cholesky_lower(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match nalgebra::Cholesky::new(a.clone()) {
        Some(c) => Ok(c.unpack()),
        None => Err(Error::NotPositiveDefinite {
            pivot: failing_pivot(a),
        }),
    }
}

fn failing_pivot(a: &DMatrix<f64>) -> usize {
    let n = a.nrows();
    let mut l = a.lower_triangle();
    for j in 0..n {
        let mut d = l[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return j;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = l[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    n.saturating_sub(1)
}
