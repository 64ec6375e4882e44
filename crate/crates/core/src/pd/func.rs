use nalgebra::DMatrix;

use super::factor::{cholesky, sym_eig, symmetric_eigen};
use super::matrix::SpdMatrix;
use crate::error::{Error, Result};

/// Spectral matrix functions `f(A) = U f(Λ) Uᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatFn {
    Log,
    Exp,
    Power(f64),
    Sqrt,
    Inverse,
}

impl MatFn {
    fn eval(self, x: f64) -> f64 {
        match self {
            MatFn::Log => x.ln(),
            MatFn::Exp => x.exp(),
            MatFn::Power(t) => x.powf(t),
            MatFn::Sqrt => x.sqrt(),
            MatFn::Inverse => x.recip(),
        }
    }
}

/// Applies `f` through the eigendecomposition of `a`.
pub fn mat_fn(a: &SpdMatrix, f: MatFn) -> Result<DMatrix<f64>> {
    if let MatFn::Power(t) = f {
        if !t.is_finite() {
            return Err(Error::InvalidParameter(format!("power exponent {t} is not finite")));
        }
    }
    Ok(sym_eig(a)?.apply(|x| f.eval(x)))
}

/// Matrix exponential of a symmetric (not necessarily definite) matrix.
pub fn exp_symmetric(s: &DMatrix<f64>) -> Result<SpdMatrix> {
    let eig = symmetric_eigen(s)?;
    SpdMatrix::from_symmetric(eig.apply(f64::exp))
}

impl SpdMatrix {
    /// Principal matrix logarithm (symmetric, not necessarily definite).
    pub fn log(&self) -> Result<DMatrix<f64>> {
        mat_fn(self, MatFn::Log)
    }

    /// `A^t` for real `t`. `t = 0` and `t = 1` are returned exactly.
    pub fn powf(&self, t: f64) -> Result<SpdMatrix> {
        if t == 1.0 {
            return Ok(self.clone());
        }
        if t == 0.0 {
            return Ok(SpdMatrix::identity(self.dim()));
        }
        SpdMatrix::from_symmetric(mat_fn(self, MatFn::Power(t))?)
    }

    pub fn sqrt(&self) -> Result<SpdMatrix> {
        SpdMatrix::from_symmetric(mat_fn(self, MatFn::Sqrt)?)
    }

    pub fn inv_sqrt(&self) -> Result<SpdMatrix> {
        SpdMatrix::from_symmetric(mat_fn(self, MatFn::Power(-0.5))?)
    }

    /// `A⁻¹` through the Cholesky factor.
    pub fn inverse(&self) -> Result<SpdMatrix> {
        SpdMatrix::from_symmetric(cholesky(self).inverse())
    }

    /// `log det A` from the Cholesky diagonal.
    pub fn log_det(&self) -> f64 {
        cholesky(self).log_det()
    }
}
