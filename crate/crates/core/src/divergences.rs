//! Distances and divergences between SPD matrices.
//!
//! The S-divergence and its square root `δ_S` need only Cholesky factorizations.
//! The Riemannian (affine-invariant), log-Euclidean and Thompson distances need
//! eigenvalues. Three matrix Bregman divergences and their Jensen symmetrizations are
//! included; the Jensen symmetrization of the `−log x` generator is the S-divergence.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pd::{cholesky, kron, log_relative_spectrum, sym_eig, try_cholesky, SpdMatrix};

/// Values in `[-NEGATIVE_CLAMP, 0)` are rounded up to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

fn clamp_small_negative(v: f64) -> f64 {
    if (-NEGATIVE_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// `log det((X+Y)/2)` from the Cholesky factor of the midpoint.
fn log_det_midpoint(x: &SpdMatrix, y: &SpdMatrix) -> f64 {
    let mid = (x.as_matrix() + y.as_matrix()) * 0.5;
    try_cholesky(&mid)
        .expect("midpoint of two SPD matrices is positive definite")
        .log_det()
}

/// S-divergence `log det((X+Y)/2) − ½ log det(X) − ½ log det(Y)`.
pub fn s_div(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    x.check_dim(y)?;
    let s = log_det_midpoint(x, y) - 0.5 * (cholesky(x).log_det() + cholesky(y).log_det());
    Ok(clamp_small_negative(s))
}

/// The metric `δ_S = √S`.
pub fn delta_s(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    Ok(s_div(x, y)?.sqrt())
}

/// Scalar `δ_s(x, y) = √(log((x+y) / (2√(xy))))`.
pub fn scalar_delta_s(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::NonPositiveInput(format!("scalar_delta_s({x}, {y})")));
    }
    let v = ((x + y) / (2.0 * (x * y).sqrt())).ln();
    Ok(clamp_small_negative(v).sqrt())
}

/// Affine-invariant Riemannian distance `‖log(Y^{-1/2} X Y^{-1/2})‖_F`.
pub fn riemannian(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    let u = log_relative_spectrum(x, y)?;
    Ok(u.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Log-Euclidean distance `‖log X − log Y‖_F`.
pub fn log_euclidean(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    x.check_dim(y)?;
    Ok((x.log()? - y.log()?).norm())
}

/// Thompson metric, the sup-norm of the log generalized spectrum.
pub fn thompson(x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    let u = log_relative_spectrum(x, y)?;
    Ok(u.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Convex generators of the matrix Bregman divergences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `f(x) = x²/2`, giving `½‖X − Y‖²_F`.
    HalfSquare,
    /// `f(x) = x log x − x`, giving the von Neumann divergence.
    XLogXMinusX,
    /// `f(x) = −log x`, giving the LogDet divergence (Stein's loss).
    NegLog,
}

impl Generator {
    fn needs_spd(self) -> bool {
        !matches!(self, Generator::HalfSquare)
    }

    /// `trace f(X)`.
    fn trace(self, x: &DMatrix<f64>) -> Result<f64> {
        match self {
            Generator::HalfSquare => Ok(0.5 * x.norm_squared()),
            Generator::XLogXMinusX => {
                let spd = as_spd(x)?;
                let eig = sym_eig(&spd)?;
                Ok(eig.eigenvalues.iter().map(|&l| l * l.ln() - l).sum())
            }
            Generator::NegLog => Ok(-as_spd(x)?.log_det()),
        }
    }

    /// `f′(Y)`.
    fn derivative(self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self {
            Generator::HalfSquare => Ok(y.clone()),
            Generator::XLogXMinusX => as_spd(y)?.log(),
            Generator::NegLog => Ok(-cholesky(&as_spd(y)?).inverse()),
        }
    }
}

fn as_spd(x: &DMatrix<f64>) -> Result<SpdMatrix> {
    SpdMatrix::new(x.clone()).map_err(|e| Error::NonPositiveInput(format!("log-based generator: {e}")))
}

fn check_shapes(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.nrows(),
        });
    }
    Ok(())
}

/// Matrix Bregman divergence `tr f(X) − tr f(Y) − tr(f′(Y)(X − Y))`.
///
/// `HalfSquare` accepts any symmetric pair; the log-based generators require SPD inputs.
pub fn bregman(f: Generator, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64> {
    check_shapes(x, y)?;
    if f.needs_spd() {
        as_spd(x)?;
    }
    let fprime = f.derivative(y)?;
    let linear = (fprime * (x - y)).trace();
    Ok(clamp_small_negative(f.trace(x)? - f.trace(y)? - linear))
}

/// Jensen symmetrization `½(tr f(X) + tr f(Y)) − tr f((X+Y)/2)`.
pub fn jensen_div(f: Generator, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64> {
    check_shapes(x, y)?;
    let mid = (x + y) * 0.5;
    Ok(clamp_small_negative(
        0.5 * (f.trace(x)? + f.trace(y)?) - f.trace(&mid)?,
    ))
}

/// Gradient of `X ↦ S(X, Y)`: `(X+Y)⁻¹ − ½X⁻¹`.
pub fn s_div_grad(x: &SpdMatrix, y: &SpdMatrix) -> Result<DMatrix<f64>> {
    x.check_dim(y)?;
    let sum_inv = try_cholesky(&(x.as_matrix() + y.as_matrix()))?.inverse();
    let x_inv = cholesky(x).inverse();
    Ok(sum_inv - x_inv * 0.5)
}

/// Hessian of `A ↦ S(A, B)` on vectorized directions:
/// `½(A⁻¹ ⊗ A⁻¹) − (A+B)⁻¹ ⊗ (A+B)⁻¹`.
pub fn s_div_hessian(a: &SpdMatrix, b: &SpdMatrix) -> Result<DMatrix<f64>> {
    a.check_dim(b)?;
    let a_inv = cholesky(a).inverse();
    let sum_inv = try_cholesky(&(a.as_matrix() + b.as_matrix()))?.inverse();
    let h = kron(&a_inv, &a_inv)? * 0.5 - kron(&sum_inv, &sum_inv)?;
    Ok(crate::pd::symmetrize(h))
}

/// Every divergence the crate knows, by tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    Sdiv,
    Sdelta,
    Riemannian,
    Logeuclid,
    Thompson,
    FrobeniusSq,
    VonNeumann,
    LogdetStein,
    /// Jensen symmetrization of a Bregman generator.
    JensenF(Generator),
}

impl DivergenceKind {
    pub const ALL_SYMMETRIC: [DivergenceKind; 5] = [
        DivergenceKind::Sdiv,
        DivergenceKind::Sdelta,
        DivergenceKind::Riemannian,
        DivergenceKind::Logeuclid,
        DivergenceKind::Thompson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DivergenceKind::Sdiv => "sdiv",
            DivergenceKind::Sdelta => "sdelta",
            DivergenceKind::Riemannian => "riemannian",
            DivergenceKind::Logeuclid => "logeuclid",
            DivergenceKind::Thompson => "thompson",
            DivergenceKind::FrobeniusSq => "frobenius_sq",
            DivergenceKind::VonNeumann => "von_neumann",
            DivergenceKind::LogdetStein => "logdet_stein",
            DivergenceKind::JensenF(Generator::HalfSquare) => "jensen_half_square",
            DivergenceKind::JensenF(Generator::XLogXMinusX) => "jensen_xlogx",
            DivergenceKind::JensenF(Generator::NegLog) => "jensen_neg_log",
        }
    }

    /// Whether `d(X, Y) = d(Y, X)` holds for this tag.
    pub fn is_symmetric(self) -> bool {
        !matches!(self, DivergenceKind::VonNeumann | DivergenceKind::LogdetStein)
    }

    pub fn eval(self, x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
        match self {
            DivergenceKind::Sdiv => s_div(x, y),
            DivergenceKind::Sdelta => delta_s(x, y),
            DivergenceKind::Riemannian => riemannian(x, y),
            DivergenceKind::Logeuclid => log_euclidean(x, y),
            DivergenceKind::Thompson => thompson(x, y),
            DivergenceKind::FrobeniusSq => bregman(Generator::HalfSquare, x.as_matrix(), y.as_matrix()),
            DivergenceKind::VonNeumann => bregman(Generator::XLogXMinusX, x.as_matrix(), y.as_matrix()),
            DivergenceKind::LogdetStein => bregman(Generator::NegLog, x.as_matrix(), y.as_matrix()),
            DivergenceKind::JensenF(f) => jensen_div(f, x.as_matrix(), y.as_matrix()),
        }
    }
}

impl fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DivergenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sdiv" => DivergenceKind::Sdiv,
            "sdelta" => DivergenceKind::Sdelta,
            "riemannian" | "riem" => DivergenceKind::Riemannian,
            "logeuclid" => DivergenceKind::Logeuclid,
            "thompson" => DivergenceKind::Thompson,
            "frobenius_sq" => DivergenceKind::FrobeniusSq,
            "von_neumann" | "vonneumann" => DivergenceKind::VonNeumann,
            "logdet_stein" | "stein_loss" => DivergenceKind::LogdetStein,
            "jensen_half_square" => DivergenceKind::JensenF(Generator::HalfSquare),
            "jensen_xlogx" => DivergenceKind::JensenF(Generator::XLogXMinusX),
            "jensen_neg_log" | "jensen_f" => DivergenceKind::JensenF(Generator::NegLog),
            other => return Err(Error::InvalidParameter(format!("unknown divergence `{other}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    fn sample() -> SpdMatrix {
        SpdMatrix::from_rows(&[vec![2.0, 0.4, 0.1], vec![0.4, 1.5, -0.2], vec![0.1, -0.2, 0.8]])
            .unwrap()
    }

    #[test]
    fn s_div_examples() {
        let a = sample();
        assert_eq!(s_div(&a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(
            s_div(&diag(&[1.0, 1.0]), &diag(&[4.0, 4.0])).unwrap(),
            0.446287102628420,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            delta_s(&diag(&[1.0, 1.0]), &diag(&[4.0, 4.0])).unwrap(),
            0.668047,
            epsilon = 1e-6
        );
    }

    #[test]
    fn scalar_delta_examples() {
        assert_eq!(scalar_delta_s(1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(scalar_delta_s(1.0, 4.0).unwrap(), 0.472381, epsilon = 1e-6);
        let one_by_one = delta_s(&diag(&[2.0]), &diag(&[8.0])).unwrap();
        assert_abs_diff_eq!(scalar_delta_s(2.0, 8.0).unwrap(), one_by_one, epsilon = 1e-15);
        assert!(matches!(scalar_delta_s(0.0, 1.0), Err(Error::NonPositiveInput(_))));
        assert!(matches!(scalar_delta_s(1.0, -2.0), Err(Error::NonPositiveInput(_))));
    }

    #[test]
    fn scalar_triangle_example() {
        let d19 = scalar_delta_s(1.0, 9.0).unwrap();
        let d14 = scalar_delta_s(1.0, 4.0).unwrap();
        let d49 = scalar_delta_s(4.0, 9.0).unwrap();
        assert!(d19 <= d14 + d49);
        let m = delta_s(&diag(&[1.0]), &diag(&[9.0])).unwrap();
        assert!(m <= delta_s(&diag(&[1.0]), &diag(&[4.0])).unwrap() + delta_s(&diag(&[4.0]), &diag(&[9.0])).unwrap());
    }

    #[test]
    fn riemannian_log_euclid_thompson_examples() {
        let a = sample();
        assert_abs_diff_eq!(riemannian(&a, &a).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(log_euclidean(&a, &a).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(thompson(&a, &a).unwrap(), 0.0, epsilon = 1e-14);

        let i2 = SpdMatrix::identity(2);
        assert_abs_diff_eq!(
            riemannian(&i2, &diag(&[4.0, 4.0])).unwrap(),
            1.960516,
            epsilon = 1e-6
        );
        let e2 = std::f64::consts::E.powi(2);
        assert_abs_diff_eq!(
            log_euclidean(&i2, &diag(&[e2, e2])).unwrap(),
            2.828427,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            thompson(&i2, &diag(&[4.0, 0.25])).unwrap(),
            1.386294,
            epsilon = 1e-6
        );
    }

    #[test]
    fn bregman_examples() {
        let a = sample();
        for f in [Generator::HalfSquare, Generator::XLogXMinusX, Generator::NegLog] {
            assert_abs_diff_eq!(bregman(f, a.as_matrix(), a.as_matrix()).unwrap(), 0.0, epsilon = 1e-14);
        }
        let stein = bregman(Generator::NegLog, diag(&[2.0]).as_matrix(), diag(&[1.0]).as_matrix()).unwrap();
        assert_abs_diff_eq!(stein, 0.306853, epsilon = 1e-6);
        let e = std::f64::consts::E;
        let vn = bregman(Generator::XLogXMinusX, diag(&[e]).as_matrix(), diag(&[1.0]).as_matrix()).unwrap();
        assert_abs_diff_eq!(vn, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn log_generators_reject_indefinite_input() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let ok = DMatrix::identity(2, 2);
        assert!(matches!(bregman(Generator::NegLog, &bad, &ok), Err(Error::NonPositiveInput(_))));
        assert!(matches!(bregman(Generator::XLogXMinusX, &ok, &bad), Err(Error::NonPositiveInput(_))));
        assert!(bregman(Generator::HalfSquare, &bad, &ok).is_ok());
    }

    #[test]
    fn jensen_examples() {
        let a = sample();
        assert_abs_diff_eq!(jensen_div(Generator::NegLog, a.as_matrix(), a.as_matrix()).unwrap(), 0.0, epsilon = 1e-14);
        let zero = DMatrix::from_element(1, 1, 0.0);
        let two = DMatrix::from_element(1, 1, 2.0);
        assert_abs_diff_eq!(jensen_div(Generator::HalfSquare, &zero, &two).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gradient_examples() {
        let a = sample();
        assert_abs_diff_eq!(s_div_grad(&a, &a).unwrap(), DMatrix::zeros(3, 3), epsilon = 1e-14);
        let g = s_div_grad(&diag(&[1.0]), &diag(&[4.0])).unwrap();
        assert_abs_diff_eq!(g[(0, 0)], -0.3, epsilon = 1e-15);
    }

    #[test]
    fn hessian_examples() {
        let h = s_div_hessian(&diag(&[1.0]), &diag(&[1.0])).unwrap();
        assert_abs_diff_eq!(h[(0, 0)], 0.25, epsilon = 1e-15);
        let h = s_div_hessian(&diag(&[4.0]), &diag(&[1.0])).unwrap();
        assert_abs_diff_eq!(h[(0, 0)], -0.00875, epsilon = 1e-15);
        let big = SpdMatrix::identity(65);
        assert!(matches!(s_div_hessian(&big, &big), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn kinds_parse_and_dispatch() {
        let x = diag(&[1.0, 1.0]);
        let y = diag(&[4.0, 4.0]);
        let k: DivergenceKind = "sdiv".parse().unwrap();
        assert_eq!(k.eval(&x, &y).unwrap(), s_div(&x, &y).unwrap());
        assert_eq!("stein_loss".parse::<DivergenceKind>().unwrap(), DivergenceKind::LogdetStein);
        assert!("nope".parse::<DivergenceKind>().is_err());
    }
}
