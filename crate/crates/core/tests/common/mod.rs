//! Reference computations built directly on nalgebra's symmetric eigensolver.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use spdkit::pd::random_spd;
use spdkit::SpdMatrix;

pub fn eig_apply(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn log_det(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().map(|v| v.ln()).sum()
}

/// Eigenvalues of `Y^{-1/2} X Y^{-1/2}`.
pub fn relative_spectrum(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Vec<f64> {
    let r = eig_apply(y, |v| v.sqrt().recip());
    let c = &r * x * &r;
    eigenvalues(&((&c + c.transpose()) * 0.5))
}

/// `S(X, Y) = Σ log((1 + λ_i)/2) − ½ Σ log λ_i` over the relative spectrum.
pub fn s_div(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    relative_spectrum(x, y)
        .iter()
        .map(|l| ((1.0 + l) / 2.0).ln() - 0.5 * l.ln())
        .sum()
}

pub fn riemannian(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    relative_spectrum(x, y).iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt()
}

/// `A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
pub fn geodesic(a: &DMatrix<f64>, b: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let h = eig_apply(a, f64::sqrt);
    let hi = eig_apply(a, |v| v.sqrt().recip());
    let c = &hi * b * &hi;
    let ct = eig_apply(&((&c + c.transpose()) * 0.5), |v| v.powf(t));
    &h * ct * &h
}

pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn spd(n: usize, seed: u64, cond: f64) -> SpdMatrix {
    random_spd(n, seed, cond).unwrap()
}
