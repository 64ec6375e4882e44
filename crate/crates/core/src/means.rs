//! Matrix means: geodesic points and the geometric mean of two matrices, the weighted
//! S-mean by fixed-point iteration, and two baselines (log-Euclidean and Karcher).

use nalgebra::DMatrix;

use crate::bundle::MatrixBundle;
use crate::divergences::s_div;
use crate::error::{Error, Result};
use crate::pd::{
    cholesky, exp_symmetric, kron_capped, symmetric_eigen, symmetrize, try_cholesky, SpdMatrix,
    KRON_DIM_CAP,
};

/// Allowed deviation of the weight sum from one.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Gradient residual required, relative to `max(1, ‖X‖_F)`, before an S-mean is
/// reported as converged.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Smallest tangent-norm threshold used by the Karcher iteration, per `√n`.
pub const KARCHER_TANGENT_FLOOR: f64 = 1e-10;

/// Weighted collection `(A_i, w_i)` whose mean is sought.
#[derive(Debug, Clone)]
pub struct MeanProblem {
    matrices: Vec<SpdMatrix>,
    weights: Vec<f64>,
}

impl MeanProblem {
    pub fn new(matrices: Vec<SpdMatrix>, weights: Vec<f64>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidParameter("mean of an empty collection".into()))?;
        let n = first.dim();
        if let Some(bad) = matrices.iter().find(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        if weights.len() != matrices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} weights for {} matrices",
                weights.len(),
                matrices.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {sum}, not 1")));
        }
        Ok(MeanProblem { matrices, weights })
    }

    pub fn uniform(matrices: Vec<SpdMatrix>) -> Result<Self> {
        let m = matrices.len().max(1);
        Self::new(matrices, vec![1.0 / m as f64; m])
    }

    pub fn from_bundle(bundle: &MatrixBundle) -> Result<Self> {
        Self::new(bundle.matrices().cloned().collect(), bundle.weights_or_uniform())
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[SpdMatrix] {
        &self.matrices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn pairs(&self) -> impl Iterator<Item = (&SpdMatrix, f64)> {
        self.matrices.iter().zip(self.weights.iter().copied())
    }

    /// `h(X) = Σ w_i S(X, A_i)`.
    pub fn objective(&self, x: &SpdMatrix) -> Result<f64> {
        let mut h = 0.0;
        for (a, w) in self.pairs() {
            h += w * s_div(x, a)?;
        }
        Ok(h)
    }

    /// `Σ w_i δ_R²(X, A_i)`, the quantity the Karcher mean minimizes.
    pub fn riemannian_objective(&self, x: &SpdMatrix) -> Result<f64> {
        let mut f = 0.0;
        for (a, w) in self.pairs() {
            let d = crate::divergences::riemannian(x, a)?;
            f += w * d * d;
        }
        Ok(f)
    }

    /// Weighted arithmetic mean `Σ w_i A_i`.
    pub fn arithmetic_mean(&self) -> Result<SpdMatrix> {
        let n = self.dim();
        let mut sum = DMatrix::zeros(n, n);
        for (a, w) in self.pairs() {
            sum += a.as_matrix() * w;
        }
        SpdMatrix::from_symmetric(sum)
    }
}

/// Starting point of an iterative solver.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    #[default]
    ArithmeticMean,
    Identity,
    Supplied(SpdMatrix),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Relative Frobenius step below which the iteration may stop.
    pub tol: f64,
    pub max_iters: usize,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-12,
            max_iters: 1000,
            init: Init::ArithmeticMean,
        }
    }
}

impl SolverConfig {
    pub fn with_init(init: Init) -> Self {
        SolverConfig {
            init,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    fn start(&self, problem: &MeanProblem) -> Result<SpdMatrix> {
        match &self.init {
            Init::ArithmeticMean => problem.arithmetic_mean(),
            Init::Identity => Ok(SpdMatrix::identity(problem.dim())),
            Init::Supplied(x) => {
                if x.dim() != problem.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: problem.dim(),
                        found: x.dim(),
                    });
                }
                Ok(x.clone())
            }
        }
    }
}

/// Outcome of an iterative mean computation.
#[derive(Debug, Clone)]
pub struct MeanReport {
    pub mean: SpdMatrix,
    /// Number of accepted updates.
    pub iterations: usize,
    /// Gradient norm at the returned matrix.
    pub residual: f64,
    /// Relative Frobenius step of each accepted update.
    pub step_history: Vec<f64>,
    /// Objective at the initial point and after each accepted update.
    pub objective_history: Vec<f64>,
    pub converged: bool,
}

impl MeanReport {
    /// Turns a non-converged report into [`Error::MaxItersExceeded`].
    pub fn into_converged(self) -> Result<MeanReport> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::MaxItersExceeded {
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

/// Point `A♯_t B = A^{1/2}(A^{-1/2} B A^{-1/2})^t A^{1/2}` on the Riemannian geodesic.
///
/// Evaluated in the congruent form `L (L⁻¹ B L⁻ᵀ)^t Lᵀ` with `A = LLᵀ`, which equals the
/// symmetric-square-root form and avoids one eigendecomposition.
pub fn geodesic_point(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    a.check_dim(b)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("geodesic parameter {t} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(a.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    let chol = cholesky(a);
    let c = SpdMatrix::from_symmetric(chol.whiten(b.as_matrix()))?;
    let ct = c.powf(t)?;
    let l = chol.l();
    SpdMatrix::from_symmetric(l * ct.as_matrix() * l.transpose())
}

/// Geometric mean `A♯B`, the geodesic midpoint.
pub fn geometric_mean(a: &SpdMatrix, b: &SpdMatrix) -> Result<SpdMatrix> {
    geodesic_point(a, b, 0.5)
}

struct SMeanEval {
    /// `Σ w_i ((X + A_i)/2)⁻¹`.
    g: DMatrix<f64>,
    residual: f64,
    objective: f64,
}

fn s_mean_eval(problem: &MeanProblem, log_det_a: &[f64], x: &SpdMatrix) -> Result<SMeanEval> {
    let n = problem.dim();
    let xm = x.as_matrix();
    let x_chol = cholesky(x);
    let log_det_x = x_chol.log_det();
    let shift = n as f64 * std::f64::consts::LN_2;
    let mut g = DMatrix::zeros(n, n);
    let mut objective = 0.0;
    for ((a, w), ld_a) in problem.pairs().zip(log_det_a) {
        let sum = try_cholesky(&(xm + a.as_matrix()))?;
        objective += w * (sum.log_det() - shift - 0.5 * (log_det_x + ld_a));
        g += sum.inverse() * (2.0 * w);
    }
    let g = symmetrize(g);
    let residual = 0.5 * (x_chol.inverse() - &g).norm();
    Ok(SMeanEval {
        g,
        residual,
        objective,
    })
}

/// Weighted S-mean by the Picard iteration `X ← [Σ w_i ((X + A_i)/2)⁻¹]⁻¹`.
///
/// Stops once the relative step is at most `tol` and the gradient residual
/// `‖½X⁻¹ − Σ w_i (X + A_i)⁻¹‖_F` is at most `1e-8·max(1, ‖X‖_F)`. Running out of
/// iterations is not an error: the report comes back with `converged = false`.
pub fn s_mean(problem: &MeanProblem, config: &SolverConfig) -> Result<MeanReport> {
    config.validate()?;
    let mut x = config.start(problem)?;
    let log_det_a: Vec<f64> = problem.matrices.iter().map(|a| a.log_det()).collect();
    let mut step_history = Vec::new();
    let mut objective_history = Vec::new();
    let mut last_step = f64::INFINITY;
    loop {
        let eval = s_mean_eval(problem, &log_det_a, &x)?;
        objective_history.push(eval.objective);
        let small_residual = eval.residual <= RESIDUAL_TOL * x.frobenius_norm().max(1.0);
        let done = last_step <= config.tol && small_residual;
        if done || step_history.len() == config.max_iters {
            return Ok(MeanReport {
                mean: x,
                iterations: step_history.len(),
                residual: eval.residual,
                step_history,
                objective_history,
                converged: done,
            });
        }
        let next = SpdMatrix::from_symmetric(try_cholesky(&eval.g)?.inverse())?;
        last_step = (next.as_matrix() - x.as_matrix()).norm() / x.frobenius_norm();
        step_history.push(last_step);
        x = next;
    }
}

/// Positive definiteness check of `X⁻¹⊗X⁻¹ − Σ (w_i/2) M_i⁻¹⊗M_i⁻¹`, `M_i = (X + A_i)/2`.
///
/// The matrix is twice the Hessian of `h` at `X`, so its inertia is that of the Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianCheck {
    pub min_eig: f64,
    pub max_eig: f64,
    pub positive_definite: bool,
}

pub fn s_mean_hessian_psd(problem: &MeanProblem, x: &SpdMatrix) -> Result<HessianCheck> {
    let n = problem.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    let x_inv = cholesky(x).inverse();
    let mut h = kron_capped(&x_inv, &x_inv, KRON_DIM_CAP)?;
    for (a, w) in problem.pairs() {
        let mid = (x.as_matrix() + a.as_matrix()) * 0.5;
        let m_inv = try_cholesky(&mid)?.inverse();
        h -= kron_capped(&m_inv, &m_inv, KRON_DIM_CAP)? * (0.5 * w);
    }
    let eig = symmetric_eigen(&symmetrize(h))?;
    let (min_eig, max_eig) = (eig.min(), eig.max());
    Ok(HessianCheck {
        min_eig,
        max_eig,
        positive_definite: min_eig > 0.0,
    })
}

/// Log-Euclidean mean `exp(Σ w_i log A_i)`.
pub fn le_mean(problem: &MeanProblem) -> Result<SpdMatrix> {
    let n = problem.dim();
    let mut sum = DMatrix::zeros(n, n);
    for (a, w) in problem.pairs() {
        sum += a.log()? * w;
    }
    exp_symmetric(&symmetrize(sum))
}

struct KarcherEval {
    sqrt: DMatrix<f64>,
    /// `Σ w_i log(X^{-1/2} A_i X^{-1/2})`.
    tangent: DMatrix<f64>,
    objective: f64,
}

fn karcher_eval(problem: &MeanProblem, x: &SpdMatrix) -> Result<KarcherEval> {
    let n = problem.dim();
    let eig = symmetric_eigen(x.as_matrix())?;
    let sqrt = eig.apply(f64::sqrt);
    let inv_sqrt = eig.apply(|v| v.sqrt().recip());
    let mut tangent = DMatrix::zeros(n, n);
    let mut objective = 0.0;
    for (a, w) in problem.pairs() {
        let c = symmetrize(&inv_sqrt * a.as_matrix() * &inv_sqrt);
        let ce = symmetric_eigen(&c)?;
        if ce.min() <= 0.0 {
            return Err(Error::NotPositiveDefinite { pivot: 0 });
        }
        objective += w * ce.eigenvalues.iter().map(|v| v.ln().powi(2)).sum::<f64>();
        tangent += ce.apply(f64::ln) * w;
    }
    Ok(KarcherEval {
        sqrt,
        tangent: symmetrize(tangent),
        objective,
    })
}

/// Karcher (Riemannian least-squares) mean by the fixed-point gradient iteration
/// `X ← X^{1/2} exp(η Σ w_i log(X^{-1/2} A_i X^{-1/2})) X^{1/2}`.
///
/// `η` starts at 1 and is halved whenever a step would increase `Σ w_i δ_R²(X, A_i)`.
/// Converged once the relative step is at most `tol` or the tangent norm is at most
/// `max(tol, 1e-10)·√n`.
pub fn karcher_mean(problem: &MeanProblem, config: &SolverConfig) -> Result<MeanReport> {
    config.validate()?;
    let n = problem.dim() as f64;
    let tangent_tol = config.tol.max(KARCHER_TANGENT_FLOOR) * n.sqrt();
    let mut x = config.start(problem)?;
    let mut eval = karcher_eval(problem, &x)?;
    let mut eta = 1.0;
    let mut step_history = Vec::new();
    let mut objective_history = vec![eval.objective];
    let mut last_step = f64::INFINITY;
    loop {
        let residual = eval.tangent.norm();
        let done = last_step <= config.tol || residual <= tangent_tol;
        if done || step_history.len() == config.max_iters {
            return Ok(MeanReport {
                mean: x,
                iterations: step_history.len(),
                residual,
                step_history,
                objective_history,
                converged: done,
            });
        }
        let mut halvings = 0;
        let (next, next_eval) = loop {
            let e = exp_symmetric(&(&eval.tangent * eta))?;
            let cand = SpdMatrix::from_symmetric(&eval.sqrt * e.as_matrix() * &eval.sqrt)?;
            let cand_eval = karcher_eval(problem, &cand)?;
            if cand_eval.objective <= eval.objective || halvings >= 50 {
                break (cand, cand_eval);
            }
            eta *= 0.5;
            halvings += 1;
        };
        last_step = (next.as_matrix() - x.as_matrix()).norm() / x.frobenius_norm();
        step_history.push(last_step);
        objective_history.push(next_eval.objective);
        x = next;
        eval = next_eval;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pd::random_spd;
    use approx::assert_abs_diff_eq;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    fn rel(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
        (a.as_matrix() - b.as_matrix()).norm() / b.frobenius_norm()
    }

    #[test]
    fn geometric_mean_examples() {
        let a = random_spd(3, 1, 50.0).unwrap();
        assert!(rel(&geometric_mean(&a, &a).unwrap(), &a) < 1e-13);
        let g = geometric_mean(&diag(&[1.0, 9.0]), &diag(&[4.0, 16.0])).unwrap();
        assert!(rel(&g, &diag(&[2.0, 12.0])) < 1e-14);
        let b = random_spd(3, 2, 50.0).unwrap();
        let g = geometric_mean(&SpdMatrix::identity(3), &b).unwrap();
        assert!(rel(&g, &b.sqrt().unwrap()) < 1e-12);
    }

    #[test]
    fn geodesic_examples() {
        let a = random_spd(3, 3, 10.0).unwrap();
        let b = random_spd(3, 4, 10.0).unwrap();
        assert_eq!(geodesic_point(&a, &b, 0.0).unwrap(), a);
        assert_eq!(geodesic_point(&a, &b, 1.0).unwrap(), b);
        let i = SpdMatrix::identity(1);
        assert_abs_diff_eq!(geodesic_point(&i, &diag(&[16.0]), 0.5).unwrap().as_matrix()[(0, 0)], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(geodesic_point(&i, &diag(&[16.0]), 0.25).unwrap().as_matrix()[(0, 0)], 2.0, epsilon = 1e-14);
        assert!(matches!(geodesic_point(&a, &b, 1.5), Err(Error::InvalidParameter(_))));
        assert!(matches!(geodesic_point(&a, &b, -0.1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn s_mean_single_matrix_is_itself() {
        let a = random_spd(4, 5, 100.0).unwrap();
        let r = s_mean(&MeanProblem::uniform(vec![a.clone()]).unwrap(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(rel(&r.mean, &a) < 1e-12);
    }

    #[test]
    fn s_mean_scalar_pair() {
        let p = MeanProblem::uniform(vec![diag(&[1.0]), diag(&[4.0])]).unwrap();
        let r = s_mean(&p, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.mean.as_matrix()[(0, 0)], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn s_mean_pair_is_geometric_mean() {
        let a = random_spd(4, 11, 1e3).unwrap();
        let b = random_spd(4, 12, 1e3).unwrap();
        let r = s_mean(&MeanProblem::uniform(vec![a.clone(), b.clone()]).unwrap(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(rel(&r.mean, &geometric_mean(&a, &b).unwrap()) < 1e-8);
    }

    #[test]
    fn s_mean_budget_exhaustion_is_reported() {
        let p = MeanProblem::uniform(vec![diag(&[1.0, 100.0]), diag(&[50.0, 1.0]), diag(&[3.0, 3.0])]).unwrap();
        let cfg = SolverConfig {
            max_iters: 1,
            ..SolverConfig::default()
        };
        let r = s_mean(&p, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
        assert!(matches!(r.into_converged(), Err(Error::MaxItersExceeded { iterations: 1, .. })));
    }

    #[test]
    fn invalid_problems_and_configs() {
        assert!(MeanProblem::new(vec![diag(&[1.0])], vec![0.5]).is_err());
        assert!(MeanProblem::new(vec![diag(&[1.0]), diag(&[1.0, 2.0])], vec![0.5, 0.5]).is_err());
        assert!(MeanProblem::uniform(vec![]).is_err());
        let p = MeanProblem::uniform(vec![diag(&[1.0])]).unwrap();
        let cfg = SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(s_mean(&p, &cfg).is_err());
    }

    #[test]
    fn hessian_at_single_matrix_is_half_kron() {
        let a = diag(&[2.0, 5.0]);
        let p = MeanProblem::uniform(vec![a.clone()]).unwrap();
        let check = s_mean_hessian_psd(&p, &a).unwrap();
        // ½·(A⁻¹⊗A⁻¹) has spectrum ½·{1/4, 1/10, 1/10, 1/25}
        assert_abs_diff_eq!(check.max_eig, 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(check.min_eig, 0.02, epsilon = 1e-15);
        assert!(check.positive_definite);
    }

    #[test]
    fn le_mean_examples() {
        let a = random_spd(3, 21, 10.0).unwrap();
        assert!(rel(&le_mean(&MeanProblem::uniform(vec![a.clone()]).unwrap()).unwrap(), &a) < 1e-12);
        let m = le_mean(&MeanProblem::uniform(vec![diag(&[1.0]), diag(&[4.0])]).unwrap()).unwrap();
        assert_abs_diff_eq!(m.as_matrix()[(0, 0)], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn karcher_examples() {
        let a = random_spd(3, 31, 10.0).unwrap();
        let r = karcher_mean(&MeanProblem::uniform(vec![a.clone()]).unwrap(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(rel(&r.mean, &a) < 1e-12);

        let p = MeanProblem::uniform(vec![diag(&[1.0]), diag(&[4.0]), diag(&[16.0])]).unwrap();
        let r = karcher_mean(&p, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.mean.as_matrix()[(0, 0)], 4.0, epsilon = 1e-10);

        let b = random_spd(3, 32, 10.0).unwrap();
        let r = karcher_mean(&MeanProblem::uniform(vec![a.clone(), b.clone()]).unwrap(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(rel(&r.mean, &geometric_mean(&a, &b).unwrap()) < 1e-6);
    }
}
