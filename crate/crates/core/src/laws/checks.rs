//! Sampling rules and checks for each registered law.

use nalgebra::DMatrix;

use super::majorization::prefix_sums;
use super::{Check, LawId, Trial, Witness};
use crate::divergences::{delta_s, riemannian, s_div, s_div_hessian};
use crate::error::{Error, Result};
use crate::means::{geodesic_point, geometric_mean, s_mean, s_mean_hessian_psd, MeanProblem, SolverConfig};
use crate::pd::{
    cholesky, kron, log_relative_spectrum, random, seeded_rng, sym_eig, symmetric_eigenvalues, SpdMatrix,
};

const IDENTITY_TOL: f64 = 1e-8;
const INVARIANCE_TOL: f64 = 1e-9;
const PERTURBATION_STEP: f64 = 1e-3;
const PERTURBATION_DIRECTIONS: usize = 20;
const PERTURBATION_SLACK: f64 = 1e-12;
/// Condition-number cap for the congruence transform and the Kronecker factor in
/// invariance checks.
const CONGRUENCE_COND: f64 = 10.0;
/// Iteration budget of the S-mean solves; the Picard map contracts slowly on some inputs.
const SMEAN_MAX_ITERS: usize = 10_000;

pub(super) fn sample(law: LawId, t: &mut Trial) -> Result<Witness> {
    let mut w = Witness::new(law.name(), t.n);
    match law {
        LawId::TriangleSdelta => {
            let diagonal = t.index % 4 == 3;
            for name in ["X", "Y", "Z"] {
                let m = if diagonal {
                    let d: Vec<f64> = (0..t.n).map(|_| t.positive()).collect();
                    SpdMatrix::from_diagonal(&d)?
                } else {
                    t.spd()?
                };
                w.put_spd(name, &m);
            }
        }
        LawId::TriangleScalarP => {
            for name in ["x", "y", "z"] {
                let v = (0..t.n).map(|_| t.positive()).collect();
                w.put_vector(name, v);
            }
            w.put_scalar("p", (1 + t.index % 3) as f64);
        }
        LawId::DetBounds | LawId::EigSandwichSdelta | LawId::Sandwich => {
            put_spd_list(&mut w, t, &["A", "B"])?;
        }
        LawId::PowerContraction => {
            put_spd_list(&mut w, t, &["A", "B"])?;
            let reversed = t.index % 2 == 1;
            let s = t.unit();
            w.put_scalar("t", if reversed { 1.0 + s } else { s });
        }
        LawId::GeodesicContraction | LawId::RiemGeodesicExact => {
            put_spd_list(&mut w, t, &["A", "B"])?;
            w.put_scalar("t", t.unit());
        }
        LawId::Cancellation | LawId::RiemCancellation => {
            put_spd_list(&mut w, t, &["A", "B", "C"])?;
            w.put_scalar("t", t.unit());
        }
        LawId::TranslationMonotoneConvex => {
            put_spd_list(&mut w, t, &["X", "Y"])?;
            let n = t.n;
            let rank = t.index % (n + 1);
            let scale_a = t.positive();
            let a = random::sample_psd(&mut t.rng, n, rank, scale_a);
            let scale_p = t.positive();
            let p = random::sample_psd(&mut t.rng, n, 1 + t.index % n, scale_p);
            w.put_matrix("A", &a).put_matrix("P", &p);
        }
        LawId::TranslationCorollary => {
            put_spd_list(&mut w, t, &["A", "X", "Y"])?;
        }
        LawId::PowerMonotoneSdiv | LawId::DetPowerMeans => {
            put_spd_list(&mut w, t, &["A", "B"])?;
            put_exponents(&mut w, t);
        }
        LawId::PowerMonotoneRiem | LawId::LogMajorization => {
            // X = A^u and Y = B^u carry the condition target, so that no power
            // formed during evaluation is worse conditioned than the inputs.
            put_spd_list(&mut w, t, &["X", "Y"])?;
            put_exponents(&mut w, t);
        }
        LawId::BasicInvariances => {
            put_spd_list(&mut w, t, &["A", "B", "C"])?;
            let k = t.n.min(3);
            let kmat = random::sample_spd(&mut t.rng, k, t.cond.min(CONGRUENCE_COND))?;
            let x = random::sample_invertible(&mut t.rng, t.n, t.cond.min(CONGRUENCE_COND));
            w.put_spd("K", &kmat).put_matrix("X", &x);
        }
        LawId::ConvexityRegion => {
            let b = t.spd()?;
            let n = t.n;
            let boundary = 1.0 + std::f64::consts::SQRT_2;
            let convex_side = t.index.is_multiple_of(2);
            let spread = t.cond.sqrt();
            let (lo, hi) = if convex_side {
                (boundary / spread, boundary)
            } else {
                (boundary, boundary * spread)
            };
            let spectrum: Vec<f64> = (0..n)
                .map(|_| random::sample_log_uniform(&mut t.rng, lo, hi))
                .collect();
            let q = random::sample_orthogonal(&mut t.rng, n);
            let c = random::from_spectrum(&q, &spectrum)?;
            let l = cholesky(&b).into_l();
            let a = SpdMatrix::new(crate::pd::symmetrize(&l * c.as_matrix() * l.transpose()))?;
            w.put_spd("A", &a)
                .put_spd("B", &b)
                .put_scalar("side", if convex_side { 1.0 } else { -1.0 });
        }
        LawId::KronOrder => {
            let n = t.n;
            for name in ["B", "P", "D", "Q"] {
                let rank = t.index % (n + 1);
                let scale = t.positive();
                let m = random::sample_psd(&mut t.rng, n, rank.max(usize::from(name == "P" || name == "Q")), scale);
                w.put_matrix(name, &m);
            }
        }
        LawId::GmVariational => {
            put_spd_list(&mut w, t, &["A", "B"])?;
            let s = t.sub_seed();
            w.put_seed("directions", s);
        }
        LawId::SmeanGlobal => {
            let m = 3 + t.index % 4;
            let names: Vec<String> = (0..m).map(|i| format!("A{i}")).collect();
            for name in &names {
                let a = t.spd()?;
                w.put_spd(name, &a);
            }
            let raw: Vec<f64> = (0..m).map(|_| 0.1 + t.uniform()).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|r| r / total).collect();
            w.put_vector("w", weights);
            let s = t.sub_seed();
            w.put_seed("directions", s);
        }
    }
    Ok(w)
}

/// `1 ≤ t ≤ u` with `t − 1` from the unit grid and `u − t` uniform on `[0, 1]`.
fn put_exponents(w: &mut Witness, t: &mut Trial) {
    let lo = 1.0 + t.unit();
    let gap = t.uniform();
    w.put_scalar("t", lo).put_scalar("u", lo + gap);
}

fn put_spd_list(w: &mut Witness, t: &mut Trial, names: &[&str]) -> Result<()> {
    for name in names {
        let m = t.spd()?;
        w.put_spd(name, &m);
    }
    Ok(())
}

pub(super) fn evaluate(law: LawId, w: &Witness) -> Result<Vec<Check>> {
    match law {
        LawId::TriangleSdelta => triangle_sdelta(w),
        LawId::TriangleScalarP => triangle_scalar_p(w),
        LawId::DetBounds => det_bounds(w),
        LawId::EigSandwichSdelta => eig_sandwich(w),
        LawId::PowerContraction => power_contraction(w),
        LawId::GeodesicContraction => geodesic_contraction(w),
        LawId::Cancellation => cancellation(w),
        LawId::TranslationMonotoneConvex => translation_monotone_convex(w),
        LawId::TranslationCorollary => translation_corollary(w),
        LawId::PowerMonotoneRiem => power_monotone(w, false),
        LawId::PowerMonotoneSdiv => power_monotone(w, true),
        LawId::DetPowerMeans => det_power_means(w),
        LawId::LogMajorization => log_majorization(w),
        LawId::Sandwich => sandwich(w),
        LawId::RiemGeodesicExact => riem_geodesic_exact(w),
        LawId::RiemCancellation => riem_cancellation(w),
        LawId::BasicInvariances => basic_invariances(w),
        LawId::ConvexityRegion => convexity_region(w),
        LawId::KronOrder => kron_order(w),
        LawId::GmVariational => gm_variational(w),
        LawId::SmeanGlobal => smean_global(w),
    }
}

/// `S` between two positive vectors read as diagonal matrices.
fn s_diag(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| ((x + y) / 2.0).ln() - 0.5 * (x.ln() + y.ln()))
        .sum::<f64>()
        .max(0.0)
}

fn eigenvalues_desc(a: &SpdMatrix) -> Result<Vec<f64>> {
    Ok(sym_eig(a)?.eigenvalues.iter().copied().collect())
}

fn triangle_sdelta(w: &Witness) -> Result<Vec<Check>> {
    let (x, y, z) = (w.spd("X")?, w.spd("Y")?, w.spd("Z")?);
    let (xy, xz, yz) = (delta_s(&x, &y)?, delta_s(&x, &z)?, delta_s(&y, &z)?);
    Ok(vec![
        Check::leq("d(X,Y) <= d(X,Z) + d(Z,Y)", xy, xz + yz),
        Check::leq("d(X,Z) <= d(X,Y) + d(Y,Z)", xz, xy + yz),
        Check::leq("d(Y,Z) <= d(Y,X) + d(X,Z)", yz, xy + xz),
    ])
}

fn triangle_scalar_p(w: &Witness) -> Result<Vec<Check>> {
    let (x, y, z) = (w.vector("x")?, w.vector("y")?, w.vector("z")?);
    let p = w.scalar("p")?;
    let norm = |a: &[f64], b: &[f64]| -> Result<f64> {
        let mut s = 0.0;
        for (u, v) in a.iter().zip(b) {
            s += crate::divergences::scalar_delta_s(*u, *v)?.powf(p);
        }
        Ok(s.powf(1.0 / p))
    };
    Ok(vec![Check::leq(
        "minkowski d_p(x,y) <= d_p(x,z) + d_p(z,y)",
        norm(x, y)?,
        norm(x, z)? + norm(z, y)?,
    )])
}

fn det_bounds(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let (ea, eb) = (eigenvalues_desc(&a)?, eigenvalues_desc(&b)?);
    let n = ea.len();
    let lower: f64 = (0..n).map(|i| (ea[i] + eb[i]).ln()).sum();
    let upper: f64 = (0..n).map(|i| (ea[i] + eb[n - 1 - i]).ln()).sum();
    let mid = a.add(&b)?.log_det();
    Ok(vec![
        Check::leq("logdet lower bound", lower, mid),
        Check::leq("logdet upper bound", mid, upper),
    ])
}

fn eig_sandwich(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let (ea, eb) = (eigenvalues_desc(&a)?, eigenvalues_desc(&b)?);
    let eb_rev: Vec<f64> = eb.iter().rev().copied().collect();
    let lo = s_diag(&ea, &eb).sqrt();
    let hi = s_diag(&ea, &eb_rev).sqrt();
    let mid = delta_s(&a, &b)?;
    Ok(vec![
        Check::leq("d(Eig A, Eig B) <= d(A,B)", lo, mid),
        Check::leq("d(A,B) <= d(Eig A, rev Eig B)", mid, hi),
    ])
}

fn power_contraction(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let t = w.scalar("t")?;
    let powered = s_div(&a.powf(t)?, &b.powf(t)?)?;
    let scaled = t * s_div(&a, &b)?;
    Ok(vec![if t <= 1.0 {
        Check::leq("S(A^t,B^t) <= t S(A,B)", powered, scaled)
    } else {
        Check::leq("t S(A,B) <= S(A^t,B^t)", scaled, powered)
    }])
}

fn geodesic_contraction(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let t = w.scalar("t")?;
    let g = geodesic_point(&a, &b, t)?;
    Ok(vec![Check::leq(
        "S(A, A#tB) <= t S(A,B)",
        s_div(&a, &g)?,
        t * s_div(&a, &b)?,
    )])
}

fn cancellation(w: &Witness) -> Result<Vec<Check>> {
    let (a, b, c) = (w.spd("A")?, w.spd("B")?, w.spd("C")?);
    let t = w.scalar("t")?;
    let (gb, gc) = (geodesic_point(&a, &b, t)?, geodesic_point(&a, &c, t)?);
    Ok(vec![Check::leq(
        "S(A#tB, A#tC) <= t S(B,C)",
        s_div(&gb, &gc)?,
        t * s_div(&b, &c)?,
    )])
}

fn translated(m: &DMatrix<f64>, x: &SpdMatrix, y: &SpdMatrix) -> Result<f64> {
    s_div(&x.add_symmetric(m)?, &y.add_symmetric(m)?)
}

fn translation_monotone_convex(w: &Witness) -> Result<Vec<Check>> {
    let (x, y) = (w.spd("X")?, w.spd("Y")?);
    let a = w.matrix("A")?;
    let b = &a + w.matrix("P")?;
    let mid = (&a + &b) * 0.5;
    let (ga, gb, gm) = (translated(&a, &x, &y)?, translated(&b, &x, &y)?, translated(&mid, &x, &y)?);
    Ok(vec![
        Check::leq("g(B) <= g(A) for A <= B", gb, ga),
        Check::leq("g((A+B)/2) <= (g(A)+g(B))/2", gm, 0.5 * (ga + gb)),
    ])
}

fn translation_corollary(w: &Witness) -> Result<Vec<Check>> {
    let (a, x, y) = (w.spd("A")?, w.spd("X")?, w.spd("Y")?);
    let beta = sym_eig(&a)?.min();
    let n = a.dim();
    let shifted = translated(&(DMatrix::identity(n, n) * beta), &x, &y)?;
    Ok(vec![
        Check::leq("S(A+X,A+Y) <= S(bI+X,bI+Y)", translated(a.as_matrix(), &x, &y)?, shifted),
        Check::leq("S(bI+X,bI+Y) <= S(X,Y)", shifted, s_div(&x, &y)?),
    ])
}

fn exponents(w: &Witness) -> Result<(f64, f64)> {
    let (t, u) = (w.scalar("t")?, w.scalar("u")?);
    if !(1.0 <= t && t <= u) {
        return Err(Error::InvalidParameter(format!("need 1 <= t <= u, got t={t}, u={u}")));
    }
    Ok((t, u))
}

fn power_monotone(w: &Witness, sdiv: bool) -> Result<Vec<Check>> {
    let (t, u) = exponents(w)?;
    let check = if sdiv {
        let (a, b) = (w.spd("A")?, w.spd("B")?);
        let f = |p: f64| -> Result<f64> { Ok(s_div(&a.powf(p)?, &b.powf(p)?)? / p) };
        Check::leq("S(A^t,B^t)/t <= S(A^u,B^u)/u", f(t)?, f(u)?)
    } else {
        // A^p = X^{p/u}
        let (x, y) = (w.spd("X")?, w.spd("Y")?);
        let f = |p: f64| -> Result<f64> { Ok(riemannian(&x.powf(p / u)?, &y.powf(p / u)?)? / p) };
        Check::leq("dR(A^t,B^t)/t <= dR(A^u,B^u)/u", f(t)?, f(u)?)
    };
    Ok(vec![check])
}

/// `log λ(PQ)` given `P`, `P⁻¹` and `Q`, descending.
///
/// `λ(PQ)` is the spectrum of `M = LᵀPL` and its reciprocal that of `N = L⁻¹P⁻¹L⁻ᵀ`,
/// where `Q = LLᵀ`. Each eigenvalue is taken from whichever of `M` and `N` holds it as
/// the larger end of its spectrum, which keeps the relative error near `ε·√cond(M)`
/// instead of `ε·cond(M)`.
fn log_product_spectrum(p: &SpdMatrix, p_inv: &SpdMatrix, q: &SpdMatrix) -> Result<Vec<f64>> {
    let chol = cholesky(q);
    let l = chol.l();
    let m = crate::pd::symmetrize(l.transpose() * p.as_matrix() * l);
    let n = crate::pd::symmetrize(chol.whiten(p_inv.as_matrix()));
    let (em, en) = (symmetric_eigenvalues(&m)?, symmetric_eigenvalues(&n)?);
    if em.iter().chain(&en).any(|v| *v <= 0.0) {
        return Err(Error::NotPositiveDefinite { pivot: 0 });
    }
    // em descending; 1/en ascending pairs with em reversed
    let k = em.len();
    let split = 0.5 * (em[0].ln() - en[0].ln());
    Ok((0..k)
        .map(|i| {
            let from_m = em[i].ln();
            if from_m >= split {
                from_m
            } else {
                -en[k - 1 - i].ln()
            }
        })
        .collect())
}

fn det_power_means(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let (t, u) = exponents(w)?;
    let f = |p: f64| -> Result<f64> { Ok(a.powf(p)?.midpoint(&b.powf(p)?)?.log_det() / p) };
    Ok(vec![Check::leq(
        "logdet((A^t+B^t)/2)/t <= logdet((A^u+B^u)/2)/u",
        f(t)?,
        f(u)?,
    )])
}

fn log_majorization(w: &Witness) -> Result<Vec<Check>> {
    // P^s = X^{s/u}, Q^s = Y^{s/u}
    let (px, qy) = (w.spd("X")?, w.spd("Y")?);
    let (t, u) = exponents(w)?;
    let spectrum = |s: f64| -> Result<Vec<f64>> {
        let v = log_product_spectrum(&px.powf(s / u)?, &px.powf(-s / u)?, &qy.powf(s / u)?)?;
        Ok(v.into_iter().map(|x| x / s).collect())
    };
    let (x, y) = (spectrum(t)?, spectrum(u)?);
    let (px, py) = (prefix_sums(&x), prefix_sums(&y));
    let n = px.len();
    let mut checks = Vec::with_capacity(2 * n);
    for k in 0..n - 1 {
        checks.push(Check::leq("log-majorization prefix", px[k], py[k]));
    }
    checks.push(Check::equal("log-majorization total", px[n - 1], py[n - 1], IDENTITY_TOL));
    let abs = |v: &[f64]| -> Vec<f64> { v.iter().map(|e| e.abs()).collect() };
    let (ax, ay) = (prefix_sums(&abs(&x)), prefix_sums(&abs(&y)));
    for k in 0..n {
        checks.push(Check::leq("weak majorization of |log|", ax[k], ay[k]));
    }
    Ok(checks)
}

fn sandwich(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let u = log_relative_spectrum(&a, &b)?;
    let s = s_div(&a, &b)?;
    let dr2: f64 = u.iter().map(|v| v * v).sum();
    let dt = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let n = a.dim() as f64;
    Ok(vec![
        Check::leq("8S <= dR^2", 8.0 * s, dr2),
        Check::leq("dR^2 <= 2 dT (S + n log 2)", dr2, 2.0 * dt * (s + n * std::f64::consts::LN_2)),
    ])
}

fn riem_geodesic_exact(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let t = w.scalar("t")?;
    let g = geodesic_point(&a, &b, t)?;
    Ok(vec![Check::equal(
        "dR(A, A#tB) = t dR(A,B)",
        riemannian(&a, &g)?,
        t * riemannian(&a, &b)?,
        IDENTITY_TOL,
    )])
}

fn riem_cancellation(w: &Witness) -> Result<Vec<Check>> {
    let (a, b, c) = (w.spd("A")?, w.spd("B")?, w.spd("C")?);
    let t = w.scalar("t")?;
    let (gb, gc) = (geodesic_point(&a, &b, t)?, geodesic_point(&a, &c, t)?);
    Ok(vec![Check::leq(
        "dR(A#tB, A#tC) <= t dR(B,C)",
        riemannian(&gb, &gc)?,
        t * riemannian(&b, &c)?,
    )])
}

fn basic_invariances(w: &Witness) -> Result<Vec<Check>> {
    let (a, b, c, k) = (w.spd("A")?, w.spd("B")?, w.spd("C")?, w.spd("K")?);
    let x = w.matrix("X")?;
    let n = a.dim();
    let s_ab = s_div(&a, &b)?;
    let ones = vec![1.0; n];
    let eig_a = eigenvalues_desc(&a)?;
    let s_ia = s_div(&SpdMatrix::identity(n), &a)?;
    let congruent = s_div(&a.congruence(&x)?, &b.congruence(&x)?)?;
    let inverted = s_div(&a.inverse()?, &b.inverse()?)?;
    let kb = SpdMatrix::new(kron(k.as_matrix(), b.as_matrix())?)?;
    let kc = SpdMatrix::new(kron(k.as_matrix(), c.as_matrix())?)?;
    let tensor = s_div(&kb, &kc)?;
    Ok(vec![
        Check::equal("S(I,A) = S(I,Eig A)", s_ia, s_diag(&ones, &eig_a), INVARIANCE_TOL),
        Check::equal("S(X'AX, X'BX) = S(A,B)", congruent, s_ab, INVARIANCE_TOL),
        Check::equal("S(A^-1,B^-1) = S(A,B)", inverted, s_ab, INVARIANCE_TOL),
        Check::equal(
            "S(K(x)B, K(x)C) = k S(B,C)",
            tensor,
            k.dim() as f64 * s_div(&b, &c)?,
            INVARIANCE_TOL,
        ),
    ])
}

fn spectral_extremes(m: &DMatrix<f64>) -> Result<(f64, f64, f64)> {
    let ev = symmetric_eigenvalues(m)?;
    let max = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = max.abs().max(min.abs()).max(f64::MIN_POSITIVE);
    Ok((min, max, scale))
}

fn convexity_region(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let side = w.scalar("side")?;
    let h = s_div_hessian(&a, &b)?;
    let (min, max, scale) = spectral_extremes(&h)?;
    Ok(vec![if side > 0.0 {
        Check::leq("Hessian PSD for A <= (1+sqrt2)B", -min / scale, 0.0)
    } else {
        Check::leq("Hessian NSD for A >= (1+sqrt2)B", max / scale, 0.0)
    }])
}

fn kron_order(w: &Witness) -> Result<Vec<Check>> {
    let (b, d) = (w.matrix("B")?, w.matrix("D")?);
    let a = &b + w.matrix("P")?;
    let c = &d + w.matrix("Q")?;
    let diff = kron(&a, &c)? - kron(&b, &d)?;
    let (min, _, scale) = spectral_extremes(&crate::pd::symmetrize(diff))?;
    Ok(vec![Check::leq("A(x)C - B(x)D >= 0", -min / scale, 0.0)])
}

/// `X + ε X^{1/2} Δ X^{1/2}` for unit symmetric `Δ`, drawn from `seed`.
fn perturbations(x: &SpdMatrix, seed: u64) -> Result<Vec<SpdMatrix>> {
    let mut rng = seeded_rng(seed);
    let root = x.sqrt()?;
    let r = root.as_matrix();
    (0..PERTURBATION_DIRECTIONS)
        .map(|_| {
            let delta = random::sample_symmetric_unit(&mut rng, x.dim());
            x.add_symmetric(&(r * delta * r * PERTURBATION_STEP))
        })
        .collect()
}

fn gm_variational(w: &Witness) -> Result<Vec<Check>> {
    let (a, b) = (w.spd("A")?, w.spd("B")?);
    let g = geometric_mean(&a, &b)?;
    let h = |x: &SpdMatrix| -> Result<f64> { Ok(s_div(x, &a)? + s_div(x, &b)?) };
    let hg = h(&g)?;
    let mut checks = vec![
        Check::equal("dS(A,G) = dS(B,G)", delta_s(&a, &g)?, delta_s(&b, &g)?, IDENTITY_TOL),
        Check::equal("dR(A,G) = dR(B,G)", riemannian(&a, &g)?, riemannian(&b, &g)?, IDENTITY_TOL),
    ];
    for p in perturbations(&g, w.seed("directions")?)? {
        checks.push(Check::leq("h(G) <= h(G + eps dir)", hg, h(&p)? + PERTURBATION_SLACK));
    }
    Ok(checks)
}

fn smean_global(w: &Witness) -> Result<Vec<Check>> {
    let weights = w.vector("w")?.to_vec();
    let mats = (0..weights.len())
        .map(|i| w.spd(&format!("A{i}")))
        .collect::<Result<Vec<_>>>()?;
    let problem = MeanProblem::new(mats, weights)?;
    let config = SolverConfig {
        max_iters: SMEAN_MAX_ITERS,
        ..SolverConfig::default()
    };
    let report = s_mean(&problem, &config)?.into_converged()?;
    let x = report.mean;
    let hx = problem.objective(&x)?;
    let hess = s_mean_hessian_psd(&problem, &x)?;
    let scale = hess.max_eig.abs().max(hess.min_eig.abs()).max(f64::MIN_POSITIVE);
    let mut checks = vec![Check::leq("Hessian PD at S-mean", -hess.min_eig / scale, 0.0)];
    for p in perturbations(&x, w.seed("directions")?)? {
        checks.push(Check::leq("h(X*) <= h(X* + eps dir)", hx, problem.objective(&p)? + PERTURBATION_SLACK));
    }
    Ok(checks)
}
