mod common;

use common::spd;
use nalgebra::DMatrix;
use spdkit::divergences::{
    bregman, delta_s, jensen_div, log_euclidean, riemannian, s_div, s_div_grad, s_div_hessian, thompson,
    DivergenceKind, Generator,
};
use spdkit::pd::{kron, random, seeded_rng, sym_eig};
use spdkit::SpdMatrix;

fn pair(i: usize, max_n: usize) -> (SpdMatrix, SpdMatrix) {
    let n = 1 + i % max_n;
    let cond = if i.is_multiple_of(2) { 10.0 } else { 100.0 };
    (spd(n, 2 * i as u64, cond), spd(n, 2 * i as u64 + 1, cond))
}

/// Symmetric unit directions `e_i e_jᵀ + e_j e_iᵀ` (or `e_i e_iᵀ`) with their index pair.
fn sym_basis(n: usize) -> Vec<(usize, usize, DMatrix<f64>)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut e = DMatrix::zeros(n, n);
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            out.push((i, j, e));
        }
    }
    out
}

fn shifted(x: &SpdMatrix, e: &DMatrix<f64>, h: f64) -> SpdMatrix {
    x.add_symmetric(&(e * h)).unwrap()
}

#[test]
fn s_div_matches_relative_spectrum_oracle() {
    for i in 0..300 {
        let (x, y) = pair(i, 10);
        let oracle = common::s_div(x.as_matrix(), y.as_matrix());
        let got = s_div(&x, &y).unwrap();
        assert!((got - oracle).abs() <= 1e-10 * oracle.max(1.0), "pair {i}: {got} vs {oracle}");
        let r = common::riemannian(x.as_matrix(), y.as_matrix());
        assert!((riemannian(&x, &y).unwrap() - r).abs() <= 1e-9 * r.max(1.0));
    }
}

#[test]
fn gradient_matches_central_differences() {
    for i in 0..100 {
        let (x, y) = pair(i, 5);
        let g = s_div_grad(&x, &y).unwrap();
        let h = 1e-5 * x.frobenius_norm();
        let mut fd = DMatrix::zeros(x.dim(), x.dim());
        for (r, c, e) in sym_basis(x.dim()) {
            let d = (s_div(&shifted(&x, &e, h), &y).unwrap() - s_div(&shifted(&x, &e, -h), &y).unwrap()) / (2.0 * h);
            let d = if r == c { d } else { d / 2.0 };
            fd[(r, c)] = d;
            fd[(c, r)] = d;
        }
        let rel = (&fd - &g).norm() / g.norm();
        assert!(rel <= 1e-5, "pair {i}: relative error {rel:e}");
    }
}

#[test]
fn hessian_matches_central_differences() {
    for i in 0..100 {
        let (a, b) = pair(i, 5);
        let n = a.dim();
        let hess = s_div_hessian(&a, &b).unwrap();
        let h = 1e-5 * a.frobenius_norm();
        let basis = sym_basis(n);
        let mut exact = DMatrix::zeros(n * n, basis.len());
        let mut fd = DMatrix::zeros(n * n, basis.len());
        for (k, (_, _, e)) in basis.iter().enumerate() {
            let ve = DMatrix::from_column_slice(n * n, 1, e.as_slice());
            exact.set_column(k, &(&hess * ve).column(0));
            let dg = (s_div_grad(&shifted(&a, e, h), &b).unwrap() - s_div_grad(&shifted(&a, e, -h), &b).unwrap())
                / (2.0 * h);
            fd.set_column(k, &DMatrix::from_column_slice(n * n, 1, dg.as_slice()).column(0));
        }
        let rel = (&fd - &exact).norm() / exact.norm();
        assert!(rel <= 1e-4, "pair {i}: relative error {rel:e}");
    }
}

#[test]
fn lemma_invariances() {
    let mut rng = seeded_rng(9);
    for i in 0..200 {
        let (a, b) = pair(i, 6);
        let n = a.dim();
        let s = s_div(&a, &b).unwrap();
        let tol = 1e-9 * s.max(1.0);

        let eig = sym_eig(&a).unwrap();
        let diag = SpdMatrix::from_diagonal(eig.eigenvalues.as_slice()).unwrap();
        let id = SpdMatrix::identity(n);
        assert!((s_div(&id, &a).unwrap() - s_div(&id, &diag).unwrap()).abs() <= 1e-10);

        let x = random::sample_invertible(&mut rng, n, 10.0);
        let moved = s_div(&a.congruence(&x).unwrap(), &b.congruence(&x).unwrap()).unwrap();
        assert!((moved - s).abs() <= tol, "congruence {i}");

        let inv = s_div(&a.inverse().unwrap(), &b.inverse().unwrap()).unwrap();
        assert!((inv - s).abs() <= tol, "inversion {i}");

        if n <= 3 {
            let k = spd(n, 500 + i as u64, 10.0);
            let c = spd(n, 900 + i as u64, 10.0);
            let kb = SpdMatrix::new(kron(k.as_matrix(), b.as_matrix()).unwrap()).unwrap();
            let kc = SpdMatrix::new(kron(k.as_matrix(), c.as_matrix()).unwrap()).unwrap();
            let lhs = s_div(&kb, &kc).unwrap();
            let rhs = n as f64 * s_div(&b, &c).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0), "kron {i}");
        }
    }
}

#[test]
fn symmetric_tags_are_symmetric() {
    let tags = [
        DivergenceKind::Sdiv,
        DivergenceKind::Sdelta,
        DivergenceKind::Riemannian,
        DivergenceKind::Logeuclid,
        DivergenceKind::Thompson,
    ];
    for i in 0..100 {
        let (x, y) = pair(i, 8);
        for tag in tags {
            assert!(tag.is_symmetric());
            let (xy, yx) = (tag.eval(&x, &y).unwrap(), tag.eval(&y, &x).unwrap());
            assert!((xy - yx).abs() <= 1e-12 * xy.max(1.0), "{tag} pair {i}");
        }
    }
}

#[test]
fn distances_vanish_on_the_diagonal() {
    for i in 0..50 {
        let x = pair(i, 8).0;
        assert!(s_div(&x, &x).unwrap().abs() <= 1e-12);
        assert!(delta_s(&x, &x).unwrap() <= 1e-6);
        assert!(riemannian(&x, &x).unwrap() <= 1e-10);
        assert!(log_euclidean(&x, &x).unwrap() <= 1e-10);
        assert!(thompson(&x, &x).unwrap() <= 1e-10);
    }
}

#[test]
fn s_div_is_jensen_logdet() {
    for i in 0..100 {
        let (x, y) = pair(i, 6);
        let j = jensen_div(Generator::NegLog, x.as_matrix(), y.as_matrix()).unwrap();
        let s = s_div(&x, &y).unwrap();
        assert!((j - s).abs() <= 1e-10 * s.max(1.0), "pair {i}");
    }
}

#[test]
fn midpoint_minimizes_summed_logdet_divergence() {
    let mut rng = seeded_rng(21);
    for i in 0..50 {
        let (x, y) = pair(i, 5);
        let z = x.midpoint(&y).unwrap();
        let cost = |z: &DMatrix<f64>| {
            bregman(Generator::NegLog, x.as_matrix(), z).unwrap() + bregman(Generator::NegLog, y.as_matrix(), z).unwrap()
        };
        let best = cost(z.as_matrix());
        for _ in 0..20 {
            let delta = random::sample_symmetric_unit(&mut rng, x.dim());
            let moved = z.as_matrix() + delta * 1e-3;
            assert!(best <= cost(&moved) + 1e-12, "pair {i}");
        }
    }
}
