//! Majorization orders on real vectors, stated on logarithms where products are involved.

fn sorted_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Prefix sums `Σ_{j≤k} x↓_j` for `k = 1..=n`.
pub fn prefix_sums(x: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    sorted_desc(x)
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Prefix-sum gaps `Σ_{j≤k} x↓_j − Σ_{j≤k} y↓_j` for `k = 1..=n`.
///
/// `x ≺_w y` holds exactly when every gap is `≤ 0`.
pub fn prefix_gaps(x: &[f64], y: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "majorization needs equal lengths");
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    let mut sx = 0.0;
    let mut sy = 0.0;
    xs.iter()
        .zip(&ys)
        .map(|(a, b)| {
            sx += a;
            sy += b;
            sx - sy
        })
        .collect()
}

/// Weak majorization `x ≺_w y`, with additive tolerance on each prefix sum.
pub fn weakly_majorized(x: &[f64], y: &[f64], tol: f64) -> bool {
    prefix_gaps(x, y).iter().all(|g| *g <= tol)
}

/// Weak log-majorization `x ≺_{w log} y` of positive vectors, given their logarithms.
pub fn weakly_log_majorized(log_x: &[f64], log_y: &[f64], tol: f64) -> bool {
    weakly_majorized(log_x, log_y, tol)
}

/// Log-majorization `x ≺_log y`: weak log-majorization plus equal total products.
pub fn log_majorized(log_x: &[f64], log_y: &[f64], tol: f64) -> bool {
    let gaps = prefix_gaps(log_x, log_y);
    gaps.iter().all(|g| *g <= tol) && gaps.last().is_none_or(|g| g.abs() <= tol)
}
