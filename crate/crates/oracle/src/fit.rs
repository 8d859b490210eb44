//! Convergence-order fitting and finite differences.

/// Least-squares slope of `ln e` against `ln h`: the observed order of
/// accuracy of a refinement study.
pub fn fit_order(h: &[f64], e: &[f64]) -> f64 {
    assert_eq!(h.len(), e.len());
    assert!(h.len() >= 2);
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    num / den
}

/// Richardson-extrapolated central difference of a scalar function.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-4 * (1.0 + x.abs());
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d1 = d(h);
    let d2 = d(h / 2.0);
    (4.0 * d2 - d1) / 3.0
}
