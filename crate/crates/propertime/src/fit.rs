//! Least-squares slope estimation for convergence and scaling studies.

/// Least-squares fit of `ln y` against `ln x`.
///
/// Returns `(slope, r_squared)`. All inputs must be strictly positive and
/// at least two points are required.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len(), "mismatched sample lengths");
    assert!(x.len() >= 2, "need at least two points for a slope");
    assert!(
        x.iter().chain(y.iter()).all(|&v| v > 0.0 && v.is_finite()),
        "log-log fit requires positive finite data"
    );

    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for k in 0..x.len() {
        let dx = lx[k] - mx;
        let dy = ly[k] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    assert!(sxx > 0.0, "degenerate abscissae in slope fit");

    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}
