//! Three-point derivative weights on possibly nonuniform abscissae.

/// Derivative at `x[1]` of the parabola through three points.
pub(crate) fn centered(x: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = x[1] - x[0];
    let h2 = x[2] - x[1];
    -h2 / (h1 * (h1 + h2)) * f[0] + (h2 - h1) / (h1 * h2) * f[1] + h1 / (h2 * (h1 + h2)) * f[2]
}

/// Derivative at `x[0]` of the parabola through three points.
pub(crate) fn forward(x: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = x[1] - x[0];
    let h2 = x[2] - x[1];
    -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1]
        - h1 / (h2 * (h1 + h2)) * f[2]
}

/// Derivative at `x[2]` of the parabola through three points.
pub(crate) fn backward(x: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = x[1] - x[0];
    let h2 = x[2] - x[1];
    h2 / (h1 * (h1 + h2)) * f[0] - (h1 + h2) / (h1 * h2) * f[1]
        + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * f[2]
}

/// Second-order derivative of samples `f` over strictly increasing `x`.
/// Two samples fall back to the chord slope.
pub(crate) fn differentiate(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    debug_assert_eq!(n, f.len());
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        2 => {
            let slope = (f[1] - f[0]) / (x[1] - x[0]);
            vec![slope, slope]
        }
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    forward([x[0], x[1], x[2]], [f[0], f[1], f[2]])
                } else if i == n - 1 {
                    backward([x[n - 3], x[n - 2], x[n - 1]], [f[n - 3], f[n - 2], f[n - 1]])
                } else {
                    centered([x[i - 1], x[i], x[i + 1]], [f[i - 1], f[i], f[i + 1]])
                }
            })
            .collect(),
    }
}
