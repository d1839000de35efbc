//! Small numerical helpers with pinned, deterministic behavior.

use num_complex::Complex64;

/// e^{iφ}.
pub fn cis(phi: f64) -> Complex64 {
    let (s, c) = phi.sin_cos();
    Complex64::new(c, s)
}

/// Composite trapezoidal rule on an arbitrary strictly increasing grid.
/// Summation order is fixed (left to right) so results are reproducible
/// independent of caller parallelism.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    acc
}

/// sin(x)/x with the removable singularity handled.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}
