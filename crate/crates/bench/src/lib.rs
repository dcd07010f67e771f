//! Shared inputs for the benchmarks.

use std::f64::consts::FRAC_PI_2;

use jclab_core::SystemParams;

/// `g = k = 1`, `theta = pi/2`, `phi = 0`.
pub fn unit_params() -> SystemParams {
    SystemParams::new(1.0, 1.0, FRAC_PI_2, 0.0).expect("valid parameters")
}

/// `n` evenly spaced `kt` values in `[0, 6]`.
pub fn kt_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 6.0 * i as f64 / (n - 1) as f64).collect()
}
