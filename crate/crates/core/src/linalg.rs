//! Small dense helpers shared by the two-qubit code paths.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Pauli matrices indexed 0..=3 as (I, X, Y, Z).
pub fn pauli(index: usize) -> Matrix2<C64> {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// Kronecker product of two single-qubit operators, first factor major.
pub fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub(crate) fn hermiticity_defect4(m: &Matrix4<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect2(m: &Matrix2<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Numerically robust `1 - e^{-y}` for y >= 0.
pub(crate) fn one_minus_exp_neg(y: f64) -> f64 {
    -(-y).exp_m1()
}
