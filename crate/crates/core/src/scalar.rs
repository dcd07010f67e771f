//! Closed-form scalar functions of the driven, damped atom-cavity solution.
//!
//! Everything downstream (joint state, entanglement, teleportation) is a
//! function of three numbers evaluated here: the coherent amplitude `alpha`,
//! the decoherence factor `f` and the overlap `x = <alpha|-alpha>`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::one_minus_exp_neg;

/// Below this value of `k t` the profile is evaluated from its series in
/// `k t`, which reduces exactly to the dissipation-free limit at `k = 0`.
pub const SMALL_KT_SWITCH: f64 = 1e-6;

/// Physical inputs: coupling `g`, cavity decay `k` and the Bloch angles of
/// the initial atomic state `cos(theta/2)|+> + e^{i phi} sin(theta/2)|->`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub g: f64,
    pub k: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SystemParams {
    pub fn new(g: f64, k: f64, theta: f64, phi: f64) -> Result<Self> {
        let params = Self { g, k, theta, phi };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(invalid("g", self.g, "coupling must be finite and > 0"));
        }
        if !(self.k.is_finite() && self.k >= 0.0) {
            return Err(invalid("k", self.k, "decay rate must be finite and >= 0"));
        }
        if !(self.theta.is_finite() && (0.0..=PI).contains(&self.theta)) {
            return Err(invalid("theta", self.theta, "must lie in [0, pi]"));
        }
        if !(self.phi.is_finite() && (0.0..TAU).contains(&self.phi)) {
            return Err(invalid("phi", self.phi, "must lie in [0, 2 pi)"));
        }
        Ok(())
    }

    /// `g / k`; infinite when the cavity is lossless.
    pub fn coupling_ratio(&self) -> f64 {
        self.g / self.k
    }

    /// Populations `(cos^2(theta/2), sin^2(theta/2))` of the initial atom.
    pub fn populations(&self) -> (f64, f64) {
        let c = (0.5 * self.theta).cos();
        let s = (0.5 * self.theta).sin();
        (c * c, s * s)
    }

    /// Initial atomic coherence `<+|rho_a(0)|-> = e^{-i phi} sin(theta) / 2`.
    pub fn initial_coherence(&self) -> Complex64 {
        Complex64::from_polar(0.5 * self.theta.sin(), -self.phi)
    }
}

fn invalid(name: &'static str, value: f64, why: &str) -> Error {
    Error::InvalidParameter {
        name,
        reason: format!("{value} ({why})"),
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTime(t))
    }
}

/// The triple `(alpha(t), f(t), x(t))` plus the logarithms used to keep
/// ratios such as `f / x` accurate when `f` underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarProfile {
    /// Coherent amplitude; purely imaginary with non-negative imaginary part.
    pub alpha: Complex64,
    pub f: f64,
    pub x: f64,
    pub ln_f: f64,
    pub ln_x: f64,
    /// `1 - x^2`, evaluated without cancellation.
    pub one_minus_x_sq: f64,
}

impl ScalarProfile {
    fn from_parts(amplitude: f64, ln_f: f64) -> Self {
        let ln_x = -2.0 * amplitude * amplitude;
        Self {
            alpha: Complex64::new(0.0, amplitude),
            f: ln_f.exp(),
            x: ln_x.exp(),
            ln_f,
            ln_x,
            one_minus_x_sq: one_minus_exp_neg(-2.0 * ln_x),
        }
    }

    /// `|alpha|`.
    pub fn amplitude(&self) -> f64 {
        self.alpha.im
    }

    /// `f / x`, which equals `f e^{2|alpha|^2}`.
    pub fn f_over_x(&self) -> f64 {
        (self.ln_f - self.ln_x).exp()
    }

    /// `sqrt(1 - x^2) / x`.
    pub fn gram_ratio(&self) -> f64 {
        self.one_minus_x_sq.sqrt() * (-self.ln_x).exp()
    }

    /// `f sqrt(1 - x^2) / x`, the weight that carries every coherence of the
    /// joint state in the field-qubit basis.
    pub fn coherence_weight(&self) -> f64 {
        self.one_minus_x_sq.sqrt() * self.f_over_x()
    }
}

/// Evaluates `alpha(t)`, `f(t)` and `x(t)` for the given parameters.
///
/// For `k t >= SMALL_KT_SWITCH` the closed forms are used directly with
/// `1 - e^{-kt/2}` computed through `expm1`. Below the switch (including the
/// lossless cavity) the series
/// `alpha = i (g t / 2)(1 - y/2 + y^2/6)` and
/// `ln f = -(g t)^2 / 2 (1 - y/3 + y^2/12)` with `y = k t / 2` are used; they
/// never divide by `k`.
pub fn scalar_profile(params: &SystemParams, t: f64) -> Result<ScalarProfile> {
    params.validate()?;
    check_time(t)?;
    let y = 0.5 * params.k * t;
    let profile = if params.k * t < SMALL_KT_SWITCH {
        let half_gt = 0.5 * params.g * t;
        let amplitude = half_gt * (1.0 - y / 2.0 + y * y / 6.0);
        let ln_f = -2.0 * half_gt * half_gt * (1.0 - y / 3.0 + y * y / 12.0);
        ScalarProfile::from_parts(amplitude, ln_f)
    } else {
        let ratio = params.coupling_ratio();
        let one_minus_u = one_minus_exp_neg(y);
        let amplitude = ratio * one_minus_u;
        let ln_f = 4.0 * ratio * ratio * (one_minus_u - y);
        ScalarProfile::from_parts(amplitude, ln_f)
    };
    Ok(profile)
}

/// Field block of the atomic decomposition `rho = sum_ij rho_ij |i><j|`,
/// with `1 = |+>` and `2 = |->`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldBlock {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

impl FieldBlock {
    pub const ALL: [FieldBlock; 4] = [
        FieldBlock::PlusPlus,
        FieldBlock::PlusMinus,
        FieldBlock::MinusPlus,
        FieldBlock::MinusMinus,
    ];

    /// Builds a block from a one-based index pair `(i, j)`.
    pub fn from_indices(i: usize, j: usize) -> Result<Self> {
        match (i, j) {
            (1, 1) => Ok(FieldBlock::PlusPlus),
            (1, 2) => Ok(FieldBlock::PlusMinus),
            (2, 1) => Ok(FieldBlock::MinusPlus),
            (2, 2) => Ok(FieldBlock::MinusMinus),
            _ => Err(Error::InvalidBlock(i, j)),
        }
    }

    /// Zero-based atomic indices `(row, column)`.
    pub fn atom_indices(self) -> (usize, usize) {
        match self {
            FieldBlock::PlusPlus => (0, 0),
            FieldBlock::PlusMinus => (0, 1),
            FieldBlock::MinusPlus => (1, 0),
            FieldBlock::MinusMinus => (1, 1),
        }
    }
}

/// Phase-space characteristic function `chi_ij(beta, t) = Tr[rho_ij D(beta)]`
/// of the field block `(i, j)` (one-based).
///
/// `chi_21(beta)` is returned as `conj(chi_12(-beta))`, the identity implied
/// by `rho_21 = rho_12^dagger` and `D(beta)^dagger = D(-beta)`.
pub fn characteristic_function(
    params: &SystemParams,
    t: f64,
    beta: Complex64,
    block: (usize, usize),
) -> Result<Complex64> {
    let block = FieldBlock::from_indices(block.0, block.1)?;
    let profile = scalar_profile(params, t)?;
    Ok(characteristic_of_block(params, &profile, beta, block))
}

pub(crate) fn characteristic_of_block(
    params: &SystemParams,
    profile: &ScalarProfile,
    beta: Complex64,
    block: FieldBlock,
) -> Complex64 {
    let alpha = profile.alpha;
    let gauss = -0.5 * beta.norm_sqr();
    // alpha^* beta and alpha beta^*
    let ab = alpha.conj() * beta;
    let ba = alpha * beta.conj();
    let (pop_plus, pop_minus) = params.populations();
    let half_sin = 0.5 * params.theta.sin();
    match block {
        FieldBlock::PlusPlus => pop_plus * (gauss - ab + ba).exp(),
        FieldBlock::MinusMinus => pop_minus * (gauss + ab - ba).exp(),
        FieldBlock::PlusMinus => {
            half_sin * (profile.ln_f + gauss + ab + ba + Complex64::new(0.0, -params.phi)).exp()
        }
        FieldBlock::MinusPlus => {
            half_sin * (profile.ln_f + gauss - ab - ba + Complex64::new(0.0, params.phi)).exp()
        }
    }
}
