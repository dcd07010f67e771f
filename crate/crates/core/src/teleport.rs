//! The atom-field state as a teleportation resource.
//!
//! The one-qubit standard protocol acts as a generalized depolarizing channel
//! `rho -> sum_i p_i s_i rho s_i`; the two-qubit protocol runs two independent
//! Bell measurements over two copies of the resource with weights `p_i p_j`.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::error::{Error, Result};
use crate::linalg::{kron2, pauli, C64, ZERO};
use crate::metrics::concurrence_unchecked;
use crate::scalar::{scalar_profile, SystemParams};
use crate::state::{joint_state_from_profile, PhysicalTolerance, QubitDensity, TwoQubitState};

/// Best fidelity of a purely classical one-qubit channel.
pub const CLASSICAL_FIDELITY_ONE_QUBIT: f64 = 2.0 / 3.0;
/// Best fidelity of a purely classical two-qubit channel.
pub const CLASSICAL_FIDELITY_TWO_QUBIT: f64 = 2.0 / 5.0;

/// Bloch angles of a pure input `cos(vartheta/2)|0> + e^{i varphi} sin(vartheta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    pub vartheta: f64,
    pub varphi: f64,
}

impl BlochAngles {
    pub fn new(vartheta: f64, varphi: f64) -> Result<Self> {
        if !(vartheta.is_finite() && (0.0..=PI).contains(&vartheta)) {
            return Err(Error::OutOfRange {
                what: "vartheta",
                value: vartheta,
            });
        }
        if !(varphi.is_finite() && (0.0..TAU).contains(&varphi)) {
            return Err(Error::OutOfRange {
                what: "varphi",
                value: varphi,
            });
        }
        Ok(Self { vartheta, varphi })
    }

    /// `(cos(vartheta/2), e^{i varphi} sin(vartheta/2))`.
    pub fn amplitudes(&self) -> [C64; 2] {
        [
            C64::from((0.5 * self.vartheta).cos()),
            C64::from_polar((0.5 * self.vartheta).sin(), self.varphi),
        ]
    }

    pub fn density(&self) -> QubitDensity {
        QubitDensity::from_bloch(self.vartheta, self.varphi)
    }

    /// The two-qubit input `cos(vartheta/2)|+-> + e^{i varphi} sin(vartheta/2)|-+>`.
    pub fn two_qubit_vector(&self) -> Vector4<C64> {
        let [a, b] = self.amplitudes();
        Vector4::new(ZERO, a, b, ZERO)
    }
}

/// The resource's Bell basis over `{|+>, |->} (x) {v1, v2}`:
/// `(|+v2> + |-v1>)`, `(|+v1> + |-v2>)`, `(|+v1> - |-v2>)`, `(|+v2> - |-v1>)`,
/// each over `sqrt(2)`. State `i` is `(s_i (x) I)` applied to state 0.
pub fn bell_basis() -> [Vector4<C64>; 4] {
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    [
        Vector4::new(ZERO, s, s, ZERO),
        Vector4::new(s, ZERO, ZERO, s),
        Vector4::new(s, ZERO, ZERO, -s),
        Vector4::new(ZERO, s, -s, ZERO),
    ]
}

/// Weights of the four Bell projectors on the channel state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelProbabilities {
    pub p: [f64; 4],
    /// Set when `p0` is not the largest weight, i.e. the fixed basis is not
    /// the optimal local frame for this channel.
    pub p0_not_maximal: bool,
}

impl ChannelProbabilities {
    pub fn from_weights(p: [f64; 4]) -> Self {
        let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            p,
            p0_not_maximal: p[0] < max,
        }
    }

    pub fn max(&self) -> f64 {
        self.p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// `p_i = <Psi_i|rho|Psi_i>` in the fixed Bell basis.
pub fn channel_probabilities(channel: &TwoQubitState) -> Result<ChannelProbabilities> {
    channel.check_physical(&PhysicalTolerance::STRICT)?;
    let m = channel.matrix();
    let p = bell_basis().map(|psi| (psi.adjoint() * m * psi)[0].re);
    Ok(ChannelProbabilities::from_weights(p))
}

/// `p_ij` obtained by projecting two copies of the channel onto products of
/// Bell states. Qubit order of the copy is `(A1, B1, A2, B2)`.
pub fn pair_probabilities(channel: &TwoQubitState) -> Result<[[f64; 4]; 4]> {
    channel.check_physical(&PhysicalTolerance::STRICT)?;
    let m = channel.matrix();
    let doubled = SMatrix::<C64, 16, 16>::from_fn(|r, c| m[(r / 4, c / 4)] * m[(r % 4, c % 4)]);
    let basis = bell_basis();
    let mut out = [[0.0; 4]; 4];
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let v = SVector::<C64, 16>::from_fn(|r, _| bi[r / 4] * bj[r % 4]);
            out[i][j] = (v.adjoint() * doubled * v)[0].re;
        }
    }
    Ok(out)
}

/// Output of the standard one-qubit protocol: `sum_i p_i s_i rho_in s_i`.
pub fn teleport_one_qubit(channel: &TwoQubitState, input: &BlochAngles) -> Result<QubitDensity> {
    let probs = channel_probabilities(channel)?;
    Ok(depolarize(&probs, &input.density()))
}

pub fn depolarize(probs: &ChannelProbabilities, input: &QubitDensity) -> QubitDensity {
    let rho = input.matrix();
    let mut out = Matrix2::<C64>::zeros();
    for (i, &p) in probs.p.iter().enumerate() {
        let s = pauli(i);
        out += (s * rho * s) * C64::from(p);
    }
    QubitDensity::from_matrix_unchecked(out)
}

/// `<psi_in|rho_out|psi_in>` for a pure single-qubit input.
pub fn fidelity(input: &BlochAngles, output: &QubitDensity) -> f64 {
    let [a, b] = input.amplitudes();
    let psi = nalgebra::Vector2::new(a, b);
    (psi.adjoint() * output.matrix() * psi)[0].re
}

/// `(p0 + p3) + (p1 - p3) sin^2(vartheta)`, valid when `p1 = p2`.
pub fn fidelity_formula(probs: &ChannelProbabilities, input: &BlochAngles) -> f64 {
    let [p0, p1, _, p3] = probs.p;
    (p0 + p3) + (p1 - p3) * input.vartheta.sin().powi(2)
}

/// Bloch-sphere average of the one-qubit fidelity, `p0 + (p1 + p2 + p3)/3`.
/// Equals `(p0 + p3) + 2(p1 - p3)/3` when `p1 = p2`.
pub fn average_fidelity_p0(probs: &ChannelProbabilities) -> f64 {
    let [p0, p1, p2, p3] = probs.p;
    p0 + (p1 + p2 + p3) / 3.0
}

/// `2/3 + (f sqrt(1-x^2)/x sin(theta) cos(phi) - x^2 cos^2(theta/2)) / 3`.
pub fn average_fidelity_p0_closed_form(params: &SystemParams, t: f64) -> Result<f64> {
    let p = scalar_profile(params, t)?;
    let (pop_plus, _) = params.populations();
    let drive = p.coherence_weight() * params.theta.sin() * params.phi.cos();
    Ok(2.0 / 3.0 + (drive - p.x * p.x * pop_plus) / 3.0)
}

/// Sample mean and standard error of the one-qubit fidelity over
/// `samples` Haar-random pure inputs.
pub fn monte_carlo_average_fidelity(
    probs: &ChannelProbabilities,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::OutOfRange {
            what: "sample count",
            value: samples as f64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let [x, y, z]: [f64; 3] = UnitSphere.sample(&mut rng);
            let vartheta = z.clamp(-1.0, 1.0).acos();
            let varphi = y.atan2(x).rem_euclid(TAU) % TAU;
            let input = BlochAngles { vartheta, varphi };
            fidelity(&input, &depolarize(probs, &input.density()))
        })
        .collect();
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Optimal teleportation fidelity `(f_max d + 1)/(d + 1)` from the maximal
/// singlet fraction of a `d x d` resource.
pub fn optimal_fidelity(singlet_fraction: f64, dimension: usize) -> Result<f64> {
    if !(singlet_fraction.is_finite() && (0.0..=1.0).contains(&singlet_fraction)) {
        return Err(Error::OutOfRange {
            what: "singlet fraction",
            value: singlet_fraction,
        });
    }
    if dimension < 2 {
        return Err(Error::OutOfRange {
            what: "local dimension",
            value: dimension as f64,
        });
    }
    let d = dimension as f64;
    Ok((singlet_fraction * d + 1.0) / (d + 1.0))
}

/// Closed-form channel weights in terms of `x`, `f` and the atom angles.
pub fn channel_probabilities_closed_form(params: &SystemParams, t: f64) -> Result<[f64; 4]> {
    let p = scalar_profile(params, t)?;
    let (pop_plus, _) = params.populations();
    let drive = p.coherence_weight() * params.theta.sin() * params.phi.cos();
    let base = 1.0 - p.x * p.x * pop_plus;
    let p1 = 0.5 * p.x * p.x * pop_plus;
    Ok([0.5 * (base + drive), p1, p1, 0.5 * (base - drive)])
}

/// Output of the two-qubit protocol `sum_ij p_i p_j (s_i (x) s_j) rho_in (s_i (x) s_j)`
/// for the input `cos(vartheta/2)|+-> + e^{i varphi} sin(vartheta/2)|-+>`.
pub fn teleport_two_qubit(channel: &TwoQubitState, input: &BlochAngles) -> Result<TwoQubitState> {
    let probs = channel_probabilities(channel)?;
    Ok(two_qubit_channel(&probs, &TwoQubitState::pure(&input.two_qubit_vector())))
}

pub fn two_qubit_channel(probs: &ChannelProbabilities, input: &TwoQubitState) -> TwoQubitState {
    let rho = input.matrix();
    let mut out = Matrix4::<C64>::zeros();
    for (i, &pi) in probs.p.iter().enumerate() {
        for (j, &pj) in probs.p.iter().enumerate() {
            let s = kron2(&pauli(i), &pauli(j));
            out += (s * rho * s) * C64::from(pi * pj);
        }
    }
    TwoQubitState::from_matrix_unchecked(out)
}

/// `max(0, (p0 - p3)^2 sin(vartheta) - 4 (p0 + p3) p1)`.
pub fn output_concurrence_p1(probs: &ChannelProbabilities, input: &BlochAngles) -> f64 {
    let [p0, p1, _, p3] = probs.p;
    ((p0 - p3).powi(2) * input.vartheta.sin() - 4.0 * (p0 + p3) * p1).max(0.0)
}

/// The same quantity written through `x`, `f`, `theta`, `phi`:
/// `(1-x^2) f^2/x^2 sin^2(theta) cos^2(phi) sin(vartheta) - 2 x^2 (1 - x^2 cos^2(theta/2)) cos^2(theta/2)`.
pub fn output_concurrence_p1_closed_form(
    params: &SystemParams,
    t: f64,
    input: &BlochAngles,
) -> Result<f64> {
    let p = scalar_profile(params, t)?;
    let (pop_plus, _) = params.populations();
    let drive = p.coherence_weight() * params.theta.sin() * params.phi.cos();
    let x2c2 = p.x * p.x * pop_plus;
    Ok((drive * drive * input.vartheta.sin() - 2.0 * x2c2 * (1.0 - x2c2)).max(0.0))
}

/// `<psi_in|rho_out|psi_in> = (p0 + p3)^2 + 2 (p1^2 - p0 p3) sin^2(vartheta)`.
pub fn two_qubit_fidelity_formula(probs: &ChannelProbabilities, input: &BlochAngles) -> f64 {
    let [p0, p1, _, p3] = probs.p;
    (p0 + p3).powi(2) + 2.0 * (p1 * p1 - p0 * p3) * input.vartheta.sin().powi(2)
}

/// Fidelity of a two-qubit output with a pure input.
pub fn two_qubit_fidelity(input: &BlochAngles, output: &TwoQubitState) -> f64 {
    let psi = input.two_qubit_vector();
    (psi.adjoint() * output.matrix() * psi)[0].re
}

/// Fixed-frame two-qubit fidelity written through `x`, `f`, `theta`, `phi`;
/// identical to `(4 p0^2 + 1)/5`.
pub fn average_fidelity_p1_closed_form(params: &SystemParams, t: f64) -> Result<f64> {
    let p = scalar_profile(params, t)?;
    let (pop_plus, _) = params.populations();
    let drive = p.coherence_weight() * params.theta.sin() * params.phi.cos();
    let x2c2 = p.x * p.x * pop_plus;
    Ok(0.4 + 0.2 * (drive * drive + x2c2 * x2c2 + 2.0 * (1.0 - x2c2) * drive - 2.0 * x2c2))
}

/// Which protocol produced a report.
#[derive(Debug, Clone, PartialEq)]
pub enum TeleportedState {
    OneQubit(QubitDensity),
    TwoQubit(TwoQubitState),
}

/// Figures of merit for teleporting one input through the joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportationReport {
    pub probabilities: ChannelProbabilities,
    pub output: TeleportedState,
    /// Fidelity of this particular input.
    pub fidelity: f64,
    /// Input-averaged fidelity in the fixed Bell frame (`p0`-based).
    pub average_fidelity: f64,
    /// Horodecki optimum, fed with `max_i p_i` (or its square for two qubits).
    pub optimal_fidelity: f64,
    /// Two-qubit protocol only.
    pub output_concurrence: Option<f64>,
}

impl TeleportationReport {
    /// True when the input-averaged fidelity differs from the optimum, which
    /// happens when `p0` is not the largest weight.
    pub fn frame_is_suboptimal(&self) -> bool {
        self.probabilities.p0_not_maximal
    }
}

fn channel_at(params: &SystemParams, t: f64) -> Result<(TwoQubitState, ChannelProbabilities)> {
    let profile = scalar_profile(params, t)?;
    let channel = joint_state_from_profile(params, &profile);
    let probs = channel_probabilities(&channel)?;
    Ok((channel, probs))
}

/// Standard protocol through the joint state at time `t`.
pub fn one_qubit_report(
    params: &SystemParams,
    t: f64,
    input: &BlochAngles,
) -> Result<TeleportationReport> {
    let (_, probs) = channel_at(params, t)?;
    let output = depolarize(&probs, &input.density());
    Ok(TeleportationReport {
        fidelity: fidelity(input, &output),
        average_fidelity: average_fidelity_p0(&probs),
        optimal_fidelity: optimal_fidelity(probs.max().clamp(0.0, 1.0), 2)?,
        probabilities: probs,
        output: TeleportedState::OneQubit(output),
        output_concurrence: None,
    })
}

/// Two-qubit protocol over two copies of the joint state at time `t`.
pub fn two_qubit_report(
    params: &SystemParams,
    t: f64,
    input: &BlochAngles,
) -> Result<TeleportationReport> {
    let (_, probs) = channel_at(params, t)?;
    let output = two_qubit_channel(&probs, &TwoQubitState::pure(&input.two_qubit_vector()));
    let p0 = probs.p[0].clamp(0.0, 1.0);
    let best = probs.max().clamp(0.0, 1.0);
    Ok(TeleportationReport {
        fidelity: two_qubit_fidelity(input, &output),
        average_fidelity: optimal_fidelity(p0 * p0, 4)?,
        optimal_fidelity: optimal_fidelity(best * best, 4)?,
        output_concurrence: Some(output_concurrence_p1(&probs, input)),
        probabilities: probs,
        output: TeleportedState::TwoQubit(output),
    })
}

/// Wootters concurrence of a two-qubit protocol output.
pub fn output_concurrence_wootters(report: &TeleportationReport) -> Option<f64> {
    match &report.output {
        TeleportedState::TwoQubit(state) => Some(concurrence_unchecked(state)),
        TeleportedState::OneQubit(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{concurrence, phi_plus};
    use crate::state::joint_state;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn unit(theta: f64, phi: f64) -> SystemParams {
        SystemParams::new(1.0, 1.0, theta, phi).unwrap()
    }

    fn perfect_channel() -> TwoQubitState {
        TwoQubitState::pure(&bell_basis()[0])
    }

    #[test]
    fn basis_is_pauli_generated() {
        let basis = bell_basis();
        for (i, psi) in basis.iter().enumerate() {
            let image = kron2(&pauli(i), &pauli(0)) * basis[0];
            // equal up to a global phase
            let overlap = (psi.adjoint() * image)[0].norm();
            assert_relative_eq!(overlap, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn probabilities_at_kt_one() {
        let channel = joint_state(&unit(FRAC_PI_2, 0.0), 1.0).unwrap();
        let probs = channel_probabilities(&channel).unwrap();
        let expected = [
            0.667_789_452_786_469_2,
            0.134_583_985_392_345_66,
            0.134_583_985_392_345_66,
            0.063_042_576_428_839_44,
        ];
        for (got, want) in probs.p.iter().zip(expected) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        assert!(!probs.p0_not_maximal);
        assert_relative_eq!(probs.sum(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn probabilities_at_origin_are_uniform() {
        let channel = joint_state(&unit(FRAC_PI_2, 0.0), 0.0).unwrap();
        let probs = channel_probabilities(&channel).unwrap();
        for p in probs.p {
            assert_relative_eq!(p, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn perfect_and_useless_channels() {
        let input = BlochAngles::new(1.1, 2.3).unwrap();
        let out = teleport_one_qubit(&perfect_channel(), &input).unwrap();
        assert!(out.max_abs_diff(&input.density()) < 1e-15);
        assert_relative_eq!(fidelity(&input, &out), 1.0, epsilon = 1e-15);

        let uniform = ChannelProbabilities::from_weights([0.25; 4]);
        let out = depolarize(&uniform, &input.density());
        let half = QubitDensity::from_matrix_unchecked(Matrix2::identity() * C64::from(0.5));
        assert!(out.max_abs_diff(&half) < 1e-15);
        assert_relative_eq!(fidelity(&input, &out), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn one_qubit_output_at_kt_one() {
        let channel = joint_state(&unit(FRAC_PI_2, 0.0), 1.0).unwrap();
        let input = BlochAngles::new(FRAC_PI_2, 0.0).unwrap();
        let out = teleport_one_qubit(&channel, &input).unwrap();
        assert_relative_eq!(out.matrix()[(0, 1)].re, 0.302_373_438_178_814_9, max_relative = 1e-12);
        assert_relative_eq!(fidelity(&input, &out), 0.802_373_438_178_814_9, max_relative = 1e-12);
        let probs = channel_probabilities(&channel).unwrap();
        assert_relative_eq!(fidelity_formula(&probs, &input), fidelity(&input, &out), epsilon = 1e-15);
    }

    #[test]
    fn average_fidelity_values() {
        let params = unit(FRAC_PI_2, 0.0);
        let report = one_qubit_report(&params, 1.0, &BlochAngles::new(0.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(report.average_fidelity, 0.778_526_301_857_646_2, max_relative = 1e-12);
        assert_relative_eq!(report.optimal_fidelity, report.average_fidelity, epsilon = 1e-15);
        assert_relative_eq!(
            average_fidelity_p0_closed_form(&params, 1.0).unwrap(),
            0.778_526_301_857_646_2,
            max_relative = 1e-12
        );
        assert_relative_eq!(average_fidelity_p0_closed_form(&params, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        let flat = unit(0.0, 0.0);
        for &t in &[0.5, 2.0] {
            let x = scalar_profile(&flat, t).unwrap().x;
            let value = average_fidelity_p0_closed_form(&flat, t).unwrap();
            assert_relative_eq!(value, 2.0 / 3.0 - x * x / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn sampled_average_is_reproducible() {
        let channel = joint_state(&unit(FRAC_PI_2, 0.0), 1.0).unwrap();
        let probs = channel_probabilities(&channel).unwrap();
        let a = monte_carlo_average_fidelity(&probs, 2000, 3).unwrap();
        assert_eq!(a, monte_carlo_average_fidelity(&probs, 2000, 3).unwrap());
        assert!((a.0 - average_fidelity_p0(&probs)).abs() < 4.0 * a.1);
        assert!(monte_carlo_average_fidelity(&probs, 1, 3).is_err());
    }

    #[test]
    fn optimal_fidelity_formula() {
        assert_eq!(optimal_fidelity(1.0, 2).unwrap(), 1.0);
        assert_relative_eq!(
            optimal_fidelity(0.667_789_452_786_469_2, 2).unwrap(),
            0.778_526_301_857_646_2,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            optimal_fidelity(0.458_901_990_691_272_1, 4).unwrap(),
            0.567_121_592_553_017_7,
            max_relative = 1e-12
        );
        assert!(optimal_fidelity(1.2, 2).is_err());
        assert!(optimal_fidelity(0.5, 1).is_err());
    }

    #[test]
    fn two_qubit_perfect_channel() {
        let input = BlochAngles::new(0.9, 4.0).unwrap();
        let out = teleport_two_qubit(&perfect_channel(), &input).unwrap();
        let expected = TwoQubitState::pure(&input.two_qubit_vector());
        assert!(out.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn two_qubit_output_structure() {
        let channel = joint_state(&unit(1.0, 0.5), 1.5).unwrap();
        let probs = channel_probabilities(&channel).unwrap();
        let [p0, p1, _, p3] = probs.p;
        let input = BlochAngles::new(1.3, 0.7).unwrap();
        let out = teleport_two_qubit(&channel, &input).unwrap();
        let m = out.matrix();
        let corner = 2.0 * p1 * (p0 + p3);
        assert_relative_eq!(m[(0, 0)].re, corner, epsilon = 1e-15);
        assert_relative_eq!(m[(3, 3)].re, corner, epsilon = 1e-15);
        assert_relative_eq!(out.trace().re, 1.0, epsilon = 1e-14);
        let c = 0.5 * 1.3f64.sin();
        let coherence = C64::from_polar(c * (p0 - p3).powi(2), -0.7);
        assert!((m[(1, 2)] - coherence).norm() < 1e-15);
    }

    #[test]
    fn two_qubit_reports() {
        let params = unit(FRAC_PI_2, 0.0);
        let input = BlochAngles::new(FRAC_PI_2, 0.0).unwrap();
        let at_two = two_qubit_report(&params, 2.0, &input).unwrap();
        let c = at_two.output_concurrence.unwrap();
        assert_relative_eq!(c, 0.026_115_971_597_542_15, max_relative = 1e-10);
        assert_relative_eq!(at_two.optimal_fidelity, 0.567_121_592_553_017_7, max_relative = 1e-12);
        assert!(at_two.optimal_fidelity > CLASSICAL_FIDELITY_TWO_QUBIT);
        assert_relative_eq!(
            average_fidelity_p1_closed_form(&params, 2.0).unwrap(),
            at_two.average_fidelity,
            epsilon = 1e-14
        );
        assert_relative_eq!(output_concurrence_wootters(&at_two).unwrap(), c, epsilon = 1e-12);

        let [p0, p1, _, p3] = at_two.probabilities.p;
        let corner = 4.0 * (p0 + p3).powi(2) * p1 * p1;
        let TeleportedState::TwoQubit(out) = &at_two.output else { panic!() };
        let lambda = crate::metrics::wootters_eigenvalues(out);
        // the doubly degenerate pair sits below the coherence pair here
        assert_relative_eq!(lambda[2], corner, epsilon = 1e-12);
        assert_relative_eq!(lambda[3], corner, epsilon = 1e-12);
        assert_relative_eq!(
            two_qubit_fidelity(&input, out),
            two_qubit_fidelity_formula(&at_two.probabilities, &input),
            epsilon = 1e-14
        );

        let at_one = two_qubit_report(&params, 1.0, &input).unwrap();
        assert_eq!(at_one.output_concurrence, Some(0.0));
    }

    #[test]
    fn pair_weights_factorize() {
        let channel = joint_state(&unit(0.8, 1.1), 0.7).unwrap();
        let probs = channel_probabilities(&channel).unwrap();
        let pairs = pair_probabilities(&channel).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_relative_eq!(pairs[i][j], probs.p[i] * probs.p[j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn flags_suboptimal_frame() {
        // theta = 0: p1 = p2 = x^2/2 dominates p0 near t = 0
        let channel = joint_state(&unit(0.0, 0.0), 0.1).unwrap();
        let probs = channel_probabilities(&channel).unwrap();
        assert!(probs.p0_not_maximal);
        let report = one_qubit_report(&unit(0.0, 0.0), 0.1, &BlochAngles::new(0.3, 0.0).unwrap()).unwrap();
        assert!(report.optimal_fidelity > report.average_fidelity);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(BlochAngles::new(-0.1, 0.0).is_err());
        assert!(BlochAngles::new(0.1, TAU).is_err());
        let bad = TwoQubitState::from_matrix_unchecked(Matrix4::identity());
        assert!(channel_probabilities(&bad).is_err());
        assert!(teleport_two_qubit(&bad, &BlochAngles::new(0.1, 0.0).unwrap()).is_err());
        assert!(concurrence(&phi_plus()).is_ok());
    }
}
