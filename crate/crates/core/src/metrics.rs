//! Entanglement, nonlocality and mixedness measures for two-qubit states.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, SymmetricEigen, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{kron2, pauli, C64, ZERO};
use crate::scalar::{scalar_profile, SystemParams};
use crate::state::{DensityMatrix, PhysicalTolerance, TwoQubitState, DEGENERACY_THRESHOLD};

/// Eigenvalues of `rho` below this are treated as exact zeros when forming
/// the Wootters decomposition `rho = W W^dagger`.
pub const WOOTTERS_RANK_CUTOFF: f64 = 1e-13;

/// Square roots `sqrt(lambda_i)` of the eigenvalues of `rho (sy(x)sy) rho^* (sy(x)sy)`,
/// in decreasing order.
///
/// Computed as the singular values of `W^T (sy(x)sy) W` where `rho = W W^dagger`
/// is built from the eigenvectors of `rho` with non-negligible weight. This
/// avoids square roots of round-off sized eigenvalues.
pub fn wootters_roots(state: &TwoQubitState) -> [f64; 4] {
    let m = state.matrix();
    let herm = (m + m.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(herm);
    let columns: Vec<DVector<C64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > WOOTTERS_RANK_CUTOFF)
        .map(|(i, &mu)| {
            let v = eig.eigenvectors.column(i) * C64::from(mu.sqrt());
            DVector::from_iterator(4, v.iter().copied())
        })
        .collect();
    let mut roots = [0.0; 4];
    if columns.is_empty() {
        return roots;
    }
    let w = DMatrix::from_columns(&columns);
    let spin_flip = kron2(&pauli(2), &pauli(2));
    let flip = DMatrix::from_iterator(4, 4, spin_flip.iter().copied());
    let tau = w.transpose() * flip * &w;
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    for (slot, value) in roots.iter_mut().zip(sv) {
        *slot = value;
    }
    roots
}

/// Eigenvalues `lambda_i` of `rho rho~`, decreasing.
pub fn wootters_eigenvalues(state: &TwoQubitState) -> [f64; 4] {
    wootters_roots(state).map(|r| r * r)
}

/// Wootters concurrence `max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`.
pub fn concurrence(state: &TwoQubitState) -> Result<f64> {
    state.check_physical(&PhysicalTolerance::STRICT)?;
    Ok(concurrence_unchecked(state))
}

pub(crate) fn concurrence_unchecked(state: &TwoQubitState) -> f64 {
    let r = wootters_roots(state);
    (r[0] - r[1] - r[2] - r[3]).max(0.0)
}

/// Binary entropy in bits with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Entanglement of formation `h(1/2 + sqrt(1 - C^2)/2)`.
pub fn entanglement_of_formation(concurrence: f64) -> Result<f64> {
    if !(concurrence.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&concurrence)) {
        return Err(Error::OutOfRange {
            what: "concurrence",
            value: concurrence,
        });
    }
    let c = concurrence.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 + 0.5 * (1.0 - c * c).sqrt()))
}

/// Closed-form concurrence `sqrt(1 - x^2) f sin(theta) / x` of the joint state.
pub fn concurrence_closed_form(params: &SystemParams, t: f64) -> Result<f64> {
    let profile = scalar_profile(params, t)?;
    if profile.amplitude() <= DEGENERACY_THRESHOLD {
        return Ok(0.0);
    }
    Ok((profile.coherence_weight() * params.theta.sin()).max(0.0))
}

/// `1 - Tr[rho^2]`.
pub fn linear_entropy<D: DensityMatrix>(density: &D) -> f64 {
    1.0 - density.purity()
}

/// Linear entropies of the joint state and of its two marginals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearEntropies {
    pub joint: f64,
    pub atom: f64,
    pub field: f64,
}

pub fn linear_entropies(state: &TwoQubitState) -> LinearEntropies {
    let (atom, field) = state.reduced_states();
    LinearEntropies {
        joint: linear_entropy(state),
        atom: linear_entropy(&atom),
        field: linear_entropy(&field),
    }
}

/// `(1 - f^2/x^2) sin^2(theta) / 2`, `(1 - f^2) sin^2(theta) / 2` and
/// `(1 - x^2) sin^2(theta) / 2`.
pub fn linear_entropies_closed_form(params: &SystemParams, t: f64) -> Result<LinearEntropies> {
    let p = scalar_profile(params, t)?;
    let half_sin_sq = 0.5 * params.theta.sin().powi(2);
    let ratio = p.f_over_x();
    Ok(LinearEntropies {
        joint: (1.0 - ratio * ratio) * half_sin_sq,
        atom: (1.0 - p.f * p.f) * half_sin_sq,
        field: p.one_minus_x_sq * half_sin_sq,
    })
}

/// Spin correlation matrix `T_ij = Tr(rho sigma_i (x) sigma_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix(pub Matrix3<f64>);

pub fn correlation_matrix(state: &TwoQubitState) -> CorrelationMatrix {
    let m = state.matrix();
    CorrelationMatrix(Matrix3::from_fn(|i, j| {
        (m * kron2(&pauli(i + 1), &pauli(j + 1))).trace().re
    }))
}

/// Measurement directions of a CHSH experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSettings {
    pub a: Vector3<f64>,
    pub a_prime: Vector3<f64>,
    pub b: Vector3<f64>,
    pub b_prime: Vector3<f64>,
}

impl BellSettings {
    pub fn new(
        a: Vector3<f64>,
        a_prime: Vector3<f64>,
        b: Vector3<f64>,
        b_prime: Vector3<f64>,
    ) -> Result<Self> {
        let settings = Self {
            a,
            a_prime,
            b,
            b_prime,
        };
        settings.validate()?;
        Ok(settings)
    }

    /// The Tsirelson-saturating choice for `Phi+`.
    pub fn standard() -> Self {
        let z = Vector3::z();
        let x = Vector3::x();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: z,
            a_prime: x,
            b: (z + x) * s,
            b_prime: (z - x) * s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("|a|", self.a),
            ("|a'|", self.a_prime),
            ("|b|", self.b),
            ("|b'|", self.b_prime),
        ] {
            let norm = v.norm();
            if !((norm - 1.0).abs() <= 1e-12) {
                return Err(Error::OutOfRange { what, value: norm });
            }
        }
        Ok(())
    }
}

fn spin_along(n: &Vector3<f64>) -> nalgebra::Matrix2<C64> {
    pauli(1) * C64::from(n.x) + pauli(2) * C64::from(n.y) + pauli(3) * C64::from(n.z)
}

/// The CHSH operator `a.s (x) (b + b').s + a'.s (x) (b - b').s`.
pub fn bell_operator(settings: &BellSettings) -> Matrix4<C64> {
    kron2(&spin_along(&settings.a), &spin_along(&(settings.b + settings.b_prime)))
        + kron2(
            &spin_along(&settings.a_prime),
            &spin_along(&(settings.b - settings.b_prime)),
        )
}

/// `Tr(rho B)` for the CHSH operator of `settings`.
pub fn bell_expectation(state: &TwoQubitState, settings: &BellSettings) -> Result<f64> {
    settings.validate()?;
    Ok((state.matrix() * bell_operator(settings)).trace().re)
}

/// Maximal CHSH value `2 sqrt(mu1 + mu2)` over all settings, from the two
/// largest eigenvalues of `T^T T`.
pub fn bell_max(state: &TwoQubitState) -> f64 {
    let t = correlation_matrix(state).0;
    let mut ev: Vec<f64> = SymmetricEigen::new(t.transpose() * t)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    2.0 * (ev[0] + ev[1]).max(0.0).sqrt()
}

/// `2 sqrt(1 + (f^2/x^2 - x^2) sin^2(theta))`.
pub fn bell_max_closed_form(params: &SystemParams, t: f64) -> Result<f64> {
    let p = scalar_profile(params, t)?;
    let ratio = p.f_over_x();
    let radicand = 1.0 + (ratio * ratio - p.x * p.x) * params.theta.sin().powi(2);
    Ok(2.0 * radicand.max(0.0).sqrt())
}

/// `f^2/x^2 - x^2`; positive while the CHSH inequality can be violated.
pub fn bell_violation_residual(params: &SystemParams, t: f64) -> Result<f64> {
    let p = scalar_profile(params, t)?;
    let ratio = p.f_over_x();
    Ok(ratio * ratio - p.x * p.x)
}

/// First time after which `f^2/x^2 <= x^2`, i.e. the maximal CHSH value drops
/// to 2. Independent of `theta` and `phi` as long as `sin(theta) != 0`.
pub fn bell_death_time(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    if params.k <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "the violation never ends in a lossless cavity".into(),
        });
    }
    if params.theta.sin().abs() < 1e-15 {
        return Err(Error::NoViolation);
    }
    // ln f - 2 ln x has the sign of f^2/x^2 - x^2 and no overflow issues
    let sign = |t: f64| -> Result<f64> {
        let p = scalar_profile(params, t)?;
        Ok(p.ln_f - 2.0 * p.ln_x)
    };
    let mut lo = 1e-6 / params.k;
    let mut hi = 50.0 / params.k;
    if sign(lo)? <= 0.0 {
        return Err(Error::NoViolation);
    }
    while sign(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 / params.k {
            return Err(Error::NoViolation);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sign(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Best settings found by a seeded random search plus coordinate descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSearch {
    pub settings: BellSettings,
    pub value: f64,
    /// Largest `|<B>|` among the random samples, before refinement.
    pub best_sample: f64,
}

/// Numerically maximizes `|<B>|` over settings. Used to cross-check
/// [`bell_max`]; it never exceeds the Horodecki value.
pub fn search_bell_settings(state: &TwoQubitState, samples: usize, seed: u64) -> BellSearch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op_value = |angles: &[f64; 8]| -> f64 {
        let s = settings_from_angles(angles);
        (state.matrix() * bell_operator(&s)).trace().re.abs()
    };
    let mut best = [0.0; 8];
    let mut best_value = f64::NEG_INFINITY;
    for _ in 0..samples.max(1) {
        let mut angles = [0.0; 8];
        for pair in angles.chunks_mut(2) {
            let v = Vector3::new(
                Distribution::<f64>::sample(&StandardNormal, &mut rng),
                Distribution::<f64>::sample(&StandardNormal, &mut rng),
                Distribution::<f64>::sample(&StandardNormal, &mut rng),
            )
            .normalize();
            pair[0] = v.z.clamp(-1.0, 1.0).acos();
            pair[1] = v.y.atan2(v.x);
        }
        let value = op_value(&angles);
        if value > best_value {
            best_value = value;
            best = angles;
        }
    }
    let best_sample = best_value;
    let mut step = 0.1;
    while step > 1e-10 {
        let mut improved = false;
        for i in 0..8 {
            for dir in [1.0, -1.0] {
                let mut trial = best;
                trial[i] += dir * step;
                let value = op_value(&trial);
                if value > best_value {
                    best_value = value;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    BellSearch {
        settings: settings_from_angles(&best),
        value: best_value,
        best_sample,
    }
}

fn settings_from_angles(angles: &[f64; 8]) -> BellSettings {
    let unit = |polar: f64, azimuth: f64| {
        Vector3::new(
            polar.sin() * azimuth.cos(),
            polar.sin() * azimuth.sin(),
            polar.cos(),
        )
    };
    BellSettings {
        a: unit(angles[0], angles[1]),
        a_prime: unit(angles[2], angles[3]),
        b: unit(angles[4], angles[5]),
        b_prime: unit(angles[6], angles[7]),
    }
}

/// A Bell state `(|00> + |11>)/sqrt(2)`.
pub fn phi_plus() -> TwoQubitState {
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    TwoQubitState::pure(&nalgebra::Vector4::new(s, ZERO, ZERO, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{asymptotic_state, joint_state};
    use approx::assert_relative_eq;
    use nalgebra::Vector4;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn unit(theta: f64, phi: f64) -> SystemParams {
        SystemParams::new(1.0, 1.0, theta, phi).unwrap()
    }

    fn product(a: [f64; 2], b: [f64; 2]) -> TwoQubitState {
        let psi = Vector4::new(
            C64::from(a[0] * b[0]),
            C64::from(a[0] * b[1]),
            C64::from(a[1] * b[0]),
            C64::from(a[1] * b[1]),
        );
        TwoQubitState::pure(&psi)
    }

    #[test]
    fn bell_state_concurrence() {
        assert_relative_eq!(concurrence(&phi_plus()).unwrap(), 1.0, epsilon = 1e-14);
        let prod = product([0.6, 0.8], [0.28, 0.96]);
        assert!(concurrence(&prod).unwrap() < 1e-15);
    }

    #[test]
    fn joint_state_concurrence_at_kt_one() {
        let state = joint_state(&unit(FRAC_PI_2, 0.0), 1.0).unwrap();
        let c = concurrence(&state).unwrap();
        assert_relative_eq!(c, 0.604_746_876_357_629_8, max_relative = 1e-12);
        let lambda = wootters_eigenvalues(&state);
        assert_relative_eq!(lambda[0], 0.412_295_959_129_584_3, max_relative = 1e-12);
        assert_relative_eq!(lambda[1], 0.001_395_462_317_879_585_7, max_relative = 1e-10);
        assert!(lambda[2] < 1e-20 && lambda[3] < 1e-20);
        assert_relative_eq!(
            concurrence_closed_form(&unit(FRAC_PI_2, 0.0), 1.0).unwrap(),
            c,
            epsilon = 1e-13
        );
    }

    #[test]
    fn concurrence_rejects_non_physical() {
        let m = Matrix4::<C64>::identity() * C64::from(0.5);
        let bad = TwoQubitState::from_matrix_unchecked(m);
        assert!(matches!(concurrence(&bad), Err(Error::NonPhysicalState(_))));
    }

    #[test]
    fn formation_entropy() {
        assert_eq!(entanglement_of_formation(0.0).unwrap(), 0.0);
        assert_relative_eq!(entanglement_of_formation(1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            entanglement_of_formation(0.604_746_876_357_629_8).unwrap(),
            0.474_647_764_421_700_2,
            max_relative = 1e-12
        );
        assert!(entanglement_of_formation(1.5).is_err());
        assert!(entanglement_of_formation(-0.1).is_err());
    }

    #[test]
    fn closed_form_concurrence_limits() {
        for &t in &[0.0, 0.5, 3.0] {
            assert_eq!(concurrence_closed_form(&unit(0.0, 0.0), t).unwrap(), 0.0);
        }
        assert_eq!(concurrence_closed_form(&unit(FRAC_PI_2, 0.0), 0.0).unwrap(), 0.0);
        let lossless = SystemParams::new(1.0, 0.0, FRAC_PI_2, 0.0).unwrap();
        let mut last = 0.0;
        for i in 1..=40 {
            let t = 0.25 * i as f64;
            let c = concurrence_closed_form(&lossless, t).unwrap();
            // k -> 0 limit: sqrt(1 - e^{-g^2 t^2})
            assert_relative_eq!(c, (1.0 - (-t * t).exp()).sqrt(), epsilon = 1e-14);
            assert!(c >= last);
            last = c;
        }
        assert!(last > 1.0 - 1e-12);
    }

    #[test]
    fn entropies_at_kt_one() {
        let state = joint_state(&unit(FRAC_PI_2, 0.0), 1.0).unwrap();
        let s = linear_entropies(&state);
        assert_relative_eq!(s.joint, 0.103_912_436_125_592_86, max_relative = 1e-12);
        assert_relative_eq!(s.atom, 0.286_771_828_357_748_05, max_relative = 1e-12);
        assert_relative_eq!(s.field, 0.230_832_029_215_308_7, max_relative = 1e-12);
        assert!(linear_entropy(&phi_plus()).abs() < 1e-15);
    }

    #[test]
    fn entropy_of_asymptotic_field() {
        let state = asymptotic_state(&unit(FRAC_PI_2, 0.0)).unwrap();
        assert_relative_eq!(
            linear_entropies(&state).field,
            0.490_842_180_555_632_9,
            max_relative = 1e-13
        );
        assert!(concurrence(&state).unwrap() < 1e-15);
    }

    #[test]
    fn bell_state_saturates_tsirelson() {
        let value = bell_expectation(&phi_plus(), &BellSettings::standard()).unwrap();
        assert_relative_eq!(value, 2.0 * SQRT_2, epsilon = 1e-14);
        assert_relative_eq!(bell_max(&phi_plus()), 2.0 * SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn product_states_respect_chsh() {
        let prod = product([0.6, 0.8], [0.28, 0.96]);
        let search = search_bell_settings(&prod, 200, 7);
        assert!(search.value <= 2.0 + 1e-12);
        assert!(bell_max(&prod) <= 2.0 + 1e-12);
    }

    #[test]
    fn collapsed_settings_match_correlations() {
        let state = joint_state(&unit(1.2, 0.4), 1.3).unwrap();
        let a = Vector3::new(0.3, -0.4, 0.5).normalize();
        let a2 = Vector3::new(-0.1, 0.9, 0.2).normalize();
        let b = Vector3::new(0.7, 0.1, -0.2).normalize();
        let s = BellSettings::new(a, a2, b, b).unwrap();
        let t = correlation_matrix(&state).0;
        let expected = 2.0 * (a.transpose() * t * b)[0];
        assert_relative_eq!(bell_expectation(&state, &s).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_unit_settings() {
        let v = Vector3::new(1.0, 1.0, 0.0);
        assert!(BellSettings::new(v, Vector3::x(), Vector3::x(), Vector3::x()).is_err());
        let mut s = BellSettings::standard();
        s.b *= 1.01;
        assert!(bell_expectation(&phi_plus(), &s).is_err());
    }

    #[test]
    fn horodecki_value_at_kt_one() {
        let params = unit(FRAC_PI_2, 0.0);
        let state = joint_state(&params, 1.0).unwrap();
        assert_relative_eq!(bell_max(&state), 2.239_499_217_396_096, max_relative = 1e-12);
        assert_relative_eq!(
            bell_max_closed_form(&params, 1.0).unwrap(),
            2.239_499_217_396_096,
            max_relative = 1e-13
        );
        assert_eq!(bell_max_closed_form(&params, 0.0).unwrap(), 2.0);
        let search = search_bell_settings(&state, 300, 11);
        assert!(search.value <= bell_max(&state) + 1e-10);
        assert_relative_eq!(search.value, bell_max(&state), epsilon = 1e-6);
    }

    #[test]
    fn asymptotic_state_does_not_violate() {
        let state = asymptotic_state(&unit(FRAC_PI_2, 0.0)).unwrap();
        // f = 0 and x = e^{-2}: 2 sqrt(1 - x^2)
        let expected = 2.0 * (1.0 - (-4.0f64).exp()).sqrt();
        assert_relative_eq!(bell_max(&state), expected, epsilon = 1e-12);
        assert!(bell_max(&state) < 2.0);
    }

    #[test]
    fn death_time() {
        let t_star = bell_death_time(&unit(FRAC_PI_2, 0.0)).unwrap();
        assert_relative_eq!(t_star, 2.302_777_304_004_336_5, max_relative = 1e-10);
        let other = bell_death_time(&unit(FRAC_PI_4, 1.0)).unwrap();
        assert_eq!(t_star, other);
        let c = concurrence_closed_form(&unit(FRAC_PI_2, 0.0), t_star).unwrap();
        assert_relative_eq!(c, 0.361_016_446_189_514_2, max_relative = 1e-8);
        assert!(bell_violation_residual(&unit(FRAC_PI_2, 0.0), t_star).unwrap().abs() < 1e-9);

        assert_eq!(bell_death_time(&unit(0.0, 0.0)), Err(Error::NoViolation));
        let lossless = SystemParams::new(1.0, 0.0, FRAC_PI_2, 0.0).unwrap();
        assert!(bell_death_time(&lossless).is_err());
    }
}
