//! The exact atom-field state in the two-qubit representation.
//!
//! The field only ever occupies `span{|alpha>, |-alpha>}`, so the joint state
//! is a 4x4 matrix in the ordered basis
//! `{|+>|v1>, |+>|v2>, |->|v1>, |->|v2>}` with `v1 = |alpha>` and `v2` the
//! Gram-Schmidt partner built from `|-alpha>`.

use nalgebra::{DVector, Matrix2, Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect2, hermiticity_defect4, one_minus_exp_neg, C64, ZERO};
use crate::scalar::{check_time, scalar_profile, ScalarProfile, SystemParams};

/// Below this `|alpha|` the two coherent states are numerically identical and
/// the field is treated as one-dimensional.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Largest Fock-tail mass accepted by [`coherent_fock`].
pub const MAX_FOCK_TAIL: f64 = 1e-10;

/// Tolerances for the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalTolerance {
    pub hermiticity: f64,
    pub trace: f64,
    pub eigenvalue: f64,
}

impl PhysicalTolerance {
    pub const STRICT: PhysicalTolerance = PhysicalTolerance {
        hermiticity: 1e-12,
        trace: 1e-12,
        eigenvalue: 1e-10,
    };

    /// For states that went through a numerical integrator.
    pub const INTEGRATED: PhysicalTolerance = PhysicalTolerance {
        hermiticity: 1e-10,
        trace: 1e-8,
        eigenvalue: 1e-8,
    };
}

/// Anything with a purity `Tr[rho^2]`.
pub trait DensityMatrix {
    fn purity(&self) -> f64;
}

/// A two-qubit density matrix in the atom-major product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Matrix4<C64>,
}

impl TwoQubitState {
    /// Wraps `matrix` after checking it against [`PhysicalTolerance::STRICT`].
    pub fn new(matrix: Matrix4<C64>) -> Result<Self> {
        let state = Self { matrix };
        state.check_physical(&PhysicalTolerance::STRICT)?;
        Ok(state)
    }

    pub fn from_matrix_unchecked(matrix: Matrix4<C64>) -> Self {
        Self { matrix }
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &Vector4<C64>) -> Self {
        let psi = psi.normalize();
        Self {
            matrix: psi * psi.adjoint(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix4<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.matrix + self.matrix.adjoint()) * C64::from(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    pub fn check_physical(&self, tol: &PhysicalTolerance) -> Result<()> {
        check_density(
            hermiticity_defect4(&self.matrix),
            self.trace(),
            || self.eigenvalues()[0],
            tol,
        )
    }

    /// Reduced state of the first (atom) qubit.
    pub fn atom_state(&self) -> QubitDensity {
        let m = &self.matrix;
        QubitDensity::from_matrix_unchecked(Matrix2::from_fn(|a, b| {
            m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)]
        }))
    }

    /// Reduced state of the second (field) qubit.
    pub fn field_state(&self) -> QubitDensity {
        let m = &self.matrix;
        QubitDensity::from_matrix_unchecked(Matrix2::from_fn(|a, b| m[(a, b)] + m[(2 + a, 2 + b)]))
    }

    /// `(atom, field)` reduced states.
    pub fn reduced_states(&self) -> (QubitDensity, QubitDensity) {
        (self.atom_state(), self.field_state())
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &TwoQubitState) -> f64 {
        (self.matrix - other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl DensityMatrix for TwoQubitState {
    fn purity(&self) -> f64 {
        (self.matrix * self.matrix).trace().re
    }
}

/// A single-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitDensity {
    matrix: Matrix2<C64>,
}

impl QubitDensity {
    pub fn new(matrix: Matrix2<C64>) -> Result<Self> {
        let state = Self { matrix };
        state.check_physical(&PhysicalTolerance::STRICT)?;
        Ok(state)
    }

    pub fn from_matrix_unchecked(matrix: Matrix2<C64>) -> Self {
        Self { matrix }
    }

    /// Density matrix of `cos(polar/2)|0> + e^{i azimuth} sin(polar/2)|1>`.
    pub fn from_bloch(polar: f64, azimuth: f64) -> Self {
        let c = (0.5 * polar).cos();
        let s = (0.5 * polar).sin();
        let off = C64::from_polar(c * s, -azimuth);
        Self {
            matrix: Matrix2::new(C64::from(c * c), off, off.conj(), C64::from(s * s)),
        }
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let herm = (self.matrix + self.matrix.adjoint()) * C64::from(0.5);
        let ev = SymmetricEigen::new(herm).eigenvalues;
        let (a, b) = (ev[0], ev[1]);
        if a <= b {
            [a, b]
        } else {
            [b, a]
        }
    }

    pub fn check_physical(&self, tol: &PhysicalTolerance) -> Result<()> {
        check_density(
            hermiticity_defect2(&self.matrix),
            self.trace(),
            || self.eigenvalues()[0],
            tol,
        )
    }

    pub fn max_abs_diff(&self, other: &QubitDensity) -> f64 {
        (self.matrix - other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl DensityMatrix for QubitDensity {
    fn purity(&self) -> f64 {
        (self.matrix * self.matrix).trace().re
    }
}

fn check_density(
    hermiticity: f64,
    trace: C64,
    min_eigenvalue: impl FnOnce() -> f64,
    tol: &PhysicalTolerance,
) -> Result<()> {
    if !hermiticity.is_finite() || hermiticity > tol.hermiticity {
        return Err(Error::NonPhysicalState(format!(
            "hermiticity defect {hermiticity:e}"
        )));
    }
    if (trace - C64::from(1.0)).norm() > tol.trace {
        return Err(Error::NonPhysicalState(format!("trace {trace}")));
    }
    let lowest = min_eigenvalue();
    if lowest < -tol.eigenvalue {
        return Err(Error::NonPhysicalState(format!(
            "negative eigenvalue {lowest:e}"
        )));
    }
    Ok(())
}

/// `<beta|gamma>` for normalized coherent states.
pub fn coherent_overlap(beta: C64, gamma: C64) -> C64 {
    (-0.5 * beta.norm_sqr() - 0.5 * gamma.norm_sqr() + beta.conj() * gamma).exp()
}

/// Orthonormal field-qubit basis. Each vector is stored as its coefficients
/// on `(|alpha>, |-alpha>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldQubitBasis {
    pub alpha: C64,
    /// `<alpha|-alpha> = e^{-2|alpha|^2}`.
    pub x: f64,
    pub one_minus_x_sq: f64,
    pub v1: [C64; 2],
    pub v2: [C64; 2],
}

impl FieldQubitBasis {
    /// `<a|b>` for two vectors given by coefficients on `(|alpha>, |-alpha>)`,
    /// evaluated with the coherent-state overlap rule.
    pub fn inner(&self, a: &[C64; 2], b: &[C64; 2]) -> C64 {
        let points = [self.alpha, -self.alpha];
        let mut acc = ZERO;
        for (i, &zi) in points.iter().enumerate() {
            for (j, &zj) in points.iter().enumerate() {
                acc += a[i].conj() * b[j] * coherent_overlap(zi, zj);
            }
        }
        acc
    }

    /// Gram matrix `<v_i|v_j>`; the identity up to rounding.
    pub fn gram(&self) -> Matrix2<C64> {
        let v = [self.v1, self.v2];
        Matrix2::from_fn(|i, j| self.inner(&v[i], &v[j]))
    }

    /// Coordinates of `|alpha>` and `|-alpha>` in `(v1, v2)`.
    pub fn coherent_coordinates(&self) -> ([f64; 2], [f64; 2]) {
        ([1.0, 0.0], [self.x, self.one_minus_x_sq.sqrt()])
    }

    /// `v1` and `v2` as truncated Fock vectors of length `n_max + 1`.
    pub fn to_fock(&self, n_max: usize) -> Result<(DVector<C64>, DVector<C64>)> {
        let plus = coherent_fock(self.alpha, n_max)?.amplitudes;
        let minus = coherent_fock(-self.alpha, n_max)?.amplitudes;
        let combine = |c: &[C64; 2]| &plus * c[0] + &minus * c[1];
        Ok((combine(&self.v1), combine(&self.v2)))
    }
}

/// Gram-Schmidt basis `v1 = |alpha>`, `v2 = (|-alpha> - x|alpha>)/sqrt(1-x^2)`.
pub fn field_qubit_basis(alpha: C64) -> Result<FieldQubitBasis> {
    let amplitude = alpha.norm();
    if !amplitude.is_finite() || amplitude <= DEGENERACY_THRESHOLD {
        return Err(Error::DegenerateBasis(amplitude));
    }
    let two_abs_sq = 2.0 * alpha.norm_sqr();
    let x = (-two_abs_sq).exp();
    let one_minus_x_sq = one_minus_exp_neg(2.0 * two_abs_sq);
    let norm = one_minus_x_sq.sqrt();
    Ok(FieldQubitBasis {
        alpha,
        x,
        one_minus_x_sq,
        v1: [C64::from(1.0), ZERO],
        v2: [C64::from(-x / norm), C64::from(1.0 / norm)],
    })
}

/// Joint state from an already evaluated profile.
pub fn joint_state_from_profile(params: &SystemParams, profile: &ScalarProfile) -> TwoQubitState {
    if profile.amplitude() <= DEGENERACY_THRESHOLD {
        return product_limit(params);
    }
    field_qubit_matrix(
        params,
        profile.x,
        profile.one_minus_x_sq,
        profile.f,
        profile.coherence_weight(),
    )
}

/// The exact joint density matrix at time `t`.
///
/// At `t = 0` (and whenever `|alpha|` is below [`DEGENERACY_THRESHOLD`]) the
/// product `|psi_a(0)><psi_a(0)| (x) |v1><v1|` is returned.
pub fn joint_state(params: &SystemParams, t: f64) -> Result<TwoQubitState> {
    let profile = scalar_profile(params, t)?;
    Ok(joint_state_from_profile(params, &profile))
}

fn product_limit(params: &SystemParams) -> TwoQubitState {
    field_qubit_matrix(params, 1.0, 0.0, 1.0, 0.0)
}

/// Builds the 4x4 matrix with populations from `x` and coherences
/// `f sin(theta) e^{-i phi} / 2` and `coherence_weight sin(theta) e^{-i phi} / 2`.
fn field_qubit_matrix(
    params: &SystemParams,
    x: f64,
    one_minus_x_sq: f64,
    f: f64,
    coherence_weight: f64,
) -> TwoQubitState {
    let (pop_plus, pop_minus) = params.populations();
    let coherence = params.initial_coherence();
    let mut m = Matrix4::<C64>::zeros();
    m[(0, 0)] = C64::from(x * x * pop_plus);
    m[(0, 1)] = C64::from(x * one_minus_x_sq.sqrt() * pop_plus);
    m[(1, 0)] = m[(0, 1)];
    m[(1, 1)] = C64::from(one_minus_x_sq * pop_plus);
    m[(2, 2)] = C64::from(pop_minus);
    m[(0, 2)] = coherence * f;
    m[(1, 2)] = coherence * coherence_weight;
    m[(2, 0)] = m[(0, 2)].conj();
    m[(2, 1)] = m[(1, 2)].conj();
    TwoQubitState::from_matrix_unchecked(m)
}

/// Reduced `(atom, field)` states at time `t`.
pub fn reduced_states(params: &SystemParams, t: f64) -> Result<(QubitDensity, QubitDensity)> {
    Ok(joint_state(params, t)?.reduced_states())
}

/// Long-time separable state
/// `cos^2(theta/2)|+><+| (x) |-a><-a| + sin^2(theta/2)|-><-| (x) |a><a|`
/// with `a = i g / k`, written in the field-qubit basis of `a`.
pub fn asymptotic_state(params: &SystemParams) -> Result<TwoQubitState> {
    params.validate()?;
    if params.k <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "a lossless cavity has no stationary state".into(),
        });
    }
    let amplitude = params.coupling_ratio();
    if amplitude <= DEGENERACY_THRESHOLD {
        return Ok(field_qubit_matrix(params, 1.0, 0.0, 0.0, 0.0));
    }
    let two_abs_sq = 2.0 * amplitude * amplitude;
    Ok(field_qubit_matrix(
        params,
        (-two_abs_sq).exp(),
        one_minus_exp_neg(2.0 * two_abs_sq),
        0.0,
        0.0,
    ))
}

/// Truncated Fock expansion of a coherent state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentFock {
    /// `<n|alpha>` for `n = 0..=n_max`.
    pub amplitudes: DVector<C64>,
    /// Probability mass above `n_max`.
    pub tail: f64,
}

/// `<n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for `n = 0..=n_max`,
/// rejecting truncations whose tail mass exceeds [`MAX_FOCK_TAIL`].
pub fn coherent_fock(alpha: C64, n_max: usize) -> Result<CoherentFock> {
    coherent_fock_with_bound(alpha, n_max, MAX_FOCK_TAIL)
}

pub fn coherent_fock_with_bound(alpha: C64, n_max: usize, max_tail: f64) -> Result<CoherentFock> {
    let state = coherent_fock_unchecked(alpha, n_max);
    if !(state.tail <= max_tail) {
        return Err(Error::TruncationTooSmall {
            n_max,
            tail: state.tail,
            bound: max_tail,
        });
    }
    Ok(state)
}

pub fn coherent_fock_unchecked(alpha: C64, n_max: usize) -> CoherentFock {
    let mean = alpha.norm_sqr();
    let mut amplitudes = DVector::<C64>::zeros(n_max + 1);
    let mut c = C64::from((-0.5 * mean).exp());
    amplitudes[0] = c;
    for n in 1..=n_max {
        c *= alpha / (n as f64).sqrt();
        amplitudes[n] = c;
    }
    CoherentFock {
        amplitudes,
        tail: poisson_tail(mean, n_max),
    }
}

/// `P(n > n_max)` for a Poisson distribution, summed term by term.
pub(crate) fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut term = (-mean).exp();
    for n in 1..=n_max {
        term *= mean / n as f64;
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        term *= mean / n as f64;
        tail += term;
        if term <= tail * 1e-17 || term == 0.0 {
            break;
        }
        n += 1;
    }
    tail
}

/// Which atomic branch of the decoherence-free evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomBranch {
    Plus,
    Minus,
}

/// One branch `weight |atom> (x) |amplitude>` of an evolved product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentBranch {
    pub atom: AtomBranch,
    pub weight: C64,
    pub amplitude: C64,
}

/// Lossless evolution `U = |+><+| D(-xi) + |-><-| D(xi)` with `xi = i g t / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementEvolution {
    pub xi: C64,
}

impl DisplacementEvolution {
    pub fn branch_amplitude(&self, branch: AtomBranch) -> C64 {
        match branch {
            AtomBranch::Plus => -self.xi,
            AtomBranch::Minus => self.xi,
        }
    }

    /// Image of `(plus |+> + minus |->) (x) |0>`.
    pub fn apply_to_vacuum(&self, plus: C64, minus: C64) -> [CoherentBranch; 2] {
        [
            CoherentBranch {
                atom: AtomBranch::Plus,
                weight: plus,
                amplitude: -self.xi,
            },
            CoherentBranch {
                atom: AtomBranch::Minus,
                weight: minus,
                amplitude: self.xi,
            },
        ]
    }

    /// The evolved vector in the truncated atom (x) Fock space, atom-major.
    pub fn fock_state(&self, plus: C64, minus: C64, n_max: usize) -> Result<DVector<C64>> {
        let dim = n_max + 1;
        let mut psi = DVector::<C64>::zeros(2 * dim);
        for (slot, branch) in self.apply_to_vacuum(plus, minus).iter().enumerate() {
            let field = coherent_fock(branch.amplitude, n_max)?.amplitudes;
            psi.rows_mut(slot * dim, dim).copy_from(&(field * branch.weight));
        }
        Ok(psi)
    }
}

pub fn decoherence_free_evolve(g: f64, t: f64) -> Result<DisplacementEvolution> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidParameter {
            name: "g",
            reason: format!("{g} (coupling must be finite and > 0)"),
        });
    }
    check_time(t)?;
    Ok(DisplacementEvolution {
        xi: C64::new(0.0, 0.5 * g * t),
    })
}
