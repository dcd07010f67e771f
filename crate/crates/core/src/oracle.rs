//! Brute-force reference: the effective master equation integrated in a
//! truncated Fock space, independent of the closed-form solution.
//!
//! The joint space is `{|+>, |->} (x) {|0>, ..., |N>}`, indexed atom-major as
//! `s (N + 1) + n`. The Hamiltonian is assembled in the bare `{|e>, |g>}`
//! atom basis and rotated numerically, so the diagonal atom structure is an
//! outcome of the integration rather than an input to it.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};

use crate::error::{Error, Result};
use crate::linalg::{C64, I, ONE, ZERO};
use crate::scalar::{check_time, FieldBlock, SystemParams};
use crate::state::{field_qubit_basis, PhysicalTolerance, QubitDensity, TwoQubitState, MAX_FOCK_TAIL};

/// Largest accepted `|Tr rho - 1|` along a trajectory.
pub const TRACE_DRIFT_BOUND: f64 = 1e-8;
/// Largest accepted `max |rho - rho^dagger|` along a trajectory.
pub const HERMITICITY_BOUND: f64 = 1e-10;
/// Default leakage bound for [`project_to_qubit`].
pub const DEFAULT_MAX_LEAKAGE: f64 = 1e-6;

const MAX_STEPS: usize = 10_000_000;
const MIN_STEP_FRACTION: f64 = 1e-14;

/// Atom (x) truncated-Fock density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FockJointState {
    pub matrix: DMatrix<C64>,
    pub n_max: usize,
    pub t: f64,
}

impl FockJointState {
    /// `(cos(theta/2)|+> + e^{i phi} sin(theta/2)|->) (x) |0>`.
    pub fn initial(params: &SystemParams, n_max: usize) -> Result<Self> {
        params.validate()?;
        let dim = n_max + 1;
        let mut psi = DVector::<C64>::zeros(2 * dim);
        psi[0] = C64::from((0.5 * params.theta).cos());
        psi[dim] = C64::from_polar((0.5 * params.theta).sin(), params.phi);
        Ok(Self {
            matrix: &psi * psi.adjoint(),
            n_max,
            t: 0.0,
        })
    }

    pub fn field_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// Population of the highest Fock level, summed over the atom.
    pub fn top_population(&self) -> f64 {
        let d = self.field_dim();
        self.matrix[(self.n_max, self.n_max)].re + self.matrix[(d + self.n_max, d + self.n_max)].re
    }

    /// The field operator `<i|rho|j>` for atom labels `i, j` in `{+, -}`.
    pub fn field_block(&self, block: FieldBlock) -> DMatrix<C64> {
        let d = self.field_dim();
        let (i, j) = block.atom_indices();
        self.matrix.view((i * d, j * d), (d, d)).into_owned()
    }

    /// Reduced atom state in `{|+>, |->}`.
    pub fn atom_state(&self) -> QubitDensity {
        let m = Matrix2::from_fn(|i, j| {
            let (a, b) = match (i, j) {
                (0, 0) => (0, 0),
                (0, 1) => (0, 1),
                (1, 0) => (1, 0),
                _ => (1, 1),
            };
            self.field_block(atom_block(a, b)).trace()
        });
        QubitDensity::from_matrix_unchecked(m)
    }

    /// `<+|Tr_f rho|->`.
    pub fn atom_coherence(&self) -> C64 {
        self.field_block(FieldBlock::PlusMinus).trace()
    }

    /// `<psi|rho|psi>` for a vector in the same atom (x) Fock space.
    pub fn fidelity_with_pure(&self, psi: &DVector<C64>) -> Result<f64> {
        if psi.len() != self.matrix.nrows() {
            return Err(Error::InvalidParameter {
                name: "psi",
                reason: format!("length {} does not match dimension {}", psi.len(), self.matrix.nrows()),
            });
        }
        Ok((psi.adjoint() * &self.matrix * psi)[0].re)
    }

    /// `Tr[rho_ij D(beta)]` using exact displacement matrix elements.
    pub fn characteristic(&self, block: FieldBlock, beta: C64) -> C64 {
        let rho = self.field_block(block);
        let d = displacement_matrix(beta, self.n_max);
        (rho * d).trace()
    }

    pub fn check_physical(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > HERMITICITY_BOUND {
            return Err(Error::NonPhysicalState(format!("hermiticity defect {defect:e}")));
        }
        let drift = (self.trace() - ONE).norm();
        if drift > TRACE_DRIFT_BOUND {
            return Err(Error::NonPhysicalState(format!("trace drift {drift:e}")));
        }
        let eig = self.matrix.clone().symmetric_eigenvalues();
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PhysicalTolerance::INTEGRATED.eigenvalue {
            return Err(Error::NonPhysicalState(format!("eigenvalue {min:e}")));
        }
        Ok(())
    }
}

fn atom_block(i: usize, j: usize) -> FieldBlock {
    match (i, j) {
        (0, 0) => FieldBlock::PlusPlus,
        (0, 1) => FieldBlock::PlusMinus,
        (1, 0) => FieldBlock::MinusPlus,
        _ => FieldBlock::MinusMinus,
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Fock cutoff: `ceil(10 + 12 (g/k)^2)` with loss, `ceil(10 + 12 (g t_max / 2)^2)` without.
pub fn truncation_policy(params: &SystemParams, t_max: f64) -> Result<usize> {
    params.validate()?;
    check_time(t_max)?;
    let bound = if params.k > 0.0 {
        params.g / params.k
    } else {
        0.5 * params.g * t_max
    };
    let n = (10.0 + 12.0 * bound * bound).ceil();
    if !(n.is_finite() && n < 1e5) {
        return Err(Error::OutOfRange {
            what: "Fock truncation",
            value: n,
        });
    }
    Ok(n as usize)
}

/// `min(0.001/g, 0.001/k)`, ignoring `k` when it vanishes.
pub fn default_step(params: &SystemParams) -> f64 {
    let h = 1e-3 / params.g;
    if params.k > 0.0 {
        h.min(1e-3 / params.k)
    } else {
        h
    }
}

/// Sparse operator as `(row, col, value)` triplets.
#[derive(Debug, Clone, Default)]
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &DMatrix<C64>, cutoff: f64) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)].norm() > cutoff {
                    entries.push((i, j, m[(i, j)]));
                }
            }
        }
        Self { entries }
    }

    fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect(),
        }
    }

    /// `out += self * rho`
    fn left_mul_acc(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = rho.ncols();
        for &(r, c, v) in &self.entries {
            for k in 0..n {
                out[(r, k)] += v * rho[(c, k)];
            }
        }
    }

    /// `out += rho * self`
    fn right_mul_acc(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        let n = rho.nrows();
        for &(r, c, v) in &self.entries {
            let src = rho.column(r);
            let mut dst = out.column_mut(c);
            for k in 0..n {
                dst[k] += src[k] * v;
            }
        }
    }
}

/// The Liouvillian `L rho = K rho + rho K^dagger + k a rho a^dagger` with
/// `K = -i H - (k/2) a^dagger a`.
#[derive(Debug, Clone)]
struct Liouvillian {
    k_op: Sparse,
    k_op_adj: Sparse,
    jump: Sparse,
    jump_adj: Sparse,
    rate: f64,
    dim: usize,
}

impl Liouvillian {
    fn new(params: &SystemParams, n_max: usize) -> Self {
        let d = n_max + 1;
        let mut a = DMatrix::<C64>::zeros(d, d);
        for n in 1..d {
            a[(n - 1, n)] = C64::from((n as f64).sqrt());
        }
        let quadrature = &a + a.adjoint();
        let number = a.adjoint() * &a;

        // sigma_x in {e, g}, rotated to {+, -}
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sigma_x = Matrix2::new(ZERO, ONE, ONE, ZERO);
        let rotation = Matrix2::new(C64::from(s), C64::from(s), C64::from(s), C64::from(-s));
        let sigma_pm = rotation.adjoint() * sigma_x * rotation;

        let atom_id = DMatrix::<C64>::identity(2, 2);
        let atom_x = DMatrix::from_fn(2, 2, |i, j| sigma_pm[(i, j)]);
        let h = atom_x.kronecker(&quadrature) * C64::from(0.5 * params.g);
        let n_op = atom_id.kronecker(&number);
        let jump_dense = atom_id.kronecker(&a);

        let k_dense = h * (-I) - n_op * C64::from(0.5 * params.k);
        let k_op = Sparse::from_dense(&k_dense, 1e-14);
        let jump = Sparse::from_dense(&jump_dense, 1e-14);
        Self {
            k_op_adj: k_op.adjoint(),
            jump_adj: jump.adjoint(),
            k_op,
            jump,
            rate: params.k,
            dim: 2 * d,
        }
    }

    fn apply(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        out.fill(ZERO);
        self.k_op.left_mul_acc(rho, out);
        self.k_op_adj.right_mul_acc(rho, out);
        if self.rate > 0.0 {
            let mut tmp = DMatrix::<C64>::zeros(self.dim, self.dim);
            self.jump.left_mul_acc(rho, &mut tmp);
            let mut sandwich = DMatrix::<C64>::zeros(self.dim, self.dim);
            self.jump_adj.right_mul_acc(&tmp, &mut sandwich);
            *out += sandwich * C64::from(self.rate);
        }
    }

    fn rk4_step(&self, rho: &DMatrix<C64>, h: f64) -> DMatrix<C64> {
        let mut k1 = DMatrix::zeros(self.dim, self.dim);
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let hc = C64::from(h);
        self.apply(rho, &mut k1);
        self.apply(&(rho + &k1 * (hc * 0.5)), &mut k2);
        self.apply(&(rho + &k2 * (hc * 0.5)), &mut k3);
        self.apply(&(rho + &k3 * hc), &mut k4);
        rho + (k1 + (k2 + k3) * C64::from(2.0) + k4) * (hc / 6.0)
    }
}

/// Largest entry produced in an off-diagonal atom block when the generator
/// acts on a matrix supported on a single block. Zero when the four atom
/// blocks evolve independently.
pub fn block_coupling_defect(params: &SystemParams, n_max: usize) -> f64 {
    let lv = Liouvillian::new(params, n_max);
    let d = n_max + 1;
    let mut worst = 0.0f64;
    for src in FieldBlock::ALL {
        let (si, sj) = src.atom_indices();
        let mut rho = DMatrix::<C64>::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                rho[(si * d + i, sj * d + j)] = C64::new(1.0 + i as f64, 0.5 * j as f64);
            }
        }
        let mut out = DMatrix::zeros(2 * d, 2 * d);
        lv.apply(&rho, &mut out);
        for dst in FieldBlock::ALL {
            if dst == src {
                continue;
            }
            let (di, dj) = dst.atom_indices();
            let block = out.view((di * d, dj * d), (d, d));
            worst = worst.max(block.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

/// How the integrator chooses its steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    /// Classical RK4 with a constant step (the last step is shortened to land on `t_final`).
    Fixed(f64),
    /// RK4 with step doubling; the local error estimate is kept below `tol`.
    Adaptive { tol: f64, initial_step: f64 },
}

/// Integration statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub max_trace_drift: f64,
    pub max_hermiticity_defect: f64,
    pub max_top_population: f64,
}

fn check_step(state: &FockJointState, stats: &mut StepStats) -> Result<()> {
    let drift = (state.trace() - ONE).norm();
    let defect = state.hermiticity_defect();
    let top = state.top_population();
    stats.max_trace_drift = stats.max_trace_drift.max(drift);
    stats.max_hermiticity_defect = stats.max_hermiticity_defect.max(defect);
    stats.max_top_population = stats.max_top_population.max(top);
    if drift > TRACE_DRIFT_BOUND {
        return Err(Error::StepFailure {
            t: state.t,
            reason: format!("trace drift {drift:e}"),
        });
    }
    if defect > HERMITICITY_BOUND {
        return Err(Error::StepFailure {
            t: state.t,
            reason: format!("hermiticity defect {defect:e}"),
        });
    }
    if top > MAX_FOCK_TAIL {
        return Err(Error::TruncationTooSmall {
            n_max: state.n_max,
            tail: top,
            bound: MAX_FOCK_TAIL,
        });
    }
    Ok(())
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates from the initial product state, returning the state at each of
/// the requested (non-decreasing) `times`.
pub fn evolve_checkpoints(
    params: &SystemParams,
    times: &[f64],
    n_max: usize,
    control: StepControl,
) -> Result<(Vec<FockJointState>, StepStats)> {
    params.validate()?;
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: "checkpoints must be non-decreasing".into(),
        });
    }
    if n_max < 1 {
        return Err(Error::TruncationTooSmall {
            n_max,
            tail: 1.0,
            bound: MAX_FOCK_TAIL,
        });
    }
    let (mut h, tol) = match control {
        StepControl::Fixed(h) => (h, None),
        StepControl::Adaptive { tol, initial_step } => (initial_step, Some(tol)),
    };
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("{h} must be finite and > 0"),
        });
    }
    if let Some(tol) = tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("{tol} must be finite and > 0"),
            });
        }
    }

    let lv = Liouvillian::new(params, n_max);
    let mut state = FockJointState::initial(params, n_max)?;
    let mut stats = StepStats::default();
    let mut out = Vec::with_capacity(times.len());
    let mut steps = 0usize;

    for &target in times {
        while state.t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepFailure {
                    t: state.t,
                    reason: "step budget exhausted".into(),
                });
            }
            let remaining = target - state.t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            match tol {
                None => {
                    state.matrix = lv.rk4_step(&state.matrix, step);
                }
                Some(tol) => {
                    let full = lv.rk4_step(&state.matrix, step);
                    let half = lv.rk4_step(&state.matrix, 0.5 * step);
                    let two_halves = lv.rk4_step(&half, 0.5 * step);
                    let err = max_abs(&(&two_halves - &full)) / 15.0;
                    if !err.is_finite() {
                        return Err(Error::StepFailure {
                            t: state.t,
                            reason: "non-finite error estimate".into(),
                        });
                    }
                    let factor = if err == 0.0 {
                        4.0
                    } else {
                        (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0)
                    };
                    if err > tol {
                        stats.rejected += 1;
                        h = step * factor;
                        if h < MIN_STEP_FRACTION * target.max(1.0) {
                            return Err(Error::StepFailure {
                                t: state.t,
                                reason: format!("step size underflow with tol {tol:e}"),
                            });
                        }
                        continue;
                    }
                    state.matrix = two_halves;
                    if !last {
                        h = step * factor;
                    }
                }
            }
            state.t = if last { target } else { state.t + step };
            stats.accepted += 1;
            check_step(&state, &mut stats)?;
        }
        out.push(state.clone());
    }
    Ok((out, stats))
}

/// `rho(t_final)` with step-doubling RK4 at local error `tol`, starting from
/// [`default_step`].
pub fn evolve_lindblad(
    params: &SystemParams,
    t_final: f64,
    n_max: usize,
    tol: f64,
) -> Result<FockJointState> {
    let control = StepControl::Adaptive {
        tol,
        initial_step: default_step(params),
    };
    let (mut states, _) = evolve_checkpoints(params, &[t_final], n_max, control)?;
    Ok(states.pop().expect("one checkpoint"))
}

/// `rho(t_final)` with constant-step RK4.
pub fn evolve_lindblad_fixed(
    params: &SystemParams,
    t_final: f64,
    n_max: usize,
    step: f64,
) -> Result<FockJointState> {
    let (mut states, _) = evolve_checkpoints(params, &[t_final], n_max, StepControl::Fixed(step))?;
    Ok(states.pop().expect("one checkpoint"))
}

/// A Fock-space state compressed to the field-qubit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedState {
    pub state: TwoQubitState,
    /// `Tr rho - Tr P rho P`, the weight outside `span{|alpha>, |-alpha>}`.
    pub leakage: f64,
}

/// Compresses `state` onto `{|+>, |->} (x) {v1, v2}` built from `alpha`.
pub fn project_to_qubit(
    state: &FockJointState,
    alpha: C64,
    max_leakage: f64,
) -> Result<ProjectedState> {
    let basis = field_qubit_basis(alpha)?;
    let (v1, v2) = basis.to_fock(state.n_max)?;
    let d = state.field_dim();
    let mut w = DMatrix::<C64>::zeros(2 * d, 4);
    for s in 0..2 {
        for (m, v) in [&v1, &v2].into_iter().enumerate() {
            w.view_mut((s * d, 2 * s + m), (d, 1)).copy_from(v);
        }
    }
    let compressed = w.adjoint() * &state.matrix * &w;
    let m4 = Matrix4::from_fn(|i, j| compressed[(i, j)]);
    let leakage = (state.trace() - m4.trace()).re;
    if !(leakage.abs() <= max_leakage) {
        return Err(Error::ExcessLeakage {
            leakage,
            bound: max_leakage,
        });
    }
    Ok(ProjectedState {
        state: TwoQubitState::from_matrix_unchecked(m4),
        leakage,
    })
}

/// `<m|D(beta)|n>` for `m, n <= n_max`, from generalized Laguerre polynomials.
pub fn displacement_matrix(beta: C64, n_max: usize) -> DMatrix<C64> {
    let d = n_max + 1;
    let r2 = beta.norm_sqr();
    let gauss = (-0.5 * r2).exp();
    let mut out = DMatrix::<C64>::zeros(d, d);
    for n in 0..d {
        for m in n..d {
            let k = m - n;
            // sqrt(n!/m!) beta^k
            let mut pref = ONE;
            for j in (n + 1)..=m {
                pref *= beta / (j as f64).sqrt();
            }
            let lag = laguerre(n, k as f64, r2);
            out[(m, n)] = pref * gauss * lag;
            if k > 0 {
                let mut pref_t = ONE;
                for j in (n + 1)..=m {
                    pref_t *= -beta.conj() / (j as f64).sqrt();
                }
                out[(n, m)] = pref_t * gauss * lag;
            }
        }
    }
    out
}

/// `L_n^{(a)}(x)` by the three-term recurrence.
fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
