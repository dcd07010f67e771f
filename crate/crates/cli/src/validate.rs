//! Closed form against the Fock-space integrator and the numeric metrics.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

use jclab_core::metrics::{
    concurrence_closed_form, entanglement_of_formation, linear_entropies,
    linear_entropies_closed_form, search_bell_settings,
};
use jclab_core::oracle::{default_step, evolve_checkpoints, DEFAULT_MAX_LEAKAGE};
use jclab_core::teleport::{
    average_fidelity_p0, average_fidelity_p0_closed_form, average_fidelity_p1_closed_form,
    channel_probabilities, channel_probabilities_closed_form, fidelity, fidelity_formula,
    monte_carlo_average_fidelity, output_concurrence_p1, output_concurrence_wootters,
    teleport_one_qubit, two_qubit_fidelity_formula, two_qubit_report, TeleportedState,
};
use jclab_core::{
    bell_max, bell_max_closed_form, concurrence, joint_state, project_to_qubit, scalar_profile,
    truncation_policy, BlochAngles, StepControl, SystemParams,
};
use rayon::prelude::*;

use crate::config::{AxisSpec, ScenarioConfig, Variable};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const ORACLE_BOUND: f64 = 1e-6;
pub const CLOSED_FORM_BOUND: f64 = 1e-10;
pub const BELL_SEARCH_BOUND: f64 = 1e-6;
pub const BELL_SEARCH_SAMPLES: usize = 1000;
/// Standard errors allowed between the sampled and closed-form average fidelity.
pub const MONTE_CARLO_SIGMAS: f64 = 3.0;

/// Values of each validation axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationGrid {
    pub ratio: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub kt: Vec<f64>,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self {
            ratio: vec![0.5, 1.0, 2.0],
            theta: vec![FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4],
            phi: vec![0.0, FRAC_PI_3],
            kt: vec![0.25, 0.5, 1.0, 2.0, 4.0],
        }
    }
}

impl ValidationGrid {
    /// Default grid with any axis present in `axes` replaced.
    pub fn from_axes(axes: Option<&[AxisSpec]>) -> Result<Self, CliError> {
        let mut grid = Self::default();
        for axis in axes.unwrap_or_default() {
            let values = axis.values()?;
            match axis.variable {
                Variable::GOverK => grid.ratio = values,
                Variable::Theta => grid.theta = values,
                Variable::Phi => grid.phi = values,
                Variable::Kt => {
                    let mut v = values;
                    v.sort_by(f64::total_cmp);
                    grid.kt = v;
                }
                other => {
                    return Err(CliError::Config(format!(
                        "validate accepts axes g_over_k, theta, phi and kt, not `{}`",
                        other.name()
                    )))
                }
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.ratio.len() * self.theta.len() * self.phi.len() * self.kt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Worst deviation of one check over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub points: usize,
    pub max_deviation: Option<f64>,
    pub bound: f64,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, bound: f64) -> Self {
        Self {
            name,
            points: 0,
            max_deviation: Some(0.0),
            bound,
            detail: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.detail.is_empty() && self.max_deviation.is_some_and(|d| d <= self.bound)
    }

    fn record(&mut self, dev: f64, at: impl FnOnce() -> String) {
        self.points += 1;
        let current = self.max_deviation.unwrap_or(0.0);
        if !dev.is_finite() || dev > current {
            self.max_deviation = Some(if dev.is_finite() { dev } else { f64::MAX });
            if !(dev <= self.bound) && self.detail.is_empty() {
                self.detail = format!("first exceedance at {}", at());
            }
        }
    }

    fn fail(&mut self, message: String) {
        self.max_deviation = None;
        if self.detail.is_empty() {
            self.detail = message;
        }
    }

    fn merge(&mut self, other: CheckResult) {
        self.points += other.points;
        match (self.max_deviation, other.max_deviation) {
            (Some(a), Some(b)) => self.max_deviation = Some(a.max(b)),
            _ => self.max_deviation = None,
        }
        if self.detail.is_empty() {
            self.detail = other.detail;
        }
    }
}

struct Checks {
    oracle: CheckResult,
    wootters: CheckResult,
    horodecki: CheckResult,
    bell_search: CheckResult,
    one_qubit: CheckResult,
    two_qubit: CheckResult,
    /// Sum of `mean - closed` and of the squared standard errors.
    monte_carlo: (f64, f64, usize),
}

impl Checks {
    fn new() -> Self {
        Self {
            oracle: CheckResult::new("oracle_vs_closed_form", ORACLE_BOUND),
            wootters: CheckResult::new("wootters_vs_closed_form", CLOSED_FORM_BOUND),
            horodecki: CheckResult::new("horodecki_vs_closed_form", CLOSED_FORM_BOUND),
            bell_search: CheckResult::new("bell_settings_search", BELL_SEARCH_BOUND),
            one_qubit: CheckResult::new("teleportation_one_qubit", CLOSED_FORM_BOUND),
            two_qubit: CheckResult::new("teleportation_two_qubit", CLOSED_FORM_BOUND),
            monte_carlo: (0.0, 0.0, 0),
        }
    }

    fn merge(&mut self, other: Checks) {
        self.oracle.merge(other.oracle);
        self.wootters.merge(other.wootters);
        self.horodecki.merge(other.horodecki);
        self.bell_search.merge(other.bell_search);
        self.one_qubit.merge(other.one_qubit);
        self.two_qubit.merge(other.two_qubit);
        self.monte_carlo.0 += other.monte_carlo.0;
        self.monte_carlo.1 += other.monte_carlo.1;
        self.monte_carlo.2 += other.monte_carlo.2;
    }
}

fn at(params: &SystemParams, kt: f64) -> String {
    format!(
        "g/k={} theta={} phi={} kt={kt}",
        params.g / params.k,
        params.theta,
        params.phi
    )
}

/// All non-oracle checks at one point; core errors are returned with location.
fn closed_form_checks(
    checks: &mut Checks,
    params: &SystemParams,
    t: f64,
    kt: f64,
    input: &BlochAngles,
    config: &ScenarioConfig,
    seed: u64,
) -> Result<(), String> {
    let loc = || at(params, kt);
    let err = |e: jclab_core::Error| format!("{}: {e}", loc());
    let state = joint_state(params, t).map_err(err)?;

    let c = concurrence(&state).map_err(err)?;
    let c_closed = concurrence_closed_form(params, t).map_err(err)?;
    checks.wootters.record((c - c_closed).abs(), loc);

    let b = bell_max(&state);
    let b_closed = bell_max_closed_form(params, t).map_err(err)?;
    checks.horodecki.record((b - b_closed).abs(), loc);

    let search = search_bell_settings(&state, BELL_SEARCH_SAMPLES, seed);
    let overshoot = (search.value - b).max(0.0);
    let dev = if overshoot > CLOSED_FORM_BOUND {
        f64::MAX
    } else {
        (b - search.value).abs()
    };
    checks.bell_search.record(dev, loc);

    let probs = channel_probabilities(&state).map_err(err)?;
    let p_closed = channel_probabilities_closed_form(params, t).map_err(err)?;
    let mut one = probs
        .p
        .iter()
        .zip(&p_closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let out = teleport_one_qubit(&state, input).map_err(err)?;
    one = one.max((fidelity(input, &out) - fidelity_formula(&probs, input)).abs());
    let avg_closed = average_fidelity_p0_closed_form(params, t).map_err(err)?;
    one = one.max((average_fidelity_p0(&probs) - avg_closed).abs());
    checks.one_qubit.record(one, loc);

    let report = two_qubit_report(params, t, input).map_err(err)?;
    let TeleportedState::TwoQubit(_) = &report.output else {
        return Err(format!("{}: two-qubit report without a two-qubit output", loc()));
    };
    let wootters = output_concurrence_wootters(&report).unwrap_or(f64::NAN);
    let mut two = (wootters - output_concurrence_p1(&probs, input)).abs();
    two = two.max((report.fidelity - two_qubit_fidelity_formula(&probs, input)).abs());
    let avg2 = average_fidelity_p1_closed_form(params, t).map_err(err)?;
    two = two.max((report.average_fidelity - avg2).abs());
    checks.two_qubit.record(two, loc);

    let (mean, se) = monte_carlo_average_fidelity(&probs, config.samples, seed).map_err(err)?;
    checks.monte_carlo.0 += mean - avg_closed;
    checks.monte_carlo.1 += se * se;
    checks.monte_carlo.2 += 1;
    Ok(())
}

fn run_column(
    config: &ScenarioConfig,
    grid: &ValidationGrid,
    params: SystemParams,
    input: &BlochAngles,
    seed: u64,
) -> Checks {
    let mut checks = Checks::new();
    let k = params.k;
    let times: Vec<f64> = grid.kt.iter().map(|kt| kt / k).collect();
    let t_max = times.last().copied().unwrap_or(0.0);

    for (i, (&kt, &t)) in grid.kt.iter().zip(&times).enumerate() {
        if let Err(e) = closed_form_checks(&mut checks, &params, t, kt, input, config, seed.wrapping_add(i as u64)) {
            checks.wootters.fail(e);
            return checks;
        }
    }

    let n = match config.fock_dim {
        Some(n) => n,
        None => match truncation_policy(&params, t_max) {
            Ok(n) => n,
            Err(e) => {
                checks.oracle.fail(format!("{}: {e}", at(&params, t_max * k)));
                return checks;
            }
        },
    };
    let control = StepControl::Adaptive {
        tol: config.tol,
        initial_step: default_step(&params),
    };
    match evolve_checkpoints(&params, &times, n, control) {
        Ok((states, _)) => {
            for (state, (&kt, &t)) in states.iter().zip(grid.kt.iter().zip(&times)) {
                let loc = || format!("{} N={n}", at(&params, kt));
                let alpha = match scalar_profile(&params, t) {
                    Ok(p) => p.alpha,
                    Err(e) => {
                        checks.oracle.fail(format!("{}: {e}", loc()));
                        break;
                    }
                };
                let projected = project_to_qubit(state, alpha, DEFAULT_MAX_LEAKAGE)
                    .and_then(|p| joint_state(&params, t).map(|exact| p.state.max_abs_diff(&exact)));
                match projected {
                    Ok(dev) => checks.oracle.record(dev, loc),
                    Err(e) => {
                        checks.oracle.fail(format!("{}: {e}", loc()));
                        break;
                    }
                }
            }
        }
        Err(e) => checks.oracle.fail(format!("{} N={n}: {e}", at(&params, t_max * k))),
    }
    checks
}

/// The `theta = 0` product state. Entanglement measures must vanish exactly;
/// linear entropies of the numeric state only up to rounding in `1 - Tr rho^2`.
fn theta_zero(config: &ScenarioConfig, grid: &ValidationGrid) -> [CheckResult; 2] {
    let mut exact = CheckResult::new("theta_zero_unentangled", 0.0);
    let mut numeric = CheckResult::new("theta_zero_numeric_entropies", 1e-14);
    for &ratio in &grid.ratio {
        let params = match SystemParams::new(ratio * config.params.k, config.params.k, 0.0, 0.0) {
            Ok(p) => p,
            Err(e) => {
                exact.fail(e.to_string());
                return [exact, numeric];
            }
        };
        for &kt in &grid.kt {
            let t = kt / params.k;
            let values = (|| -> jclab_core::Result<([f64; 6], [f64; 3])> {
                let state = joint_state(&params, t)?;
                let s = linear_entropies(&state);
                let sc = linear_entropies_closed_form(&params, t)?;
                let c = concurrence_closed_form(&params, t)?;
                Ok((
                    [
                        concurrence(&state)?,
                        c,
                        entanglement_of_formation(c)?,
                        sc.joint,
                        sc.atom,
                        sc.field,
                    ],
                    [s.joint, s.atom, s.field],
                ))
            })();
            match values {
                Ok((e, n)) => {
                    let worst = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
                    exact.record(worst(&e), || at(&params, kt));
                    numeric.record(worst(&n), || at(&params, kt));
                }
                Err(e) => {
                    exact.fail(format!("{}: {e}", at(&params, kt)));
                    return [exact, numeric];
                }
            }
        }
    }
    [exact, numeric]
}

pub fn validate(config: &ScenarioConfig, seed: u64) -> Result<Vec<CheckResult>, CliError> {
    let grid = ValidationGrid::from_axes(config.grid.as_deref())?;
    if grid.is_empty() {
        return Err(CliError::Config("validation grid is empty".into()));
    }
    if !(config.params.k > 0.0) {
        return Err(CliError::Config("validate needs params.k > 0".into()));
    }
    if let Some(n) = config.fock_dim {
        if n == 0 {
            return Err(CliError::Config("fock_dim must be >= 1".into()));
        }
    }
    let input = BlochAngles::new(config.input.vartheta, config.input.varphi)
        .map_err(|e| CliError::from_core("input", e))?;

    let mut columns = Vec::new();
    for &ratio in &grid.ratio {
        for &theta in &grid.theta {
            for &phi in &grid.phi {
                let params = SystemParams::new(ratio * config.params.k, config.params.k, theta, phi)
                    .map_err(|e| CliError::from_core("validation grid", e))?;
                columns.push(params);
            }
        }
    }
    let per_column = grid.kt.len() as u64;
    let results: Vec<Checks> = columns
        .par_iter()
        .enumerate()
        .map(|(i, params)| {
            run_column(config, &grid, *params, &input, seed.wrapping_add(i as u64 * per_column))
        })
        .collect();
    let mut total = Checks::new();
    for r in results {
        total.merge(r);
    }

    let mut mc = CheckResult::new("monte_carlo_average_fidelity", MONTE_CARLO_SIGMAS);
    let (sum, var, count) = total.monte_carlo;
    mc.points = count;
    mc.max_deviation = Some(if var > 0.0 { sum.abs() / var.sqrt() } else { 0.0 });

    let [theta_zero_exact, theta_zero_numeric] = theta_zero(config, &grid);
    Ok(vec![
        total.oracle,
        total.wootters,
        total.horodecki,
        total.bell_search,
        total.one_qubit,
        total.two_qubit,
        theta_zero_exact,
        theta_zero_numeric,
        mc,
    ])
}

pub fn report_table(results: &[CheckResult]) -> Table {
    let mut table = Table::new(
        ["check", "points", "max_deviation", "bound", "status", "detail"]
            .map(String::from)
            .to_vec(),
    );
    for r in results {
        table.rows.push(vec![
            Cell::Text(r.name.to_string()),
            Cell::Num(r.points as f64),
            match r.max_deviation {
                Some(d) => Cell::Num(d),
                None => Cell::Text("error".into()),
            },
            Cell::Num(r.bound),
            Cell::Text(if r.passed() { "PASS" } else { "FAIL" }.into()),
            Cell::Text(r.detail.clone()),
        ]);
    }
    table
}
