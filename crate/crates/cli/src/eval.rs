//! Grid points and the metric registry.

use jclab_core::metrics::{
    bell_violation_residual, concurrence_closed_form, entanglement_of_formation,
    linear_entropies_closed_form,
};
use jclab_core::{
    bell_death_time, bell_max, bell_max_closed_form, concurrence, joint_state, one_qubit_report,
    scalar_profile, two_qubit_report, BlochAngles, SystemParams,
};

use crate::config::{AxisSpec, ScenarioConfig, Variable};
use crate::error::CliError;

/// Metric names accepted by `sweep`.
pub const METRICS: &[&str] = &[
    "alpha_abs",
    "f",
    "x",
    "concurrence",
    "concurrence_wootters",
    "eof",
    "bell_max",
    "bell_max_closed_form",
    "entropy_joint",
    "entropy_atom",
    "entropy_field",
    "p0",
    "p1",
    "p2",
    "p3",
    "fidelity_one_qubit",
    "average_fidelity_one_qubit",
    "optimal_fidelity_one_qubit",
    "fidelity_two_qubit",
    "output_concurrence_two_qubit",
    "average_fidelity_two_qubit",
    "optimal_fidelity_two_qubit",
    "bell_death_time",
    "bell_death_kt",
    "bell_death_residual",
];

pub fn check_metrics(names: &[String]) -> Result<(), CliError> {
    if names.is_empty() {
        return Err(CliError::Config("no metrics requested".into()));
    }
    for name in names {
        if !METRICS.contains(&name.as_str()) {
            return Err(CliError::Config(format!(
                "unknown metric `{name}`; known metrics: {}",
                METRICS.join(", ")
            )));
        }
    }
    Ok(())
}

/// Fully resolved inputs for one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub params: SystemParams,
    pub t: f64,
    pub input: BlochAngles,
}

impl Point {
    pub fn kt(&self) -> f64 {
        self.params.k * self.t
    }
}

/// One entry per axis, in axis order.
pub type Coordinates = Vec<(Variable, f64)>;

/// Cartesian product of the axes; the first axis varies slowest.
pub fn grid(axes: &[AxisSpec]) -> Result<Vec<Coordinates>, CliError> {
    let mut rows: Vec<Coordinates> = vec![Vec::new()];
    for axis in axes {
        let values = axis.values()?;
        rows = rows
            .into_iter()
            .flat_map(|row| {
                values.iter().map(move |&v| {
                    let mut next = row.clone();
                    next.push((axis.variable, v));
                    next
                })
            })
            .collect();
    }
    Ok(rows)
}

/// Applies coordinates over the config defaults. Rates come first so that
/// `g_over_k` and `kt` see the final `k`.
pub fn resolve(config: &ScenarioConfig, coords: &[(Variable, f64)]) -> Result<Point, CliError> {
    let base = &config.params;
    let get = |var: Variable| coords.iter().find(|(v, _)| *v == var).map(|(_, x)| *x);
    let k = get(Variable::K).unwrap_or(base.k);
    let mut g = get(Variable::G).unwrap_or(base.g);
    if let Some(ratio) = get(Variable::GOverK) {
        if get(Variable::G).is_some() {
            return Err(CliError::Config("axes `g` and `g_over_k` are exclusive".into()));
        }
        g = ratio * k;
    }
    let theta = get(Variable::Theta).unwrap_or(base.theta);
    let phi = get(Variable::Phi).unwrap_or(base.phi);
    let params = SystemParams::new(g, k, theta, phi)
        .map_err(|e| CliError::from_core(&describe(coords), e))?;
    let t = match (get(Variable::T), get(Variable::Kt)) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("axes `t` and `kt` are exclusive".into()));
        }
        (Some(t), None) => t,
        (None, Some(kt)) => {
            if k <= 0.0 {
                return Err(CliError::Config("axis `kt` needs k > 0".into()));
            }
            kt / k
        }
        (None, None) => base.t,
    };
    if !(t.is_finite() && t >= 0.0) {
        return Err(CliError::Config(format!("time {t} at {}", describe(coords))));
    }
    let vartheta = get(Variable::Vartheta).unwrap_or(config.input.vartheta);
    let varphi = get(Variable::Varphi).unwrap_or(config.input.varphi);
    let input = BlochAngles::new(vartheta, varphi)
        .map_err(|e| CliError::from_core(&describe(coords), e))?;
    Ok(Point { params, t, input })
}

pub fn describe(coords: &[(Variable, f64)]) -> String {
    if coords.is_empty() {
        return "base point".into();
    }
    coords
        .iter()
        .map(|(v, x)| format!("{}={x}", v.name()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Evaluates one metric at one point.
pub fn metric(name: &str, point: &Point) -> Result<f64, CliError> {
    let Point { params, t, input } = point;
    let at = || format!("{name} at g={} k={} theta={} phi={} t={t}", params.g, params.k, params.theta, params.phi);
    let core = |e| CliError::from_core(&at(), e);
    let value = match name {
        "alpha_abs" => scalar_profile(params, *t).map_err(core)?.amplitude(),
        "f" => scalar_profile(params, *t).map_err(core)?.f,
        "x" => scalar_profile(params, *t).map_err(core)?.x,
        "concurrence" => concurrence_closed_form(params, *t).map_err(core)?,
        "concurrence_wootters" => {
            concurrence(&joint_state(params, *t).map_err(core)?).map_err(core)?
        }
        "eof" => {
            let c = concurrence_closed_form(params, *t).map_err(core)?;
            entanglement_of_formation(c).map_err(core)?
        }
        "bell_max" => bell_max(&joint_state(params, *t).map_err(core)?),
        "bell_max_closed_form" => bell_max_closed_form(params, *t).map_err(core)?,
        "entropy_joint" => linear_entropies_closed_form(params, *t).map_err(core)?.joint,
        "entropy_atom" => linear_entropies_closed_form(params, *t).map_err(core)?.atom,
        "entropy_field" => linear_entropies_closed_form(params, *t).map_err(core)?.field,
        "p0" | "p1" | "p2" | "p3" => {
            let i = (name.as_bytes()[1] - b'0') as usize;
            one_qubit_report(params, *t, input).map_err(core)?.probabilities.p[i]
        }
        "fidelity_one_qubit" => one_qubit_report(params, *t, input).map_err(core)?.fidelity,
        "average_fidelity_one_qubit" => {
            one_qubit_report(params, *t, input).map_err(core)?.average_fidelity
        }
        "optimal_fidelity_one_qubit" => {
            one_qubit_report(params, *t, input).map_err(core)?.optimal_fidelity
        }
        "fidelity_two_qubit" => two_qubit_report(params, *t, input).map_err(core)?.fidelity,
        "output_concurrence_two_qubit" => two_qubit_report(params, *t, input)
            .map_err(core)?
            .output_concurrence
            .unwrap_or(0.0),
        "average_fidelity_two_qubit" => {
            two_qubit_report(params, *t, input).map_err(core)?.average_fidelity
        }
        "optimal_fidelity_two_qubit" => {
            two_qubit_report(params, *t, input).map_err(core)?.optimal_fidelity
        }
        "bell_death_time" => bell_death_time(params).map_err(core)?,
        "bell_death_kt" => params.k * bell_death_time(params).map_err(core)?,
        "bell_death_residual" => {
            let t_star = bell_death_time(params).map_err(core)?;
            bell_violation_residual(params, t_star).map_err(core)?
        }
        other => return Err(CliError::Config(format!("unknown metric `{other}`"))),
    };
    Ok(value)
}
