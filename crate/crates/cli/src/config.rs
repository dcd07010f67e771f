//! Scenario configuration, read from a single JSON document.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Validate,
    Sweep,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Validate => "validate",
            Scenario::Sweep => "sweep",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Quantities a grid axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// Dimensionless time `k t`.
    Kt,
    T,
    G,
    K,
    GOverK,
    Theta,
    Phi,
    /// Polar angle of the teleported input.
    Vartheta,
    /// Azimuth of the teleported input.
    Varphi,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Kt => "kt",
            Variable::T => "t",
            Variable::G => "g",
            Variable::K => "k",
            Variable::GOverK => "g_over_k",
            Variable::Theta => "theta",
            Variable::Phi => "phi",
            Variable::Vartheta => "vartheta",
            Variable::Varphi => "varphi",
        }
    }
}

impl FromStr for Variable {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| CliError::Config(format!("unknown grid variable `{s}`")))
    }
}

/// One grid axis: either `min`, `max`, `points` or an explicit `values` list.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub variable: Variable,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub values: Option<Vec<f64>>,
}

impl AxisSpec {
    pub fn linear(variable: Variable, min: f64, max: f64, points: usize) -> Self {
        Self {
            variable,
            min: Some(min),
            max: Some(max),
            points: Some(points),
            values: None,
        }
    }

    pub fn list(variable: Variable, values: &[f64]) -> Self {
        Self {
            variable,
            min: None,
            max: None,
            points: None,
            values: Some(values.to_vec()),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let name = self.variable.name();
        if let Some(values) = &self.values {
            if self.min.is_some() || self.max.is_some() || self.points.is_some() {
                return Err(CliError::Config(format!(
                    "axis `{name}`: give either `values` or `min`/`max`/`points`"
                )));
            }
            if values.is_empty() {
                return Err(CliError::Config(format!("axis `{name}`: empty value list")));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config(format!("axis `{name}`: non-finite value")));
            }
            return Ok(values.clone());
        }
        let (Some(min), Some(max), Some(points)) = (self.min, self.max, self.points) else {
            return Err(CliError::Config(format!(
                "axis `{name}`: `min`, `max` and `points` are all required"
            )));
        };
        if points < 2 {
            return Err(CliError::Config(format!("axis `{name}`: points must be >= 2")));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(CliError::Config(format!(
                "axis `{name}`: need finite min < max, got {min} and {max}"
            )));
        }
        let step = (max - min) / (points - 1) as f64;
        Ok((0..points)
            .map(|i| if i + 1 == points { max } else { min + step * i as f64 })
            .collect())
    }
}

/// Defaults for every point of the grid.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaseParams {
    pub g: f64,
    pub k: f64,
    pub theta: f64,
    pub phi: f64,
    /// Time used when no axis sets `t` or `kt`.
    pub t: f64,
}

impl Default for BaseParams {
    fn default() -> Self {
        Self {
            g: 1.0,
            k: 1.0,
            theta: FRAC_PI_2,
            phi: 0.0,
            t: 1.0,
        }
    }
}

/// Pure input state for the teleportation metrics.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputState {
    pub vartheta: f64,
    pub varphi: f64,
}

impl Default for InputState {
    fn default() -> Self {
        Self {
            vartheta: FRAC_PI_2,
            varphi: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub params: BaseParams,
    pub input: InputState,
    pub grid: Option<Vec<AxisSpec>>,
    /// Metric names, used by `sweep`.
    pub metrics: Vec<String>,
    /// Fock truncation override for the oracle.
    pub fock_dim: Option<usize>,
    /// Local error tolerance of the oracle integrator.
    pub tol: f64,
    /// Haar samples per point for the sampled fidelity check.
    pub samples: usize,
    pub seed: u64,
    pub output_path: Option<String>,
    pub format: Option<Format>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            params: BaseParams::default(),
            input: InputState::default(),
            grid: None,
            metrics: Vec::new(),
            fock_dim: None,
            tol: 1e-10,
            samples: 10_000,
            seed: 0,
            output_path: None,
            format: None,
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), CliError> {
        let p = &self.params;
        if !(p.g.is_finite() && p.g > 0.0) {
            return Err(CliError::Config(format!("params.g = {} must be > 0", p.g)));
        }
        if !(p.k.is_finite() && p.k >= 0.0) {
            return Err(CliError::Config(format!("params.k = {} must be >= 0", p.k)));
        }
        if !(0.0..=PI).contains(&p.theta) {
            return Err(CliError::Config(format!("params.theta = {} outside [0, pi]", p.theta)));
        }
        if !(0.0..TAU).contains(&p.phi) {
            return Err(CliError::Config(format!("params.phi = {} outside [0, 2 pi)", p.phi)));
        }
        if !(p.t.is_finite() && p.t >= 0.0) {
            return Err(CliError::Config(format!("params.t = {} must be >= 0", p.t)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Config(format!("tol = {} must be > 0", self.tol)));
        }
        if self.samples < 2 {
            return Err(CliError::Config("samples must be >= 2".into()));
        }
        if let Some(grid) = &self.grid {
            for (i, axis) in grid.iter().enumerate() {
                axis.values()?;
                if grid[..i].iter().any(|a| a.variable == axis.variable) {
                    return Err(CliError::Config(format!(
                        "axis `{}` appears twice",
                        axis.variable.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_document() {
        let c = ScenarioConfig::parse("{}").unwrap();
        assert_eq!(c.params, BaseParams::default());
        assert_eq!(c.tol, 1e-10);
        assert!(c.grid.is_none());
    }

    #[test]
    fn linear_axis_hits_both_ends() {
        let v = AxisSpec::linear(Variable::Kt, 0.0, 6.0, 301).values().unwrap();
        assert_eq!(v.len(), 301);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[300], 6.0);
        assert_eq!(v[50], 1.0);
    }

    #[test]
    fn rejects_bad_axes() {
        for doc in [
            r#"{"grid": [{"variable": "kt", "min": 1, "max": 0, "points": 3}]}"#,
            r#"{"grid": [{"variable": "kt", "min": 0, "max": 1, "points": 1}]}"#,
            r#"{"grid": [{"variable": "kt", "values": []}]}"#,
            r#"{"grid": [{"variable": "speed", "values": [1]}]}"#,
            r#"{"grid": [{"variable": "kt", "values": [1]}, {"variable": "kt", "values": [2]}]}"#,
            r#"{"params": {"theta": 4}}"#,
            r#"{"bogus": 1}"#,
        ] {
            assert!(matches!(ScenarioConfig::parse(doc), Err(CliError::Config(_))), "{doc}");
        }
    }

    #[test]
    fn variable_names_round_trip() {
        for v in [Variable::Kt, Variable::GOverK, Variable::Varphi] {
            assert_eq!(v.name().parse::<Variable>().unwrap(), v);
        }
    }
}
