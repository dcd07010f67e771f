//! Figure presets and generic sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::config::{AxisSpec, Scenario, ScenarioConfig, Variable};
use crate::error::CliError;
use crate::eval::{check_metrics, describe, grid, metric, resolve};
use crate::output::{Cell, Table};

/// Default axes, metric columns and constant reference column of a preset.
pub struct Preset {
    pub axes: Vec<AxisSpec>,
    pub metrics: Vec<(&'static str, &'static str)>,
    pub reference: Option<(&'static str, f64)>,
}

fn kt_axis() -> AxisSpec {
    AxisSpec::linear(Variable::Kt, 0.0, 6.0, 301)
}

pub fn preset(scenario: Scenario) -> Option<Preset> {
    let p = match scenario {
        Scenario::Fig1 => Preset {
            axes: vec![
                AxisSpec::linear(Variable::Kt, 0.0, 6.0, 101),
                AxisSpec::linear(Variable::G, 0.1, 2.0, 101),
            ],
            metrics: vec![("concurrence", "concurrence")],
            reference: None,
        },
        Scenario::Fig2 => Preset {
            axes: vec![kt_axis()],
            metrics: vec![("concurrence", "concurrence"), ("bell_max", "bell_max")],
            reference: Some(("local_bound", 2.0)),
        },
        Scenario::Fig3 => Preset {
            axes: vec![kt_axis()],
            metrics: vec![
                ("entropy_joint", "entropy_joint"),
                ("entropy_atom", "entropy_atom"),
                ("entropy_field", "entropy_field"),
            ],
            reference: None,
        },
        Scenario::Fig4 => Preset {
            axes: vec![kt_axis()],
            metrics: vec![
                ("optimal_fidelity", "optimal_fidelity_one_qubit"),
                ("average_fidelity", "average_fidelity_one_qubit"),
            ],
            reference: Some(("classical_fidelity", 2.0 / 3.0)),
        },
        Scenario::Fig5 => Preset {
            axes: vec![
                AxisSpec::linear(Variable::Kt, 0.0, 6.0, 101),
                AxisSpec::linear(Variable::Theta, 0.0, PI, 101),
            ],
            metrics: vec![("output_concurrence", "output_concurrence_two_qubit")],
            reference: None,
        },
        Scenario::Fig6 => Preset {
            axes: vec![kt_axis()],
            metrics: vec![
                ("optimal_fidelity", "optimal_fidelity_two_qubit"),
                ("average_fidelity", "average_fidelity_two_qubit"),
            ],
            reference: Some(("classical_fidelity", 2.0 / 5.0)),
        },
        Scenario::Validate | Scenario::Sweep => return None,
    };
    Some(p)
}

/// Evaluates `metrics` over the grid spanned by `axes`, rows in grid order.
pub fn tabulate(
    config: &ScenarioConfig,
    axes: &[AxisSpec],
    metrics: &[(&str, &str)],
    reference: Option<(&str, f64)>,
) -> Result<Table, CliError> {
    let points = grid(axes)?;
    let mut columns: Vec<String> = axes.iter().map(|a| a.variable.name().to_string()).collect();
    columns.extend(metrics.iter().map(|(c, _)| c.to_string()));
    if let Some((name, _)) = reference {
        columns.push(name.to_string());
    }
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|coords| {
            let point = resolve(config, coords)?;
            let mut row: Vec<Cell> = coords.iter().map(|(_, v)| Cell::Num(*v)).collect();
            for (_, name) in metrics {
                let v = metric(name, &point)?;
                if !v.is_finite() {
                    return Err(CliError::Validation(format!(
                        "{name} = {v} at {}",
                        describe(coords)
                    )));
                }
                row.push(Cell::Num(v));
            }
            if let Some((_, v)) = reference {
                row.push(Cell::Num(v));
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(columns);
    table.rows = rows;
    Ok(table)
}

pub fn run_preset(scenario: Scenario, config: &ScenarioConfig) -> Result<Table, CliError> {
    let preset = preset(scenario).expect("figure scenario");
    let axes = match &config.grid {
        Some(axes) if !axes.is_empty() => axes.clone(),
        Some(_) => return Err(CliError::Config("grid is empty".into())),
        None => preset.axes,
    };
    tabulate(config, &axes, &preset.metrics, preset.reference)
}

pub fn run_sweep(config: &ScenarioConfig) -> Result<Table, CliError> {
    let axes = match &config.grid {
        Some(axes) if !axes.is_empty() => axes,
        _ => return Err(CliError::Config("sweep needs a non-empty grid".into())),
    };
    if axes.len() > 2 {
        return Err(CliError::Config(format!(
            "sweep takes one or two axes, got {}",
            axes.len()
        )));
    }
    check_metrics(&config.metrics)?;
    let metrics: Vec<(&str, &str)> = config
        .metrics
        .iter()
        .map(|m| (m.as_str(), m.as_str()))
        .collect();
    let table = tabulate(config, axes, &metrics, None)?;
    if let Some(col) = table.numeric_column("bell_death_residual") {
        if let Some(bad) = col.iter().find(|r| r.abs() >= 1e-9) {
            return Err(CliError::Validation(format!(
                "Bell death root residual {bad:e} exceeds 1e-9"
            )));
        }
    }
    Ok(table)
}

/// One line per metric column: range and location of the maximum.
pub fn summarize(table: &Table, axis_count: usize) -> Vec<String> {
    let mut lines = vec![format!("{} rows", table.rows.len())];
    for name in table.columns.iter().skip(axis_count) {
        let Some(col) = table.numeric_column(name) else {
            continue;
        };
        let Some((imax, vmax)) = col
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            continue;
        };
        let vmin = col.iter().copied().fold(f64::INFINITY, f64::min);
        let at: Vec<String> = table.columns[..axis_count]
            .iter()
            .zip(&table.rows[imax])
            .map(|(c, v)| match v {
                Cell::Num(x) => format!("{c}={x}"),
                Cell::Text(s) => format!("{c}={s}"),
            })
            .collect();
        lines.push(format!(
            "{name}: min {vmin:.6}, max {vmax:.6} at {}",
            if at.is_empty() { "-".to_string() } else { at.join(" ") }
        ));
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_row_at_kt_one() {
        let config = ScenarioConfig::default();
        let table = run_preset(Scenario::Fig2, &config).unwrap();
        assert_eq!(table.columns, ["kt", "concurrence", "bell_max", "local_bound"]);
        assert_eq!(table.rows.len(), 301);
        let row = &table.rows[50];
        assert_eq!(row[0], Cell::Num(1.0));
        let Cell::Num(c) = row[1] else { panic!() };
        let Cell::Num(b) = row[2] else { panic!() };
        assert!((c - 0.6047469).abs() < 1e-6, "{c}");
        assert!((b - 2.2394992).abs() < 1e-6, "{b}");
    }

    #[test]
    fn sweep_rejects_three_axes() {
        let config = ScenarioConfig::parse(
            r#"{"metrics": ["f"], "grid": [
                {"variable": "kt", "values": [1]},
                {"variable": "theta", "values": [1]},
                {"variable": "phi", "values": [1]}]}"#,
        )
        .unwrap();
        assert!(matches!(run_sweep(&config), Err(CliError::Config(_))));
    }
}
