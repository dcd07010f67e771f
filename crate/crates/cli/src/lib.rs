//! Command-line front end: figure datasets, sweeps and the validation suite.

pub mod config;
pub mod error;
pub mod eval;
pub mod output;
pub mod scenarios;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;

use config::{Format, Scenario, ScenarioConfig};
use error::CliError;
use output::Table;

#[derive(Debug, Parser)]
#[command(name = "jclab", version, about = "Driven atom in a lossy cavity: datasets, sweeps and validation")]
pub struct Args {
    pub scenario: Scenario,

    /// JSON scenario configuration.
    #[arg(long)]
    pub config: PathBuf,

    /// Output file; defaults to `output_path` from the config, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Worker threads; 0 uses one per core.
    #[arg(long, env = "JCLAB_THREADS")]
    pub threads: Option<usize>,

    /// Overrides `seed` from the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn resolve_format(args: &Args, config: &ScenarioConfig, out: Option<&Path>) -> Format {
    args.format
        .or(config.format)
        .or_else(|| {
            out.and_then(|p| p.extension())
                .filter(|e| e.eq_ignore_ascii_case("json"))
                .map(|_| Format::Json)
        })
        .unwrap_or_default()
}

fn emit(table: &Table, format: Format, scenario: Scenario, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(format, &scenario.to_string(), &mut w)?;
            w.flush()
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(format, &scenario.to_string(), &mut w)
        }
    }
}

/// Summary lines go to stdout when the data goes to a file, otherwise to stderr.
fn say(lines: &[String], to_stdout: bool) {
    for line in lines {
        if to_stdout {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let mut config = ScenarioConfig::load(&args.config)?;
    if let Some(s) = config.scenario {
        if s != args.scenario {
            return Err(CliError::Config(format!(
                "config is for scenario `{s}` but `{}` was requested",
                args.scenario
            )));
        }
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out: Option<PathBuf> = args
        .out
        .clone()
        .or_else(|| config.output_path.as_ref().map(PathBuf::from));
    let format = resolve_format(args, &config, out.as_deref());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;

    let to_stdout = out.is_some();
    let scenario = args.scenario;
    match scenario {
        Scenario::Validate => {
            let results = pool.install(|| validate::validate(&config, config.seed))?;
            let table = validate::report_table(&results);
            emit(&table, format, scenario, out.as_deref())?;
            let lines: Vec<String> = results
                .iter()
                .map(|r| {
                    let dev = r
                        .max_deviation
                        .map_or_else(|| "error".to_string(), |d| format!("{d:.3e}"));
                    let status = if r.passed() { "PASS" } else { "FAIL" };
                    let mut line = format!(
                        "{status} {}: max deviation {dev} (bound {:e}, {} points)",
                        r.name, r.bound, r.points
                    );
                    if !r.detail.is_empty() {
                        line.push_str(&format!("; {}", r.detail));
                    }
                    line
                })
                .collect();
            say(&lines, to_stdout);
            let failed: Vec<&str> = results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Scenario::Sweep => {
            let table = pool.install(|| scenarios::run_sweep(&config))?;
            emit(&table, format, scenario, out.as_deref())?;
            let axes = config.grid.as_ref().map_or(0, Vec::len);
            say(&scenarios::summarize(&table, axes), to_stdout);
            Ok(())
        }
        fig => {
            let table = pool.install(|| scenarios::run_preset(fig, &config))?;
            emit(&table, format, scenario, out.as_deref())?;
            let axes = config
                .grid
                .as_ref()
                .map_or_else(|| scenarios::preset(fig).map_or(0, |p| p.axes.len()), Vec::len);
            say(&scenarios::summarize(&table, axes), to_stdout);
            Ok(())
        }
    }
}
