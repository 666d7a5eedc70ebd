//! `simulate` — command-line driver for open spin-chain experiments.
//!
//! Subcommands:
//! - `run <config.json>`: execute one experiment from a configuration file.
//! - `preset <id> [--out DIR] [--solver ...]`: execute a canned bundle.
//! - `presets`: list the bundles with their full parameter sets.
//! - `spectrum <config.json>`: eigenvalue table of the configured model.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
//! 4 capacity exceeded, 5 spectral decomposition refused as unreliable,
//! 1 anything else (I/O and internal errors).

mod config;
mod presets;
mod runner;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{parse_config, Kind, SolverChoice};
use crate::presets::Preset;
use crate::runner::{execute, fmt_float, write_atomic, RunError, RunOutput};

#[derive(Parser)]
#[command(
    name = "simulate",
    version,
    about = "Open spin-chain simulator: exact master-equation dynamics and the reduced \
             magnetization picture, from JSON configurations or built-in presets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Rk4,
    Spectral,
    Auto,
}

impl From<SolverArg> for SolverChoice {
    fn from(arg: SolverArg) -> Self {
        match arg {
            SolverArg::Rk4 => SolverChoice::Rk4,
            SolverArg::Spectral => SolverChoice::Spectral,
            SolverArg::Auto => SolverChoice::Auto,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Execute one experiment described by a JSON configuration file
    Run {
        /// Path to the configuration
        config: PathBuf,
    },
    /// Execute a named preset bundle
    Preset {
        /// Preset id; `simulate presets` lists them
        id: String,
        /// Directory for the bundle's CSV and summary files
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the exact-evolution solver for every run in the bundle
        #[arg(long)]
        solver: Option<SolverArg>,
    },
    /// List available presets with their full parameter sets
    Presets,
    /// Tabulate the generator's eigenvalues for a configured model
    Spectrum {
        /// Path to the configuration (its `kind` is ignored)
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => run_file(&config, None),
        Command::Spectrum { config } => run_file(&config, Some(Kind::Spectrum)),
        Command::Preset { id, out, solver } => run_preset(&id, &out, solver.map(Into::into)),
        Command::Presets => {
            print!("{}", presets::listing());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report(out: &RunOutput) {
    println!("wrote {}", out.csv_path.display());
    println!("wrote {}", out.summary_path.display());
}

fn run_file(path: &Path, force_kind: Option<Kind>) -> Result<(), RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut config = parse_config(&text).map_err(RunError::Config)?;

    let mut default_csv = path.with_extension("csv");
    if let Some(kind) = force_kind {
        config.kind = kind;
        config.validate().map_err(RunError::Config)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".into());
        default_csv = path.with_file_name(format!("{stem}_spectrum.csv"));
    }
    let csv_path = config
        .output_path
        .clone()
        .map(PathBuf::from)
        .unwrap_or(default_csv);

    let out = execute(&config, &csv_path)?;
    report(&out);
    Ok(())
}

fn run_preset(id: &str, out_dir: &Path, solver: Option<SolverChoice>) -> Result<(), RunError> {
    let preset = presets::find(id).ok_or_else(|| {
        RunError::Config(format!(
            "unknown preset '{id}'; run `simulate presets` for the list"
        ))
    })?;
    fs::create_dir_all(out_dir)
        .map_err(|e| RunError::Io(format!("{}: {e}", out_dir.display())))?;

    let mut written: Vec<PathBuf> = Vec::new();
    let result = run_preset_inner(&preset, out_dir, solver, &mut written);
    if let Err(e) = result {
        // A preset bundle is all-or-nothing: drop whatever this invocation
        // managed to write before the failure.
        for path in &written {
            let _ = fs::remove_file(path);
        }
        return Err(e);
    }
    Ok(())
}

fn run_preset_inner(
    preset: &Preset,
    out_dir: &Path,
    solver: Option<SolverChoice>,
    written: &mut Vec<PathBuf>,
) -> Result<(), RunError> {
    let mut aggregate_values = Vec::new();
    for run in &preset.runs {
        let mut config = run.config.clone();
        if let Some(choice) = solver {
            config.solver = choice;
        }
        let stem = if run.label.is_empty() {
            preset.id.to_string()
        } else {
            format!("{}_{}", preset.id, run.label)
        };
        let out = execute(&config, &out_dir.join(format!("{stem}.csv")))?;
        written.push(out.csv_path.clone());
        written.push(out.summary_path.clone());
        report(&out);
        if preset.aggregate_param.is_some() {
            aggregate_values.push(out.summary.get("avg_deviation").and_then(|v| v.as_f64()));
        }
    }

    if let Some((param, values)) = &preset.aggregate_param {
        let mut csv = format!("{param},avg_dev\n");
        for (value, avg) in values.iter().zip(&aggregate_values) {
            let avg = avg.ok_or_else(|| {
                RunError::Config(format!(
                    "preset '{}' aggregates avg_deviation, but a run produced none",
                    preset.id
                ))
            })?;
            csv.push_str(&format!("{},{}\n", fmt_float(*value), fmt_float(avg)));
        }
        let path = out_dir.join(format!("{}_{}_scan.csv", preset.id, param));
        write_atomic(&path, &csv)?;
        written.push(path.clone());
        println!("wrote {}", path.display());
    }
    Ok(())
}
