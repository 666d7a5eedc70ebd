//! Executes a validated configuration and writes its outputs.
//!
//! Every run produces one CSV table plus a JSON summary next to it. CSV
//! files are byte-deterministic: floats are printed with 17 significant
//! digits, negative zero is folded into zero, and rows follow a fixed
//! order. Files are written to a temporary sibling and renamed into place,
//! so a crashed run never leaves a half-written table behind; timing and
//! other run-dependent facts go only into the summary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use spinchain::lindblad::{
    build_liouvillian, evolve_rk4, pure_product_state, EvolveDiagnostics, Liouvillian,
};
use spinchain::meanfield::{
    hysteresis_sweep, integrate, steady_state, tilted_vector, MagnetizationState,
    MeanFieldConfig, MfMode, SteadyStateOptions,
};
use spinchain::observables::{
    concurrence, deviation_series, magnetization, partial_trace, two_point_correlation,
};
use spinchain::spectral::{
    evolve_spectral, spectral_decompose, steady_state_exact, stationarity_residual,
};
use spinchain::spin::{axis_eigenstate, tilted_spinor, Axis3, CMat, Orientation};
use spinchain::Error;

use crate::config::{ExperimentConfig, InitialState, Kind, SolverChoice};

/// Above this Hilbert-space dimension the automatic solver skips the dense
/// eigendecomposition and steps the master equation instead.
const AUTO_SPECTRAL_DIM_CAP: usize = 16;

/// A failed run, carrying enough structure to choose the process exit code.
#[derive(Debug)]
pub enum RunError {
    /// The configuration is unusable (parse error, bad value, unsupported
    /// combination). Exit code 2.
    Config(String),
    /// Filesystem trouble. Exit code 1.
    Io(String),
    /// The solver gave up or refused. Exit code depends on the cause.
    Solver(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io(_) => 1,
            RunError::Solver(e) => match e {
                Error::NotConverged { .. }
                | Error::Diverged { .. }
                | Error::DegenerateSteadyState { .. } => 3,
                Error::CapacityExceeded { .. } => 4,
                Error::SpectralUnreliable { .. } => 5,
                Error::Unsupported(_)
                | Error::InvalidModel(_)
                | Error::GridMismatch(_)
                | Error::SiteOutOfRange { .. }
                | Error::CoincidentSites(_)
                | Error::DimensionMismatch { .. } => 2,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "configuration error: {msg}"),
            RunError::Io(msg) => write!(f, "io error: {msg}"),
            RunError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Solver(e)
    }
}

/// Paths and summary of one completed run.
#[derive(Debug)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub summary: Value,
}

/// Formats a float with 17 significant digits (enough to round-trip an
/// f64). Negative zero is folded into zero so equal values always print
/// identically.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes through a temporary sibling and renames into place, removing the
/// temporary on failure.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<(), RunError> {
    let tmp = tmp_sibling(path);
    let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", path.display()));
    if let Err(e) = fs::write(&tmp, contents) {
        let _ = fs::remove_file(&tmp);
        return Err(io(e));
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// The summary file that belongs to a CSV: `runs/foo.csv` →
/// `runs/foo_summary.json`.
pub fn summary_sibling(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    csv_path.with_file_name(format!("{stem}_summary.json"))
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn push_row(csv: &mut String, cells: &[String]) {
    csv.push_str(&cells.join(","));
    csv.push('\n');
}

/// Run one experiment and write `<csv_path>` plus its summary sibling.
pub fn execute(config: &ExperimentConfig, csv_path: &Path) -> Result<RunOutput, RunError> {
    config.validate().map_err(RunError::Config)?;
    let started = Instant::now();
    let (csv, mut summary) = match config.kind {
        Kind::Dynamics => run_dynamics(config)?,
        Kind::Hysteresis => run_hysteresis(config)?,
        Kind::Compare => {
            if config.bz_grid.is_some() {
                run_steady_sweep(config)?
            } else {
                run_compare(config)?
            }
        }
        Kind::Correlations => run_correlations(config)?,
        Kind::Spectrum => run_spectrum(config)?,
    };
    summary["wall_time_s"] = json!(started.elapsed().as_secs_f64());
    if let Some(seed) = config.seed {
        summary["seed"] = json!(seed);
    }
    summary["csv"] = json!(csv_path.display().to_string());

    let summary_path = summary_sibling(csv_path);
    write_atomic(csv_path, &csv)?;
    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| RunError::Io(format!("summary serialization: {e}")))?;
    text.push('\n');
    if let Err(e) = write_atomic(&summary_path, &text) {
        // Do not leave a table without the summary that explains it.
        let _ = fs::remove_file(csv_path);
        return Err(e);
    }
    Ok(RunOutput {
        csv_path: csv_path.to_path_buf(),
        summary_path,
        summary,
    })
}

fn initial_magnetization(config: &ExperimentConfig, mf: &MeanFieldConfig) -> MagnetizationState {
    let m = match config.initial_state {
        InitialState::AllUpX => [1.0, 0.0, 0.0],
        InitialState::AllUpZ => [0.0, 0.0, 1.0],
        InitialState::Tilted { theta, phi } => tilted_vector(theta, phi),
    };
    match mf.mf_mode {
        MfMode::Collective => MagnetizationState::collective(m),
        MfMode::PerSite => MagnetizationState::uniform_per_site(mf.model.n_sites, m),
    }
}

fn initial_density(config: &ExperimentConfig, n_sites: usize) -> Result<CMat, RunError> {
    let amplitudes = match config.initial_state {
        InitialState::AllUpX => axis_eigenstate(Axis3::X, Orientation::Up).amplitudes,
        InitialState::AllUpZ => axis_eigenstate(Axis3::Z, Orientation::Up).amplitudes,
        InitialState::Tilted { theta, phi } => tilted_spinor(theta, phi),
    };
    Ok(pure_product_state(&vec![amplitudes; n_sites])?)
}

fn mf_config(config: &ExperimentConfig) -> Result<MeanFieldConfig, RunError> {
    config
        .meanfield
        .to_mf_config(config.model.to_chain_model())
        .map_err(RunError::Config)
}

fn run_dynamics(config: &ExperimentConfig) -> Result<(String, Value), RunError> {
    let mf = mf_config(config)?;
    let m0 = initial_magnetization(config, &mf);
    let series = integrate(&mf, &m0, config.t_end, config.dt, config.sample_every)?;

    let mut csv = String::from("t,Mx,My,Mz,Mnorm\n");
    for (t, state) in series.times.iter().zip(&series.states) {
        let m = state.average();
        push_row(
            &mut csv,
            &[
                fmt_float(*t),
                fmt_float(m[0]),
                fmt_float(m[1]),
                fmt_float(m[2]),
                fmt_float(norm3(m)),
            ],
        );
    }

    let first = series.states[0].average();
    let last = series.states[series.states.len() - 1].average();
    let summary = json!({
        "kind": "dynamics",
        "solver_path": "reduced_rk4",
        "damping": config.damping_mode_label(),
        "samples": series.times.len(),
        "terminal_time": series.times[series.times.len() - 1],
        "terminal_magnetization": last,
        "magnitude_drift": (norm3(last) - norm3(first)).abs(),
    });
    Ok((csv, summary))
}

fn run_hysteresis(config: &ExperimentConfig) -> Result<(String, Value), RunError> {
    let mf = mf_config(config)?;
    let grid = config
        .bz_grid
        .as_ref()
        .expect("validated")
        .points()
        .map_err(RunError::Config)?;
    let opts = SteadyStateOptions {
        t_max: config.steady_t_max,
        dt: config.dt,
        ..Default::default()
    };
    let curve = hysteresis_sweep(&mf, &grid, &opts)?;

    let mut csv = String::from("branch,Bz,Mz,Mx,My\n");
    for (branch, points) in [("up", &curve.branch_up), ("down", &curve.branch_down)] {
        for p in points {
            push_row(
                &mut csv,
                &[
                    branch.to_string(),
                    fmt_float(p.b_z),
                    fmt_float(p.m[2]),
                    fmt_float(p.m[0]),
                    fmt_float(p.m[1]),
                ],
            );
        }
    }

    let summary = json!({
        "kind": "hysteresis",
        "solver_path": "quasi_static_continuation",
        "points_per_branch": grid.len(),
        "switch_up": curve.switch_up,
        "switch_down": curve.switch_down,
        "coercive_field": curve.coercive_field,
    });
    Ok((csv, summary))
}

/// The exact trajectory sampled on the shared grid, with a record of which
/// propagator produced it.
struct ExactPath {
    times: Vec<f64>,
    states: Vec<CMat>,
    solver_label: &'static str,
    fallback_reason: Option<String>,
    diagnostics: Option<EvolveDiagnostics>,
}

/// Mirrors the integrators' sampling rule: t = 0, every `sample_every`-th
/// step, and the final step, with `t_end` rounded to whole steps.
fn sample_times(t_end: f64, dt: f64, sample_every: usize) -> Vec<f64> {
    let every = sample_every.max(1);
    let steps = ((t_end / dt).round() as usize).max(1);
    let mut times = vec![0.0];
    for step in 1..=steps {
        if step % every == 0 || step == steps {
            times.push(step as f64 * dt);
        }
    }
    times
}

fn rk4_path(
    lio: &Liouvillian,
    rho0: &CMat,
    config: &ExperimentConfig,
    fallback_reason: Option<String>,
) -> Result<ExactPath, RunError> {
    let series = evolve_rk4(lio, rho0, config.t_end, config.dt, config.sample_every)?;
    Ok(ExactPath {
        times: series.times,
        states: series.states,
        solver_label: "master_equation_rk4",
        fallback_reason,
        diagnostics: Some(series.diagnostics),
    })
}

fn exact_evolution(
    lio: &Liouvillian,
    rho0: &CMat,
    config: &ExperimentConfig,
) -> Result<ExactPath, RunError> {
    let spectral = |reasoned: bool| -> Result<Option<ExactPath>, RunError> {
        let spectrum = match spectral_decompose(lio) {
            Ok(s) => s,
            Err(Error::SpectralUnreliable { condition }) if reasoned => {
                // The automatic solver treats an untrustworthy eigenbasis
                // as a reason to step instead, not to fail.
                return rk4_path(
                    lio,
                    rho0,
                    config,
                    Some(format!(
                        "eigenvector condition estimate {condition:.3e} exceeds the trust \
                         threshold; stepped the master equation instead"
                    )),
                )
                .map(Some);
            }
            Err(e) => return Err(e.into()),
        };
        let times = sample_times(config.t_end, config.dt, config.sample_every);
        let states = evolve_spectral(&spectrum, rho0, &times)?;
        Ok(Some(ExactPath {
            times,
            states,
            solver_label: "spectral",
            fallback_reason: None,
            diagnostics: None,
        }))
    };

    match config.solver {
        SolverChoice::Rk4 => rk4_path(lio, rho0, config, None),
        SolverChoice::Spectral => Ok(spectral(false)?.expect("non-fallback path")),
        SolverChoice::Auto => {
            if lio.dim <= AUTO_SPECTRAL_DIM_CAP {
                Ok(spectral(true)?.expect("fallback handled"))
            } else {
                rk4_path(
                    lio,
                    rho0,
                    config,
                    Some(format!(
                        "Hilbert dimension {} above the automatic eigendecomposition cap of {}",
                        lio.dim, AUTO_SPECTRAL_DIM_CAP
                    )),
                )
            }
        }
    }
}

fn diagnostics_json(d: &Option<EvolveDiagnostics>) -> Value {
    match d {
        None => Value::Null,
        Some(d) => json!({
            "max_trace_deviation": d.max_trace_deviation,
            "max_hermiticity_deviation": d.max_hermiticity_deviation,
            "flagged": d.flagged,
        }),
    }
}

fn run_compare(config: &ExperimentConfig) -> Result<(String, Value), RunError> {
    let model = config.model.to_chain_model();
    // Build the generator first so a capacity refusal arrives before any
    // integration work is spent.
    let lio = build_liouvillian(&model)?;
    let mf = mf_config(config)?;
    let m0 = initial_magnetization(config, &mf);
    let mf_series = integrate(&mf, &m0, config.t_end, config.dt, config.sample_every)?;
    let mf_mags: Vec<[f64; 3]> = mf_series.states.iter().map(|s| s.average()).collect();

    let rho0 = initial_density(config, model.n_sites)?;
    let exact = exact_evolution(&lio, &rho0, config)?;
    let exact_mags: Vec<[f64; 3]> = exact
        .states
        .iter()
        .map(|rho| magnetization(rho, model.n_sites))
        .collect::<Result<_, _>>()?;

    let window = config.window.map_or((0.0, config.t_end), |w| (w[0], w[1]));
    let dev = deviation_series(
        &mf_series.times,
        &mf_mags,
        &exact.times,
        &exact_mags,
        Some(window),
    )?;

    let mut csv = String::from("t,Mx_mf,My_mf,Mz_mf,Mx_exact,My_exact,Mz_exact,dev\n");
    for i in 0..dev.times.len() {
        push_row(
            &mut csv,
            &[
                fmt_float(dev.times[i]),
                fmt_float(mf_mags[i][0]),
                fmt_float(mf_mags[i][1]),
                fmt_float(mf_mags[i][2]),
                fmt_float(exact_mags[i][0]),
                fmt_float(exact_mags[i][1]),
                fmt_float(exact_mags[i][2]),
                fmt_float(dev.values[i]),
            ],
        );
    }

    let max_dev = dev.values.iter().cloned().fold(0.0f64, f64::max);
    let summary = json!({
        "kind": "compare",
        "solver_path": exact.solver_label,
        "fallback_reason": exact.fallback_reason,
        "damping": config.damping_mode_label(),
        "samples": dev.times.len(),
        "avg_deviation": dev.time_average,
        "max_deviation": max_dev,
        "window": [window.0, window.1],
        "terminal_reduced": mf_mags[mf_mags.len() - 1],
        "terminal_exact": exact_mags[exact_mags.len() - 1],
        "diagnostics": diagnostics_json(&exact.diagnostics),
    });
    Ok((csv, summary))
}

fn run_steady_sweep(config: &ExperimentConfig) -> Result<(String, Value), RunError> {
    let mut grid = config
        .bz_grid
        .as_ref()
        .expect("presence checked by caller")
        .points()
        .map_err(RunError::Config)?;
    // Points are computed independently, so order them by field value to
    // keep the table deterministic no matter how the grid was written.
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));

    let opts = SteadyStateOptions {
        t_max: config.steady_t_max,
        dt: config.dt,
        ..Default::default()
    };

    let mut rows = Vec::with_capacity(grid.len());
    let mut max_gap = 0.0f64;
    let mut max_exact_residual = 0.0f64;
    for &b_z in &grid {
        let mut section = config.model.clone();
        section.b_field[2] = b_z;
        let model = section.to_chain_model();

        let lio = build_liouvillian(&model)?;
        let spectrum = spectral_decompose(&lio)?;
        let rho_ss = steady_state_exact(&spectrum)?;
        max_exact_residual = max_exact_residual.max(stationarity_residual(&lio, &rho_ss)?);
        let exact = magnetization(&rho_ss, model.n_sites)?;

        let mf = config
            .meanfield
            .to_mf_config(model)
            .map_err(RunError::Config)?;
        let m0 = initial_magnetization(config, &mf);
        let reduced = steady_state(&mf, &m0, &opts)?.state.average();

        let gap = norm3([
            exact[0] - reduced[0],
            exact[1] - reduced[1],
            exact[2] - reduced[2],
        ]);
        max_gap = max_gap.max(gap);
        rows.push([b_z, reduced[0], reduced[2], exact[0], exact[2]]);
    }

    let mut csv = String::from("Bz,Mx_mf,Mz_mf,Mx_exact,Mz_exact\n");
    for row in &rows {
        push_row(&mut csv, &row.map(fmt_float));
    }

    let summary = json!({
        "kind": "compare_sweep",
        "solver_path": "modal_steady_state",
        "points": grid.len(),
        "max_magnetization_gap": max_gap,
        "max_stationarity_residual": max_exact_residual,
    });
    Ok((csv, summary))
}

fn run_correlations(config: &ExperimentConfig) -> Result<(String, Value), RunError> {
    let model = config.model.to_chain_model();
    let n = model.n_sites;
    let lio = build_liouvillian(&model)?;
    let rho0 = initial_density(config, n)?;
    let exact = exact_evolution(&lio, &rho0, config)?;

    let [site_i, site_j] = config.pair;
    let (lo, hi) = (site_i.min(site_j), site_i.max(site_j));

    let mut corr = Vec::with_capacity(exact.times.len());
    let mut conc = Vec::with_capacity(exact.times.len());
    for rho in &exact.states {
        corr.push(two_point_correlation(rho, lo, hi, Axis3::X, Axis3::X, n)?);
        conc.push(concurrence(&partial_trace(rho, &[lo, hi], n)?)?);
    }

    let mut csv = format!("t,Cxx{lo}{hi},C{lo}{hi}\n");
    for i in 0..exact.times.len() {
        push_row(
            &mut csv,
            &[
                fmt_float(exact.times[i]),
                fmt_float(corr[i]),
                fmt_float(conc[i]),
            ],
        );
    }

    let peak = conc
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite concurrence"))
        .expect("non-empty series");
    let max_corr = corr
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite correlation"))
        .expect("non-empty series");

    // The long-time value, from the stationary state when one exists. A
    // refusal here is informational, not an error: the time series stands
    // on its own. Skipped on chains large enough that the decomposition
    // would dwarf the run itself.
    let stationary_concurrence = (lio.dim <= AUTO_SPECTRAL_DIM_CAP)
        .then(|| spectral_decompose(&lio).ok())
        .flatten()
        .and_then(|s| steady_state_exact(&s).ok())
        .and_then(|rho| partial_trace(&rho, &[lo, hi], n).ok())
        .and_then(|pair| concurrence(&pair).ok());

    let summary = json!({
        "kind": "correlations",
        "solver_path": exact.solver_label,
        "fallback_reason": exact.fallback_reason,
        "pair": [lo, hi],
        "samples": exact.times.len(),
        "max_concurrence": peak.1,
        "peak_time": exact.times[peak.0],
        "initial_concurrence": conc[0],
        "final_concurrence": conc[conc.len() - 1],
        "stationary_concurrence": stationary_concurrence,
        "max_correlation": max_corr.1,
        "diagnostics": diagnostics_json(&exact.diagnostics),
    });
    Ok((csv, summary))
}

fn run_spectrum(config: &ExperimentConfig) -> Result<(String, Value), RunError> {
    let model = config.model.to_chain_model();
    let lio = build_liouvillian(&model)?;
    let spectrum = spectral_decompose(&lio)?;

    let mut csv = String::from("k,lambda_re,lambda_im\n");
    for (k, lambda) in spectrum.eigenvalues.iter().enumerate() {
        push_row(
            &mut csv,
            &[
                (k + 1).to_string(),
                fmt_float(lambda.re),
                fmt_float(lambda.im),
            ],
        );
    }

    let zero_modes = spectrum.zero_mode_count();
    // Slowest nonzero decay rate: the spectral gap of the generator.
    let gap = spectrum
        .eigenvalues
        .iter()
        .skip(zero_modes)
        .map(|l| -l.re)
        .fold(f64::INFINITY, f64::min);
    let steady = if zero_modes == 1 {
        let rho = steady_state_exact(&spectrum)?;
        json!({
            "magnetization": magnetization(&rho, model.n_sites)?,
            "stationarity_residual": stationarity_residual(&lio, &rho)?,
        })
    } else {
        Value::Null
    };

    let summary = json!({
        "kind": "spectrum",
        "solver_path": "spectral",
        "hilbert_dim": spectrum.dim,
        "modes": spectrum.eigenvalues.len(),
        "zero_modes": zero_modes,
        "condition_estimate": spectrum.condition_estimate,
        "spectral_gap": if gap.is_finite() { json!(gap) } else { Value::Null },
        "steady_state": steady,
    });
    Ok((csv, summary))
}
