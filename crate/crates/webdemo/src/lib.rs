//! WebAssembly bindings for the interactive browser demo.
//!
//! Three operations are exposed, each returning flat `Float64Array` row
//! data ready for plotting:
//! - [`reversal_dynamics`]: a uniform chain's average magnetization
//!   relaxing in an axial field, rows `[t, Mx, My, Mz, |M|]`.
//! - [`hysteresis_loop`]: a quasi-static field sweep, rows
//!   `[direction, Bz, Mz, Mx, My]` with direction +1 ascending, −1
//!   descending, plus the switching summary.
//! - [`exact_vs_reduced`]: a small open chain stepped through the full
//!   master equation next to its reduced description, rows
//!   `[t, Mz_reduced, Mz_exact, Mx_reduced, Mx_exact, Cxx12]`.
//!
//! The numerics run without any linear-algebra backend: everything here
//! sticks to time stepping, which is exactly what fits in a browser.

use std::f64::consts::FRAC_PI_4;

use wasm_bindgen::prelude::*;

use spinchain::lindblad::{build_liouvillian, evolve_rk4, pure_product_state};
use spinchain::meanfield::{
    hysteresis_sweep, integrate, tilted_vector, MagnetizationState, MeanFieldConfig, MfMode,
    SteadyStateOptions,
};
use spinchain::model::ChainModel;
use spinchain::observables::{magnetization, two_point_correlation};
use spinchain::spin::{axis_eigenstate, Axis3, Orientation};

/// Plots stay responsive when a trajectory is thinned to about this many
/// samples.
const MAX_POINTS: usize = 1200;

fn stride_for(steps: usize) -> usize {
    steps.div_ceil(MAX_POINTS).max(1)
}

fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<(), String> {
    if !value.is_finite() || !(lo..=hi).contains(&value) {
        return Err(format!("{name} must lie in [{lo}, {hi}], got {value}"));
    }
    Ok(())
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Reduced relaxation trajectory; rows `[t, Mx, My, Mz, |M|]`.
fn reversal_rows(
    b_z: f64,
    v_z: f64,
    alpha: f64,
    theta0: f64,
    t_end: f64,
) -> Result<Vec<f64>, spinchain::Error> {
    let model = ChainModel::closed(500, [0.0, 0.0, b_z], [0.0, 0.0, v_z]);
    let config = MeanFieldConfig::ll_alpha(model, alpha, MfMode::Collective);
    let m0 = MagnetizationState::collective(tilted_vector(theta0, FRAC_PI_4));
    let dt = 1e-3;
    let steps = ((t_end / dt).round() as usize).max(1);
    let series = integrate(&config, &m0, t_end, dt, stride_for(steps))?;

    let mut rows = Vec::with_capacity(series.times.len() * 5);
    for (t, state) in series.times.iter().zip(&series.states) {
        let m = state.average();
        rows.extend_from_slice(&[*t, m[0], m[1], m[2], norm3(m)]);
    }
    Ok(rows)
}

/// Quasi-static loop; rows `[direction, Bz, Mz, Mx, My]` and the switching
/// summary `(coercive, switch_up, switch_down)` with `NaN` marking a
/// branch that never switches.
fn loop_rows(
    v_z: f64,
    b_xy: f64,
    alpha: f64,
    points: usize,
) -> Result<(Vec<f64>, [f64; 3]), spinchain::Error> {
    let model = ChainModel::closed(500, [b_xy, b_xy, 0.0], [0.0, 0.0, v_z]);
    let config = MeanFieldConfig::ll_alpha(model, alpha, MfMode::Collective);
    let step = 4.0 / (points as f64 - 1.0);
    let grid: Vec<f64> = (0..points).map(|i| -2.0 + step * i as f64).collect();
    let opts = SteadyStateOptions {
        t_max: 5e3,
        ..Default::default()
    };
    let curve = hysteresis_sweep(&config, &grid, &opts)?;

    let mut rows = Vec::with_capacity(grid.len() * 10);
    for (direction, branch) in [(1.0, &curve.branch_up), (-1.0, &curve.branch_down)] {
        for p in branch {
            rows.extend_from_slice(&[direction, p.b_z, p.m[2], p.m[0], p.m[1]]);
        }
    }
    let summary = [
        curve.coercive_field,
        curve.switch_up.unwrap_or(f64::NAN),
        curve.switch_down.unwrap_or(f64::NAN),
    ];
    Ok((rows, summary))
}

/// Exact-vs-reduced trajectory for a small open chain; rows
/// `[t, Mz_reduced, Mz_exact, Mx_reduced, Mx_exact, Cxx12]`.
fn compare_rows(
    n_sites: usize,
    v_x: f64,
    gamma: f64,
    t_end: f64,
) -> Result<Vec<f64>, spinchain::Error> {
    let model = ChainModel::with_thermal_all_axes_neighbours(
        n_sites,
        [0.25, 0.25, -0.5],
        [v_x, 0.1, 0.1],
        gamma,
        0.08,
        0.1,
    );
    let dt = 2e-3;
    let steps = ((t_end / dt).round() as usize).max(1);
    let stride = stride_for(steps);

    let mf = MeanFieldConfig::fixed_d_from_rates(model.clone(), MfMode::PerSite);
    let m0 = MagnetizationState::uniform_per_site(n_sites, [1.0, 0.0, 0.0]);
    let reduced = integrate(&mf, &m0, t_end, dt, stride)?;

    let lio = build_liouvillian(&model)?;
    let x_up = axis_eigenstate(Axis3::X, Orientation::Up).amplitudes;
    let rho0 = pure_product_state(&vec![x_up; n_sites])?;
    let exact = evolve_rk4(&lio, &rho0, t_end, dt, stride)?;

    let mut rows = Vec::with_capacity(exact.times.len() * 6);
    for i in 0..exact.times.len() {
        let mr = reduced.states[i].average();
        let me = magnetization(&exact.states[i], n_sites)?;
        let cxx = two_point_correlation(&exact.states[i], 1, 2, Axis3::X, Axis3::X, n_sites)?;
        rows.extend_from_slice(&[exact.times[i], mr[2], me[2], mr[0], me[0], cxx]);
    }
    Ok(rows)
}

/// Switching summary of a hysteresis loop, exposed alongside the raw rows.
#[wasm_bindgen]
pub struct LoopResult {
    rows: Vec<f64>,
    coercive: f64,
    switch_up: f64,
    switch_down: f64,
}

#[wasm_bindgen]
impl LoopResult {
    /// Flat rows `[direction, Bz, Mz, Mx, My]`, ascending branch first.
    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> Vec<f64> {
        self.rows.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn coercive(&self) -> f64 {
        self.coercive
    }

    /// Field where the ascending branch flips sign; `NaN` when it never
    /// does.
    #[wasm_bindgen(getter)]
    pub fn switch_up(&self) -> f64 {
        self.switch_up
    }

    #[wasm_bindgen(getter)]
    pub fn switch_down(&self) -> f64 {
        self.switch_down
    }
}

/// Reduced relaxation of a 500-site uniform chain seeded `theta0_deg`
/// degrees off the +z pole. Returns rows `[t, Mx, My, Mz, |M|]`.
#[wasm_bindgen]
pub fn reversal_dynamics(
    b_z: f64,
    v_z: f64,
    alpha: f64,
    theta0_deg: f64,
    t_end: f64,
) -> Result<Vec<f64>, JsError> {
    check_range("B_z", b_z, -5.0, 5.0).map_err(|e| JsError::new(&e))?;
    check_range("V_z", v_z, -5.0, 5.0).map_err(|e| JsError::new(&e))?;
    check_range("alpha", alpha, 0.0, 5.0).map_err(|e| JsError::new(&e))?;
    check_range("theta0", theta0_deg, 0.1, 179.9).map_err(|e| JsError::new(&e))?;
    check_range("t_end", t_end, 1.0, 200.0).map_err(|e| JsError::new(&e))?;
    Ok(reversal_rows(
        b_z,
        v_z,
        alpha,
        theta0_deg.to_radians(),
        t_end,
    )?)
}

/// Quasi-static hysteresis loop over B_z in [−2, 2].
#[wasm_bindgen]
pub fn hysteresis_loop(
    v_z: f64,
    b_xy: f64,
    alpha: f64,
    points: usize,
) -> Result<LoopResult, JsError> {
    check_range("V_z", v_z, 0.0, 3.0).map_err(|e| JsError::new(&e))?;
    check_range("B_xy", b_xy, 0.0, 3.0).map_err(|e| JsError::new(&e))?;
    check_range("alpha", alpha, 0.05, 5.0).map_err(|e| JsError::new(&e))?;
    if !(5..=201).contains(&points) {
        return Err(JsError::new("points must lie in [5, 201]"));
    }
    let (rows, [coercive, up, down]) = loop_rows(v_z, b_xy, alpha, points)?;
    Ok(LoopResult {
        rows,
        coercive,
        switch_up: up,
        switch_down: down,
    })
}

/// Exact master-equation trajectory next to the reduced one for an open
/// chain of 2 or 3 sites. Returns rows
/// `[t, Mz_reduced, Mz_exact, Mx_reduced, Mx_exact, Cxx12]`.
#[wasm_bindgen]
pub fn exact_vs_reduced(
    n_sites: usize,
    v_x: f64,
    gamma: f64,
    t_end: f64,
) -> Result<Vec<f64>, JsError> {
    if !(2..=3).contains(&n_sites) {
        return Err(JsError::new("n_sites must be 2 or 3 in the browser demo"));
    }
    check_range("V_x", v_x, 0.0, 2.0).map_err(|e| JsError::new(&e))?;
    check_range("gamma", gamma, 0.0, 0.5).map_err(|e| JsError::new(&e))?;
    check_range("t_end", t_end, 1.0, 60.0).map_err(|e| JsError::new(&e))?;
    Ok(compare_rows(n_sites, v_x, gamma, t_end)?)
}
