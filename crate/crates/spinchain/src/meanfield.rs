//! Mean-field magnetization dynamics: the nonlinear precession–damping
//! equations for the per-site Bloch vectors, their compact vector form,
//! fixed-step integration, steady-state detection, and quasi-static
//! hysteresis sweeps.
//!
//! The magnetization obeys (per spin, natural units)
//!
//! dM/dt = −M × B_eff − (1/|M|) M × (M × D) − (Γ/2·M_x, Γ/2·M_y, Γ·M_z) − (0, 0, Γ)
//!
//! with the self-consistent field B_eff,α = B_α + m̂_α V_α, where m̂ = M/|M|.
//! The damping vector D is either held fixed (built from the net
//! nearest-neighbour dissipation rates, D_α = g_α/2) or tied to the
//! instantaneous effective field as D = α B_eff.

use std::f64::consts::PI;

use crate::model::ChainModel;
use crate::spin::Axis3;
use crate::{Error, Result};

/// How many magnetization vectors the mean-field state carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MfMode {
    /// One representative vector for the whole chain; the full coupling V
    /// enters the effective field. Appropriate for long chains.
    Collective,
    /// One vector per site; edge sites (and only they) see V/2 because they
    /// have a single neighbour. A 1-site chain sees no coupling at all.
    PerSite,
}

/// How the damping vector D is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DampingMode {
    /// D is a constant vector, by default D_α = g_α/2 from the model's net
    /// neighbour rates.
    FixedD,
    /// D = α·B_eff(M) follows the instantaneous effective field, which
    /// makes the damping align M with B_eff (the classic relaxation form).
    LlAlpha,
}

/// Full parameter set for the mean-field equations.
#[derive(Clone, Debug)]
pub struct MeanFieldConfig {
    pub model: ChainModel,
    pub damping_mode: DampingMode,
    /// Dimensionless damping constant; used iff `damping_mode == LlAlpha`.
    pub alpha: f64,
    /// Constant damping vector; used iff `damping_mode == FixedD`.
    pub d_vector: [f64; 3],
    pub mf_mode: MfMode,
}

impl MeanFieldConfig {
    /// Constant-damping configuration with an explicit D vector.
    pub fn fixed_d(model: ChainModel, d_vector: [f64; 3], mf_mode: MfMode) -> Self {
        MeanFieldConfig {
            model,
            damping_mode: DampingMode::FixedD,
            alpha: 0.0,
            d_vector,
            mf_mode,
        }
    }

    /// Constant-damping configuration with D_α = g_α/2 taken from the
    /// model's net nearest-neighbour rates.
    pub fn fixed_d_from_rates(model: ChainModel, mf_mode: MfMode) -> Self {
        let g = model.g_diff_vector();
        Self::fixed_d(model, [g[0] / 2.0, g[1] / 2.0, g[2] / 2.0], mf_mode)
    }

    /// Field-proportional damping D = α·B_eff.
    pub fn ll_alpha(model: ChainModel, alpha: f64, mf_mode: MfMode) -> Self {
        MeanFieldConfig {
            model,
            damping_mode: DampingMode::LlAlpha,
            alpha,
            d_vector: [0.0; 3],
            mf_mode,
        }
    }

    /// Validates the model and the mean-field-specific parameters.
    ///
    /// The mean-field reduction treats on-site dissipation through the Γ
    /// relaxation terms, which are derived for the z-axis pair only;
    /// nonzero transverse on-site rates are rejected as unsupported.
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::InvalidModel(format!(
                "damping constant alpha must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        if self.d_vector.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidModel(
                "damping vector components must be finite".into(),
            ));
        }
        for ax in [Axis3::X, Axis3::Y] {
            let pair = self.model.on_site_rates[ax.index()];
            if pair[0] != 0.0 || pair[1] != 0.0 {
                return Err(Error::Unsupported(format!(
                    "mean-field equations support on-site dissipation along z only; \
                     found a nonzero on-site rate on axis {}",
                    ax.label()
                )));
            }
        }
        Ok(())
    }
}

/// The mean-field state: one Bloch vector in collective mode, N in
/// per-site mode.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnetizationState {
    pub vectors: Vec<[f64; 3]>,
    pub mode: MfMode,
}

impl MagnetizationState {
    /// Single representative vector.
    pub fn collective(m: [f64; 3]) -> Self {
        MagnetizationState {
            vectors: vec![m],
            mode: MfMode::Collective,
        }
    }

    /// One vector per site, in site order.
    pub fn per_site(vectors: Vec<[f64; 3]>) -> Self {
        MagnetizationState {
            vectors,
            mode: MfMode::PerSite,
        }
    }

    /// N copies of the same vector, per-site mode.
    pub fn uniform_per_site(n: usize, m: [f64; 3]) -> Self {
        Self::per_site(vec![m; n])
    }

    /// Arithmetic mean of the site vectors (the single vector in
    /// collective mode).
    pub fn average(&self) -> [f64; 3] {
        let n = self.vectors.len().max(1) as f64;
        let mut acc = [0.0; 3];
        for v in &self.vectors {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x / n;
            }
        }
        acc
    }
}

/// Unit Bloch vector at polar angle `theta` from +z and azimuth `phi`.
pub fn tilted_vector(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Self-consistent field B_eff,α = B_α + m̂_α V_α for the model's full
/// coupling (collective convention). `m` is normalized internally.
pub fn effective_field(m: [f64; 3], model: &ChainModel) -> Result<[f64; 3]> {
    effective_field_scaled(m, model.b_field, model.v)
}

fn effective_field_scaled(m: [f64; 3], b: [f64; 3], v: [f64; 3]) -> Result<[f64; 3]> {
    let mm = norm3(m);
    if mm == 0.0 {
        return Err(Error::ZeroMagnetization);
    }
    Ok([
        b[0] + m[0] / mm * v[0],
        b[1] + m[1] / mm * v[1],
        b[2] + m[2] / mm * v[2],
    ])
}

/// Damping vector for the current state and effective field.
fn damping_vector(config: &MeanFieldConfig, be: [f64; 3]) -> [f64; 3] {
    match config.damping_mode {
        DampingMode::FixedD => config.d_vector,
        DampingMode::LlAlpha => [
            config.alpha * be[0],
            config.alpha * be[1],
            config.alpha * be[2],
        ],
    }
}

/// Component form of the equation of motion for one vector, with the
/// coupling already scaled (edge rule applied by the caller). `gamma` is
/// the total on-site relaxation rate Γ.
fn site_rhs(
    m: [f64; 3],
    b: [f64; 3],
    v_scaled: [f64; 3],
    config: &MeanFieldConfig,
    gamma: f64,
) -> Result<[f64; 3]> {
    let mm = norm3(m);
    if mm == 0.0 {
        return Err(Error::ZeroMagnetization);
    }
    let be = effective_field_scaled(m, b, v_scaled)?;
    let d = damping_vector(config, be);
    let g = [2.0 * d[0], 2.0 * d[1], 2.0 * d[2]];
    let [mx, my, mz] = m;
    let [gx, gy, gz] = g;
    let inv2m = 0.5 / mm;
    Ok([
        mz * be[1] - my * be[2]
            + inv2m * (-gz * mx * mz - gy * mx * my + gx * (my * my + mz * mz))
            - 0.5 * gamma * mx,
        mx * be[2] - mz * be[0]
            + inv2m * (-gz * my * mz - gx * mx * my + gy * (mx * mx + mz * mz))
            - 0.5 * gamma * my,
        my * be[0] - mx * be[1]
            + inv2m * (-gy * my * mz - gx * mx * mz + gz * (mx * mx + my * my))
            - gamma * (mz + 1.0),
    ])
}

/// Coupling scale factor for one site: edges couple to a single neighbour.
fn v_scale(mode: MfMode, site_index: usize, n: usize) -> f64 {
    match mode {
        MfMode::Collective => 1.0,
        MfMode::PerSite => {
            if n == 1 {
                0.0
            } else if site_index == 0 || site_index == n - 1 {
                0.5
            } else {
                1.0
            }
        }
    }
}

/// Right-hand side for every vector in the state, assuming the state has
/// already been checked against the configuration.
fn rhs_vectors(
    vectors: &[[f64; 3]],
    config: &MeanFieldConfig,
    gamma: f64,
) -> Result<Vec<[f64; 3]>> {
    let n = config.model.n_sites;
    vectors
        .iter()
        .enumerate()
        .map(|(idx, &m)| {
            let s = v_scale(config.mf_mode, idx, n);
            let v = [
                config.model.v[0] * s,
                config.model.v[1] * s,
                config.model.v[2] * s,
            ];
            site_rhs(m, config.model.b_field, v, config, gamma)
        })
        .collect()
}

fn check_state(state: &MagnetizationState, config: &MeanFieldConfig) -> Result<()> {
    if state.mode != config.mf_mode {
        return Err(Error::InvalidState(format!(
            "magnetization state mode {:?} does not match configuration mode {:?}",
            state.mode, config.mf_mode
        )));
    }
    let expected = match config.mf_mode {
        MfMode::Collective => 1,
        MfMode::PerSite => config.model.n_sites,
    };
    if state.vectors.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: state.vectors.len(),
        });
    }
    Ok(())
}

/// Time derivative of the full mean-field state.
pub fn mf_rhs(state: &MagnetizationState, config: &MeanFieldConfig) -> Result<Vec<[f64; 3]>> {
    config.validate()?;
    check_state(state, config)?;
    rhs_vectors(&state.vectors, config, config.model.gamma_total())
}

/// Vector form of the single-vector equation of motion:
/// −M×B_eff − (1/|M|)·M×(M×D) − (Γ/2·M_x, Γ/2·M_y, Γ·M_z) − (0,0,Γ).
///
/// Uses the model's full coupling (collective convention); agrees with
/// [`mf_rhs`] in collective mode component by component.
pub fn ll_rhs(m: [f64; 3], config: &MeanFieldConfig) -> Result<[f64; 3]> {
    let gamma = config.model.gamma_total();
    let core = ll_rhs_no_offset(m, config)?;
    Ok([core[0], core[1], core[2] - gamma])
}

/// [`ll_rhs`] without the constant relaxation offset (0,0,Γ); the
/// remaining terms all vanish at M = 0-temperature equilibrium only when
/// that offset is balanced, so the two right-hand sides differ exactly by
/// (0,0,Γ).
pub fn ll_rhs_no_offset(m: [f64; 3], config: &MeanFieldConfig) -> Result<[f64; 3]> {
    config.validate()?;
    let mm = norm3(m);
    if mm == 0.0 {
        return Err(Error::ZeroMagnetization);
    }
    let be = effective_field(m, &config.model)?;
    let d = damping_vector(config, be);
    let gamma = config.model.gamma_total();
    let prec = cross(m, be);
    let damp = cross(m, cross(m, d));
    Ok([
        -prec[0] - damp[0] / mm - 0.5 * gamma * m[0],
        -prec[1] - damp[1] / mm - 0.5 * gamma * m[1],
        -prec[2] - damp[2] / mm - gamma * m[2],
    ])
}

/// A sampled mean-field trajectory.
#[derive(Clone, Debug)]
pub struct MfSeries {
    pub times: Vec<f64>,
    pub states: Vec<MagnetizationState>,
}

fn advance(base: &[[f64; 3]], k: &[[f64; 3]], h: f64) -> Vec<[f64; 3]> {
    base.iter()
        .zip(k)
        .map(|(b, kk)| [b[0] + h * kk[0], b[1] + h * kk[1], b[2] + h * kk[2]])
        .collect()
}

fn rk4_step_with_k1(
    cur: &[[f64; 3]],
    k1: &[[f64; 3]],
    config: &MeanFieldConfig,
    gamma: f64,
    dt: f64,
) -> Result<Vec<[f64; 3]>> {
    let k2 = rhs_vectors(&advance(cur, k1, dt / 2.0), config, gamma)?;
    let k3 = rhs_vectors(&advance(cur, &k2, dt / 2.0), config, gamma)?;
    let k4 = rhs_vectors(&advance(cur, &k3, dt), config, gamma)?;
    Ok(cur
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut out = [0.0; 3];
            for c in 0..3 {
                out[c] =
                    m[c] + dt / 6.0 * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]);
            }
            out
        })
        .collect())
}

fn rk4_step(
    cur: &[[f64; 3]],
    config: &MeanFieldConfig,
    gamma: f64,
    dt: f64,
) -> Result<Vec<[f64; 3]>> {
    let k1 = rhs_vectors(cur, config, gamma)?;
    rk4_step_with_k1(cur, &k1, config, gamma, dt)
}

fn all_finite(vectors: &[[f64; 3]]) -> bool {
    vectors.iter().all(|v| v.iter().all(|x| x.is_finite()))
}

/// Integrates the mean-field equations with fixed-step fourth-order
/// Runge–Kutta. Samples are taken at t = 0, every `sample_every` steps,
/// and at the final step; `t_end` is rounded to the nearest whole number
/// of steps. Non-finite values at a sample point abort with a divergence
/// error.
pub fn integrate(
    config: &MeanFieldConfig,
    m0: &MagnetizationState,
    t_end: f64,
    dt: f64,
    sample_every: usize,
) -> Result<MfSeries> {
    config.validate()?;
    check_state(m0, config)?;
    if !(dt > 0.0) || !dt.is_finite() || !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Unsupported(format!(
            "integration needs positive finite dt and t_end, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let every = sample_every.max(1);
    let steps = ((t_end / dt).round() as usize).max(1);
    let gamma = config.model.gamma_total();

    let mut cur = m0.vectors.clone();
    if !all_finite(&cur) {
        return Err(Error::Diverged { t: 0.0 });
    }
    let mut times = vec![0.0];
    let mut states = vec![m0.clone()];
    for step in 1..=steps {
        cur = rk4_step(&cur, config, gamma, dt)?;
        if step % every == 0 || step == steps {
            let t = step as f64 * dt;
            if !all_finite(&cur) {
                return Err(Error::Diverged { t });
            }
            times.push(t);
            states.push(MagnetizationState {
                vectors: cur.clone(),
                mode: config.mf_mode,
            });
        }
    }
    Ok(MfSeries { times, states })
}

/// Max-abs difference between the final states of a run at `dt` and a run
/// at `dt/2` — a cheap a-posteriori accuracy probe.
pub fn step_halving_deviation(
    config: &MeanFieldConfig,
    m0: &MagnetizationState,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    let coarse = integrate(config, m0, t_end, dt, usize::MAX)?;
    let fine = integrate(config, m0, t_end, dt / 2.0, usize::MAX)?;
    let a = coarse.states.last().expect("series has samples");
    let b = fine.states.last().expect("series has samples");
    let mut worst = 0.0f64;
    for (va, vb) in a.vectors.iter().zip(&b.vectors) {
        for c in 0..3 {
            worst = worst.max((va[c] - vb[c]).abs());
        }
    }
    Ok(worst)
}

/// Controls for steady-state detection.
#[derive(Clone, Debug)]
pub struct SteadyStateOptions {
    /// Convergence threshold on ‖dM/dt‖∞.
    pub ss_tol: f64,
    /// Give up beyond this time.
    pub t_max: f64,
    /// Integration step.
    pub dt: f64,
    /// Residual is evaluated every this many steps.
    pub check_every: usize,
    /// The residual must stay below `ss_tol` for this many consecutive
    /// evaluations; guards against transiting slow regions of phase space.
    pub sustain: usize,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        SteadyStateOptions {
            ss_tol: 1e-9,
            t_max: 1e4,
            dt: 1e-3,
            check_every: 100,
            sustain: 10,
        }
    }
}

/// A converged steady state with the time and residual at acceptance.
#[derive(Clone, Debug)]
pub struct SteadyResult {
    pub state: MagnetizationState,
    pub t_reached: f64,
    pub residual: f64,
}

/// Integrates until the right-hand side stays below `ss_tol` in max norm
/// for `sustain` consecutive checks. Fails with a non-convergence error
/// (carrying the last state) when `t_max` passes first.
pub fn steady_state(
    config: &MeanFieldConfig,
    m0: &MagnetizationState,
    opts: &SteadyStateOptions,
) -> Result<SteadyResult> {
    config.validate()?;
    check_state(m0, config)?;
    if !(opts.dt > 0.0) || !(opts.ss_tol > 0.0) || !(opts.t_max > 0.0) {
        return Err(Error::Unsupported(
            "steady-state options need positive dt, ss_tol and t_max".into(),
        ));
    }
    let every = opts.check_every.max(1);
    let sustain = opts.sustain.max(1);
    let gamma = config.model.gamma_total();

    let mut cur = m0.vectors.clone();
    let mut streak = 0usize;
    let mut last_residual = f64::INFINITY;
    let mut step: u64 = 0;
    loop {
        let t = step as f64 * opts.dt;
        let k1 = rhs_vectors(&cur, config, gamma)?;
        if step % every as u64 == 0 {
            if !all_finite(&cur) {
                return Err(Error::Diverged { t });
            }
            let residual = k1
                .iter()
                .flat_map(|v| v.iter())
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
            if !residual.is_finite() {
                return Err(Error::Diverged { t });
            }
            last_residual = residual;
            if residual < opts.ss_tol {
                streak += 1;
                if streak >= sustain {
                    return Ok(SteadyResult {
                        state: MagnetizationState {
                            vectors: cur,
                            mode: config.mf_mode,
                        },
                        t_reached: t,
                        residual,
                    });
                }
            } else {
                streak = 0;
            }
        }
        if t >= opts.t_max {
            return Err(Error::NotConverged {
                t_max: opts.t_max,
                residual: last_residual,
                last: cur,
            });
        }
        cur = rk4_step_with_k1(&cur, &k1, config, gamma, opts.dt)?;
        step += 1;
    }
}

/// Default symmetry-breaking tilt for hysteresis seeds: with the seed
/// exactly on a pole the torque vanishes and switching never starts.
pub const SEED_TILT: f64 = PI / 40.0;

/// Two branches whose steady-state M_z differ by less than this at every
/// field are treated as one reversible curve (zero coercivity).
pub const BRANCH_AGREEMENT_TOL: f64 = 1e-3;

/// One field point of a hysteresis branch.
#[derive(Clone, Debug)]
pub struct HysteresisPoint {
    pub b_z: f64,
    pub m: [f64; 3],
}

/// Result of a two-branch quasi-static field sweep. Branch points are
/// stored in traversal order: `branch_up` ascends the grid, `branch_down`
/// descends it.
#[derive(Clone, Debug)]
pub struct HysteresisCurve {
    pub branch_up: Vec<HysteresisPoint>,
    pub branch_down: Vec<HysteresisPoint>,
    /// Field at which M_z first changes sign on the ascending branch.
    pub switch_up: Option<f64>,
    /// Field at which M_z first changes sign on the descending branch.
    pub switch_down: Option<f64>,
    /// Half the distance between the two switching fields; zero when the
    /// branches coincide or either branch never switches.
    pub coercive_field: f64,
}

/// Pushes a vector's polar angle into [θ₀, π−θ₀], preserving magnitude
/// and azimuth (azimuth 0 is used when the vector is on a pole). Vectors
/// already inside the band, and the zero vector, are returned unchanged.
pub fn clamp_tilt(m: [f64; 3], theta0: f64) -> [f64; 3] {
    let r = norm3(m);
    if r == 0.0 {
        return m;
    }
    let theta = (m[2] / r).clamp(-1.0, 1.0).acos();
    let (lo, hi) = (theta0, PI - theta0);
    if (lo..=hi).contains(&theta) {
        return m;
    }
    let target = if theta < lo { lo } else { hi };
    let rxy = (m[0] * m[0] + m[1] * m[1]).sqrt();
    let phi = if rxy < 1e-12 {
        0.0
    } else {
        m[1].atan2(m[0])
    };
    [
        r * target.sin() * phi.cos(),
        r * target.sin() * phi.sin(),
        r * target.cos(),
    ]
}

/// A field grid point where the equation of motion vanishes identically
/// for every M (no field, no coupling, no relaxation): the steady state is
/// whatever the seed was, so the point carries no switching information.
fn degenerate_point(config: &MeanFieldConfig, b_z: f64) -> bool {
    config.model.b_field[0] == 0.0
        && config.model.b_field[1] == 0.0
        && b_z == 0.0
        && config.model.v == [0.0; 3]
}

fn run_branch(
    config: &MeanFieldConfig,
    fields: impl Iterator<Item = f64>,
    seed: [f64; 3],
    opts: &SteadyStateOptions,
) -> Result<Vec<HysteresisPoint>> {
    let mut carry = seed;
    let mut points = Vec::new();
    for b_z in fields {
        let mut cfg = config.clone();
        cfg.model.b_field[2] = b_z;
        let start = MagnetizationState::collective(clamp_tilt(carry, SEED_TILT));
        let res = steady_state(&cfg, &start, opts)?;
        let m = res.state.vectors[0];
        points.push(HysteresisPoint { b_z, m });
        carry = m;
    }
    Ok(points)
}

fn first_switch(points: &[HysteresisPoint], config: &MeanFieldConfig) -> Option<f64> {
    let scan: Vec<&HysteresisPoint> = points
        .iter()
        .filter(|p| !degenerate_point(config, p.b_z))
        .collect();
    scan.windows(2)
        .find(|w| w[0].m[2] * w[1].m[2] < 0.0)
        .map(|w| w[1].b_z)
}

/// Quasi-static hysteresis sweep over `bz_grid` (strictly increasing).
///
/// The ascending branch is seeded near the −z pole, the descending branch
/// near +z, each tilted by [`SEED_TILT`]; every subsequent point continues
/// from the previous converged state, re-tilted away from the poles so a
/// field reversal can take hold. Requires the collective mode with
/// field-proportional damping and zero on-site relaxation — the regime in
/// which the sweep's magnitude-preserving continuation is meaningful.
pub fn hysteresis_sweep(
    config: &MeanFieldConfig,
    bz_grid: &[f64],
    opts: &SteadyStateOptions,
) -> Result<HysteresisCurve> {
    config.validate()?;
    if config.mf_mode != MfMode::Collective {
        return Err(Error::Unsupported(
            "hysteresis sweeps use the collective mean-field mode".into(),
        ));
    }
    if config.damping_mode != DampingMode::LlAlpha {
        return Err(Error::Unsupported(
            "hysteresis sweeps require field-proportional (alpha) damping".into(),
        ));
    }
    if config.model.gamma_total() != 0.0 {
        return Err(Error::Unsupported(
            "hysteresis sweeps require zero on-site relaxation".into(),
        ));
    }
    if bz_grid.is_empty() {
        return Err(Error::GridMismatch("field grid is empty".into()));
    }
    if bz_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridMismatch(
            "field grid must be strictly increasing".into(),
        ));
    }

    let up_seed = [SEED_TILT.sin(), 0.0, -SEED_TILT.cos()];
    let down_seed = [SEED_TILT.sin(), 0.0, SEED_TILT.cos()];
    let branch_up = run_branch(config, bz_grid.iter().copied(), up_seed, opts)?;
    let branch_down = run_branch(config, bz_grid.iter().rev().copied(), down_seed, opts)?;

    let n = bz_grid.len();
    let mut agreement = 0.0f64;
    for i in 0..n {
        if degenerate_point(config, bz_grid[i]) {
            continue;
        }
        agreement = agreement.max((branch_down[n - 1 - i].m[2] - branch_up[i].m[2]).abs());
    }
    let switch_up = first_switch(&branch_up, config);
    let switch_down = first_switch(&branch_down, config);
    let coercive_field = if agreement < BRANCH_AGREEMENT_TOL {
        0.0
    } else {
        match (switch_up, switch_down) {
            (Some(su), Some(sd)) => 0.5 * (sd - su).abs(),
            _ => 0.0,
        }
    };
    Ok(HysteresisCurve {
        branch_up,
        branch_down,
        switch_up,
        switch_down,
        coercive_field,
    })
}
