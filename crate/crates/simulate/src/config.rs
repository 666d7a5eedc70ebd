//! JSON experiment description.
//!
//! A configuration file fully determines one run: the chain model, the
//! reduced-dynamics settings, the solver choice, the time grid, and where
//! the results go. Parsing is strict — unknown keys are rejected so that a
//! typo cannot silently fall back to a default.

use serde::Deserialize;
use spinchain::meanfield::{MeanFieldConfig, MfMode};
use spinchain::model::ChainModel;

/// What the run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// Reduced (mean-field) trajectory of the average magnetization.
    Dynamics,
    /// Quasi-static field sweep with branch continuation; needs `bz_grid`.
    Hysteresis,
    /// Exact density-matrix evolution next to the reduced model. With
    /// `bz_grid` present this becomes a steady-state sweep over the axial
    /// field instead of a time series.
    Compare,
    /// Two-point correlation and pair concurrence along the exact evolution.
    Correlations,
    /// Eigenvalues of the generator, sorted with the stationary mode first.
    Spectrum,
}

/// Time propagator for the exact density-matrix side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    /// Fixed-step fourth-order integration of the master equation.
    Rk4,
    /// Eigenmode expansion of the generator; exact in time but refused when
    /// the eigenbasis is too ill-conditioned to trust.
    Spectral,
    /// Prefer the eigenmode route on small chains, falling back to stepping
    /// when the decomposition is unreliable or the space is large.
    Auto,
}

/// How neighbouring sites are coupled through the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighbourRule {
    /// On-site dissipation only.
    None,
    /// Thermal axial bath; neighbour assistance on the axial channel at
    /// `g_ratio` times the on-site rate.
    ZRatio,
    /// Thermal axial bath plus neighbour channels on all three axes with
    /// thermal weights built from `gamma_total * g_ratio`.
    AllAxes,
}

/// Damping closure for the reduced model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingChoice {
    /// Damping vector proportional to the local effective field.
    LlAlpha,
    /// Caller-supplied constant damping vector (`d_vector` required).
    FixedD,
    /// Damping vector derived from the model's dissipation rates.
    FromRates,
}

/// Whether the reduced model tracks one collective vector or one per site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Collective,
    PerSite,
}

/// Initial condition, shared between the exact and reduced descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// Every spin along +x.
    AllUpX,
    /// Every spin along +z.
    AllUpZ,
    /// Every spin tilted by polar angle `theta` from +z, azimuth `phi`.
    Tilted { theta: f64, phi: f64 },
}

/// Physical chain description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n_sites: usize,
    #[serde(default)]
    pub b_field: [f64; 3],
    #[serde(default)]
    pub v: [f64; 3],
    #[serde(default)]
    pub gamma_total: f64,
    #[serde(default = "default_n_b")]
    pub n_b: f64,
    #[serde(default = "default_g_ratio")]
    pub g_ratio: f64,
    #[serde(default = "default_neighbour_rule")]
    pub neighbour_rule: NeighbourRule,
}

/// Reduced-model settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanFieldSection {
    #[serde(default = "default_damping")]
    pub damping: DampingChoice,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub d_vector: Option<[f64; 3]>,
    #[serde(default = "default_mode")]
    pub mode: ModeChoice,
}

impl Default for MeanFieldSection {
    fn default() -> Self {
        Self {
            damping: default_damping(),
            alpha: default_alpha(),
            d_vector: None,
            mode: default_mode(),
        }
    }
}

/// Axial-field grid for sweeps: either explicit points or a uniform range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BzGrid {
    Range { lo: f64, hi: f64, count: usize },
    List(Vec<f64>),
}

impl BzGrid {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        match self {
            BzGrid::List(points) => {
                if points.len() < 2 {
                    return Err("bz_grid needs at least two points".into());
                }
                if points.iter().any(|p| !p.is_finite()) {
                    return Err("bz_grid contains a non-finite value".into());
                }
                Ok(points.clone())
            }
            BzGrid::Range { lo, hi, count } => {
                if *count < 2 {
                    return Err("bz_grid range needs count >= 2".into());
                }
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return Err("bz_grid range needs finite lo < hi".into());
                }
                let step = (hi - lo) / (*count as f64 - 1.0);
                Ok((0..*count).map(|i| lo + step * i as f64).collect())
            }
        }
    }
}

/// One complete experiment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub model: ModelSection,
    #[serde(default)]
    pub meanfield: MeanFieldSection,
    #[serde(default = "default_solver")]
    pub solver: SolverChoice,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default)]
    pub bz_grid: Option<BzGrid>,
    #[serde(default = "default_initial_state")]
    pub initial_state: InitialState,
    /// Time window `[lo, hi]` for deviation averages; defaults to the full run.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    /// One-based site pair for correlation/concurrence output.
    #[serde(default = "default_pair")]
    pub pair: [usize; 2],
    /// Integration horizon for quasi-static steady-state searches.
    #[serde(default = "default_steady_t_max")]
    pub steady_t_max: f64,
    #[serde(default)]
    pub output_path: Option<String>,
    /// Reserved for future stochastic extensions; accepted and recorded.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_n_b() -> f64 {
    0.08
}

fn default_g_ratio() -> f64 {
    0.1
}

fn default_neighbour_rule() -> NeighbourRule {
    NeighbourRule::ZRatio
}

fn default_damping() -> DampingChoice {
    DampingChoice::FromRates
}

fn default_alpha() -> f64 {
    0.5
}

fn default_mode() -> ModeChoice {
    ModeChoice::Collective
}

fn default_solver() -> SolverChoice {
    SolverChoice::Auto
}

fn default_t_end() -> f64 {
    100.0
}

fn default_dt() -> f64 {
    1e-3
}

fn default_sample_every() -> usize {
    100
}

fn default_initial_state() -> InitialState {
    InitialState::AllUpX
}

fn default_pair() -> [usize; 2] {
    [1, 2]
}

fn default_steady_t_max() -> f64 {
    1e4
}

impl ModelSection {
    /// Build the chain model this section describes.
    pub fn to_chain_model(&self) -> ChainModel {
        match self.neighbour_rule {
            NeighbourRule::None => {
                let mut model = ChainModel::closed(self.n_sites, self.b_field, self.v);
                if self.gamma_total != 0.0 {
                    // Axial thermal bath without neighbour assistance.
                    model = ChainModel::with_thermal_z_bath(
                        self.n_sites,
                        self.b_field,
                        self.v,
                        self.gamma_total,
                        self.n_b,
                        0.0,
                    );
                }
                model
            }
            NeighbourRule::ZRatio => ChainModel::with_thermal_z_bath(
                self.n_sites,
                self.b_field,
                self.v,
                self.gamma_total,
                self.n_b,
                self.g_ratio,
            ),
            NeighbourRule::AllAxes => ChainModel::with_thermal_all_axes_neighbours(
                self.n_sites,
                self.b_field,
                self.v,
                self.gamma_total,
                self.n_b,
                self.g_ratio,
            ),
        }
    }
}

impl MeanFieldSection {
    /// Translate into solver settings for the given model.
    pub fn to_mf_config(&self, model: ChainModel) -> Result<MeanFieldConfig, String> {
        let mode = match self.mode {
            ModeChoice::Collective => MfMode::Collective,
            ModeChoice::PerSite => MfMode::PerSite,
        };
        Ok(match self.damping {
            DampingChoice::LlAlpha => MeanFieldConfig::ll_alpha(model, self.alpha, mode),
            DampingChoice::FixedD => {
                let d = self
                    .d_vector
                    .ok_or_else(|| "damping fixed_d requires d_vector".to_string())?;
                MeanFieldConfig::fixed_d(model, d, mode)
            }
            DampingChoice::FromRates => MeanFieldConfig::fixed_d_from_rates(model, mode),
        })
    }
}

impl ExperimentConfig {
    /// Check everything that does not require running a solver.
    pub fn validate(&self) -> Result<(), String> {
        let model = self.model.to_chain_model();
        model.validate().map_err(|e| e.to_string())?;
        for (name, value) in [
            ("t_end", self.t_end),
            ("dt", self.dt),
            ("steady_t_max", self.steady_t_max),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(format!("{name} must be finite and positive"));
            }
        }
        if self.sample_every == 0 {
            return Err("sample_every must be at least 1".into());
        }
        if !self.model.n_b.is_finite() || self.model.n_b < 0.0 {
            return Err("n_b must be finite and non-negative".into());
        }
        if !self.model.g_ratio.is_finite() {
            return Err("g_ratio must be finite".into());
        }
        if !self.meanfield.alpha.is_finite() || self.meanfield.alpha < 0.0 {
            return Err("alpha must be finite and non-negative".into());
        }
        if let Some(d) = self.meanfield.d_vector {
            if d.iter().any(|x| !x.is_finite()) {
                return Err("d_vector must be finite".into());
            }
        }
        if let InitialState::Tilted { theta, phi } = self.initial_state {
            if !theta.is_finite() || !phi.is_finite() {
                return Err("tilted initial state needs finite angles".into());
            }
        }
        if let Some([lo, hi]) = self.window {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err("window must be [lo, hi] with lo < hi".into());
            }
        }
        if let Some(grid) = &self.bz_grid {
            grid.points()?;
        }
        if self.kind == Kind::Hysteresis && self.bz_grid.is_none() {
            return Err("hysteresis runs need bz_grid".into());
        }
        if matches!(self.kind, Kind::Correlations) {
            let [i, j] = self.pair;
            if i == j {
                return Err("pair must name two distinct sites".into());
            }
            for site in [i, j] {
                if site == 0 || site > self.model.n_sites {
                    return Err(format!(
                        "pair site {site} is outside 1..={}",
                        self.model.n_sites
                    ));
                }
            }
        }
        Ok(())
    }

    /// The damping mode actually in effect (for reporting).
    pub fn damping_mode_label(&self) -> &'static str {
        match self.meanfield.damping {
            DampingChoice::LlAlpha => "ll_alpha",
            DampingChoice::FixedD => "fixed_d",
            DampingChoice::FromRates => "from_rates",
        }
    }
}

/// Parse and validate a configuration from JSON text.
///
/// Errors carry the JSON path of the offending field where available.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| format!("invalid configuration at {}: {}", e.path(), e.inner()))?;
    config.validate()?;
    Ok(config)
}
