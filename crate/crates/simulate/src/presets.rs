//! Canned experiment configurations.
//!
//! Each preset expands to one or more fully specified [`ExperimentConfig`]
//! runs with stable labels, so `simulate preset <id>` reproduces a figure's
//! worth of data without hand-written JSON. The parameter sets are frozen
//! here; the `presets` subcommand prints them in full.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::config::{
    BzGrid, DampingChoice, ExperimentConfig, InitialState, Kind, MeanFieldSection, ModeChoice,
    ModelSection, NeighbourRule, SolverChoice,
};

/// One labeled run inside a preset. The label becomes part of the output
/// file name (`<id>_<label>.csv`); single-run presets use an empty label.
pub struct PresetRun {
    pub label: &'static str,
    pub config: ExperimentConfig,
}

/// A named bundle of runs.
pub struct Preset {
    pub id: &'static str,
    /// One-line description of what the runs show.
    pub summary: &'static str,
    pub runs: Vec<PresetRun>,
    /// For presets that aggregate across runs: the sweep parameter of each
    /// run, emitted next to the per-run deviation average.
    pub aggregate_param: Option<(&'static str, Vec<f64>)>,
}

const SEED_THETA: f64 = PI / 40.0;

fn model(n_sites: usize, b_field: [f64; 3], v: [f64; 3]) -> ModelSection {
    ModelSection {
        n_sites,
        b_field,
        v,
        gamma_total: 0.0,
        n_b: 0.08,
        g_ratio: 0.1,
        neighbour_rule: NeighbourRule::None,
    }
}

fn open_model(
    n_sites: usize,
    b_field: [f64; 3],
    v: [f64; 3],
    gamma_total: f64,
    rule: NeighbourRule,
) -> ModelSection {
    ModelSection {
        n_sites,
        b_field,
        v,
        gamma_total,
        n_b: 0.08,
        g_ratio: 0.1,
        neighbour_rule: rule,
    }
}

fn alpha_damping(alpha: f64) -> MeanFieldSection {
    MeanFieldSection {
        damping: DampingChoice::LlAlpha,
        alpha,
        d_vector: None,
        mode: ModeChoice::Collective,
    }
}

fn rates_damping(mode: ModeChoice) -> MeanFieldSection {
    MeanFieldSection {
        damping: DampingChoice::FromRates,
        alpha: 0.5,
        d_vector: None,
        mode,
    }
}

fn base_config(kind: Kind, model: ModelSection) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        model,
        meanfield: MeanFieldSection::default(),
        solver: SolverChoice::Auto,
        t_end: 100.0,
        dt: 1e-3,
        sample_every: 100,
        bz_grid: None,
        initial_state: InitialState::AllUpX,
        window: None,
        pair: [1, 2],
        steady_t_max: 1e4,
        output_path: None,
        seed: None,
    }
}

fn tilted_seed() -> InitialState {
    InitialState::Tilted {
        theta: SEED_THETA,
        phi: FRAC_PI_4,
    }
}

/// Large-chain reversal: a slightly tilted uniform chain relaxing onto an
/// axial field through field-proportional damping.
fn reversal_run(v_z: f64) -> ExperimentConfig {
    let mut cfg = base_config(Kind::Dynamics, model(500, [0.0, 0.0, -2.0], [0.0, 0.0, v_z]));
    cfg.meanfield = alpha_damping(0.5);
    cfg.initial_state = tilted_seed();
    cfg.t_end = 50.0;
    cfg
}

fn hysteresis_run(b_xy: f64, v_z: f64) -> ExperimentConfig {
    let mut cfg = base_config(Kind::Hysteresis, model(500, [b_xy, b_xy, 0.0], [0.0, 0.0, v_z]));
    cfg.meanfield = alpha_damping(0.5);
    cfg.bz_grid = Some(BzGrid::Range {
        lo: -2.0,
        hi: 2.0,
        count: 81,
    });
    cfg
}

fn fig3_compare() -> ExperimentConfig {
    let mut cfg = base_config(
        Kind::Compare,
        open_model(
            3,
            [0.25, 0.25, -0.5],
            [0.5, 0.1, 0.1],
            0.1,
            NeighbourRule::ZRatio,
        ),
    );
    cfg.meanfield = rates_damping(ModeChoice::PerSite);
    cfg
}

fn fig3_sweep(n_sites: usize) -> ExperimentConfig {
    let mut cfg = base_config(
        Kind::Compare,
        open_model(
            n_sites,
            [1.0, 1.0, 0.0],
            [1.0, 2.0, 1.0],
            0.1,
            NeighbourRule::ZRatio,
        ),
    );
    cfg.meanfield = rates_damping(ModeChoice::PerSite);
    cfg.bz_grid = Some(BzGrid::Range {
        lo: -4.0,
        hi: 4.0,
        count: 81,
    });
    cfg
}

fn anisotropy_run(delta: f64) -> ExperimentConfig {
    let mut cfg = base_config(
        Kind::Compare,
        model(3, [0.25, 0.25, -0.5], [0.1 + delta, 0.1, 0.1]),
    );
    cfg.meanfield = rates_damping(ModeChoice::Collective);
    cfg.sample_every = 1000;
    cfg.window = Some([0.0, 100.0]);
    cfg
}

fn open_chain(v_x: f64, gamma: f64) -> ModelSection {
    open_model(
        3,
        [0.25, 0.25, -0.5],
        [v_x, 0.1, 0.1],
        gamma,
        NeighbourRule::AllAxes,
    )
}

fn damped_compare(v_x: f64, gamma: f64) -> ExperimentConfig {
    let mut cfg = base_config(Kind::Compare, open_chain(v_x, gamma));
    cfg.meanfield = rates_damping(ModeChoice::PerSite);
    cfg
}

fn damped_correlations(v_x: f64, gamma: f64) -> ExperimentConfig {
    base_config(Kind::Correlations, open_chain(v_x, gamma))
}

/// All preset bundles, in listing order.
pub fn all_presets() -> Vec<Preset> {
    vec![
        Preset {
            id: "fig2a_caption",
            summary: "500-site uniform chain, axial field B_z = -2 against easy-axis \
                      coupling V_z = 1: tilted seed reverses onto (0, 0, -1)",
            runs: vec![PresetRun {
                label: "",
                config: reversal_run(1.0),
            }],
            aggregate_param: None,
        },
        Preset {
            id: "fig2a_text",
            summary: "same reversal with the weaker easy-axis coupling V_z = 0.5",
            runs: vec![PresetRun {
                label: "",
                config: reversal_run(0.5),
            }],
            aggregate_param: None,
        },
        Preset {
            id: "fig2b",
            summary: "axial hysteresis loops (B_xy = 0): M_z switches at the \
                      anisotropy field, B_z = ±V_z",
            runs: vec![
                PresetRun {
                    label: "vz_0.5",
                    config: hysteresis_run(0.0, 0.5),
                },
                PresetRun {
                    label: "vz_1.0",
                    config: hysteresis_run(0.0, 1.0),
                },
            ],
            aggregate_param: None,
        },
        Preset {
            id: "fig2c",
            summary: "tilted static field (1, 1, -2) with V_z = 1: damped precession \
                      into the off-axis steady state near (0.31, 0.31, -0.89)",
            runs: vec![PresetRun {
                label: "",
                config: {
                    let mut cfg = base_config(
                        Kind::Dynamics,
                        model(500, [1.0, 1.0, -2.0], [0.0, 0.0, 1.0]),
                    );
                    cfg.meanfield = alpha_damping(0.5);
                    cfg.initial_state = tilted_seed();
                    cfg
                },
            }],
            aggregate_param: None,
        },
        Preset {
            id: "fig2d",
            summary: "hysteresis with a transverse field component (B_xy = 1): the \
                      loop closes and the coercive field vanishes",
            runs: vec![
                PresetRun {
                    label: "vz_0.5",
                    config: hysteresis_run(1.0, 0.5),
                },
                PresetRun {
                    label: "vz_1.0",
                    config: hysteresis_run(1.0, 1.0),
                },
            ],
            aggregate_param: None,
        },
        Preset {
            id: "fig3ab",
            summary: "3-site open chain (V = (0.5, 0.1, 0.1), gamma = 0.1, axial \
                      bath): exact trajectory next to the per-site reduced model",
            runs: vec![PresetRun {
                label: "",
                config: fig3_compare(),
            }],
            aggregate_param: None,
        },
        Preset {
            id: "fig3cd",
            summary: "steady-state sweep over B_z in [-4, 4] for N = 3 and 4 \
                      (V = (1, 2, 1), gamma = 0.1): exact vs reduced magnetization",
            runs: vec![
                PresetRun {
                    label: "n3",
                    config: fig3_sweep(3),
                },
                PresetRun {
                    label: "n4",
                    config: fig3_sweep(4),
                },
            ],
            aggregate_param: None,
        },
        Preset {
            id: "fig4",
            summary: "closed 3-site chain: reduction error vs exchange anisotropy \
                      Delta added to V_x over (0.1, 0.1, 0.1)",
            runs: vec![
                PresetRun {
                    label: "delta_0.0",
                    config: anisotropy_run(0.0),
                },
                PresetRun {
                    label: "delta_0.1",
                    config: anisotropy_run(0.1),
                },
                PresetRun {
                    label: "delta_0.2",
                    config: anisotropy_run(0.2),
                },
                PresetRun {
                    label: "delta_0.4",
                    config: anisotropy_run(0.4),
                },
            ],
            aggregate_param: Some(("delta", vec![0.0, 0.1, 0.2, 0.4])),
        },
        Preset {
            id: "fig5a",
            summary: "open 3-site chain, V_x = 0.5, all-axes neighbour bath: \
                      reduction deviation for gamma in {0.05, 0.1, 0.2}",
            runs: vec![
                PresetRun {
                    label: "gamma_0.05",
                    config: damped_compare(0.5, 0.05),
                },
                PresetRun {
                    label: "gamma_0.1",
                    config: damped_compare(0.5, 0.1),
                },
                PresetRun {
                    label: "gamma_0.2",
                    config: damped_compare(0.5, 0.2),
                },
            ],
            aggregate_param: None,
        },
        Preset {
            id: "fig5b",
            summary: "same three models: transverse two-point correlation and pair \
                      concurrence of sites (1, 2)",
            runs: vec![
                PresetRun {
                    label: "gamma_0.05",
                    config: damped_correlations(0.5, 0.05),
                },
                PresetRun {
                    label: "gamma_0.1",
                    config: damped_correlations(0.5, 0.1),
                },
                PresetRun {
                    label: "gamma_0.2",
                    config: damped_correlations(0.5, 0.2),
                },
            ],
            aggregate_param: None,
        },
        Preset {
            id: "fig5c",
            summary: "gamma = 0.1 fixed: reduction deviation for V_x in {0.5, 1}",
            runs: vec![
                PresetRun {
                    label: "vx_0.5",
                    config: damped_compare(0.5, 0.1),
                },
                PresetRun {
                    label: "vx_1.0",
                    config: damped_compare(1.0, 0.1),
                },
            ],
            aggregate_param: None,
        },
        Preset {
            id: "fig5d",
            summary: "gamma = 0.1 fixed: correlations of sites (1, 2) for V_x in \
                      {0.5, 1}",
            runs: vec![
                PresetRun {
                    label: "vx_0.5",
                    config: damped_correlations(0.5, 0.1),
                },
                PresetRun {
                    label: "vx_1.0",
                    config: damped_correlations(1.0, 0.1),
                },
            ],
            aggregate_param: None,
        },
        Preset {
            id: "fig6",
            summary: "entanglement pulse: pair concurrence of sites (1, 2) rises \
                      from zero, peaks, and settles to its stationary value",
            runs: vec![
                PresetRun {
                    label: "vx_0.5",
                    config: damped_correlations(0.5, 0.1),
                },
                PresetRun {
                    label: "vx_1.0",
                    config: damped_correlations(1.0, 0.1),
                },
            ],
            aggregate_param: None,
        },
    ]
}

/// Look up one preset by id.
pub fn find(id: &str) -> Option<Preset> {
    all_presets().into_iter().find(|p| p.id == id)
}

fn describe_initial(state: &InitialState) -> String {
    match state {
        InitialState::AllUpX => "all spins along +x".into(),
        InitialState::AllUpZ => "all spins along +z".into(),
        InitialState::Tilted { theta, phi } => {
            format!("all spins tilted (theta = {theta:.6}, phi = {phi:.6})")
        }
    }
}

fn describe_run(run: &PresetRun) -> String {
    let c = &run.config;
    let m = &c.model;
    let kind = match c.kind {
        Kind::Dynamics => "dynamics",
        Kind::Hysteresis => "hysteresis",
        Kind::Compare => {
            if c.bz_grid.is_some() {
                "compare (steady-state sweep)"
            } else {
                "compare (time series)"
            }
        }
        Kind::Correlations => "correlations",
        Kind::Spectrum => "spectrum",
    };
    let rule = match m.neighbour_rule {
        NeighbourRule::None => "on-site only",
        NeighbourRule::ZRatio => "axial neighbour channel",
        NeighbourRule::AllAxes => "all-axes neighbour channels",
    };
    let mf = match c.meanfield.damping {
        DampingChoice::LlAlpha => format!("alpha = {}", c.meanfield.alpha),
        DampingChoice::FixedD => format!("D = {:?}", c.meanfield.d_vector.unwrap_or_default()),
        DampingChoice::FromRates => "D from rates".into(),
    };
    let mode = match c.meanfield.mode {
        ModeChoice::Collective => "collective",
        ModeChoice::PerSite => "per-site",
    };
    let mut line = format!(
        "{kind}: N = {}, B = ({}, {}, {}), V = ({}, {}, {}), gamma = {}",
        m.n_sites, m.b_field[0], m.b_field[1], m.b_field[2], m.v[0], m.v[1], m.v[2], m.gamma_total
    );
    if m.gamma_total != 0.0 {
        line.push_str(&format!(", n_b = {}, g_ratio = {}, {rule}", m.n_b, m.g_ratio));
    }
    if matches!(c.kind, Kind::Dynamics | Kind::Compare | Kind::Hysteresis) {
        line.push_str(&format!(", {mode} mean field ({mf})"));
    }
    match c.kind {
        Kind::Hysteresis => {
            if let Some(grid) = &c.bz_grid {
                if let Ok(pts) = grid.points() {
                    line.push_str(&format!(
                        ", B_z grid {} points in [{}, {}]",
                        pts.len(),
                        pts[0],
                        pts[pts.len() - 1]
                    ));
                }
            }
        }
        Kind::Compare => {
            if let Some(grid) = &c.bz_grid {
                if let Ok(pts) = grid.points() {
                    line.push_str(&format!(
                        ", B_z grid {} points in [{}, {}]",
                        pts.len(),
                        pts[0],
                        pts[pts.len() - 1]
                    ));
                }
            } else {
                line.push_str(&format!(
                    ", t on [0, {}] (dt = {}, sampled every {} steps)",
                    c.t_end, c.dt, c.sample_every
                ));
            }
        }
        Kind::Correlations => {
            line.push_str(&format!(
                ", pair ({}, {}), t on [0, {}]",
                c.pair[0], c.pair[1], c.t_end
            ));
        }
        Kind::Dynamics => {
            line.push_str(&format!(
                ", seed {}, t on [0, {}]",
                describe_initial(&c.initial_state),
                c.t_end
            ));
        }
        Kind::Spectrum => {}
    }
    line
}

/// Render the full preset table for the `presets` subcommand.
pub fn listing() -> String {
    let mut out = String::new();
    for preset in all_presets() {
        out.push_str(&format!("{}\n  {}\n", preset.id, preset.summary));
        for run in &preset.runs {
            let label = if run.label.is_empty() {
                "(single run)".to_string()
            } else {
                run.label.to_string()
            };
            out.push_str(&format!("  - {label}: {}\n", describe_run(run)));
        }
        out.push('\n');
    }
    out
}
