//! End-to-end tests of the `simulate` binary: subcommands, exit codes,
//! output files, and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
}

fn fresh_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process terminated by signal")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn read_summary(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn presets_subcommand_lists_every_id() {
    let out = run(&["presets"]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    for id in [
        "fig2a_caption",
        "fig2a_text",
        "fig2b",
        "fig2c",
        "fig2d",
        "fig3ab",
        "fig3cd",
        "fig4",
        "fig5a",
        "fig5b",
        "fig5c",
        "fig5d",
        "fig6",
    ] {
        assert!(text.contains(id), "listing misses {id}");
    }
}

#[test]
fn minimal_config_runs_with_documented_defaults() {
    let dir = fresh_dir("minimal");
    let cfg = write_config(
        &dir,
        "precession.json",
        r#"{"kind":"dynamics","model":{"n_sites":1,"b_field":[0.0,0.0,1.0]}}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let csv = fs::read_to_string(dir.join("precession.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,Mx,My,Mz,Mnorm");
    // Defaults: t_end = 100, dt = 1e-3, sampled every 100 steps
    // -> 1 + 1000 rows.
    assert_eq!(lines.len(), 1 + 1001);

    let summary = read_summary(&dir.join("precession_summary.json"));
    assert_eq!(summary["kind"], "dynamics");
    assert_eq!(summary["samples"], 1001);
    assert!(summary["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn unknown_keys_exit_with_the_config_code() {
    let dir = fresh_dir("unknown-key");
    let cfg = write_config(
        &dir,
        "typo.json",
        r#"{"kind":"dynamics","model":{"n_sites":1},"t_endd":5.0}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("t_endd"), "{}", stderr(&out));
}

#[test]
fn malformed_json_exits_with_the_config_code() {
    let dir = fresh_dir("malformed");
    let cfg = write_config(&dir, "broken.json", "not json at all");
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn missing_config_file_exits_with_the_config_code() {
    let out = run(&["run", "/nonexistent/path/to/config.json"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("cannot read"), "{}", stderr(&out));
}

#[test]
fn negative_rates_exit_with_the_config_code() {
    let dir = fresh_dir("negative-rate");
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"kind":"dynamics","model":{"n_sites":1,"gamma_total":-0.1}}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_preset_exits_with_the_config_code() {
    let dir = fresh_dir("unknown-preset");
    let out = run(&["preset", "fig99", "--out", dir.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("fig99"), "{}", stderr(&out));
}

#[test]
fn oversized_chains_exit_with_the_capacity_code() {
    let dir = fresh_dir("capacity");
    let cfg = write_config(
        &dir,
        "huge.json",
        r#"{"kind":"compare","model":{"n_sites":7,"b_field":[0.0,0.0,1.0],
            "gamma_total":0.1},"t_end":1.0}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 4, "{}", stderr(&out));
    assert!(fs::read_dir(&dir).unwrap().count() == 1, "no output expected");
}

#[test]
fn unconverged_sweeps_exit_with_the_solver_code() {
    let dir = fresh_dir("nonconvergence");
    // Zero damping never settles; a tiny horizon makes the failure quick.
    let cfg = write_config(
        &dir,
        "stuck.json",
        r#"{"kind":"hysteresis","model":{"n_sites":10,"v":[0.0,0.0,1.0]},
            "meanfield":{"damping":"ll_alpha","alpha":0.0},
            "bz_grid":[-1.0,1.0],"steady_t_max":0.05}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 3, "{}", stderr(&out));
}

/// Two detuned qubits whose generator has a severely defective eigenbasis:
/// the modal solver must refuse them.
const DEFECTIVE_MODEL: &str = r#"{"kind":"KIND","model":{"n_sites":2,
    "b_field":[0.1,0.0,0.0],"gamma_total":0.4,"n_b":0.0,
    "neighbour_rule":"none"},"t_end":1.0SOLVER}"#;

#[test]
fn spectrum_of_a_defective_generator_exits_with_the_spectral_code() {
    let dir = fresh_dir("defective-spectrum");
    let body = DEFECTIVE_MODEL
        .replace("KIND", "spectrum")
        .replace("SOLVER", "");
    let cfg = write_config(&dir, "ep.json", &body);
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 5, "{}", stderr(&out));
    assert!(stderr(&out).contains("condition"), "{}", stderr(&out));
}

#[test]
fn explicit_spectral_choice_is_refused_but_auto_falls_back() {
    let dir = fresh_dir("defective-compare");
    let forced = DEFECTIVE_MODEL
        .replace("KIND", "compare")
        .replace("SOLVER", r#","solver":"spectral""#);
    let cfg = write_config(&dir, "forced.json", &forced);
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 5, "{}", stderr(&out));

    let auto = DEFECTIVE_MODEL
        .replace("KIND", "compare")
        .replace("SOLVER", "");
    let cfg = write_config(&dir, "auto.json", &auto);
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let summary = read_summary(&dir.join("auto_summary.json"));
    assert_eq!(summary["solver_path"], "master_equation_rk4");
    assert!(
        summary["fallback_reason"]
            .as_str()
            .unwrap()
            .contains("condition"),
        "{}",
        summary["fallback_reason"]
    );
}

#[test]
fn preset_outputs_are_byte_identical_across_runs() {
    let dir1 = fresh_dir("determinism-1");
    let dir2 = fresh_dir("determinism-2");
    for dir in [&dir1, &dir2] {
        let out = run(&["preset", "fig2a_text", "--out", dir.to_str().unwrap()]);
        assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    }
    let a = fs::read(dir1.join("fig2a_text.csv")).unwrap();
    let b = fs::read(dir2.join("fig2a_text.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "repeated preset runs differ");
}

#[test]
fn reversal_preset_lands_on_the_field_axis() {
    let dir = fresh_dir("reversal");
    let out = run(&["preset", "fig2a_caption", "--out", dir.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let summary = read_summary(&dir.join("fig2a_caption_summary.json"));
    let m = summary["terminal_magnetization"].as_array().unwrap();
    assert!(m[0].as_f64().unwrap().abs() < 1e-3);
    assert!(m[1].as_f64().unwrap().abs() < 1e-3);
    assert!((m[2].as_f64().unwrap() + 1.0).abs() < 1e-3);
    assert!(summary["magnitude_drift"].as_f64().unwrap() < 1e-6);
}

#[test]
fn tilted_field_preset_reaches_the_reference_steady_state() {
    let dir = fresh_dir("tilted-steady");
    let out = run(&["preset", "fig2c", "--out", dir.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let summary = read_summary(&dir.join("fig2c_summary.json"));
    let m = summary["terminal_magnetization"].as_array().unwrap();
    let expected = [0.31, 0.31, -0.89];
    for (c, e) in m.iter().zip(expected) {
        assert!(
            (c.as_f64().unwrap() - e).abs() < 0.01,
            "steady state {m:?} vs {expected:?}"
        );
    }
}

#[test]
fn hysteresis_run_emits_branches_and_the_coercive_field() {
    let dir = fresh_dir("hysteresis");
    let cfg = write_config(
        &dir,
        "loop.json",
        r#"{"kind":"hysteresis","model":{"n_sites":100,"v":[0.0,0.0,0.5]},
            "meanfield":{"damping":"ll_alpha","alpha":0.5},
            "bz_grid":{"lo":-2.0,"hi":2.0,"count":41}}"#,
    );
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let csv = fs::read_to_string(dir.join("loop.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "branch,Bz,Mz,Mx,My");
    assert_eq!(lines.len(), 1 + 2 * 41);
    assert!(lines[1].starts_with("up,"));
    assert!(lines[42].starts_with("down,"));

    let summary = read_summary(&dir.join("loop_summary.json"));
    let coercive = summary["coercive_field"].as_f64().unwrap();
    // Switching happens at the easy-axis coupling strength, up to one
    // grid spacing (0.1).
    assert!((coercive - 0.5).abs() <= 0.1 + 1e-9, "coercive {coercive}");
}

#[test]
fn spectrum_subcommand_tabulates_every_mode() {
    let dir = fresh_dir("spectrum");
    let cfg = write_config(
        &dir,
        "qubit.json",
        r#"{"kind":"dynamics","model":{"n_sites":1,"b_field":[0.0,0.0,1.0],
            "gamma_total":0.1}}"#,
    );
    let out = run(&["spectrum", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let csv = fs::read_to_string(dir.join("qubit_spectrum.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,lambda_re,lambda_im");
    assert_eq!(lines.len(), 1 + 4);
    // The stationary mode leads the table.
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "1");
    assert!(first[1].parse::<f64>().unwrap().abs() < 1e-10);

    let summary = read_summary(&dir.join("qubit_spectrum_summary.json"));
    assert_eq!(summary["zero_modes"], 1);
    assert_eq!(summary["hilbert_dim"], 2);
    assert!(summary["spectral_gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn output_path_overrides_the_default_location() {
    let dir = fresh_dir("output-path");
    let target = dir.join("elsewhere").join("table.csv");
    fs::create_dir_all(target.parent().unwrap()).unwrap();
    let body = format!(
        r#"{{"kind":"dynamics","model":{{"n_sites":1,"b_field":[0.0,0.0,1.0]}},
            "t_end":1.0,"output_path":"{}"}}"#,
        target.display()
    );
    let cfg = write_config(&dir, "cfg.json", &body);
    let out = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    assert!(target.exists());
    assert!(!dir.join("cfg.csv").exists());
}

#[test]
fn correlation_preset_reports_the_entanglement_pulse() {
    let dir = fresh_dir("pulse");
    let out = run(&["preset", "fig6", "--out", dir.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));

    let csv = fs::read_to_string(dir.join("fig6_vx_1.0.csv")).unwrap();
    assert!(csv.starts_with("t,Cxx12,C12\n"));

    let summary = read_summary(&dir.join("fig6_vx_1.0_summary.json"));
    assert!(summary["initial_concurrence"].as_f64().unwrap() < 1e-8);
    let peak = summary["max_concurrence"].as_f64().unwrap();
    assert!(
        (0.21..=0.31).contains(&peak),
        "pulse peak {peak} outside the expected band"
    );
    assert!(summary["stationary_concurrence"].is_number());
}

#[test]
fn solver_override_switches_the_exact_propagator() {
    let dir = fresh_dir("override");
    let out = run(&[
        "preset",
        "fig3ab",
        "--out",
        dir.to_str().unwrap(),
        "--solver",
        "rk4",
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let summary = read_summary(&dir.join("fig3ab_summary.json"));
    assert_eq!(summary["solver_path"], "master_equation_rk4");
    assert_eq!(summary["diagnostics"]["flagged"], false);
}
