use qca_cli::{run, Command, Report, RunConfig};
use std::path::Path;
use std::process::Command as Process;

fn qca(args: &[&str]) -> (i32, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_qca")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_report(dir: &Path, command: &str) -> Report {
    let text = std::fs::read_to_string(dir.join(format!("{command}_report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn derive_lists_solutions_and_classes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = qca(&["derive", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    for pair in ["(1,-3)", "(1,1)", "(-3,1)"] {
        assert!(stdout.contains(pair), "missing {pair}");
    }
    let report = read_report(dir.path(), "derive");
    assert!(report.pass);
    assert_eq!(report.get("classes").unwrap().value, 2.0);
    assert_eq!(report.get("automata").unwrap().value, 12.0);
}

#[test]
fn verify_passes_on_canonical_solution() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = qca(&["verify", "--tol", "1e-12", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = read_report(dir.path(), "verify");
    assert!(report.pass && report.entries.iter().all(|e| e.pass));
    assert!(report.get("isotropy").is_some() && report.get("C0").is_some());
}

#[test]
fn spectrum_flags_a_branch_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"solution": {"alpha_branch": "-"}, "spectrum": {"closed_form_branch": "+"}}"#);
    let (code, _) = qca(&["spectrum", "--config", &cfg, "--output", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let report = read_report(dir.path(), "spectrum");
    assert!(!report.pass);
    assert!(report.get("max abs_err").unwrap().value >= 0.1);
}

#[test]
fn spectrum_csv_has_header_and_grid_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"spectrum": {"grid": 5}}"#);
    let (code, _) = qca(&["spectrum", "--config", &cfg, "--output", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("kx,ky,kz,w_num_1,w_num_2,w_cf_plus,w_cf_minus,abs_err\n"));
    assert_eq!(csv.lines().count(), 1 + 125);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = write_config(dir.path(), r#"{"unknown_key": true}"#);
    assert_eq!(qca(&["derive", "--config", &cfg, "--output", out]).0, 2);
    assert_eq!(qca(&["frobnicate"]).0, 2);
    assert_eq!(qca(&["derive", "--config", "/nonexistent/config.json"]).0, 2);
    let cfg = write_config(dir.path(), r#"{"lattice": {"L": 7}}"#);
    assert_eq!(qca(&["evolve", "--config", &cfg, "--output", out]).0, 2);
    let cfg = write_config(dir.path(), r#"{"dirac": {"s": 1.5}}"#);
    assert_eq!(qca(&["dirac", "--config", &cfg, "--output", out]).0, 2);
    let cfg = write_config(dir.path(), r#"{"evolve": {"model": "dirac"}}"#);
    assert_eq!(qca(&["evolve", "--config", &cfg, "--output", out]).0, 2);
}

#[test]
fn limit_csv_is_deterministic_per_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run_limit = |dir: &Path, seed: &str| {
        let cfg = write_config(dir, r#"{"dirac": {"s": 0.9}}"#);
        let (code, _) = qca(&["limit", "--config", &cfg, "--seed", seed, "--output", dir.to_str().unwrap()]);
        assert_eq!(code, 0);
        std::fs::read_to_string(dir.join("limit.csv")).unwrap()
    };
    let first = run_limit(a.path(), "7");
    assert_eq!(first, run_limit(b.path(), "7"));
    assert_ne!(first, run_limit(b.path(), "8"));
    assert!(first.starts_with("model,direction,nx,ny,nz,eps,residual,fitted_order\n"));
    assert_eq!(first.lines().count(), 1 + 2 * 20 * 4);
}

#[test]
fn dirac_checks_pass_for_a_single_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        output_path: dir.path().to_path_buf(),
        dirac: qca_cli::DiracConfig { s: Some(0.5), mass_sign: qca_core::Sign::Minus },
        ..RunConfig::default()
    };
    let report = run(Command::Dirac, &cfg).unwrap();
    assert!(report.pass, "{report}");
    assert!(report.get("s=0.5 eigenvalue multiplicity two").unwrap().pass);
}

#[test]
fn evolve_writes_trajectory_and_density() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_json(
        r#"{"lattice": {"L": 32}, "packet": {"k0": [0.8, 0, 0], "sigma": 4},
            "evolve": {"steps": 12, "velocity_rel_tol": 0.05}}"#,
    )
    .unwrap();
    let cfg = RunConfig { output_path: dir.path().to_path_buf(), ..cfg };
    let report = run(Command::Evolve, &cfg).unwrap();
    assert!(report.pass, "{report}");
    let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,cx,cy,cz,norm\n"));
    assert_eq!(traj.lines().count(), 1 + 13);
    let density = std::fs::read_to_string(dir.path().join("density_final.csv")).unwrap();
    assert_eq!(density.lines().count(), 1 + 32 * 32 * 32);
    assert_eq!(report.artifact_paths.len(), 3);
}
