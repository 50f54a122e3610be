use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use optiphase::input::StateArg;
use optiphase::profile::ProfileSidecar;
use optiphase::report::{OptimizerJson, StrategyJson};
use optiphase::sweep::{run_sweep, write_csv, SweepConfig};
use optiphase_core::{optimal_strategy, optimize_probe, CircularPrior, OptimizerConfig, ProbeState};

fn optiphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optiphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json<T: for<'de> serde::Deserialize<'de>>(out: &Output) -> T {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn optimal_matches_library() {
    let out = optiphase(&[
        "optimal",
        "--state",
        "binomial",
        "--n",
        "5",
        "--prior",
        "diffusive",
        "--t",
        "0.3",
    ]);
    let json: StrategyJson = stdout_json(&out);
    let prior = CircularPrior::diffusive(0.3, 1e-14).unwrap();
    let lib = optimal_strategy(&ProbeState::classical_binomial(5).unwrap().to_density(), &prior);
    assert_eq!(json.cost, lib.cost);
    assert_eq!(json.phases, lib.measurement.phases());
    assert_eq!(json.basis.len(), 6);
    assert_eq!(json.posterior_uncertainty, lib.cost.sqrt());
}

#[test]
fn uniform_bw_closed_form() {
    let json: StrategyJson = stdout_json(&optiphase(&[
        "optimal", "--state", "bw", "--n", "10", "--prior", "uniform",
    ]));
    let expected = 2.0 * (1.0 - (std::f64::consts::PI / 12.0).cos());
    assert!((json.cost - expected).abs() < 1e-12);
    assert!((json.cost - 0.0681483).abs() < 1e-6);
}

#[test]
fn local_noon_has_two_dominant_outcomes() {
    let json: StrategyJson = stdout_json(&optiphase(&[
        "optimal",
        "--state",
        "noon",
        "--n",
        "3",
        "--prior",
        "diffusive",
        "--t",
        "0.02",
    ]));
    assert!(json.cost < 0.05);
    // outcome weight is the squared overlap of the basis vector with the probe
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut weights: Vec<f64> = json
        .basis
        .iter()
        .map(|v| {
            let re = amp * (v[0][0] + v[3][0]);
            let im = amp * (v[0][1] + v[3][1]);
            re * re + im * im
        })
        .collect();
    weights.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert!(weights[0] + weights[1] > 1.0 - 1e-12);
    assert!(weights[1] > 0.4);
}

#[test]
fn zero_state_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"type":"amplitudes","values":[[0,0],[0,0],[0,0]]}"#).unwrap();
    let out = optiphase(&["optimal", "--state", &format!("file:{}", bad.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero vector"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["optimal", "--state", "bw", "--n", "4"][..],
        &["optimal", "--state", "sine", "--n", "4", "--prior", "uniform"],
        &["optimal", "--state", "noon", "--n", "0", "--prior", "uniform"],
        &[
            "optimal",
            "--state",
            "bw",
            "--n",
            "4",
            "--prior",
            "diffusive",
            "--t",
            "-1",
        ],
        &[
            "optimal",
            "--state",
            "bw",
            "--n",
            "4",
            "--prior",
            "fourier-file:/nonexistent.json",
        ],
        &["sweep", "--n", "3", "--t-grid", "1:1:log:4"],
        &["sweep", "--n", "3", "--t-grid", "0.1:1:log:0"],
        &["sweep", "--n", "3", "--jobs", "0", "--t-grid", "0.1:1:log:2"],
        &[
            "optimize",
            "--n",
            "3",
            "--prior",
            "uniform",
            "--restarts",
            "2",
            "--tol",
            "-1",
        ],
        &["bogus"],
    ] {
        let out = optiphase(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn fourier_file_prior() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prior.json");
    fs::write(&path, r#"{"type":"fourier","coeffs":[[1,0],[0.5,0.2],[0.1,0]]}"#).unwrap();
    let prior_arg = format!("fourier-file:{}", path.display());
    let json: StrategyJson = stdout_json(&optiphase(&[
        "optimal", "--state", "flat", "--n", "2", "--prior", &prior_arg,
    ]));
    let prior = CircularPrior::from_coefficients(vec![
        num_complex::Complex64::new(1.0, 0.0),
        num_complex::Complex64::new(0.5, 0.2),
        num_complex::Complex64::new(0.1, 0.0),
    ])
    .unwrap();
    let lib = optimal_strategy(&ProbeState::flat(2).unwrap().to_density(), &prior);
    assert_eq!(json.cost, lib.cost);
}

#[test]
fn density_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    fs::write(
        &path,
        r#"{"type":"density","matrix":[[[0.5,0],[0.25,0]],[[0.25,0],[0.5,0]]]}"#,
    )
    .unwrap();
    let state = format!("file:{}", path.display());
    let json: StrategyJson = stdout_json(&optiphase(&["optimal", "--state", &state, "--prior", "uniform"]));
    // B = [[0, 0], [1/8, 0]] has trace norm 1/8
    assert!((json.cost - 1.5).abs() < 1e-12);
    let out = optiphase(&["profile", "--state", &state, "--prior", "uniform"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_matches_library() {
    let out = optiphase(&["optimize", "--n", "4", "--t", "0.5", "--restarts", "7", "--seed", "3"]);
    let json: OptimizerJson = stdout_json(&out);
    let cfg = OptimizerConfig {
        restarts: 7,
        seed: 3,
        ..OptimizerConfig::default()
    };
    let lib = optimize_probe(4, &CircularPrior::diffusive(0.5, 1e-14).unwrap(), &cfg).unwrap();
    assert_eq!(json.cost, lib.cost);
    assert_eq!(json.iterations, lib.iterations);
    assert_eq!(json.converged, lib.converged);
    assert_eq!(json.fidelity_trace, lib.fidelity_trace);
    assert_eq!(json.state.len(), 5);
}

fn sweep_bytes(dir: &Path, jobs: &str) -> Vec<u8> {
    let path = dir.join(format!("sweep{jobs}.csv"));
    let out = optiphase(&[
        "sweep",
        "--n",
        "4",
        "--t-grid",
        "0.01:10:log:5",
        "--states",
        "noon,bw,optimal",
        "--jobs",
        jobs,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read(path).unwrap()
}

#[test]
fn sweep_is_deterministic_and_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let one = sweep_bytes(dir.path(), "1");
    let three = sweep_bytes(dir.path(), "3");
    assert_eq!(one, three);

    let states = [StateArg::Noon, StateArg::Bw, StateArg::Optimal];
    let ts: Vec<f64> = "0.01:10:log:5".parse::<optiphase::sweep::TGrid>().unwrap().values();
    let recs = run_sweep(&ts, &states, &SweepConfig::new(4)).unwrap();
    let mut lib = Vec::new();
    write_csv(&recs, &mut lib).unwrap();
    assert_eq!(one, lib);

    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.starts_with("t,delta_phi_prior,state,cost,delta_phi,ratio\n"));
}

#[test]
fn profile_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("prof.csv");
    let out = optiphase(&[
        "profile",
        "--n",
        "2",
        "--state",
        "bw",
        "--t",
        "1",
        "--points",
        "90",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,p0,p1,p2"));
    assert_eq!(lines.count(), 90);

    let side: ProfileSidecar =
        serde_json::from_str(&fs::read_to_string(dir.path().join("prof.json")).unwrap()).unwrap();
    assert_eq!(side.phases.len(), 3);
    assert_eq!(side.amplitudes.len(), 3);
    let prior = CircularPrior::diffusive(1.0, 1e-14).unwrap();
    let lib = optimal_strategy(&ProbeState::berry_wiseman(2).unwrap().to_density(), &prior);
    assert_eq!(side.cost, lib.cost);
    assert_eq!(side.phases, lib.measurement.phases());
}

#[test]
fn verify_is_hidden_and_passes() {
    let help = optiphase(&["--help"]);
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("sweep") && !text.contains("verify"));

    let out = optiphase(&["verify", "--instances", "5", "--seed", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report = String::from_utf8_lossy(&out.stdout);
    assert_eq!(report.lines().filter(|l| l.starts_with("PASS")).count(), 4);
}
