use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BENCHMARK: &str = r#"
seed = 3
[system]
preset = "two_wave"
n = 3
b = 0.6
[grid]
points = 4096
r_max = 20.0
[evolve]
dt = 1e-4
t_final = 0.05
"#;

fn inls(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_inls"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join("out").join(name)).unwrap()
}

#[test]
fn check_passes_for_presets_and_fails_for_a_bad_gauge() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["two_wave", "three_wave_a", "three_wave_b"] {
        let cfg = format!("[system]\npreset = \"{preset}\"\n[check]\nsamples = 200\n");
        assert_eq!(inls(dir.path(), &cfg, &["check"]).status.code(), Some(0), "{preset}");
    }
    let bad = "[system]\npreset = \"two_wave\"\nsigma = [1.0, 1.0]\n";
    assert_eq!(inls(dir.path(), bad, &["check"]).status.code(), Some(1));
    assert!(read(dir.path(), "hypotheses.txt").contains("H4 = FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = Command::new(env!("CARGO_BIN_EXE_inls"))
        .args(["--config", "/definitely/not/here.toml", "check"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(inls(dir.path(), "[grid]\nspacing = 1.0\n", &["check"]).status.code(), Some(2));
    let negative = format!("{BENCHMARK}\n[ground_state]\nomega = -1.0\n");
    assert_eq!(inls(dir.path(), &negative, &["ground-state"]).status.code(), Some(2));
}

#[test]
fn ground_state_certifies_and_reports_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = inls(dir.path(), BENCHMARK, &["ground-state"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(read(dir.path(), "certification.txt").lines().all(|l| l.contains("= pass")));
    assert!(dir.path().join("out/ground_state.bin").exists());
    assert!(read(dir.path(), "profile.csv").starts_with("r,psi_1,psi_2\n"));

    let report = inls(
        dir.path(),
        BENCHMARK,
        &["report", "--input", dir.path().join("out/ground_state.bin").to_str().unwrap()],
    );
    assert_eq!(report.status.code(), Some(0));
    assert!(read(dir.path(), "report.txt").contains("xi1_gap"));

    let once = format!("{BENCHMARK}\n[ground_state]\nmax_iterations = 1\n");
    assert_eq!(inls(dir.path(), &once, &["ground-state"]).status.code(), Some(1));
    assert!(read(dir.path(), "residual_history.csv").starts_with("iteration,residual\n"));
}

#[test]
fn classify_and_evolve_below_the_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = inls(dir.path(), BENCHMARK, &["classify", "--c", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(read(dir.path(), "classification.txt").contains("verdict = GlobalIntercritical"));

    let cfg = format!("{BENCHMARK}\n[dichotomy]\ncutoff_radius = 5.0\n");
    let out = inls(dir.path(), &cfg, &["evolve", "--c", "0.9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = read(dir.path(), "trace.csv");
    assert!(trace
        .starts_with("t,Q,E,K,L,P,grad_norm_1,grad_norm_2,tail_fraction,V,R,virial_rhs,delta_margin,flag\n"));
    assert_eq!(trace.lines().count(), 1 + 51);
    assert!(read(dir.path(), "summary.txt").contains("flag = none"));
}

#[test]
fn evolve_above_the_threshold_flags_and_large_steps_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = inls(dir.path(), BENCHMARK, &["evolve", "--c", "1.3", "--t-final", "1.0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read(dir.path(), "summary.txt");
    assert!(summary.contains("verdict = BlowUpCandidate"));
    assert!(summary.contains("flag = kinetic"));

    let out = inls(dir.path(), BENCHMARK, &["evolve", "--c", "1.1", "--dt", "0.1", "--t-final", "2.0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(read(dir.path(), "summary.txt").contains("contradiction"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["evolve", "--c", "0.95", "--t-final", "0.02"];
    inls(dir.path(), BENCHMARK, &args);
    let first = read(dir.path(), "trace.csv");
    inls(dir.path(), BENCHMARK, &args);
    assert_eq!(first, read(dir.path(), "trace.csv"));
}

#[test]
fn sweep_rows_follow_the_scalings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BENCHMARK}\n[dichotomy]\nc_values = [0.8, 1.0, 1.2]\n");
    let out = inls(dir.path(), &cfg, &["--threads", "2", "sweep"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "sweep.csv");
    let verdicts: Vec<_> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().to_string()).collect();
    assert_eq!(verdicts, ["GlobalIntercritical", "Indeterminate", "BlowUpCandidate"]);

    let empty = format!("{BENCHMARK}\n[dichotomy]\nc_values = []\n");
    assert_eq!(inls(dir.path(), &empty, &["sweep"]).status.code(), Some(0));
    assert_eq!(read(dir.path(), "sweep.csv").lines().count(), 1);
}
