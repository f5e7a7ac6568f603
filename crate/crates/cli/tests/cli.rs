//! Exit-code contract and file-format checks, driving the real binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn gippa(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gippa"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) {
    fs::write(dir.join(name), content).unwrap();
}

fn fixtures(dir: &Path) {
    write(dir, "A.csv", "1.0,2.0,3.0\n4.0,5.0,6.0\n7.0,8.0,9.0\n");
    write(dir, "b.csv", "14.0\n32.0\n50.0\n");
    write(dir, "v1.csv", "2.0,2.0,3.0\n4.0,5.0,6.0\n7.0,8.0,9.0\n");
    write(dir, "e11.csv", "1.0,0.0,0.0\n0.0,0.0,0.0\n0.0,0.0,0.0\n");
    write(dir, "eye.csv", "1.0,0.0\n0.0,1.0\n");
}

const SOLVE_CONFIG: &str = r#"
max_iter = 500

[problem]
type = "affine"
a = "A.csv"
b = "b.csv"

[kernel]
type = "matrix"
file = "v1.csv"

[schedules.gamma]
kind = "offset-inverse"
base = 0.1
scale = 0.3
offset = 10.0

[schedules.alpha]
kind = "capped-ramp"
cap = 0.3
offset = 10.0

[init]
x0 = [-0.5, -0.5, -0.5]
x1 = [0.7, 0.7, 0.7]

[reference]
x_star = [1.0, 2.0, 3.0]
"#;

#[test]
fn solve_converged_run_exits_zero_and_writes_artifacts() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    write(tmp.path(), "run.toml", SOLVE_CONFIG);
    let out = gippa(&["solve", "--config", "run.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let trace = fs::read_to_string(tmp.path().join("result/trace.csv")).unwrap();
    assert!(trace.starts_with("n,step_gap,v_gap,residual,err_to_ref\n"));
    let report = fs::read_to_string(tmp.path().join("result/report.txt")).unwrap();
    assert!(report.contains("termination: step-tolerance"));
    assert!(report.contains("schedule_theory_satisfied: true"));
}

#[test]
fn solve_at_known_zero_exits_zero_after_one_iteration() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    let config = SOLVE_CONFIG
        .replace("x0 = [-0.5, -0.5, -0.5]", "x0 = [1.0, 2.0, 3.0]")
        .replace("x1 = [0.7, 0.7, 0.7]", "x1 = [1.0, 2.0, 3.0]");
    write(tmp.path(), "run.toml", &config);
    let out = gippa(&["solve", "--config", "run.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let trace = fs::read_to_string(tmp.path().join("result/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2, "header plus exactly one iteration");
}

#[test]
fn solve_max_iter_exits_two() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    let config = SOLVE_CONFIG.replace("max_iter = 500", "max_iter = 3");
    write(tmp.path(), "run.toml", &config);
    let out = gippa(&["solve", "--config", "run.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_singular_resolvent_exits_three() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "zero.csv", "0.0,0.0\n0.0,0.0\n");
    write(tmp.path(), "ones.csv", "1.0\n1.0\n");
    let config = r#"
[problem]
type = "affine"
a = "zero.csv"
b = "ones.csv"

[kernel]
type = "matrix"
file = "zero.csv"

[schedules.gamma]
kind = "constant"
value = 1.0

[schedules.alpha]
kind = "constant"
value = 0.0

[init]
x0 = [0.0, 0.0]
x1 = [0.0, 0.0]
"#;
    write(tmp.path(), "run.toml", config);
    let out = gippa(&["solve", "--config", "run.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));
}

#[test]
fn solve_bad_config_exits_one() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "run.toml", "this is not = valid toml [");
    let out = gippa(&["solve", "--config", "run.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let out = gippa(&["solve", "--config", "missing.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn kernel_factored_writes_invertible_kernel() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    let out = gippa(
        &["kernel", "--matrix", "A.csv", "--method", "factored", "--out", "B.csv"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("status: monotone"), "stdout: {stdout}");
    let content = fs::read_to_string(tmp.path().join("B.csv")).unwrap();
    assert!(content.starts_with("# kernel provenance=factored"));
    // The written kernel certifies monotone against A.
    let out = gippa(&["certify", "--a", "A.csv", "--b", "B.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn kernel_symmetric_on_diagonal_input() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "D.csv", "2.0,0.0\n0.0,0.0\n");
    let out = gippa(
        &["kernel", "--matrix", "D.csv", "--method", "symmetric", "--out", "B.csv"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let kernel = gippa_cli::csvio::read_matrix(&tmp.path().join("B.csv")).unwrap();
    assert!((kernel[(0, 0)] - 2.0).abs() < 1e-12);
    assert!((kernel[(1, 1)] - 1.0).abs() < 1e-12);
    assert!(kernel[(0, 1)].abs() < 1e-12);
}

#[test]
fn kernel_perturbation_hypothesis_violation_exits_four() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    let out = gippa(
        &[
            "kernel",
            "--matrix",
            "A.csv",
            "--method",
            "perturbation",
            "--a1",
            "e11.csv",
            "--out",
            "B.csv",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("witness"));
    assert!(!tmp.path().join("B.csv").exists());
}

#[test]
fn kernel_perturbation_requires_a1() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    let out = gippa(
        &["kernel", "--matrix", "A.csv", "--method", "perturbation", "--out", "B.csv"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certify_identity_pair_exits_zero() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    let out = gippa(&["certify", "--a", "eye.csv", "--b", "eye.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("strongly-monotone"));
}

#[test]
fn certify_refuted_pair_exits_five_with_witness() {
    let tmp = TempDir::new().unwrap();
    fixtures(tmp.path());
    let out = gippa(&["certify", "--a", "A.csv", "--b", "v1.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(5));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("status: not-monotone"));
    assert!(stdout.contains("witness: "));
}

#[test]
fn rate_on_geometric_series_prints_half() {
    let tmp = TempDir::new().unwrap();
    let series: Vec<String> = (0..40).map(|n| format!("{:e}", 2f64.powi(-n))).collect();
    write(tmp.path(), "series.txt", &(series.join("\n") + "\n"));
    let out = gippa(&["rate", "--trace", "series.txt"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rho_line = stdout.lines().find(|l| l.starts_with("rho_hat: ")).unwrap();
    let rho: f64 = rho_line.trim_start_matches("rho_hat: ").parse().unwrap();
    assert!((rho - 0.5).abs() < 1e-9, "rho_hat = {rho}");
}

#[test]
fn rate_accepts_trace_files() {
    let tmp = TempDir::new().unwrap();
    let out = gippa(&["reproduce", "example2", "--out", "rep"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let out = gippa(&["rate", "--trace", "rep/trace.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("rho_hat: "));
}

#[test]
fn reproduce_sweep_writes_comparison_and_plot() {
    let tmp = TempDir::new().unwrap();
    let out = gippa(&["reproduce", "figure3a", "--out", "sweep", "--plot"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let comparison = fs::read_to_string(tmp.path().join("sweep/comparison.csv")).unwrap();
    assert!(comparison.starts_with("config_id,iters_to_1e-6,final_error\n"));
    assert_eq!(comparison.lines().count(), 7, "header plus six configurations");
    let svg = fs::read_to_string(tmp.path().join("sweep/plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    // Inertia accelerates the nonlinear benchmark: the ramped schedule
    // reaches the tolerance in fewer iterations than the zero-inertia run.
    let field = |id: &str| -> usize {
        comparison
            .lines()
            .find(|l| l.starts_with(id))
            .and_then(|l| l.split(',').nth(1))
            .and_then(|v| v.parse().ok())
            .unwrap_or_else(|| panic!("no iteration count for {id}"))
    };
    assert!(field("alpha-ramp") < field("alpha-0.0"));
    assert!(field("alpha-0.3") < field("alpha-0.0"));
}

#[test]
fn unknown_builtin_exits_one() {
    let tmp = TempDir::new().unwrap();
    let config = r#"
[problem]
type = "builtin"
name = "nonexistent"

[kernel]
type = "identity"

[schedules.gamma]
kind = "constant"
value = 0.5

[schedules.alpha]
kind = "constant"
value = 0.0

[init]
x0 = [0.0, 0.0, 0.0]
x1 = [0.0, 0.0, 0.0]
"#;
    write(tmp.path(), "run.toml", config);
    let out = gippa(&["solve", "--config", "run.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown builtin"));
}

#[test]
fn builtin_solve_with_constructed_kernel() {
    let tmp = TempDir::new().unwrap();
    let config = r#"
max_iter = 500

[problem]
type = "builtin"
name = "example1"

[kernel]
type = "construct"
method = "factored"

[schedules.gamma]
kind = "offset-inverse"
base = 0.1
scale = 0.3
offset = 10.0

[schedules.alpha]
kind = "capped-ramp"
cap = 0.3
offset = 10.0

[init]
x0 = [-0.5, -0.5, -0.5]
x1 = [0.7, 0.7, 0.7]
"#;
    write(tmp.path(), "run.toml", config);
    let out = gippa(&["solve", "--config", "run.toml", "--out", "result"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(tmp.path().join("result/report.txt")).unwrap();
    assert!(report.contains("rate_series: residual"));
}
