//! End-to-end tests of the `helmrbf` binary: exit codes, CSV artifacts,
//! config merging, and determinism.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_helmrbf"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("helmrbf-it-{name}"));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_writes_header_and_full_grid() {
    let dir = workdir("solve");
    let out = dir.join("sol.csv");
    let r = run(&[
        "solve", "--problem", "1d", "--kappa", "6.2831853", "--n1", "30", "--eps", "4", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,x2,Re(s),Im(s),|s|,Re(r),Im(r)");
    // Default 1D evaluation grid has 200 points.
    assert_eq!(lines.len(), 201);
    assert!(stdout(&r).contains("max error vs analytic solution"));
}

#[test]
fn identical_configs_give_byte_identical_artifacts() {
    let dir = workdir("determinism");
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    let args = |out: &str| {
        vec![
            "solve".to_string(),
            "--problem".into(),
            "duct".into(),
            "--kappa".into(),
            "9.42477796".into(),
            "--n1".into(),
            "8".into(),
            "--n2".into(),
            "10".into(),
            "--eps".into(),
            "4".into(),
            "--seed".into(),
            "7".into(),
            "--out".into(),
            out.into(),
        ]
    };
    let r1 = bin().args(args(a.to_str().unwrap())).output().unwrap();
    let r2 = bin().args(args(b.to_str().unwrap())).output().unwrap();
    assert!(r1.status.success(), "stderr: {}", stderr(&r1));
    assert!(r2.status.success(), "stderr: {}", stderr(&r2));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let dir = workdir("config");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "# base setup\nproblem=1d\nkappa=3.14159265\nn1=20\neps=9\n").unwrap();
    let out = dir.join("est.csv");
    let r = run(&[
        "estimate", "--config", cfg.to_str().unwrap(), "--eps", "3", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = fs::read_to_string(&out).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("3e0,"), "flag eps should win over the file: {row}");
}

#[test]
fn validation_failures_exit_2_and_name_the_field() {
    // Missing wavenumber.
    let r = run(&["solve", "--problem", "1d", "--n1", "20", "--eps", "3"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("kappa"), "stderr: {}", stderr(&r));

    // Unknown key.
    let r = run(&["solve", "--problem", "1d", "--kappa", "3.14", "--n1", "20", "--eps", "3",
        "--frobnicate", "1"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("frobnicate"));

    // Unknown subcommand.
    let r = run(&["dance"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("subcommand"));

    // Fixed eps and a strategy together.
    let r = run(&["solve", "--problem", "1d", "--kappa", "3.14", "--n1", "20", "--eps", "3",
        "--c", "1.5", "--beta", "-0.5"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("eps"));
}

#[test]
fn io_failures_exit_3() {
    let r = run(&[
        "solve", "--problem", "1d", "--kappa", "3.14", "--n1", "20", "--eps", "3", "--out",
        "/nonexistent-dir-for-sure/out.csv",
    ]);
    assert_eq!(r.status.code(), Some(3), "stderr: {}", stderr(&r));
}

#[test]
fn singular_emits_one_row_per_eigenvalue() {
    let dir = workdir("singular");
    let out = dir.join("sing.csv");
    let r = run(&["singular", "--nrange", "6:2:8", "--eps", "5", "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,Re kappa,Im kappa,ppw");
    // The pencil has 2N eigenvalues: 12 for N=6 plus 16 for N=8.
    assert_eq!(lines.len() - 1, 28);
    // A strategy makes no sense here and must be rejected.
    let r = run(&["singular", "--nrange", "6:2:8", "--c", "1.5", "--beta", "-0.5"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn limit_classify_reports_the_fixture_case() {
    let r = run(&["limit-classify", "--fixture", "example-iii"]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = stdout(&r);
    assert!(text.contains("case: iii"), "stdout: {text}");
    assert!(text.contains("rank Q = 9 / 10"), "stdout: {text}");

    let r = run(&["limit-classify", "--fixture", "example-iv"]);
    assert!(r.status.success());
    assert!(stdout(&r).contains("case: iv"));
}

#[test]
fn generated_nodes_roundtrip_into_classification() {
    let dir = workdir("roundtrip");
    let nodes = dir.join("nodes.csv");
    let r = run(&[
        "nodes", "--problem", "rect", "--kappa", "7.0", "--n1", "5", "--n2", "6", "--out",
        nodes.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let r = run(&["limit-classify", "--nodes", nodes.to_str().unwrap(), "--problem", "rect",
        "--kappa", "7.0"]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    // A full tensor grid at a generic wavenumber is unisolvent both ways.
    assert!(stdout(&r).contains("case: i"), "stdout: {}", stdout(&r));
}

#[test]
fn estimate_bounds_the_true_error_on_the_interval_problem() {
    let dir = workdir("estimate");
    let out = dir.join("est.csv");
    let r = run(&[
        "estimate", "--problem", "1d", "--kappa", "6.2831853", "--n1", "30", "--eps", "4",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "eps,estimate,residual_l2,residual_max,true_error");
    let fields: Vec<f64> =
        text.lines().nth(1).unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    let (estimate, true_error) = (fields[1], fields[4]);
    assert!(
        estimate >= true_error,
        "the residual estimate should bound the error: {estimate} vs {true_error}"
    );
}

#[test]
fn sweep_plot_renders_markers_for_every_cell() {
    let dir = workdir("sweepplot");
    let (csv, svg) = (dir.join("sweep.csv"), dir.join("sweep.svg"));
    let r = run(&[
        "sweep", "--problem", "1d", "--kappa", "6.2831853", "--n1", "20", "--eps-grid", "2,3,4",
        "--out", csv.to_str().unwrap(), "--plot", svg.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "eps,N,h,true_error,estimate,residual_l2,cond,flags");
    assert_eq!(text.lines().count() - 1, 3);
    let svg_text = fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    // Two series (estimate and true error) over three eps values.
    assert_eq!(svg_text.matches("<circle").count(), 6);
}

#[test]
fn converge_fits_the_interval_ladder() {
    let dir = workdir("converge");
    let out = dir.join("conv.csv");
    let r = run(&[
        "converge", "--problem", "1d", "--kappa", "6.2831853", "--ladder", "10,20,30", "--eps",
        "4", "--out", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = stdout(&r);
    assert!(text.contains("error fit"), "stdout: {text}");
    assert!(text.contains("1/h"), "stdout: {text}");
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count() - 1, 3);
    // The ladder is required.
    let r = run(&["converge", "--problem", "1d", "--kappa", "6.28", "--eps", "4"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(stderr(&r).contains("ladder"));
}

#[test]
fn reproduce_table1_lists_all_bundled_node_sets() {
    let dir = workdir("table1");
    let out = dir.join("t1.csv");
    let r = run(&["reproduce", "table1", "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "stderr: {}", stderr(&r));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n1,n2,interior,inlet,outlet,wall,total");
    assert_eq!(lines.len() - 1, 7);
    assert!(lines.last().unwrap().starts_with("40,50,"));

    let r = run(&["reproduce", "nonsense"]);
    assert_eq!(r.status.code(), Some(2));
    let r = run(&["reproduce"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let r = run(&["help"]);
    assert!(r.status.success());
    assert!(stdout(&r).contains("Subcommands"));
    let r = run(&["--help"]);
    assert!(r.status.success());
}
