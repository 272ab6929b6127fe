//! End-to-end checks of the command-line interface: exit codes, output
//! determinism, config-file handling and the metrics command.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_newton-forge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("newton-forge-test-{}-{name}", std::process::id()));
    p
}

fn manifest_path() -> &'static str {
    concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../assets/newton-architecture.manifest"
    )
}

#[test]
fn solve_converges_with_exit_zero() {
    let out = run(&[
        "solve",
        "--driver",
        "damped-newton",
        "--problem",
        "quadratic",
        "--x0",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let line = stdout(&out);
    assert!(line.starts_with("Converged "), "got: {line}");
    assert!(line.contains("iters=1"), "got: {line}");
}

#[test]
fn solve_writes_trace_with_initial_row() {
    let trace = tmp_path("trace.csv");
    let out = run(&[
        "solve",
        "--driver",
        "bfgs",
        "--problem",
        "rosenbrock",
        "--x0",
        "-1.2,1",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,f,grad_norm,step_control,dir_norm,accepted"
    );
    let row0: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row0[0], "0");
    let f0: f64 = row0[1].parse().unwrap();
    assert!((f0 - 24.2).abs() < 1e-12, "row 0 f = {f0}");
    std::fs::remove_file(&trace).ok();
}

#[test]
fn identical_invocations_are_byte_identical() {
    let t1 = tmp_path("det1.csv");
    let t2 = tmp_path("det2.csv");
    let args = |t: &Path| {
        vec![
            "solve".to_string(),
            "--driver".into(),
            "trust-region-newton".into(),
            "--problem".into(),
            "rosenbrock".into(),
            "--x0".into(),
            "-1.2,1".into(),
            "--trace".into(),
            t.to_str().unwrap().to_string(),
        ]
    };
    let o1 = bin().args(args(&t1)).output().unwrap();
    let o2 = bin().args(args(&t2)).output().unwrap();
    assert_eq!(o1.stdout, o2.stdout);
    assert_eq!(
        std::fs::read(&t1).unwrap(),
        std::fs::read(&t2).unwrap(),
        "trace files differ"
    );
    std::fs::remove_file(&t1).ok();
    std::fs::remove_file(&t2).ok();
}

#[test]
fn max_iterations_exits_two() {
    let out = run(&[
        "solve",
        "--driver",
        "bfgs",
        "--problem",
        "rosenbrock",
        "--x0",
        "-1.2,1",
        "--max-iter",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).starts_with("MaxIterations "));
}

#[test]
fn solver_failure_exits_three() {
    // One line-search trial cannot satisfy Armijo on the first Rosenbrock
    // step, so the solve fails deterministically.
    let cfg = tmp_path("fail.cfg");
    std::fs::write(
        &cfg,
        "driver = damped-newton\nproblem = rosenbrock\nx0 = -1.2, 1\nmax_trials = 1\nlambda0 = 1000\n",
    )
    .unwrap();
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "stdout: {}", stdout(&out));
    assert!(stdout(&out).starts_with("LineSearchFailed "));
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn usage_errors_exit_one() {
    // Unknown driver names its category.
    let out = run(&[
        "solve", "--driver", "no-such", "--problem", "quadratic", "--x0", "1,1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("driver"), "stderr: {}", stderr(&out));

    // Missing arguments.
    let out = run(&["solve", "--driver", "bfgs"]);
    assert_eq!(out.status.code(), Some(1));

    // Malformed x0.
    let out = run(&[
        "solve", "--driver", "bfgs", "--problem", "quadratic", "--x0", "a,b",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Unknown subcommand flag.
    let out = run(&["solve", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));

    // Unknown list category.
    let out = run(&["list", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inline_flags_override_config_values() {
    let cfg = tmp_path("override.cfg");
    std::fs::write(
        &cfg,
        "driver = bfgs\nproblem = rosenbrock\nx0 = -1.2, 1\n",
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--problem",
        "quadratic",
        "--x0",
        "2,2",
        "--driver",
        "damped-newton",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("iters=1"), "got: {}", stdout(&out));
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn list_prints_sorted_names() {
    let out = run(&["list", "drivers"]);
    assert_eq!(out.status.code(), Some(0));
    let listing = stdout(&out);
    let names: Vec<&str> = listing.lines().collect();
    assert_eq!(
        names,
        vec![
            "bfgs",
            "damped-newton",
            "gauss-newton",
            "inexact-newton",
            "trust-region-newton"
        ]
    );

    let out = run(&["list", "subproblems"]);
    let listing = stdout(&out);
    assert_eq!(
        listing.lines().collect::<Vec<_>>(),
        vec!["cauchy", "dogleg", "subspace-2d"]
    );

    let out = run(&["list", "conditions"]);
    assert_eq!(stdout(&out).lines().count(), 4);
    let out = run(&["list", "generators"]);
    assert_eq!(stdout(&out).lines().count(), 3);
    let out = run(&["list", "problems"]);
    assert_eq!(stdout(&out).lines().count(), 5);
    let out = run(&["list", "linear-solvers"]);
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn metrics_prints_table_and_full_precision_csv() {
    let csv = tmp_path("metrics.csv");
    let out = run(&[
        "metrics",
        "--manifest",
        manifest_path(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let table = stdout(&out);
    assert_eq!(
        table,
        "package,A,I,D\n\
         NonlinearMethods,0.29,0.46,0.25\n\
         LineSearchMethods,0.20,0.70,0.10\n\
         TrustRegionMethods,0.29,0.80,0.09\n\
         BaseArchitecture,0.75,0.31,0.06\n"
    );
    let full = std::fs::read_to_string(&csv).unwrap();
    assert!(full.starts_with("package,n_abstract,n_classes,c_e,c_a,A,I,D\n"));
    // Full precision retains the unrounded ratios.
    assert!(full.contains("0.2857142857142857"), "csv: {full}");
    std::fs::remove_file(&csv).ok();
}

#[test]
fn metrics_empty_manifest_exits_one() {
    let empty = tmp_path("empty.manifest");
    std::fs::write(&empty, "# nothing\n").unwrap();
    let out = run(&["metrics", "--manifest", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(&empty).ok();
}

#[test]
fn metrics_isolated_package_annotates_stderr_but_succeeds() {
    let m = tmp_path("isolated.manifest");
    std::fs::write(
        &m,
        "package a\npackage b\nclass a.X concrete\nclass b.Y concrete\ndepends a.X -> b.Y\n\
         package lone\nclass lone.Z concrete\n",
    )
    .unwrap();
    let out = run(&["metrics", "--manifest", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("lone"), "stderr: {}", stderr(&out));
    std::fs::remove_file(&m).ok();
}

#[test]
fn config_warnings_do_not_pollute_stdout() {
    let cfg = tmp_path("dup.cfg");
    std::fs::write(
        &cfg,
        "driver = damped-newton\nproblem = quadratic\nx0 = 1, 1\nc1 = 0.1\nc1 = 0.0001\n",
    )
    .unwrap();
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("duplicate key 'c1'"));
    assert!(stdout(&out).starts_with("Converged "));
    std::fs::remove_file(&cfg).ok();
}
