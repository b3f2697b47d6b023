//! End-to-end checks of the installed binary: exit codes, artifacts,
//! and flag/config interaction.

use std::path::Path;
use std::process::{Command, Output};

fn wsn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsn-sis"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn first_line(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().next().unwrap_or_default().to_string()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&wsn(&["--help"])), 0);
    assert_eq!(code(&wsn(&["--version"])), 0);
}

#[test]
fn missing_command_is_a_usage_error() {
    let out = wsn(&[]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("command"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_command_lists_alternatives() {
    let out = wsn(&["sweepbeta"]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("sweepbeta"), "stderr: {}", err);
    assert!(err.contains("sweep-beta"), "stderr: {}", err);
}

#[test]
fn out_of_range_parameter_exits_one() {
    let out = wsn(&["run-mmc", "--beta", "1.5", "--n", "30"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("beta"), "stderr: {}", stderr(&out));
}

#[test]
fn degenerate_scheduling_exits_one() {
    let out = wsn(&["run-mmc", "--u", "0", "--v", "0", "--n", "30"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn config_error_names_key_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "n = 30\n\ngamma = nope\n").unwrap();
    let out = wsn(&["run-mmc", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("gamma"), "stderr: {}", err);
    assert!(err.contains("line 3"), "stderr: {}", err);
}

#[test]
fn unwritable_out_dir_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let inside = blocker.join("sub");
    let out = wsn(&["run-mmc", "--n", "30", "--out", inside.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn generate_graph_writes_edges_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("g");
    let out = wsn(&[
        "generate-graph",
        "--n",
        "50",
        "--m",
        "2",
        "--graph-seed",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(first_line(&out_dir.join("graph.edges")), "# nodes 50");
    let meta = std::fs::read_to_string(out_dir.join("graph.meta")).unwrap();
    assert!(meta.starts_with("version = "), "meta: {}", meta);
    assert!(meta.contains("graph_seed = 3"), "meta: {}", meta);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("lambda_max"), "stdout: {}", stdout);
}

#[test]
fn run_mmc_and_run_mc_write_series() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("series");
    let base = [
        "--n", "40", "--steps", "20", "--runs", "3", "--seeds", "2", "--out",
    ];
    let mut args = vec!["run-mmc"];
    args.extend_from_slice(&base);
    args.push(out_dir.to_str().unwrap());
    assert_eq!(code(&wsn(&args)), 0);
    assert_eq!(
        first_line(&out_dir.join("mmc_series.csv")),
        "t,rho_US,rho_AS,rho_UI,rho_AI"
    );

    let mut args = vec!["run-mc"];
    args.extend_from_slice(&base);
    args.push(out_dir.to_str().unwrap());
    assert_eq!(code(&wsn(&args)), 0);
    assert_eq!(
        first_line(&out_dir.join("mc_series.csv")),
        "t,rho_US,rho_AS,rho_UI,rho_AI,sd_US,sd_AS,sd_UI,sd_AI"
    );
    let rows = std::fs::read_to_string(out_dir.join("mc_series.csv")).unwrap();
    assert_eq!(rows.lines().count(), 22); // header + t = 0..=20
}

#[test]
fn edge_list_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let gen_dir = dir.path().join("gen");
    assert_eq!(
        code(&wsn(&[
            "generate-graph",
            "--n",
            "40",
            "--graph-seed",
            "12",
            "--out",
            gen_dir.to_str().unwrap(),
        ])),
        0
    );
    let edges = gen_dir.join("graph.edges");
    let conf = dir.path().join("loaded.conf");
    std::fs::write(
        &conf,
        format!(
            "command = run-mmc\nedge_list = {}\nsteps = 10\n",
            edges.display()
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("loaded");
    let out = wsn(&[
        "--config",
        conf.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(out_dir.join("mmc_series.csv").exists());
}

#[test]
fn edge_list_conflicts_with_generator_knobs() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.edges");
    std::fs::write(&edges, "# nodes 3\n0 1\n1 2\n").unwrap();
    let conf = dir.path().join("c.conf");
    std::fs::write(
        &conf,
        format!("command = run-mmc\nedge_list = {}\nn = 5\n", edges.display()),
    )
    .unwrap();
    let out = wsn(&["--config", conf.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("edge_list"), "stderr: {}", stderr(&out));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    std::fs::write(&conf, "n = 40\nsteps = 10\nbeta = 0\n").unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (beta, out_dir) in [("0", &out_a), ("0.9", &out_b)] {
        assert_eq!(
            code(&wsn(&[
                "run-mc",
                "--config",
                conf.to_str().unwrap(),
                "--beta",
                beta,
                "--runs",
                "2",
                "--seeds",
                "4",
                "--out",
                out_dir.to_str().unwrap(),
            ])),
            0
        );
    }
    let a = std::fs::read_to_string(out_a.join("mc_series.csv")).unwrap();
    let b = std::fs::read_to_string(out_b.join("mc_series.csv")).unwrap();
    assert_ne!(a, b, "beta override had no effect");
    let meta = std::fs::read_to_string(out_b.join("mc_series.meta")).unwrap();
    assert!(meta.contains("beta = 0.9"), "meta: {}", meta);
}

#[test]
fn threshold_reports_both_values() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("thr");
    let out = wsn(&[
        "threshold",
        "--n",
        "60",
        "--gamma",
        "0.3",
        "--steps",
        "200",
        "--runs",
        "5",
        "--seeds",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(
        first_line(&out_dir.join("threshold.csv")),
        "lambda_max,gamma,u,v,beta_c_theory,beta_c_sim,detection_eps"
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("beta_c_theory"), "stdout: {}", stdout);
    assert!(stdout.contains("beta_c_sim"), "stdout: {}", stdout);
}

#[test]
fn jobs_flag_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("j");
    let out = wsn(&[
        "run-mc",
        "--n",
        "40",
        "--steps",
        "10",
        "--runs",
        "2",
        "--seeds",
        "2",
        "--jobs",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
}
