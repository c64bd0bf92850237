use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_hodowave"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap()
        .code()
        .unwrap()
}

const SMALL: [&str; 4] = ["--set", "nq=32", "--set", "np=16"];

fn with_small<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&SMALL);
    v.extend_from_slice(extra);
    v
}

#[test]
fn config_errors_exit_2_with_error_json() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["bifurcate", "--set", "p0=0.5"], dir.path()), 2);
    let e: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("error.json")).unwrap()).unwrap();
    assert_eq!(e["exit_code"], 2);
    assert_eq!(e["key"], "p0");

    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["bifurcate", "--set", "no_such_key=1"], dir.path()), 2);
    let e = std::fs::read_to_string(dir.path().join("error.json")).unwrap();
    assert!(e.contains("no_such_key"), "{e}");
}

#[test]
fn solve_writes_csv_with_headers_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert_eq!(run(&with_small("solve", &[]), &a), 0);
    let csv = std::fs::read_to_string(a.join("solution_000.csv")).unwrap();
    assert!(csv.starts_with("q,p,h\n"));
    assert!(csv.ends_with('\n'));

    let b = dir.path().join("b");
    let echo = a.join("effective_config.json");
    assert_eq!(run(&["solve", "--config", echo.to_str().unwrap()], &b), 0);
    for name in ["branch.json", "solution_000.csv", "solution_001.csv", "frame_001.json"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn trace_and_plot_produce_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&with_small("trace", &[]), dir.path()), 0);
    for name in ["trajectory_00.csv", "streamline_00.csv", "drift.json", "trajectories.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert_eq!(run(&with_small("plot", &[]), dir.path()), 0);
    for name in ["figure1.svg", "figure2.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"), "{name}");
    }
    let fig1 = std::fs::read_to_string(dir.path().join("figure1.svg")).unwrap();
    assert!(fig1.contains(r#"class="streamline""#) && fig1.contains(r#"class="arrow""#));
}

#[test]
fn verify_exit_code_follows_overall_verdict() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&with_small("verify", &["--set", "gamma=[-0.1]"]), dir.path()), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["overall"], "pass");
}
