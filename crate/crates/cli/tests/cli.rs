use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use levyfluct_cli::ValidationReport;

const BM: &str = r#"{"drift": 0, "sigma2": 2}"#;
const CL: &str = r#"{"drift": 2, "sigma2": 0, "jumps": {"intensity": 1, "mixture": [{"weight": 1, "rate": 1}]}}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn levyfluct(args: &[&str]) -> Output {
    levyfluct_env(args, &[])
}

fn levyfluct_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_levyfluct"));
    cmd.args(args).env_remove("LEVYFLUCT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn phi_inverse_prints_two() {
    let dir = tempfile::tempdir().unwrap();
    let bm = write(dir.path(), "bm.json", BM);
    let o = levyfluct(&["phi-inverse", "--config", bm.to_str().unwrap(), "--q", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2.0");
}

#[test]
fn upper_transform_at_barrier_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    let bm = write(dir.path(), "bm.json", BM);
    let args = [
        "transform",
        "upper",
        "--config",
        bm.to_str().unwrap(),
        "--q",
        "1",
        "--alpha",
        "1",
        "--x0",
        "1",
        "--b",
        "1",
    ];
    let o = levyfluct(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1.0");
}

#[test]
fn rate_uses_config_run_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bm.json",
        r#"{"drift": 0, "sigma2": 2, "run": {"q": 1, "b": 1}}"#,
    );
    let o = levyfluct(&["transform", "rate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 1.0 / 1.0f64.tanh()).abs() < 1e-12);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bm = write(dir.path(), "bm.json", BM);
    let typo = write(dir.path(), "typo.json", r#"{"drift": 0, "sigma": -1}"#);
    let weights = write(
        dir.path(),
        "w.json",
        r#"{"drift": 2, "sigma2": 0, "jumps": {"intensity": 1, "mixture": [{"weight": 0.9, "rate": 1}]}}"#,
    );
    let bm = bm.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["no-such-command"],
        vec!["phi-inverse", "--config", bm],
        vec!["phi-inverse", "--config", bm, "--q", "abc"],
        vec![
            "phi-inverse",
            "--config",
            "/nonexistent/cfg.json",
            "--q",
            "1",
        ],
        vec![
            "phi-inverse",
            "--config",
            typo.to_str().unwrap(),
            "--q",
            "1",
        ],
        vec![
            "phi-inverse",
            "--config",
            weights.to_str().unwrap(),
            "--q",
            "1",
        ],
        vec![
            "transform",
            "upper",
            "--config",
            bm,
            "--q",
            "1",
            "--alpha",
            "0.5",
            "--x0",
            "0.5",
            "--b",
            "1",
        ],
        vec![
            "simulate", "--config", bm, "--x0", "0.5", "--b", "1", "--stop", "upper",
        ],
        vec!["validate", "--config", bm, "--suite", "nope"],
    ];
    for args in cases {
        let o = levyfluct(&args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let o = levyfluct(&[
        "phi-inverse",
        "--config",
        typo.to_str().unwrap(),
        "--q",
        "1",
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigma"));
    let o = levyfluct(&[
        "phi-inverse",
        "--config",
        weights.to_str().unwrap(),
        "--q",
        "1",
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("jumps.mixture"));
}

#[test]
fn help_exits_zero() {
    assert_eq!(levyfluct(&["--help"]).status.code(), Some(0));
    assert_eq!(levyfluct(&["transform", "--help"]).status.code(), Some(0));
}

#[test]
fn bad_thread_variable_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bm = write(dir.path(), "bm.json", BM);
    let o = levyfluct_env(
        &["phi-inverse", "--config", bm.to_str().unwrap(), "--q", "1"],
        &[("LEVYFLUCT_THREADS", "0")],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cl = write(dir.path(), "cl.json", CL);
    let args = [
        "simulate",
        "--config",
        cl.to_str().unwrap(),
        "--x0",
        "1",
        "--b",
        "2",
        "--estimate",
        "lower",
        "--paths",
        "3000",
        "--q",
        "0.1",
        "--alpha",
        "1",
        "--theta",
        "0.3",
        "--seed",
        "9",
    ];
    let one = levyfluct_env(&args, &[("LEVYFLUCT_THREADS", "1")]);
    let three = levyfluct_env(&args, &[("LEVYFLUCT_THREADS", "3")]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&three));
}

#[test]
fn scale_table_shape() {
    let dir = tempfile::tempdir().unwrap();
    let bm = write(dir.path(), "bm.json", BM);
    let out = dir.path().join("scale.csv");
    let o = levyfluct(&[
        "scale",
        "--config",
        bm.to_str().unwrap(),
        "--q",
        "1",
        "--alpha",
        "2",
        "--x-max",
        "5",
        "--points",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,w_q,w_q_prime,z_q_alpha"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    for r in rows {
        assert!((r[1] - r[0].sinh()).abs() <= 1e-12 * r[0].sinh().max(1.0));
        assert!((r[3] - (r[0].exp() + r[0].sinh())).abs() <= 1e-10 * r[3]);
    }
}

#[test]
fn path_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cl = write(dir.path(), "cl.json", CL);
    let o = levyfluct(&[
        "simulate",
        "--config",
        cl.to_str().unwrap(),
        "--x0",
        "0.5",
        "--b",
        "1",
        "--stop",
        "u=3",
        "--seed",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("t,x,w,l,u"));
    let last: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(last[4], 3.0);
}

#[test]
fn default_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cl = write(dir.path(), "cl.json", CL);
    let out = dir.path().join("report.csv");
    let o = levyfluct(&[
        "validate",
        "--config",
        cl.to_str().unwrap(),
        "--suite",
        "default",
        "--paths",
        "100000",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = ValidationReport::read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(report.rows.len(), levyfluct_cli::suite::DEFAULT_SUITE.len());
    assert!(report.rows.iter().all(|r| r.pass && r.z.abs() <= 3.0));
}

#[test]
fn biased_simulation_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let bm = write(dir.path(), "bm.json", BM);
    let out = dir.path().join("report.csv");
    // a coarse grid misses most barrier contacts
    let o = levyfluct(&[
        "validate",
        "--config",
        bm.to_str().unwrap(),
        "--paths",
        "20000",
        "--seed",
        "1",
        "--dt",
        "0.05",
        "--x0",
        "0.5",
        "--b",
        "1",
        "--q",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let report = ValidationReport::read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    // no minimum-transform row under Euler simulation
    assert_eq!(
        report.rows.len(),
        levyfluct_cli::suite::DEFAULT_SUITE.len() - 1
    );
    assert!(report.rows.iter().any(|r| !r.pass));
}
