mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::bessel_k_reference;

fn gkz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn problem(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gkz-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_gamma_function() {
    let p = problem("gamma.json", r#"{"A": [[1]], "gamma": [[2, 0]], "u": [1]}"#);
    let o = gkz(&["eval", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["value"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["value"][1].as_f64().unwrap(), 0.0);
    assert!(v["err"].as_f64().unwrap() < 1e-10);
}

#[test]
fn eval_gkz_normalisation_and_overrides() {
    let p = problem(
        "gamma3.json",
        r#"{"A": [[1]], "gamma": [[2, 0]], "u": [3], "task": "eval"}"#,
    );
    let o = gkz(&[
        "eval",
        p.to_str().unwrap(),
        "--kind",
        "gkz",
        "--points-per-dim",
        "64",
        "--tol",
        "1e-13",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!((json(&o)["value"][0].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-12);
}

#[test]
fn lattice_of_difference_matrix() {
    let p = problem("diff.json", r#"{"A": [[1, -1, 0], [0, 1, -1]]}"#);
    let o = gkz(&["lattice", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[[1,1,1]]");
}

#[test]
fn verify_exponential_problem() {
    let p = problem(
        "exp.json",
        r#"{"A": [], "lattice": [[1]], "gamma": [[0.7, 0]], "u": [2]}"#,
    );
    let o = gkz(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let reports = json(&o);
    let reports = reports.as_array().unwrap();
    assert!(!reports.is_empty());
    for r in reports {
        assert!(r["rel"].as_f64().unwrap() <= 1e-6, "{r}");
    }
}

#[test]
fn verify_with_c_instead_of_gamma() {
    let p = problem(
        "beta.json",
        r#"{"A": [[1, 1]], "c": [[-3, 0]], "u": [1.5, 0.5]}"#,
    );
    let o = gkz(&["verify", p.to_str().unwrap(), "--step", "1e-3"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let names: Vec<String> = json(&o)
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["equation"].as_str().unwrap().to_string())
        .collect();
    for family in [
        "lattice_pde",
        "torus_pde",
        "dual_difference",
        "spectral_linear",
        "contiguity",
    ] {
        assert!(names.iter().any(|n| n == family), "{family} missing");
    }
}

#[test]
fn whittaker_max_grid_matches_bessel() {
    let o = gkz(&[
        "whittaker",
        "--type",
        "max",
        "--rank",
        "1",
        "--lambda",
        "0.6,1.1",
        "--grid",
        "-1:1:3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value_re,value_im,err"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for (row, x) in rows.iter().zip([-1.0, 0.0, 1.0]) {
        assert_eq!(row[0], x);
        let expected =
            2.0 * (x * 1.7 / 2.0).exp() * bessel_k_reference(-0.5, 2.0 * (x / 2.0).exp());
        assert!((row[1] - expected).abs() <= 1e-6 * expected);
    }
}

#[test]
fn whittaker_single_points() {
    let o = gkz(&[
        "whittaker",
        "--type",
        "max",
        "--rank",
        "1",
        "--lambda",
        "0.6,1.1",
        "--grid",
        "0.5:0.5:1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = gkz(&[
        "whittaker",
        "--type",
        "min",
        "--rank",
        "1",
        "--lambda",
        "0.6,1.1",
        "--x",
        "0.2,-0.1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&o)["value"][0].as_f64().unwrap() > 0.0);
}

#[test]
fn weyl_check_certificates() {
    let o = gkz(&["weyl-check", "--n", "2", "--lmax", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let records = json(&o);
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 25);
    assert!(records
        .iter()
        .all(|r| r["annihilated"] == true && r["N"] == 2));
    let o = gkz(&["weyl-check", "--n", "3", "--lmax", "1", "--symbolic"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o).as_array().unwrap().len(), 27);
}

#[test]
fn output_is_reproducible() {
    let p = problem(
        "repro.json",
        r#"{"A": [[1, -1]], "gamma": [[0.6, 0.1], [1.1, -0.2]], "u": [1.3, 0.7]}"#,
    );
    let a = gkz(&["eval", p.to_str().unwrap()]);
    let b = gkz(&["eval", p.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn validation_errors_exit_2_with_empty_stdout() {
    let cases: Vec<Vec<String>> = vec![
        vec![
            "eval".into(),
            problem("bad.json", "{\"A\": [[1]],\n \"u\": [1,]}")
                .display()
                .to_string(),
        ],
        vec![
            "eval".into(),
            problem(
                "unknown.json",
                r#"{"A": [[1]], "gamma": [[1, 0]], "u": [1], "extra": 1}"#,
            )
            .display()
            .to_string(),
        ],
        vec![
            "eval".into(),
            problem(
                "both.json",
                r#"{"A": [[1]], "gamma": [[1, 0]], "c": [[1, 0]], "u": [1]}"#,
            )
            .display()
            .to_string(),
        ],
        vec![
            "lattice".into(),
            problem("notgen.json", r#"{"A": [[2, 4]]}"#)
                .display()
                .to_string(),
        ],
        vec![
            "lattice".into(),
            problem("task.json", r#"{"A": [[1]], "task": "eval"}"#)
                .display()
                .to_string(),
        ],
        vec!["eval".into(), "/nonexistent/problem.json".into()],
        vec![
            "whittaker".into(),
            "--type".into(),
            "max".into(),
            "--rank".into(),
            "1".into(),
            "--lambda".into(),
            "1,2".into(),
            "--grid".into(),
            "0:0:3".into(),
        ],
        vec![
            "whittaker".into(),
            "--type".into(),
            "max".into(),
            "--rank".into(),
            "1".into(),
            "--lambda".into(),
            "1,2".into(),
            "--grid".into(),
            "0:1:0".into(),
        ],
        vec!["frobnicate".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = gkz(&refs);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    let o = gkz(&[
        "eval",
        problem("line.json", "{\"A\": [[1]],\n \"u\": [1,]}")
            .to_str()
            .unwrap(),
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn domain_errors_exit_3() {
    let p = problem(
        "chamber.json",
        r#"{"A": [[1]], "gamma": [[-0.5, 0]], "u": [1]}"#,
    );
    let o = gkz(&["eval", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    let p = problem(
        "box.json",
        r#"{"A": [[1]], "gamma": [[0.05, 0]], "u": [1], "quadrature": {"max_halfwidth": 2}}"#,
    );
    let o = gkz(&["eval", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
