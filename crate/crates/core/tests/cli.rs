use std::process::{Command, Output};

fn qttt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qttt")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn help_lists_every_subcommand_and_flag() {
    let top = qttt(&["--help"]);
    assert_eq!(top.status.code(), Some(0));
    let text = stdout(&top);
    for sub in [
        "random-classical",
        "random-quantum",
        "opening-study",
        "endgames",
        "deterministic",
        "enumerate-classical",
        "solve",
        "serve",
        "--jobs",
    ] {
        assert!(text.contains(sub), "missing {sub}");
    }
    let flags: &[(&str, &[&str])] = &[
        ("random-classical", &["--games", "--seed", "--out", "--format"]),
        ("random-quantum", &["--games", "--seed", "--out", "--format", "--opening"]),
        ("opening-study", &["--games", "--seed", "--out", "--format"]),
        ("endgames", &["--games", "--seed", "--mode", "--bins", "--restarts", "--out", "--format"]),
        ("deterministic", &["--strategy", "--opening", "--all", "--games", "--seed", "--restarts", "--out", "--format"]),
        ("enumerate-classical", &["--out", "--format"]),
        ("solve", &["--in", "--seed", "--restarts", "--out"]),
        ("serve", &["--addr", "--store"]),
    ];
    for (sub, names) in flags {
        let o = qttt(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        for name in *names {
            assert!(text.contains(name), "{sub} help lacks {name}");
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["random-classical"][..],
        &["random-classical", "--seed", "x"],
        &["random-classical", "--seed", "1", "--games", "0"],
        &["random-quantum", "--seed", "1", "--opening", "diagonal"],
        &["deterministic", "--seed", "1"],
        &["deterministic", "--seed", "1", "--all", "--strategy", "wb"],
        &["endgames", "--seed", "1", "--bins", "0"],
        &["solve", "--in", "x.json", "--restarts", "0"],
        &["frobnicate"],
        &[],
    ] {
        assert_eq!(qttt(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_errors_exit_1() {
    let o = qttt(&["solve", "--in", "/nonexistent/cs.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"previous": [], "own": [1, 2], "line": "123"}"#).unwrap();
    assert_eq!(qttt(&["solve", "--in", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["random-quantum", "--games", "300", "--seed", "12", "--opening", "random"][..],
        &["opening-study", "--games", "200", "--seed", "3", "--format", "json"],
        &["endgames", "--games", "20", "--seed", "3"],
        &["deterministic", "--strategy", "wbwb", "--opening", "uniform", "--games", "5", "--seed", "4"],
    ] {
        let a = qttt(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        let b = qttt(&[&["--jobs", "1"][..], args].concat());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn table_output_formats() {
    let csv = stdout(&qttt(&["enumerate-classical"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,p1_pct,p2_pct");
    assert_eq!(lines.len(), 8);
    assert!(lines[6].starts_with("draw,"));
    assert!(lines[7].starts_with("premature,"));

    let study = stdout(&qttt(&["opening-study", "--games", "100", "--seed", "1"]));
    assert!(study.starts_with("opening,k,p1_pct,p2_pct\n"));
    assert_eq!(study.lines().count(), 1 + 3 * 7);

    let json: serde_json::Value =
        serde_json::from_str(&stdout(&qttt(&["random-classical", "--games", "100", "--seed", "1", "--format", "json"]))).unwrap();
    assert!(json.is_object());

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = qttt(&["endgames", "--games", "10", "--seed", "2", "--mode", "random", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("omega_lo,omega_hi,n,blocked,rate\n"));
}

#[test]
fn solve_reports_weight_and_local_max() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("cs.json");
    // one own move at site 1, one opposing move at site 5, line 159
    std::fs::write(
        &input,
        r#"{"previous": [[1,0,0,0,0,0,0,0,0],[0,0,0,0,1,0,0,0,0]], "own": [1,0,0,0,0,0,0,0,0], "line": "159"}"#,
    )
    .unwrap();
    let o = qttt(&["solve", "--in", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["weight"].as_f64().unwrap() - 2.0).abs() < 1e-9, "{v}");
    assert_eq!(v["is_local_max"], true);
    let x: Vec<f64> = v["x"].as_array().unwrap().iter().map(|a| a.as_f64().unwrap()).collect();
    assert!((x[8].abs() - 1.0).abs() < 1e-9);
}
