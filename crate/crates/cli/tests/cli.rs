use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hext(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hext")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn certificate(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout holds a JSON certificate")
}

fn checks_pass(cert: &Value) -> bool {
    cert["verification"]["all_pass"].as_bool().unwrap()
}

const TWO_POINT: &str =
    r#"{"space": {"type": "lp", "p": 2, "dim": 1}, "points": [[0], [1]], "values": [0, 2], "extend_at": [[0.5], [3]]}"#;

const CK: &str = r#"{
  "space": {"type": "lp", "p": 2, "dim": 1},
  "points": [[0], [1], [2]],
  "values": [[0, 0.5, 1], [1, 1, 0.5], [0, 0.2, 0.4]],
  "metric": {"points_1d": [0, 1, 3]},
  "extend_at": [[0.5], [4]]
}"#;

#[test]
fn check_echoes_two_for_the_two_point_problem() {
    let dir = TempDir::new().unwrap();
    write(&dir, "p.json", TWO_POINT);
    let out = hext(&["check", "p.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cert = certificate(&out);
    assert_eq!(cert["results"]["K"].as_f64(), Some(2.0));
    assert!(checks_pass(&cert));
}

#[test]
fn check_with_too_small_constant_exits_three() {
    let dir = TempDir::new().unwrap();
    write(&dir, "p.json", TWO_POINT);
    let out = hext(&["check", "p.json", "--K", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(!checks_pass(&certificate(&out)));
}

#[test]
fn malformed_json_exits_two_with_position() {
    let dir = TempDir::new().unwrap();
    write(&dir, "bad.json", "{\"points\": [[0], [1]],\n \"values\": [0, 2");
    let out = hext(&["extend", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_field_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    write(&dir, "p.json", r#"{"points": [[0]], "values": [1], "colour": 3}"#);
    assert_eq!(hext(&["check", "p.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    write(&dir, "p.json", TWO_POINT);
    let a = hext(&["extend", "p.json", "--policy", "lo"], dir.path());
    let b = hext(&["extend", "p.json", "--policy", "lo"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = hext(&["extend", "p.json", "--policy", "hi"], dir.path());
    assert_ne!(certificate(&a)["input_digest"], certificate(&c)["input_digest"]);
}

#[test]
fn extension_values_respect_their_intervals() {
    let dir = TempDir::new().unwrap();
    write(&dir, "p.json", TWO_POINT);
    let cert = certificate(&hext(&["extend", "p.json", "--at", "[3]", "--policy", "hi"], dir.path()));
    let e = &cert["results"]["extensions"][0];
    assert_eq!(e["interval"]["lo"].as_f64(), Some(-2.0));
    assert_eq!(e["interval"]["hi"].as_f64(), Some(6.0));
    assert_eq!(e["value"].as_f64(), Some(6.0));
}

#[test]
fn out_flag_writes_the_certificate() {
    let dir = TempDir::new().unwrap();
    write(&dir, "p.json", TWO_POINT);
    let out = hext(&["check", "p.json", "--out", "cert.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let cert: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cert.json")).unwrap()).unwrap();
    assert_eq!(cert["command"], "check");
}

#[test]
fn doubles_keep_seventeen_digits() {
    let dir = TempDir::new().unwrap();
    write(&dir, "p.json", r#"{"points": [[0], [3]], "values": [0, 1]}"#);
    let out = hext(&["check", "p.json"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3.3333333333333331e-1"), "{text}");
}

#[test]
fn counterexample_certifies_alternating_bounds() {
    let dir = TempDir::new().unwrap();
    let out = hext(&["counterexample", "--K", "11", "--n1", "1", "--N", "5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cert = certificate(&out);
    assert!(checks_pass(&cert));
    let intervals = cert["results"]["intervals"].as_array().unwrap();
    assert_eq!(intervals.len(), 5);
    for iv in intervals {
        let k = iv["k"].as_u64().unwrap();
        if k % 2 == 1 {
            assert!(iv["lo"].as_f64().unwrap() >= 0.125 - 1e-9);
        } else {
            assert!(iv["hi"].as_f64().unwrap() <= -0.125 + 1e-9);
        }
    }
    assert!(cert["results"]["lipschitz_constant"].as_f64().unwrap() <= 1.0 + 1e-9);
}

#[test]
fn counterexample_rejects_unsafe_sizes_and_exponents() {
    let dir = TempDir::new().unwrap();
    assert_eq!(hext(&["counterexample", "--N", "9"], dir.path()).status.code(), Some(2));
    assert_eq!(hext(&["counterexample", "--alpha", "0.5"], dir.path()).status.code(), Some(2));
}

#[test]
fn counterexample_below_the_selection_threshold_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = hext(&["counterexample", "--K", "10", "--N", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("selection"));
}

#[test]
fn sequence_targets() {
    let dir = TempDir::new().unwrap();
    write(
        &dir,
        "c0.json",
        r#"{"space": {"type": "lp", "p": 2, "dim": 2}, "points": [[-1, 0], [1, 1], [2, 0]],
            "values": [{"prefix": [1, -2], "tail": 0}, {"prefix": [0.5], "tail": 0}, {"prefix": [], "tail": 0}],
            "extend_at": [[0, 0], [5, 5]]}"#,
    );
    let c0 = certificate(&hext(&["extend", "c0.json", "--target", "c0"], dir.path()));
    assert!(checks_pass(&c0));
    for e in c0["results"]["extensions"].as_array().unwrap() {
        assert_eq!(e["algorithm"], "c0");
        assert_eq!(e["value"]["tail"].as_f64(), Some(0.0));
        assert!(e["trace"].is_object());
    }
    let c = certificate(&hext(&["extend", "c0.json", "--target", "c"], dir.path()));
    assert!(checks_pass(&c));
    assert_eq!(c["results"]["extensions"][0]["algorithm"], "c");

    write(
        &dir,
        "c.json",
        r#"{"space": {"type": "lp", "p": 2, "dim": 1}, "points": [[-1], [1]],
            "values": [{"prefix": [], "tail": 0}, {"prefix": [], "tail": 1}], "K": 1, "extend_at": [[0]]}"#,
    );
    let out = hext(&["extend", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(certificate(&out)["results"]["extensions"][0]["value"]["tail"].as_f64(), Some(0.0));
    assert_eq!(hext(&["extend", "c.json", "--target", "c0"], dir.path()).status.code(), Some(2));
}

#[test]
fn partition_and_cover() {
    let dir = TempDir::new().unwrap();
    write(
        &dir,
        "m.json",
        r#"{"space": {"type": "linf", "dim": 2}, "points": [[2, 1], [3, 1], [5, 2], [-1, 4]], "values": [0, 0, 0, 0]}"#,
    );
    let out = hext(&["partition", "m.json", "--eps", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cert = certificate(&out);
    assert!(checks_pass(&cert));
    let cells = cert["results"]["trace"]["cells"].as_array().unwrap().len();
    assert_eq!(cert["results"]["cells"].as_u64(), Some(cells as u64));

    let out = hext(&["partition", "m.json", "--space", "lp:2:2"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    for space in ["lp:2:2", "linf:3", "l2l2"] {
        let out = hext(&["cover", "--space", space, "--delta", "0.5"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{space}");
        assert!(checks_pass(&certificate(&out)));
    }
}

#[test]
fn ck_commands() {
    let dir = TempDir::new().unwrap();
    write(&dir, "ck.json", CK);
    let out = hext(&["ck-extend", "ck.json", "--modulus", "auto"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cert = certificate(&out);
    assert!(checks_pass(&cert));
    let table = &cert["results"]["extensions"][0]["modulus"];
    assert_eq!(table["phi_values"][0].as_f64(), Some(0.0));

    fs::write(dir.path().join("table.json"), serde_json::to_string(table).unwrap()).unwrap();
    let out = hext(&["ck-extend", "ck.json", "--modulus", "table.json", "--at", "[0.5]"], dir.path());
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(hext(&["ck-check", "ck.json", "--delta", "0.5"], dir.path()).status.code(), Some(0));
    assert_eq!(hext(&["extend", "ck.json"], dir.path()).status.code(), Some(0));
    assert_eq!(hext(&["extend", "ck.json", "--eps", "0.1"], dir.path()).status.code(), Some(0));

    write(&dir, "w.json", "[[0, 1], [1, 2]]");
    let out = hext(&["reduce", "ck.json", "--witnesses", "w.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let values = &certificate(&out)["results"]["values"];
    assert_eq!(values[0]["prefix"][1].as_f64(), Some(0.5));
    assert_eq!(values[0]["tail"].as_f64(), Some(1.0));
}
