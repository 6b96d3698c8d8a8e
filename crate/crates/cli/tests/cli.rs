use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gh_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gh-lab")).args(args).output().expect("binary runs")
}

fn gh_lab_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gh-lab"))
        .args(args)
        .env("GH_LAB_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn polygon_file(dir: &Path, m: usize) -> String {
    let mut text = format!("dim=1 count={m} symmetric=0\n");
    for i in 0..m {
        let t = 2.0 * PI * i as f64 / m as f64;
        text += &format!("{} {}\n", t.cos(), t.sin());
    }
    let path = dir.join(format!("polygon{m}.txt"));
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn help_lists_every_subcommand() {
    let out = gh_lab(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["table", "verify-theorem1", "covering", "vr-homology", "oracle-gh", "odd-map", "constants"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    let sub = String::from_utf8(gh_lab(&["table", "--help"]).stdout).unwrap();
    assert!(sub.contains("[default: 7]") && sub.contains("[default: markdown]"));
}

#[test]
fn markdown_table() {
    let out = gh_lab(&["table", "--max-n", "7", "--max-k", "7", "--format", "markdown"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("| 1 | 0 | 2π/3 | 2π/3 | [4π/5, π) | [4π/5, π) | [6π/7, π) | [6π/7, π) |"));
    assert!(text.contains("| 2 |  | 0 | r_2 | [r_2, π) | [c_{2,5}, π) | [c_{2,6}, π) | [c_{2,7}, π) |"));
    assert!(text.contains("[r_3, 2π/3]"));
}

#[test]
fn json_and_csv_tables() {
    let v = json(&gh_lab(&["table", "--format", "json", "--metric", "euclidean"]));
    let cell = v["cells"].as_array().unwrap().iter().find(|c| c["n"] == 1 && c["k"] == 2).unwrap();
    assert!((cell["lower"].as_f64().unwrap() - 1.0).abs() < 1e-11);
    let csv = String::from_utf8(gh_lab(&["table", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().count(), 29);
}

#[test]
fn theorem_check_reports_the_bound() {
    let v = json(&gh_lab(&["verify-theorem1", "--n", "2", "--samples", "100000", "--seed", "7"]));
    assert!(v["max_distortion"].as_f64().unwrap() <= 2.0943952);
    assert_eq!(v["within_bounds"], true);
}

#[test]
fn eleven_points_at_eight_elevenths_pi() {
    let dir = tempfile::tempdir().unwrap();
    let pts = polygon_file(dir.path(), 11);
    let r = (8.0 * PI / 11.0).to_string();
    let export = dir.path().join("complex.txt");
    let out = gh_lab(&["vr-homology", "--points", &pts, "--r", &r, "--max-dim", "4", "--export", export.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "{\"betti\":[1,0,0,1,0]}\n");
    let lines = fs::read_to_string(export).unwrap();
    assert!(lines.lines().next().unwrap() == "0");
}

#[test]
fn gh_oracle_on_files() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.txt");
    let y = dir.path().join("y.txt");
    fs::write(&x, "labels p\n0\n").unwrap();
    fs::write(&y, "labels a b\n0\n2 0\n").unwrap();
    let v = json(&gh_lab(&["oracle-gh", "--x", x.to_str().unwrap(), "--y", y.to_str().unwrap()]));
    assert_eq!(v["gh"].as_f64().unwrap(), 1.0);
}

#[test]
fn odd_map_report() {
    let v = json(&gh_lab(&[
        "odd-map",
        "--construction",
        "cone_vertex",
        "--n",
        "1",
        "--samples",
        "5000",
        "--eta",
        "0.1",
    ]));
    assert_eq!(v["oddness_violations"], 0);
    assert!(v["delta_hat"].as_f64().unwrap() <= v["dis_hat"].as_f64().unwrap());
    assert_eq!(v["k"], 2);
}

#[test]
fn covering_certificate() {
    let v = json(&gh_lab(&["covering", "--construction", "icosahedron", "--samples", "50000"]));
    assert_eq!(v["certificate"]["count"], 12);
    assert_eq!(v["projective"]["count"], 6);
    assert_eq!(v["validation"]["pass_rate"].as_f64().unwrap(), 1.0);
    let g = json(&gh_lab(&["covering", "--construction", "greedy", "--n", "2", "--k", "6", "--samples", "20000"]));
    assert_eq!(g["certificate"]["space"], "projective");
}

#[test]
fn constants_are_listed() {
    let v = json(&gh_lab(&["constants", "--max-n", "3"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["r_n"].as_f64().unwrap(), 2.09439510239);
    assert_eq!(rows[1]["t_n"].as_f64().unwrap(), 2.18627603547);
}

#[test]
fn exit_codes() {
    assert_eq!(gh_lab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(gh_lab(&["verify-theorem1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(gh_lab(&["table", "--max-n", "5", "--max-k", "3"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "dim=1 count=2 symmetric=0\n1 0\n").unwrap();
    assert_eq!(gh_lab(&["vr-homology", "--points", bad.to_str().unwrap(), "--r", "1"]).status.code(), Some(2));
    assert_eq!(gh_lab(&["vr-homology", "--points", "/no/such/file", "--r", "1"]).status.code(), Some(2));
    let pts = polygon_file(dir.path(), 11);
    let out = gh_lab(&["vr-homology", "--points", &pts, "--r", "3", "--max-dim", "9", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(gh_lab_threads(&["constants"], "many").status.code(), Some(2));
}

#[test]
fn output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = ["odd-map", "--construction", "vr_pipeline", "--n", "2", "--samples", "3000", "--seed", "5", "-o"];
    let mut first = args.to_vec();
    first.push(a.to_str().unwrap());
    let mut second = args.to_vec();
    second.push(b.to_str().unwrap());
    assert!(gh_lab_threads(&first, "1").status.success());
    assert!(gh_lab_threads(&second, "3").status.success());
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn numbers_have_twelve_significant_digits() {
    let out = gh_lab(&["verify-theorem1", "--n", "1", "--samples", "2000"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for tok in text.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-')) {
        if tok.contains('.') {
            let mantissa = tok.split('e').next().unwrap();
            let digits = mantissa.trim_start_matches('-').replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 12, "{tok}");
        }
    }
}
