use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn qdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdiv")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, value.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn c(re: f64) -> Value {
    json!([re, 0.0])
}

fn master(d: [[f64; 3]; 3]) -> Value {
    json!({
        "form": "master",
        "h": [[c(0.0), c(0.0)], [c(0.0), c(0.0)]],
        "d": d.map(|row| row.map(c)),
    })
}

fn real_matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array().unwrap().iter().map(|row| row.as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect()).collect()
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let identity = write(&dir, "id.json", &master([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    let out = qdiv(&["check", s(&identity)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "cp");
    assert_eq!(v["cp_witness"], Value::Null);

    let x = write(&dir, "x.json", &master([[-0.5, 0.0, 0.0], [0.0, 2.0, 1.0], [0.0, 1.0, 2.0]]));
    let out = qdiv(&["check", s(&x)]);
    assert_eq!(code(&out), 10);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((v["cp"].as_bool(), v["p"].as_bool()), (Some(false), Some(true)));
    assert_eq!(v["cp_witness"]["indices"], json!([0]));

    let pauli = write(&dir, "p.json", &json!({"form": "pauli", "gamma": [1, 1, 3], "tau": [0, 0, 0]}));
    assert_eq!(code(&qdiv(&["check", s(&pauli)])), 10);

    let neither = write(&dir, "n.json", &master([[-2.0, 0.0, 0.0], [0.0, 0.5, 1.0], [0.0, 1.0, 0.5]]));
    let out = qdiv(&["check", s(&neither)]);
    assert_eq!(code(&out), 20);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["p_witness"]["two_p"].as_f64().unwrap() < 0.0);
}

#[test]
fn check_csv_and_determinism() {
    let dir = TempDir::new().unwrap();
    let pauli = write(&dir, "p.json", &json!({"form": "pauli", "gamma": [1, 1, 3], "tau": [0, 0, 0]}));
    let a = qdiv(&["check", s(&pauli), "--format", "csv"]);
    let b = qdiv(&["check", s(&pauli), "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("verdict,cp,p,min_eigenvalue,min_p,cp_marginal,p_marginal"));
    assert_eq!(lines.next(), Some("p-not-cp,0,1,-0.5,1,0,0"));
}

#[test]
fn malformed_input_names_the_field() {
    let dir = TempDir::new().unwrap();
    let missing = write(&dir, "m.json", &json!({"form": "pauli", "gamma": [1, 1, 1]}));
    let out = qdiv(&["check", s(&missing)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("tau"), "{}", stderr(&out));

    let bad_shape = write(&dir, "b.json", &json!({"form": "master", "h": [[c(0.0)]], "d": [[c(0.0)]]}));
    assert_eq!(code(&qdiv(&["check", s(&bad_shape)])), 2);

    assert_eq!(code(&qdiv(&["check", s(&dir.path().join("absent.json"))])), 2);
}

#[test]
fn convert_pauli_to_master() {
    let dir = TempDir::new().unwrap();
    let pauli = write(&dir, "p.json", &json!({"form": "pauli", "gamma": [1, 1, 1], "tau": [0, 0, 0]}));
    let out = qdiv(&["convert", s(&pauli), "--to", "master"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let d = real_matrix(&v["d"]);
    for (i, row) in d.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert!((x - if i == j { 0.5 } else { 0.0 }).abs() < 1e-15);
        }
    }
}

#[test]
fn convert_zero_generator() {
    let dir = TempDir::new().unwrap();
    let zero = write(&dir, "z.json", &master([[0.0; 3]; 3]));
    for target in ["choi", "master", "bloch", "pauli"] {
        let out = qdiv(&["convert", s(&zero), "--to", target]);
        assert_eq!(code(&out), 0, "{target}: {}", stderr(&out));
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        let mut numbers = Vec::new();
        collect_numbers(&v, &mut numbers);
        assert!(!numbers.is_empty());
        assert!(numbers.iter().all(|x| x.abs() < 1e-15), "{target}: {v}");
    }
}

fn collect_numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.push(n.as_f64().unwrap()),
        Value::Array(a) => a.iter().for_each(|x| collect_numbers(x, out)),
        Value::Object(o) => o.values().for_each(|x| collect_numbers(x, out)),
        _ => {}
    }
}

#[test]
fn convert_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let choi = json!({
        "form": "choi", "q1": 0.31, "q2": -0.72,
        "y1": [0.1, -0.4], "y2": [0.25, 0.6], "x": [-0.33, 0.17], "z1": [0.9, -0.05], "z2": [-0.12, 0.44],
    });
    let input = write(&dir, "c.json", &choi);
    let m = dir.path().join("m.json");
    let b = dir.path().join("b.json");
    let back = dir.path().join("back.json");
    assert_eq!(code(&qdiv(&["convert", s(&input), "--to", "master", "-o", s(&m)])), 0);
    assert_eq!(code(&qdiv(&["convert", s(&m), "--to", "bloch", "-o", s(&b)])), 0);
    assert_eq!(code(&qdiv(&["convert", s(&b), "--to", "choi", "-o", s(&back)])), 0);
    let got: Value = serde_json::from_str(&fs::read_to_string(&back).unwrap()).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    collect_numbers(&choi, &mut x);
    collect_numbers(&got, &mut y);
    assert_eq!(x.len(), y.len());
    for (a, b) in x.iter().zip(&y) {
        assert!((a - b).abs() < 1e-12, "{choi} vs {got}");
    }
}

#[test]
fn convert_non_pauli_fails_with_3() {
    let dir = TempDir::new().unwrap();
    let coupled = write(&dir, "c.json", &master([[1.0, 0.3, 0.0], [0.3, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    let out = qdiv(&["convert", s(&coupled), "--to", "pauli"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("Pauli"));

    // Real D23 only: inside the class.
    let x = write(&dir, "x.json", &master([[1.0, 0.0, 0.0], [0.0, 2.0, 1.0], [0.0, 1.0, 2.0]]));
    assert_eq!(code(&qdiv(&["convert", s(&x), "--to", "pauli"])), 0);
    let bad_rates = qdiv(&["preset", "pauli-decay", "--rates", "0.1,0.2"]);
    assert_eq!(code(&bad_rates), 2);
}

fn scan_lines(args: &[&str]) -> Vec<Vec<String>> {
    let out = qdiv(args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    stdout(&out).lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn x_scan_at_zero_d11_has_matching_regions() {
    let n = 60;
    let axis1 = format!("d22=0:3:{n}");
    let axis2 = format!("d33=0:3:{n}");
    let args = ["scan", "--class", "x", "--fixed", "d11=0", "--fixed", "d23=1", "--axis", &axis1, "--axis", &axis2];
    let lines = scan_lines(&args);
    assert_eq!(lines[0], ["d22", "d33", "cp", "p", "margin_cp", "margin_p"]);
    let rows = &lines[1..];
    assert_eq!(rows.len(), n * n);
    let cp: Vec<bool> = rows.iter().map(|r| r[2] == "1").collect();
    let p: Vec<bool> = rows.iter().map(|r| r[3] == "1").collect();
    for k in 0..n * n {
        if cp[k] != p[k] {
            let (i, j) = (k / n, k % n);
            let near = (i.saturating_sub(2)..=(i + 2).min(n - 1))
                .any(|a| (j.saturating_sub(2)..=(j + 2).min(n - 1)).any(|b| cp[a * n + b] != cp[k]));
            assert!(near, "cell {i},{j} differs away from the boundary");
        }
    }
    assert!(cp.iter().any(|&x| x) && cp.iter().any(|&x| !x));
}

#[test]
fn scan_is_independent_of_thread_count() {
    let args = |threads: &'static str| {
        vec!["scan", "--class", "o", "--fixed", "d13=1", "--axis", "d22=-1:3:30", "--axis", "d11=-3:3:30", "--threads", threads]
    };
    let one = qdiv(&args("1"));
    let two = qdiv(&args("3"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn o_scan_p_region_contains_cp_region() {
    let lines = scan_lines(&["scan", "--class", "o", "--fixed", "d13=0", "--axis", "d22=-1:3:41", "--axis", "d11=-3:3:41"]);
    let rows = &lines[1..];
    let cp = rows.iter().filter(|r| r[2] == "1").count();
    let p = rows.iter().filter(|r| r[3] == "1").count();
    assert!(rows.iter().all(|r| r[2] == "0" || r[3] == "1"));
    assert!(cp > 0 && p > cp);
    for r in rows {
        let (d22, d11): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert_eq!(r[2] == "1", d22 >= 0.0 && d11 >= 0.0);
    }
}

#[test]
fn scan_spec_file_and_output() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("fig3.csv");
    let spec = json!({
        "class": "pauli-tau",
        "fixed": {"g1": 0.255, "g2": 0.255, "g3": 0.49, "t2": 0.0},
        "axes": [{"name": "t1", "min": -0.3, "max": 0.3, "steps": 11}, {"name": "t3", "min": -0.55, "max": 0.55, "steps": 11}],
        "output": s(&csv_path),
    });
    let spec_path = write(&dir, "spec.json", &spec);
    let out = qdiv(&["scan", "--spec", s(&spec_path)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 122);
    assert!(text.starts_with("t1,t3,cp,p,margin_cp,margin_p\n"));
    // Centre cell, τ = 0, is CP.
    assert!(text.lines().nth(61).unwrap().starts_with("0,0,1,1,"), "{}", text.lines().nth(61).unwrap());
}

#[test]
fn invalid_scan_specs_exit_2() {
    let out = qdiv(&["scan", "--class", "x", "--fixed", "d11=0", "--axis", "d22=0:3:10", "--axis", "d33=0:3:10"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("d23"));
    let out = qdiv(&["scan", "--class", "x", "--fixed", "d11=0", "--fixed", "d23=1", "--axis", "d22=0:3:1", "--axis", "d33=0:3:10"]);
    assert_eq!(code(&out), 2);
    let out = qdiv(&["scan", "--class", "pauli-tau", "--fixed", "g2=1", "--fixed", "g3=1", "--fixed", "t1=0", "--fixed", "t2=0",
        "--axis", "g1=0:1:5", "--axis", "t3=0:1:5"]);
    assert_eq!(code(&out), 2);
    let out = qdiv(&["scan", "--class", "w", "--axis", "a=0:1:5", "--axis", "b=0:1:5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn sweep_presets() {
    let dir = TempDir::new().unwrap();
    let generator = write(&dir, "g.json", &master([[1.0, 0.0, 0.2], [0.0, 0.5, 0.0], [0.2, 0.0, 0.7]]));
    let trace = dir.path().join("semigroup.json");
    assert_eq!(code(&qdiv(&["preset", "semigroup", s(&generator), "--t-end", "1", "--steps", "20", "-o", s(&trace)])), 0);
    let out = qdiv(&["sweep", s(&trace)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["summary"], "cp-divisible");
    assert_eq!(v["samples"].as_array().unwrap().len(), 21);

    let ramp = dir.path().join("ramp.json");
    assert_eq!(code(&qdiv(&["preset", "x-ramp", "--t-end", "4", "--steps", "80", "-o", s(&ramp)])), 0);
    let margins = dir.path().join("margins.csv");
    let out = qdiv(&["sweep", s(&ramp), "--margins", s(&margins)]);
    assert_eq!(code(&out), 20);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let crossings = v["crossings"].as_array().unwrap();
    let time = |property: &str| {
        crossings.iter().find(|c| c["property"] == property).and_then(|c| c["time"].as_f64()).unwrap()
    };
    assert!((time("cp") - 1.0).abs() <= 0.1);
    assert!((time("p") - 3.0).abs() <= 0.1);
    let text = fs::read_to_string(&margins).unwrap();
    assert_eq!(text.lines().next(), Some("t,min_eig_d,min_p,verdict"));
    assert_eq!(text.lines().count(), 82);
    assert!(text.lines().last().unwrap().ends_with(",not-p"));

    let csv = qdiv(&["sweep", s(&ramp), "--format", "csv"]);
    assert_eq!(csv.stdout, fs::read(&margins).unwrap());

    let decay = dir.path().join("decay.json");
    assert_eq!(code(&qdiv(&["preset", "pauli-decay", "--rates", "0.2,0.3,0.4", "-o", s(&decay)])), 0);
    assert_eq!(code(&qdiv(&["sweep", s(&decay)])), 0);
}

#[test]
fn sweep_error_paths() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("t.json");
    assert_eq!(code(&qdiv(&["preset", "pauli-decay", "--steps", "10", "-o", s(&trace)])), 0);
    let text = fs::read_to_string(&trace).unwrap();
    let truncated = dir.path().join("cut.json");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&qdiv(&["sweep", s(&truncated)])), 2);

    // Identity, identity, then the completely depolarizing map.
    let id = json!([[c(1.0), c(0.0), c(0.0), c(0.0)], [c(0.0), c(1.0), c(0.0), c(0.0)], [c(0.0), c(0.0), c(1.0), c(0.0)], [c(0.0), c(0.0), c(0.0), c(1.0)]]);
    let dep = json!([[c(0.5), c(0.0), c(0.0), c(0.5)], [c(0.0), c(0.0), c(0.0), c(0.0)], [c(0.0), c(0.0), c(0.0), c(0.0)], [c(0.5), c(0.0), c(0.0), c(0.5)]]);
    let singular = write(&dir, "s.json", &json!({"format": "trace-v1", "dim": 2, "times": [0.0, 0.1, 0.2], "maps": [id, id, dep]}));
    let out = qdiv(&["sweep", s(&singular)]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("t = 0.2"), "{}", stderr(&out));
}

#[test]
fn help_documents_exit_codes() {
    let out = qdiv(&["--help"]);
    let text = stdout(&out);
    for needle in ["Exit codes", "10", "20", "not in the Pauli class", "singular"] {
        assert!(text.contains(needle), "{needle}");
    }
    assert_eq!(code(&qdiv(&["check"])), 2);
}
