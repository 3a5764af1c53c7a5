use std::fs;
use std::process::{Command, Output};

use evifuse::io::{mass_from_json, stream_from_json};
use evifuse::MassFunction;
use tempfile::TempDir;

const M1: &str = r#"{"frame": ["a", "b", "c"], "masses": {"a": 0.3, "c": 0.2, "a|c": 0.2, "*": 0.3}}"#;
const M2: &str = r#"{"frame": ["a", "b", "c"], "masses": {"a": 0.3, "a|c": 0.4, "*": 0.3}}"#;

fn evifuse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evifuse")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: TempDir::new().unwrap() };
        ws.file("m1.json", M1);
        ws.file("m2.json", M2);
        ws
    }

    fn file(&self, name: &str, text: &str) -> String {
        let path = self.dir.path().join(name);
        fs::write(&path, text).unwrap();
        path.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }
}

fn mass_at(m: &MassFunction, label: &str) -> f64 {
    m.mass(m.frame().parse_subset(label).unwrap())
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn combine_reproduces_table_columns() {
    let ws = Workspace::new();
    let (m1, m2) = (ws.path("m1.json"), ws.path("m2.json"));
    let conj = mass_from_json(&stdout(&evifuse(&["combine", "--rule", "conjunctive", &m1, &m2]))).unwrap();
    for (label, want) in [("{}", 0.06), ("a", 0.45), ("c", 0.14), ("a|c", 0.26), ("*", 0.09)] {
        assert!((mass_at(&conj, label) - want).abs() < 1e-12, "{label}");
    }
    let mixed = mass_from_json(&stdout(&evifuse(&["combine", "--rule", "mixed", "--gamma", "0.3", &m1, &m2]))).unwrap();
    for (label, want) in [("{}", 0.093), ("a", 0.3225), ("c", 0.167), ("a|c", 0.2566), ("*", 0.1609)] {
        assert!((mass_at(&mixed, label) - want).abs() < 5e-5, "{label}");
    }
    let inline = stdout(&evifuse(&["combine", "--rule", "mixed(0.3)", &m1, &m2]));
    assert_eq!(mass_from_json(&inline).unwrap(), mixed);
    let mean = mass_from_json(&stdout(&evifuse(&["combine", "--rule", "mean", &m1, &m1]))).unwrap();
    assert!(mean.max_abs_diff(&mass_from_json(M1).unwrap()) < 1e-15);
}

#[test]
fn usage_errors_exit_with_one() {
    let ws = Workspace::new();
    let (m1, m2) = (ws.path("m1.json"), ws.path("m2.json"));
    assert_eq!(code(&evifuse(&["combine", "--rule", "mixed", &m1, &m2])), 1);
    assert_eq!(code(&evifuse(&["combine", "--rule", "conjunctive", "--gamma", "0.5", &m1, &m2])), 1);
    assert_eq!(code(&evifuse(&["combine", "--rule", "bold", &m1, &m2])), 1);
    assert_eq!(code(&evifuse(&["combine", "--rule", "conjunctive", &m1])), 1);
    assert_eq!(code(&evifuse(&["combine", "--rule", "conjunctive", &m1, &ws.path("missing.json")])), 1);
    assert_eq!(code(&evifuse(&["generate", "--mode", "dependent"])), 1);
    assert_eq!(code(&evifuse(&["frobnicate"])), 1);
    assert_eq!(code(&evifuse(&[])), 1);
    assert_eq!(code(&evifuse(&["--help"])), 0);
    assert_eq!(code(&evifuse(&["--version"])), 0);
}

#[test]
fn domain_errors_exit_with_two() {
    let ws = Workspace::new();
    let a = ws.file("a.json", r#"{"frame": ["a", "b"], "masses": {"a": 1}}"#);
    let b = ws.file("b.json", r#"{"frame": ["a", "b"], "masses": {"b": 1}}"#);
    let bad = ws.file("bad.json", r#"{"frame": ["a", "b"], "masses": {"a": 0.7}}"#);
    let out = evifuse(&["combine", "--rule", "dempster", &a, &b]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("conflict"));
    assert_eq!(code(&evifuse(&["combine", "--rule", "cautious", &a, &a])), 2);
    assert_eq!(code(&evifuse(&["combine", "--rule", "conjunctive", &a, &ws.path("m1.json")])), 2);
    assert_eq!(code(&evifuse(&["combine", "--rule", "mixed", "--gamma", "1.5", &a, &a])), 2);
    assert_eq!(code(&evifuse(&["decompose", &a])), 2);
    assert_eq!(code(&evifuse(&["combine", "--rule", "mean", &bad, &bad])), 2);
}

#[test]
fn dogmatic_inputs_can_be_discounted() {
    let ws = Workspace::new();
    let a = ws.file("a.json", r#"{"frame": ["a", "b"], "masses": {"a": 1}}"#);
    let out = mass_from_json(&stdout(&evifuse(&["combine", "--rule", "cautious", "--discount-dogmatic", &a, &a]))).unwrap();
    assert!((mass_at(&out, "a") - (1.0 - 1e-6)).abs() < 1e-12);
    let out = mass_from_json(&stdout(&evifuse(&["combine", "--rule", "cautious", "--discount-dogmatic=0.1", &a, &a]))).unwrap();
    assert!((mass_at(&out, "*") - 0.1).abs() < 1e-12);
}

#[test]
fn decompose_prints_weights() {
    let ws = Workspace::new();
    let out: serde_json::Value = serde_json::from_str(&stdout(&evifuse(&["decompose", &ws.path("m1.json")]))).unwrap();
    assert_eq!(out["frame"], serde_json::json!(["a", "b", "c"]));
    let w = &out["weights"];
    assert!((w["a"].as_f64().unwrap() - 0.625).abs() < 1e-12);
    assert!(w.get("a|b|c").is_none());
}

fn generate(ws: &Workspace, name: &str, args: &[&str]) -> String {
    let text = stdout(&evifuse(&[&["generate"], args].concat()));
    ws.file(name, &text)
}

#[test]
fn generate_is_deterministic() {
    let ws = Workspace::new();
    let args = ["--mode", "independent", "--omega", "4", "--n", "20", "--seed", "3"];
    let a = stdout(&evifuse(&[&["generate"], &args[..]].concat()));
    let b = stdout(&evifuse(&[&["generate"], &args[..]].concat()));
    assert_eq!(a, b);
    assert_eq!(stream_from_json(&a).unwrap().len(), 20);

    let decisions = ws.path("d.json");
    generate(&ws, "s1.json", &["--mode", "consistent", "--omega", "4", "--n", "15", "--seed", "1", "--decisions-out", &decisions]);
    let dependent = generate(&ws, "s2.json", &["--mode", "dependent", "--omega", "4", "--decisions", &decisions, "--seed", "2"]);
    let stream = stream_from_json(&fs::read_to_string(dependent).unwrap()).unwrap();
    let labels: Vec<String> = serde_json::from_str(&fs::read_to_string(&decisions).unwrap()).unwrap();
    assert_eq!(stream.len(), 15);
    for (m, d) in stream.iter().zip(&labels) {
        let d = m.frame().parse_subset(d).unwrap();
        assert!(m.focal_elements().all(|(s, _)| d.is_subset_of(s)));
    }
}

#[test]
fn cluster_writes_csv() {
    let ws = Workspace::new();
    let s = generate(&ws, "s.json", &["--mode", "independent", "--omega", "3", "--n", "12", "--seed", "5"]);
    let out = stdout(&evifuse(&["cluster", &s, "--k", "3", "--seed", "1"]));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["object", "cluster"]);
    assert_eq!(rows.len(), 13);
    assert_eq!(out, stdout(&evifuse(&["cluster", &s, "--k", "3", "--seed", "1"])));
    assert_eq!(code(&evifuse(&["cluster", &s, "--k", "13"])), 2);
}

#[test]
fn independence_reports() {
    let ws = Workspace::new();
    let streams: Vec<String> = (0..3)
        .map(|i| generate(&ws, &format!("s{i}.json"), &["--mode", "independent", "--omega", "4", "--n", "40", "--seed", &i.to_string()]))
        .collect();
    let same: serde_json::Value =
        serde_json::from_str(&stdout(&evifuse(&["independence", &streams[0], &streams[0], "--seed", "7"]))).unwrap();
    assert_eq!(same["decision"], "dependent");
    assert_eq!(same["pairs"][0]["decision"], "dependent");

    let three: serde_json::Value =
        serde_json::from_str(&stdout(&evifuse(&["independence", &streams[0], &streams[1], &streams[2]]))).unwrap();
    let pairs = three["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    let mut best: f64 = 0.0;
    for p in pairs {
        let forward = p["id_forward"].as_f64().unwrap();
        let backward = p["id_backward"].as_f64().unwrap();
        assert_eq!(p["independence"].as_f64().unwrap(), forward.min(backward));
        best = best.max(forward.min(backward));
    }
    assert_eq!(three["gamma"].as_f64().unwrap(), best);

    let short = generate(&ws, "short.json", &["--mode", "independent", "--omega", "4", "--n", "30"]);
    assert_eq!(code(&evifuse(&["independence", &streams[0], &short])), 2);
}

#[test]
fn distance_curve_columns() {
    let ws = Workspace::new();
    let out = stdout(&evifuse(&["distance-curve", &ws.path("m1.json"), &ws.path("m2.json")]));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["gamma", "conjunctive", "dempster", "yager", "disjunctive", "cautious", "mean"]);
    assert_eq!(rows.len(), 12);
    let value = |r: usize, c: usize| rows[r][c].parse::<f64>().unwrap();
    assert_eq!(value(11, 1), 0.0);
    assert_eq!(value(1, 5), 0.0);
    let full = value(1, 1);
    for r in 1..=11 {
        let gamma = value(r, 0);
        assert!((value(r, 1) - (1.0 - gamma) * full).abs() < 1e-5);
    }
}

#[test]
fn experiment_is_byte_stable_and_consistent() {
    let ws = Workspace::new();
    let per_trial = ws.path("trials.csv");
    let args = ["experiment", "--mode", "dependent", "--n", "30", "--trials", "6", "--seed", "11", "--per-trial", &per_trial];
    let summary = stdout(&evifuse(&args));
    let trials = fs::read_to_string(&per_trial).unwrap();
    assert_eq!(summary, stdout(&evifuse(&args)));
    assert_eq!(trials, fs::read_to_string(&per_trial).unwrap());

    let one = ["experiment", "--mode", "independent", "--trials", "1", "--n", "20", "--seed", "4"];
    assert_eq!(stdout(&evifuse(&one)), stdout(&evifuse(&one)));

    // the summary row is the mean of the per-trial rows it was written with
    let rows = csv_rows(&trials);
    let gammas: Vec<f64> = rows[1..].iter().map(|r| r[8].parse().unwrap()).collect();
    let mean = gammas.iter().sum::<f64>() / gammas.len() as f64;
    let summary_rows = csv_rows(&summary);
    assert_eq!(summary_rows[0][9], "gamma");
    let reported: f64 = summary_rows[1][9].parse().unwrap();
    let std_err: f64 = summary_rows[1][10].parse().unwrap();
    assert!((reported - mean).abs() < 1e-5);
    assert!(gammas.iter().all(|g| (0.0..=1.0).contains(g)));
    assert!(std_err >= 0.0);
}

#[test]
fn tables() {
    let combination = stdout(&evifuse(&["table-combination"]));
    let rows = csv_rows(&combination);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[2], ["a", "0.3", "0.3", "0.267857", "0.45", "0.267857", "0.3225", "0.377143", "0.45"]);

    let mixed = stdout(&evifuse(&["table-mixed"]));
    assert!(mixed.lines().next().unwrap().starts_with('#'));
    assert!(mixed.contains("1-G"));
    let rows = csv_rows(&mixed);
    assert_eq!(rows[0], ["subset", "m1", "m2", "mixed_0.68", "published_0.68", "mixed_0.34", "published_0.34"]);
    let a = &rows[2];
    assert!((a[4].parse::<f64>().unwrap() - 0.3262).abs() < 1e-3);
    assert!((a[6].parse::<f64>().unwrap() - 0.3881).abs() < 1e-3);

    let small = ["--n", "20", "--trials", "2", "--seed", "1"];
    let two = stdout(&evifuse(&[&["table-two-sources"], &small[..]].concat()));
    let rows = csv_rows(&two);
    assert_eq!(rows.len(), 3);
    assert_eq!((rows[1][0].as_str(), rows[2][0].as_str()), ("independent", "dependent"));
    let three = stdout(&evifuse(&[&["table-three-sources"], &small[..]].concat()));
    assert_eq!(csv_rows(&three).len(), 7);
}
