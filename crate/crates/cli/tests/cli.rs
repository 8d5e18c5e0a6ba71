use std::path::Path;
use std::process::{Command, Output};

fn homsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homsurf"))
        .args(args)
        .env("HOMSURF_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const EX31: &str = r#"{"kappa": -1.0, "a": 1.0, "b": 1.0}"#;
const EX32: &str = r#"{"delta": 1, "alpha0": 1.7707963267948966, "alphaPrime0": 1.0}"#;
const GRID: &str = r#"{"s0": 0.0, "t0": 0.0, "ds": 0.005, "dt": 0.005, "ns": 41, "nt": 41}"#;

#[test]
fn gen_writes_field_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let o = homsurf(&["gen", "--family", "ex31", "--params", EX31, "--grid", GRID, "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    for k in ["space", "grid", "lambda", "u", "H", "p", "A", "schema_version"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert_eq!(v["lambda"].as_array().unwrap().len(), 41 * 41);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        assert_eq!(code(&homsurf(&["gen", "--family", "ex32", "--params", EX32, "--grid", GRID, "--out", p(out)])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bad_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    let o = homsurf(&["gen", "--family", "ex31", "--params", r#"{"kappa": 0.5, "a": 1, "b": 1}"#, "--grid", GRID, "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa"));
    let o = homsurf(&["audit", "--kappa", "4", "--tau", "1"]);
    assert_eq!(code(&o), 2);
    let o = homsurf(&["check", "--data", p(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn check_passes_generated_data_and_fails_faulty_data() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    assert_eq!(code(&homsurf(&["gen", "--family", "ex31", "--params", EX31, "--grid", GRID, "--out", p(&f)])), 0);
    let report = dir.path().join("r.json");
    let o = homsurf(&["check", "--data", p(&f), "--report", p(&report), "--differentials"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert!(r["schema_version"].is_number());
    assert!(r["differentials"]["q_holomorphy"]["max"].is_number());
    assert!(r["extras"]["codazzi_q"]["pass"].as_bool().unwrap());

    let o = homsurf(&["check", "--data", p(&f), "--flip-orientation"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let h = v["H"][20 * 41 + 20].as_f64().unwrap();
    v["H"][20 * 41 + 20] = serde_json::json!(h + 1e-2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = homsurf(&["check", "--data", p(&bad), "--report", p(&report)]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["pass"], false);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn audit_prints_verdicts() {
    let o = homsurf(&["audit", "--kappa", "8", "--tau", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: CMCOnly"));
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("a.json");
    let o = homsurf(&["audit", "--kappa", "-1", "--tau", "0", "--report", p(&r)]);
    assert!(stdout(&o).contains("NonCMCExists"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&r).unwrap()).unwrap();
    assert_eq!(v["tag"], "NonCMCExists");
    assert_eq!(v["allowed_h_interval"][1], 0.5);
}

#[test]
fn pipeline_gen_check_reconstruct_export() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("ex31", EX31),
        ("ex32", EX32),
        ("cmc", r#"{"kappa": -1.0, "tau": -0.3, "c": 0.3}"#),
    ];
    for (family, params) in cases {
        let f = dir.path().join(format!("{family}.json"));
        assert_eq!(code(&homsurf(&["gen", "--family", family, "--params", params, "--grid", GRID, "--out", p(&f)])), 0);
        assert_eq!(code(&homsurf(&["check", "--data", p(&f)])), 0, "{family}");
        let mesh = dir.path().join(format!("{family}.mesh.json"));
        let report = dir.path().join(format!("{family}.verify.json"));
        let o = homsurf(&["reconstruct", "--data", p(&f), "--out", p(&mesh), "--verify", "--report", p(&report)]);
        assert_eq!(code(&o), 0, "{family}: {}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
        let obj = dir.path().join(format!("{family}.obj"));
        assert_eq!(code(&homsurf(&["export", "--input", p(&mesh), "--out", p(&obj)])), 0);
        let text = std::fs::read_to_string(&obj).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 21 * 21);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 20 * 20);
        let csv = dir.path().join(format!("{family}.csv"));
        assert_eq!(code(&homsurf(&["export", "--input", p(&mesh), "--out", p(&csv)])), 0);
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 21 * 21 + 1);
    }
}

#[test]
fn reconstruct_rejects_incompatible_step_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    assert_eq!(code(&homsurf(&["gen", "--family", "ex32", "--params", EX32, "--grid", GRID, "--out", p(&f)])), 0);
    let out = dir.path().join("m.obj");
    assert_eq!(code(&homsurf(&["reconstruct", "--data", p(&f), "--step", "0.0075", "--out", p(&out)])), 2);
    assert_eq!(code(&homsurf(&["reconstruct", "--data", p(&f), "--seed", "{\"angle\": \"x\"}", "--out", p(&out)])), 2);
    let o = homsurf(&[
        "reconstruct",
        "--data",
        p(&f),
        "--step",
        "0.02",
        "--seed",
        r#"{"point": [0.1, 0.0, 1.0], "angle": 0.3}"#,
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 11 * 11);
}

#[test]
fn export_field_component_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    assert_eq!(code(&homsurf(&["gen", "--family", "ex32", "--params", EX32, "--grid", GRID, "--out", p(&f)])), 0);
    let csv = dir.path().join("q.csv");
    assert_eq!(code(&homsurf(&["export", "--input", p(&f), "--out", p(&csv), "--component", "Q"])), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("s,t,re,im"));
    assert_eq!(text.lines().count(), 41 * 41 + 1);
    for line in text.lines().skip(1) {
        let re: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((re - 1.0).abs() < 1e-8);
    }
}

#[test]
fn help_lists_subcommands() {
    let o = homsurf(&["--help"]);
    let text = stdout(&o);
    for sub in ["gen", "check", "audit", "reconstruct", "export"] {
        assert!(text.contains(sub), "{sub}");
    }
}
