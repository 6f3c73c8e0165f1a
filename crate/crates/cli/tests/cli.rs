use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn blochlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blochlab")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn run(cmd: &str, config: &Value, dir: &Path, extra: &[&str]) -> Output {
    std::fs::create_dir_all(dir).unwrap();
    let cfg = dir.join(format!("{cmd}.json"));
    std::fs::write(&cfg, config.to_string()).unwrap();
    let out = dir.join("out");
    let mut args = vec![cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    blochlab(&args)
}

fn certificate(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/certificate.json")).unwrap()).unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let i = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn disk_config() -> Value {
    serde_json::json!({
        "domain": {"shape": {"kind": "disk", "center": [0.0, 0.0], "radius": 1.0}, "resolution": 0.01},
        "expected": 2.0,
        "jp_family": 4
    })
}

#[test]
fn diameter_of_unit_disk() {
    let t = tempfile::tempdir().unwrap();
    let o = run("diameter", &disk_config(), t.path(), &["--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d = csv_column(&t.path().join("out/diameter.csv"), "diameter")[0];
    assert!((d - 2.0).abs() <= 0.06, "{d}");
    let c = certificate(t.path());
    assert_eq!(c["passed"], true);
    assert_eq!(c["seed"], 5);
    assert!(t.path().join("out/jp.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let t = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({"series": {"K_max": 8}});
    let mut seen = Vec::new();
    for name in ["a", "b"] {
        let dir = t.path().join(name);
        let o = run("counterexample", &cfg, &dir, &[]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = run("diameter", &disk_config(), &dir.join("d"), &["--seed", "9"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let files: Vec<Vec<u8>> = [
            "out/variation.csv",
            "out/pairings.csv",
            "out/modes.csv",
            "out/change_of_variables.csv",
            "out/certificate.json",
            "d/out/jp.csv",
            "d/out/diameter.csv",
        ]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).unwrap())
        .collect();
        seen.push(files);
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn counterexample_k12_tables() {
    let t = tempfile::tempdir().unwrap();
    let o = run("counterexample", &serde_json::json!({"series": {"K_max": 12}}), t.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = t.path().join("out/variation.csv");
    let v = csv_column(&path, "V");
    assert_eq!(v.len(), 10);
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    let ratio = csv_column(&path, "max_pairing_ratio");
    assert!(ratio.iter().all(|&r| r <= 3.02));
}

#[test]
fn growth_target_is_a_check() {
    let t = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({"series": {"K_max": 8}});
    let o = run("counterexample", &cfg, t.path(), &["--tol", "growth_target=10"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let c = certificate(t.path());
    let failed: Vec<&str> =
        c["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(failed, ["v_growth"]);
}

#[test]
fn partition_below_floor_exits_2() {
    let t = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "beta": std::f64::consts::FRAC_PI_2,
        "grid": {"x_lo": 0.0, "x_hi": 10.0, "half_width": std::f64::consts::FRAC_PI_4, "resolution": 0.05},
        "b": 0.3
    });
    let o = run("partition", &cfg, t.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("b too small"), "{}", stderr(&o));
    assert_eq!(certificate(t.path())["passed"], false);
}

#[test]
fn partition_certifies_unit_b() {
    let t = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "beta": std::f64::consts::FRAC_PI_2,
        "grid": {"x_lo": 0.0, "x_hi": 10.0, "half_width": std::f64::consts::FRAC_PI_4, "resolution": 0.05},
        "b": 1.0
    });
    let o = run("partition", &cfg, t.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c = certificate(t.path());
    assert!(c["report"]["w_floor"].as_f64().unwrap() > 0.05);
    let axis = csv_column(&t.path().join("out/partition.csv"), "abs_w_axis");
    assert!(axis.iter().all(|&w| w >= (-0.25f64).exp()));
}

fn pipeline(b: f64, m: &[usize], instance: Value) -> Value {
    serde_json::json!({
        "alpha": std::f64::consts::FRAC_PI_3,
        "beta": std::f64::consts::FRAC_PI_2,
        "b": b,
        "m": m,
        "W": 6,
        "resolution": 0.1,
        "instance": instance
    })
}

#[test]
fn approx_constant_is_exact() {
    let t = tempfile::tempdir().unwrap();
    let o = run("approx", &pipeline(1.0, &[4], serde_json::json!({"name": "constant", "value": 0.7})), t.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let eps = csv_column(&t.path().join("out/scales.csv"), "epsilon");
    assert!(eps[0] <= 1e-10, "{eps:?}");
    assert!(t.path().join("out/profiles.csv").exists());
}

#[test]
fn approx_spiral_m16() {
    let t = tempfile::tempdir().unwrap();
    let mut cfg = pipeline(1.0, &[16], serde_json::json!({"name": "spiral", "c": 0.25}));
    cfg["resolution"] = Value::from(0.05);
    let o = run("approx", &cfg, t.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let eps = csv_column(&t.path().join("out/scales.csv"), "epsilon");
    assert!(eps[0] <= std::f64::consts::FRAC_PI_4, "{eps:?}");
    let c = certificate(t.path());
    // the CSV carries 15 significant digits
    let full = c["report"]["scales"][0]["epsilon"].as_f64().unwrap();
    assert!((full - eps[0]).abs() <= 1e-14 * full);
}

#[test]
fn approx_small_b_exits_2() {
    let t = tempfile::tempdir().unwrap();
    let o = run("approx", &pipeline(0.3, &[4], serde_json::json!({"name": "log"})), t.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("b too small"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_3() {
    let t = tempfile::tempdir().unwrap();
    let mut cfg = pipeline(1.0, &[4], serde_json::json!({"name": "log"}));
    cfg["extra"] = Value::from(1);
    assert_eq!(run("approx", &cfg, &t.path().join("a"), &[]).status.code(), Some(3));

    let cfg = pipeline(1.0, &[4], serde_json::json!({"name": "log"}));
    let o = run("approx", &cfg, &t.path().join("b"), &["--tol", "dbar_tol=-1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run("approx", &cfg, &t.path().join("c"), &["--tol", "epsilon=0.1"]);
    assert_eq!(o.status.code(), Some(3));

    let cfg = pipeline(1.0, &[1], serde_json::json!({"name": "log"}));
    assert_eq!(run("approx", &cfg, &t.path().join("d"), &[]).status.code(), Some(3));

    let cfg = serde_json::json!({"domain": {"shape": {"kind": "triangle"}, "resolution": 0.1}});
    assert_eq!(run("diameter", &cfg, &t.path().join("e"), &[]).status.code(), Some(3));

    let o = blochlab(&["diameter", "--config", "/nonexistent.json", "--out", t.path().join("f").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn witness_grows_past_the_prediction() {
    let t = tempfile::tempdir().unwrap();
    let stops: Vec<f64> = (1..=8).map(|j| 1.0 - (-(j as f64)).exp()).collect();
    let mut p = pipeline(1.0, &[4, 8], serde_json::json!({"name": "spiral", "c": 0.25}));
    p["resolution"] = Value::from(0.05);
    let cfg = serde_json::json!({"c": 0.25, "pipeline": p, "r_stops": stops});
    let o = run("witness", &cfg, t.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let path = t.path().join("out/witness.csv");
    let value = csv_column(&path, "value");
    let predicted = csv_column(&path, "predicted");
    assert_eq!(value.len(), 8);
    assert!(value.windows(2).all(|w| w[1] > w[0]));
    assert!(value.iter().zip(&predicted).all(|(v, p)| v > p));
}
