use std::process::{Command, Output};

use serde_json::Value;

fn smlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const PARABOLA: &str = r#"{
  "name": "parabola",
  "input": "metric",
  "metric": {"E": "1", "F": "0", "G": "(v - u^2)^2", "lambda": "v - u^2"},
  "domain": {"u": [-0.5, 0.5], "v": [-0.5, 0.5]}
}"#;

fn write_config(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

#[test]
fn standard_cross_cap_gallery_reports_alpha02() {
    let o = smlab(&["gallery", "cross-cap-standard"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert!((v["alpha02"].as_f64().unwrap() - 2.0).abs() <= 1e-9);
}

#[test]
fn swallowtail_gallery_has_one_a3_point_at_origin() {
    let o = smlab(&["gallery", "swallowtail"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let c = &v["classification"];
    assert_eq!(c["a3_total"], 1);
    let p = c["curves"][0]["a3_points"][0]["point"].as_array().unwrap();
    let r = p[0].as_f64().unwrap().hypot(p[1].as_f64().unwrap());
    assert!(r <= 1e-9);
}

#[test]
fn missing_config_exits_with_two() {
    let o = smlab(&["classify", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config"));
}

#[test]
fn config_errors_name_the_field() {
    let f = write_config(r#"{"input": "metric", "metric": {"E": "1", "F": "0", "G": "v^"}, "domain": {"u": [0, 1], "v": [0, 1]}}"#);
    let o = smlab(&["classify", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("metric.G"));
}

#[test]
fn unknown_gallery_name_is_a_config_error() {
    assert_eq!(smlab(&["gallery", "klein-bottle"]).status.code(), Some(2));
}

#[test]
fn gauss_bonnet_on_an_open_domain_is_a_config_error() {
    let f = write_config(PARABOLA);
    let o = smlab(&["gauss-bonnet", "gb1", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn curve_exports_csv_by_default() {
    let f = write_config(PARABOLA);
    let o = smlab(&["curve", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("curve,t,u,v,tau,class"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let (u, v): (f64, f64) = (cols[2].parse().unwrap(), cols[3].parse().unwrap());
        assert!((v - u * u).abs() < 1e-9, "{line}");
        assert_eq!(cols[5], "A2");
    }
}

#[test]
fn invariants_and_out_file() {
    let f = write_config(PARABOLA);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inv.json");
    let o = smlab(&["invariants", f.path().to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let ks = v["profiles"][0]["kappa_s"].as_array().unwrap();
    assert!(!ks.is_empty());
}

#[test]
fn csv_is_rejected_for_json_only_commands() {
    let f = write_config(PARABOLA);
    let o = smlab(&["crosscap", f.path().to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gallery_output_is_identical_across_thread_counts() {
    let a = smlab(&["gallery", "normal-form", "--threads", "1"]);
    let b = smlab(&["gallery", "normal-form", "--threads", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn whitney_gauss_bonnet_on_the_bump_torus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gb.json");
    let cfg = dir.path().join("bump.json");
    let g = smlab(&["gallery", "bump-torus", "--out", out.to_str().unwrap()]);
    assert_eq!(g.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    std::fs::write(&cfg, doc["config"].to_string()).unwrap();
    let o = smlab(&["gauss-bonnet", "whitney", cfg.to_str().unwrap(), "--depth", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    assert!(v["residual"].as_f64().unwrap() <= 1e-3);
}
