use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinent"))
        .args(args)
        .env_remove("SPINENT_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Rows of sweep.csv as (header, rows of f64 by column name lookup).
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn analytic_sweep_reports_both_kinks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = [
        "sweep", "--family", "xx3", "--route", "analytic", "--min", "0", "--max", "3", "--steps", "601", "--out", out,
        "--format", "csv,json,svg",
    ];
    let o = spinent(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let kinks = read_json(&dir.path().join("kinks.json"));
    assert_eq!(kinks["schema_version"], 1);
    let list = kinks["kinks"].as_array().unwrap();
    assert_eq!(list.len(), 2);
    let loc = |i: usize| list[i]["location"].as_f64().unwrap();
    assert!((loc(0) - 1.000).abs() <= 0.005 + 1e-12);
    assert!((loc(1) - 1.537).abs() <= 0.005 + 1e-12);
    assert_eq!(list[0]["kind"], "interior");
    assert_eq!(list[1]["kind"], "clamp-boundary");

    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(header.join(","), "param,energy_per_site,xx_plus_yy,zz,c_tilde,concurrence,entropy,degenerate_flag");
    assert_eq!(rows.len(), 601);

    let svg = fs::read_to_string(dir.path().join("concurrence.svg")).unwrap();
    assert!(svg.contains("<polyline") && svg.matches("kink at").count() == 2);

    // identical configuration, identical bytes
    let again = tempfile::tempdir().unwrap();
    let mut args2 = args;
    args2[12] = again.path().to_str().unwrap();
    assert_eq!(code(&spinent(&args2)), 0);
    for f in ["sweep.csv", "kinks.json", "concurrence.svg"] {
        assert_eq!(fs::read(dir.path().join(f)).unwrap(), fs::read(again.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn csv_floats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = spinent(&["sweep", "--route", "analytic", "--min", "0", "--max", "2", "--steps", "21", "--out", out]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let second = text.lines().nth(2).unwrap();
    assert!(second.starts_with("1.0000000000000001e-1,"), "{second}");
    let c: f64 = second.split(',').nth(5).unwrap().parse().unwrap();
    assert_eq!(c, ((2.0 / std::f64::consts::PI + 1.0).powi(2) - 2.0) / 2.0);
}

#[test]
fn ed_sweep_entropy_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = spinent(&["sweep", "--family", "xx3", "--route", "ed", "--sites", "12", "--min", "0", "--max", "3", "--steps", "7", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    let s = column(&header, "entropy");
    assert!(rows.iter().all(|r| (r[s] - 1.0).abs() <= 1e-9));
}

#[test]
fn xxz_ferromagnetic_side_has_c_tilde_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = spinent(&["sweep", "--family", "xxz", "--sites", "12", "--min", "-1.5", "--max", "0", "--steps", "7", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    let (p, ct, deg) = (column(&header, "param"), column(&header, "c_tilde"), column(&header, "degenerate_flag"));
    for r in rows.iter().filter(|r| r[p] < -1.0) {
        assert!((r[ct] + 1.0).abs() < 1e-8, "{r:?}");
        assert_eq!(r[deg], 1.0);
    }
    assert!(rows.iter().filter(|r| r[p] > -1.0).all(|r| r[deg] == 0.0));
}

#[test]
fn both_routes_add_closed_form_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = spinent(&["sweep", "--route", "both", "--sites", "8", "--min", "0", "--max", "2", "--steps", "5", "--out", out]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    let (c, ca) = (column(&header, "concurrence"), column(&header, "analytic_concurrence"));
    assert!((rows[1][c] - rows[1][ca]).abs() < 0.05);
}

#[test]
fn worker_count_leaves_output_unchanged() {
    let run = |workers: Option<&str>, env: Option<&str>| {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap().to_string();
        let mut args = vec!["sweep", "--sites", "8", "--min", "0", "--max", "2", "--steps", "9", "--out", &out];
        if let Some(w) = workers {
            args.extend(["--workers", w]);
        }
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_spinent"));
        cmd.args(&args).env_remove("SPINENT_WORKERS");
        if let Some(e) = env {
            cmd.env("SPINENT_WORKERS", e);
        }
        let o = cmd.output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (fs::read(dir.path().join("sweep.csv")).unwrap(), fs::read(dir.path().join("kinks.json")).unwrap())
    };
    let a = run(Some("1"), None);
    assert_eq!(a, run(Some("3"), None));
    assert_eq!(a, run(None, Some("2")));
}

#[test]
fn partial_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // the closed form is undefined for λ < 0
    let o = spinent(&["sweep", "--route", "both", "--sites", "4", "--min", "-0.2", "--max", "0.2", "--steps", "5", "--out", out]);
    assert_eq!(code(&o), 2);
    let kinks = read_json(&dir.path().join("kinks.json"));
    assert_eq!(kinks["failed_points"].as_array().unwrap().len(), 2);
}

#[test]
fn config_errors_exit_one_and_name_the_field() {
    let cases: [(&[&str], &str); 5] = [
        (&["sweep", "--sites", "7", "--min", "0", "--max", "1"], "sites"),
        (&["sweep", "--sites", "8", "--min", "1", "--max", "0"], "max"),
        (&["sweep", "--sites", "8", "--min", "0", "--max", "1", "--steps", "2"], "steps"),
        (&["sweep", "--family", "xxz", "--route", "analytic", "--min", "0", "--max", "1"], "route"),
        (&["report", "--family", "xx3", "--sites", "8"], "param"),
    ];
    for (args, field) in cases {
        let o = spinent(args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(field), "{args:?}");
    }
    assert_eq!(code(&spinent(&["sweep", "--no-such-flag"])), 1);
    assert_eq!(code(&spinent(&["--help"])), 0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(r#"{{"family": "xx3", "route": "analytic", "min": 0.0, "max": 3.0, "steps": 11, "out": {:?}}}"#, out),
    )
    .unwrap();
    let o = spinent(&["--config", cfg.to_str().unwrap(), "sweep", "--steps", "31"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 31);

    fs::write(&cfg, r#"{"colour": "red"}"#).unwrap();
    assert_eq!(code(&spinent(&["--config", cfg.to_str().unwrap(), "sweep"])), 1);
}

#[test]
fn report_routes_agree() {
    let o = spinent(&["report", "--family", "xx3", "--param", "0.5", "--sites", "12"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let c = &doc["concurrence"];
    assert!((c["wootters"].as_f64().unwrap() - c["symmetric"].as_f64().unwrap()).abs() < 1e-10);
    assert_eq!(doc["rdm"]["full"].as_array().unwrap().len(), 4);
    assert!(doc["rdm"]["x_form"].is_object());
    assert!((doc["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn report_heisenberg_point_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinent(&["report", "--family", "xxz", "--param", "1", "--sites", "12", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc = read_json(&dir.path().join("report.json"));
    assert_eq!(doc["schema_version"], 1);
    let c = doc["concurrence"]["reported"].as_f64().unwrap();
    assert!((c - 0.3863).abs() < 0.05, "{c}");
}

#[test]
fn report_degenerate_point_omits_pair_data() {
    let o = spinent(&["report", "--family", "xxz", "--param", "-2", "--sites", "8"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["degenerate"], true);
    assert!(doc.get("correlators").is_none() && doc.get("rdm").is_none());
    assert_eq!(doc["tied_sectors"], serde_json::json!([0, 8]));
}

#[test]
fn analytic_command() {
    let o = spinent(&["analytic", "--param", "2"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((doc["lambda_zero"].as_f64().unwrap() - 1.536_936_088_5).abs() < 1e-9);
    assert_eq!(doc["point"]["concurrence"], 0.0);
    assert_eq!(code(&spinent(&["analytic", "--family", "xxz"])), 1);
    assert_eq!(code(&spinent(&["analytic", "--param", "-1"])), 1);
}

#[test]
fn verify_quick_json() {
    let o = spinent(&["verify", "--quick", "--json"]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let criteria = doc["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    assert_eq!(doc["quick"], true);
    assert_eq!(code(&o), if doc["passed"] == true { 0 } else { 3 });
    assert_eq!(doc["passed"], true, "{doc}");
}
