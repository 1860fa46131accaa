//! The binary end to end: examples per subcommand, exit codes, output format.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_potts-tisgm"));
    for (k, _) in std::env::vars() {
        if k.starts_with("POTTS_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

fn col(header: &csv::StringRecord, name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn classify_examples() {
    let o = run(&["classify", "--q", "3", "--k", "2", "--theta", "4.0", "--m", "1", "--branch", "z1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("verdict: extreme_msw"), "{s}");
    assert!(s.contains("singleton_lower_msw"));

    let o = run(&["classify", "--q", "3", "--theta", "7.0", "--branch", "z1", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["verdict"], "non_extreme_ks");
    assert_eq!(v["region"], "lower_ks_tail");
    assert_eq!(v["schema_version"], 1);

    let o = run(&["classify", "--q", "3", "--theta", "3.0", "--branch", "z1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not exist"));
}

#[test]
fn domain_and_io_exit_codes() {
    assert_eq!(run(&["classify", "--q", "3", "--theta", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--q", "3", "--theta", "4", "--m", "3"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--q", "3", "--theta-min", "1.0", "--theta-max", "4"]).status.code(), Some(2));
    let o = run(&["scan", "--q", "3", "--theta-min", "2", "--theta-max", "4", "--steps", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["simulate", "--q", "3", "--theta", "9", "--branch", "free", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["simulate", "--q", "3", "--theta", "9", "--branch", "free", "--depth", "30"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_fold_points_q8() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q8.csv");
    let o = run(&["scan", "--q", "8", "--theta-min", "1.5", "--theta-max", "12", "--steps", "2000", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let mut r = csv::Reader::from_path(&out).unwrap();
    let h = r.headers().unwrap().clone();
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    let (kind, ann, m, th, z, br) = (
        col(&h, "row_kind"),
        col(&h, "region_annotation"),
        col(&h, "m"),
        col(&h, "theta"),
        col(&h, "z"),
        col(&h, "branch"),
    );
    for mm in 1..=3usize {
        let fold = rows
            .iter()
            .find(|r| &r[kind] == "threshold" && &r[ann] == "theta_m" && r[m].parse::<usize>().unwrap() == mm)
            .unwrap();
        let t: f64 = fold[th].parse().unwrap();
        assert!((t - (1.0 + 2.0 * ((mm * (8 - mm)) as f64).sqrt())).abs() < 1e-12);
        assert_eq!(fold[z].parse::<f64>().unwrap(), (8 - mm) as f64 / mm as f64);
    }
    // Six branch curves for m = 1, 2, 3.
    let curves: std::collections::BTreeSet<(String, String)> = rows
        .iter()
        .filter(|r| &r[kind] == "point" && &r[br] != "free" && &r[m] != "4")
        .map(|r| (r[m].to_string(), r[br].to_string()))
        .collect();
    assert_eq!(curves.len(), 6);
    // 17 significant digits.
    let sample = &rows[0][th];
    let mantissa = sample.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{sample}");
}

#[test]
fn scan_verdict_switches_q3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q3.csv");
    let o = run(&["scan", "--q", "3", "--theta-min", "3.5", "--theta-max", "8", "--steps", "1000", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_path(&out).unwrap();
    let h = r.headers().unwrap().clone();
    let (br, th, vd) = (col(&h, "branch"), col(&h, "theta"), col(&h, "verdict"));
    let z1: Vec<(f64, String)> = r
        .records()
        .map(|x| x.unwrap())
        .filter(|r| &r[br] == "z1")
        .map(|r| (r[th].parse().unwrap(), r[vd].to_string()))
        .collect();
    let switches: Vec<(f64, &str, &str)> = z1
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| (w[1].0, w[0].1.as_str(), w[1].1.as_str()))
        .collect();
    let step = 4.5 / 1000.0;
    assert_eq!(switches.len(), 2, "{switches:?}");
    assert_eq!((switches[0].1, switches[0].2), ("extreme_msw", "undecided"));
    assert!((switches[0].0 - 4.2277).abs() < step + 5e-4);
    assert_eq!((switches[1].1, switches[1].2), ("undecided", "non_extreme_ks"));
    assert!((switches[1].0 - (2.0 + 3.0 * 2f64.sqrt())).abs() < step);
}

#[test]
fn scan_fold_q16_m2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q16.jsonl");
    let o = run(&[
        "scan", "--q", "16", "--m", "2", "--theta-min", "5", "--theta-max", "40", "--steps", "200", "--format", "jsonl",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(rows.iter().all(|r| r["m"] == 2 && r["schema_version"] == 1));
    let fold = rows.iter().find(|r| r["region_annotation"] == "theta_m").unwrap();
    assert_eq!(fold["z"].as_f64().unwrap(), 7.0);
    assert!((fold["theta"].as_f64().unwrap() - (1.0 + 2.0 * 28f64.sqrt())).abs() < 1e-12);
}

#[test]
fn scan_rows_agree_with_classify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q6.csv");
    let o = run(&["scan", "--q", "6", "--theta-min", "6", "--theta-max", "13", "--steps", "7", "--paper-exact", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let mut r = csv::Reader::from_path(&out).unwrap();
    let h = r.headers().unwrap().clone();
    let rows = read_csv(&out);
    let (kind, m, br, th, vd) = (col(&h, "row_kind"), col(&h, "m"), col(&h, "branch"), col(&h, "theta"), col(&h, "verdict"));
    let mut checked = 0;
    for row in rows.iter().filter(|r| &r[kind] == "point") {
        let o = run(&["classify", "--q", "6", "--theta", &row[th], "--m", &row[m], "--branch", &row[br], "--paper-exact", "--json"]);
        assert!(o.status.success(), "{row:?}");
        let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!(v["verdict"], &row[vd], "{row:?}");
        checked += 1;
    }
    assert!(checked > 20);
}

#[test]
fn simulate_rows_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "simulate".to_string(), "--q".into(), "3".into(), "--k".into(), "2".into(), "--theta".into(), "9".into(),
            "--branch".into(), "free".into(), "--depth".into(), "8".into(), "--samples".into(), "10000".into(),
            "--seed".into(), "42".into(), "--out".into(), p.to_string_lossy().into_owned(),
        ]
    };
    let o = bin().args(args(&a)).output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("decision: signal_persists"));
    let o = bin().args(args(&b)).env("POTTS_WORKERS", "3").output().unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rows = read_csv(&a);
    assert_eq!(rows.len(), 9);
    assert_eq!(&rows[0][6], "0");
    assert_eq!(rows[0][7].parse::<f64>().unwrap(), 1.0);

    let o = run(&["simulate", "--q", "3", "--theta", "9", "--branch", "free", "--depth", "0"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 2);
    assert!(s.lines().nth(1).unwrap().contains(",0,1.0000000000000000e0,"));
}

#[test]
fn counts_examples() {
    let total = |args: &[&str]| -> u64 {
        let o = run(args);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        v["total"].as_u64().unwrap()
    };
    assert_eq!(total(&["counts", "--q", "6", "--k", "2", "--theta", "7", "--json"]), 22);
    assert_eq!(total(&["counts", "--q", "5", "--theta", "20", "--json"]), 31);
    assert_eq!(total(&["counts", "--q", "4", "--theta", "fold:1", "--json"]), 5);
    let o = run(&["counts", "--q", "4", "--theta", "fold:1"]);
    assert!(stdout(&o).contains("at the fold of m=1"));
}

#[test]
fn thresholds_command() {
    let o = run(&["thresholds", "--q", "6", "--m", "2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let line = &v["lines"][0];
    assert_eq!(line["theta_grave"], 7.0);
    assert!((line["theta_breve"].as_f64().unwrap() - 7.25).abs() < 5e-2);
    let o = run(&["thresholds", "--q", "3"]);
    assert!(stdout(&o).contains("theta_double_star"));
}

#[test]
fn flags_override_environment() {
    let o = bin().args(["classify", "--theta", "7", "--branch", "z1"]).env("POTTS_Q", "3").output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("q=3"));
    let o = bin().args(["classify", "--q", "3", "--branch", "z1"]).env("POTTS_Q", "9").env("POTTS_THETA", "7").output().unwrap();
    assert!(stdout(&o).contains("q=3 k=2 theta=7"));
    let capped = bin().args(["classify", "--q", "3", "--theta", "5", "--json"]).output().unwrap();
    let exact = bin().args(["classify", "--q", "3", "--theta", "5", "--json"]).env("POTTS_PAPER_EXACT", "true").output().unwrap();
    let g = |o: &Output| serde_json::from_str::<serde_json::Value>(stdout(o).trim()).unwrap()["gamma_mode"].clone();
    assert_eq!(g(&capped), "capped");
    assert_eq!(g(&exact), "paper_exact");
}
