use std::fs;
use std::process::{Command, Output};

use padefreq::harness::{parse_csv, CSV_HEADER};

fn padefreq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padefreq"))
        .args(args)
        .env_remove("PADEFREQ_TRIALS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(out: &str, name: &str) -> String {
    out.lines()
        .find(|l| l.starts_with(name))
        .unwrap_or_else(|| panic!("no '{name}' in {out}"))[name.len()..]
        .trim()
        .to_string()
}

#[test]
fn estimate_noiseless_tone() {
    let o = padefreq(&[
        "estimate", "--n", "16", "--kstar", "2", "--delta", "0.3", "--noiseless", "--variant", "proposed", "--iters", "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let f: f64 = field(&out, "f_hat").parse().unwrap();
    assert!((f - 2.3 / 16.0).abs() < 1e-6);
    assert_eq!(field(&out, "interpolations"), "3");
    assert_eq!(field(&out, "alpha"), "+1");
}

#[test]
fn estimate_json_output() {
    let o = padefreq(&["estimate", "--n", "8", "--delta", "-0.2", "--snr-db", "30", "--seed", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["interp_count"], 3);
    assert_eq!(v["delta_path"].as_array().unwrap().len(), 3);
}

#[test]
fn estimate_rejects_bad_input() {
    assert_eq!(padefreq(&["estimate", "--n", "16", "--delta", "0.6"]).status.code(), Some(1));
    let o = padefreq(&["estimate", "--variant", "haqse", "--n", "8", "--delta", "0.1", "--qh", "0.4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("qh"));
    assert_eq!(padefreq(&["estimate", "--n", "8", "--delta", "0.1", "--qh", "0.3", "--variant", "haqse"]).status.code(), Some(0));
    assert_eq!(padefreq(&["estimate", "--bogus"]).status.code(), Some(1));
    assert_eq!(padefreq(&[]).status.code(), Some(1));
}

#[test]
fn estimate_from_sample_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tone.txt");
    let n = 16;
    let mut text = format!("# quarter-bin tone\nn={n}\nfs=1000\n");
    for i in 0..n {
        let ph = 2.0 * std::f64::consts::PI * 3.25 * i as f64 / n as f64;
        text += &format!("{:.17},{:.17}\n", ph.cos(), ph.sin());
    }
    fs::write(&path, text).unwrap();
    let o = padefreq(&["estimate", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let f: f64 = field(&stdout(&o), "f_hat").parse().unwrap();
    assert!((f - 1000.0 * 3.25 / 16.0).abs() < 1e-6);

    fs::write(&path, "n=4\nfs=1\n1,0\n0,1\n").unwrap();
    assert_eq!(padefreq(&["estimate", "--input", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(padefreq(&["estimate", "--input", "/nonexistent/file"]).status.code(), Some(1));
}

#[test]
fn coeffs_subcommand() {
    let o = padefreq(&["coeffs", "--n", "16", "--q", "0.25", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,q,c1,c3,c5,a1,a3,b2"));
    let vals: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((vals[2] - 1.710_388_136_700_991_87).abs() < 1e-10);
    assert!((vals[4] + 0.350_589_821_723_492_664).abs() < 1e-10);

    let a = padefreq(&["coeffs", "--n", "8", "--q", "0.25", "--format", "csv"]);
    let b = padefreq(&["coeffs", "--n", "8", "--q", "0.2500001", "--format", "csv"]);
    let row = |o: &Output| -> Vec<f64> {
        stdout(o).lines().nth(1).unwrap().split(',').skip(2).map(|s| s.parse().unwrap()).collect()
    };
    for (x, y) in row(&a).iter().zip(row(&b)) {
        assert!(((x - y) / x).abs() < 1e-4);
    }

    assert_eq!(padefreq(&["coeffs", "--n", "16", "--q", "0.6"]).status.code(), Some(1));
    assert_eq!(padefreq(&["coeffs", "--n", "16"]).status.code(), Some(0));
}

#[test]
fn sweep_snr_writes_csv_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("snr.csv");
    let o = padefreq(&[
        "sweep-snr", "--n", "8,16,32", "--snr-db", "0:10:40", "--trials", "50", "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 3 * 4 * 2 * 5);
    assert!(rows.iter().any(|r| r.sweep == "snr:n=32"));
    let script = fs::read_to_string(dir.path().join("snr.py")).unwrap();
    assert!(script.contains("matplotlib"));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("snr.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 0);
}

#[test]
fn sweep_delta_rows_per_estimator() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = padefreq(&[
        "sweep-delta", "--n", "16", "--snr-db", "20", "--points", "100", "--trials", "20", "--last-only", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    for v in padefreq::Variant::ALL {
        assert_eq!(rows.iter().filter(|r| r.estimator == v).count(), 100);
    }
}

#[test]
fn sweep_n_reports_the_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n.csv");
    let o = padefreq(&["sweep-n", "--n", "6:2:12", "--snr-db", "20", "--trials", "200", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("proposed iteration-1 minimum normalized MSE"));
}

#[test]
fn sweep_q_enforces_the_shift_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.csv");
    let ok = padefreq(&["sweep-q", "--n", "8", "--points", "3", "--trials", "20", "-o", out.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let rows = parse_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    let grid: Vec<f64> = rows.iter().filter(|r| r.estimator == padefreq::Variant::Haqse && r.iteration == 2).map(|r| r.grid_value).collect();
    assert_eq!(grid, vec![0.1, 0.3, 0.5]);
    let bad = padefreq(&["sweep-q", "--n", "64", "--q-max", "0.4", "--trials", "5", "-o", out.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sweeps_honour_seed_workers_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["sweep-snr", "--n", "8", "--snr-db", "10,20", "--trials", "100", "-o", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(padefreq(&args).status.code(), Some(0));
        fs::read(&out).unwrap()
    };
    let a = run("a.csv", &["--seed", "5", "--workers", "1"]);
    let b = run("b.csv", &["--seed", "5", "--workers", "3"]);
    let c = run("c.csv", &["--seed", "6"]);
    assert_eq!(a, b);
    assert_ne!(a, c);

    let out = dir.path().join("env.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_padefreq"))
        .args(["sweep-snr", "--n", "8", "--snr-db", "20", "-o", out.to_str().unwrap()])
        .env("PADEFREQ_TRIALS", "37")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rows = parse_csv(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.trials == 37));
}

#[test]
fn sweep_rejects_unwritable_output() {
    let o = padefreq(&["sweep-snr", "--n", "8", "--snr-db", "20", "--trials", "5", "-o", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = padefreq(&["sweep-snr", "--n", "8", "--snr-db", "20:5:10", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn props_subcommand() {
    let o = padefreq(&["props"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("60 checks, 0 failed"));
    let o = padefreq(&["props", "--n", "4", "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(padefreq(&["props", "--q", "0.7"]).status.code(), Some(1));
}
