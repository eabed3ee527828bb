use std::path::Path;
use std::process::{Command, Output};

use okspec_core::okounkov::{filtered_cdf, BodyOptions, SemigroupSample, ValueTable};

fn okspec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okspec")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn config(psi: &str, schedule: &str, norm: &str) -> String {
    format!(
        r#"{{"backend": "P1", "phi": {{"kind": "fubini-study"}}, "psi": {psi},
            "norm": "{norm}", "order": "lex", "n_schedule": {schedule}, "seed": 3}}"#
    )
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn spectrum_of_a_gram_pair() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pair.json", r#"{"phi": [[1, 0], [0, 1]], "psi": [[9, 0], [0, 4]]}"#);
    let out = stdout(&okspec(&["spectrum", "--input", "pair.json"], dir.path()));
    let slopes = column(&out, "slope");
    assert!((slopes[0] - 3f64.ln()).abs() < 1e-12 && (slopes[1] - 2f64.ln()).abs() < 1e-12, "{out}");
    let poly = stdout(&okspec(&["polygon", "--input", "pair.json"], dir.path()));
    let p = column(&poly, "polygon");
    assert!((p[2] - 6f64.ln()).abs() < 1e-12, "{poly}");
}

#[test]
fn ultra_report_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "tree.json",
        r#"{"field": {"p-adic": 2},
            "phi": {"diagonal": {"exponents": [0, 0, 0]}},
            "psi": {"max": [{"diagonal": {"exponents": [2, 0, -1]}}, {"diagonal": {"exponents": [-3, 1, -1]}}]},
            "a": ["0", "-1/2"]}"#,
    );
    let out = stdout(&okspec(&["ultra", "--input", "tree.json"], dir.path()));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["slope_exponents"], serde_json::json!(["2", "1", "-1"]));
    assert_eq!(v["degree_exponent"], "2");
    assert_eq!(v["truncations"][0]["slope_sum"], "3");
    assert_eq!(v["truncations"][1]["slope_sum"], "5/2");
}

#[test]
fn okounkov_cdf_matches_the_module() {
    let dir = tempfile::tempdir().unwrap();
    // Φ(n, k) = min(k, n - k) on the full semigroup of the line.
    let n_max = 30;
    let sample = SemigroupSample::full(1, n_max).unwrap();
    let table = ValueTable::from_fn(&sample, |n, a| a[0].min(n as i64 - a[0]) as f64);
    let mut text = String::from("n,a,value\n");
    for n in 0..=n_max {
        for k in 0..=n {
            text.push_str(&format!("{n},{k},{}\n", k.min(n - k)));
        }
    }
    write(dir.path(), "table.csv", &text);
    let out = stdout(&okspec(
        &["okounkov", "--input", "table.csv", "--t-min", "0", "--t-max", "0.5", "--t-points", "11"],
        dir.path(),
    ));
    let survival = column(&out, "survival");
    let grid = column(&out, "t");
    let oracle = filtered_cdf(&sample, &table, &grid, &BodyOptions::default()).unwrap();
    for (a, b) in survival.iter().zip(&oracle.f) {
        assert!((a - b).abs() < 1e-15, "{a} vs {b}");
    }
    // The hull of {k/n : min(k, n-k) ≥ nt} is [t, 1 - t].
    assert!((survival[4] - 0.6).abs() < 1e-12, "{out}");
}

#[test]
fn equal_metrics_give_a_dirac_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", &config(r#"{"kind": "fubini-study"}"#, "[2, 4, 8]", "both"));
    let o = okspec(&["run", "--config", "c.json", "--out", "b"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let poly = std::fs::read_to_string(dir.path().join("b/polygons.csv")).unwrap();
    assert!(column(&poly, "polygon").iter().all(|p| p.abs() < 1e-9), "{poly}");
    let spectra = std::fs::read_to_string(dir.path().join("b/spectra.csv")).unwrap();
    assert!(column(&spectra, "normalized_slope").iter().all(|s| s.abs() < 1e-9));
    for name in ["cdf.csv", "report.json", "manifest.json", "values.csv"] {
        assert!(dir.path().join("b").join(name).exists(), "{name}");
    }
}

#[test]
fn dilated_metric_gives_a_dirac_at_the_constant() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", &config(r#"{"kind": "dilate", "c": 0.25}"#, "[3, 6]", "both"));
    let out = stdout(&okspec(&["spectrum", "--config", "c.json"], dir.path()));
    let s = column(&out, "normalized_slope");
    assert_eq!(s.len(), 2 * (4 + 7));
    assert!(s.iter().all(|x| (x - 0.25).abs() < 1e-6), "{out}");
    let report = stdout(&okspec(&["converge", "--config", "c.json", "--norm", "l2"], dir.path()));
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    let e = v["norms"][0]["okounkov"]["estimate"].as_f64().unwrap();
    assert!((e - 0.25).abs() < 1e-9, "{e}");
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let bump = r#"{"kind": "bump", "center": [1, [0, 1]], "height": 0.1, "radius": 1.0}"#;
    write(dir.path(), "c.json", &config(bump, "[2, 4, 8]", "both"));
    let one = Command::new(env!("CARGO_BIN_EXE_okspec"))
        .args(["run", "--config", "c.json", "--out", "one"])
        .env("OKSPEC_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(one.status.success());
    assert!(okspec(&["run", "--config", "c.json", "--out", "two"], dir.path()).status.success());
    for name in ["spectra.csv", "polygons.csv", "cdf.csv", "values.csv", "report.json", "manifest.json"] {
        let a = std::fs::read(dir.path().join("one").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("two").join(name)).unwrap();
        assert!(a == b, "{name} differs");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.json", r#"{"backend": "P1"}"#);
    let o = okspec(&["converge", "--config", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("stage config"));

    assert_eq!(okspec(&["frobnicate"], dir.path()).status.code(), Some(2));

    // A three-spoke grid cannot resolve degree-12 sections.
    let coarse = config(r#"{"kind": "max-log"}"#, "[12]", "sup")
        .replace(r#""seed": 3"#, r#""seed": 3, "grid": {"radial": 2, "angular": 3, "radius": 1.1}"#);
    write(dir.path(), "coarse.json", &coarse);
    let o = okspec(&["converge", "--config", "coarse.json"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("stage norms (n = 12, sup)") && err.contains("grid too coarse"), "{err}");
}

#[test]
fn sampled_weights_drive_sup_norms() {
    let dir = tempfile::tempdir().unwrap();
    // The Fubini–Study weight sampled on a polar grid in both charts.
    let mut text = String::from("chart,re,im,u\n");
    for chart in 0..2 {
        for i in 0..=24 {
            for k in 0..32 {
                let r = 1.2 * i as f64 / 24.0;
                let t = std::f64::consts::TAU * k as f64 / 32.0;
                let u = 0.5 * (1.0 + r * r).ln();
                text.push_str(&format!("{chart},{:?},{:?},{u:?}\n", r * t.cos(), r * t.sin()));
            }
        }
    }
    write(dir.path(), "fs.csv", &text);
    let cfg = config(r#"{"kind": "dilate", "c": 0.1}"#, "[4]", "sup").replace(
        r#""phi": {"kind": "fubini-study"}"#,
        r#""phi": {"kind": "csv", "path": "fs.csv"}"#,
    );
    write(dir.path(), "c.json", &cfg);
    let out = stdout(&okspec(&["spectrum", "--config", "c.json"], dir.path()));
    assert!(column(&out, "normalized_slope").iter().all(|x| (x - 0.1).abs() < 1e-6), "{out}");
    let l2 = okspec(&["spectrum", "--config", "c.json", "--norm", "l2"], dir.path());
    assert_eq!(l2.status.code(), Some(2));
}
