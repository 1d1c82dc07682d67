//! End-to-end checks of the binary: exit codes, output contracts, and
//! run-manifest reproducibility.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jackgas"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("jackgas-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn density_row_count_contract() {
    let out = tmp("density.csv");
    let status = bin()
        .args([
            "density", "--case", "II", "--a", "0.7", "--b", "0.7", "--m", "1.5", "--theta",
            "1", "--grid", "1000", "--out",
        ])
        .arg(&out)
        .output()
        .expect("binary runs");
    assert!(status.status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1001); // header + 1000 rows
    assert!(text.starts_with("x,density\n"));
    let meta = String::from_utf8(status.stdout).unwrap();
    assert!(meta.contains("band"));
    assert!(meta.contains("regions"));
    fs::remove_file(&out).ok();
}

#[test]
fn sample_runs_are_reproducible_and_manifest_roundtrips() {
    let csv1 = tmp("s1.csv");
    let csv2 = tmp("s2.csv");
    let man1 = tmp("m1.json");
    let man2 = tmp("m2.json");
    for (csv, man) in [(&csv1, &man1), (&csv2, &man2)] {
        let status = bin()
            .args([
                "sample", "--case", "II", "--theta", "1", "--a", "0.7", "--b", "0.7", "--n",
                "10", "--M", "15", "--sweeps", "300", "--burnin", "100", "--thin", "10",
                "--chains", "2", "--seed", "99",
            ])
            .arg("--out")
            .arg(csv)
            .arg("--manifest")
            .arg(man)
            .status()
            .expect("binary runs");
        assert!(status.success());
    }
    assert_eq!(fs::read(&csv1).unwrap(), fs::read(&csv2).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&man1).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 99);
    assert_eq!(manifest["outputs"][0]["sha256"], {
        let m2: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&man2).unwrap()).unwrap();
        m2["outputs"][0]["sha256"].clone()
    });

    // The resolved config in the manifest re-parses and reproduces the run.
    let cfg = tmp("config.json");
    fs::write(&cfg, serde_json::to_string(&manifest["params"]).unwrap()).unwrap();
    let csv3 = tmp("s3.csv");
    let man3 = tmp("m3.json");
    let status = bin()
        .args([
            "sample", "--sweeps", "300", "--burnin", "100", "--thin", "10", "--chains", "2",
            "--seed", "99",
        ])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&csv3)
        .arg("--manifest")
        .arg(&man3)
        .status()
        .expect("binary runs");
    assert!(status.success());
    assert_eq!(fs::read(&csv1).unwrap(), fs::read(&csv3).unwrap());
    for p in [csv1, csv2, csv3, man1, man2, man3, cfg] {
        fs::remove_file(p).ok();
    }
}

#[test]
fn verify_suite_exits_zero_on_pass() {
    let status = bin()
        .args(["verify", "--suite", "jack", "--max-degree", "5"])
        .output()
        .expect("binary runs");
    assert!(status.status.success());
    let reports: serde_json::Value = serde_json::from_slice(&status.stdout).unwrap();
    assert!(reports.as_array().unwrap().iter().all(|r| r["status"] == "pass"));
}

#[test]
fn bad_usage_exits_two() {
    let status = bin().args(["density", "--no-such-flag"]).status().expect("binary runs");
    assert_eq!(status.code(), Some(2));

    // Parameter errors are configuration errors too: ab >= 1 in Case I.
    let status = bin()
        .args([
            "density", "--case", "I", "--theta", "1", "--a", "2.0", "--b", "0.9", "--m", "1.5",
        ])
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(2));
}
