//! The `qharm` binary: output shapes, exit codes and determinism.

use std::path::Path;
use std::process::{Command, Output};

fn qharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qharm")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn thresholds_output_and_invalid_input() {
    let out = qharm(&["thresholds", "--n", "2", "--K", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["q_plus"], 0.75);
    assert_eq!(v["q_minus"], -3.0);

    let out = qharm(&["thresholds", "--n", "3", "--K", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!((v["q_plus"].as_f64(), v["q_minus"].as_f64()), (Some(0.0), Some(-1.0)));

    let out = qharm(&["thresholds", "--n", "2", "--K", "2"]);
    assert!(stdout(&out).contains("q_plus = 0.75"));

    assert_eq!(code(&qharm(&["thresholds", "--n", "2", "--K", "0.5"])), 2);
    assert_eq!(code(&qharm(&["thresholds", "--n", "1", "--K", "2"])), 2);
    assert_eq!(code(&qharm(&["thresholds", "--n", "2", "--K", "2", "--unknown"])), 2);
}

#[test]
fn laplacian_codes() {
    let out = qharm(&["laplacian", "--map", "stretch:2,2", "--point", "0,1", "--q", "0.5", "--oracle", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["laplacian"].as_f64().unwrap() + 0.17678).abs() < 1e-5);
    assert!(v["difference"].as_f64().unwrap() < 1e-6);

    let out = qharm(&["laplacian", "--map", "identity", "--point", "1,0,0", "--q", "-1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["laplacian"].as_f64().unwrap().abs() < 1e-9);

    let out = qharm(&["laplacian", "--map", "identity", "--point", "0,0", "--q", "0.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Omega_0"));

    // steps of 1e-3 next to the singularity of r^0.5: the oracle is useless here
    let out = qharm(&["laplacian", "--map", "identity", "--point", "0.0015,0,0", "--q", "0.5", "--oracle"]);
    assert_eq!(code(&out), 3);

    assert_eq!(code(&qharm(&["laplacian", "--map", "stretch:2,2", "--point", "0,1,0", "--q", "0.5"])), 2);
    assert_eq!(code(&qharm(&["laplacian", "--map", "nosuchmap", "--point", "0,1", "--q", "0.5"])), 2);
}

#[test]
fn verify_codes_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = qharm(&[
        "verify", "--map", "stretch:2,2", "--domain", "box:0,1:0.5", "--q", "0.5", "--samples", "256",
        "--format", "json", "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert!(v["violation_points"].as_array().unwrap().len() <= 16);

    let out = qharm(&["verify", "--map", "stretch:2,2", "--domain", "box:0,1:0.5", "--q", "0.75", "--samples", "256"]);
    assert_eq!(code(&out), 0);
    let out = qharm(&["verify", "--map", "identity", "--domain", "ball:0,0,0:1", "--q", "-1.5"]);
    assert_eq!(code(&out), 0);

    assert_eq!(code(&qharm(&["verify", "--map", "zsquared", "--domain", "box:0,0:1e-5", "--q", "0.5"])), 2);
    assert_eq!(code(&qharm(&["verify", "--map", "zsquared", "--domain", "cube:0,0:1", "--q", "0.5"])), 2);
}

#[test]
fn witness_codes() {
    let out = qharm(&["witness", "--n", "2", "--K", "2", "--q", "0.5", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["branch"], "stretch");
    assert!(v["laplacian_value"].as_f64().unwrap() < 0.0);
    assert_eq!(v["oracle_confirms"], true);

    let out = qharm(&["witness", "--n", "3", "--K", "2", "--q", "-3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["branch"], "compress");

    assert_eq!(code(&qharm(&["witness", "--n", "2", "--K", "2", "--q", "0.9"])), 4);
    assert_eq!(code(&qharm(&["witness", "--n", "2", "--K", "2", "--q", "0"])), 4);
    assert_eq!(code(&qharm(&["witness", "--n", "2", "--K", "0.5", "--q", "0.1"])), 2);
}

#[test]
fn map_files_are_validated_before_use() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.json",
        r#"{"n": 2, "components": [[{"exps": [2, 0], "num": 1, "den": 1}, {"exps": [0, 2], "num": -1, "den": 1}],
                                  [{"exps": [1, 1], "num": 2, "den": 1}]]}"#,
    );
    let out = qharm(&["laplacian", "--map", &good, "--point", "1,0.5", "--q", "1", "--oracle"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let arity = write(dir.path(), "arity.json", r#"{"n": 2, "components": [[{"exps": [1], "num": 1, "den": 1}], [{"exps": [0, 1], "num": 1, "den": 1}]]}"#);
    let out = qharm(&["laplacian", "--map", &arity, "--point", "1,0.5", "--q", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("u1"), "{}", stderr(&out));

    let den = write(dir.path(), "den.json", r#"{"n": 2, "components": [[{"exps": [1, 0], "num": 1, "den": 1}], [{"exps": [0, 1], "num": 1, "den": 0}]]}"#);
    let out = qharm(&["laplacian", "--map", &den, "--point", "1,0.5", "--q", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("u2"), "{}", stderr(&out));

    let lap = write(dir.path(), "lap.json", r#"{"n": 2, "components": [[{"exps": [1, 0], "num": 1, "den": 1}], [{"exps": [0, 2], "num": 3, "den": 2}]]}"#);
    let out = qharm(&["laplacian", "--map", &lap, "--point", "1,0.5", "--q", "1"]);
    assert_eq!(code(&out), 2);
    let msg = stderr(&out);
    assert!(msg.contains("u2") && msg.contains("coefficient 3"), "{msg}");

    let junk = write(dir.path(), "junk.json", r#"{"n": 2, "comps": []}"#);
    assert_eq!(code(&qharm(&["laplacian", "--map", &junk, "--point", "1,0.5", "--q", "1"])), 2);
}

#[test]
fn sweep_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"n_values": [2], "K_values": [1.0, 2.0], "samples": 128, "ensemble_size": 2}"#,
    );
    let mut files = Vec::new();
    for (i, fmt) in ["csv", "csv", "json", "json"].iter().enumerate() {
        let path = dir.path().join(format!("out{i}"));
        let out = qharm(&["sweep", "--config", &cfg, "--format", fmt, "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        files.push(std::fs::read(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[2], files[3]);
    let csv = String::from_utf8(files[0].clone()).unwrap();
    assert!(csv.starts_with("n,K,q,q_plus,q_minus,extremal_verdict,ensemble_verdict,witness_delta,ms\n"));
    let json: serde_json::Value = serde_json::from_slice(&files[2]).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), csv.lines().count() - 1);
    assert!(json["rows"][0]["reports"]["stretch"]["verdict"].is_string());

    // thread count does not change the bytes
    let path = dir.path().join("threads1");
    let out = Command::new(env!("CARGO_BIN_EXE_qharm"))
        .env("QHARM_THREADS", "1")
        .args(["sweep", "--config", &cfg, "--format", "csv", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read(path).unwrap(), files[0]);

    let bad = write(dir.path(), "bad.json", r#"{"n_values": [], "K_values": [2.0]}"#);
    assert_eq!(code(&qharm(&["sweep", "--config", &bad])), 2);
    let unknown = write(dir.path(), "unknown.json", r#"{"n_values": [2], "K_values": [2.0], "extra": true}"#);
    assert_eq!(code(&qharm(&["sweep", "--config", &unknown])), 2);
    assert_eq!(code(&qharm(&["sweep", "--config", "/nonexistent/cfg.json"])), 2);
}

#[test]
fn help_and_threads_env() {
    assert_eq!(code(&qharm(&["--help"])), 0);
    let out = Command::new(env!("CARGO_BIN_EXE_qharm"))
        .env("QHARM_THREADS", "many")
        .args(["thresholds", "--n", "2", "--K", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
