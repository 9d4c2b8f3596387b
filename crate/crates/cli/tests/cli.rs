use std::process::{Command, Output};

fn cncsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cncsim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV output (provenance lines and header removed).
fn rows(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(str::to_string).collect()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn catalog_counts() {
    for (args, want) in [
        (&["catalog", "--n", "2", "--m", "1,2"][..], "qubit,\"1,2\",21,432"),
        (&["catalog", "--n", "2", "--rebit", "--m", "0"][..], "rebit,\"0\",6,24"),
        (&["catalog", "--n", "1", "--m", "1"][..], "qubit,\"1\",1,8"),
    ] {
        assert_eq!(rows(&stdout(&cncsim(args))), vec![want.to_string()]);
    }
}

#[test]
fn outputs_carry_provenance() {
    let text = stdout(&cncsim(&["catalog", "--n", "1", "--m", "1"]));
    assert!(text.starts_with("# tool: cncsim "));
    assert!(text.contains("# config_hash: sha256:"));
    let doc = json(&cncsim(&["decompose", "--state", "named:mixed", "--mode", "feasibility"]));
    assert_eq!(doc["provenance"]["tool"], "cncsim");
    assert_eq!(doc["provenance"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn decompose_examples() {
    let doc = json(&cncsim(&["decompose", "--state", "named:H^2", "--mode", "robustness"]));
    assert!((doc["robustness"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let doc = json(&cncsim(&["decompose", "--state", "named:hoggar", "--mode", "robustness_s"]));
    assert!((doc["robustness"].as_f64().unwrap() - 3.8).abs() < 2e-3);
    let doc = json(&cncsim(&["decompose", "--state", "named:mixed", "--mode", "feasibility"]));
    assert_eq!(doc["feasible"], true);
}

#[test]
fn decompose_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, r#"{"n": 1, "kind": "pauli_expectations", "payload": {"Z": 0.5, "X": 0.25}}"#).unwrap();
    let doc = json(&cncsim(&["decompose", "--state", path.to_str().unwrap(), "--mode", "feasibility", "--with-solution"]));
    assert_eq!(doc["feasible"], true);
    assert!(!doc["solution"]["entries"].as_array().unwrap().is_empty());
}

#[test]
fn simulate_zero_state_gives_zeros() {
    let out = stdout(&cncsim(&[
        "simulate", "--state", "named:zero", "--program", r#"[{"measure":"+Z"}]"#, "--shots", "100", "--seed", "3",
    ]));
    let r = rows(&out);
    assert_eq!(r.len(), 100);
    assert!(r.iter().all(|l| l.ends_with(",0")));
}

#[test]
fn simulate_mixed_x_is_balanced() {
    let out = stdout(&cncsim(&[
        "simulate", "--state", "named:mixed(n=1)", "--program", r#"[{"measure":"+X"}]"#, "--shots", "10000", "--seed", "11",
    ]));
    let ones = rows(&out).iter().filter(|l| l.ends_with(",1")).count() as f64;
    // 5 sigma of a fair binomial at 10^4 shots.
    assert!((ones / 1e4 - 0.5).abs() < 0.025, "{ones}");
}

#[test]
fn simulate_exact_distribution_sums_to_one() {
    let out = stdout(&cncsim(&[
        "simulate", "--state", "product:0.3,0.2,0.1;0,0,0.5", "--program",
        r#"[{"measure":"+ZI"},{"measure":"+XX"},{"measure":"-IZ"}]"#, "--exact",
    ]));
    let total: f64 = rows(&out).iter().map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn byte_identical_across_thread_counts() {
    let base = ["simulate", "--state", "product:0.3,0.2,0.1;0,0,0.5", "--program", r#"[{"measure":"+ZI"},{"measure":"+XX"}]"#, "--shots", "2000", "--seed", "5"];
    let one = cncsim(&[&["--threads", "1"][..], &base[..]].concat());
    let four = cncsim(&[&["--threads", "4"][..], &base[..]].concat());
    assert_eq!(stdout(&one), stdout(&four));
    let scan = ["scan", "volume", "--samples", "64", "--seed", "2", "--m", "0"];
    let one = cncsim(&[&["--threads", "1"][..], &scan[..]].concat());
    let three = cncsim(&[&["--threads", "3"][..], &scan[..]].concat());
    assert_eq!(stdout(&one), stdout(&three));
}

#[test]
fn plane_scan_small_grid_is_feasible() {
    let out = stdout(&cncsim(&["scan", "plane", "--grid", "9"]));
    let r = rows(&out);
    assert_eq!(r.len(), 81);
    for l in &r {
        let f: Vec<&str> = l.split(',').collect();
        if f[2] == "true" {
            assert_eq!(f[3], "true", "{l}");
        }
    }
}

#[test]
fn catalog_cache_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let a = stdout(&cncsim(&["--cache-dir", d, "catalog", "--n", "2", "--m", "1,2"]));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 1);
    let b = stdout(&cncsim(&["--cache-dir", d, "catalog", "--n", "2", "--m", "1,2"]));
    assert_eq!(a, b);
}

#[test]
fn oracle_writes_goldens() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&cncsim(&["oracle", "--out", dir.path().to_str().unwrap()]));
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 3);
}

#[test]
fn exit_codes() {
    assert_eq!(cncsim(&["verify"]).status.code(), Some(0));
    assert_eq!(cncsim(&["decompose", "--state", "named:bogus", "--mode", "robustness"]).status.code(), Some(2));
    assert_eq!(cncsim(&["decompose", "--state", "/no/such/file.json", "--mode", "robustness"]).status.code(), Some(2));
    assert_eq!(cncsim(&["catalog", "--n", "9", "--m", "1"]).status.code(), Some(3));
    assert_eq!(cncsim(&["verify", "--level", "nonsense"]).status.code(), Some(2));
    // |T⟩^⊗2 is not a stabilizer mixture, so there is nothing to sample from with m = {0}.
    assert_eq!(
        cncsim(&["simulate", "--state", "named:T^2", "--m", "0", "--program", r#"[{"measure":"+ZI"}]"#]).status.code(),
        Some(2)
    );
}
