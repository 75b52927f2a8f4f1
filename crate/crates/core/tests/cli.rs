use std::path::Path;
use std::process::{Command, Output};

use popcode::experiments::output::csv_body;

fn popcode(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popcode"))
        .args(args)
        .current_dir(dir)
        .env_remove("POPCODE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn theory_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = popcode(&["theory", "--n", "20", "--sigma", "0.1"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# popcode_failure_threshold: 0.835"));
    assert!(text.contains("\n0.2,0.25,false,false\n"));
    assert!(text.contains("\n0.5,0.7,false,false\n"));
    assert!(text.contains("\n0.85,0.8235294117647058,false,true\n"));
    assert_eq!(csv_body(&text).lines().count(), 21);

    let out = popcode(&["theory", "--amplitudes", "0.05"], dir.path());
    assert!(csv_body(&stdout(&out)).contains("0.05,0.0,false,false"));
}

#[test]
fn theory_json_and_bad_params() {
    let dir = tempfile::tempdir().unwrap();
    let out = popcode(&["--format", "json", "theory", "--amplitudes", "0.2,1.0"], dir.path());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["rows"][0]["single_variable_failure_rate"], 0.25);
    assert_eq!(doc["rows"][1]["one_hot_can_fail"], false);
    assert!((doc["metadata"]["popcode_failure_threshold"].as_f64().unwrap() - 0.835).abs() < 1e-3);

    let out = popcode(&["theory", "--amplitudes", "-0.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("amplitude"));
    assert_eq!(popcode(&["theory", "--sigma", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(popcode(&["theory", "--bogus"], dir.path()).status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env_seed: Option<&str>, flag: Option<&str>, name: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_popcode"));
        c.current_dir(dir.path()).env_remove("POPCODE_SEED");
        if let Some(s) = env_seed {
            c.env("POPCODE_SEED", s);
        }
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        c.args(["train", "--method", "one_hot", "--epochs", "20", "--out", name]);
        assert!(c.output().unwrap().status.success());
        std::fs::read_to_string(dir.path().join(name)).unwrap()
    };
    let from_env = run(Some("17"), None, "a.json");
    let from_flag = run(None, Some("17"), "b.json");
    let default = run(None, None, "c.json");
    assert_eq!(from_env, from_flag);
    assert_ne!(from_env, default);
    assert!(from_env.contains("\"seed\": 17"));
}

#[test]
fn train_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for (method, name) in [("population_code", "pc.json"), ("one_hot", "oh.json")] {
        let out = popcode(
            &["train", "--method", method, "--depth", "3", "--epochs", "1500", "--out", name, "--loss-out", "loss.csv"],
            p,
        );
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stdout(&out).contains("20/20 clean inputs decoded"), "{}", stdout(&out));
    }
    let loss = std::fs::read_to_string(p.join("loss.csv")).unwrap();
    assert_eq!(csv_body(&loss).lines().count(), 1501);

    let out = popcode(&["analyze", "pc.json", "oh.json", "--input-index", "10", "--out-dir", "an"], p);
    assert!(out.status.success(), "{}", stderr(&out));
    let flow = csv_body(&std::fs::read_to_string(p.join("an/flow.csv")).unwrap());
    assert_eq!(flow.lines().next().unwrap(), "model,layer,out,in,flow,unused");
    assert_eq!(flow.lines().count(), 1 + 2 * 3 * 400);
    // first-layer flow only comes from the active pixel
    for line in flow.lines().skip(1).filter(|l| l.contains(",1,")) {
        let f: Vec<&str> = line.split(',').collect();
        if f[1] == "1" && f[3] != "10" {
            assert_eq!(f[4], "0.0", "{line}");
        }
    }
    let models = csv_body(&std::fs::read_to_string(p.join("an/models.csv")).unwrap());
    for line in models.lines().skip(1) {
        let s: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&s));
    }

    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("pc.json")).unwrap()).unwrap();
    doc["format_version"] = 99.into();
    std::fs::write(p.join("future.json"), doc.to_string()).unwrap();
    let out = popcode(&["analyze", "future.json", "--out-dir", "x"], p);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("version"), "{}", stderr(&out));
    assert!(!popcode(&["analyze", "pc.json", "--input-index", "20"], p).status.success());
}

#[test]
fn robustness_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = popcode(
        &["robustness", "--depths", "1", "--runs", "2", "--epochs", "300", "--perturbations", "40", "--methods", "all", "--out-dir", "r"],
        p,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let plot = std::fs::read_to_string(p.join("r/plot_data.csv")).unwrap();
    assert!(plot.contains("# grid: {"));
    assert!(plot.contains("# run_seeds: 0 1"));
    let body = csv_body(&plot);
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "depth,amplitude,single_variable_mean,single_variable_sd,one_hot_mean,one_hot_sd,population_code_mean,population_code_sd"
    );
    assert_eq!(lines.count(), 20);
    for m in ["single_variable", "one_hot", "population_code"] {
        let t = std::fs::read_to_string(p.join(format!("r/robustness_{m}.csv"))).unwrap();
        let body = csv_body(&t);
        assert_eq!(body.lines().count(), 21);
        assert!(body.lines().skip(1).all(|l| l.starts_with(m) && l.ends_with(",2,false,0")));
    }

    let out = popcode(
        &["--format", "json", "robustness", "--methods", "one_hot", "--depths", "2", "--runs", "1", "--epochs", "50",
          "--perturbations", "10", "--augment", "--out-dir", "j"],
        p,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("j/robustness.json")).unwrap()).unwrap();
    assert_eq!(doc["report"]["grid"]["augment"], true);
    assert_eq!(doc["report"]["rows"].as_array().unwrap().len(), 20);

    let out = popcode(&["robustness", "--methods", "two_hot", "--out-dir", "bad"], p);
    assert_eq!(out.status.code(), Some(2));
    let out = popcode(&["robustness", "--amplitudes", "0,0.5", "--out-dir", "bad"], p);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn so3_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = popcode(&["--seed", "5", "so3", "encode", "--random", "--symmetry", "cyclic-z-2", "--out", "c.json"], p);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("92232 neurons"));
    assert!(stdout(&out).trim_end().ends_with("peaks: 4"), "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("c.json")).unwrap()).unwrap();
    assert_eq!(doc["n_axes"], 2562);
    assert_eq!(doc["n_angles"], 36);
    assert_eq!(doc["mode"], "axis_angle");
    assert!((doc["sigma_rad"].as_f64().unwrap() - 20f64.to_radians()).abs() < 1e-15);

    let out = popcode(&["so3", "encode", "--n-axes", "200", "--n-angles", "12", "--out", "i.json"], p);
    assert!(out.status.success());
    let out = popcode(&["so3", "decode", "--code", "i.json"], p);
    let body = csv_body(&stdout(&out));
    let row: Vec<&str> = body.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "0.0");

    std::fs::write(p.join("sym.json"), r#"{"kind":"revolution","axis":[0,0,1]}"#).unwrap();
    let out = popcode(&["so3", "encode", "--axis", "1,0,0", "--angle-deg", "30", "--symmetry", "sym.json", "--out", "r.json"], p);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("axis_only"));
    assert!(stdout(&out).trim_end().ends_with("peaks: 1"));
    let out = popcode(&["so3", "decode", "--code", "r.json"], p);
    assert!(csv_body(&stdout(&out)).lines().nth(1).unwrap().ends_with(",,"));

    let out = popcode(&["so3", "roundtrip", "--samples", "30", "--symmetry", "cyclic-z-2", "--n-axes", "600"], p);
    assert!(out.status.success());
    assert!(stderr(&out).contains("30 samples"));
    assert!(stdout(&out).contains("# error_bound_rad: "));

    let out = popcode(&["so3", "encode", "--rotation", "1,0,0,0,1,0,0,0,2"], p);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("orthonormal"));
    std::fs::write(p.join("bad.json"), "[[1,0,0,0,1,0,0,0,1],[0,-1,0,1,0,0,0,0,1]]").unwrap();
    let out = popcode(&["so3", "encode", "--symmetry", "bad.json"], p);
    assert!(stderr(&out).contains("closed"), "{}", stderr(&out));
    assert!(!popcode(&["so3", "encode", "--symmetry", "dihedral-z-2"], p).status.success());
}
