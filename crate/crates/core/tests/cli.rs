use std::fs;
use std::process::{Command, Output};

fn geopa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geopa"))
        .args(args)
        .env_remove("GEOPA_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn params_prints_json() {
    let o = geopa(&["params", "--n", "100000", "--xi", "1", "--c0", "1", "--c1", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["r_0"].as_f64().unwrap() - 0.0364).abs() < 1e-4);
    assert!((v["R_0"].as_f64().unwrap() - 0.419).abs() < 1e-3);
    for key in ["t_r", "t_0", "c_2", "exponent_window_valid"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn single_vertex_edge_list() {
    let o = geopa(&[
        "generate", "--model", "base", "--n", "1", "--m", "3", "--xi", "1", "--r", "0.3", "--seed", "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("src,dst,kind"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| *r == "0,0,plain"));
}

#[test]
fn unknown_subcommand_exits_2() {
    let o = geopa(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn json_errors_are_machine_readable() {
    let o = geopa(&["frobnicate", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["message"].as_str().unwrap().contains("frobnicate"));

    let o = geopa(&[
        "generate", "--model", "selfloop", "--n", "5", "--m", "1", "--xi", "1", "--json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(v["message"].as_str().unwrap().contains("delta"));

    let o = geopa(&["generate", "--r", "4"]);
    assert!(!o.status.success());
}

#[test]
fn generate_writes_files_with_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = geopa(&[
        "generate",
        "--model",
        "hybrid",
        "--n",
        "200",
        "--m",
        "2",
        "--r",
        "0.4",
        "--seed",
        "7",
        "--probes",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg: geopa::ModelConfig = serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!((cfg.n, cfg.seed, cfg.model), (200, 7, geopa::ModelKind::Hybrid));
    let (g, _) = geopa::generate(&cfg).unwrap();
    let mut expected = Vec::new();
    g.write_edge_csv(&mut expected).unwrap();
    assert_eq!(fs::read(out.join("edges.csv")).unwrap(), expected);
    assert_eq!(
        fs::read_to_string(out.join("vertices.csv")).unwrap().lines().count(),
        201
    );
    assert_eq!(fs::read_to_string(out.join("trace.csv")).unwrap().lines().count(), 4);
}

#[test]
fn analysis_subcommands_emit_json() {
    let common = [
        "--model", "hybrid", "--n", "1500", "--m", "2", "--r", "0.3", "--seed", "3", "--json",
    ];
    for (sub, key) in [
        ("degrees", "histogram"),
        ("diameter", "diameter"),
        ("communities", "reports"),
        ("expander", "radii"),
        ("concentration", "report"),
    ] {
        let mut args = vec![sub];
        args.extend(common);
        let o = geopa(&args);
        assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["config"]["seed"], 3, "{sub}");
        assert!(v["result"].get(key).is_some(), "{sub}");
    }
}

#[test]
fn experiment_subcommand_runs_a_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"config": {"model": "base", "n": 500, "m": 2, "xi": 1.0, "r": 0.3, "seed": 0},
            "seeds": [1, 2], "analyses": ["degrees", "diameter"], "knobs": {"k_min": 4}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = geopa(&["experiment", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("index.json").exists());
    assert!(out.join("seed-2/diameter.json").exists());
}
