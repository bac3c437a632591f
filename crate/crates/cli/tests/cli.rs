use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn acgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acgraph")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = acgraph(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_prints_stats_json() {
    let cfg = config("diagonal_rho_0.8.toml");
    let stdout = ok(&["generate", "--config", path_str(&cfg)]);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["n"], 1000);
    assert_eq!(doc["accepted"], true);
    assert_eq!(doc["erased"], true);
    assert_eq!(doc["seed"], 42);
    assert_eq!(doc["edge_type"], "out_in");
    let rho = doc["rho_hat"].as_f64().unwrap();
    assert!((rho - 0.8).abs() < 0.1, "rho_hat {rho}");
}

#[test]
fn same_config_gives_identical_files() {
    let cfg = config("diagonal_rho_0.8.toml");
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| -> Vec<Vec<u8>> {
        let files = ["edges", "nodes", "stats"].map(|f| dir.path().join(format!("{tag}_{f}")));
        ok(&[
            "generate",
            "--config",
            path_str(&cfg),
            "--out-edges",
            path_str(&files[0]),
            "--out-nodes",
            path_str(&files[1]),
            "--out-stats",
            path_str(&files[2]),
        ]);
        files.iter().map(|f| fs::read(f).unwrap()).collect()
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    assert!(a[0].starts_with(b"source,target\n"));
    assert!(a[1].starts_with(b"node,in_degree,out_degree\n"));

    let other = ok(&["generate", "--config", path_str(&cfg), "--seed", "43"]);
    assert_ne!(other.as_bytes(), a[2].as_slice());
}

#[test]
fn graph_formats_and_reimport() {
    let cfg = config("diagonal_rho_0.8.toml");
    let dir = tempfile::tempdir().unwrap();
    let xml = dir.path().join("g.graphml");
    ok(&["generate", "--config", path_str(&cfg), "--format", "graphml", "--out-edges", path_str(&xml)]);
    let text = fs::read_to_string(&xml).unwrap();
    assert!(text.contains(r#"<graph id="G" edgedefault="directed">"#));
    assert_eq!(text.matches("<node ").count(), 1000);

    let dot = dir.path().join("g.dot");
    ok(&["generate", "--config", path_str(&cfg), "--format", "dot", "--out-edges", path_str(&dot)]);
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph G {\n"));

    // Stats of the exported graph match those computed at generation time.
    let (edges, nodes) = (dir.path().join("e.csv"), dir.path().join("n.csv"));
    let generated = ok(&[
        "generate",
        "--config",
        path_str(&cfg),
        "--out-edges",
        path_str(&edges),
        "--out-nodes",
        path_str(&nodes),
        "--out-stats",
        path_str(&dir.path().join("s.json")),
    ]);
    assert!(generated.is_empty());
    let before: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    let after: serde_json::Value = serde_json::from_str(&ok(&[
        "stats",
        "--config",
        path_str(&cfg),
        "--edges",
        path_str(&edges),
        "--nodes",
        path_str(&nodes),
    ]))
    .unwrap();
    for key in ["rho_hat", "deviation", "p_hat", "q_hat", "edges_after"] {
        assert_eq!(before[key], after[key], "{key}");
    }
}

#[test]
fn variant_generate_labels_out_out() {
    let cfg = config("diagonal_out_out.toml");
    let doc: serde_json::Value = serde_json::from_str(&ok(&["variant-generate", "--config", path_str(&cfg)])).unwrap();
    assert_eq!(doc["edge_type"], "out_out");
    assert_eq!(doc["accepted"], true);

    let dir = tempfile::tempdir().unwrap();
    let xml = dir.path().join("v.graphml");
    ok(&["variant-generate", "--config", path_str(&cfg), "--format", "graphml", "--out-edges", path_str(&xml)]);
    let text = fs::read_to_string(&xml).unwrap();
    // Out-degrees in the diagonal instance are 0, 1, 2 or 4 after corrections.
    assert!(text.contains(r#"<data key="etype">4,"#));
}

#[test]
fn calibrate_reports_bounds_and_weight() {
    let cfg = config("diagonal_rho_0.8.toml");
    let stdout = ok(&["calibrate", "--config", path_str(&cfg), "--rho", "0"]);
    let value = |key: &str| -> f64 {
        stdout.lines().find_map(|l| l.strip_prefix(&format!("{key} = "))).unwrap().parse().unwrap()
    };
    assert!((value("rho_min") + 0.5).abs() < 1e-9);
    assert!((value("rho_max") - 1.0).abs() < 1e-9);
    assert!((value("lambda") - 2.0 / 3.0).abs() < 1e-9);
    assert!(value("rho_achieved").abs() < 1e-9);
}

#[test]
fn sweep_writes_one_row_per_run() {
    let cfg = config("diagonal_rho_0.8.toml");
    let stdout = ok(&["sweep", "--config", path_str(&cfg), "--sizes", "1000", "--reps", "1"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "n,rep,seed,rho_hat,deviation,accepted,runtime_seconds");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1000,0,"));

    let two = ok(&["sweep", "--config", path_str(&cfg), "--sizes", "1000,2000", "--reps", "2"]);
    assert_eq!(two.lines().count(), 5);
}

#[test]
fn errors_exit_non_zero_with_a_prefix() {
    let cfg = config("diagonal_rho_0.8.toml");
    for args in [
        vec!["generate", "--config", "/nonexistent/run.toml"],
        vec!["generate", "--config", path_str(&cfg), "--rho", "1.5"],
        vec!["variant-generate", "--config", path_str(&cfg)],
        vec!["sweep", "--config", path_str(&cfg), "--sizes", "10"],
    ] {
        let out = acgraph(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.starts_with("acgraph: "), "{args:?}: {stderr}");
    }
    // Usage errors come from the argument parser.
    assert!(!acgraph(&["generate"]).status.success());
}

/// Parses the GraphML export with networkx when it is installed.
#[test]
fn graphml_is_readable_by_networkx() {
    let probe = Command::new("python3").args(["-c", "import networkx"]).output();
    if !probe.map(|o| o.status.success()).unwrap_or(false) {
        eprintln!("networkx not available; skipping");
        return;
    }
    let cfg = config("diagonal_rho_0.8.toml");
    let dir = tempfile::tempdir().unwrap();
    let xml = dir.path().join("g.graphml");
    ok(&["generate", "--config", path_str(&cfg), "--format", "graphml", "--out-edges", path_str(&xml)]);
    let script = "import sys, networkx as nx\ng = nx.read_graphml(sys.argv[1])\nprint(g.is_directed(), g.number_of_nodes())";
    let out = Command::new("python3").args(["-c", script, path_str(&xml)]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "True 1000");
}
