use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use acgraph::erasure::erase;
use acgraph::io::export::{write_node_list, EdgeLabel};
use acgraph::io::{
    export_graph, import_graph, load_config, load_config_with, read_edge_list, read_node_list, EdgeSource,
    GraphFormat, Overrides,
};
use acgraph::{generate_seeded, GenerateOptions, OnReject};

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn shipped_configs_load() {
    let cfg = load_config(&shipped("diagonal_rho_0.8.toml")).unwrap();
    assert_eq!((cfg.n, cfg.seed, cfg.erase), (1000, 42, true));
    assert_eq!(cfg.on_reject, OnReject::Retry { max_attempts: 1000 });
    let EdgeSource::Rho { rho, lambda, .. } = &cfg.edges else { panic!("expected a rho source") };
    // Bounds for p = 1/2 are (-1/2, 1): lambda = (1 - 0.8) / 1.5.
    assert_eq!(*rho, 0.8);
    assert!((lambda - 0.2 / 1.5).abs() < 1e-12);

    let variant = load_config(&shipped("diagonal_out_out.toml")).unwrap();
    assert!(variant.edges.out_out().is_some());
    assert!(variant.main_edge_types().is_err());
}

#[test]
fn overrides_replace_file_values() {
    let overrides = Overrides { seed: Some(9), retry: Some(3), erase: false, rho: Some(0.0) };
    let cfg = load_config_with(&shipped("diagonal_rho_0.8.toml"), &overrides).unwrap();
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.on_reject, OnReject::Retry { max_attempts: 3 });
    let EdgeSource::Rho { rho, .. } = cfg.edges else { panic!("expected a rho source") };
    assert_eq!(rho, 0.0);
}

#[test]
fn csv_files_round_trip_and_exports_are_deterministic() {
    let cfg = load_config(&shipped("diagonal_rho_0.8.toml")).unwrap();
    let q = cfg.main_edge_types().unwrap();
    let opts = GenerateOptions { n: cfg.n, delta: cfg.delta, on_reject: cfg.on_reject };
    let g = generate_seeded(&cfg.p, q, &opts, cfg.seed).unwrap().graph;
    let (erased, _) = erase(&g);

    let dir = tempfile::tempdir().unwrap();
    let (edges_path, nodes_path) = (dir.path().join("edges.csv"), dir.path().join("nodes.csv"));
    for graph in [&g, &erased] {
        let mut buf = Vec::new();
        export_graph(graph, GraphFormat::Csv, EdgeLabel::OutIn, &mut buf).unwrap();
        fs::write(&edges_path, &buf).unwrap();
        let mut buf = Vec::new();
        write_node_list(graph, &mut buf).unwrap();
        fs::write(&nodes_path, &buf).unwrap();

        let edges = read_edge_list(BufReader::new(fs::File::open(&edges_path).unwrap())).unwrap();
        let nodes = read_node_list(BufReader::new(fs::File::open(&nodes_path).unwrap())).unwrap();
        assert_eq!(&import_graph(edges, Some(nodes)).unwrap(), graph);
    }

    let again = generate_seeded(&cfg.p, q, &opts, cfg.seed).unwrap().graph;
    for format in [GraphFormat::Csv, GraphFormat::Graphml, GraphFormat::Dot] {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        export_graph(&g, format, EdgeLabel::OutIn, &mut a).unwrap();
        export_graph(&again, format, EdgeLabel::OutIn, &mut b).unwrap();
        assert_eq!(a, b, "{format} export differs between identical runs");
    }
}

#[test]
fn bad_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "n = 1000\nrho = 0.5\n[p]\nmax_in = 4\nmax_out = \"four\"\nrows = []\n").unwrap();
    let message = load_config(&path).unwrap_err().to_string();
    assert!(message.contains("line 5"), "{message}");
}
