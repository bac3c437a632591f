//! Configuration files, graph export/import and the stats document.

pub mod config;
pub mod export;
pub mod stats;

pub use config::{load_config, load_config_with, parse_config, EdgeSource, Overrides, RunConfig};
pub use export::{export_graph, import_graph, read_edge_list, read_node_list, EdgeLabel, GraphFormat};
pub use stats::{write_stats, RunInfo, StatsDocument};
