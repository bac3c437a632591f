//! Graph export to CSV, GraphML and DOT, and CSV import.
//!
//! All writers emit UTF-8 with LF line endings and depend only on the graph,
//! so identical graphs give identical bytes. Nodes are 0-based.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{MultiDigraph, NodeType};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    /// Edge list `source,target` (and a separate node list).
    #[default]
    Csv,
    Graphml,
    Dot,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(GraphFormat::Csv),
            "graphml" => Ok(GraphFormat::Graphml),
            "dot" => Ok(GraphFormat::Dot),
            other => Err(Error::Validation(format!("unknown graph format `{other}` (expected csv, graphml or dot)"))),
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphFormat::Csv => "csv",
            GraphFormat::Graphml => "graphml",
            GraphFormat::Dot => "dot",
        })
    }
}

/// Which degrees make up the `etype` edge attribute.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EdgeLabel {
    /// `"k,j"`: source out-degree, target in-degree.
    #[default]
    OutIn,
    /// `"k,k'"`: source out-degree, target out-degree.
    OutOut,
}

impl EdgeLabel {
    fn of(self, g: &MultiDigraph, v: usize, w: usize) -> (usize, usize) {
        let t = g.node_types();
        match self {
            EdgeLabel::OutIn => (t[v].out_degree, t[w].in_degree),
            EdgeLabel::OutOut => (t[v].out_degree, t[w].out_degree),
        }
    }
}

pub fn write_edge_list<W: Write + ?Sized>(g: &MultiDigraph, out: &mut W) -> Result<()> {
    writeln!(out, "source,target")?;
    for &(v, w) in g.edges() {
        writeln!(out, "{v},{w}")?;
    }
    Ok(())
}

pub fn write_node_list<W: Write + ?Sized>(g: &MultiDigraph, out: &mut W) -> Result<()> {
    writeln!(out, "node,in_degree,out_degree")?;
    for (v, t) in g.node_types().iter().enumerate() {
        writeln!(out, "{v},{},{}", t.in_degree, t.out_degree)?;
    }
    Ok(())
}

pub fn write_graphml<W: Write + ?Sized>(g: &MultiDigraph, label: EdgeLabel, out: &mut W) -> Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns" xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance" xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">"#
    )?;
    writeln!(out, r#"  <key id="j" for="node" attr.name="j" attr.type="int"/>"#)?;
    writeln!(out, r#"  <key id="k" for="node" attr.name="k" attr.type="int"/>"#)?;
    writeln!(out, r#"  <key id="etype" for="edge" attr.name="etype" attr.type="string"/>"#)?;
    writeln!(out, r#"  <graph id="G" edgedefault="directed">"#)?;
    for (v, t) in g.node_types().iter().enumerate() {
        writeln!(
            out,
            r#"    <node id="n{v}"><data key="j">{}</data><data key="k">{}</data></node>"#,
            t.in_degree, t.out_degree
        )?;
    }
    for (i, &(v, w)) in g.edges().iter().enumerate() {
        let (a, b) = label.of(g, v, w);
        writeln!(out, r#"    <edge id="e{i}" source="n{v}" target="n{w}"><data key="etype">{a},{b}</data></edge>"#)?;
    }
    writeln!(out, "  </graph>")?;
    writeln!(out, "</graphml>")?;
    Ok(())
}

pub fn write_dot<W: Write + ?Sized>(g: &MultiDigraph, label: EdgeLabel, out: &mut W) -> Result<()> {
    writeln!(out, "digraph G {{")?;
    for (v, t) in g.node_types().iter().enumerate() {
        writeln!(out, "  {v} [j={}, k={}];", t.in_degree, t.out_degree)?;
    }
    for &(v, w) in g.edges() {
        let (a, b) = label.of(g, v, w);
        writeln!(out, "  {v} -> {w} [etype=\"{a},{b}\"];")?;
    }
    writeln!(out, "}}")?;
    Ok(())
}

/// Write the graph itself in `format`. For CSV this is the edge list; the
/// node list is written separately with [`write_node_list`].
pub fn export_graph<W: Write + ?Sized>(g: &MultiDigraph, format: GraphFormat, label: EdgeLabel, out: &mut W) -> Result<()> {
    match format {
        GraphFormat::Csv => write_edge_list(g, out),
        GraphFormat::Graphml => write_graphml(g, label, out),
        GraphFormat::Dot => write_dot(g, label, out),
    }
}

fn csv_reader<R: std::io::Read>(input: R, expected: &[&str]) -> Result<csv::Reader<R>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if headers.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse(format!("expected header `{}`, found `{}`", expected.join(","), headers.iter().collect::<Vec<_>>().join(","))));
    }
    Ok(reader)
}

fn field(record: &csv::StringRecord, i: usize) -> Result<usize> {
    let line = record.position().map_or(0, |p| p.line());
    record
        .get(i)
        .ok_or_else(|| Error::Parse(format!("line {line}: missing column {}", i + 1)))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("line {line}: {e}")))
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Vec<(usize, usize)>> {
    let mut reader = csv_reader(input, &["source", "target"])?;
    let mut edges = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        edges.push((field(&record, 0)?, field(&record, 1)?));
    }
    Ok(edges)
}

/// Node types in file order; the `node` column must count up from 0.
pub fn read_node_list<R: BufRead>(input: R) -> Result<Vec<NodeType>> {
    let mut reader = csv_reader(input, &["node", "in_degree", "out_degree"])?;
    let mut types = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let v = field(&record, 0)?;
        if v != types.len() {
            return Err(Error::Parse(format!("node {v} listed out of order (expected {})", types.len())));
        }
        types.push(NodeType::new(field(&record, 1)?, field(&record, 2)?));
    }
    Ok(types)
}

/// Rebuild a graph from an edge list and optionally a node list. Without a
/// node list, the node count is one past the largest index and degrees come
/// from the edges. With one, the listed degrees must match the edges.
pub fn import_graph(edges: Vec<(usize, usize)>, nodes: Option<Vec<NodeType>>) -> Result<MultiDigraph> {
    let Some(types) = nodes else {
        let n = edges.iter().map(|&(v, w)| v.max(w) + 1).max().unwrap_or(0);
        return Ok(MultiDigraph::from_edges(n, edges));
    };
    if let Some(&(v, w)) = edges.iter().find(|&&(v, w)| v.max(w) >= types.len()) {
        return Err(Error::Validation(format!("edge ({v},{w}) refers to a node beyond the {} listed", types.len())));
    }
    let g = MultiDigraph::new(types, edges);
    if !g.realizes_node_types() {
        return Err(Error::Validation("node list degrees do not match the edge list".into()));
    }
    Ok(g)
}
