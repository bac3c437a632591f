use serde::{Deserialize, Serialize};

/// Bi-degree of a node: `(in_degree, out_degree)`, written `(j, k)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeType {
    pub in_degree: usize,
    pub out_degree: usize,
}

impl NodeType {
    pub const fn new(in_degree: usize, out_degree: usize) -> Self {
        Self { in_degree, out_degree }
    }
}

/// Type of an edge `<v, w>`: out-degree of `v` and in-degree of `w`, written `(k, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeType {
    pub source_out: usize,
    pub target_in: usize,
}

impl EdgeType {
    pub const fn new(source_out: usize, target_in: usize) -> Self {
        Self { source_out, target_in }
    }
}

/// Directed multigraph on nodes `0..n` with per-node types. Self-loops and
/// parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiDigraph {
    node_types: Vec<NodeType>,
    edges: Vec<(usize, usize)>,
}

impl MultiDigraph {
    /// Takes node types as given; see [`MultiDigraph::realizes_node_types`].
    pub fn new(node_types: Vec<NodeType>, edges: Vec<(usize, usize)>) -> Self {
        Self { node_types, edges }
    }

    /// Node types derived from the edge list.
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let node_types = degrees(n, &edges);
        Self { node_types, edges }
    }

    /// `n` nodes of type `(0,1)`, `(1,0)`, `(0,0)`, ... joined by the single edge `<0, 1>`.
    ///
    /// # Panics
    ///
    /// If `n < 2`.
    pub fn fallback(n: usize) -> Self {
        assert!(n >= 2, "fallback graph needs at least two nodes");
        let mut node_types = vec![NodeType::default(); n];
        node_types[0] = NodeType::new(0, 1);
        node_types[1] = NodeType::new(1, 0);
        Self { node_types, edges: vec![(0, 1)] }
    }

    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_types(&self) -> &[NodeType] {
        &self.node_types
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(k_v, j_w)` for each edge `<v, w>`, read from the current node types.
    pub fn edge_types(&self) -> impl Iterator<Item = EdgeType> + '_ {
        self.edges.iter().map(|&(v, w)| {
            EdgeType::new(self.node_types[v].out_degree, self.node_types[w].in_degree)
        })
    }

    /// True iff every node has exactly `out_degree` outgoing and `in_degree`
    /// incoming edges.
    pub fn realizes_node_types(&self) -> bool {
        self.edges.iter().all(|&(v, w)| v < self.node_count() && w < self.node_count())
            && degrees(self.node_count(), &self.edges) == self.node_types
    }
}

fn degrees(n: usize, edges: &[(usize, usize)]) -> Vec<NodeType> {
    let mut types = vec![NodeType::default(); n];
    for &(v, w) in edges {
        types[v].out_degree += 1;
        types[w].in_degree += 1;
    }
    types
}
