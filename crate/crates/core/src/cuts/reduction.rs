//! Vertex cover instances encoded as dynamic trees.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{is_valid_name, DynamicTree, NodeId, Slot, Snapshot};

pub const MAX_BRUTE_FORCE_VERTICES: usize = 16;

/// Simple undirected graph; vertices keep their first-mention order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    vertices: Vec<String>,
    /// Sorted neighbour lists by vertex position.
    adjacency: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: expected `a b` or a single vertex, found {text:?}")]
    BadLine { line: usize, text: String },
    #[error("line {line}: self-loop on {vertex}")]
    SelfLoop { line: usize, vertex: String },
    #[error("line {line}: {name:?} is not a valid vertex name")]
    BadName { line: usize, name: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("{vertices} vertices exceed the brute force limit of {MAX_BRUTE_FORCE_VERTICES}")]
pub struct VertexCoverTooLarge {
    pub vertices: usize,
}

impl UndirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `name` if new and returns its position.
    pub fn add_vertex(&mut self, name: &str) -> usize {
        if let Some(i) = self.position(name) {
            return i;
        }
        self.vertices.push(name.to_string());
        self.adjacency.push(Vec::new());
        self.vertices.len() - 1
    }

    /// Adds an edge, ignoring duplicates. Panics on a self-loop.
    pub fn add_edge(&mut self, a: &str, b: &str) {
        assert_ne!(a, b, "self-loop");
        let (a, b) = (self.add_vertex(a), self.add_vertex(b));
        for (x, y) in [(a, b), (b, a)] {
            if let Err(pos) = self.adjacency[x].binary_search(&y) {
                self.adjacency[x].insert(pos, y);
            }
        }
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ns) in self.adjacency.iter().enumerate() {
            out.extend(ns.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    pub fn is_cover(&self, cover: &[usize]) -> bool {
        self.edges()
            .iter()
            .all(|(a, b)| cover.contains(a) || cover.contains(b))
    }
}

/// Reads one edge `a b` per line; a lone name declares an isolated vertex
/// and `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<UndirectedGraph, GraphError> {
    let mut g = UndirectedGraph::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        for w in &words {
            if !is_valid_name(w) {
                return Err(GraphError::BadName {
                    line,
                    name: w.to_string(),
                });
            }
        }
        match words.as_slice() {
            [] => {}
            [v] => {
                g.add_vertex(v);
            }
            [a, b] if a == b => {
                return Err(GraphError::SelfLoop {
                    line,
                    vertex: a.to_string(),
                })
            }
            [a, b] => g.add_edge(a, b),
            _ => {
                return Err(GraphError::BadLine {
                    line,
                    text: raw.to_string(),
                })
            }
        }
    }
    Ok(g)
}

fn in_node(v: &str) -> NodeId {
    NodeId::new(format!("{v}_in"))
}

fn out_node(v: &str) -> NodeId {
    NodeId::new(format!("{v}_out"))
}

/// Builds `n + 1` snapshots over the nodes `v_in`, `v_out`. Snapshot `i`
/// hangs `w_in` below `v_i_out` for every neighbour `w` of the `i`-th
/// vertex; the last snapshot hangs every `v_out` below its `v_in`. All other
/// nodes appear as isolated roots. The minimum number of temporal cuts that
/// makes the supergraph acyclic equals the minimum vertex cover size.
pub fn reduce_vertex_cover(g: &UndirectedGraph) -> DynamicTree {
    let all: Vec<NodeId> = g
        .vertices()
        .iter()
        .flat_map(|v| [in_node(v), out_node(v)])
        .collect();
    let n = g.vertex_count();
    let mut snapshots = Vec::with_capacity(n + 1);
    for (i, v) in g.vertices().iter().enumerate() {
        let hub = out_node(v);
        let kids: Vec<NodeId> = g
            .neighbours(i)
            .iter()
            .map(|&w| in_node(&g.vertices()[w]))
            .collect();
        let roots = all.iter().filter(|x| !kids.contains(x)).cloned().collect();
        let mut children = BTreeMap::new();
        if !kids.is_empty() {
            children.insert(hub, kids.into_iter().map(Slot::Occupied).collect());
        }
        snapshots.push(Snapshot::new(
            i + 1,
            2.0 * i as f64,
            roots,
            children,
            BTreeMap::new(),
        ));
    }
    let roots = g.vertices().iter().map(|v| in_node(v)).collect();
    let children = g
        .vertices()
        .iter()
        .map(|v| (in_node(v), vec![Slot::Occupied(out_node(v))]))
        .collect();
    snapshots.push(Snapshot::new(
        n + 1,
        2.0 * n as f64,
        roots,
        children,
        BTreeMap::new(),
    ));
    DynamicTree::new(snapshots).expect("reduction snapshots are valid forests")
}

/// Minimum vertex cover by enumeration; the first minimum set in bitmask
/// order is returned as sorted vertex positions.
pub fn brute_force_vertex_cover(g: &UndirectedGraph) -> Result<Vec<usize>, VertexCoverTooLarge> {
    let n = g.vertex_count();
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(VertexCoverTooLarge { vertices: n });
    }
    let edges: Vec<u32> = g
        .edges()
        .iter()
        .map(|&(a, b)| (1u32 << a) | (1u32 << b))
        .collect();
    let best = (0u32..1 << n)
        .filter(|&m| edges.iter().all(|&e| m & e != 0))
        .min_by_key(|m| m.count_ones())
        .expect("the full vertex set is a cover");
    Ok((0..n).filter(|&v| best & (1 << v) != 0).collect())
}
