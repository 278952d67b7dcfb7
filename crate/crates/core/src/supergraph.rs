//! Union digraph of all snapshots, with acyclicity and topological order.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::model::{DynamicTree, NodeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Supergraph {
    pub vertices: BTreeSet<NodeId>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
    /// Snapshot indices contributing each edge.
    pub provenance: BTreeMap<(NodeId, NodeId), BTreeSet<usize>>,
    /// Index of the first snapshot containing each vertex.
    pub first_seen: BTreeMap<NodeId, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("supergraph has a cycle through {}", display_cycle(.cycle))]
pub struct CycleError {
    /// Vertices of one directed cycle, each with an edge to the next and the
    /// last back to the first.
    pub cycle: Vec<NodeId>,
}

fn display_cycle(c: &[NodeId]) -> String {
    c.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" -> ")
}

pub fn build_supergraph(t: &DynamicTree) -> Supergraph {
    let mut g = Supergraph {
        vertices: BTreeSet::new(),
        edges: BTreeSet::new(),
        provenance: BTreeMap::new(),
        first_seen: BTreeMap::new(),
    };
    for s in t.snapshots() {
        for n in s.preorder() {
            g.first_seen.entry(n.clone()).or_insert(s.index());
            g.vertices.insert(n);
        }
        for e in s.edges() {
            g.provenance.entry(e.clone()).or_default().insert(s.index());
            g.edges.insert(e);
        }
    }
    g
}

impl Supergraph {
    pub fn successors(&self) -> BTreeMap<&NodeId, Vec<&NodeId>> {
        let mut out: BTreeMap<&NodeId, Vec<&NodeId>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (p, c) in &self.edges {
            out.get_mut(p).expect("edge endpoint is a vertex").push(c);
        }
        out
    }

    /// Some directed cycle, if any exists.
    pub fn find_cycle(&self) -> Option<Vec<NodeId>> {
        let succ = self.successors();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<&NodeId, u8> = BTreeMap::new();
        for start in &self.vertices {
            if state.get(start).copied().unwrap_or(0) != 0 {
                continue;
            }
            let mut stack: Vec<(&NodeId, usize)> = vec![(start, 0)];
            state.insert(start, 1);
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                let out = &succ[v];
                if *next < out.len() {
                    let w = out[*next];
                    *next += 1;
                    match state.get(w).copied().unwrap_or(0) {
                        0 => {
                            state.insert(w, 1);
                            stack.push((w, 0));
                        }
                        1 => {
                            let from = stack.iter().position(|&(u, _)| u == w).unwrap();
                            return Some(stack[from..].iter().map(|(u, _)| (*u).clone()).collect());
                        }
                        _ => {}
                    }
                } else {
                    state.insert(v, 2);
                    stack.pop();
                }
            }
        }
        None
    }

    /// Vertices lying on at least one directed cycle (members of nontrivial
    /// strongly connected components).
    pub fn cyclic_vertices(&self) -> BTreeSet<NodeId> {
        let succ = self.successors();
        let mut pred: BTreeMap<&NodeId, Vec<&NodeId>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (p, c) in &self.edges {
            pred.get_mut(c).unwrap().push(p);
        }
        // Kosaraju: finish order on the graph, then sweep the transpose.
        let mut order = Vec::new();
        let mut seen = BTreeSet::new();
        for start in &self.vertices {
            if !seen.insert(start) {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if let Some(&w) = succ[v].get(*next) {
                    *next += 1;
                    if seen.insert(w) {
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut assigned = BTreeSet::new();
        let mut out = BTreeSet::new();
        for &root in order.iter().rev() {
            if !assigned.insert(root) {
                continue;
            }
            let mut comp = vec![root];
            let mut i = 0;
            while i < comp.len() {
                for &p in &pred[comp[i]] {
                    if assigned.insert(p) {
                        comp.push(p);
                    }
                }
                i += 1;
            }
            let self_loop = comp.len() == 1 && self.edges.contains(&(root.clone(), root.clone()));
            if comp.len() > 1 || self_loop {
                out.extend(comp.into_iter().cloned());
            }
        }
        out
    }
}

pub fn is_acyclic(g: &Supergraph) -> bool {
    g.find_cycle().is_none()
}

/// Children before parents. Among ready vertices the one seen earliest wins,
/// then the smallest `(name, generation)`.
pub fn topological_order(g: &Supergraph) -> Result<Vec<NodeId>, CycleError> {
    let mut pending: BTreeMap<&NodeId, usize> = g.vertices.iter().map(|v| (v, 0)).collect();
    let mut parents: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for (p, c) in &g.edges {
        *pending.get_mut(p).unwrap() += 1;
        parents.entry(c).or_default().push(p);
    }
    let key = |v: &NodeId| {
        Reverse((
            g.first_seen.get(v).copied().unwrap_or(usize::MAX),
            v.clone(),
        ))
    };
    let mut ready: BinaryHeap<_> = pending
        .iter()
        .filter(|(_, &n)| n == 0)
        .map(|(v, _)| key(v))
        .collect();
    let mut order = Vec::with_capacity(g.vertices.len());
    while let Some(Reverse((_, v))) = ready.pop() {
        for &p in parents.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            let n = pending.get_mut(p).unwrap();
            *n -= 1;
            if *n == 0 {
                ready.push(key(p));
            }
        }
        order.push(v);
    }
    if order.len() == g.vertices.len() {
        Ok(order)
    } else {
        Err(CycleError {
            cycle: g
                .find_cycle()
                .expect("unfinished topological sort implies a cycle"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_document;

    fn id(s: &str) -> NodeId {
        NodeId::new(s)
    }

    #[test]
    fn single_snapshot_is_its_own_supergraph() {
        let t = parse_document("{[when=1] a -> {b, c -> d}}").unwrap();
        let g = build_supergraph(&t);
        assert_eq!(g.vertices.len(), 4);
        let edges: BTreeSet<_> = t.snapshot(1).edges().into_iter().collect();
        assert_eq!(g.edges, edges);
        assert!(g
            .provenance
            .values()
            .all(|p| p.len() == 1 && p.contains(&1)));
    }

    #[test]
    fn chain_order_is_unique() {
        let t = parse_document("{[when=1] a -> b -> c}").unwrap();
        let order = topological_order(&build_supergraph(&t)).unwrap();
        assert_eq!(order, vec![id("c"), id("b"), id("a")]);
    }

    #[test]
    fn two_cycle_reported() {
        let t = parse_document("{[when=1] a -> b} {[when=2] b -> a}").unwrap();
        let g = build_supergraph(&t);
        assert!(!is_acyclic(&g));
        let err = topological_order(&g).unwrap_err();
        let mut c = err.cycle.clone();
        c.sort();
        assert_eq!(c, vec![id("a"), id("b")]);
        assert_eq!(
            g.cyclic_vertices(),
            [id("a"), id("b")].into_iter().collect()
        );
    }

    #[test]
    fn empty_graph_is_acyclic() {
        let g = Supergraph {
            vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
            provenance: BTreeMap::new(),
            first_seen: BTreeMap::new(),
        };
        assert!(is_acyclic(&g));
        assert_eq!(topological_order(&g).unwrap(), vec![]);
    }

    #[test]
    fn tie_break_prefers_first_appearance() {
        let t = parse_document("{[when=1] z} {[when=2] z, a}").unwrap();
        let order = topological_order(&build_supergraph(&t)).unwrap();
        assert_eq!(order, vec![id("z"), id("a")]);
    }
}
