//! Temporal cuts: renaming a node in every snapshot after some index so that
//! the supergraph loses the edges that tied its history together.
//!
//! [`greedy_acyclic_cuts`] is the incremental heuristic used by the layout
//! pipeline; [`exact_min_cuts`] is an exhaustive solver for small instances;
//! [`reduce_vertex_cover`] builds the instances that tie minimum cut count to
//! minimum vertex cover size.

mod exact;
mod reduction;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{Cut, CutSet, DynamicTree, NodeId};

pub use exact::{exact_min_cuts, ExactError, ExactOptions, ExactSolution, DEFAULT_CANDIDATE_LIMIT};
pub use reduction::{
    brute_force_vertex_cover, parse_edge_list, reduce_vertex_cover, GraphError, UndirectedGraph,
    VertexCoverTooLarge, MAX_BRUTE_FORCE_VERTICES,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("cut index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("node {0} does not occur in the dynamic tree")]
    UnknownNode(NodeId),
}

/// Which endpoint of a cycle-closing edge the greedy heuristic renames.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CutSide {
    /// The child `w` of the offending edge `(v, w)`.
    #[default]
    Head,
    /// The parent `v`. Falls back to also cutting `w` when renaming `v`
    /// alone leaves the cycle in place.
    Tail,
}

/// Smallest generation not used by any node called `name`.
fn fresh_generation(t: &DynamicTree, name: &str) -> u32 {
    t.nodes()
        .iter()
        .filter(|n| n.name() == name)
        .map(NodeId::generation)
        .max()
        .map_or(0, |g| g + 1)
}

/// Renames `n` to a fresh generation in snapshots `after_index + 1 ..= k`.
///
/// `after_index` must lie in `1..k`. If `n` does not occur after the cut the
/// tree is returned unchanged (the cut is still reported).
pub fn apply_temporal_cut(
    t: &DynamicTree,
    n: &NodeId,
    after_index: usize,
) -> Result<(DynamicTree, Cut), CutError> {
    let k = t.len();
    if after_index < 1 || after_index >= k {
        return Err(CutError::IndexOutOfRange {
            index: after_index,
            max: k.saturating_sub(1),
        });
    }
    if !t.snapshots().iter().any(|s| s.contains(n)) {
        return Err(CutError::UnknownNode(n.clone()));
    }
    let renamed_to = NodeId::with_generation(n.name(), fresh_generation(t, n.name()));
    let mut out = t.clone();
    for j in after_index + 1..=k {
        let s = t.snapshot(j);
        if s.contains(n) {
            out.replace_snapshot(j, s.renamed(n, &renamed_to));
        }
    }
    Ok((
        out,
        Cut {
            node: n.clone(),
            after_index,
            renamed_to,
        },
    ))
}

/// Replays `cuts` in order on `t`.
pub fn replay_cuts(t: &DynamicTree, cuts: &[Cut]) -> Result<(DynamicTree, CutSet), CutError> {
    let mut builder = CutSetBuilder::new(t.clone());
    for c in cuts {
        builder.cut(&c.node, c.after_index)?;
    }
    Ok(builder.finish())
}

/// Applies cuts one by one while tracking which original node each fresh
/// identity stands for.
pub(crate) struct CutSetBuilder {
    tree: DynamicTree,
    cuts: Vec<Cut>,
    origin: BTreeMap<NodeId, NodeId>,
}

impl CutSetBuilder {
    pub(crate) fn new(tree: DynamicTree) -> Self {
        CutSetBuilder {
            tree,
            cuts: Vec::new(),
            origin: BTreeMap::new(),
        }
    }

    pub(crate) fn tree(&self) -> &DynamicTree {
        &self.tree
    }

    pub(crate) fn cut(&mut self, n: &NodeId, after_index: usize) -> Result<NodeId, CutError> {
        let (tree, cut) = apply_temporal_cut(&self.tree, n, after_index)?;
        let root = self.origin.get(n).cloned().unwrap_or_else(|| n.clone());
        self.origin.insert(cut.renamed_to.clone(), root);
        let fresh = cut.renamed_to.clone();
        self.tree = tree;
        self.cuts.push(cut);
        Ok(fresh)
    }

    pub(crate) fn finish(self) -> (DynamicTree, CutSet) {
        let mut renames = BTreeMap::new();
        for s in self.tree.snapshots() {
            for n in s.preorder() {
                if let Some(orig) = self.origin.get(&n) {
                    renames.insert((orig.clone(), s.index()), n);
                }
            }
        }
        (
            self.tree,
            CutSet {
                cuts: self.cuts,
                renames,
            },
        )
    }
}

/// Accumulating digraph used by the greedy scan.
#[derive(Default)]
struct Accumulated {
    succ: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl Accumulated {
    fn add(&mut self, p: &NodeId, c: &NodeId) {
        self.succ.entry(p.clone()).or_default().insert(c.clone());
    }

    /// Is `to` reachable from `from` using `self` plus `extra` edges?
    fn reaches(&self, extra: &Accumulated, from: &NodeId, to: &NodeId) -> bool {
        let mut seen = BTreeSet::from([from]);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                return true;
            }
            for next in [self.succ.get(v), extra.succ.get(v)].into_iter().flatten() {
                for w in next {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        false
    }

    fn rename(&mut self, from: &NodeId, to: &NodeId) {
        if let Some(out) = self.succ.remove(from) {
            self.succ.insert(to.clone(), out);
        }
        for out in self.succ.values_mut() {
            if out.remove(from) {
                out.insert(to.clone());
            }
        }
    }

    fn absorb(&mut self, other: Accumulated) {
        for (p, cs) in other.succ {
            self.succ.entry(p).or_default().extend(cs);
        }
    }
}

/// Scans snapshots in order and their edges in written order, adding each
/// edge to a growing supergraph. An edge `(v, w)` that would close a cycle
/// triggers a cut of `w` (or `v`, see [`CutSide`]) just before the current
/// snapshot. The returned tree always has an acyclic supergraph.
pub fn greedy_acyclic_cuts(t: &DynamicTree, side: CutSide) -> (DynamicTree, CutSet) {
    let mut builder = CutSetBuilder::new(t.clone());
    let mut done = Accumulated::default();
    for i in 1..=t.len() {
        let mut current = Accumulated::default();
        // Edges are read from the input snapshot; identities renamed earlier
        // in this pass are looked up here.
        let mut rename: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let edges = builder.tree().snapshot(i).edges();
        for (v0, w0) in edges {
            let mut v = rename.get(&v0).cloned().unwrap_or_else(|| v0.clone());
            let mut w = rename.get(&w0).cloned().unwrap_or_else(|| w0.clone());
            if done.reaches(&current, &w, &v) {
                debug_assert!(i > 1, "a single forest cannot close a cycle");
                if side == CutSide::Tail {
                    let fresh = builder.cut(&v, i - 1).expect("v occurs in snapshot i");
                    current.rename(&v, &fresh);
                    rename.insert(v0, fresh.clone());
                    v = fresh;
                }
                if side == CutSide::Head || done.reaches(&current, &w, &v) {
                    let fresh = builder.cut(&w, i - 1).expect("w occurs in snapshot i");
                    current.rename(&w, &fresh);
                    rename.insert(w0, fresh.clone());
                    w = fresh;
                }
            }
            current.add(&v, &w);
        }
        done.absorb(current);
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_document;
    use crate::supergraph::{build_supergraph, is_acyclic};

    const FIG3: &str = include_str!("../../fixtures/fig3.dtree");
    const FIG1: &str = include_str!("../../fixtures/fig1.dtree");

    fn id(s: &str) -> NodeId {
        NodeId::new(s)
    }

    #[test]
    fn cut_renames_only_later_snapshots() {
        let t = parse_document(FIG3).unwrap();
        let (cut, rec) = apply_temporal_cut(&t, &id("a"), 1).unwrap();
        assert_eq!(rec.renamed_to, NodeId::with_generation("a", 1));
        assert_eq!(cut.snapshot(1), t.snapshot(1));
        for j in 2..=3 {
            assert!(cut.snapshot(j).contains(&rec.renamed_to));
            assert!(!cut.snapshot(j).contains(&id("a")));
        }
    }

    #[test]
    fn cut_outside_scope_changes_nothing() {
        let t = parse_document(FIG1).unwrap();
        // 12 only lives in snapshot 1
        let (cut, _) = apply_temporal_cut(&t, &id("12"), 2).unwrap();
        assert_eq!(cut, t);
    }

    #[test]
    fn cut_errors() {
        let t = parse_document(FIG1).unwrap();
        assert_eq!(
            apply_temporal_cut(&t, &id("10"), 4),
            Err(CutError::IndexOutOfRange { index: 4, max: 3 })
        );
        assert_eq!(
            apply_temporal_cut(&t, &id("99"), 1),
            Err(CutError::UnknownNode(id("99")))
        );
    }

    #[test]
    fn cutting_everything_everywhere_disconnects_snapshots() {
        let t = parse_document(FIG3).unwrap();
        let mut cur = t.clone();
        for i in 1..t.len() {
            for n in t.nodes() {
                let current = cur
                    .snapshot(i + 1)
                    .preorder()
                    .into_iter()
                    .find(|m| m.name() == n.name());
                if let Some(m) = current {
                    cur = apply_temporal_cut(&cur, &m, i).unwrap().0;
                }
            }
        }
        let g = build_supergraph(&cur);
        assert!(is_acyclic(&g));
        for (i, s) in cur.snapshots().iter().enumerate() {
            for o in &cur.snapshots()[i + 1..] {
                assert!(s.preorder().iter().all(|n| !o.contains(n)));
            }
        }
    }

    #[test]
    fn greedy_on_acyclic_input_is_identity() {
        let t = parse_document(FIG1).unwrap();
        let (out, cuts) = greedy_acyclic_cuts(&t, CutSide::Head);
        assert!(cuts.is_empty());
        assert_eq!(out, t);
    }

    #[test]
    fn greedy_fig3_cuts_at_the_third_snapshot() {
        let t = parse_document(FIG3).unwrap();
        for side in [CutSide::Head, CutSide::Tail] {
            let (out, cuts) = greedy_acyclic_cuts(&t, side);
            assert!(is_acyclic(&build_supergraph(&out)));
            assert!(cuts.cuts.iter().all(|c| c.after_index == 2));
            let (replayed, again) = replay_cuts(&t, &cuts.cuts).unwrap();
            assert_eq!(replayed, out);
            assert_eq!(again, cuts);
        }
    }

    #[test]
    fn renames_track_originals() {
        let t = parse_document(FIG3).unwrap();
        let (out, cuts) = greedy_acyclic_cuts(&t, CutSide::Head);
        for ((orig, j), now) in &cuts.renames {
            assert_eq!(now.name(), orig.name());
            assert!(out.snapshot(*j).contains(now));
        }
        assert_eq!(cuts.resolve(&id("a"), 1), id("a"));
        assert_eq!(cuts.resolve(&id("a"), 3), NodeId::with_generation("a", 1));
    }
}
