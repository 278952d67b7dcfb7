//! Synchronized tidy-tree layout of a dynamic tree.
//!
//! Nodes of the supergraph are placed children first. For a node `v` the
//! horizontal positions of its child slots are chosen once and shared by
//! every snapshot: the gap between slots `r - 1` and `r` is the largest gap
//! any single snapshot needs to keep child `r` clear of the children before
//! it. Because of this, a node keeps its offset to its parent across
//! snapshots whenever it keeps its parent and slot.

mod contour;
mod static_ref;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cuts::{greedy_acyclic_cuts, CutSide};
use crate::model::{CutSet, DynamicTree, LayoutParams, LayoutSequence, NodeId, Point, Snapshot};
use crate::supergraph::{build_supergraph, topological_order, CycleError};

use contour::{Contours, Naive, Pads, Threaded};

pub use static_ref::layout_static_reference;

/// Contour representation used while placing subtrees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ContourStrategy {
    /// Linked contours; total work linear in the input size.
    #[default]
    Threaded,
    /// Per-depth arrays copied on every merge.
    Naive,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LayoutOptions {
    pub strategy: ContourStrategy,
    /// Fail on a cyclic supergraph instead of cutting it.
    pub require_acyclic: bool,
    pub cut_side: CutSide,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LayoutStats {
    /// Contour entries touched by shifts, merges and distance queries.
    pub contour_steps: u64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LayoutError {
    #[error(transparent)]
    CyclicSupergraph(#[from] CycleError),
    #[error("layout parameters must be finite with positive separations")]
    InvalidParams,
}

/// Layout of a possibly cut dynamic tree.
#[derive(Clone, Debug, PartialEq)]
pub struct LayoutOutcome {
    /// The tree actually laid out, with cut nodes renamed.
    pub tree: DynamicTree,
    pub cuts: CutSet,
    pub layout: LayoutSequence,
    pub stats: LayoutStats,
}

/// Lays out `t`, cutting it first if its supergraph has a cycle. Frames are
/// keyed by the identities of the cut tree.
pub fn layout_dynamic_tree(
    t: &DynamicTree,
    p: &LayoutParams,
) -> Result<LayoutSequence, LayoutError> {
    layout_dynamic_tree_with(t, p, &LayoutOptions::default()).map(|o| o.layout)
}

pub fn layout_dynamic_tree_with(
    t: &DynamicTree,
    p: &LayoutParams,
    opts: &LayoutOptions,
) -> Result<LayoutOutcome, LayoutError> {
    if !p.is_valid() {
        return Err(LayoutError::InvalidParams);
    }
    let (tree, cuts) = if opts.require_acyclic {
        (t.clone(), CutSet::default())
    } else {
        greedy_acyclic_cuts(t, opts.cut_side)
    };
    let (layout, stats) = layout_acyclic(&tree, p, opts.strategy)?;
    Ok(LayoutOutcome {
        tree,
        cuts,
        layout,
        stats,
    })
}

/// Lays out a dynamic tree whose supergraph must already be acyclic.
pub fn layout_acyclic(
    t: &DynamicTree,
    p: &LayoutParams,
    strategy: ContourStrategy,
) -> Result<(LayoutSequence, LayoutStats), LayoutError> {
    if !p.is_valid() {
        return Err(LayoutError::InvalidParams);
    }
    match strategy {
        ContourStrategy::Threaded => Placer::new(t, p, Threaded::default())?.run(),
        ContourStrategy::Naive => Placer::new(t, p, Naive::default())?.run(),
    }
}

/// Slot positions shared by all snapshots, for every node with children
/// (and for the virtual root when some snapshot is a proper forest).
struct Placer<'a, K: Contours> {
    t: &'a DynamicTree,
    p: &'a LayoutParams,
    k: K,
    order: Vec<NodeId>,
    dense: BTreeMap<NodeId, usize>,
    /// contour[j][v]: contour of v's subtree in snapshot j, until consumed.
    contour: Vec<Vec<Option<K::C>>>,
    slots: Vec<Vec<f64>>,
    root_slots: Option<Vec<f64>>,
}

impl<'a, K: Contours> Placer<'a, K> {
    fn new(t: &'a DynamicTree, p: &'a LayoutParams, k: K) -> Result<Self, LayoutError> {
        let order = topological_order(&build_supergraph(t))?;
        let dense = order
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let n = order.len();
        let contour = t
            .snapshots()
            .iter()
            .map(|_| (0..n).map(|_| None).collect())
            .collect();
        Ok(Placer {
            t,
            p,
            k,
            order,
            dense,
            contour,
            slots: vec![Vec::new(); n],
            root_slots: None,
        })
    }

    fn pads(&self) -> Pads {
        Pads {
            sibling: self.p.sibling_sep,
            subtree: self.p.subtree_pad,
        }
    }

    /// Places the children given per snapshot as slot lists of dense ids;
    /// returns the centered slot positions and, per snapshot, the merged
    /// children contour in the centered frame.
    fn place(
        &mut self,
        kids: &[(usize, Vec<Option<usize>>)],
        bump: bool,
    ) -> (Vec<f64>, Vec<Option<K::C>>) {
        let mut m = kids.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
        if bump && m == 1 {
            m = 2;
        }
        let pads = self.pads();
        let mut pos = vec![0.0; m];
        let mut prefix: Vec<Option<K::C>> = kids.iter().map(|_| None).collect();
        for r in 0..m {
            if r > 0 {
                let mut gap = self.p.sibling_sep;
                for (q, (j, slots)) in kids.iter().enumerate() {
                    let (Some(Some(c)), Some(pre)) = (slots.get(r), prefix[q].as_ref()) else {
                        continue;
                    };
                    let child = self.contour[*j][*c]
                        .as_ref()
                        .expect("children are placed first");
                    let need = self.k.required_shift(pre, child, pads);
                    gap = gap.max(need - pos[r - 1]);
                }
                pos[r] = pos[r - 1] + gap;
            }
            for (q, (j, slots)) in kids.iter().enumerate() {
                let Some(Some(c)) = slots.get(r) else {
                    continue;
                };
                let mut child = self.contour[*j][*c]
                    .take()
                    .expect("each subtree has one parent");
                self.k.shift(&mut child, pos[r]);
                prefix[q] = Some(match prefix[q].take() {
                    None => child,
                    Some(pre) => self.k.merge(pre, child),
                });
            }
        }
        let half = pos.last().copied().unwrap_or(0.0) / 2.0;
        for x in &mut pos {
            *x -= half;
        }
        for c in prefix.iter_mut().flatten() {
            self.k.shift(c, -half);
        }
        (pos, prefix)
    }

    fn run(mut self) -> Result<(LayoutSequence, LayoutStats), LayoutError> {
        let mut present: Vec<Vec<usize>> = vec![Vec::new(); self.order.len()];
        for (j, s) in self.t.snapshots().iter().enumerate() {
            for n in s.preorder() {
                present[self.dense[&n]].push(j);
            }
        }
        for v in 0..self.order.len() {
            let node = self.order[v].clone();
            let kids: Vec<(usize, Vec<Option<usize>>)> = present[v]
                .iter()
                .map(|&j| {
                    let s = &self.t.snapshots()[j];
                    let slots = s
                        .slots(&node)
                        .iter()
                        .map(|x| x.node().map(|c| self.dense[c]))
                        .collect();
                    (j, slots)
                })
                .collect();
            let (pos, merged) = self.place(&kids, true);
            for ((j, _), children) in kids.iter().zip(merged) {
                let width = self.t.snapshots()[*j].extent(&node).width;
                let c = self.k.adopt(children, 0.0, width);
                self.contour[*j][v] = Some(c);
            }
            self.slots[v] = pos;
        }
        if self.t.snapshots().iter().any(|s| s.roots().len() > 1) {
            let kids: Vec<(usize, Vec<Option<usize>>)> = self
                .t
                .snapshots()
                .iter()
                .enumerate()
                .map(|(j, s)| (j, s.roots().iter().map(|r| Some(self.dense[r])).collect()))
                .collect();
            self.root_slots = Some(self.place(&kids, false).0);
        }
        let frames = self
            .t
            .snapshots()
            .iter()
            .map(|s| self.absolute(s))
            .collect();
        Ok((
            LayoutSequence {
                params: *self.p,
                frames,
            },
            LayoutStats {
                contour_steps: self.k.steps(),
            },
        ))
    }

    fn absolute(&self, s: &Snapshot) -> BTreeMap<NodeId, Point> {
        let mut out = BTreeMap::new();
        let mut stack: Vec<(&NodeId, f64, usize)> = s
            .roots()
            .iter()
            .enumerate()
            .rev()
            .map(|(r, n)| (n, self.root_slots.as_ref().map_or(0.0, |p| p[r]), 0))
            .collect();
        while let Some((n, x, d)) = stack.pop() {
            out.insert(
                n.clone(),
                Point {
                    x,
                    y: d as f64 * self.p.level_sep,
                },
            );
            let pos = &self.slots[self.dense[n]];
            for (r, c) in s.occupied_children(n).collect::<Vec<_>>().into_iter().rev() {
                stack.push((c, x + pos[r], d + 1));
            }
        }
        out
    }
}

/// Relative placement of one subtree in one snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct SubtreeFrame {
    /// Descendants (and the owner, at 0) with x relative to the owner.
    pub offsets: BTreeMap<NodeId, f64>,
    /// Per depth below the owner, the leftmost and rightmost extent.
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// A node's subtree as laid out in every snapshot containing it.
#[derive(Clone, Debug, PartialEq)]
pub struct SubtreeLayout {
    pub owner: NodeId,
    pub frames: BTreeMap<usize, SubtreeFrame>,
}

impl SubtreeLayout {
    /// Reads the subtree of `owner` out of a finished layout.
    pub fn from_layout(t: &DynamicTree, l: &LayoutSequence, owner: &NodeId) -> Self {
        let mut frames = BTreeMap::new();
        for s in t.snapshots() {
            let Some(origin) = l.get(s.index(), owner) else {
                continue;
            };
            let mut frame = SubtreeFrame {
                offsets: BTreeMap::new(),
                left: Vec::new(),
                right: Vec::new(),
            };
            let mut stack = vec![(owner, 0usize)];
            while let Some((n, d)) = stack.pop() {
                let x = l.get(s.index(), n).expect("layout covers the tree").x - origin.x;
                let w = s.extent(n).width / 2.0;
                frame.offsets.insert(n.clone(), x);
                if frame.left.len() <= d {
                    frame.left.push(x - w);
                    frame.right.push(x + w);
                } else {
                    frame.left[d] = frame.left[d].min(x - w);
                    frame.right[d] = frame.right[d].max(x + w);
                }
                stack.extend(s.occupied_children(n).map(|(_, c)| (c, d + 1)));
            }
            frames.insert(s.index(), frame);
        }
        SubtreeLayout {
            owner: owner.clone(),
            frames,
        }
    }

    /// A subtree layout with a single frame given by its contours.
    pub fn from_contours(owner: NodeId, j: usize, left: Vec<f64>, right: Vec<f64>) -> Self {
        assert_eq!(
            left.len(),
            right.len(),
            "contour sides must have equal depth"
        );
        SubtreeLayout {
            frames: BTreeMap::from([(
                j,
                SubtreeFrame {
                    offsets: BTreeMap::from([(owner.clone(), 0.0)]),
                    left,
                    right,
                },
            )]),
            owner,
        }
    }
}

/// Smallest horizontal distance from `left`'s owner to `right`'s owner in
/// snapshot `j` such that at every depth both reach, `right` clears `left`
/// by `pad`. Panics if either is absent from `j`.
pub fn min_horizontal_distance(
    left: &SubtreeLayout,
    right: &SubtreeLayout,
    j: usize,
    pad: f64,
) -> f64 {
    let a = &left.frames[&j];
    let b = &right.frames[&j];
    a.right
        .iter()
        .zip(&b.left)
        .map(|(r, l)| r + pad - l)
        .fold(f64::NEG_INFINITY, f64::max)
}
