//! Core domain types: node identities, snapshots, dynamic trees, layouts
//! and cut sets.
//!
//! A [`Snapshot`] is one rooted ordered forest whose child lists are made of
//! ordinal [`Slot`]s. A [`DynamicTree`] is a time-ordered, nonempty sequence
//! of snapshots sharing one node namespace: two occurrences of the same
//! [`NodeId`] in different snapshots denote the same logical node.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identity of a node: the name written in the input plus a generation that
/// is bumped every time a temporal cut renames the node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    name: String,
    generation: u32,
}

impl NodeId {
    /// Original (uncut) node with the given name.
    ///
    /// Panics if `name` is not a valid identifier; use [`NodeId::parse_name`]
    /// for fallible construction.
    pub fn new(name: impl Into<String>) -> Self {
        Self::with_generation(name, 0)
    }

    pub fn with_generation(name: impl Into<String>, generation: u32) -> Self {
        let name = name.into();
        assert!(is_valid_name(&name), "invalid node name {name:?}");
        NodeId { name, generation }
    }

    pub fn parse_name(name: &str) -> Option<Self> {
        is_valid_name(name).then(|| NodeId {
            name: name.to_owned(),
            generation: 0,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    /// The generation-0 identity this node descends from.
    pub fn base(&self) -> NodeId {
        NodeId {
            name: self.name.clone(),
            generation: 0,
        }
    }
}

/// Written as the name followed by one `'` per generation (`a`, `a'`, `a''`).
impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for _ in 0..self.generation {
            f.write_str("'")?;
        }
        Ok(())
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let trimmed = text.trim_end_matches('\'');
        let generation = (text.len() - trimmed.len()) as u32;
        if !is_valid_name(trimmed) {
            return Err(serde::de::Error::custom(format!(
                "invalid node id {text:?}"
            )));
        }
        Ok(NodeId {
            name: trimmed.to_owned(),
            generation,
        })
    }
}

/// Identifier characters accepted in node names.
pub fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '$')
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(is_name_char)
}

/// One ordinal child position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Occupied(NodeId),
    Empty,
}

impl Slot {
    pub fn node(&self) -> Option<&NodeId> {
        match self {
            Slot::Occupied(n) => Some(n),
            Slot::Empty => None,
        }
    }
}

/// Node size in layout units. Half the width enters contour distances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub width: f64,
    pub height: f64,
}

impl Default for Extent {
    fn default() -> Self {
        Extent {
            width: 1.0,
            height: 1.0,
        }
    }
}

/// Structural rule broken by a snapshot.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("node {0} has more than one parent")]
    DuplicateParent(NodeId),
    #[error("node {0} is its own ancestor")]
    CycleInSnapshot(NodeId),
    #[error("node {0} has children but is not part of the forest")]
    DanglingChild(NodeId),
    #[error("root {0} is listed twice")]
    DuplicateRoot(NodeId),
    #[error("name {0} occurs with two different generations in one snapshot")]
    AmbiguousName(String),
    #[error("snapshot has no roots")]
    EmptySnapshot,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ModelError {
    #[error("a dynamic tree needs at least one snapshot")]
    NoSnapshots,
    #[error("snapshot at position {position} carries index {index}")]
    BadIndex { position: usize, index: usize },
    #[error("snapshot {index}: time {time} does not increase strictly")]
    NonMonotonicTime { index: usize, time: f64 },
    #[error("snapshot {index}: time {time} is negative or not finite")]
    BadTime { index: usize, time: f64 },
    #[error("snapshot {index}: {source}")]
    Structure {
        index: usize,
        #[source]
        source: StructureError,
    },
}

/// One rooted ordered forest with a display time.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    index: usize,
    time: f64,
    roots: Vec<NodeId>,
    children: BTreeMap<NodeId, Vec<Slot>>,
    annotations: BTreeMap<NodeId, Extent>,
}

impl Snapshot {
    /// Builds a snapshot, normalizing slot lists (trailing empties are
    /// dropped, so are nodes left with no slots at all). Structure is not
    /// checked here; see [`validate`].
    pub fn new(
        index: usize,
        time: f64,
        roots: Vec<NodeId>,
        children: BTreeMap<NodeId, Vec<Slot>>,
        annotations: BTreeMap<NodeId, Extent>,
    ) -> Self {
        let children = children
            .into_iter()
            .filter_map(|(parent, mut slots)| {
                while matches!(slots.last(), Some(Slot::Empty)) {
                    slots.pop();
                }
                (!slots.is_empty()).then_some((parent, slots))
            })
            .collect();
        Snapshot {
            index,
            time,
            roots,
            children,
            annotations,
        }
    }

    /// 1-based position in the sequence.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Display time in seconds.
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    /// Child slots of `node`; empty for leaves and absent nodes.
    pub fn slots(&self, node: &NodeId) -> &[Slot] {
        self.children.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn children_map(&self) -> &BTreeMap<NodeId, Vec<Slot>> {
        &self.children
    }

    pub fn annotations(&self) -> &BTreeMap<NodeId, Extent> {
        &self.annotations
    }

    pub fn extent(&self, node: &NodeId) -> Extent {
        self.annotations.get(node).copied().unwrap_or_default()
    }

    /// Occupied children of `node` in slot order, with their 0-based slot.
    pub fn occupied_children<'a>(
        &'a self,
        node: &NodeId,
    ) -> impl Iterator<Item = (usize, &'a NodeId)> + 'a {
        self.slots(node)
            .iter()
            .enumerate()
            .filter_map(|(r, s)| s.node().map(|n| (r, n)))
    }

    /// All nodes in depth-first preorder, roots in order, children in slot
    /// order. Assumes a valid snapshot.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack: Vec<&NodeId> = self.roots.iter().rev().collect();
        while let Some(n) = stack.pop() {
            out.push(n.clone());
            let slots = self.slots(n);
            stack.extend(slots.iter().rev().filter_map(Slot::node));
        }
        out
    }

    /// Edges `(parent, child)` in depth-first slot order (the order in which
    /// they are written in the input).
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        let mut stack: Vec<(Option<&NodeId>, &NodeId)> =
            self.roots.iter().rev().map(|r| (None, r)).collect();
        while let Some((p, n)) = stack.pop() {
            if let Some(p) = p {
                out.push((p.clone(), n.clone()));
            }
            stack.extend(
                self.slots(n)
                    .iter()
                    .rev()
                    .filter_map(Slot::node)
                    .map(|c| (Some(n), c)),
            );
        }
        out
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    /// Replaces every occurrence of `from` (as root, parent, child or
    /// annotation key) by `to`.
    pub fn renamed(&self, from: &NodeId, to: &NodeId) -> Snapshot {
        let swap = |n: &NodeId| if n == from { to.clone() } else { n.clone() };
        Snapshot {
            index: self.index,
            time: self.time,
            roots: self.roots.iter().map(swap).collect(),
            children: self
                .children
                .iter()
                .map(|(p, slots)| {
                    let slots = slots
                        .iter()
                        .map(|s| match s {
                            Slot::Occupied(n) => Slot::Occupied(swap(n)),
                            Slot::Empty => Slot::Empty,
                        })
                        .collect();
                    (swap(p), slots)
                })
                .collect(),
            annotations: self
                .annotations
                .iter()
                .map(|(n, e)| (swap(n), *e))
                .collect(),
        }
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.roots.contains(node)
            || self.children.contains_key(node)
            || self
                .children
                .values()
                .any(|slots| slots.iter().any(|s| s.node() == Some(node)))
    }
}

/// Parent, slot and depth lookups for one snapshot.
#[derive(Clone, Debug)]
pub struct SnapshotIndex {
    /// child -> (parent, 0-based slot)
    pub parent: BTreeMap<NodeId, (NodeId, usize)>,
    pub depth: BTreeMap<NodeId, usize>,
    pub preorder: Vec<NodeId>,
}

impl SnapshotIndex {
    pub fn new(s: &Snapshot) -> Self {
        let preorder = s.preorder();
        let mut parent = BTreeMap::new();
        let mut depth = BTreeMap::new();
        for r in s.roots() {
            depth.insert(r.clone(), 0);
        }
        for n in &preorder {
            let d = depth[n];
            for (slot, c) in s.occupied_children(n) {
                parent.insert(c.clone(), (n.clone(), slot));
                depth.insert(c.clone(), d + 1);
            }
        }
        SnapshotIndex {
            parent,
            depth,
            preorder,
        }
    }

    pub fn contains(&self, n: &NodeId) -> bool {
        self.depth.contains_key(n)
    }
}

/// Checks the forest invariants of one snapshot.
pub fn validate(s: &Snapshot) -> Result<(), StructureError> {
    if s.roots.is_empty() {
        return Err(StructureError::EmptySnapshot);
    }
    let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
    let mut names: BTreeMap<&str, u32> = BTreeMap::new();
    fn note<'a>(names: &mut BTreeMap<&'a str, u32>, n: &'a NodeId) -> Result<(), StructureError> {
        match names.insert(n.name(), n.generation()) {
            Some(g) if g != n.generation() => Err(StructureError::AmbiguousName(n.name().into())),
            _ => Ok(()),
        }
    }
    let mut note_name = |n| note(&mut names, n);
    for r in &s.roots {
        if !seen.insert(r) {
            return Err(StructureError::DuplicateRoot(r.clone()));
        }
        note_name(r)?;
    }
    // Iterative DFS with an explicit "on path" set to tell cycles from
    // shared children.
    let mut on_path: BTreeSet<&NodeId> = BTreeSet::new();
    for r in &s.roots {
        let mut stack: Vec<(&NodeId, usize)> = vec![(r, 0)];
        on_path.insert(r);
        while let Some((node, next)) = stack.pop() {
            let slots = s.slots(node);
            let child = slots[next.min(slots.len())..]
                .iter()
                .enumerate()
                .find_map(|(off, slot)| slot.node().map(|c| (next + off, c)));
            match child {
                None => {
                    on_path.remove(node);
                }
                Some((pos, c)) => {
                    stack.push((node, pos + 1));
                    if on_path.contains(c) {
                        return Err(StructureError::CycleInSnapshot(c.clone()));
                    }
                    if !seen.insert(c) {
                        return Err(StructureError::DuplicateParent(c.clone()));
                    }
                    note_name(c)?;
                    on_path.insert(c);
                    stack.push((c, 0));
                }
            }
        }
    }
    // Anything with children that was never reached is either on a rootless
    // cycle or detached from the forest.
    if let Some(owner) = s.children.keys().find(|k| !seen.contains(k)) {
        let mut path = Vec::new();
        if let Some(n) = find_cycle_from(s, owner, &mut path, &mut BTreeSet::new()) {
            return Err(StructureError::CycleInSnapshot(n.clone()));
        }
        return Err(StructureError::DanglingChild(owner.clone()));
    }
    Ok(())
}

fn find_cycle_from<'a>(
    s: &'a Snapshot,
    n: &'a NodeId,
    path: &mut Vec<&'a NodeId>,
    done: &mut BTreeSet<&'a NodeId>,
) -> Option<&'a NodeId> {
    if path.contains(&n) {
        return Some(n);
    }
    if !done.insert(n) {
        return None;
    }
    path.push(n);
    for c in s.slots(n).iter().filter_map(Slot::node) {
        if let Some(hit) = find_cycle_from(s, c, path, done) {
            return Some(hit);
        }
    }
    path.pop();
    None
}

/// A nonempty, strictly time-ordered sequence of snapshots.
#[derive(Clone, Debug, PartialEq)]
pub struct DynamicTree {
    snapshots: Vec<Snapshot>,
}

impl DynamicTree {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self, ModelError> {
        if snapshots.is_empty() {
            return Err(ModelError::NoSnapshots);
        }
        let mut last: Option<f64> = None;
        for (pos, s) in snapshots.iter().enumerate() {
            if s.index != pos + 1 {
                return Err(ModelError::BadIndex {
                    position: pos + 1,
                    index: s.index,
                });
            }
            if !s.time.is_finite() || s.time < 0.0 {
                return Err(ModelError::BadTime {
                    index: s.index,
                    time: s.time,
                });
            }
            if last.is_some_and(|t| s.time <= t) {
                return Err(ModelError::NonMonotonicTime {
                    index: s.index,
                    time: s.time,
                });
            }
            last = Some(s.time);
            validate(s).map_err(|source| ModelError::Structure {
                index: s.index,
                source,
            })?;
        }
        Ok(DynamicTree { snapshots })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    /// Snapshot by 1-based index.
    pub fn snapshot(&self, index: usize) -> &Snapshot {
        &self.snapshots[index - 1]
    }

    /// Number of snapshots `k`.
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every node occurring in any snapshot.
    pub fn nodes(&self) -> BTreeSet<NodeId> {
        self.snapshots.iter().flat_map(Snapshot::preorder).collect()
    }

    /// Total node occurrences, the sum of all snapshot sizes.
    pub fn total_size(&self) -> usize {
        self.snapshots.iter().map(|s| s.preorder().len()).sum()
    }

    /// Replaces snapshot `index` (1-based) without re-validating the whole
    /// sequence. The caller guarantees the replacement keeps the invariants.
    pub(crate) fn replace_snapshot(&mut self, index: usize, s: Snapshot) {
        self.snapshots[index - 1] = s;
    }
}

/// Layout tunables, all in layout units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutParams {
    /// Gap between the boxes of two sibling nodes.
    pub sibling_sep: f64,
    /// Vertical distance between consecutive depths.
    pub level_sep: f64,
    /// Gap between neighbouring subtrees below the sibling level.
    pub subtree_pad: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            sibling_sep: 1.0,
            level_sep: 1.0,
            subtree_pad: 1.0,
        }
    }
}

impl LayoutParams {
    /// Sets `sibling_sep` and keeps `subtree_pad` equal to it.
    pub fn with_sep(sep: f64) -> Self {
        LayoutParams {
            sibling_sep: sep,
            subtree_pad: sep,
            ..Default::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.sibling_sep, self.level_sep, self.subtree_pad]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Coordinates for every node of every snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSequence {
    pub params: LayoutParams,
    /// `frames[i]` holds snapshot `i + 1`.
    pub frames: Vec<BTreeMap<NodeId, Point>>,
}

impl LayoutSequence {
    /// Coordinates of `node` in snapshot `index` (1-based).
    pub fn get(&self, index: usize, node: &NodeId) -> Option<Point> {
        self.frames.get(index - 1)?.get(node).copied()
    }

    pub fn frame(&self, index: usize) -> &BTreeMap<NodeId, Point> {
        &self.frames[index - 1]
    }

    /// True iff every node present in snapshot `i` has coordinates for `i`
    /// and nothing else does.
    pub fn covers(&self, t: &DynamicTree) -> bool {
        self.frames.len() == t.len()
            && t.snapshots().iter().zip(&self.frames).all(|(s, f)| {
                let nodes = s.preorder();
                nodes.len() == f.len() && nodes.iter().all(|n| f.contains_key(n))
            })
    }
}

/// One temporal cut: `node` is renamed in every snapshot after `after_index`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cut {
    pub node: NodeId,
    pub after_index: usize,
    /// The fresh identity introduced by the cut.
    pub renamed_to: NodeId,
}

/// Applied cuts in application order, plus the renaming they induce.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutSet {
    pub cuts: Vec<Cut>,
    /// (original node, snapshot index) -> identity used in that snapshot,
    /// recorded only where the two differ.
    pub renames: BTreeMap<(NodeId, usize), NodeId>,
}

impl CutSet {
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Identity of original node `n` in snapshot `index`.
    pub fn resolve(&self, n: &NodeId, index: usize) -> NodeId {
        self.renames
            .get(&(n.clone(), index))
            .cloned()
            .unwrap_or_else(|| n.clone())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn id(s: &str) -> NodeId {
        NodeId::new(s)
    }

    pub fn snap(roots: &[&str], edges: &[(&str, &[Option<&str>])]) -> Snapshot {
        let children = edges
            .iter()
            .map(|(p, slots)| {
                let slots = slots
                    .iter()
                    .map(|s| s.map_or(Slot::Empty, |n| Slot::Occupied(id(n))))
                    .collect();
                (id(p), slots)
            })
            .collect();
        Snapshot::new(
            1,
            0.0,
            roots.iter().map(|r| id(r)).collect(),
            children,
            BTreeMap::new(),
        )
    }

    #[test]
    fn well_formed_tree_validates() {
        let s = snap(&["a"], &[("a", &[Some("b"), Some("c")])]);
        assert_eq!(validate(&s), Ok(()));
    }

    #[test]
    fn shared_child_is_duplicate_parent() {
        let s = snap(
            &["a"],
            &[
                ("a", &[Some("c"), Some("x")]),
                ("c", &[Some("b")]),
                ("x", &[Some("b")]),
            ],
        );
        assert_eq!(validate(&s), Err(StructureError::DuplicateParent(id("b"))));
    }

    #[test]
    fn two_cycle_is_reported() {
        let rooted = snap(&["a"], &[("a", &[Some("b")]), ("b", &[Some("a")])]);
        assert_eq!(
            validate(&rooted),
            Err(StructureError::CycleInSnapshot(id("a")))
        );
        let rootless = snap(&["r"], &[("a", &[Some("b")]), ("b", &[Some("a")])]);
        assert!(matches!(
            validate(&rootless),
            Err(StructureError::CycleInSnapshot(_))
        ));
    }

    #[test]
    fn detached_children_are_dangling() {
        let s = snap(&["a"], &[("z", &[Some("y")])]);
        assert_eq!(validate(&s), Err(StructureError::DanglingChild(id("z"))));
    }

    #[test]
    fn trailing_empty_slots_are_dropped_interior_kept() {
        let s = snap(
            &["a"],
            &[("a", &[None, Some("b"), None, None]), ("b", &[None])],
        );
        assert_eq!(s.slots(&id("a")), &[Slot::Empty, Slot::Occupied(id("b"))]);
        assert!(s.slots(&id("b")).is_empty());
        assert!(!s.children_map().contains_key(&id("b")));
    }

    #[test]
    fn times_must_increase() {
        let a = snap(&["a"], &[]);
        let b = Snapshot::new(2, 0.0, vec![id("a")], BTreeMap::new(), BTreeMap::new());
        assert!(matches!(
            DynamicTree::new(vec![a, b]),
            Err(ModelError::NonMonotonicTime { index: 2, .. })
        ));
    }

    #[test]
    fn node_id_display_and_serde() {
        let n = NodeId::with_generation("a", 2);
        assert_eq!(n.to_string(), "a''");
        let json = serde_json::to_string(&n).unwrap();
        assert_eq!(json, "\"a''\"");
        let back: NodeId = serde_json::from_str(&json).unwrap();
        assert_eq!(back, n);
        assert_eq!(n.base(), id("a"));
    }

    #[test]
    fn edges_follow_slot_order() {
        let s = snap(
            &["a"],
            &[("a", &[Some("b"), Some("c")]), ("b", &[None, Some("d")])],
        );
        let e: Vec<_> = s
            .edges()
            .into_iter()
            .map(|(p, c)| format!("{p}{c}"))
            .collect();
        assert_eq!(e, ["ab", "bd", "ac"]);
    }
}
