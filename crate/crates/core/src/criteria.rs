//! Checks a layout against the aesthetic criteria for dynamic tree drawings.
//!
//! Every check reports all violations it finds, sorted by snapshot and node.
//! Positions are compared within [`TOLERANCE`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::model::{
    CutSet, DynamicTree, Extent, LayoutSequence, NodeId, Point, Slot, Snapshot, SnapshotIndex,
};

pub const TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Criterion {
    Ranking,
    Ordering,
    Centering,
    StaticSymmetry,
    WeakSymmetry,
    Stability,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Criterion::Ranking => "ranking",
            Criterion::Ordering => "ordering",
            Criterion::Centering => "centering",
            Criterion::StaticSymmetry => "static-symmetry",
            Criterion::WeakSymmetry => "weak-symmetry",
            Criterion::Stability => "stability",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub criterion: Criterion,
    pub snapshot: usize,
    /// Second snapshot of the pair, for stability.
    pub next_snapshot: Option<usize>,
    pub nodes: Vec<NodeId>,
    pub measured: f64,
    pub expected: f64,
    /// Stability only: a node of the pair changed identity across the pair
    /// because of a temporal cut.
    pub cut_boundary: bool,
}

impl Violation {
    fn new(
        criterion: Criterion,
        snapshot: usize,
        nodes: Vec<NodeId>,
        measured: f64,
        expected: f64,
    ) -> Self {
        Violation {
            criterion,
            snapshot,
            next_snapshot: None,
            nodes,
            measured,
            expected,
            cut_boundary: false,
        }
    }

    fn sort_key(&self) -> (Criterion, usize, Option<usize>, &[NodeId]) {
        (
            self.criterion,
            self.snapshot,
            self.next_snapshot,
            &self.nodes,
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} T{}", self.criterion, self.snapshot)?;
        if let Some(n) = self.next_snapshot {
            write!(f, "->T{n}")?;
        }
        let nodes: Vec<String> = self.nodes.iter().map(ToString::to_string).collect();
        write!(
            f,
            " [{}] measured {} expected {}",
            nodes.join(" "),
            self.measured,
            self.expected
        )?;
        if self.cut_boundary {
            f.write_str(" (cut)")?;
        }
        Ok(())
    }
}

fn sorted(mut v: Vec<Violation>) -> Vec<Violation> {
    v.sort_by(|a, b| {
        a.sort_key()
            .partial_cmp(&b.sort_key())
            .expect("keys are totally ordered")
    });
    v
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}

fn pos(l: &LayoutSequence, j: usize, n: &NodeId) -> Point {
    l.get(j, n)
        .unwrap_or_else(|| panic!("layout has no position for {n} in snapshot {j}"))
}

fn per_snapshot<F>(t: &DynamicTree, exec: Execution, f: F) -> Vec<Violation>
where
    F: Fn(&Snapshot) -> Vec<Violation> + Sync + Send,
{
    sorted(
        exec::map(t.snapshots(), exec, f)
            .into_iter()
            .flatten()
            .collect(),
    )
}

/// Every node sits at its depth times the level separation.
pub fn check_ranking(t: &DynamicTree, l: &LayoutSequence) -> Vec<Violation> {
    check_ranking_with(t, l, Execution::Sequential)
}

pub fn check_ranking_with(t: &DynamicTree, l: &LayoutSequence, exec: Execution) -> Vec<Violation> {
    per_snapshot(t, exec, |s| {
        let idx = SnapshotIndex::new(s);
        idx.preorder
            .iter()
            .filter_map(|n| {
                let y = pos(l, s.index(), n).y;
                let want = idx.depth[n] as f64 * l.params.level_sep;
                (!close(y, want)).then(|| {
                    Violation::new(Criterion::Ranking, s.index(), vec![n.clone()], y, want)
                })
            })
            .collect()
    })
}

/// Occupied children appear left to right in slot order.
pub fn check_ordering(t: &DynamicTree, l: &LayoutSequence) -> Vec<Violation> {
    check_ordering_with(t, l, Execution::Sequential)
}

pub fn check_ordering_with(t: &DynamicTree, l: &LayoutSequence, exec: Execution) -> Vec<Violation> {
    per_snapshot(t, exec, |s| {
        let j = s.index();
        let mut out = Vec::new();
        for n in s.preorder() {
            let kids: Vec<&NodeId> = s.occupied_children(&n).map(|(_, c)| c).collect();
            for w in kids.windows(2) {
                let (a, b) = (pos(l, j, w[0]).x, pos(l, j, w[1]).x);
                if b - a <= TOLERANCE {
                    out.push(Violation::new(
                        Criterion::Ordering,
                        j,
                        vec![n.clone(), w[0].clone(), w[1].clone()],
                        b - a,
                        TOLERANCE,
                    ));
                }
            }
        }
        out
    })
}

/// A node with at least two children sits midway between the outermost.
pub fn check_centering(t: &DynamicTree, l: &LayoutSequence) -> Vec<Violation> {
    check_centering_with(t, l, Execution::Sequential)
}

pub fn check_centering_with(
    t: &DynamicTree,
    l: &LayoutSequence,
    exec: Execution,
) -> Vec<Violation> {
    per_snapshot(t, exec, |s| {
        let j = s.index();
        let mut out = Vec::new();
        for n in s.preorder() {
            let kids: Vec<&NodeId> = s.occupied_children(&n).map(|(_, c)| c).collect();
            if kids.len() < 2 {
                continue;
            }
            let mid = (pos(l, j, kids[0]).x + pos(l, j, kids[kids.len() - 1]).x) / 2.0;
            let x = pos(l, j, &n).x;
            if !close(x, mid) {
                out.push(Violation::new(
                    Criterion::Centering,
                    j,
                    vec![n.clone()],
                    x,
                    mid,
                ));
            }
        }
        out
    })
}

/// For each consecutive pair of snapshots and each child that keeps its
/// parent and slot, the offset to the parent must not change. Nodes are
/// matched by name, so a node renamed by a cut is still followed; such pairs
/// are tagged as cut boundaries.
pub fn check_stability(t: &DynamicTree, l: &LayoutSequence) -> Vec<Violation> {
    check_stability_with(t, l, Execution::Sequential)
}

pub fn check_stability_with(
    t: &DynamicTree,
    l: &LayoutSequence,
    exec: Execution,
) -> Vec<Violation> {
    let pairs: Vec<usize> = (1..t.len()).collect();
    let found = exec::map(&pairs, exec, |&i| {
        let (a, b) = (t.snapshot(i), t.snapshot(i + 1));
        let (ia, ib) = (SnapshotIndex::new(a), SnapshotIndex::new(b));
        let by_name: BTreeMap<&str, &NodeId> = ib.preorder.iter().map(|n| (n.name(), n)).collect();
        let mut out = Vec::new();
        for (c, (n, slot)) in &ia.parent {
            let Some(&c2) = by_name.get(c.name()) else {
                continue;
            };
            let Some((n2, slot2)) = ib.parent.get(c2) else {
                continue;
            };
            if n2.name() != n.name() || slot2 != slot {
                continue;
            }
            let before = pos(l, i, c).x - pos(l, i, n).x;
            let after = pos(l, i + 1, c2).x - pos(l, i + 1, n2).x;
            if !close(before, after) {
                out.push(Violation {
                    criterion: Criterion::Stability,
                    snapshot: i,
                    next_snapshot: Some(i + 1),
                    nodes: vec![n.clone(), c.clone()],
                    measured: after,
                    expected: before,
                    cut_boundary: c2 != c || n2 != n,
                });
            }
        }
        out
    });
    sorted(found.into_iter().flatten().collect())
}

/// Stability violations split into those explained by cuts and the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub violations: Vec<Violation>,
    pub unexpected: usize,
    pub cut_boundary: usize,
    /// Cuts that visibly move at least one node.
    pub cut_boundary_moves: usize,
}

pub fn stability_report(t: &DynamicTree, l: &LayoutSequence, cuts: &CutSet) -> StabilityReport {
    let violations = check_stability(t, l);
    let mut moving = BTreeSet::new();
    for v in violations.iter().filter(|v| v.cut_boundary) {
        let i = v.snapshot;
        let next = t.snapshot(i + 1);
        for n in &v.nodes {
            let Some(later) = next.preorder().into_iter().find(|m| m.name() == n.name()) else {
                continue;
            };
            if later == *n {
                continue;
            }
            if let Some(k) = cuts
                .cuts
                .iter()
                .position(|c| c.after_index == i && c.renamed_to == later)
            {
                moving.insert(k);
            }
        }
    }
    let cut_boundary = violations.iter().filter(|v| v.cut_boundary).count();
    StabilityReport {
        unexpected: violations.len() - cut_boundary,
        cut_boundary,
        cut_boundary_moves: moving.len(),
        violations,
    }
}

/// Interned ordered shapes with extents; `None` children are empty slots.
#[derive(Default)]
struct Shapes {
    ids: BTreeMap<(u64, u64, Vec<Option<usize>>), usize>,
}

impl Shapes {
    fn intern(&mut self, e: Extent, kids: Vec<Option<usize>>) -> usize {
        let n = self.ids.len();
        *self
            .ids
            .entry((e.width.to_bits(), e.height.to_bits(), kids))
            .or_insert(n)
    }

    /// Shape id of every node of `s`, and of its mirror image.
    fn of(&mut self, s: &Snapshot) -> (BTreeMap<NodeId, usize>, BTreeMap<NodeId, usize>) {
        let (mut id, mut mirror) = (BTreeMap::new(), BTreeMap::new());
        for n in s.preorder().into_iter().rev() {
            let kids: Vec<Option<usize>> = s
                .slots(&n)
                .iter()
                .map(|x| x.node().map(|c| id[c]))
                .collect();
            let mut rev: Vec<Option<usize>> = s
                .slots(&n)
                .iter()
                .rev()
                .map(|x| x.node().map(|c| mirror[c]))
                .collect();
            // a lone child is laid out as the first of two slots
            if rev.len() == 1 {
                rev.insert(0, None);
            }
            while rev.last() == Some(&None) {
                rev.pop();
            }
            let e = s.extent(&n);
            id.insert(n.clone(), self.intern(e, kids));
            mirror.insert(n, self.intern(e, rev));
        }
        (id, mirror)
    }
}

/// x of `root`'s subtree relative to `root`, in preorder; children visited
/// in reverse slot order when `mirrored`.
fn relative(s: &Snapshot, l: &LayoutSequence, root: &NodeId, mirrored: bool) -> Vec<f64> {
    let j = s.index();
    let x0 = pos(l, j, root).x;
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        out.push(pos(l, j, n).x - x0);
        let kids = s.slots(n).iter().filter_map(Slot::node);
        if mirrored {
            stack.extend(kids);
        } else {
            stack.extend(kids.rev());
        }
    }
    out
}

fn worst_gap(a: &[f64], b: &[f64]) -> Option<(f64, f64)> {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x, y, (x - y).abs()))
        .filter(|(_, _, d)| *d > TOLERANCE)
        .max_by(|p, q| p.2.total_cmp(&q.2))
        .map(|(x, y, _)| (*y, *x))
}

/// Within one snapshot, subtrees of equal shape are drawn identically and
/// subtrees of mirrored shape are drawn mirrored.
pub fn check_static_symmetry(s: &Snapshot, l: &LayoutSequence) -> Vec<Violation> {
    let mut shapes = Shapes::default();
    let (id, mirror) = shapes.of(s);
    let mut first: BTreeMap<usize, &NodeId> = BTreeMap::new();
    let mut out = Vec::new();
    let j = s.index();
    let order = s.preorder();
    for n in &order {
        match first.get(&id[n]) {
            None => {
                first.insert(id[n], n);
            }
            Some(&rep) => {
                if let Some((m, e)) =
                    worst_gap(&relative(s, l, n, false), &relative(s, l, rep, false))
                {
                    out.push(Violation::new(
                        Criterion::StaticSymmetry,
                        j,
                        vec![rep.clone(), n.clone()],
                        m,
                        e,
                    ));
                }
            }
        }
    }
    // each node against the representative of its mirror shape
    for n in &order {
        let Some(&rep) = first.get(&mirror[n]) else {
            continue;
        };
        let mine: Vec<f64> = relative(s, l, n, true).iter().map(|x| -x).collect();
        if let Some((m, e)) = worst_gap(&mine, &relative(s, l, rep, false)) {
            out.push(Violation::new(
                Criterion::StaticSymmetry,
                j,
                vec![rep.clone(), n.clone()],
                m,
                e,
            ));
        }
    }
    sorted(out)
}

/// Nodes whose subtrees have the same shape in every snapshot (and are
/// present in the same snapshots) are drawn identically in every snapshot.
pub fn check_weak_symmetry(t: &DynamicTree, l: &LayoutSequence) -> Vec<Violation> {
    check_weak_symmetry_with(t, l, Execution::Sequential)
}

pub fn check_weak_symmetry_with(
    t: &DynamicTree,
    l: &LayoutSequence,
    exec: Execution,
) -> Vec<Violation> {
    let mut shapes = Shapes::default();
    let per: Vec<BTreeMap<NodeId, usize>> = t.snapshots().iter().map(|s| shapes.of(s).0).collect();
    let mut groups: BTreeMap<Vec<Option<usize>>, Vec<NodeId>> = BTreeMap::new();
    for n in t.nodes() {
        let sig = per.iter().map(|m| m.get(&n).copied()).collect();
        groups.entry(sig).or_default().push(n);
    }
    let groups: Vec<Vec<NodeId>> = groups.into_values().filter(|g| g.len() > 1).collect();
    let found = exec::map(&groups, exec, |g| {
        let rep = &g[0];
        let mut out = Vec::new();
        for n in &g[1..] {
            for s in t.snapshots().iter().filter(|s| s.contains(rep)) {
                if let Some((m, e)) =
                    worst_gap(&relative(s, l, n, false), &relative(s, l, rep, false))
                {
                    out.push(Violation::new(
                        Criterion::WeakSymmetry,
                        s.index(),
                        vec![rep.clone(), n.clone()],
                        m,
                        e,
                    ));
                }
            }
        }
        out
    });
    sorted(found.into_iter().flatten().collect())
}

/// Results of all checks on one layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CriteriaReport {
    pub ranking: Vec<Violation>,
    pub ordering: Vec<Violation>,
    pub centering: Vec<Violation>,
    pub weak_symmetry: Vec<Violation>,
    pub stability: StabilityReport,
    /// Informational: not guaranteed for dynamic layouts.
    pub static_symmetry: Vec<Violation>,
}

impl CriteriaReport {
    /// Violations of guaranteed criteria that no cut explains.
    pub fn unexpected(&self) -> usize {
        self.ranking.len()
            + self.ordering.len()
            + self.centering.len()
            + self.weak_symmetry.len()
            + self.stability.unexpected
    }

    /// The five dynamic criteria, with cut-boundary stability entries.
    pub fn all(&self) -> Vec<Violation> {
        let mut v: Vec<Violation> = Vec::new();
        v.extend_from_slice(&self.ranking);
        v.extend_from_slice(&self.ordering);
        v.extend_from_slice(&self.centering);
        v.extend_from_slice(&self.weak_symmetry);
        v.extend_from_slice(&self.stability.violations);
        v
    }
}

pub fn check_all(
    t: &DynamicTree,
    l: &LayoutSequence,
    cuts: &CutSet,
    exec: Execution,
) -> CriteriaReport {
    let static_symmetry = sorted(
        exec::map(t.snapshots(), exec, |s| check_static_symmetry(s, l))
            .into_iter()
            .flatten()
            .collect(),
    );
    CriteriaReport {
        ranking: check_ranking_with(t, l, exec),
        ordering: check_ordering_with(t, l, exec),
        centering: check_centering_with(t, l, exec),
        weak_symmetry: check_weak_symmetry_with(t, l, exec),
        stability: stability_report(t, l, cuts),
        static_symmetry,
    }
}
