//! Random inputs for tests and benchmarks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cuts::UndirectedGraph;
use crate::model::{DynamicTree, NodeId, Slot, Snapshot};

fn name(i: usize) -> NodeId {
    NodeId::new(format!("n{i}"))
}

/// Random ordered tree on `n >= 1` nodes with empty slots sprinkled in.
/// Node `n0` is the root.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, index: usize, time: f64) -> Snapshot {
    let mut children: BTreeMap<NodeId, Vec<Slot>> = BTreeMap::new();
    for i in 1..n {
        let parent = name(rng.gen_range(0..i));
        let slots = children.entry(parent).or_default();
        let free: Vec<usize> = (0..slots.len() + 2)
            .filter(|&r| !matches!(slots.get(r), Some(Slot::Occupied(_))))
            .collect();
        let r = *free.choose(rng).expect("there is always a free slot");
        if r >= slots.len() {
            slots.resize(r + 1, Slot::Empty);
        }
        slots[r] = Slot::Occupied(name(i));
    }
    Snapshot::new(index, time, vec![name(0)], children, BTreeMap::new())
}

/// Fixed ordered skeleton: parent and slot of every node but the root.
struct Skeleton {
    parent: Vec<Option<(usize, usize)>>,
    arity: Vec<usize>,
}

impl Skeleton {
    fn random<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Self {
        let mut parent = vec![None];
        let mut arity = vec![rng.gen_range(1..=3)];
        let mut open: Vec<(usize, usize)> = (0..arity[0]).map(|r| (0, r)).collect();
        while parent.len() < size && !open.is_empty() {
            let k = rng.gen_range(0..open.len());
            let (p, r) = open.swap_remove(k);
            let v = parent.len();
            parent.push(Some((p, r)));
            let a = if rng.gen_bool(0.35) {
                0
            } else {
                rng.gen_range(1..=3)
            };
            arity.push(a);
            open.extend((0..a).map(|r| (v, r)));
        }
        Skeleton { parent, arity }
    }

    /// Node with two or more occupied children must have both its first and
    /// its last skeleton slot occupied.
    fn balanced(&self, present: &BTreeSet<usize>, v: usize) -> bool {
        let occ: Vec<usize> = present
            .iter()
            .filter_map(|&c| match self.parent[c] {
                Some((p, r)) if p == v => Some(r),
                _ => None,
            })
            .collect();
        occ.len() < 2 || (occ.contains(&0) && occ.contains(&(self.arity[v] - 1)))
    }

    fn snapshot(&self, present: &BTreeSet<usize>, index: usize) -> Snapshot {
        let mut children: BTreeMap<NodeId, Vec<Slot>> = BTreeMap::new();
        for &c in present {
            if let Some((p, r)) = self.parent[c] {
                let slots = children
                    .entry(name(p))
                    .or_insert_with(|| vec![Slot::Empty; self.arity[p]]);
                slots[r] = Slot::Occupied(name(c));
            }
        }
        Snapshot::new(
            index,
            2.0 * (index - 1) as f64,
            vec![name(0)],
            children,
            BTreeMap::new(),
        )
    }
}

/// Dynamic tree of `k` snapshots obtained by inserting and deleting leaves
/// of one fixed skeleton; every node keeps its parent and slot whenever it
/// is present, so the supergraph is acyclic. Snapshots have at most
/// `max_nodes` nodes.
pub fn skeleton_sequence<R: Rng + ?Sized>(rng: &mut R, k: usize, max_nodes: usize) -> DynamicTree {
    let sk = Skeleton::random(rng, max_nodes + max_nodes / 2);
    let n = sk.parent.len();
    let mut present = BTreeSet::from([0usize]);
    let mut snapshots = Vec::with_capacity(k);
    let target = rng.gen_range(1..=max_nodes.min(n));
    grow(rng, &sk, &mut present, target, max_nodes);
    for i in 1..=k {
        snapshots.push(sk.snapshot(&present, i));
        let ops = rng.gen_range(1..=4);
        for _ in 0..ops {
            if rng.gen_bool(0.5) {
                let target = present.len() + 1;
                grow(rng, &sk, &mut present, target, max_nodes);
            } else {
                shrink(rng, &sk, &mut present);
            }
        }
    }
    DynamicTree::new(snapshots).expect("skeleton snapshots are valid")
}

fn grow<R: Rng + ?Sized>(
    rng: &mut R,
    sk: &Skeleton,
    present: &mut BTreeSet<usize>,
    target: usize,
    max: usize,
) {
    let n = sk.parent.len();
    let mut tries = 0;
    while present.len() < target.min(max) && tries < 4 * n {
        tries += 1;
        let v = rng.gen_range(1..n);
        let Some((p, _)) = sk.parent[v] else { continue };
        if present.contains(&v) || !present.contains(&p) {
            continue;
        }
        present.insert(v);
        if !sk.balanced(present, p) {
            present.remove(&v);
        }
    }
}

fn shrink<R: Rng + ?Sized>(rng: &mut R, sk: &Skeleton, present: &mut BTreeSet<usize>) {
    let leaves: Vec<usize> = present
        .iter()
        .copied()
        .filter(|&v| {
            v != 0
                && !present
                    .iter()
                    .any(|&c| sk.parent[c].map(|x| x.0) == Some(v))
        })
        .collect();
    if let Some(&v) = leaves.choose(rng) {
        let p = sk.parent[v].expect("not the root").0;
        present.remove(&v);
        if !sk.balanced(present, p) {
            present.insert(v);
        }
    }
}

/// Unbalanced binary search tree under random insertions, deletions and
/// rotations. Rotations swap a parent and child, which puts cycles into the
/// supergraph.
pub fn rotation_sequence<R: Rng + ?Sized>(rng: &mut R, k: usize, keys: usize) -> DynamicTree {
    let mut bst = Bst::default();
    let mut pool: Vec<u32> = (0..keys as u32).collect();
    pool.shuffle(rng);
    let start = rng.gen_range(1..=keys.max(1));
    for &key in &pool[..start] {
        bst.insert(key);
    }
    let mut snapshots = Vec::with_capacity(k);
    for i in 1..=k {
        snapshots.push(bst.snapshot(i));
        for _ in 0..rng.gen_range(1..=3) {
            let roll = rng.gen_range(0..10);
            let key = pool[rng.gen_range(0..pool.len())];
            if roll < 5 {
                bst.rotate_random(rng);
            } else if roll < 8 {
                bst.insert(key);
            } else if bst.len() > 1 {
                bst.delete(key);
            }
        }
    }
    DynamicTree::new(snapshots).expect("search tree snapshots are valid")
}

#[derive(Default)]
struct Bst {
    root: Option<u32>,
    kids: BTreeMap<u32, [Option<u32>; 2]>,
}

impl Bst {
    fn len(&self) -> usize {
        self.kids.len()
    }

    fn parent(&self, key: u32) -> Option<(u32, usize)> {
        self.kids
            .iter()
            .find_map(|(&p, k)| k.iter().position(|&c| c == Some(key)).map(|side| (p, side)))
    }

    fn set_link(&mut self, parent: Option<(u32, usize)>, child: Option<u32>) {
        match parent {
            None => self.root = child,
            Some((p, side)) => self.kids.get_mut(&p).unwrap()[side] = child,
        }
    }

    fn insert(&mut self, key: u32) {
        if self.kids.contains_key(&key) {
            return;
        }
        self.kids.insert(key, [None, None]);
        let Some(mut cur) = self.root else {
            self.root = Some(key);
            return;
        };
        loop {
            let side = usize::from(key > cur);
            match self.kids[&cur][side] {
                Some(next) => cur = next,
                None => {
                    self.kids.get_mut(&cur).unwrap()[side] = Some(key);
                    return;
                }
            }
        }
    }

    fn delete(&mut self, key: u32) {
        let Some(&[l, r]) = self.kids.get(&key) else {
            return;
        };
        let up = self.parent(key);
        match (l, r) {
            (None, c) | (c, None) => {
                self.set_link(up, c);
                self.kids.remove(&key);
            }
            (Some(_), Some(r)) => {
                // replace by the in-order successor
                let mut s = r;
                while let Some(next) = self.kids[&s][0] {
                    s = next;
                }
                self.delete(s);
                let [l, r] = self.kids.remove(&key).unwrap();
                self.kids.insert(s, [l, r]);
                self.set_link(up, Some(s));
            }
        }
    }

    /// Rotates a random non-root node above its parent.
    fn rotate_random<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let candidates: Vec<u32> = self
            .kids
            .keys()
            .copied()
            .filter(|&k| Some(k) != self.root)
            .collect();
        let Some(&x) = candidates.choose(rng) else {
            return;
        };
        let (p, side) = self.parent(x).expect("non-root has a parent");
        let up = self.parent(p);
        let inner = self.kids[&x][1 - side];
        self.kids.get_mut(&p).unwrap()[side] = inner;
        self.kids.get_mut(&x).unwrap()[1 - side] = Some(p);
        self.set_link(up, Some(x));
    }

    fn snapshot(&self, index: usize) -> Snapshot {
        let key = |k: u32| NodeId::new(format!("k{k}"));
        let children = self
            .kids
            .iter()
            .filter(|(_, k)| k.iter().any(Option::is_some))
            .map(|(&p, k)| {
                let slots = k
                    .iter()
                    .map(|c| c.map_or(Slot::Empty, |c| Slot::Occupied(key(c))))
                    .collect();
                (key(p), slots)
            })
            .collect();
        let roots = self.root.map(key).into_iter().collect();
        Snapshot::new(
            index,
            2.0 * (index - 1) as f64,
            roots,
            children,
            BTreeMap::new(),
        )
    }
}

/// `copies` disjoint renamed copies of `t` side by side in every snapshot.
pub fn disjoint_copies(t: &DynamicTree, copies: usize) -> DynamicTree {
    let rename = |n: &NodeId, c: usize| {
        NodeId::with_generation(format!("{}_c{c}", n.name()), n.generation())
    };
    let snapshots = t
        .snapshots()
        .iter()
        .map(|s| {
            let mut roots = Vec::new();
            let mut children = BTreeMap::new();
            let mut ann = BTreeMap::new();
            for c in 0..copies {
                roots.extend(s.roots().iter().map(|r| rename(r, c)));
                for (p, slots) in s.children_map() {
                    let slots = slots
                        .iter()
                        .map(|x| match x {
                            Slot::Occupied(n) => Slot::Occupied(rename(n, c)),
                            Slot::Empty => Slot::Empty,
                        })
                        .collect();
                    children.insert(rename(p, c), slots);
                }
                for (n, e) in s.annotations() {
                    ann.insert(rename(n, c), *e);
                }
            }
            Snapshot::new(s.index(), s.time(), roots, children, ann)
        })
        .collect();
    DynamicTree::new(snapshots).expect("copies of a valid tree are valid")
}

/// Erdős–Rényi graph on vertices `v0..v{n-1}`.
pub fn random_graph<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> UndirectedGraph {
    let mut g = UndirectedGraph::new();
    for i in 0..n {
        g.add_vertex(&format!("v{i}"));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(&format!("v{a}"), &format!("v{b}"));
            }
        }
    }
    g
}
