//! Exhaustive minimum temporal cut search.
//!
//! Only nodes on a supergraph cycle can usefully be cut, and for such a node
//! `n` only one cut index per gap between consecutive snapshots in which `n`
//! has an incident edge matters. The remaining candidates are searched by
//! increasing cut count, each level in lexicographic order, so the answer is
//! the same for every execution mode.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::CutSetBuilder;
use crate::exec::{self, Execution};
use crate::model::{CutSet, DynamicTree, NodeId};
use crate::supergraph::build_supergraph;

pub const DEFAULT_CANDIDATE_LIMIT: usize = 24;

/// Ranks per parallel work item.
const CHUNK: u64 = 2048;

/// Binomials are kept in `u64`; this bounds the candidate count regardless of
/// the configured limit.
const HARD_LIMIT: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactOptions {
    /// Refuse instances with more candidate cuts than this.
    pub limit: usize,
    /// Stop after this many feasibility checks, if set.
    pub budget: Option<u64>,
    pub execution: Execution,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            limit: DEFAULT_CANDIDATE_LIMIT,
            budget: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{candidates} candidate cuts exceed the limit of {limit}")]
    TooLarge { candidates: usize, limit: usize },
    #[error("no solution within {budget} feasibility checks (best lower bound {lower_bound})")]
    OverBudget { budget: u64, lower_bound: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub tree: DynamicTree,
    pub cuts: CutSet,
    /// Candidate cuts after pruning.
    pub candidates: usize,
    /// Feasibility checks performed.
    pub checked: u64,
}

impl ExactSolution {
    pub fn count(&self) -> usize {
        self.cuts.len()
    }
}

/// Feasibility data: edges among cyclic nodes, per snapshot, by dense id.
struct Instance {
    nodes: Vec<NodeId>,
    /// (snapshot index, parent, child)
    edges: Vec<(usize, usize, usize)>,
    /// (after_index, node) sorted
    candidates: Vec<(usize, usize)>,
}

impl Instance {
    fn new(t: &DynamicTree) -> Self {
        let cyclic = build_supergraph(t).cyclic_vertices();
        let nodes: Vec<NodeId> = cyclic.into_iter().collect();
        let dense: BTreeMap<&NodeId, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut edges = Vec::new();
        let mut touched: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
        for s in t.snapshots() {
            for (p, c) in s.edges() {
                if let (Some(&p), Some(&c)) = (dense.get(&p), dense.get(&c)) {
                    edges.push((s.index(), p, c));
                    touched[p].insert(s.index());
                    touched[c].insert(s.index());
                }
            }
        }
        let mut candidates = Vec::new();
        for (n, seen) in touched.iter().enumerate() {
            let seen: Vec<usize> = seen.iter().copied().collect();
            for w in seen.windows(2) {
                candidates.push((w[0], n));
            }
        }
        candidates.sort_by(|a, b| (a.0, &nodes[a.1]).cmp(&(b.0, &nodes[b.1])));
        Instance {
            nodes,
            edges,
            candidates,
        }
    }

    /// Whether cutting the chosen candidates leaves no cycle.
    fn feasible(&self, chosen: &[usize]) -> bool {
        let n = self.nodes.len();
        // segment of node v in snapshot j = cuts of v with index < j
        let mut cuts_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &c in chosen {
            let (i, v) = self.candidates[c];
            cuts_of[v].push(i);
        }
        let mut offset = vec![0usize; n + 1];
        for v in 0..n {
            offset[v + 1] = offset[v] + cuts_of[v].len() + 1;
        }
        let seg = |v: usize, j: usize| offset[v] + cuts_of[v].iter().filter(|&&i| i < j).count();
        let total = offset[n];
        let mut indeg = vec![0usize; total];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); total];
        for &(j, p, c) in &self.edges {
            let (a, b) = (seg(p, j), seg(c, j));
            if !out[a].contains(&b) {
                out[a].push(b);
                indeg[b] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..total).filter(|&v| indeg[v] == 0).collect();
        let mut done = 0;
        while let Some(v) = ready.pop() {
            done += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        done == total
    }
}

fn binomial_table(m: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; m + 1]; m + 1];
    for n in 0..=m {
        c[n][0] = 1;
        for k in 1..=n {
            c[n][k] = c[n - 1][k - 1] + if k <= n - 1 { c[n - 1][k] } else { 0 };
        }
    }
    c
}

/// The `rank`-th `k`-subset of `0..m` in lexicographic order.
fn unrank(bin: &[Vec<u64>], m: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    for pos in 0..k {
        loop {
            let rest = bin[m - 1 - x][k - 1 - pos];
            if rank < rest {
                break;
            }
            rank -= rest;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    out
}

/// Advances to the next `k`-subset of `0..m` in lexicographic order.
fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    for pos in (0..k).rev() {
        if c[pos] < m - k + pos {
            c[pos] += 1;
            for q in pos + 1..k {
                c[q] = c[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Minimum number of temporal cuts making the supergraph acyclic.
///
/// Among minimum solutions the lexicographically first, by `(index, node)`,
/// is returned. Cuts are applied in ascending index order, so a node cut
/// twice is reported once under its original name and once under its first
/// fresh name.
pub fn exact_min_cuts(t: &DynamicTree, opts: ExactOptions) -> Result<ExactSolution, ExactError> {
    let inst = Instance::new(t);
    let m = inst.candidates.len();
    let limit = opts.limit.min(HARD_LIMIT);
    if m > limit {
        return Err(ExactError::TooLarge {
            candidates: m,
            limit: opts.limit,
        });
    }
    let bin = binomial_table(m);
    let mut checked = 0u64;
    for k in 0..=m {
        let total = bin[m][k];
        let allowed = match opts.budget {
            Some(b) => total.min(b.saturating_sub(checked)),
            None => total,
        };
        let chunks = allowed.div_ceil(CHUNK);
        let hit = exec::find_first(chunks, opts.execution, |q| {
            let start = q * CHUNK;
            let end = (start + CHUNK).min(allowed);
            let mut c = unrank(&bin, m, k, start);
            for r in start..end {
                if inst.feasible(&c) {
                    return Some((r, c));
                }
                if r + 1 < end {
                    next_combination(&mut c, m);
                }
            }
            None
        });
        if let Some((_, (rank, chosen))) = hit {
            checked += rank + 1;
            return Ok(build_solution(t, &inst, &chosen, m, checked));
        }
        checked += allowed;
        if allowed < total {
            return Err(ExactError::OverBudget {
                budget: opts.budget.unwrap_or(0),
                lower_bound: k,
            });
        }
    }
    unreachable!("cutting every candidate leaves only acyclic segments")
}

fn build_solution(
    t: &DynamicTree,
    inst: &Instance,
    chosen: &[usize],
    candidates: usize,
    checked: u64,
) -> ExactSolution {
    let mut builder = CutSetBuilder::new(t.clone());
    let mut current: BTreeMap<usize, NodeId> = BTreeMap::new();
    for &c in chosen {
        let (i, v) = inst.candidates[c];
        let name = current
            .get(&v)
            .cloned()
            .unwrap_or_else(|| inst.nodes[v].clone());
        let fresh = builder
            .cut(&name, i)
            .expect("candidate cuts lie inside the sequence");
        current.insert(v, fresh);
    }
    let (tree, cuts) = builder.finish();
    ExactSolution {
        tree,
        cuts,
        candidates,
        checked,
    }
}
