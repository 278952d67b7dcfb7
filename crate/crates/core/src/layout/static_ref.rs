//! Plain recursive tidy-tree layout of one snapshot, kept deliberately
//! simple so it can serve as a reference for the synchronized layout.

use std::collections::BTreeMap;

use crate::model::{LayoutParams, NodeId, Point, Snapshot};

struct Sub {
    /// x of every node of the subtree relative to its root
    rel: Vec<(NodeId, f64, usize)>,
    left: Vec<f64>,
    right: Vec<f64>,
}

fn lay(s: &Snapshot, v: &NodeId, p: &LayoutParams) -> Sub {
    let slots = s.slots(v);
    let m = if slots.len() == 1 { 2 } else { slots.len() };
    let mut pos = vec![0.0; m];
    let mut placed: Vec<(usize, Sub)> = Vec::new();
    // merged contour of the children placed so far, children's depth first
    let mut left: Vec<f64> = Vec::new();
    let mut right: Vec<f64> = Vec::new();
    for r in 0..m {
        let sub = slots.get(r).and_then(|x| x.node()).map(|c| lay(s, c, p));
        if r > 0 {
            let mut gap = p.sibling_sep;
            if let Some(sub) = &sub {
                for (d, (pr, cl)) in right.iter().zip(&sub.left).enumerate() {
                    let pad = if d == 0 { p.sibling_sep } else { p.subtree_pad };
                    gap = gap.max(pr + pad - cl - pos[r - 1]);
                }
            }
            pos[r] = pos[r - 1] + gap;
        }
        if let Some(sub) = sub {
            for d in 0..sub.left.len() {
                let (l, rr) = (sub.left[d] + pos[r], sub.right[d] + pos[r]);
                if d < right.len() {
                    right[d] = rr;
                } else {
                    left.push(l);
                    right.push(rr);
                }
            }
            placed.push((r, sub));
        }
    }
    let half = pos.last().copied().unwrap_or(0.0) / 2.0;
    let w = s.extent(v).width / 2.0;
    let mut out = Sub {
        rel: vec![(v.clone(), 0.0, 0)],
        left: vec![-w],
        right: vec![w],
    };
    out.left.extend(left.iter().map(|x| x - half));
    out.right.extend(right.iter().map(|x| x - half));
    for (r, sub) in placed {
        let dx = pos[r] - half;
        out.rel
            .extend(sub.rel.into_iter().map(|(n, x, d)| (n, x + dx, d + 1)));
    }
    out
}

/// Classic tidy layout of a single snapshot with the same slot, padding and
/// forest conventions as the synchronized layout.
pub fn layout_static_reference(s: &Snapshot, p: &LayoutParams) -> BTreeMap<NodeId, Point> {
    let subs: Vec<Sub> = s.roots().iter().map(|r| lay(s, r, p)).collect();
    let mut root_x = vec![0.0; subs.len()];
    if subs.len() > 1 {
        let mut right: Vec<f64> = Vec::new();
        for (r, sub) in subs.iter().enumerate() {
            if r > 0 {
                let mut gap = p.sibling_sep;
                for (d, (pr, cl)) in right.iter().zip(&sub.left).enumerate() {
                    let pad = if d == 0 { p.sibling_sep } else { p.subtree_pad };
                    gap = gap.max(pr + pad - cl - root_x[r - 1]);
                }
                root_x[r] = root_x[r - 1] + gap;
            }
            for d in 0..sub.right.len() {
                let x = sub.right[d] + root_x[r];
                if d < right.len() {
                    right[d] = x;
                } else {
                    right.push(x);
                }
            }
        }
        let half = root_x[subs.len() - 1] / 2.0;
        root_x.iter_mut().for_each(|x| *x -= half);
    }
    let mut out = BTreeMap::new();
    for (sub, x0) in subs.into_iter().zip(root_x) {
        for (n, x, d) in sub.rel {
            out.insert(
                n,
                Point {
                    x: x0 + x,
                    y: d as f64 * p.level_sep,
                },
            );
        }
    }
    out
}
