//! Piecewise-linear tracks shared by the animated and the static output.

use std::collections::BTreeMap;

use crate::model::{DynamicTree, LayoutSequence, NodeId, Point};

use super::{CutMotion, Style, TimingPlan};

/// One animation step: from `begin` for `dur` seconds the value moves
/// linearly from `from` to `to`, then stays there.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Segment {
    pub begin: f64,
    pub dur: f64,
    pub from: Vec<f64>,
    pub to: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Track {
    pub initial: Vec<f64>,
    pub segments: Vec<Segment>,
}

impl Track {
    /// Value at time `at`: the latest segment that has begun wins.
    pub fn eval(&self, at: f64) -> Vec<f64> {
        let Some(s) = self.segments.iter().rev().find(|s| s.begin <= at) else {
            return self.initial.clone();
        };
        if s.dur <= 0.0 || at >= s.begin + s.dur {
            return s.to.clone();
        }
        let f = (at - s.begin) / s.dur;
        s.from
            .iter()
            .zip(&s.to)
            .map(|(a, b)| a + (b - a) * f)
            .collect()
    }
}

/// A node group or an edge line with its geometry and opacity tracks.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Element {
    /// Identities this node stands for in first-seen order; an edge holds
    /// the parent and child it was first seen with.
    pub ids: Vec<NodeId>,
    pub label: String,
    pub radius: f64,
    /// `[x, y]` for nodes, `[x1, y1, x2, y2]` for edges.
    pub geometry: Track,
    pub opacity: Track,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Timeline {
    pub nodes: Vec<Element>,
    pub edges: Vec<Element>,
    pub times: Vec<f64>,
}

fn key(n: &NodeId, motion: CutMotion) -> String {
    match motion {
        CutMotion::Move => n.name().to_string(),
        CutMotion::Crossfade => n.to_string(),
    }
}

/// Builds tracks from per-snapshot states; `None` means absent.
fn tracks(states: &[Option<Vec<f64>>], plan: &TimingPlan) -> (Track, Track) {
    let k = states.len();
    // geometry while invisible: the last one shown, else the next one
    let mut shown: Vec<Option<Vec<f64>>> = Vec::with_capacity(k);
    let mut last = None;
    for s in states {
        if s.is_some() {
            last = s.clone();
        }
        shown.push(last.clone());
    }
    let first = states
        .iter()
        .flatten()
        .next()
        .cloned()
        .expect("element occurs somewhere");
    let shown: Vec<Vec<f64>> = shown
        .into_iter()
        .map(|g| g.unwrap_or_else(|| first.clone()))
        .collect();
    let alpha: Vec<f64> = states
        .iter()
        .map(|s| if s.is_some() { 1.0 } else { 0.0 })
        .collect();
    let mut geometry = Track {
        initial: shown[0].clone(),
        segments: Vec::new(),
    };
    let mut opacity = Track {
        initial: vec![alpha[0]],
        segments: Vec::new(),
    };
    for i in 1..k {
        let at = plan.times[i];
        let (d, f) = (plan.transition_window(i), plan.fade_window(i));
        let appearing = states[i - 1].is_none() && states[i].is_some();
        if appearing {
            if shown[i - 1] != shown[i] {
                geometry.segments.push(Segment {
                    begin: at - f,
                    dur: f,
                    from: shown[i].clone(),
                    to: shown[i].clone(),
                });
            }
        } else if shown[i - 1] != shown[i] {
            geometry.segments.push(Segment {
                begin: at - d,
                dur: d,
                from: shown[i - 1].clone(),
                to: shown[i].clone(),
            });
        }
        if alpha[i - 1] != alpha[i] {
            opacity.segments.push(Segment {
                begin: at - f,
                dur: f,
                from: vec![alpha[i - 1]],
                to: vec![alpha[i]],
            });
        }
    }
    (geometry, opacity)
}

/// Shortens the segment between two node centers to the node circles.
fn edge_geometry(p: Point, rp: f64, c: Point, rc: f64) -> Vec<f64> {
    let (dx, dy) = (c.x - p.x, c.y - p.y);
    let len = (dx * dx + dy * dy).sqrt();
    if len <= rp + rc {
        return vec![p.x, p.y, c.x, c.y];
    }
    let (ux, uy) = (dx / len, dy / len);
    vec![p.x + ux * rp, p.y + uy * rp, c.x - ux * rc, c.y - uy * rc]
}

pub(crate) fn build(
    t: &DynamicTree,
    l: &LayoutSequence,
    plan: &TimingPlan,
    style: &Style,
) -> Timeline {
    let k = t.len();
    let radius = |s: &crate::model::Snapshot, n: &NodeId| style.radius * s.extent(n).width;
    let mut node_states: BTreeMap<String, (Vec<NodeId>, Vec<Option<Vec<f64>>>, f64)> =
        BTreeMap::new();
    let mut edge_states: BTreeMap<(String, String), (Vec<NodeId>, Vec<Option<Vec<f64>>>)> =
        BTreeMap::new();
    for (i, s) in t.snapshots().iter().enumerate() {
        for n in s.preorder() {
            let p = l.get(s.index(), &n).expect("layout covers the tree");
            let entry = node_states
                .entry(key(&n, style.cut_motion))
                .or_insert_with(|| (Vec::new(), vec![None; k], radius(s, &n)));
            if !entry.0.contains(&n) {
                entry.0.push(n.clone());
            }
            entry.1[i] = Some(vec![p.x, p.y]);
        }
        for (p, c) in s.edges() {
            let (pp, pc) = (l.get(s.index(), &p).unwrap(), l.get(s.index(), &c).unwrap());
            let g = edge_geometry(pp, radius(s, &p), pc, radius(s, &c));
            let entry = edge_states
                .entry((key(&p, style.cut_motion), key(&c, style.cut_motion)))
                .or_insert_with(|| (Vec::new(), vec![None; k]));
            if entry.0.is_empty() {
                entry.0 = vec![p.clone(), c.clone()];
            }
            entry.1[i] = Some(g);
        }
    }
    let nodes = node_states
        .into_iter()
        .map(|(label, (ids, states, r))| {
            let (geometry, opacity) = tracks(&states, plan);
            let label = match style.cut_motion {
                CutMotion::Move => label,
                CutMotion::Crossfade => ids[0].name().to_string(),
            };
            Element {
                ids,
                label,
                radius: r,
                geometry,
                opacity,
            }
        })
        .collect();
    let edges = edge_states
        .into_values()
        .map(|(ids, states)| {
            let (geometry, opacity) = tracks(&states, plan);
            Element {
                ids,
                label: String::new(),
                radius: 0.0,
                geometry,
                opacity,
            }
        })
        .collect();
    Timeline {
        nodes,
        edges,
        times: plan.times.clone(),
    }
}
