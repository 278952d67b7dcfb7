//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use dyntree::criteria::{check_all, check_stability, TOLERANCE};
use dyntree::cuts::{
    brute_force_vertex_cover, exact_min_cuts, greedy_acyclic_cuts, reduce_vertex_cover, CutSide,
    ExactError, ExactOptions, UndirectedGraph,
};
use dyntree::generate::{
    disjoint_copies, random_graph, random_tree, rotation_sequence, skeleton_sequence,
};
use dyntree::layout::{
    layout_dynamic_tree, layout_dynamic_tree_with, layout_static_reference, ContourStrategy,
    LayoutOptions,
};
use dyntree::parser::parse_document;
use dyntree::pipeline::{compile, Options};
use dyntree::render::parse_layout_dump;
use dyntree::supergraph::{build_supergraph, is_acyclic};
use dyntree::{DynamicTree, Execution, LayoutParams, LayoutSequence, NodeId, Slot, Snapshot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn fixture(name: &str) -> DynamicTree {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_document(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn within(limit: Duration, took: Duration) -> Result<(), String> {
    if took < limit {
        Ok(())
    } else {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    }
}

fn random_acyclic_conformance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut nodes = 0;
    for case in 0..300 {
        let k = rng.gen_range(1..=8);
        let t = skeleton_sequence(&mut rng, k, 40);
        if !is_acyclic(&build_supergraph(&t)) {
            return Err(format!(
                "case {case}: generator produced a cyclic supergraph"
            ));
        }
        nodes += t.total_size();
        let opts = LayoutOptions {
            require_acyclic: true,
            ..Default::default()
        };
        let out = layout_dynamic_tree_with(&t, &LayoutParams::default(), &opts)
            .map_err(|e| e.to_string())?;
        let report = check_all(&out.tree, &out.layout, &out.cuts, Execution::default());
        if let Some(v) = report.all().first() {
            return Err(format!("case {case}: {v}"));
        }
    }
    let took = start.elapsed();
    within(Duration::from_secs(5), took)?;
    Ok(format!(
        "300 trees, {nodes} node occurrences, 0 violations in {took:.2?}"
    ))
}

fn static_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = LayoutParams::default();
    for case in 0..200 {
        let n = rng.gen_range(1..=50);
        let s = random_tree(&mut rng, n, 1, 0.0);
        let reference = layout_static_reference(&s, &p);
        let t = DynamicTree::new(vec![s]).map_err(|e| e.to_string())?;
        let l = layout_dynamic_tree(&t, &p).map_err(|e| e.to_string())?;
        if l.frames[0] != reference {
            return Err(format!(
                "case {case} ({n} nodes) differs from the static reference"
            ));
        }
    }
    Ok("200 random trees identical".into())
}

/// One frame per snapshot, each laid out on its own.
fn per_snapshot_layout(t: &DynamicTree, p: &LayoutParams) -> LayoutSequence {
    LayoutSequence {
        params: *p,
        frames: t
            .snapshots()
            .iter()
            .map(|s| layout_static_reference(s, p))
            .collect(),
    }
}

fn fig3_single_cut() -> Verdict {
    let t = fixture("fig3.dtree");
    let (_, greedy) = greedy_acyclic_cuts(&t, CutSide::Head);
    let exact = exact_min_cuts(&t, ExactOptions::default()).map_err(|e| e.to_string())?;
    let c = compile(&t, &Options::default()).map_err(|e| e.to_string())?;
    let st = &c.report.stability;
    let naive = check_stability(&t, &per_snapshot_layout(&t, &LayoutParams::default())).len();
    let detail = format!(
        "greedy={} exact={} unexpected_stability={} cut_boundary_moves={} naive_stability={}",
        greedy.len(),
        exact.count(),
        st.unexpected,
        st.cut_boundary_moves,
        naive
    );
    let ok = greedy.len() == 1
        && exact.count() == 1
        && st.unexpected == 0
        && st.cut_boundary_moves == 1
        && naive >= 2;
    if ok {
        Ok(detail)
    } else {
        Err(format!("{detail}; expected greedy=1 exact=1 moves=1"))
    }
}

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut all = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return all;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        all.push(p.clone());
    }
}

fn connected(n: usize, pairs: &[(usize, usize)], mask: u32) -> bool {
    let mut seen = 1u32;
    loop {
        let before = seen;
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 && (seen >> a & 1 == 1 || seen >> b & 1 == 1) {
                seen |= 1 << a | 1 << b;
            }
        }
        if seen == before {
            return seen == (1 << n) - 1;
        }
    }
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices, found by minimizing the edge mask over all relabelings.
fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let maps: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| {
            pairs
                .iter()
                .map(|&(a, b)| index[&(p[a].min(p[b]), p[a].max(p[b]))])
                .collect()
        })
        .collect();
    let mut classes = BTreeSet::new();
    for mask in 0u32..1 << pairs.len() {
        if !connected(n, &pairs, mask) {
            continue;
        }
        let canon = maps
            .iter()
            .map(|m| {
                (0..pairs.len())
                    .filter(|&k| mask >> k & 1 == 1)
                    .fold(0u32, |acc, k| acc | 1 << m[k])
            })
            .min()
            .unwrap();
        classes.insert(canon);
    }
    classes
        .into_iter()
        .map(|mask| {
            (0..pairs.len())
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| pairs[k])
                .collect()
        })
        .collect()
}

fn graph(n: usize, edges: &[(usize, usize)]) -> UndirectedGraph {
    let mut g = UndirectedGraph::new();
    for v in 0..n {
        g.add_vertex(&format!("v{v}"));
    }
    for &(a, b) in edges {
        g.add_edge(&format!("v{a}"), &format!("v{b}"));
    }
    g
}

fn vertex_cover_equivalence() -> Verdict {
    // connected graphs up to isomorphism on 1..=6 vertices
    const KNOWN: [usize; 6] = [1, 1, 2, 6, 21, 112];
    let start = Instant::now();
    let mut graphs = Vec::new();
    for n in 1..=6 {
        let found = connected_graphs(n);
        if found.len() != KNOWN[n - 1] {
            return Err(format!(
                "enumerated {} connected graphs on {n} vertices, expected {}",
                found.len(),
                KNOWN[n - 1]
            ));
        }
        graphs.extend(found.into_iter().map(|e| graph(n, &e)));
    }
    let enumerated = graphs.len();
    let small = graphs.iter().filter(|g| g.vertex_count() <= 5).count();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    graphs.extend((0..50).map(|_| random_graph(&mut rng, 6, 0.5)));
    let opts = ExactOptions {
        limit: 62,
        ..Default::default()
    };
    for g in &graphs {
        let vc = brute_force_vertex_cover(g)
            .map_err(|e| e.to_string())?
            .len();
        let cuts = exact_min_cuts(&reduce_vertex_cover(g), opts)
            .map_err(|e| e.to_string())?
            .count();
        if vc != cuts {
            return Err(format!(
                "{:?}: vertex cover {vc}, exact cuts {cuts}",
                g.edges()
            ));
        }
    }
    let took = start.elapsed();
    within(Duration::from_secs(60), took)?;
    Ok(format!(
        "{enumerated} connected graphs ({small} on <=5 vertices) + 50 random on 6, all equal, {took:.2?}"
    ))
}

fn greedy_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut cyclic, mut solved, mut skipped) = (0, 0, 0);
    let opts = ExactOptions {
        budget: Some(200_000),
        ..Default::default()
    };
    for case in 0..500 {
        let k = rng.gen_range(2..=8);
        let keys = rng.gen_range(3..=10);
        let t = rotation_sequence(&mut rng, k, keys);
        if !is_acyclic(&build_supergraph(&t)) {
            cyclic += 1;
        }
        let (cut, greedy) = greedy_acyclic_cuts(&t, CutSide::Head);
        if !is_acyclic(&build_supergraph(&cut)) {
            return Err(format!("case {case}: greedy output is cyclic"));
        }
        match exact_min_cuts(&t, opts) {
            Ok(s) => {
                solved += 1;
                if greedy.len() < s.count() {
                    return Err(format!(
                        "case {case}: greedy {} < exact {}",
                        greedy.len(),
                        s.count()
                    ));
                }
            }
            Err(ExactError::TooLarge { .. } | ExactError::OverBudget { .. }) => skipped += 1,
        }
    }
    if cyclic == 0 {
        return Err("generator produced no cyclic supergraph".into());
    }
    Ok(format!(
        "500 trees ({cyclic} cyclic), exact ran on {solved}, skipped {skipped}"
    ))
}

/// Tidy layout of one ordered tree given as slot lists, recomputed here from
/// per-depth extremes with unit-width nodes and all separations 1. Slot `r`
/// sits 1 right of slot `r-1` or further if the subtrees demand it; a lone
/// slot counts as the first of two; the parent is centered over its slots.
fn tidy(children: &BTreeMap<String, Vec<Option<String>>>, root: &str) -> BTreeMap<String, f64> {
    struct Shape {
        rel: BTreeMap<String, f64>,
        lo: Vec<f64>,
        hi: Vec<f64>,
    }
    fn go(children: &BTreeMap<String, Vec<Option<String>>>, v: &str) -> Shape {
        let mut slots = children.get(v).cloned().unwrap_or_default();
        if slots.len() == 1 {
            slots.push(None);
        }
        let (mut acc_lo, mut acc_hi): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        let mut pos: Vec<f64> = Vec::new();
        let mut placed = Vec::new();
        for slot in &slots {
            let sub = slot.as_ref().map(|c| go(children, c));
            let mut x = pos.last().map_or(0.0, |p| p + 1.0);
            if let (Some(s), false) = (&sub, pos.is_empty()) {
                for d in 0..s.lo.len().min(acc_hi.len()) {
                    x = x.max(acc_hi[d] + 1.0 - s.lo[d]);
                }
            }
            if let Some(s) = &sub {
                for d in 0..s.lo.len() {
                    if d == acc_lo.len() {
                        acc_lo.push(x + s.lo[d]);
                        acc_hi.push(x + s.hi[d]);
                    }
                    acc_lo[d] = acc_lo[d].min(x + s.lo[d]);
                    acc_hi[d] = acc_hi[d].max(x + s.hi[d]);
                }
            }
            pos.push(x);
            placed.extend(sub.map(|s| (x, s)));
        }
        let mid = pos.last().map_or(0.0, |p| p / 2.0);
        let mut rel = BTreeMap::from([(v.to_string(), 0.0)]);
        for (x, s) in placed {
            for (n, dx) in s.rel {
                rel.insert(n, x - mid + dx);
            }
        }
        let mut lo = vec![-0.5];
        let mut hi = vec![0.5];
        lo.extend(acc_lo.iter().map(|a| a - mid));
        hi.extend(acc_hi.iter().map(|a| a - mid));
        Shape { rel, lo, hi }
    }
    go(children, root).rel
}

fn fig1_space_sharing() -> Verdict {
    let t = fixture("fig1.dtree");
    let l = layout_dynamic_tree(&t, &LayoutParams::default()).map_err(|e| e.to_string())?;
    let (a, b) = (NodeId::new("7"), NodeId::new("2"));
    let gap = |frames: &mut dyn Iterator<Item = (Option<f64>, Option<f64>)>| {
        frames
            .filter_map(|(x7, x2)| Some(x7? - x2?))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let synchronized = gap(&mut l
        .frames
        .iter()
        .map(|f| (f.get(&a).map(|p| p.x), f.get(&b).map(|p| p.x))));
    // baseline: one static layout of the union of all snapshots
    let mut union: BTreeMap<String, Vec<Option<String>>> = BTreeMap::new();
    for s in t.snapshots() {
        for (p, slots) in s.children_map() {
            let u = union.entry(p.to_string()).or_default();
            for (r, c) in slots.iter().enumerate() {
                if let Slot::Occupied(c) = c {
                    if u.len() <= r {
                        u.resize(r + 1, None);
                    }
                    u[r] = Some(c.to_string());
                }
            }
        }
    }
    let base = tidy(&union, "10");
    let baseline = base["7"] - base["2"];
    let detail = format!(
        "synchronized {synchronized}, supergraph baseline {baseline}, gap {}",
        baseline - synchronized
    );
    if synchronized < baseline - TOLERANCE {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn node_positions(svg: &str) -> Result<Vec<(Vec<String>, f64, f64)>, String> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| e.to_string())?;
    let scene = doc
        .root_element()
        .children()
        .find(|n| n.has_tag_name("g"))
        .ok_or("no scene group")?;
    let tf = scene.attribute("transform").ok_or("no scene transform")?;
    let nums = |s: &str| -> Vec<f64> {
        s.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-'))
            .filter(|w| !w.is_empty())
            .map(|w| w.parse().unwrap())
            .collect()
    };
    if nums(tf).len() != 3 {
        return Err(format!("scene transform {tf}"));
    }
    let mut out = Vec::new();
    for g in scene
        .children()
        .filter(|n| n.has_tag_name("g") && n.attribute("transform").is_some())
    {
        let v = nums(g.attribute("transform").unwrap());
        let title = g
            .children()
            .find(|n| n.has_tag_name("title"))
            .and_then(|n| n.text())
            .ok_or("node without title")?;
        let ids = title.split(' ').map(String::from).collect();
        out.push((ids, v[0], v[1]));
    }
    Ok(out)
}

fn rendering() -> Verdict {
    let t = fixture("fig1.dtree");
    let run =
        || compile(&t, &Options::default()).map(|c| (c.animated_svg(), c.snapshot_svg(3.75), c));
    let (anim, snap, c) = run().map_err(|e| e.to_string())?;
    let (anim2, snap2, _) = run().map_err(|e| e.to_string())?;
    if anim != anim2 || snap != snap2 {
        return Err("two runs differ".into());
    }
    let dir = format!("{}/tests/golden", env!("CARGO_MANIFEST_DIR"));
    for (name, body) in [("fig1.animated.svg", &anim), ("fig1.snapshot.svg", &snap)] {
        let path = format!("{dir}/{name}");
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            std::fs::write(&path, body).map_err(|e| e.to_string())?;
        }
        let golden = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
        if golden != *body {
            return Err(format!("{name} differs from the golden file"));
        }
    }
    let dump = parse_layout_dump(&c.dump()).map_err(|e| e.to_string())?;
    let mut emitted = vec![anim.clone(), snap.clone()];
    for s in &dump.snapshots {
        let svg = c.snapshot_svg(s.time);
        for (ids, x, y) in node_positions(&svg)? {
            let p = ids
                .iter()
                .find_map(|id| s.nodes.get(&NodeId::parse_name(id).unwrap()))
                .ok_or(format!("{ids:?} not in dump snapshot {}", s.index))?;
            if (p.x - x).abs() > TOLERANCE || (p.y - y).abs() > TOLERANCE {
                return Err(format!(
                    "{ids:?} at ({x}, {y}), dump says ({}, {})",
                    p.x, p.y
                ));
            }
        }
        emitted.push(svg);
    }
    for name in ["fig3.dtree", "avl.dtree", "bst.dtree"] {
        let c = compile(&fixture(name), &Options::default()).map_err(|e| e.to_string())?;
        emitted.push(c.animated_svg());
        emitted.extend(c.plan.times.iter().map(|&at| c.snapshot_svg(at)));
    }
    for svg in &emitted {
        roxmltree::Document::parse(svg).map_err(|e| e.to_string())?;
    }
    Ok(format!(
        "golden match, deterministic, {} snapshots match the dump, {} documents well-formed (single platform)",
        dump.snapshots.len(),
        emitted.len()
    ))
}

fn contour_scalability() -> Verdict {
    let t = fixture("avl.dtree");
    let steps: Vec<(usize, u64)> = [1, 2, 4]
        .iter()
        .map(|&c| {
            let scaled = disjoint_copies(&t, c);
            let opts = LayoutOptions {
                strategy: ContourStrategy::Threaded,
                ..Default::default()
            };
            let out = layout_dynamic_tree_with(&scaled, &LayoutParams::default(), &opts).unwrap();
            (scaled.total_size(), out.stats.contour_steps)
        })
        .collect();
    let ratios: Vec<f64> = steps
        .windows(2)
        .map(|w| w[1].1 as f64 / w[0].1 as f64)
        .collect();
    let detail = format!("(size, steps) {steps:?}, ratios {ratios:.3?}");
    if ratios.iter().all(|&r| r <= 2.5) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Transitions `i -> i+1` in which some node becomes an ancestor of its
/// former parent.
fn rotation_steps(t: &DynamicTree) -> BTreeSet<usize> {
    fn ancestors(s: &Snapshot) -> BTreeMap<String, BTreeSet<String>> {
        let mut parent = BTreeMap::new();
        for (p, c) in s.edges() {
            parent.insert(c.name().to_string(), p.name().to_string());
        }
        parent
            .keys()
            .map(|n| {
                let mut up = BTreeSet::new();
                let mut cur = n;
                while let Some(p) = parent.get(cur) {
                    up.insert(p.clone());
                    cur = p;
                }
                (n.clone(), up)
            })
            .collect()
    }
    let snaps = t.snapshots();
    (0..snaps.len().saturating_sub(1))
        .filter(|&i| {
            let next = ancestors(&snaps[i + 1]);
            snaps[i]
                .edges()
                .iter()
                .any(|(p, c)| next.get(p.name()).is_some_and(|up| up.contains(c.name())))
        })
        .map(|i| i + 1)
        .collect()
}

fn search_tree_sequences() -> Verdict {
    let bst = compile(&fixture("bst.dtree"), &Options::default()).map_err(|e| e.to_string())?;
    if !bst.outcome.cuts.is_empty() || !bst.report.all().is_empty() {
        return Err(format!(
            "bst: {} cuts, {} violations",
            bst.outcome.cuts.len(),
            bst.report.all().len()
        ));
    }
    let avl_in = fixture("avl.dtree");
    let avl = compile(&avl_in, &Options::default()).map_err(|e| e.to_string())?;
    let rotations = rotation_steps(&avl_in);
    let stray: Vec<_> = avl
        .outcome
        .cuts
        .cuts
        .iter()
        .filter(|c| !rotations.contains(&c.after_index))
        .collect();
    if !stray.is_empty() {
        return Err(format!(
            "avl cuts off rotation steps: {stray:?} (rotations after {rotations:?})"
        ));
    }
    if avl.report.stability.unexpected != 0 || avl.report.unexpected() != 0 {
        return Err(format!(
            "avl: {} unexpected violations",
            avl.report.unexpected()
        ));
    }
    bst.animated_svg();
    avl.animated_svg();
    Ok(format!(
        "bst 0 cuts and no violations; avl {} cuts, all at rotation steps {rotations:?}",
        avl.outcome.cuts.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("random acyclic conformance", random_acyclic_conformance),
        ("static equivalence", static_equivalence),
        ("fig3 single cut", fig3_single_cut),
        ("vertex cover equivalence", vertex_cover_equivalence),
        ("greedy soundness", greedy_soundness),
        ("fig1 space sharing", fig1_space_sharing),
        ("rendering", rendering),
        ("contour scalability", contour_scalability),
        ("search tree sequences", search_tree_sequences),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match verdict {
            Ok(d) => println!("criterion {} {name}: PASS ({d}) [{took:.2?}]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({d}) [{took:.2?}]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
