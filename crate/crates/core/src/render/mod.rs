//! SVG output: an animated document using SMIL, a static picture of the
//! animation at a given time, and a JSON layout dump.
//!
//! The change into snapshot `i` happens during the window that ends at the
//! snapshot's time, so at every snapshot time the picture shows exactly that
//! snapshot's layout.

mod dump;
mod timeline;

use std::fmt::Write as _;

use crate::model::{DynamicTree, LayoutSequence};

pub use dump::{
    export_layout_dump, parse_layout_dump, DumpError, DumpSnapshot, LayoutDump, DUMP_FORMAT,
};

use timeline::{Element, Segment, Timeline, Track};

pub const DEFAULT_TRANSITION: f64 = 0.5;

/// When each snapshot is shown and how long changes take.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingPlan {
    /// Display time of each snapshot, in order.
    pub times: Vec<f64>,
    /// Seconds a move takes, cut down to the gap before the snapshot.
    pub transition: f64,
    /// Seconds an appearance or disappearance takes, cut down likewise.
    pub fade: f64,
}

impl TimingPlan {
    pub fn new(t: &DynamicTree) -> Self {
        Self::with_durations(t, DEFAULT_TRANSITION, None)
    }

    /// `fade` defaults to `transition`. Negative durations count as zero.
    pub fn with_durations(t: &DynamicTree, transition: f64, fade: Option<f64>) -> Self {
        let transition = transition.max(0.0);
        TimingPlan {
            times: t.snapshots().iter().map(|s| s.time()).collect(),
            transition,
            fade: fade.unwrap_or(transition).max(0.0),
        }
    }

    /// Gap before snapshot `i` (0-based, `i >= 1`).
    pub fn gap(&self, i: usize) -> f64 {
        self.times[i] - self.times[i - 1]
    }

    pub fn transition_window(&self, i: usize) -> f64 {
        self.transition.min(self.gap(i))
    }

    pub fn fade_window(&self, i: usize) -> f64 {
        self.fade.min(self.gap(i))
    }
}

/// What a cut-renamed node looks like in the animation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CutMotion {
    /// One element moves from the old place to the new one.
    #[default]
    Move,
    /// The old element fades out while the new one fades in.
    Crossfade,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Easing {
    #[default]
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    /// Node radius per unit of node width, in layout units.
    pub radius: f64,
    /// Pixels per layout unit.
    pub unit_px: f64,
    /// Blank border around the drawing, in layout units.
    pub margin: f64,
    pub cut_motion: CutMotion,
    pub easing: Easing,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            radius: 0.35,
            unit_px: 40.0,
            margin: 0.5,
            cut_motion: CutMotion::default(),
            easing: Easing::default(),
        }
    }
}

/// Fixed-point with at most six decimals and no trailing zeros.
pub(crate) fn num(v: f64) -> String {
    let mut s = format!("{v:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

struct Canvas {
    width: f64,
    height: f64,
    ox: f64,
    oy: f64,
    scale: f64,
}

fn canvas(l: &LayoutSequence, tl: &Timeline, style: &Style) -> Canvas {
    let r = tl.nodes.iter().map(|e| e.radius).fold(0.0, f64::max);
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut first = true;
    for p in l.frames.iter().flat_map(|f| f.values()) {
        if first {
            (x0, x1, y0, y1) = (p.x, p.x, p.y, p.y);
            first = false;
        }
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let pad = r + style.margin;
    Canvas {
        width: (x1 - x0 + 2.0 * pad) * style.unit_px,
        height: (y1 - y0 + 2.0 * pad) * style.unit_px,
        ox: (pad - x0) * style.unit_px,
        oy: (pad - y0) * style.unit_px,
        scale: style.unit_px,
    }
}

fn open_document(out: &mut String, c: &Canvas) {
    let (w, h) = (num(c.width), num(c.height));
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"<g transform="translate({},{}) scale({})" font-family="sans-serif" font-size="0.4" text-anchor="middle">"#,
        num(c.ox),
        num(c.oy),
        num(c.scale)
    );
}

fn close_document(out: &mut String) {
    out.push_str("</g>\n</svg>\n");
}

fn opacity_attr(a: f64) -> String {
    if a >= 1.0 {
        String::new()
    } else {
        format!(r#" opacity="{}""#, num(a))
    }
}

fn translate(v: &[f64]) -> String {
    format!("{} {}", num(v[0]), num(v[1]))
}

/// `<animate>` elements for one attribute list driven by `track`.
fn animations(out: &mut String, track: &Track, attrs: &[&str]) {
    for Segment {
        begin,
        dur,
        from,
        to,
    } in &track.segments
    {
        for (k, a) in attrs.iter().enumerate() {
            if *dur > 0.0 {
                let _ = writeln!(
                    out,
                    r#"<animate attributeName="{a}" from="{}" to="{}" begin="{}s" dur="{}s" fill="freeze"/>"#,
                    num(from[k]),
                    num(to[k]),
                    num(*begin),
                    num(*dur)
                );
            } else {
                let _ = writeln!(
                    out,
                    r#"<set attributeName="{a}" to="{}" begin="{}s" fill="freeze"/>"#,
                    num(to[k]),
                    num(*begin)
                );
            }
        }
    }
}

fn translations(out: &mut String, track: &Track) {
    for Segment {
        begin,
        dur,
        from,
        to,
    } in &track.segments
    {
        if *dur > 0.0 {
            let _ = writeln!(
                out,
                r#"<animateTransform attributeName="transform" type="translate" from="{}" to="{}" begin="{}s" dur="{}s" fill="freeze"/>"#,
                translate(from),
                translate(to),
                num(*begin),
                num(*dur)
            );
        } else {
            let _ = writeln!(
                out,
                r#"<animateTransform attributeName="transform" type="translate" calcMode="discrete" values="{}" begin="{}s" dur="indefinite"/>"#,
                translate(to),
                num(*begin)
            );
        }
    }
}

fn edge_title(e: &Element) -> String {
    format!("{} -> {}", e.ids[0], e.ids[1])
}

fn node_title(e: &Element) -> String {
    e.ids
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_edge(out: &mut String, e: &Element, g: &[f64], alpha: f64, animated: bool) {
    let _ = write!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"{}>"#,
        num(g[0]),
        num(g[1]),
        num(g[2]),
        num(g[3]),
        opacity_attr(alpha)
    );
    let _ = write!(out, "<title>{}</title>", escape(&edge_title(e)));
    if animated && (!e.geometry.segments.is_empty() || !e.opacity.segments.is_empty()) {
        out.push('\n');
        animations(out, &e.geometry, &["x1", "y1", "x2", "y2"]);
        animations(out, &e.opacity, &["opacity"]);
    }
    out.push_str("</line>\n");
}

fn write_node(out: &mut String, e: &Element, g: &[f64], alpha: f64, animated: bool) {
    let _ = writeln!(
        out,
        r#"<g transform="translate({},{})"{}><title>{}</title>"#,
        num(g[0]),
        num(g[1]),
        opacity_attr(alpha),
        escape(&node_title(e))
    );
    let _ = writeln!(
        out,
        r#"<circle r="{}" fill="white" stroke="black" stroke-width="0.05"/><text y="0.14">{}</text>"#,
        num(e.radius),
        escape(&e.label)
    );
    if animated {
        translations(out, &e.geometry);
        animations(out, &e.opacity, &["opacity"]);
    }
    out.push_str("</g>\n");
}

/// Animated SVG of the whole sequence. Edges are drawn below nodes; both are
/// listed in name order.
pub fn emit_animated_svg(
    t: &DynamicTree,
    l: &LayoutSequence,
    plan: &TimingPlan,
    style: &Style,
) -> String {
    let tl = timeline::build(t, l, plan, style);
    let mut out = String::new();
    open_document(&mut out, &canvas(l, &tl, style));
    out.push_str("<g stroke=\"black\" stroke-width=\"0.05\">\n");
    for e in &tl.edges {
        write_edge(&mut out, e, &e.geometry.initial, e.opacity.initial[0], true);
    }
    out.push_str("</g>\n");
    for e in &tl.nodes {
        write_node(&mut out, e, &e.geometry.initial, e.opacity.initial[0], true);
    }
    close_document(&mut out);
    out
}

/// Static picture of the animation at time `at`. Invisible elements are
/// left out.
pub fn emit_snapshot_svg(
    t: &DynamicTree,
    l: &LayoutSequence,
    plan: &TimingPlan,
    style: &Style,
    at: f64,
) -> String {
    let tl = timeline::build(t, l, plan, style);
    let mut out = String::new();
    open_document(&mut out, &canvas(l, &tl, style));
    out.push_str("<g stroke=\"black\" stroke-width=\"0.05\">\n");
    for e in &tl.edges {
        let alpha = e.opacity.eval(at)[0];
        if alpha > 0.0 {
            write_edge(&mut out, e, &e.geometry.eval(at), alpha, false);
        }
    }
    out.push_str("</g>\n");
    for e in &tl.nodes {
        let alpha = e.opacity.eval(at)[0];
        if alpha > 0.0 {
            write_node(&mut out, e, &e.geometry.eval(at), alpha, false);
        }
    }
    close_document(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::layout_dynamic_tree;
    use crate::model::LayoutParams;
    use crate::parser::parse_document;

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1.0 / 3.0), "0.333333");
        assert_eq!(num(-1e-9), "0");
        assert_eq!(num(40.0), "40");
    }

    #[test]
    fn windows_are_clamped() {
        let t = parse_document("{[when=0s] a} {[when=0.2s] a} {[when=3s] a}").unwrap();
        let p = TimingPlan::with_durations(&t, 0.5, Some(1.0));
        assert_eq!(p.transition_window(1), 0.2);
        assert_eq!(p.fade_window(1), 0.2);
        assert_eq!(p.transition_window(2), 0.5);
        assert_eq!(p.fade_window(2), 1.0);
    }

    #[test]
    fn single_snapshot_has_no_animation() {
        let t = parse_document("{[when=1] a -> {b, c}}").unwrap();
        let l = layout_dynamic_tree(&t, &LayoutParams::default()).unwrap();
        let svg = emit_animated_svg(&t, &l, &TimingPlan::new(&t), &Style::default());
        assert!(!svg.contains("<animate"));
        assert!(!svg.contains("<set"));
        let snap = emit_snapshot_svg(&t, &l, &TimingPlan::new(&t), &Style::default(), 0.0);
        assert_eq!(svg, snap);
    }

    #[test]
    fn deleted_node_fades_before_next_snapshot() {
        let t = parse_document(include_str!("../../fixtures/fig1.dtree")).unwrap();
        let l = layout_dynamic_tree(&t, &LayoutParams::default()).unwrap();
        let svg = emit_animated_svg(&t, &l, &TimingPlan::new(&t), &Style::default());
        let at = svg.find("<title>12</title>").unwrap();
        let end = at + svg[at..].find("</g>").unwrap();
        assert!(svg[at..end].contains(
            r#"<animate attributeName="opacity" from="1" to="0" begin="1.5s" dur="0.5s" fill="freeze"/>"#
        ));
    }

    #[test]
    fn midpoint_of_a_move() {
        let t = parse_document("{[when=0s] a -> {b, }} {[when=2s] a -> {c, b}}").unwrap();
        let l = layout_dynamic_tree(&t, &LayoutParams::default()).unwrap();
        let plan = TimingPlan::new(&t);
        let tl = timeline::build(&t, &l, &plan, &Style::default());
        let b = tl.nodes.iter().find(|e| e.label == "b").unwrap();
        let start = l.get(1, &crate::model::NodeId::new("b")).unwrap().x;
        let end = l.get(2, &crate::model::NodeId::new("b")).unwrap().x;
        assert_eq!(end - start, 2.0);
        assert_eq!(b.geometry.eval(1.75)[0], start + 1.0);
        assert_eq!(b.geometry.eval(2.0)[0], end);
        assert_eq!(b.geometry.eval(99.0)[0], end);
    }
}
