//! End-to-end run on a parsed tree: cut, lay out, check and render.

use crate::criteria::{check_all, CriteriaReport};
use crate::exec::Execution;
use crate::layout::{layout_dynamic_tree_with, LayoutError, LayoutOptions, LayoutOutcome};
use crate::model::{DynamicTree, LayoutParams};
use crate::render::{
    emit_animated_svg, emit_snapshot_svg, export_layout_dump, Style, TimingPlan, DEFAULT_TRANSITION,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub params: LayoutParams,
    pub layout: LayoutOptions,
    pub transition: f64,
    pub fade: Option<f64>,
    pub style: Style,
    pub execution: Execution,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            params: LayoutParams::default(),
            layout: LayoutOptions::default(),
            transition: DEFAULT_TRANSITION,
            fade: None,
            style: Style::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Compiled {
    pub outcome: LayoutOutcome,
    pub report: CriteriaReport,
    pub plan: TimingPlan,
    pub style: Style,
}

pub fn compile(t: &DynamicTree, opts: &Options) -> Result<Compiled, LayoutError> {
    let outcome = layout_dynamic_tree_with(t, &opts.params, &opts.layout)?;
    let report = check_all(
        &outcome.tree,
        &outcome.layout,
        &outcome.cuts,
        opts.execution,
    );
    let plan = TimingPlan::with_durations(&outcome.tree, opts.transition, opts.fade);
    Ok(Compiled {
        outcome,
        report,
        plan,
        style: opts.style.clone(),
    })
}

impl Compiled {
    pub fn animated_svg(&self) -> String {
        emit_animated_svg(
            &self.outcome.tree,
            &self.outcome.layout,
            &self.plan,
            &self.style,
        )
    }

    pub fn snapshot_svg(&self, at: f64) -> String {
        emit_snapshot_svg(
            &self.outcome.tree,
            &self.outcome.layout,
            &self.plan,
            &self.style,
            at,
        )
    }

    pub fn dump(&self) -> String {
        export_layout_dump(
            &self.outcome.tree,
            &self.outcome.layout,
            &self.outcome.cuts,
            &self.report.all(),
        )
    }
}
