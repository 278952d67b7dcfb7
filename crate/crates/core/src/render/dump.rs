//! Layout dump: a JSON document whose first field names the format version.
//!
//! ```text
//! {
//!   "format": "dyntree-layout/1",
//!   "params": { "sibling_sep": 1.0, "level_sep": 1.0, "subtree_pad": 1.0 },
//!   "snapshots": [ { "index": 1, "time": 0.0, "nodes": { "a": { "x": 0.0, "y": 0.0 } } } ],
//!   "cuts": [ { "node": "a", "after_index": 2, "renamed_to": "a'" } ],
//!   "violations": [ ... ]
//! }
//! ```
//!
//! Numbers are written in shortest round-trip form, so parsing a dump gives
//! back bit-identical coordinates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::Violation;
use crate::model::{Cut, CutSet, DynamicTree, LayoutParams, LayoutSequence, NodeId, Point};

pub const DUMP_FORMAT: &str = "dyntree-layout/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpSnapshot {
    pub index: usize,
    pub time: f64,
    pub nodes: BTreeMap<NodeId, Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutDump {
    pub format: String,
    pub params: LayoutParams,
    pub snapshots: Vec<DumpSnapshot>,
    pub cuts: Vec<Cut>,
    pub violations: Vec<Violation>,
}

impl LayoutDump {
    pub fn layout(&self) -> LayoutSequence {
        LayoutSequence {
            params: self.params,
            frames: self.snapshots.iter().map(|s| s.nodes.clone()).collect(),
        }
    }
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("malformed layout dump: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported layout dump format {0:?}")]
    Format(String),
}

pub fn export_layout_dump(
    t: &DynamicTree,
    l: &LayoutSequence,
    cuts: &CutSet,
    violations: &[Violation],
) -> String {
    let dump = LayoutDump {
        format: DUMP_FORMAT.to_string(),
        params: l.params,
        snapshots: t
            .snapshots()
            .iter()
            .map(|s| DumpSnapshot {
                index: s.index(),
                time: s.time(),
                nodes: l.frame(s.index()).clone(),
            })
            .collect(),
        cuts: cuts.cuts.clone(),
        violations: violations.to_vec(),
    };
    let mut out = serde_json::to_string_pretty(&dump).expect("dump serializes");
    out.push('\n');
    out
}

pub fn parse_layout_dump(text: &str) -> Result<LayoutDump, DumpError> {
    let dump: LayoutDump = serde_json::from_str(text)?;
    if dump.format != DUMP_FORMAT {
        return Err(DumpError::Format(dump.format));
    }
    Ok(dump)
}
