//! Animated drawings of dynamic trees.
//!
//! A dynamic tree is a sequence of ordered rooted forests. This crate parses
//! a small text format for them, lays every snapshot out with node positions
//! that stay put as long as the tree structure around them allows, checks the
//! resulting drawings against a set of aesthetic criteria and renders them as
//! animated SVG.

pub mod criteria;
pub mod cuts;
pub mod exec;
pub mod generate;
pub mod layout;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod render;
pub mod supergraph;

pub use exec::Execution;
pub use model::*;
