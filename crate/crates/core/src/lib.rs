//! Order-based recognition of grounded stick and hook graphs, plus the
//! reductions and gadget checks built on it.
#![allow(clippy::needless_range_loop)]


pub mod feasibility;
pub mod gadget_lab;
pub mod gadgets;
pub mod geometry;
pub mod graph;
pub mod recognizer;
pub mod reduce_biphook;
pub mod reduce_sat;

pub use feasibility::{check_order, extremal_reaches, prefix_prunable, FeasibilityReport, Model, ReachAssignment, VertexOrder};
pub use graph::{Graph, Side, VertexId};
