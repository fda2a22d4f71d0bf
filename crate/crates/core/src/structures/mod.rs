//! Ordered graphs, relational structures and the CFI construction.

mod cfi;
mod gadget;
mod graph;
mod relational;

pub use cfi::{AutomorphismBasis, CfiStructure, TwistVector, GROUP_BUDGET};
pub use gadget::{cfi_to_graph, graph_to_cfi, DEGREE_CONSTANT};
pub use graph::{OrderedGraph, SimpleGraph, CATALOG};
pub use relational::{Relation, Structure};

pub(crate) use graph::check_permutation;
