//! Weisfeiler-Leman refinement on k-tuples with canonical class order.

pub mod coloring;
mod refine;

pub use coloring::{ClassDescriptor, TupleColoring};
pub use refine::{atomic_types, counting_type_order, wl_equivalent, wl_refine};

pub(crate) use coloring::tuple_count;
pub(crate) use refine::{canonical_ranks_of_slices, canonical_ranks_u128, side_counts};
