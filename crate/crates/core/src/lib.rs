//! Invariant maps over finite fields: CFI structures, Weisfeiler-Leman and
//! invertible-map refinement, coherent algebras and simultaneous similarity.

pub mod algebra;
pub mod cocyclic;
pub mod coherent;
pub mod error;
pub mod gf;
pub mod imrefine;
pub mod simsim;
pub mod structures;
pub mod wl;

pub use algebra::{ModuleBasis, PermGroupGens};
pub use coherent::{AlgebraBasis, CoherentConfig};
pub use error::{Error, Result};
pub use simsim::{ColouredIndexPair, MatrixFamilyPair};
pub use gf::{FieldMatrix, FieldVector, PrimeField};
pub use structures::{CfiStructure, OrderedGraph, Structure};
pub use wl::TupleColoring;
