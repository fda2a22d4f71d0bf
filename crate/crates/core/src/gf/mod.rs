//! Exact arithmetic and linear algebra over prime fields.

mod encode;
mod field;
pub(crate) mod linalg;
mod matrix;
pub mod text;

pub use encode::{layer_compose, layer_decompose, square_decode, square_encode, SquareEncoding};
pub use field::{PrimeField, MAX_MODULUS};
pub use linalg::{Echelon, Span};
pub use matrix::{FieldMatrix, FieldVector};

