//! Exact linear algebra over ℤ, ℚ and 𝔽p.

mod complex;
mod field;
mod matrix;
mod reduce;
mod smith;

pub(crate) use complex::serialize_bigint_seq;
pub use complex::{induced_image_rank, ChainComplexZ, DegreeHomology, HomologySummary};
pub use field::{is_prime, Field, FieldKind, PrimeField, Rationals, Ring};
pub use matrix::SparseIntMatrix;
pub use reduce::{axpy, convert_column, kernel_over, rank_over, ColumnReducer, SparseVec};
pub use smith::{
    integer_kernel_via_smith, invariant_chain, kernel_basis, saturate, smith, smith_factors, SmithForm, SmithTransforms,
};
