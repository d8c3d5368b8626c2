//! Exact rational polyhedral geometry.
//!
//! Polytopes are held as lists of inequalities `<a, x> + b >= 0` with
//! arbitrary-precision rational data. Construction enumerates vertices once,
//! which doubles as the boundedness check; volumes, slices and the
//! disjointness test are built on top of that vertex list.

mod affine;
mod cone;
pub(crate) mod linalg;
mod polytope;
pub mod serde_rational;
mod vertices;
mod volume;

use thiserror::Error;

pub use affine::AffineForm;
pub use cone::{cone_contains_line, ConeCertificate, RationalCone};
pub use polytope::{enumerate_vertices, exact_volume, interiors_disjoint, slice, HPolytope, VPolytope};
pub use vertices::VertexMethod;

/// Exact rational number used throughout the crate.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("polyhedron is unbounded (nonzero recession direction)")]
    UnboundedInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone has no generators")]
    EmptyGeneratorList,
    #[error("cone generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("linear map is not invertible")]
    SingularTransform,
}

/// Shorthand for `p/q` as a [`Rational`].
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}
