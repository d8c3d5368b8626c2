// Index loops read more naturally than iterator chains in the matrix code.
#![allow(clippy::needless_range_loop)]

pub mod constants;
pub mod geometry;
pub mod jigsaw;
pub mod surface;
pub mod torsor;

pub use geometry::Rational;
