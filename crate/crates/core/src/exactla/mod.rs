//! Dense exact linear algebra, univariate polynomials and a Groebner emptiness test.

mod groebner;
mod matrix;
mod upoly;

pub use groebner::{groebner_basis, ideal_triviality, GroebnerCaps, Mono, Poly, PolySystem, Triviality};
pub use matrix::{
    inverse, inverse_series, rank, rref, solve, solve_series, solve_series_matrix, span_basis, span_rank, Invertible,
    LinAlgError, Matrix, Rref, Scalar,
};
pub use upoly::UPoly;
