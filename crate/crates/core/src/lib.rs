//! Exact computations with nilpotent Lie superalgebras given by structure constants.

pub mod catalog;
pub mod cohomology;
pub mod exactla;
pub mod exprlang;
pub mod gamma23;
pub mod invariants;
pub mod orbitrel;
pub mod scalars;
pub mod series;
pub mod superalg;

pub use exprlang::{Expr, ExprError};
pub use scalars::{FieldElem, Rational, ScalarError};
pub use series::{Limit, Series, SeriesError};
pub use superalg::{AlgebraError, GradedDim, GradedVector, SuperAlgebra};
