//! Variable-exponent Lebesgue and Morrey norms on grids, the fractional
//! integral and maximal operators, and a harness that measures weighted
//! inequality ratios over test-function families.

pub mod admissibility;
pub mod casefile;
pub mod cli;
pub mod error;
pub mod exponent;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod lemmas;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod root;

pub use error::{Error, Result};
pub use exponent::{ExponentField, FieldExpr, LogHolderReport};
pub use geometry::Point;
pub use grid::{build_grid, BallSubset, DomainGrid, DomainSpec, GridFunction, ShapeKind};
pub use root::NormResult;
