//! Finite-stage workbench for crooked tree maps, inverse-limit towers,
//! odometer Cantor sets, Denjoy-Rees family conditions and entropy
//! realization.

pub mod crookedness;
pub mod entropy_lab;
pub mod error;
pub mod json;
pub mod odometer_measure;
pub mod pl_tree;
pub mod rees_scaffold;
pub mod report;
pub mod scalar;
pub mod tower_limit;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Q = num::rational::BigRational;
/// Exact PL map.
pub type QMap = pl_tree::PLMap<Q>;
/// Floating-point PL map, for plotting and cross-checks.
pub type FMap = pl_tree::PLMap<f64>;
/// Exact tree point.
pub type QPoint = pl_tree::TreePoint<Q>;
