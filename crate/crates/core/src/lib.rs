//! Numerical toolkit for Carnot groups and sub-Riemannian geometry on Lie
//! groups: nilpotentisation, group arithmetic in exponential coordinates,
//! Carnot-Carathéodory distances, Pansu derivatives, Heisenberg symplectic
//! lifts and metric-space experiments.

pub mod algebra_core;
pub mod error;
pub mod group_ops;
pub mod heisenberg;
pub mod metric_lab;
pub mod numeric;
pub mod pansu;
pub mod report;

pub use algebra_core::{CarnotStructure, LieAlgebraSpec, StructureTable};
pub use error::{CarnotError, Result};

/// Coordinates of a group element in exponential coordinates of the first kind.
pub type GroupElement = nalgebra::DVector<f64>;
