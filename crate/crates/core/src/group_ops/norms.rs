use nalgebra::DVector;

use crate::algebra_core::CarnotStructure;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `Σ ‖x_i‖^{1/i}`
    One,
    /// `max ‖x_i‖^{1/i}`
    Inf,
}

pub fn homogeneous_norm(carnot: &CarnotStructure, x: &DVector<f64>, kind: NormKind) -> f64 {
    let parts = carnot
        .layer_norms(x)
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.powf(1.0 / (i + 1) as f64));
    match kind {
        NormKind::One => parts.sum(),
        NormKind::Inf => parts.fold(0.0, f64::max),
    }
}

/// `x ∈ Box(r)`, i.e. `‖x_i‖ ≤ r^i` in every layer.
pub fn box_membership(carnot: &CarnotStructure, r: f64, x: &DVector<f64>) -> bool {
    carnot
        .layer_norms(x)
        .into_iter()
        .enumerate()
        .all(|(i, n)| n <= r.powi(i as i32 + 1))
}

/// Empirical Ball-Box constants on a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxConstants {
    /// `min |x|_∞ / d(0,x)`: `Box(c r) ⊆ B(0, r)` on the sample.
    pub c_hat: f64,
    /// `max |x|_∞ / d(0,x)`: `B(0, r) ⊆ Box(C r)` on the sample.
    pub big_c_hat: f64,
    pub ratios: Vec<f64>,
}

/// Ball-Box constants from points and their distances to the origin.
///
/// Points at the origin carry no information and are skipped.
pub fn box_constants_estimate(
    carnot: &CarnotStructure,
    samples: &[(DVector<f64>, f64)],
) -> Result<BoxConstants> {
    let ratios: Vec<f64> = samples
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|(x, d)| homogeneous_norm(carnot, x, NormKind::Inf) / d)
        .collect();
    if ratios.is_empty() {
        return invalid("box constants need at least one sample away from the origin");
    }
    let c_hat = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let big_c_hat = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(BoxConstants { c_hat, big_c_hat, ratios })
}
