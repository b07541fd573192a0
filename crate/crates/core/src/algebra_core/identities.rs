use nalgebra::{DMatrix, DVector};

use super::carnot::{nilpotency_step, CarnotStructure};
use super::structure::StructureTable;
use crate::error::{invalid, Result};
use crate::numeric::{extrapolate_to_zero, ladder_diagnostic, LadderDiagnostic};

/// Extrapolated limit of a quantity sampled on an ε ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub value: DVector<f64>,
    pub diagnostic: LadderDiagnostic,
    pub samples: Vec<DVector<f64>>,
}

pub(crate) fn check_ladder(eps: &[f64]) -> Result<()> {
    if eps.len() < 3 {
        return invalid("ε ladder needs at least 3 entries");
    }
    if eps.iter().any(|&e| !(e > 0.0) || !e.is_finite()) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("ε ladder must be positive and strictly decreasing");
    }
    Ok(())
}

pub(crate) fn extrapolate(eps: &[f64], samples: Vec<DVector<f64>>) -> LimitEstimate {
    let value = extrapolate_to_zero(eps, &samples);
    let diagnostic = ladder_diagnostic(eps, &samples);
    LimitEstimate { value, diagnostic, samples }
}

/// Default geometric ladder `0.1 · 2^{-i}`.
pub fn default_ladder(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.1 * 0.5f64.powi(i as i32)).collect()
}

/// `lim_{ε→0} δ_ε^{-1} [δ_ε x, δ_ε y]` for the input bracket, in adapted coordinates.
///
/// The sampled quantity is a polynomial in ε, so the Neville extrapolation is
/// exact once the ladder has more points than that polynomial's degree.
pub fn nilpotent_bracket_limit(
    carnot: &CarnotStructure,
    x: &DVector<f64>,
    y: &DVector<f64>,
    eps_ladder: &[f64],
) -> Result<LimitEstimate> {
    check_ladder(eps_ladder)?;
    let samples = eps_ladder
        .iter()
        .map(|&e| {
            let b = carnot.original().bracket(&carnot.dilate(e, x), &carnot.dilate(e, y));
            // Divide rather than dilate by 1/ε: graded inputs then return the
            // bracket bit for bit.
            DVector::from_fn(b.len(), |k, _| b[k] / e.powi(carnot.layer_of()[k] as i32))
        })
        .collect();
    Ok(extrapolate(eps_ladder, samples))
}

/// Residuals of the identity `[[X,U]_G,V]_N + [U,[X,V]_G]_N = [X,[U,V]_N]_G`
/// and of its dilation companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicResidual {
    pub identity: f64,
    /// `max_ε ‖δ_ε^{-1}[X, δ_ε Y]_N − δ_ε^{-1}[X, δ_ε Y]_G − ([X,Y]_N − [X,Y]_G)‖`
    /// with `Y = U`.
    pub dilation: f64,
}

pub fn magic_identity_residual(
    carnot: &CarnotStructure,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> MagicResidual {
    let (g, n) = (carnot.original(), carnot.nilpotent());
    let lhs = n.bracket(&g.bracket(x, u), v) + n.bracket(u, &g.bracket(x, v));
    let rhs = g.bracket(x, &n.bracket(u, v));
    let base = n.bracket(x, u) - g.bracket(x, u);
    let dilation = [0.1, 0.5, 2.0, 10.0]
        .iter()
        .map(|&e| {
            let du = carnot.dilate(e, u);
            let d = carnot.dilate(1.0 / e, &(n.bracket(x, &du) - g.bracket(x, &du)));
            (d - &base).norm()
        })
        .fold(0.0, f64::max);
    MagicResidual { identity: (lhs - rhs).norm(), dilation }
}

/// `Σ_{i<terms} ad_X^i / (i+1)!`, the series `(e^{ad} − 1)/ad` truncated.
pub fn left_translation_series(table: &StructureTable, x: &DVector<f64>, terms: usize) -> DMatrix<f64> {
    let ad = table.ad(x);
    let dim = table.dim();
    let mut power = DMatrix::identity(dim, dim);
    let mut out = DMatrix::zeros(dim, dim);
    let mut fact = 1.0;
    for i in 0..terms {
        fact *= (i + 1) as f64;
        out += &power / fact;
        power = &ad * power;
    }
    out
}

/// Left-translation derivative series for the nilpotent bracket of `carnot`;
/// the series stops after `step` terms.
pub fn left_translation_derivative(carnot: &CarnotStructure, x: &DVector<f64>) -> DMatrix<f64> {
    left_translation_series(carnot.nilpotent(), x, carnot.step())
}

/// Same series for an arbitrary bracket. Non-nilpotent brackets need an
/// explicit number of terms.
pub fn left_translation_derivative_for(
    table: &StructureTable,
    x: &DVector<f64>,
    terms: Option<usize>,
) -> Result<DMatrix<f64>> {
    match (terms, nilpotency_step(table)) {
        (Some(t), _) => Ok(left_translation_series(table, x, t)),
        (None, Some(step)) => Ok(left_translation_series(table, x, step.max(1))),
        (None, None) => invalid("non-nilpotent bracket needs an explicit truncation order"),
    }
}

/// Bernoulli coefficients of `z / (1 − e^{−z})`.
const TODD: [f64; 7] = [1.0, 0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0];

/// Exact Jacobian of `y ↦ x · y` at `y = 0`, `ad_x / (1 − e^{−ad_x})`.
///
/// Agrees with `left_translation_derivative` through step 2 and differs from
/// step 3 on (coefficient 1/12 against 1/6 on `ad²`).
pub fn left_translation_jacobian(carnot: &CarnotStructure, x: &DVector<f64>) -> DMatrix<f64> {
    let ad = carnot.nilpotent().ad(x);
    let dim = carnot.dim();
    let mut power = DMatrix::identity(dim, dim);
    let mut out = DMatrix::zeros(dim, dim);
    for c in TODD.iter().take(carnot.step()) {
        out += &power * *c;
        power = &ad * power;
    }
    out
}
