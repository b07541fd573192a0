use nalgebra::{DMatrix, DVector};

use super::gh::{tangent_cone_experiment, ConeStep};
use super::space::FiniteMetricSpace;
use crate::algebra_core::{CarnotStructure, StructureConstant, StructureTable};
use crate::error::{invalid, Result};
use crate::group_ops::{cc_distance_upper_with, CcConfig, CcProblem, GroupLaw};

/// `[X, Y]_λ = δ_λ [δ_{1/λ} X, δ_{1/λ} Y]` for the input bracket, in adapted
/// coordinates. Tends to `[·,·]_N` as `λ → ∞`.
pub fn rescaled_table(carnot: &CarnotStructure, lambda: f64) -> Result<StructureTable> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return invalid("λ must be positive");
    }
    let w = carnot.layer_of();
    let entries: Vec<StructureConstant> = carnot
        .original()
        .entries()
        .iter()
        .map(|e| StructureConstant::new(e.i, e.j, e.k, e.c * lambda.powi(w[e.k] as i32 - w[e.i] as i32 - w[e.j] as i32)))
        .collect();
    StructureTable::new(carnot.dim(), &entries)
}

/// Group law of `[·,·]_λ`. Since `δ_λ` carries horizontal paths of `G` to
/// horizontal paths of this law with lengths multiplied by `λ`, its CC
/// distance is `λ d_G(δ_{1/λ} x, δ_{1/λ} y)`.
pub fn rescaled_law(carnot: &CarnotStructure, lambda: f64, order: usize) -> Result<GroupLaw> {
    GroupLaw::new(rescaled_table(carnot, lambda)?, order)
}

/// Upper-bound CC distances between `points` under `problem`, closed under
/// shortest paths, with the optimal controls of each pair (row-major over
/// `i < j`) for warm starts.
pub fn cc_distance_space(
    problem: &CcProblem,
    points: &[DVector<f64>],
    cfg: &CcConfig,
    warm: Option<&[Vec<f64>]>,
) -> Result<(FiniteMetricSpace, Vec<Vec<f64>>)> {
    let n = points.len();
    let mut d = DMatrix::zeros(n, n);
    let mut paths = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let seed: &[Vec<f64>] = match warm {
                Some(w) => std::slice::from_ref(&w[paths.len()]),
                None => &[],
            };
            let r = cc_distance_upper_with(problem, &points[i], &points[j], cfg, seed)?;
            d[(i, j)] = r.length;
            d[(j, i)] = r.length;
            paths.push(r.path.controls.iter().flat_map(|c| c.iter().cloned()).collect());
        }
    }
    Ok((FiniteMetricSpace::path_closure(d)?, paths))
}

/// Tangent-cone experiment at the identity of `G`: for each `λ` the samples
/// `δ_{1/λ} p_i` with distance `λ d_G` against the same `p_i` in the
/// nilpotentisation `N`.
///
/// Both sides use [`cc_distance_upper_with`]; the `G` side is warm-started
/// from the `N` geodesics.
pub fn carnot_cone_experiment(
    carnot: &CarnotStructure,
    points: &[DVector<f64>],
    lambda_ladder: &[f64],
    order: usize,
    cfg: &CcConfig,
) -> Result<(FiniteMetricSpace, Vec<ConeStep>)> {
    if points.iter().any(|p| p.len() != carnot.dim()) {
        return invalid(format!("sample points must have length {}", carnot.dim()));
    }
    let horizontal = carnot.horizontal_dim();
    let n_law = GroupLaw::carnot(carnot)?;
    let n_problem = CcProblem { law: &n_law, horizontal, layers: Some(carnot.layer_of()) };
    let (reference, warm) = cc_distance_space(&n_problem, points, cfg, None)?;
    let steps = tangent_cone_experiment(
        |lambda| {
            let law = rescaled_law(carnot, lambda, order)?;
            let problem = CcProblem { law: &law, horizontal, layers: None };
            Ok(cc_distance_space(&problem, points, cfg, Some(&warm))?.0)
        },
        lambda_ladder,
        &reference,
    )?;
    Ok((reference, steps))
}
