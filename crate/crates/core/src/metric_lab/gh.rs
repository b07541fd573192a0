use rayon::prelude::*;

use super::space::FiniteMetricSpace;
use crate::error::{invalid, Result};

/// A map `f: X → Y` between finite spaces, `f(i) = map[i]`, offered as an
/// ε-isometry for a claimed ε.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometryWitness<'a> {
    pub domain: &'a FiniteMetricSpace,
    pub codomain: &'a FiniteMetricSpace,
    pub map: Vec<usize>,
    pub claimed_eps: Option<f64>,
}

impl<'a> IsometryWitness<'a> {
    pub fn new(domain: &'a FiniteMetricSpace, codomain: &'a FiniteMetricSpace, map: Vec<usize>) -> Result<Self> {
        if map.len() != domain.len() {
            return invalid(format!("map has {} entries for {} points", map.len(), domain.len()));
        }
        if map.iter().any(|&j| j >= codomain.len()) {
            return invalid("map sends a point outside the codomain");
        }
        Ok(Self { domain, codomain, map, claimed_eps: None })
    }

    /// Index-to-index correspondence between spaces of equal size.
    pub fn identity(domain: &'a FiniteMetricSpace, codomain: &'a FiniteMetricSpace) -> Result<Self> {
        if domain.len() != codomain.len() {
            return invalid(format!("spaces have {} and {} points", domain.len(), codomain.len()));
        }
        Self::new(domain, codomain, (0..domain.len()).collect())
    }

    pub fn claiming(mut self, eps: f64) -> Self {
        self.claimed_eps = Some(eps);
        self
    }
}

/// `sup |d_Y(f(x), f(x')) − d_X(x, x')|` over all pairs of the domain.
pub fn distortion(w: &IsometryWitness) -> f64 {
    let n = w.domain.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| (w.codomain.distance(w.map[i], w.map[j]) - w.domain.distance(i, j)).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest distance from a codomain point to the image.
pub fn net_radius(w: &IsometryWitness) -> f64 {
    (0..w.codomain.len())
        .into_par_iter()
        .map(|y| w.map.iter().map(|&fx| w.codomain.distance(y, fx)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhBound {
    pub distortion: f64,
    pub net_radius: f64,
    /// `max(distortion, net radius)`: the witness is an ε-isometry for this ε.
    pub eps: f64,
    /// `2 ε`.
    pub bound: f64,
    /// The claimed ε, if any, is at least the actual one.
    pub claim_holds: bool,
}

/// Gromov-Hausdorff upper bound `2 ε` from an ε-isometry witness.
pub fn gh_upper_bound(w: &IsometryWitness) -> GhBound {
    let distortion = distortion(w);
    let net_radius = net_radius(w);
    let eps = distortion.max(net_radius);
    let claim_holds = w.claimed_eps.is_none_or(|c| eps <= c);
    GhBound { distortion, net_radius, eps, bound: 2.0 * eps, claim_holds }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidpointReport {
    pub eps: f64,
    pub pairs_checked: usize,
    /// Pairs `(i, j)`, `i < j`, without an ε-midpoint.
    pub failures: Vec<(usize, usize)>,
    /// Largest `min_z max{d(x,z), d(z,y)} − d(x,y)/2` over all pairs.
    pub worst_excess: f64,
}

impl MidpointReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Looks for `z` with `max{d(x,z), d(z,y)} ≤ d(x,y)/2 + ε` for every pair.
pub fn path_metric_midpoint_check(space: &FiniteMetricSpace, eps: f64) -> MidpointReport {
    let n = space.len();
    let rows: Vec<(Vec<(usize, usize)>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut fails = Vec::new();
            let mut worst = f64::NEG_INFINITY;
            for j in i + 1..n {
                let best = (0..n)
                    .map(|z| space.distance(i, z).max(space.distance(z, j)))
                    .fold(f64::INFINITY, f64::min);
                let excess = best - 0.5 * space.distance(i, j);
                worst = worst.max(excess);
                if excess > eps {
                    fails.push((i, j));
                }
            }
            (fails, worst)
        })
        .collect();
    let mut failures = Vec::new();
    let mut worst_excess = f64::NEG_INFINITY;
    for (f, w) in rows {
        failures.extend(f);
        worst_excess = worst_excess.max(w);
    }
    MidpointReport { eps, pairs_checked: n * n.saturating_sub(1) / 2, failures, worst_excess: worst_excess.max(0.0) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeStep {
    pub lambda: f64,
    pub bound: GhBound,
}

/// GH bounds between rescaled samples `(X, λ d)` around a base point and a
/// reference space, matched index to index.
///
/// `sampler(λ)` returns the rescaled space; its points must correspond to
/// the reference points in order, as when both are sampled on the same
/// coordinate grid.
pub fn tangent_cone_experiment(
    sampler: impl Fn(f64) -> Result<FiniteMetricSpace>,
    lambda_ladder: &[f64],
    reference: &FiniteMetricSpace,
) -> Result<Vec<ConeStep>> {
    if lambda_ladder.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return invalid("λ values must be positive");
    }
    lambda_ladder
        .iter()
        .map(|&lambda| {
            let space = sampler(lambda)?;
            let w = IsometryWitness::identity(&space, reference)?;
            Ok(ConeStep { lambda, bound: gh_upper_bound(&w) })
        })
        .collect()
}

/// `b_{k+1} ≤ (1 + slack) b_k` along the sequence.
pub fn decreasing_with_slack(bounds: &[f64], slack: f64) -> bool {
    bounds.windows(2).all(|w| w[1] <= (1.0 + slack) * w[0])
}
