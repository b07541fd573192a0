use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra_core::{check_ladder, extrapolate, unit, CarnotStructure, LimitEstimate};
use crate::error::{invalid, Result};
use crate::group_ops::{homogeneous_norm, GroupLaw, NormKind, MAX_ORDER};
use crate::numeric::seeded_rng;

/// A map between points of the same Carnot group, in adapted exponential
/// coordinates.
pub trait GroupMap: Sync {
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>>;
}

impl<F> GroupMap for F
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>> + Sync,
{
    fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self(x)
    }
}

pub fn left_translation(law: &GroupLaw, a: DVector<f64>) -> impl GroupMap + '_ {
    move |x: &DVector<f64>| Ok(law.mul(&a, x))
}

pub fn right_translation(law: &GroupLaw, a: DVector<f64>) -> impl GroupMap + '_ {
    move |x: &DVector<f64>| Ok(law.mul(x, &a))
}

pub fn dilation(carnot: &CarnotStructure, lambda: f64) -> impl GroupMap + '_ {
    move |x: &DVector<f64>| Ok(carnot.dilate(lambda, x))
}

pub fn linear_map(matrix: DMatrix<f64>) -> impl GroupMap {
    move |x: &DVector<f64>| Ok(&matrix * x)
}

/// `F_ε(y) = δ_ε^{-1}(f(x)^{-1} f(x δ_ε y))`.
pub fn finite_difference(
    carnot: &CarnotStructure,
    law: &GroupLaw,
    f: &dyn GroupMap,
    x: &DVector<f64>,
    eps: f64,
    y: &DVector<f64>,
) -> Result<DVector<f64>> {
    if x.len() != carnot.dim() || y.len() != carnot.dim() {
        return invalid(format!("expected vectors of length {}", carnot.dim()));
    }
    let fx = f.apply(x)?;
    let moved = f.apply(&law.mul(x, &carnot.dilate(eps, y)))?;
    let diff = law.mul(&law.inv(&fx), &moved);
    Ok(DVector::from_fn(diff.len(), |k, _| diff[k] / eps.powi(carnot.layer_of()[k] as i32)))
}

/// Candidate derivative with its linearity residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCandidate {
    pub matrix: DMatrix<f64>,
    /// `max ‖F[e_i,e_j]_N − [F e_i, F e_j]_N‖` over basis pairs (exact for bilinear maps).
    pub morphism_residual: f64,
    /// Largest entry outside the grade-diagonal blocks; zero iff `F δ_ε = δ_ε F`.
    pub dilation_residual: f64,
}

impl LinearCandidate {
    pub fn new(carnot: &CarnotStructure, matrix: DMatrix<f64>) -> Result<Self> {
        let n = carnot.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return invalid(format!("expected a {n}x{n} matrix"));
        }
        let table = carnot.nilpotent();
        let mut morphism: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let lhs = &matrix * table.basis_bracket(i, j);
                let rhs = table.bracket(&matrix.column(i).into_owned(), &matrix.column(j).into_owned());
                morphism = morphism.max((lhs - rhs).norm());
            }
        }
        let layer = carnot.layer_of();
        let mut dilation: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if layer[r] != layer[c] {
                    dilation = dilation.max(matrix[(r, c)].abs());
                }
            }
        }
        Ok(Self { matrix, morphism_residual: morphism, dilation_residual: dilation })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearClass {
    /// Invertible, grade preserving group morphism.
    HL,
    /// Morphism that is singular or does not commute with dilations.
    EndOnly,
    NotLinear,
}

pub fn classify_linear(candidate: &LinearCandidate, tol: f64) -> LinearClass {
    let scale = candidate.matrix.amax().max(1.0);
    if candidate.morphism_residual > tol * scale * scale {
        return LinearClass::NotLinear;
    }
    let n = candidate.matrix.nrows();
    let invertible = candidate.matrix.clone().svd(false, false).singular_values.min() > tol * scale * (n as f64);
    if invertible && candidate.dilation_residual <= tol * scale {
        LinearClass::HL
    } else {
        LinearClass::EndOnly
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    /// Sup-discrepancy at the finest ε is below tolerance.
    Converged,
    /// Discrepancy shrinks along the ladder but is still above tolerance.
    Converging,
    Divergent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PansuEstimate {
    pub candidate: LinearCandidate,
    /// `(ε, sup_y ‖(D y)^{-1} F_ε(y)‖)` along the ladder. The Euclidean norm of
    /// the group difference is used because the homogeneous norm would take
    /// square roots of rounding noise in higher layers.
    pub discrepancies: Vec<(f64, f64)>,
    pub status: Convergence,
}

/// Basis directions plus `random` points on the unit `|·|_∞` sphere.
pub fn probe_set(carnot: &CarnotStructure, random: usize, seed: u64) -> Vec<DVector<f64>> {
    let n = carnot.dim();
    let mut probes: Vec<DVector<f64>> = (0..n).map(|i| unit(n, i)).collect();
    let mut rng = seeded_rng(seed);
    while probes.len() < n + random {
        let y = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let r = homogeneous_norm(carnot, &y, NormKind::Inf);
        if r > 0.0 {
            probes.push(carnot.dilate(1.0 / r, &y));
        }
    }
    probes
}

/// Default probes: basis directions and 32 random unit points, seed 0.
pub fn default_probes(carnot: &CarnotStructure) -> Vec<DVector<f64>> {
    probe_set(carnot, 32, 0)
}

/// Least-squares grade-block-diagonal matrix `D` with `D y ≈ F(y)`.
fn fit_block_diagonal(carnot: &CarnotStructure, probes: &[DVector<f64>], values: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let n = carnot.dim();
    let mut m = DMatrix::zeros(n, n);
    for l in 1..=carnot.step() {
        let r = carnot.layer_range(l);
        let y = DMatrix::from_fn(r.len(), probes.len(), |i, p| probes[p][r.start + i]);
        let f = DMatrix::from_fn(r.len(), values.len(), |i, p| values[p][r.start + i]);
        let pinv = y.pseudo_inverse(1e-12).map_err(|e| crate::error::CarnotError::InvalidInput(e.to_string()))?;
        let block = f * pinv;
        m.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(&block);
    }
    Ok(m)
}

/// Fits the Pansu derivative of `f` at `x` from finite differences on the
/// probes and reports how the sup-discrepancy evolves along the ladder.
///
/// Divergence is an outcome, not an error: right translations by non-central
/// elements produce finite differences whose off-grade part grows like `1/ε`.
pub fn pansu_derivative_estimate(
    carnot: &CarnotStructure,
    f: &dyn GroupMap,
    x: &DVector<f64>,
    eps_ladder: &[f64],
    probes: &[DVector<f64>],
    tol: f64,
) -> Result<PansuEstimate> {
    check_ladder(eps_ladder)?;
    let n = carnot.dim();
    if probes.iter().any(|p| p.len() != n) {
        return invalid("probe dimension mismatch");
    }
    let span = DMatrix::from_columns(probes);
    for l in 1..=carnot.step() {
        let r = carnot.layer_range(l);
        if span.rows(r.start, r.len()).rank(1e-12) < r.len() {
            return invalid(format!("probes do not span layer {l}"));
        }
    }
    let law = GroupLaw::carnot(carnot)?;
    let samples: Vec<Vec<DVector<f64>>> = eps_ladder
        .iter()
        .map(|&eps| {
            probes
                .par_iter()
                .map(|y| finite_difference(carnot, &law, f, x, eps, y))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let finest = samples.last().expect("ladder is non-empty");
    let matrix = fit_block_diagonal(carnot, probes, finest)?;
    let discrepancies: Vec<(f64, f64)> = eps_ladder
        .iter()
        .zip(&samples)
        .map(|(&eps, vals)| {
            let sup = probes
                .iter()
                .zip(vals)
                .map(|(y, v)| law.mul(&law.inv(&(&matrix * y)), v).norm())
                .fold(0.0, f64::max);
            (eps, sup)
        })
        .collect();
    let first = discrepancies[0].1;
    let last = discrepancies[discrepancies.len() - 1].1;
    let status = if last <= tol {
        Convergence::Converged
    } else if discrepancies.windows(2).all(|w| w[1].1 >= w[0].1) || last >= first {
        Convergence::Divergent
    } else {
        Convergence::Converging
    };
    Ok(PansuEstimate { candidate: LinearCandidate::new(carnot, matrix)?, discrepancies, status })
}

/// `β(x, y) = lim_{ε→0} δ_ε^{-1}((δ_ε x)·(δ_ε y))` for the input group law
/// (BCH through order 6), in adapted coordinates.
pub fn beta_limit(carnot: &CarnotStructure, x: &DVector<f64>, y: &DVector<f64>, eps_ladder: &[f64]) -> Result<LimitEstimate> {
    check_ladder(eps_ladder)?;
    if x.len() != carnot.dim() || y.len() != carnot.dim() {
        return invalid(format!("expected vectors of length {}", carnot.dim()));
    }
    let law = GroupLaw::original(carnot, MAX_ORDER)?;
    let layer = carnot.layer_of();
    let samples = eps_ladder
        .iter()
        .map(|&e| {
            let p = law.mul(&carnot.dilate(e, x), &carnot.dilate(e, y));
            DVector::from_fn(p.len(), |k, _| p[k] / e.powi(layer[k] as i32))
        })
        .collect();
    Ok(extrapolate(eps_ladder, samples))
}
