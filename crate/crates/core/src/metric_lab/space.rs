use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Absolute slack allowed in the symmetry and triangle checks.
pub const METRIC_TOL: f64 = 1e-12;

/// A finite metric space given by its distance matrix; points are the
/// indices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    d: DMatrix<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality, each to `METRIC_TOL`.
    pub fn new(d: DMatrix<f64>) -> Result<Self> {
        let n = d.nrows();
        if d.ncols() != n {
            return invalid(format!("distance matrix must be square, got {}x{}", n, d.ncols()));
        }
        if d.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("distances must be finite and nonnegative");
        }
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return invalid(format!("nonzero diagonal entry at {i}"));
            }
            for j in i + 1..n {
                if (d[(i, j)] - d[(j, i)]).abs() > METRIC_TOL {
                    return invalid(format!("asymmetric entries at ({i}, {j})"));
                }
                if d[(i, j)] == 0.0 {
                    return invalid(format!("distinct points {i} and {j} at distance zero"));
                }
            }
        }
        let worst = triangle_violation(&d);
        if worst > METRIC_TOL {
            return invalid(format!("triangle inequality violated by {worst:e}"));
        }
        Ok(Self { d })
    }

    /// Distances `metric(p_i, p_j)`, evaluated once per unordered pair.
    pub fn from_points<P: Sync>(points: &[P], metric: impl Fn(&P, &P) -> f64 + Sync) -> Result<Self> {
        Self::new(symmetric_matrix(points.len(), |i, j| metric(&points[i], &points[j])))
    }

    /// Euclidean distances between coordinate points.
    pub fn euclidean(points: &[DVector<f64>]) -> Result<Self> {
        Self::from_points(points, |a, b| (a - b).norm())
    }

    /// Shortest-path closure of a symmetric matrix of upper bounds.
    ///
    /// When the entries bound a length metric from above, so does the closure,
    /// and the closure always satisfies the triangle inequality.
    pub fn path_closure(mut d: DMatrix<f64>) -> Result<Self> {
        let n = d.nrows();
        if d.ncols() != n {
            return invalid("distance matrix must be square");
        }
        for k in 0..n {
            for i in 0..n {
                let dik = d[(i, k)];
                for j in 0..n {
                    let via = dik + d[(k, j)];
                    if via < d[(i, j)] {
                        d[(i, j)] = via;
                    }
                }
            }
        }
        Self::new(d)
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.nrows() == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn diameter(&self) -> f64 {
        self.d.max()
    }

    /// The same points with every distance multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return invalid("scale factor must be positive");
        }
        Ok(Self { d: &self.d * lambda })
    }
}

/// Largest `d(i,k) − d(i,j) − d(j,k)` over all triples.
pub fn triangle_violation(d: &DMatrix<f64>) -> f64 {
    let n = d.nrows();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst: f64 = 0.0;
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(d[(i, k)] - d[(i, j)] - d[(j, k)]);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

pub(crate) fn symmetric_matrix(n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|i| (i + 1..n).map(|j| f(i, j)).collect()).collect();
    let mut d = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (off, v) in row.iter().enumerate() {
            let j = i + 1 + off;
            d[(i, j)] = *v;
            d[(j, i)] = *v;
        }
    }
    d
}
