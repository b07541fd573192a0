use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One stored structure constant: `[e_i, e_j]` has coefficient `c` on `e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

impl StructureConstant {
    pub fn new(i: usize, j: usize, k: usize, c: f64) -> Self {
        Self { i, j, k, c }
    }
}

/// A finite-dimensional real Lie algebra with a distinguished generating set.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraSpec {
    pub name: Option<String>,
    pub dim: usize,
    pub structure: Vec<StructureConstant>,
    pub generators: Vec<usize>,
}

/// Sparse antisymmetric bracket with entries stored for `i < j` only.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    dim: usize,
    entries: Vec<StructureConstant>,
}

impl StructureTable {
    /// Builds the table from raw entries. An entry with `i > j` is used (with
    /// flipped sign) only when no `i < j` entry for the same target exists;
    /// `i == j` entries are dropped.
    pub fn new(dim: usize, raw: &[StructureConstant]) -> Result<Self> {
        let mut dense = vec![0.0; dim * dim * dim];
        let mut forward = vec![false; dim * dim * dim];
        for e in raw {
            if e.i >= dim || e.j >= dim || e.k >= dim {
                return invalid(format!(
                    "structure entry ({}, {}, {}) out of range for dim {dim}",
                    e.i, e.j, e.k
                ));
            }
            if !e.c.is_finite() {
                return invalid("non-finite structure constant");
            }
            if e.i < e.j {
                let at = (e.i * dim + e.j) * dim + e.k;
                dense[at] += e.c;
                forward[at] = true;
            }
        }
        for e in raw.iter().filter(|e| e.i > e.j) {
            let at = (e.j * dim + e.i) * dim + e.k;
            if !forward[at] {
                dense[at] -= e.c;
            }
        }
        Ok(Self::from_dense(dim, &dense, 0.0))
    }

    /// From a dense `c[(i*dim + j)*dim + k]` tensor, keeping `i < j` entries
    /// with `|c| > drop_below`.
    pub fn from_dense(dim: usize, dense: &[f64], drop_below: f64) -> Self {
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                for k in 0..dim {
                    let c = dense[(i * dim + j) * dim + k];
                    if c != 0.0 && c.abs() > drop_below {
                        entries.push(StructureConstant::new(i, j, k, c));
                    }
                }
            }
        }
        Self { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[StructureConstant] {
        &self.entries
    }

    pub fn is_abelian(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.c.abs()).fold(0.0, f64::max)
    }

    /// Coefficient of `e_k` in `[e_i, e_j]`.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        let (a, b, s) = if i < j { (i, j, 1.0) } else if i > j { (j, i, -1.0) } else { return 0.0 };
        self.entries
            .iter()
            .filter(|e| e.i == a && e.j == b && e.k == k)
            .map(|e| s * e.c)
            .sum()
    }

    /// `[x, y]`.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        self.bracket_into(x.as_slice(), y.as_slice(), out.as_mut_slice());
        out
    }

    /// Accumulates `[x, y]` into `out` (which is overwritten).
    pub fn bracket_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in &self.entries {
            let w = x[e.i] * y[e.j] - x[e.j] * y[e.i];
            if w != 0.0 {
                out[e.k] += e.c * w;
            }
        }
    }

    /// Matrix of `ad_x = [x, .]`.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for e in &self.entries {
            // [x, e_j] picks up x_i c and [x, e_i] picks up -x_j c.
            m[(e.k, e.j)] += e.c * x[e.i];
            m[(e.k, e.i)] -= e.c * x[e.j];
        }
        m
    }

    /// Bracket of basis vectors.
    pub fn basis_bracket(&self, i: usize, j: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        for k in 0..self.dim {
            v[k] = self.coeff(i, j, k);
        }
        v
    }
}

/// Outcome of `validate_algebra`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub antisymmetry_residual: f64,
    pub jacobi_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl LieAlgebraSpec {
    pub fn new(dim: usize, structure: Vec<StructureConstant>, generators: Vec<usize>) -> Self {
        Self { name: None, dim, structure, generators }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    /// Checked bracket table of the algebra.
    pub fn table(&self) -> Result<StructureTable> {
        StructureTable::new(self.dim, &self.structure)
    }

    pub(crate) fn check_generators(&self) -> Result<()> {
        let mut seen = vec![false; self.dim];
        for &g in &self.generators {
            if g >= self.dim {
                return invalid(format!("generator index {g} out of range for dim {}", self.dim));
            }
            if seen[g] {
                return invalid(format!("generator index {g} repeated"));
            }
            seen[g] = true;
        }
        Ok(())
    }
}

/// Antisymmetry and Jacobi residuals of an algebra description.
///
/// Both residuals must stay below `1e-10 * max(1, cmax)^2`.
pub fn validate_algebra(spec: &LieAlgebraSpec) -> Result<ValidationReport> {
    if spec.dim == 0 {
        return invalid("dimension must be at least 1");
    }
    spec.check_generators()?;
    let table = spec.table()?;
    let dim = spec.dim;

    // Raw entries given for both orders must cancel; diagonal entries must vanish.
    let mut raw = vec![0.0; dim * dim * dim];
    for e in &spec.structure {
        raw[(e.i * dim + e.j) * dim + e.k] += e.c;
    }
    let mut antisym: f64 = 0.0;
    for i in 0..dim {
        for j in i..dim {
            for k in 0..dim {
                let a = raw[(i * dim + j) * dim + k];
                let b = raw[(j * dim + i) * dim + k];
                if i == j {
                    antisym = antisym.max(a.abs());
                } else if a != 0.0 && b != 0.0 {
                    antisym = antisym.max((a + b).abs());
                }
            }
        }
    }

    let jacobi = jacobi_residual(&table);
    let cmax = spec.structure.iter().map(|e| e.c.abs()).fold(1.0, f64::max);
    let tolerance = 1e-10 * cmax * cmax;
    Ok(ValidationReport {
        antisymmetry_residual: antisym,
        jacobi_residual: jacobi,
        tolerance,
        passed: antisym <= tolerance && jacobi <= tolerance,
    })
}

/// `max_{i<j<k} |[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]|`.
pub fn jacobi_residual(table: &StructureTable) -> f64 {
    let dim = table.dim();
    let basis: Vec<DVector<f64>> = (0..dim)
        .map(|i| DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 }))
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in i + 1..dim {
            let eij = table.bracket(&basis[i], &basis[j]);
            for k in j + 1..dim {
                let ejk = table.bracket(&basis[j], &basis[k]);
                let eki = table.bracket(&basis[k], &basis[i]);
                let r = table.bracket(&eij, &basis[k])
                    + table.bracket(&ejk, &basis[i])
                    + table.bracket(&eki, &basis[j]);
                worst = worst.max(r.amax());
            }
        }
    }
    worst
}

