use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::filtration::{build_filtration, unit, Filtration};
use super::structure::{jacobi_residual, validate_algebra, LieAlgebraSpec, StructureConstant, StructureTable};
use crate::error::{invalid, CarnotError, Result};
use crate::numeric::rank;

/// Adapted basis of a filtration: every vector is a right-nested bracket of
/// generators, `[g_1, [g_2, … g_l]]`, and its layer is the word length `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedBasis {
    /// Columns are the basis vectors in input coordinates, sorted by layer.
    pub basis: DMatrix<f64>,
    pub layer_of: Vec<usize>,
    /// Generator positions (indices into the generator list) of each word.
    pub words: Vec<Vec<usize>>,
}

/// Graded (Carnot) structure attached to `(g, D)`: adapted basis, layers and
/// the nilpotentised bracket, together with the original bracket written in
/// the same basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CarnotStructure {
    pub name: Option<String>,
    dim: usize,
    layer_of: Vec<usize>,
    layer_dims: Vec<usize>,
    basis: DMatrix<f64>,
    basis_inv: DMatrix<f64>,
    words: Vec<Vec<usize>>,
    nilpotent: StructureTable,
    original: StructureTable,
}

/// Chooses the adapted basis in lexicographic word order.
///
/// Candidates of length `s` are `[g, b]` for generators `g` and the chosen
/// length `s-1` vectors `b`; a candidate is kept when it raises the rank.
pub fn build_graded_basis(spec: &LieAlgebraSpec, filt: &Filtration) -> Result<GradedBasis> {
    let table = spec.table()?;
    let dim = spec.dim;
    let gens: Vec<DVector<f64>> = spec.generators.iter().map(|&g| unit(dim, g)).collect();
    let dims = filt.dims();

    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut layer_of = Vec::new();
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut prev: Vec<usize> = Vec::new();

    for (s, &target) in dims.iter().enumerate() {
        let length = s + 1;
        if length > dim + 1 {
            return invalid("adapted basis search exceeded word length dim + 1");
        }
        let candidates: Vec<(Vec<usize>, DVector<f64>)> = if length == 1 {
            gens.iter().enumerate().map(|(a, g)| (vec![a], g.clone())).collect()
        } else {
            let mut c = Vec::new();
            for (a, g) in gens.iter().enumerate() {
                for &b in &prev {
                    let mut w = vec![a];
                    w.extend_from_slice(&words[b]);
                    c.push((w, table.bracket(g, &cols[b])));
                }
            }
            c
        };
        let mut chosen = Vec::new();
        for (w, v) in candidates {
            if cols.len() == target {
                break;
            }
            let before = cols.len();
            let mut trial = cols.clone();
            trial.push(v.clone());
            if rank(&DMatrix::from_columns(&trial)) > before {
                cols.push(v);
                layer_of.push(length);
                words.push(w);
                chosen.push(cols.len() - 1);
            }
        }
        if cols.len() != target {
            return Err(CarnotError::NotBracketGenerating { stabilized_dim: cols.len() });
        }
        prev = chosen;
    }
    Ok(GradedBasis { basis: DMatrix::from_columns(&cols), layer_of, words })
}

/// Nilpotentised structure constants: keep `C_ij^k` iff `l_i + l_j = l_k`.
pub fn nilpotentize(spec: &LieAlgebraSpec, graded: &GradedBasis) -> Result<CarnotStructure> {
    let table = spec.table()?;
    let dim = spec.dim;
    let basis_inv = graded
        .basis
        .clone()
        .try_inverse()
        .ok_or_else(|| CarnotError::InvalidInput("adapted basis is singular".into()))?;

    let mut g_dense = vec![0.0; dim * dim * dim];
    for i in 0..dim {
        for j in i + 1..dim {
            let b = table.bracket(&graded.basis.column(i).into_owned(), &graded.basis.column(j).into_owned());
            let c = &basis_inv * b;
            for k in 0..dim {
                g_dense[(i * dim + j) * dim + k] = c[k];
            }
        }
    }
    let scale = g_dense.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
    let drop = 1e-12 * scale;
    let mut n_dense = vec![0.0; dim * dim * dim];
    for i in 0..dim {
        for j in i + 1..dim {
            for k in 0..dim {
                let c = g_dense[(i * dim + j) * dim + k];
                let (li, lj, lk) = (graded.layer_of[i], graded.layer_of[j], graded.layer_of[k]);
                if li + lj == lk {
                    n_dense[(i * dim + j) * dim + k] = c;
                } else if li + lj < lk && c.abs() > 1e-10 * scale {
                    return Err(CarnotError::GradingInconsistency { i, j, k, coeff: c });
                }
            }
        }
    }
    let step = graded.layer_of.iter().copied().max().unwrap_or(0);
    let mut layer_dims = vec![0; step];
    for &l in &graded.layer_of {
        layer_dims[l - 1] += 1;
    }
    Ok(CarnotStructure {
        name: spec.name.clone(),
        dim,
        layer_of: graded.layer_of.clone(),
        layer_dims,
        basis: graded.basis.clone(),
        basis_inv,
        words: graded.words.clone(),
        nilpotent: StructureTable::from_dense(dim, &n_dense, drop),
        original: StructureTable::from_dense(dim, &g_dense, drop),
    })
}

impl CarnotStructure {
    /// Validation, filtration, adapted basis and nilpotentisation in one go.
    pub fn from_spec(spec: &LieAlgebraSpec) -> Result<Self> {
        let report = validate_algebra(spec)?;
        if !report.passed {
            return invalid(format!(
                "algebra fails validation (antisymmetry {:e}, Jacobi {:e})",
                report.antisymmetry_residual, report.jacobi_residual
            ));
        }
        let filt = build_filtration(spec)?;
        let graded = build_graded_basis(spec, &filt)?;
        nilpotentize(spec, &graded)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn layer_of(&self) -> &[usize] {
        &self.layer_of
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Index range of layer `i` (1-based) in the adapted basis.
    pub fn layer_range(&self, i: usize) -> Range<usize> {
        let start: usize = self.layer_dims[..i - 1].iter().sum();
        start..start + self.layer_dims[i - 1]
    }

    /// Dimension of the horizontal layer `V_1`.
    pub fn horizontal_dim(&self) -> usize {
        self.layer_dims.first().copied().unwrap_or(0)
    }

    /// `Q = Σ i dim V_i`.
    pub fn homogeneous_dimension(&self) -> usize {
        self.layer_dims.iter().enumerate().map(|(i, d)| (i + 1) * d).sum()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Bracket `[.,.]_N` in the adapted basis.
    pub fn nilpotent(&self) -> &StructureTable {
        &self.nilpotent
    }

    /// The input bracket written in the adapted basis.
    pub fn original(&self) -> &StructureTable {
        &self.original
    }

    /// Input bracket already graded (the input is itself Carnot).
    pub fn is_graded_input(&self) -> bool {
        let tol = 1e-12 * self.original.max_abs().max(1.0);
        let (d, n, g) = (self.dim, &self.nilpotent, &self.original);
        (0..d).all(|i| (i + 1..d).all(|j| (0..d).all(|k| (n.coeff(i, j, k) - g.coeff(i, j, k)).abs() <= tol)))
    }

    /// Input coordinates to adapted coordinates.
    pub fn to_adapted(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis_inv * x
    }

    pub fn from_adapted(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis * x
    }

    /// `δ_ε`: layer `i` scaled by `ε^i`.
    pub fn dilate(&self, eps: f64, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| x[k] * eps.powi(self.layer_of[k] as i32))
    }

    /// Euclidean norms of the layer components.
    pub fn layer_norms(&self, x: &DVector<f64>) -> Vec<f64> {
        (1..=self.step())
            .map(|i| self.layer_range(i).map(|k| x[k] * x[k]).sum::<f64>().sqrt())
            .collect()
    }

    /// Component of `x` in layer `i`, zero elsewhere.
    pub fn layer_part(&self, x: &DVector<f64>, i: usize) -> DVector<f64> {
        let r = self.layer_range(i);
        DVector::from_fn(self.dim, |k, _| if r.contains(&k) { x[k] } else { 0.0 })
    }

    /// Nilpotent structure as a standalone algebra spec (adapted coordinates,
    /// generators the first layer).
    pub fn nilpotent_spec(&self) -> LieAlgebraSpec {
        let mut spec = LieAlgebraSpec::new(
            self.dim,
            self.nilpotent.entries().to_vec(),
            self.layer_range(1).collect(),
        );
        spec.name = self.name.as_ref().map(|n| format!("{n}-nilpotentised"));
        spec
    }

    /// Jacobi residual of `[.,.]_N`.
    pub fn nilpotent_jacobi_residual(&self) -> f64 {
        jacobi_residual(&self.nilpotent)
    }

    /// `[V_1, V_i]_N = V_{i+1}` for every layer.
    pub fn generation_holds(&self) -> bool {
        (1..self.step()).all(|i| {
            let mut cols = Vec::new();
            for a in self.layer_range(1) {
                for b in self.layer_range(i) {
                    cols.push(self.nilpotent.basis_bracket(a, b));
                }
            }
            let m = DMatrix::from_columns(&cols);
            let next = self.layer_range(i + 1);
            let outside = (0..self.dim).filter(|k| !next.contains(k));
            let leak: f64 = outside.map(|k| m.row(k).amax()).fold(0.0, f64::max);
            leak <= 1e-12 && rank(&m) == self.layer_dims[i]
        })
    }
}

/// Constants ready to feed a `LieAlgebraSpec` from `(i, j, k, c)` tuples.
pub fn constants(list: &[(usize, usize, usize, f64)]) -> Vec<StructureConstant> {
    list.iter().map(|&(i, j, k, c)| StructureConstant::new(i, j, k, c)).collect()
}

/// Lower central series length, `None` when the algebra is not nilpotent.
pub fn nilpotency_step(table: &StructureTable) -> Option<usize> {
    let dim = table.dim();
    let floor = 1e-10 * table.max_abs().max(1.0);
    let basis: Vec<DVector<f64>> = (0..dim).map(|i| unit(dim, i)).collect();
    let mut current = DMatrix::identity(dim, dim);
    for step in 1..=dim {
        let mut cols = Vec::new();
        for e in &basis {
            for c in 0..current.ncols() {
                cols.push(table.bracket(e, &current.column(c).into_owned()));
            }
        }
        // Absolute test: the orthonormal span below is scale free and would
        // keep rounding noise alive.
        if cols.iter().all(|c| c.amax() <= floor) {
            return Some(step);
        }
        let next = crate::numeric::orthonormal_span(&DMatrix::from_columns(&cols));
        if next.ncols() == current.ncols() {
            return None;
        }
        current = next;
    }
    None
}
