use nalgebra::{DMatrix, DVector};

use super::structure::{LieAlgebraSpec, StructureTable};
use crate::error::{CarnotError, Result};
use crate::numeric::{hstack, orthonormal_span, rank};

/// Nested subspaces `V^1 ⊆ V^2 ⊆ … ⊆ V^m = g`, each stored as orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    pub layers: Vec<DMatrix<f64>>,
}

impl Filtration {
    pub fn step(&self) -> usize {
        self.layers.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.ncols()).collect()
    }
}

pub(crate) fn unit(dim: usize, i: usize) -> DVector<f64> {
    DVector::from_fn(dim, |r, _| if r == i { 1.0 } else { 0.0 })
}

/// `V^1 = span D`, `V^{i+1} = V^i + [D, V^i]` until the span stops growing.
pub fn build_filtration(spec: &LieAlgebraSpec) -> Result<Filtration> {
    spec.check_generators()?;
    let table = spec.table()?;
    filtration_from_table(&table, &spec.generators)
}

pub(crate) fn filtration_from_table(table: &StructureTable, generators: &[usize]) -> Result<Filtration> {
    let dim = table.dim();
    let gens: Vec<DVector<f64>> = generators.iter().map(|&g| unit(dim, g)).collect();
    let mut current = orthonormal_span(&DMatrix::from_columns(&gens_or_empty(dim, &gens)));
    let mut layers = vec![current.clone()];
    for _ in 0..=dim {
        if current.ncols() == dim {
            return Ok(Filtration { layers });
        }
        let mut new_cols = Vec::new();
        for g in &gens {
            for c in 0..current.ncols() {
                new_cols.push(table.bracket(g, &current.column(c).into_owned()));
            }
        }
        let stacked = hstack(&current, &DMatrix::from_columns(&gens_or_empty(dim, &new_cols)));
        if rank(&stacked) == current.ncols() {
            return Err(CarnotError::NotBracketGenerating { stabilized_dim: current.ncols() });
        }
        current = orthonormal_span(&stacked);
        layers.push(current.clone());
    }
    Err(CarnotError::NotBracketGenerating { stabilized_dim: current.ncols() })
}

fn gens_or_empty(dim: usize, v: &[DVector<f64>]) -> Vec<DVector<f64>> {
    if v.is_empty() {
        vec![DVector::zeros(dim)]
    } else {
        v.to_vec()
    }
}
