//! Parsing of command-line values and input files.

use std::path::Path;

use carnot_core::algebra_core::{builtin, load_algebra};
use carnot_core::pansu::SampledCurve;
use carnot_core::LieAlgebraSpec;
use nalgebra::{DMatrix, DVector};

use crate::fail::{Fail, Outcome};

/// Comma-separated floats; fractions such as `1/2` are accepted.
pub fn parse_list(s: &str) -> Outcome<Vec<f64>> {
    s.split(',')
        .map(|t| carnot_core::algebra_core::parse_coefficient_str(t).map_err(Fail::from))
        .collect()
}

pub fn parse_vector(s: &str) -> Outcome<DVector<f64>> {
    Ok(DVector::from_vec(parse_list(s)?))
}

pub fn parse_indices(s: &str) -> Outcome<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Fail::input(format!("not an index: {t:?}"))))
        .collect()
}

fn builtin_algebra(name: &str) -> Option<LieAlgebraSpec> {
    Some(match name {
        "h1" => builtin::heisenberg(1),
        "h2" => builtin::heisenberg(2),
        "h3" => builtin::heisenberg(3),
        "sussmann" => builtin::sussmann_default(),
        "engel" => builtin::engel(),
        "free-step2-3gen" => builtin::free_step2(3),
        "abelian" => builtin::abelian(3),
        _ => return None,
    })
}

/// Loads an algebra file; a missing path that names a builtin algebra
/// (`h1`, `h2`, `h3`, `sussmann`, `engel`, `free-step2-3gen`, `abelian`)
/// resolves to it.
pub fn algebra(arg: Option<&str>) -> Outcome<LieAlgebraSpec> {
    let arg = arg.ok_or_else(|| Fail::input("this subcommand needs --algebra <path>"))?;
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(spec) = builtin_algebra(arg) {
            return Ok(spec);
        }
    }
    Ok(load_algebra(path)?)
}

fn reader(path: &Path) -> Outcome<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Fail::input(format!("{}: {e}", path.display())))
}

/// Numeric rows of a CSV file with a header row.
pub fn read_rows(path: &Path) -> Outcome<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line, record) in reader(path)?.records().enumerate() {
        let record = record.map_err(|e| Fail::input(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Fail::input(format!("{}: non-numeric field on data row {}", path.display(), line + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Curve CSV with columns `t, x_1, …, x_d`.
pub fn read_curve(path: &Path) -> Outcome<SampledCurve> {
    let rows = read_rows(path)?;
    if rows.iter().any(|r| r.len() < 2) {
        return Err(Fail::input(format!("{}: a curve row needs t and at least one coordinate", path.display())));
    }
    let times = rows.iter().map(|r| r[0]).collect();
    let points = rows.iter().map(|r| DVector::from_column_slice(&r[1..])).collect();
    Ok(SampledCurve::new(times, points)?)
}

/// Point cloud CSV, one point per row.
pub fn read_points(path: &Path) -> Outcome<Vec<DVector<f64>>> {
    let rows = read_rows(path)?;
    if rows.is_empty() {
        return Err(Fail::input(format!("{}: no points", path.display())));
    }
    Ok(rows.into_iter().map(DVector::from_vec).collect())
}

/// Square distance matrix CSV; the header row names the columns.
pub fn read_matrix(path: &Path) -> Outcome<DMatrix<f64>> {
    let rows = read_rows(path)?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Fail::input(format!("{}: expected a square matrix", path.display())));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
