use std::path::Path;

use carnot_core::algebra_core::default_ladder;
use carnot_core::group_ops::GroupLaw;
use carnot_core::pansu::{
    classify_linear, default_probes, develop_curve, dilation, i_area, left_translation, lift_curve, linear_map,
    pansu_derivative_estimate, right_translation, GroupMap, SampledCurve,
};
use nalgebra::DMatrix;

use super::Ctx;
use crate::fail::{Fail, Outcome};
use crate::input::{parse_list, parse_vector, read_curve};
use crate::output::{num, numbered};

pub fn pansu(ctx: &mut Ctx, map: &str, x: &str, levels: usize) -> Outcome {
    let c = ctx.carnot()?;
    let law = GroupLaw::carnot(&c)?;
    let tol = ctx.tol("discrepancy", 1e-8);
    let (kind, arg) = map.split_once(':').unwrap_or((map, ""));
    let f: Box<dyn GroupMap + '_> = match kind {
        "left" | "right" => {
            let a = parse_vector(arg)?;
            if a.len() != c.dim() {
                return Err(Fail::input(format!("translation needs a vector of length {}", c.dim())));
            }
            if kind == "left" {
                Box::new(left_translation(&law, a))
            } else {
                Box::new(right_translation(&law, a))
            }
        }
        "dilation" => {
            let lambda: f64 = arg.parse().map_err(|_| Fail::input(format!("bad dilation factor {arg:?}")))?;
            Box::new(dilation(&c, lambda))
        }
        "linear" => {
            let n = c.dim();
            let entries = parse_list(arg)?;
            if entries.len() != n * n {
                return Err(Fail::input(format!("linear map needs {} entries", n * n)));
            }
            Box::new(linear_map(DMatrix::from_row_slice(n, n, &entries)))
        }
        _ => return Err(Fail::input(format!("unknown map {kind:?}; use left:, right:, dilation: or linear:"))),
    };
    let est = pansu_derivative_estimate(&c, f.as_ref(), &parse_vector(x)?, &default_ladder(levels), &default_probes(&c), tol)?;
    let class = classify_linear(&est.candidate, tol);
    println!(
        "status {:?}, class {:?}, morphism residual {:e}, dilation residual {:e}",
        est.status, class, est.candidate.morphism_residual, est.candidate.dilation_residual
    );
    let rows: Vec<Vec<String>> = est.discrepancies.iter().map(|(e, d)| vec![num(*e), num(*d)]).collect();
    ctx.sink.table("discrepancies", &["eps", "discrepancy"], &rows)?;
    let m = &est.candidate.matrix;
    let rows: Vec<Vec<String>> = (0..m.nrows()).map(|i| m.row(i).iter().map(|v| num(*v)).collect()).collect();
    ctx.sink.record("derivative", &numbered("c", m.ncols()), &rows)
}

pub(super) fn curve_table(ctx: &mut Ctx, name: &str, prefix: &str, curve: &SampledCurve) -> Outcome {
    let mut header = vec!["t".to_string()];
    header.extend(numbered(prefix, curve.dim()));
    let rows: Vec<Vec<String>> = curve
        .times
        .iter()
        .zip(&curve.points)
        .map(|(t, p)| std::iter::once(num(*t)).chain(p.iter().map(|v| num(*v))).collect())
        .collect();
    ctx.sink.table(name, &header, &rows)
}

fn load(ctx: &mut Ctx, path: &Path) -> Outcome<SampledCurve> {
    ctx.sink.input(path);
    read_curve(path)
}

pub fn develop(ctx: &mut Ctx, path: &Path) -> Outcome {
    let c = ctx.carnot()?;
    let sigma = develop_curve(&c, &load(ctx, path)?)?;
    curve_table(ctx, "development", "x", &sigma)
}

pub fn lift(ctx: &mut Ctx, path: &Path) -> Outcome {
    let c = ctx.carnot()?;
    let curve = lift_curve(&c, &load(ctx, path)?)?;
    curve_table(ctx, "lift", "x", &curve)
}

pub fn iarea(ctx: &mut Ctx, path: &Path, index: usize) -> Outcome {
    let c = ctx.carnot()?;
    let area = i_area(&c, &load(ctx, path)?, index)?;
    curve_table(ctx, "iarea", "a", &area)
}
