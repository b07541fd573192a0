use std::path::Path;

use carnot_core::group_ops::CcConfig;
use carnot_core::metric_lab::{
    carnot_cone_experiment, decreasing_with_slack, gh_upper_bound, hausdorff_measure_estimate, length_via_dilatation,
    path_metric_midpoint_check, variation, DilatationConfig, FiniteMetricSpace, HausdorffConfig, IsometryWitness,
    MetricCurve,
};
use carnot_core::CarnotError;

use super::Ctx;
use crate::fail::{Fail, Outcome};
use crate::input::{parse_indices, parse_list, read_curve, read_matrix, read_points};
use crate::output::num;

fn space(ctx: &mut Ctx, path: &Path) -> Outcome<FiniteMetricSpace> {
    ctx.sink.input(path);
    Ok(FiniteMetricSpace::new(read_matrix(path)?)?)
}

pub fn var(ctx: &mut Ctx, path: &Path, window: usize) -> Outcome {
    ctx.sink.input(path);
    let c = read_curve(path)?;
    let curve = MetricCurve::euclidean(c.times, c.points)?;
    let v = variation(&curve);
    println!("variation {}", num(v));
    let cfg = DilatationConfig { max_window: window, ..DilatationConfig::default() };
    match length_via_dilatation(&curve, &cfg) {
        Ok(l) => {
            println!("dilatation length {} (quotient slope {:.3})", num(l.length), l.quotient_slope);
            let rows: Vec<Vec<String>> = curve.times().iter().zip(&l.dil).map(|(t, d)| vec![num(*t), num(*d)]).collect();
            ctx.sink.record("dilatation", &["t", "dil"], &rows)?;
            ctx.sink.record("length", &["variation", "dilatation_length"], &[vec![num(v), num(l.length)]])
        }
        // The variation is still meaningful; the length formula is not.
        Err(CarnotError::NotLipschitz { slope }) => {
            println!("dilatation length undefined: quotients grow like mesh^{slope:.3}");
            ctx.sink.record("length", &["variation", "dilatation_length"], &[vec![num(v), String::new()]])
        }
        Err(e) => Err(e.into()),
    }
}

pub fn hmeas(ctx: &mut Ctx, path: &Path, k: f64, deltas: &str) -> Outcome {
    ctx.sink.input(path);
    let cloud = read_points(path)?;
    let est = hausdorff_measure_estimate(&cloud, |a, b| (a - b).norm(), k, &parse_list(deltas)?, &HausdorffConfig::default())?;
    println!(
        "H^{k} ~ {} ({:?}, exponent {:.3}, monotone {}, resolution {:e})",
        num(est.value),
        est.trend,
        est.exponent,
        est.monotone,
        est.resolution
    );
    let rows: Vec<Vec<String>> =
        est.levels.iter().map(|l| vec![num(l.delta), l.sets.to_string(), num(l.sum)]).collect();
    ctx.sink.table("cover_levels", &["delta", "sets", "sum"], &rows)
}

pub fn ghbound(ctx: &mut Ctx, domain: &Path, codomain: &Path, map: Option<&str>, claim: Option<f64>) -> Outcome {
    let x = space(ctx, domain)?;
    let y = space(ctx, codomain)?;
    let mut w = match map {
        Some(m) => IsometryWitness::new(&x, &y, parse_indices(m)?)?,
        None => IsometryWitness::identity(&x, &y)?,
    };
    if let Some(eps) = claim {
        w = w.claiming(eps);
        ctx.sink.tolerance("claimed_eps", eps);
    }
    let b = gh_upper_bound(&w);
    println!(
        "distortion {}, net radius {}, eps {}, d_GH <= {}",
        num(b.distortion),
        num(b.net_radius),
        num(b.eps),
        num(b.bound)
    );
    ctx.sink.record(
        "ghbound",
        &["distortion", "net_radius", "eps", "bound", "claim_holds"],
        &[vec![num(b.distortion), num(b.net_radius), num(b.eps), num(b.bound), b.claim_holds.to_string()]],
    )?;
    if b.claim_holds {
        Ok(())
    } else {
        Err(Fail::numerical(format!("witness is only an {}-isometry", num(b.eps))))
    }
}

pub fn midpoint(ctx: &mut Ctx, path: &Path, eps: f64) -> Outcome {
    let s = space(ctx, path)?;
    ctx.sink.tolerance("eps", eps);
    let r = path_metric_midpoint_check(&s, eps);
    println!(
        "{} of {} pairs lack an eps-midpoint (worst excess {})",
        r.failures.len(),
        r.pairs_checked,
        num(r.worst_excess)
    );
    let rows: Vec<Vec<String>> = r.failures.iter().map(|(i, j)| vec![i.to_string(), j.to_string()]).collect();
    ctx.sink.record("midpoint_failures", &["i", "j"], &rows)?;
    if r.passed() {
        Ok(())
    } else {
        Err(Fail::numerical("midpoint criterion fails"))
    }
}

pub fn cone(ctx: &mut Ctx, path: &Path, lambdas: &str, order: usize, starts: usize, iters: usize) -> Outcome {
    let c = ctx.carnot()?;
    ctx.sink.input(path);
    let points = read_points(path)?;
    let slack = ctx.tol("slack", 0.1);
    let cfg = CcConfig { starts, max_iters: iters, seed: ctx.seed, ..CcConfig::default() };
    let (_, steps) = carnot_cone_experiment(&c, &points, &parse_list(lambdas)?, order, &cfg)?;
    let bounds: Vec<f64> = steps.iter().map(|s| s.bound.bound).collect();
    for s in &steps {
        println!("lambda {}: d_GH <= {}", num(s.lambda), num(s.bound.bound));
    }
    let rows: Vec<Vec<String>> = steps
        .iter()
        .map(|s| vec![num(s.lambda), num(s.bound.distortion), num(s.bound.net_radius), num(s.bound.bound)])
        .collect();
    ctx.sink.record("cone", &["lambda", "distortion", "net_radius", "bound"], &rows)?;
    if decreasing_with_slack(&bounds, slack) {
        Ok(())
    } else {
        Err(Fail::numerical("GH bounds do not decrease"))
    }
}
