use carnot_core::algebra_core::{validate_algebra, write_algebra};
use carnot_core::group_ops::{
    bch_multiply, cc_distance_upper, geometric_scales, hausdorff_dimension_estimate, homogeneous_norm,
    word_factorization_with, CcConfig, DimensionConfig, FactorConfig, HomogeneousBox, NormKind,
};

use super::Ctx;
use crate::fail::{Fail, Outcome};
use crate::input::parse_vector;
use crate::output::{join, num, numbered};

pub fn mul(ctx: &mut Ctx, x: &str, y: &str) -> Outcome {
    let c = ctx.carnot()?;
    let p = bch_multiply(&c, &parse_vector(x)?, &parse_vector(y)?)?;
    println!("{}", join(p.iter().cloned()));
    ctx.sink.record("product", &numbered("x", p.len()), &[p.iter().map(|v| num(*v)).collect()])
}

pub fn norm(ctx: &mut Ctx, x: &str) -> Outcome {
    let c = ctx.carnot()?;
    let x = parse_vector(x)?;
    if x.len() != c.dim() {
        return Err(Fail::input(format!("expected a vector of length {}", c.dim())));
    }
    let one = homogeneous_norm(&c, &x, NormKind::One);
    let inf = homogeneous_norm(&c, &x, NormKind::Inf);
    println!("|x|_1 = {}\n|x|_inf = {}", num(one), num(inf));
    ctx.sink.record("norm", &["norm_1", "norm_inf"], &[vec![num(one), num(inf)]])
}

pub fn ccdist(ctx: &mut Ctx, x: &str, y: &str, starts: usize, segments: usize) -> Outcome {
    let c = ctx.carnot()?;
    let tol = ctx.tol("endpoint", 1e-6);
    let cfg = CcConfig { starts, segments, endpoint_tol: tol, seed: ctx.seed, ..CcConfig::default() };
    let r = cc_distance_upper(&c, &parse_vector(x)?, &parse_vector(y)?, &cfg)?;
    println!("d_cc <= {} (endpoint residual {:e})", num(r.length), r.residual);
    ctx.sink.record("distance", &["upper_bound", "residual"], &[vec![num(r.length), num(r.residual)]])?;
    let h = c.horizontal_dim();
    let mut header = vec!["duration".to_string()];
    header.extend(numbered("u", h));
    let rows: Vec<Vec<String>> = r
        .path
        .controls
        .iter()
        .zip(&r.path.durations)
        .map(|(u, t)| std::iter::once(num(*t)).chain(u.iter().map(|v| num(*v))).collect())
        .collect();
    ctx.sink.record("path", &header, &rows)
}

pub fn hausdim(ctx: &mut Ctx, scales: usize, smax: f64, smin: f64, radius: f64) -> Outcome {
    let c = ctx.carnot()?;
    let cfg = DimensionConfig { seed: ctx.seed, ..DimensionConfig::default() };
    let est = hausdorff_dimension_estimate(&c, &HomogeneousBox::new(&c, radius), &geometric_scales(smax, smin, scales), &cfg)?;
    println!(
        "dimension {:.4} (95% CI {:.4} to {:.4}, R^2 {:.5}); homogeneous dimension Q = {}",
        est.dimension,
        est.ci95.0,
        est.ci95.1,
        est.r_squared,
        c.homogeneous_dimension()
    );
    let rows: Vec<Vec<String>> = est.counts.iter().map(|(s, n)| vec![num(*s), n.to_string()]).collect();
    ctx.sink.table("counts", &["scale", "packing_count"], &rows)
}

pub fn factorize(ctx: &mut Ctx, x: &str, chart_radius: f64) -> Outcome {
    let c = ctx.carnot()?;
    let tol = ctx.tol("residual", 1e-12);
    let cfg = FactorConfig { chart_radius, tol, ..FactorConfig::default() };
    let f = word_factorization_with(&c, &parse_vector(x)?, cfg)?;
    println!(
        "{} letters, residual {:e}, homogeneous constant {}",
        f.letters.len(),
        f.residual,
        num(f.homogeneous_constant)
    );
    let rows: Vec<Vec<String>> = f.letters.iter().map(|l| vec![l.generator.to_string(), num(l.t)]).collect();
    ctx.sink.table("letters", &["generator", "t"], &rows)
}

pub fn nilpotentize(ctx: &mut Ctx) -> Outcome {
    let c = ctx.carnot()?;
    println!("# layers {:?}, homogeneous dimension {}", c.layer_dims(), c.homogeneous_dimension());
    ctx.sink.text("nilpotent.toml", &write_algebra(&c.nilpotent_spec()))?;
    let basis = c.basis();
    let rows: Vec<Vec<String>> = (0..basis.ncols())
        .map(|j| {
            std::iter::once(c.layer_of()[j].to_string()).chain(basis.column(j).iter().map(|v| num(*v))).collect()
        })
        .collect();
    let mut header = vec!["layer".to_string()];
    header.extend(numbered("e", c.dim()));
    ctx.sink.record("basis", &header, &rows)
}

pub fn validate(ctx: &mut Ctx) -> Outcome {
    let spec = ctx.spec()?;
    let r = validate_algebra(&spec)?;
    println!(
        "antisymmetry residual {:e}, Jacobi residual {:e} (tolerance {:e}): {}",
        r.antisymmetry_residual,
        r.jacobi_residual,
        r.tolerance,
        if r.passed { "valid" } else { "invalid" }
    );
    ctx.sink.record(
        "validation",
        &["antisymmetry_residual", "jacobi_residual", "tolerance", "passed"],
        &[vec![num(r.antisymmetry_residual), num(r.jacobi_residual), num(r.tolerance), r.passed.to_string()]],
    )?;
    if r.passed {
        Ok(())
    } else {
        Err(Fail::input("structure constants do not define a Lie algebra"))
    }
}
