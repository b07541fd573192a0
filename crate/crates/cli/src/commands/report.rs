use std::path::Path;

use carnot_core::algebra_core::{default_ladder, magic_identity_residual, nilpotent_bracket_limit, validate_algebra};
use carnot_core::group_ops::GroupLaw;
use carnot_core::numeric::seeded_rng;
use carnot_core::report::{CriterionRow, Report};
use carnot_core::CarnotStructure;
use nalgebra::DVector;
use rand::Rng;

use super::Ctx;
use crate::fail::{Fail, Outcome};
use crate::output::num;

fn read_rows(path: &Path) -> Outcome<Report> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Fail::input(format!("{}: {e}", path.display())))?;
    let rows = rdr
        .deserialize::<CriterionRow>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Fail::input(format!("{}: {e}", path.display())))?;
    Ok(Report { rows })
}

fn worst(samples: usize, mut f: impl FnMut() -> f64) -> f64 {
    (0..samples).map(|_| f()).fold(0.0, f64::max)
}

/// Structural invariants of an algebra and its nilpotentisation, checked on
/// random samples drawn from one seeded stream.
fn invariant_suite(ctx: &mut Ctx, samples: usize) -> Outcome<Report> {
    let spec = ctx.spec()?;
    let c = CarnotStructure::from_spec(&spec)?;
    let law = GroupLaw::carnot(&c)?;
    let n = c.dim();
    let mut rng = seeded_rng(ctx.seed);
    let mut vec = move || DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let mut report = Report::default();

    let v = validate_algebra(&spec)?;
    report.push(CriterionRow::new("jacobi", "Jacobi identity of the input", v.passed, v.jacobi_residual, format!("<= {:e}", v.tolerance)));
    let nj = c.nilpotent_jacobi_residual();
    report.push(CriterionRow::new("jacobi-n", "Jacobi identity of the nilpotentisation", nj <= 1e-10, nj, "<= 1e-10"));
    let generated = c.generation_holds();
    report.push(CriterionRow::new("generation", "[V1, Vi] = Vi+1", generated, if generated { 0.0 } else { 1.0 }, "holds"));

    let ladder = default_ladder(7);
    let mut limit_err: f64 = 0.0;
    for _ in 0..samples {
        let (x, y) = (vec(), vec());
        let est = nilpotent_bracket_limit(&c, &x, &y, &ladder)?;
        limit_err = limit_err.max((est.value - c.nilpotent().bracket(&x, &y)).amax());
    }
    report.push(CriterionRow::new("limit", "bracket limit equals the closed form", limit_err <= 1e-8, limit_err, "<= 1e-8"));

    let assoc = worst(samples, || {
        let (x, y, z) = (vec(), vec(), vec());
        (law.mul(&law.mul(&x, &y), &z) - law.mul(&x, &law.mul(&y, &z))).amax()
    });
    report.push(CriterionRow::new("assoc", "associativity of the product", assoc <= 1e-10, assoc, "<= 1e-10"));

    let dil = worst(samples, || {
        let (x, y) = (vec(), vec());
        let lambda = 1.7;
        (c.dilate(lambda, &law.mul(&x, &y)) - law.mul(&c.dilate(lambda, &x), &c.dilate(lambda, &y))).amax()
    });
    report.push(CriterionRow::new("dilation", "dilations are automorphisms", dil <= 1e-10, dil, "<= 1e-10"));

    if c.is_graded_input() {
        let magic = worst(samples, || magic_identity_residual(&c, &vec(), &vec(), &vec()).identity);
        report.push(CriterionRow::new("magic", "magic identity for graded input", magic <= 1e-12, magic, "<= 1e-12"));
    }
    Ok(report)
}

pub fn run(ctx: &mut Ctx, input: Option<&Path>, samples: usize) -> Outcome {
    let report = match input {
        Some(p) => {
            ctx.sink.input(p);
            read_rows(p)?
        }
        None => invariant_suite(ctx, samples)?,
    };
    let text = report.to_text();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![r.id.clone(), r.name.clone(), r.pass.to_string(), num(r.value), r.threshold.clone(), r.detail.clone()])
        .collect();
    print!("{text}");
    if ctx.sink.has_dir() {
        ctx.sink.text("report.txt", &text)?;
        ctx.sink.table("report", &["id", "name", "pass", "value", "threshold", "detail"], &rows)?;
    }
    let failed = report.failures().count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Fail::numerical(format!("{failed} criteria failed")))
    }
}
