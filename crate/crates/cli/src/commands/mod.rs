mod curves;
mod group;
mod heis;
mod metric;
mod report;

use carnot_core::{CarnotStructure, LieAlgebraSpec};

use crate::fail::Outcome;
use crate::input;
use crate::output::Sink;
use crate::Command;

pub struct Ctx {
    pub algebra: Option<String>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub sink: Sink,
}

impl Ctx {
    pub fn spec(&mut self) -> Outcome<LieAlgebraSpec> {
        let spec = input::algebra(self.algebra.as_deref())?;
        if let Some(a) = &self.algebra {
            self.sink.manifest.inputs.push(a.clone());
        }
        Ok(spec)
    }

    pub fn carnot(&mut self) -> Outcome<CarnotStructure> {
        Ok(CarnotStructure::from_spec(&self.spec()?)?)
    }

    /// `--tol` if given, else `default`; recorded in the manifest.
    pub fn tol(&mut self, name: &str, default: f64) -> f64 {
        let t = self.tol.unwrap_or(default);
        self.sink.tolerance(name, t);
        t
    }
}

pub fn run(cmd: &Command, ctx: &mut Ctx) -> Outcome {
    use Command::*;
    match cmd {
        Mul { x, y } => group::mul(ctx, x, y),
        Norm { x } => group::norm(ctx, x),
        Ccdist { x, y, starts, segments } => group::ccdist(ctx, x, y, *starts, *segments),
        Hausdim { scales, smax, smin, radius } => group::hausdim(ctx, *scales, *smax, *smin, *radius),
        Factorize { x, chart_radius } => group::factorize(ctx, x, *chart_radius),
        Nilpotentize => group::nilpotentize(ctx),
        Validate => group::validate(ctx),
        Pansu { map, x, levels } => curves::pansu(ctx, map, x, *levels),
        Develop { curve } => curves::develop(ctx, curve),
        Lift { curve } => curves::lift(ctx, curve),
        Iarea { curve, index } => curves::iarea(ctx, curve, *index),
        Hlift { curve, xbar0 } => heis::hlift(ctx, curve, *xbar0),
        Symplift { map, points, steps, ham } => heis::symplift(ctx, map, points.as_deref(), *steps, ham),
        Hamflow { ham, x0, t_end, steps } => heis::hamflow(ctx, ham, x0, *t_end, *steps),
        HoferCheck { ham, scale, region_radius, steps, grid } => {
            heis::hofer_check(ctx, ham, *scale, *region_radius, *steps, *grid)
        }
        Var { curve, window } => metric::var(ctx, curve, *window),
        Hmeas { points, k, deltas } => metric::hmeas(ctx, points, *k, deltas),
        Ghbound { domain, codomain, map, claim } => metric::ghbound(ctx, domain, codomain, map.as_deref(), *claim),
        Midpoint { matrix, eps } => metric::midpoint(ctx, matrix, *eps),
        Cone { points, lambdas, order, starts, iters } => metric::cone(ctx, points, lambdas, *order, *starts, *iters),
        Report { input, samples } => report::run(ctx, input.as_deref(), *samples),
    }
}
