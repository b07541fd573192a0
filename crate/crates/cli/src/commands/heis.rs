use std::path::Path;

use carnot_core::heisenberg::{
    flow_map, hamiltonian_flow, hofer_lower_bound_check, lift_planar_curve, lift_symplectomorphism, Hamiltonian,
    HPoint, HoferConfig, LiftConfig, PolynomialBump, Scaled, SmoothBump, TimeModulated, TruncatedQuadratic,
};
use carnot_core::Result as CoreResult;
use nalgebra::{DMatrix, DVector};

use super::curves::curve_table;
use super::Ctx;
use crate::fail::{Fail, Outcome};
use crate::input::{parse_list, parse_vector, read_curve, read_points};
use crate::output::{num, numbered};
use crate::HamArgs;

type BoxedMap = Box<dyn Fn(&DVector<f64>) -> CoreResult<DVector<f64>> + Sync>;

fn hamiltonian(args: &HamArgs) -> Outcome<Box<dyn Hamiltonian>> {
    let center = parse_list(&args.center)?;
    let base: Box<dyn Hamiltonian> = match args.ham.as_str() {
        "poly" => Box::new(PolynomialBump::with_power(center, args.support_radius, args.amplitude, args.power)?),
        "smooth" => Box::new(SmoothBump::new(center, args.support_radius, args.amplitude)?),
        // Centred at the origin; the centre only fixes the dimension.
        "quadratic" => Box::new(TruncatedQuadratic::new(center.len(), args.inner, args.support_radius)?),
        other => return Err(Fail::input(format!("unknown Hamiltonian {other:?}; use poly, smooth or quadratic"))),
    };
    Ok(match args.modulation {
        Some(depth) => Box::new(TimeModulated { inner: base, depth }),
        None => base,
    })
}

pub fn hlift(ctx: &mut Ctx, path: &Path, xbar0: f64) -> Outcome {
    ctx.sink.input(path);
    let lift = lift_planar_curve(&read_curve(path)?, xbar0)?;
    println!("quadrature error estimate {:e}", lift.quadrature_error);
    let d = lift.curve.dim() - 1;
    let mut header = vec!["t".to_string()];
    header.extend(numbered("x", d));
    header.push("xbar".into());
    let rows: Vec<Vec<String>> = lift
        .curve
        .times
        .iter()
        .zip(&lift.curve.points)
        .map(|(t, p)| std::iter::once(num(*t)).chain(p.iter().map(|v| num(*v))).collect())
        .collect();
    ctx.sink.table("hlift", &header, &rows)
}

fn linear(m: DMatrix<f64>) -> BoxedMap {
    Box::new(move |x: &DVector<f64>| Ok(&m * x))
}

fn planar_map(spec: &str, steps: usize, ham: &HamArgs) -> Outcome<(BoxedMap, DVector<f64>)> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let scalar = || -> Outcome<f64> { arg.trim().parse().map_err(|_| Fail::input(format!("bad parameter {arg:?}"))) };
    let origin = DVector::zeros(2);
    Ok(match kind {
        "rotate" => {
            let (s, c) = scalar()?.sin_cos();
            (linear(DMatrix::from_row_slice(2, 2, &[c, s, -s, c])), origin)
        }
        "squeeze" => {
            let a = scalar()?;
            (linear(DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, 1.0 / a])), origin)
        }
        "shear" => (linear(DMatrix::from_row_slice(2, 2, &[1.0, scalar()?, 0.0, 1.0])), origin),
        "matrix" => {
            let e = parse_list(arg)?;
            let d = (e.len() as f64).sqrt().round() as usize;
            if d == 0 || d * d != e.len() || d % 2 != 0 {
                return Err(Fail::input("matrix: needs d*d entries with d even"));
            }
            (linear(DMatrix::from_row_slice(d, d, &e)), DVector::zeros(d))
        }
        "flow" => {
            let h = hamiltonian(ham)?;
            let d = h.dim();
            let mut base = DVector::zeros(d);
            base[0] = h.support_radius() + 1.0;
            (Box::new(flow_map(h, 1.0, steps)), base)
        }
        _ => return Err(Fail::input(format!("unknown map {kind:?}; use rotate:, squeeze:, shear:, matrix: or flow"))),
    })
}

fn default_grid(d: usize) -> Vec<DVector<f64>> {
    let ticks: Vec<f64> = (0..5).map(|i| -1.0 + 0.5 * i as f64).collect();
    let mut out = vec![DVector::zeros(d)];
    for k in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                ticks.iter().map(move |&t| {
                    let mut q = p.clone();
                    q[k] = t;
                    q
                })
            })
            .collect();
    }
    out
}

pub fn symplift(ctx: &mut Ctx, spec: &str, points: Option<&Path>, steps: usize, ham: &HamArgs) -> Outcome {
    let (phi, base) = planar_map(spec, steps, ham)?;
    let d = base.len();
    let tol = ctx.tol("loop", LiftConfig::default().loop_tol);
    let lifted = lift_symplectomorphism(phi, 0.0, base, LiftConfig { loop_tol: tol, ..LiftConfig::default() })?;
    let samples = match points {
        Some(p) => {
            ctx.sink.input(p);
            read_points(p)?
        }
        None => default_grid(d),
    };
    if samples.iter().any(|p| p.len() != d) {
        return Err(Fail::input(format!("points must have {d} coordinates")));
    }
    let mut rows = Vec::with_capacity(samples.len());
    let mut worst_det: f64 = 0.0;
    for x in samples {
        let p = HPoint { x, xbar: 0.0 };
        let image = lifted.apply(&p)?;
        let det = lifted.jacobian(&p)?.determinant();
        worst_det = worst_det.max((det - 1.0).abs());
        rows.push(
            p.x.iter()
                .chain(image.x.iter())
                .cloned()
                .chain([image.xbar, det])
                .map(num)
                .collect::<Vec<_>>(),
        );
    }
    println!("loop residual {:e}, max |det - 1| {:e}", lifted.loop_residual(), worst_det);
    let mut header = numbered("x", d);
    header.extend(numbered("fx", d));
    header.extend(["fxbar".to_string(), "det".to_string()]);
    ctx.sink.table("symplift", &header, &rows)
}

pub fn hamflow(ctx: &mut Ctx, ham: &HamArgs, x0: &str, t_end: f64, steps: usize) -> Outcome {
    let h = hamiltonian(ham)?;
    let traj = hamiltonian_flow(h.as_ref(), &parse_vector(x0)?, t_end, steps)?;
    println!("energy drift {:e}", traj.energy_drift);
    curve_table(ctx, "trajectory", "x", &traj.curve)
}

pub fn hofer_check(ctx: &mut Ctx, ham: &HamArgs, scale: f64, region_radius: f64, steps: usize, grid: usize) -> Outcome {
    let h = Scaled { inner: hamiltonian(ham)?, factor: scale };
    let cfg = HoferConfig { region_radius, steps, grid_per_axis: grid, seed: ctx.seed, ..HoferConfig::default() };
    let c = hofer_lower_bound_check(&h, &cfg)?;
    println!(
        "C V = {} <= vol(A) int |H| = {}: {} (C = {} +- {:e}, V = {})",
        num(c.lhs),
        num(c.rhs),
        if c.pass { "holds" } else { "VIOLATED" },
        num(c.constant.ratio.value),
        c.constant.ratio.stderr,
        num(c.v)
    );
    ctx.sink.record(
        "hofer",
        &["lhs", "rhs", "v", "a0", "region_volume", "constant", "constant_stderr", "pass"],
        &[vec![
            num(c.lhs),
            num(c.rhs),
            num(c.v),
            num(c.a0),
            num(c.region_volume),
            num(c.constant.ratio.value),
            num(c.constant.ratio.stderr),
            c.pass.to_string(),
        ]],
    )?;
    if c.pass {
        Ok(())
    } else {
        Err(Fail::numerical("Hofer lower bound violated"))
    }
}
