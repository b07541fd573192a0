mod common;

use std::f64::consts::PI;

use carnot_core::algebra_core::builtin;
use carnot_core::group_ops::bch_multiply;
use carnot_core::heisenberg::*;
use carnot_core::pansu::{pansu_derivative_estimate, probe_set, SampledCurve};
use carnot_core::{CarnotError, CarnotStructure};
use common::{h1_distance, v};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn hp(x: &[f64], xbar: f64) -> HPoint {
    HPoint::new(v(x), xbar).unwrap()
}

fn rotation(theta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[theta.cos(), theta.sin(), -theta.sin(), theta.cos()])
}

fn sp1_maps() -> Vec<DMatrix<f64>> {
    vec![
        rotation(0.7),
        DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]),
        DMatrix::from_row_slice(2, 2, &[1.0, 1.3, 0.0, 1.0]),
    ]
}

fn linear(m: DMatrix<f64>) -> impl Fn(&DVector<f64>) -> carnot_core::Result<DVector<f64>> + Sync {
    move |x: &DVector<f64>| Ok(&m * x)
}

fn outside() -> DVector<f64> {
    v(&[3.0, 0.0])
}

/// Shear `(q, p) ↦ (q, p + g'(q))` with `g = sin`, whose generating function is
/// `½ q g'(q) − g(q)` up to a constant.
fn shear(x: &DVector<f64>) -> carnot_core::Result<DVector<f64>> {
    Ok(v(&[x[0], x[1] + x[0].cos()]))
}

fn shear_inverse(x: &DVector<f64>) -> carnot_core::Result<DVector<f64>> {
    Ok(v(&[x[0], x[1] - x[0].cos()]))
}

fn shear_generating(x: &DVector<f64>) -> f64 {
    0.5 * x[0] * x[0].cos() - x[0].sin()
}

#[test]
fn group_examples() {
    let p = h_mul(&hp(&[1.0, 0.0], 0.0), &hp(&[0.0, 1.0], 0.0)).unwrap();
    assert_eq!(p, hp(&[1.0, 1.0], 0.5));
    assert_eq!(h_inv(&hp(&[1.0, -2.0], 3.0)), hp(&[-1.0, 2.0], -3.0));
    assert_eq!(h_dilate(2.0, &hp(&[1.0, 1.0], 1.0)), hp(&[2.0, 2.0], 4.0));
    assert_eq!(h_bracket(&hp(&[1.0, 0.0], 5.0), &hp(&[0.0, 1.0], 7.0)).unwrap().xbar, 1.0);
    assert!(matches!(
        h_mul(&hp(&[1.0, 0.0], 0.0), &hp(&[1.0, 0.0, 0.0, 0.0], 0.0)),
        Err(CarnotError::InvalidInput(_))
    ));
    assert!(HPoint::new(v(&[1.0, 2.0, 3.0]), 0.0).is_err());
    assert!(HPoint::new(v(&[1.0, f64::NAN]), 0.0).is_err());
}

fn arb_point(n: usize) -> impl Strategy<Value = HPoint> {
    (prop::collection::vec(-3.0..3.0f64, 2 * n), -3.0..3.0f64).prop_map(|(x, z)| HPoint { x: DVector::from_vec(x), xbar: z })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn group_axioms(p in arb_point(2), q in arb_point(2), r in arb_point(2)) {
        let a = h_mul(&h_mul(&p, &q).unwrap(), &r).unwrap();
        let b = h_mul(&p, &h_mul(&q, &r).unwrap()).unwrap();
        prop_assert!((&a.x - &b.x).amax() <= 1e-12 && (a.xbar - b.xbar).abs() <= 1e-12);
        let e = h_mul(&p, &h_inv(&p)).unwrap();
        prop_assert!(e.x.amax() == 0.0 && e.xbar.abs() <= 1e-15);
        let s = 0.7;
        let lhs = h_dilate(s, &h_mul(&p, &q).unwrap());
        let rhs = h_mul(&h_dilate(s, &p), &h_dilate(s, &q)).unwrap();
        prop_assert!((lhs.xbar - rhs.xbar).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn agrees_with_bch_on_h1(p in arb_point(1), q in arb_point(1)) {
        let carnot = CarnotStructure::from_spec(&builtin::heisenberg(1)).unwrap();
        let bch = bch_multiply(&carnot, &p.to_vector(), &q.to_vector()).unwrap();
        let closed = h_mul(&p, &q).unwrap().to_vector();
        prop_assert!((bch - closed).amax() <= 1e-12);
    }

    #[test]
    fn distance_matches_oracle(p in arb_point(1)) {
        let d = h_cc_distance(&HPoint::origin(1), &p).unwrap();
        let o = h1_distance(p.x[0], p.x[1], p.xbar);
        prop_assert!((d - o).abs() <= 1e-9 * (1.0 + o));
    }
}

#[test]
fn distance_is_left_invariant_and_homogeneous() {
    let a = hp(&[0.3, -1.0, 0.2, 0.5], 0.7);
    let p = hp(&[1.0, 0.5, -0.4, 0.1], -0.3);
    let q = hp(&[-0.2, 0.1, 0.9, 1.0], 1.2);
    let d = h_cc_distance(&p, &q).unwrap();
    let moved = h_cc_distance(&h_mul(&a, &p).unwrap(), &h_mul(&a, &q).unwrap()).unwrap();
    assert!((d - moved).abs() < 1e-12);
    let scaled = h_cc_distance(&h_dilate(3.0, &p), &h_dilate(3.0, &q)).unwrap();
    assert!((scaled - 3.0 * d).abs() < 1e-10);
    assert!((h_norm_radial(0.0, 1.0 / (4.0 * PI)) - 1.0).abs() < 1e-12);
}

/// Volume of the h(1) unit ball from its boundary profile: with chord angle
/// `a`, the boundary sits at radius `2 sin(a/2)/a` and height `(a − sin a)/(2a²)`.
fn h1_ball_volume() -> f64 {
    let r = |a: f64| if a == 0.0 { 1.0 } else { 2.0 * (a / 2.0).sin() / a };
    let dr = |a: f64| if a == 0.0 { 0.0 } else { (a / 2.0).cos() / a - 2.0 * (a / 2.0).sin() / (a * a) };
    let z = |a: f64| if a == 0.0 { 0.0 } else { (a - a.sin()) / (2.0 * a * a) };
    let n = 20_000;
    let h = 2.0 * PI / n as f64;
    let g = |a: f64| -4.0 * PI * r(a) * z(a) * dr(a);
    let mut s = g(0.0) + g(2.0 * PI);
    for k in 1..n {
        s += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn ball_ratio_matches_profile_volume() {
    let est = cc_ball_ratio(1, 400_000, 3).unwrap();
    let exact = h1_ball_volume();
    assert!((est.cc_volume.value - exact).abs() < 4.0 * est.cc_volume.stderr, "{est:?} vs {exact}");
    assert!((est.ratio.value - exact / (4.0 * PI / 3.0)).abs() < 4.0 * est.ratio.stderr);
    assert_eq!(cached_ball_ratio(1, 50_000, 1).unwrap(), cached_ball_ratio(1, 50_000, 1).unwrap());
}

#[test]
fn planar_lift_examples() {
    let line = SampledCurve::from_fn(0.0, 1.0, 10, |t| v(&[t * 2.0, -t])).unwrap();
    let lift = lift_planar_curve(&line, 0.25).unwrap();
    assert!(lift.curve.points.iter().all(|p| p[2] == 0.25));
    let constant = SampledCurve::from_fn(0.0, 1.0, 5, |_| v(&[0.3, 0.4])).unwrap();
    assert!(lift_planar_curve(&constant, 1.0).unwrap().curve.points.iter().all(|p| p[2] == 1.0));

    let circle = |n| SampledCurve::from_fn(0.0, 2.0 * PI, n, |t| v(&[t.cos(), t.sin()])).unwrap();
    let mut errors = vec![];
    for n in [64, 128, 256] {
        let l = lift_planar_curve(&circle(n), 0.0).unwrap();
        let dz = l.curve.points.last().unwrap()[2];
        errors.push((dz - PI).abs());
        assert!(l.quadrature_error > 0.3 * (dz - PI).abs() && l.quadrature_error < 3.0 * (dz - PI).abs());
    }
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.9);
    }
}

#[test]
fn planar_lift_converges_to_smooth_lift_at_second_order() {
    // The unit circle lifts to c̄(t) = t / 2.
    let mut errs = vec![];
    for n in [50, 100, 200, 400] {
        let c = SampledCurve::from_fn(0.0, 3.0, n, |t| v(&[t.cos(), t.sin()])).unwrap();
        let l = lift_planar_curve(&c, 0.0).unwrap();
        let e = l.curve.points.iter().zip(&c.times).map(|(p, t)| (p[2] - t / 2.0).abs()).fold(0.0, f64::max);
        errs.push(e);
    }
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9);
    }
}

#[test]
fn identity_and_linear_lifts_are_vertical_shifts() {
    let id = lift_symplectomorphism(|x: &DVector<f64>| Ok(x.clone()), 0.4, v(&[0.0, 0.0]), LiftConfig::default()).unwrap();
    let p = hp(&[0.7, -1.1], 2.0);
    let q = id.apply(&p).unwrap();
    assert!((&q.x - &p.x).amax() == 0.0 && (q.xbar - 2.4).abs() < 1e-12);
    for m in sp1_maps() {
        let lifted = lift_symplectomorphism(linear(m.clone()), -1.5, v(&[0.2, 0.3]), LiftConfig::default()).unwrap();
        for x in [[1.0, 2.0], [-0.5, 0.3], [0.0, -2.0]] {
            assert!((lifted.generating(&v(&x)).unwrap() + 1.5).abs() < 1e-9);
        }
        assert!(lifted.loop_residual() < 1e-9);
    }
}

#[test]
fn non_symplectic_linear_map_is_rejected() {
    let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
    match lift_symplectomorphism(linear(m), 0.0, v(&[0.0, 0.0]), LiftConfig::default()) {
        Err(CarnotError::NotSymplectic { residual }) => {
            let area = 0.5 * 0.5;
            assert!((residual - (2.0 - 1.0) * area).abs() < 1e-8, "{residual}");
        }
        other => panic!("expected NotSymplectic, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn shear_generating_function_matches_closed_form() {
    for path in [PathStrategy::CoordinateAxes, PathStrategy::Straight] {
        let cfg = LiftConfig { path, ..LiftConfig::default() };
        let base = v(&[0.4, -0.2]);
        let lifted = lift_symplectomorphism(shear, 0.0, base.clone(), cfg).unwrap();
        for x in [[1.0, 2.0], [-1.3, 0.3], [2.5, -2.0]] {
            let x = v(&x);
            let expected = shear_generating(&x) - shear_generating(&base);
            assert!((lifted.generating(&x).unwrap() - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn lift_is_functorial_up_to_vertical_constant() {
    let second = |x: &DVector<f64>| Ok(v(&[x[0] + (2.0 * x[1]).sin(), x[1]]));
    let composite = move |x: &DVector<f64>| second(&shear(x)?);
    let base = v(&[0.0, 0.0]);
    let lf = lift_symplectomorphism(second, 0.0, base.clone(), LiftConfig::default()).unwrap();
    let lg = lift_symplectomorphism(shear, 0.0, base.clone(), LiftConfig::default()).unwrap();
    let lc = lift_symplectomorphism(composite, 0.0, base, LiftConfig::default()).unwrap();
    let mut offsets = vec![];
    for (x, z) in [([0.3, 0.2], 0.0), ([-1.0, 0.7], 1.0), ([1.5, -0.4], -2.0)] {
        let p = hp(&x, z);
        let a = lc.apply(&p).unwrap();
        let b = lf.apply(&lg.apply(&p).unwrap()).unwrap();
        assert!((&a.x - &b.x).amax() < 1e-12);
        offsets.push(a.xbar - b.xbar);
    }
    assert!(offsets.iter().all(|o| (o - offsets[0]).abs() < 1e-9), "{offsets:?}");
}

fn sample_points(k: usize, radius: f64) -> Vec<DVector<f64>> {
    (0..k)
        .map(|i| {
            let t = i as f64 * 2.399_963;
            let r = radius * ((i as f64 + 0.5) / k as f64).sqrt();
            v(&[r * t.cos(), r * t.sin()])
        })
        .collect()
}

#[test]
fn lifted_maps_preserve_volume() {
    for m in sp1_maps() {
        let lifted = lift_symplectomorphism(linear(m), 0.0, outside(), LiftConfig::default()).unwrap();
        for x in sample_points(100, 1.5) {
            let det = lifted.jacobian(&HPoint { x, xbar: 0.3 }).unwrap().determinant();
            assert!((det - 1.0).abs() < 1e-6);
        }
    }
    let bumps = [
        PolynomialBump::new(vec![0.0, 0.0], 1.0, 1.0).unwrap(),
        PolynomialBump::new(vec![0.3, -0.2], 0.8, 2.0).unwrap(),
    ];
    for b in bumps {
        let lifted = lift_symplectomorphism(flow_map(b, 1.0, 1000), 0.0, outside(), LiftConfig::default()).unwrap();
        assert!(lifted.loop_residual() < 1e-6);
        for x in sample_points(100, 1.2) {
            let det = lifted.jacobian(&HPoint { x: x.clone(), xbar: 0.0 }).unwrap().determinant();
            assert!((det - 1.0).abs() < 1e-6, "{det}");
            assert!(lifted.symplectic_defect(&x).unwrap() < 1e-6);
        }
    }
}

#[test]
fn closed_form_derivative_of_lifts() {
    let id = lift_symplectomorphism(|x: &DVector<f64>| Ok(x.clone()), 0.0, v(&[0.0, 0.0]), LiftConfig::default()).unwrap();
    let p = hp(&[0.4, -0.8], 0.2);
    assert!((pansu_derivative_closed_form(&id, &p, 1e-5).unwrap().matrix - DMatrix::identity(3, 3)).amax() < 1e-9);

    let a = sp1_maps()[2].clone();
    let lifted = lift_symplectomorphism(linear(a.clone()), 0.0, v(&[0.0, 0.0]), LiftConfig::default()).unwrap();
    let cf = pansu_derivative_closed_form(&lifted, &p, 1e-4).unwrap();
    let mut expected = DMatrix::identity(3, 3);
    expected.view_mut((0, 0), (2, 2)).copy_from(&a);
    assert!((&cf.matrix - &expected).amax() < 1e-8);
    assert!(cf.contact_residual < 1e-8);
    assert!((lifted.pansu_derivative(&p).unwrap() - expected).amax() < 1e-8);

    // A map that moves x̄ by q is not a contact map.
    let tilt = |p: &HPoint| Ok(HPoint { x: p.x.clone(), xbar: p.xbar + p.x[0] });
    assert!((pansu_derivative_closed_form(&tilt, &p, 1e-5).unwrap().contact_residual - 1.0).abs() < 1e-8);
}

#[test]
fn rotation_flow_derivative_matches_finite_differences() {
    let theta = 0.9;
    let flow = flow_map(QuadraticHamiltonian { dim: 2 }, theta, 200);
    let lifted = lift_symplectomorphism(flow, 0.0, v(&[0.0, 0.0]), LiftConfig::default()).unwrap();
    let carnot = CarnotStructure::from_spec(&builtin::heisenberg(1)).unwrap();
    let map = |y: &DVector<f64>| Ok(lifted.apply(&HPoint::from_vector(y)?)?.to_vector());
    let mut expected = DMatrix::identity(3, 3);
    expected.view_mut((0, 0), (2, 2)).copy_from(&rotation(theta));
    for x in [[0.3, 0.5, -0.2], [-1.0, 0.2, 1.0]] {
        let p = HPoint::from_vector(&v(&x)).unwrap();
        let cf = pansu_derivative_closed_form(&lifted, &p, 1e-5).unwrap();
        assert!((&cf.matrix - &expected).amax() < 1e-8);
        let est = pansu_derivative_estimate(&carnot, &map, &v(&x), &[1e-1, 3e-2, 1e-2, 3e-3], &probe_set(&carnot, 4, 0), 1e-6).unwrap();
        assert!((&est.candidate.matrix - &cf.matrix).amax() < 1e-6, "{}", est.candidate.matrix);
    }
}

#[test]
fn hamiltonian_flow_examples() {
    let zero = hamiltonian_flow(&ZeroHamiltonian { dim: 2 }, &v(&[0.5, 0.1]), 1.0, 10).unwrap();
    assert!(zero.curve.points.iter().all(|p| *p == v(&[0.5, 0.1])));

    let x0 = v(&[1.0, 0.0]);
    let rot = hamiltonian_flow(&QuadraticHamiltonian { dim: 2 }, &x0, 2.0 * PI, 6284).unwrap();
    let drift = rot.curve.points.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-8);
    assert!((rot.curve.points.last().unwrap() - &x0).amax() < 1e-8);
    // With ẋ = J∇H the point (1, 0) first moves to (cos t, −sin t).
    let k = 1000;
    let t = rot.curve.times[k];
    assert!((&rot.curve.points[k] - v(&[t.cos(), -t.sin()])).amax() < 1e-10);

    let p = vec![0.3, -0.7];
    let lin = hamiltonian_flow(&LinearHamiltonian { p: p.clone() }, &v(&[0.0, 0.0]), 2.0, 7).unwrap();
    for (pt, t) in lin.curve.points.iter().zip(&lin.curve.times) {
        assert!((pt - v(&[p[1] * t, -p[0] * t])).amax() < 1e-14);
    }
    assert!(hamiltonian_flow(&ZeroHamiltonian { dim: 2 }, &v(&[0.0, 0.0]), 1.0, 0).is_err());
}

struct Fragile;

impl Hamiltonian for Fragile {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, _: f64, x: &[f64]) -> f64 {
        -x[0]
    }
    fn gradient(&self, _: f64, x: &[f64], out: &mut [f64]) {
        let bad = if x[1] > 1.0 { f64::NAN } else { 0.0 };
        out[0] = -1.0 + bad;
        out[1] = 0.0;
    }
}

#[test]
fn blowup_reports_last_valid_time() {
    // ṗ = 1 until p passes 1.
    match hamiltonian_flow(&Fragile, &v(&[0.0, 0.0]), 3.0, 300) {
        Err(CarnotError::IntegrationBlowup { last_valid_time }) => assert!((last_valid_time - 1.0).abs() < 0.02),
        other => panic!("{other:?}"),
    }
}

#[test]
fn symplectic_to_fourth_order() {
    let h = PolynomialBump::new(vec![0.2, 0.1], 1.0, 1.5).unwrap();
    let defect = |steps| {
        let phi = flow_map(&h, 1.0, steps);
        sample_points(20, 1.0)
            .iter()
            .map(|x| symplectic_defect_of(&planar_jacobian(&phi, x, 1e-5).unwrap()))
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (defect(20), defect(40));
    assert!(fine < 1e-3 && coarse / fine > 12.0, "{coarse} {fine}");
}

fn truncated() -> TruncatedQuadratic {
    TruncatedQuadratic::new(2, 0.5, 1.5).unwrap()
}

#[test]
fn vertical_flow_of_truncated_quadratic() {
    let h = truncated();
    let inside = vertical_flow_check(&h, &v(&[0.5, 0.3]), 1.0, 1000).unwrap();
    assert!(inside.max_residual <= 1e-4, "{}", inside.max_residual);
    let fine = vertical_flow_check(&h, &v(&[0.5, 0.3]), 1.0, 10_000).unwrap();
    for (k, (t, z)) in inside.vertical.iter().enumerate() {
        let (tf, zf) = fine.vertical[10 * k];
        assert!((t - tf).abs() < 1e-12 && (z - zf).abs() < 1e-6);
    }
    // Outside the support every slice fixes the point and F_t vanishes there.
    let out = vertical_flow_check(&h, &v(&[1.6, 0.4]), 1.0, 1000).unwrap();
    assert!(out.max_residual < 1e-12 && out.vertical.iter().all(|(_, z)| z.abs() < 1e-12));
    let zero = vertical_flow_check(&ZeroHamiltonian { dim: 2 }, &v(&[0.2, 0.2]), 1.0, 100).unwrap();
    assert_eq!(zero.max_residual, 0.0);
}

#[test]
fn vertical_flow_of_time_dependent_bump() {
    let h = TimeModulated { inner: SmoothBump::new(vec![0.3, 0.0], 0.9, 1.0).unwrap(), depth: 0.5 };
    let cfg = LiftConfig { panels_per_unit: 32.0, ..LiftConfig::default() };
    let c = vertical_flow_check_with(&h, &v(&[0.1, 0.2]), 1.0, 1000, &cfg).unwrap();
    assert!(c.max_residual <= 1e-4, "{}", c.max_residual);
    assert!(c.hamiltonian.iter().any(|(_, x)| *x > 0.1));
}

#[test]
fn action_integral_matches_line_integral() {
    let h = SmoothBump::new(vec![0.2, -0.1], 1.0, 1.0).unwrap();
    let cfg = LiftConfig { panels_per_unit: 32.0, ..LiftConfig::default() };
    let lifted = lift_symplectomorphism(flow_map(&h, 1.0, 500), 0.0, outside(), cfg).unwrap();
    for x in [[0.1, 0.2], [-0.5, 0.0], [0.6, -0.6]] {
        let a = generating_function_action(&h, &x, 1.0, 500).unwrap();
        let b = lifted.generating(&v(&x)).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }
}

struct Plateau(f64);

impl Hamiltonian for Plateau {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, _: f64, x: &[f64]) -> f64 {
        if x[0].hypot(x[1]) <= 1.0 {
            self.0
        } else {
            0.0
        }
    }
    fn gradient(&self, _: f64, _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn support_radius(&self) -> f64 {
        1.0
    }
}

#[test]
fn hofer_length_examples() {
    let grid = ball_grid(2, 1.5, 101);
    assert_eq!(hofer_length(&ZeroHamiltonian { dim: 2 }, &grid, 11).unwrap().value, 0.0);
    assert!((hofer_length(&Plateau(-2.5), &grid, 11).unwrap().value - 2.5).abs() < 1e-12);
    let h = TruncatedQuadratic::new(2, 0.9, 1.0).unwrap();
    let dense = (0..100_000).map(|k| h.value(0.0, &[k as f64 * 1e-5, 0.0])).fold(0.0, f64::max);
    let l = hofer_length(&h, &ball_grid(2, 1.0, 401), 5).unwrap();
    assert!(l.value <= dense + 1e-12 && l.value > dense - 2e-3, "{} {dense}", l.value);
    assert!(dense > 0.4 && dense < 0.5);
}

fn quick_cfg() -> HoferConfig {
    HoferConfig { grid_per_axis: 24, steps: 200, ratio_samples: 200_000, ..HoferConfig::default() }
}

#[test]
fn hofer_bound_identity() {
    let c = hofer_lower_bound_check(&ZeroHamiltonian { dim: 2 }, &quick_cfg()).unwrap();
    assert_eq!((c.v, c.rhs, c.pass), (0.0, 0.0, true));
}

#[test]
fn hofer_bound_scales() {
    let bump = PolynomialBump::new(vec![0.4, 0.1], 0.6, 1.0).unwrap();
    let base = hofer_lower_bound_check(&bump, &quick_cfg()).unwrap();
    assert!(base.lhs > 0.0 && base.rhs > 0.0 && base.pass);
    for s in [0.1, 10.0] {
        let scaled = Scaled { inner: bump.clone(), factor: s };
        let c = hofer_lower_bound_check(&scaled, &quick_cfg()).unwrap();
        assert!(c.pass, "{c:?}");
        assert!((c.rhs / base.rhs - s).abs() < 1e-12 * s);
    }
    let wide = PolynomialBump::new(vec![1.0, 0.0], 1.0, 1.0).unwrap();
    assert!(matches!(hofer_lower_bound_check(&wide, &quick_cfg()), Err(CarnotError::InvalidInput(_))));
}

#[test]
fn support_sampling() {
    assert_eq!(support_violation(&truncated(), 2000, 1), 0.0);
    assert_eq!(support_violation(&PolynomialBump::new(vec![0.5, 0.5], 0.3, 4.0).unwrap(), 2000, 1), 0.0);
}

fn invariant_cfg() -> InvariantsConfig {
    InvariantsConfig { base_samples: 8000, resolution: 400, batches: 20, heights: vec![1, 2], seed: 5 }
}

#[test]
fn cylinder_width_is_exact() {
    let c = Cylinder::straight(v(&[0.0, 0.0]), 1.0, 0.0, 0.7);
    let inv = invariants_width_heights(&c, &invariant_cfg()).unwrap();
    assert!((inv.width.value - 0.7).abs() < 1e-12);
    let shifted = Cylinder::straight(v(&[0.0, 0.0]), 1.0, 5.0, 0.7);
    assert_eq!(invariants_width_heights(&shifted, &invariant_cfg()).unwrap(), inv);
    assert!((inv.projected_volume.value - PI).abs() < 4.0 * inv.projected_volume.stderr);
    let flat = Cylinder::straight(v(&[0.0, 0.0]), 1.0, 0.0, 0.0);
    assert!(matches!(invariants_width_heights(&flat, &invariant_cfg()), Err(CarnotError::UndefinedInvariant(_))));
}

#[test]
fn invariants_survive_a_nonlinear_lift() {
    let region = Cylinder {
        center: v(&[0.2, 0.0]),
        radius: 0.8,
        floor: Box::new(|x| 0.3 * x[1]),
        height: Box::new(|x| 1.0 + 0.5 * x[0]),
        vertical: (-0.3, 1.8),
    };
    let lifted = lift_symplectomorphism(shear, 0.0, v(&[0.0, 0.0]), LiftConfig::default()).unwrap();
    let image = LiftedImage {
        region: &region,
        lifted: &lifted,
        inverse: shear_inverse,
        base_bounds: (v(&[-0.6, -0.8]), v(&[1.0, 1.8])),
        vertical_bounds: (-1.5, 2.5),
    };
    let cfg = invariant_cfg();
    let a = invariants_width_heights(&region, &cfg).unwrap();
    let b = invariants_width_heights(&image, &InvariantsConfig { seed: 11, ..cfg }).unwrap();
    let close = |x: Estimate, y: Estimate| (x.value - y.value).abs() <= 3.0 * x.stderr.hypot(y.stderr);
    assert!(close(a.width, b.width), "{:?} {:?}", a.width, b.width);
    for ((_, x), (_, y)) in a.heights.iter().zip(&b.heights) {
        assert!(close(*x, *y), "{x:?} {y:?}");
    }
    // The image fibers are really moved by F.
    let y = v(&[0.5, 0.5]);
    let x = shear_inverse(&y).unwrap();
    let f = lifted.generating(&x).unwrap();
    assert!(f.abs() > 0.05);
    let bottom = 0.3 * x[1] + f;
    assert!(image.contains(&HPoint { x: y.clone(), xbar: bottom + 0.01 }));
    assert!(!image.contains(&HPoint { x: y, xbar: bottom - 0.01 }));
}

#[test]
fn rigidity_on_contrived_flows() {
    let pts = vec![v(&[0.2, 0.1]), v(&[-0.4, 0.3])];
    let still = rigidity_check(&ZeroHamiltonian { dim: 2 }, &pts, 1.0, 100).unwrap();
    assert_eq!((still.horizontality_defect, still.max_speed), (0.0, 0.0));
    assert!(still.consistent(1e-9));
    let bump = PolynomialBump::new(vec![0.0, 0.0], 1.0, 1.0).unwrap();
    let moving = rigidity_check(&bump, &pts, 1.0, 200).unwrap();
    assert!(moving.max_speed > 0.1 && moving.horizontality_defect > 0.1);
    assert!(moving.consistent(1e-6));
    // Horizontal trajectories with motion would contradict rigidity.
    let fake = RigidityReport { horizontality_defect: 0.0, max_speed: 1.0 };
    assert!(!fake.consistent(1e-6));
}
