mod common;

use carnot_core::algebra_core::{builtin, default_ladder, CarnotStructure};
use carnot_core::group_ops::GroupLaw;
use carnot_core::numeric::fit_line;
use carnot_core::pansu::*;
use carnot_core::Result;
use common::{horizontal_curve, test_curvatures, v};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn h1() -> CarnotStructure {
    CarnotStructure::from_spec(&builtin::heisenberg(1)).unwrap()
}

fn sussmann() -> CarnotStructure {
    CarnotStructure::from_spec(&builtin::sussmann_default()).unwrap()
}

fn rotation(theta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
}

fn extend(a: &DMatrix<f64>, last: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(3, 3);
    m.view_mut((0, 0), (2, 2)).copy_from(a);
    m[(2, 2)] = last;
    m
}

#[test]
fn finite_difference_examples() {
    let c = h1();
    let law = GroupLaw::carnot(&c).unwrap();
    let x = v(&[0.3, -0.7, 0.2]);
    let y = v(&[0.5, 0.1, -0.4]);
    let left = left_translation(&law, v(&[1.0, 2.0, 3.0]));
    let ident = |p: &DVector<f64>| -> Result<DVector<f64>> { Ok(p.clone()) };
    let dil = dilation(&c, 3.0);
    for eps in [0.5, 0.1, 0.01] {
        assert!((finite_difference(&c, &law, &left, &x, eps, &y).unwrap() - &y).amax() < 1e-11);
        assert!((finite_difference(&c, &law, &ident, &x, eps, &y).unwrap() - &y).amax() < 1e-12);
        assert!((finite_difference(&c, &law, &dil, &x, eps, &y).unwrap() - c.dilate(3.0, &y)).amax() < 1e-10);
    }
}

#[test]
fn left_translations_are_hl() {
    let c = h1();
    let law = GroupLaw::carnot(&c).unwrap();
    let probes = default_probes(&c);
    assert_eq!(probes.len(), 3 + 32);
    let f = left_translation(&law, v(&[1.0, -2.0, 0.5]));
    let est = pansu_derivative_estimate(&c, &f, &v(&[0.4, 0.3, -1.0]), &default_ladder(6), &probes, 1e-8).unwrap();
    assert!((&est.candidate.matrix - DMatrix::identity(3, 3)).amax() < 1e-8);
    assert_eq!(est.status, Convergence::Converged);
    assert_eq!(classify_linear(&est.candidate, 1e-8), LinearClass::HL);
    assert!(est.discrepancies.iter().all(|&(_, d)| d <= 1e-8));
}

#[test]
fn left_translation_composed_with_dilation() {
    let c = sussmann();
    let law = GroupLaw::carnot(&c).unwrap();
    let a = v(&[0.2, 0.1, -0.3, 0.4]);
    let f = |p: &DVector<f64>| -> Result<DVector<f64>> { Ok(law.mul(&a, &c.dilate(2.0, p))) };
    let x = v(&[0.1, 0.5, 0.0, -0.2]);
    let est = pansu_derivative_estimate(&c, &f, &x, &default_ladder(6), &default_probes(&c), 1e-8).unwrap();
    let expected = DMatrix::from_diagonal(&v(&[2.0, 2.0, 4.0, 8.0]));
    assert!((&est.candidate.matrix - expected).amax() < 1e-8);
    assert_eq!(classify_linear(&est.candidate, 1e-8), LinearClass::HL);

    // Morphism property of the limit on dilated products.
    let d = &est.candidate.matrix;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let y = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let z = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let (sa, sb) = (0.7, 1.9);
        let lhs = d * law.mul(&c.dilate(sa, &y), &c.dilate(sb, &z));
        let rhs = law.mul(&c.dilate(sa, &(d * &y)), &c.dilate(sb, &(d * &z)));
        assert!((lhs - rhs).amax() < 1e-9);
    }
}

#[test]
fn right_translation_diverges() {
    let c = h1();
    let law = GroupLaw::carnot(&c).unwrap();
    let f = right_translation(&law, v(&[1.0, 0.0, 0.0]));
    let ladder = default_ladder(5);
    let est = pansu_derivative_estimate(&c, &f, &v(&[0.2, 0.3, 0.1]), &ladder, &default_probes(&c), 1e-8).unwrap();
    assert_eq!(est.status, Convergence::Divergent);
    assert!(est.discrepancies.windows(2).all(|w| w[1].1 >= w[0].1), "{:?}", est.discrepancies);

    // A central element commutes with everything.
    let f = right_translation(&law, v(&[0.0, 0.0, 5.0]));
    let est = pansu_derivative_estimate(&c, &f, &v(&[0.2, 0.3, 0.1]), &ladder, &default_probes(&c), 1e-8).unwrap();
    assert_eq!(est.status, Convergence::Converged);
}

#[test]
fn symplectic_linear_map_derivative() {
    let c = h1();
    let a: DMatrix<f64> = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
    assert!((a.determinant() - 1.0).abs() < 1e-15);
    let f = linear_map(extend(&a, 1.0));
    let est = pansu_derivative_estimate(&c, &f, &v(&[1.0, 1.0, 1.0]), &default_ladder(4), &default_probes(&c), 1e-8).unwrap();
    assert!((&est.candidate.matrix - extend(&a, 1.0)).amax() < 1e-8);
    assert_eq!(classify_linear(&est.candidate, 1e-8), LinearClass::HL);
}

#[test]
fn classification_examples() {
    let c = h1();
    let cand = |m: DMatrix<f64>| LinearCandidate::new(&c, m).unwrap();
    assert_eq!(classify_linear(&cand(DMatrix::identity(3, 3)), 1e-10), LinearClass::HL);
    assert_eq!(classify_linear(&cand(DMatrix::zeros(3, 3)), 1e-10), LinearClass::EndOnly);
    // Conformal symplectic: the centre scales by det A.
    let a = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, -1.0, 2.0]);
    assert_eq!(classify_linear(&cand(extend(&a, a.determinant())), 1e-10), LinearClass::HL);
    assert_eq!(classify_linear(&cand(extend(&rotation(0.3), 1.0)), 1e-10), LinearClass::HL);
    let nl = cand(extend(&a, 1.0));
    assert!((nl.morphism_residual - (a.determinant() - 1.0).abs()).abs() < 1e-12);
    assert_eq!(classify_linear(&nl, 1e-10), LinearClass::NotLinear);
    // Morphism with an off-grade entry: does not commute with dilations.
    let mut m = DMatrix::identity(3, 3);
    m[(2, 0)] = 1.0;
    let shear = cand(m);
    assert_eq!(shear.morphism_residual, 0.0);
    assert_eq!(shear.dilation_residual, 1.0);
    assert_eq!(classify_linear(&shear, 1e-10), LinearClass::EndOnly);
    assert!(LinearCandidate::new(&c, DMatrix::identity(2, 2)).is_err());
}

#[test]
fn bad_ladders_and_probes() {
    let c = h1();
    let law = GroupLaw::carnot(&c).unwrap();
    let f = left_translation(&law, v(&[1.0, 0.0, 0.0]));
    let x = v(&[0.0, 0.0, 0.0]);
    assert!(pansu_derivative_estimate(&c, &f, &x, &[0.1, 0.05], &default_probes(&c), 1e-8).is_err());
    assert!(pansu_derivative_estimate(&c, &f, &x, &[0.1, 0.2, 0.05], &default_probes(&c), 1e-8).is_err());
    let flat = vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])];
    assert!(pansu_derivative_estimate(&c, &f, &x, &default_ladder(4), &flat, 1e-8).is_err());
}

#[test]
fn development_examples() {
    let c = h1();
    let seg = SampledCurve::from_fn(0.0, 1.0, 10, |t| v(&[0.3 * t, -0.4 * t, 0.0])).unwrap();
    let sigma = develop_curve(&c, &seg).unwrap();
    for (a, b) in sigma.points.iter().zip(&seg.points) {
        assert!((a - b).amax() < 1e-15);
    }
    let constant = SampledCurve::from_fn(0.0, 1.0, 5, |_| v(&[0.0, 0.0, 0.0])).unwrap();
    assert!(develop_curve(&c, &constant).unwrap().points.iter().all(|p| p.amax() == 0.0));
    assert!(SampledCurve::new(vec![0.0, 0.0], vec![v(&[0.0; 3]), v(&[0.0; 3])]).is_err());
    assert!(SampledCurve::new(vec![0.0, 1.0], vec![v(&[0.0; 3])]).is_err());
}

/// Horizontal lift of the unit square traversed counterclockwise, `m` samples per side.
fn square_loop(m: usize) -> SampledCurve {
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)];
    let mut pts = vec![v(&[0.0, 0.0, 0.0])];
    let mut z = 0.0;
    let mut prev: (f64, f64) = (0.0, 0.0);
    for w in corners.windows(2) {
        for k in 1..=m {
            let t = k as f64 / m as f64;
            let p = (w[0].0 + t * (w[1].0 - w[0].0), w[0].1 + t * (w[1].1 - w[0].1));
            z += 0.5 * (prev.0 * p.1 - prev.1 * p.0);
            prev = p;
            pts.push(v(&[p.0, p.1, z]));
        }
    }
    let times = (0..pts.len()).map(|k| k as f64).collect();
    SampledCurve::new(times, pts).unwrap()
}

#[test]
fn square_loop_development_forgets_area() {
    let c = h1();
    let curve = square_loop(8);
    let end = curve.points.last().unwrap();
    assert!((end - v(&[0.0, 0.0, 1.0])).amax() < 1e-14);
    assert!(horizontality_defect(&c, &curve).unwrap() < 1e-14);
    let sigma = develop_curve(&c, &curve).unwrap();
    assert!(sigma.points.last().unwrap().amax() < 1e-14);
    let back = lift_curve(&c, &sigma).unwrap();
    for (a, b) in back.points.iter().zip(&curve.points) {
        assert!((a - b).amax() < 1e-13);
    }
}

#[test]
fn lift_of_linear_and_circular_developments() {
    let c = h1();
    let line = SampledCurve::from_fn(0.0, 1.0, 7, |t| v(&[t, 2.0 * t, 0.0])).unwrap();
    let lifted = lift_curve(&c, &line).unwrap();
    for (a, b) in lifted.points.iter().zip(&line.points) {
        assert!((a - b).amax() < 1e-15);
    }
    assert!(horizontality_defect(&c, &lifted).unwrap() < 1e-15);

    let r = 0.7;
    let errors: Vec<f64> = [64usize, 128, 256]
        .iter()
        .map(|&n| {
            let sigma = SampledCurve::from_fn(0.0, 2.0 * PI, n, |t| v(&[r * (t.cos() - 1.0), r * t.sin(), 0.0])).unwrap();
            let end = lift_curve(&c, &sigma).unwrap().points.last().unwrap().clone();
            assert!(end.rows(0, 2).amax() < 1e-12);
            (end[2] - PI * r * r).abs()
        })
        .collect();
    assert!(errors[2] < 1e-3);
    assert!(errors[0] / errors[2] > 12.0, "{errors:?}");
}

#[test]
fn i_area_examples() {
    let c = h1();
    let line = SampledCurve::from_fn(0.0, 1.0, 9, |t| v(&[t, -t, 0.0])).unwrap();
    assert!(i_area(&c, &line, 1).unwrap().points.iter().all(|p| p.amax() < 1e-15));
    let r = 0.5;
    let circle = |n| SampledCurve::from_fn(0.0, 2.0 * PI, n, |t| v(&[r * (t.cos() - 1.0), r * t.sin(), 0.0])).unwrap();
    let coarse = i_area(&c, &circle(200), 1).unwrap().points.last().unwrap()[2];
    let fine = i_area(&c, &circle(2000), 1).unwrap().points.last().unwrap()[2];
    let exact = 2.0 * PI * r * r;
    assert!((fine - exact).abs() < 1e-5);
    assert!((coarse - fine).abs() < 1e-3);
    assert!(i_area(&c, &circle(50), 2).unwrap().points.iter().all(|p| p.amax() == 0.0));
    assert!(i_area(&c, &circle(50), 0).is_err());
}

#[test]
fn development_and_area_orders() {
    let c = h1();
    let scales = [0.4, 0.2, 0.1, 0.05, 0.025];
    for kappa in test_curvatures() {
        let mut dev = Vec::new();
        let mut area = Vec::new();
        for &s in &scales {
            let pts = horizontal_curve(kappa.as_ref(), s, 200, 4);
            let curve = SampledCurve::from_fn(0.0, s, 200, |_| DVector::zeros(3)).map(|mut cv| {
                cv.points = pts.clone();
                cv
            })
            .unwrap();
            let sigma = develop_curve(&c, &curve).unwrap();
            dev.push((sigma.points.last().unwrap() - curve.points.last().unwrap()).norm());
            area.push(i_area(&c, &sigma, 1).unwrap().points.last().unwrap().norm());
        }
        let x: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
        let dev_fit = fit_line(&x, &dev.iter().map(|e| e.ln()).collect::<Vec<_>>());
        let area_fit = fit_line(&x, &area.iter().map(|e| e.ln()).collect::<Vec<_>>());
        assert!(dev_fit.slope >= 1.9, "development slope {}", dev_fit.slope);
        assert!(area_fit.slope >= 2.9, "area slope {}", area_fit.slope);
    }
}

#[test]
fn beta_limit_examples() {
    let ladder = default_ladder(7);
    let h = h1();
    let law = GroupLaw::carnot(&h).unwrap();
    let (x, y) = (v(&[0.3, -1.0, 2.0]), v(&[1.5, 0.2, -0.7]));
    let est = beta_limit(&h, &x, &y, &ladder).unwrap();
    let xy = law.mul(&x, &y);
    assert!(est.samples.iter().all(|s| (s - &xy).amax() < 1e-12));

    let s = sussmann();
    let est = beta_limit(&s, &v(&[0.0, 1.0, 0.0, 0.0]), &v(&[0.0, 0.0, 1.0, 0.0]), &ladder).unwrap();
    assert!((est.value - v(&[0.0, 1.0, 1.0, 0.0])).amax() < 1e-8);
    let x = v(&[0.4, -0.3, 0.8, 0.1]);
    assert!(beta_limit(&s, &x, &(-&x), &ladder).unwrap().value.amax() < 1e-8);

    let n_law = GroupLaw::carnot(&s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let x = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let y = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
        let est = beta_limit(&s, &x, &y, &ladder).unwrap();
        assert!((est.value - n_law.mul(&x, &y)).amax() < 1e-6);
    }
}
