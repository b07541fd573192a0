//! Test-side oracles shared by the integration suites.
#![allow(dead_code)]

use nalgebra::DVector;

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

/// Exact CC distance from the origin in h(1) with `[X,Y] = Z`, via the
/// circular-arc geodesics.
pub fn h1_distance(x: f64, y: f64, z: f64) -> f64 {
    let r = x.hypot(y);
    let z = z.abs();
    if z == 0.0 {
        return r;
    }
    if r == 0.0 {
        return 2.0 * (std::f64::consts::PI * z).sqrt();
    }
    let target = z / (r * r);
    let f = |a: f64| (a - a.sin()) / (8.0 * (a / 2.0).sin().powi(2));
    let (mut lo, mut hi) = (0.0_f64, 2.0 * std::f64::consts::PI - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    a * r / (2.0 * (a / 2.0).sin())
}

/// Unit-speed horizontal curve in h(1) with curvature `kappa(s)`, started at
/// the origin heading along `x`. Returns `n + 1` samples of `(x, y, z)` on
/// `[0, s_end]` from RK4 with `sub` substeps per sample.
pub fn horizontal_curve(kappa: &dyn Fn(f64) -> f64, s_end: f64, n: usize, sub: usize) -> Vec<DVector<f64>> {
    let rhs = |s: f64, u: [f64; 4]| {
        let (c, sn) = (u[3].cos(), u[3].sin());
        [c, sn, 0.5 * (u[0] * sn - u[1] * c), kappa(s)]
    };
    let mut u = [0.0; 4];
    let mut out = vec![v(&[0.0, 0.0, 0.0])];
    let h = s_end / (n * sub) as f64;
    let mut s = 0.0;
    for _ in 0..n {
        for _ in 0..sub {
            let k1 = rhs(s, u);
            let k2 = rhs(s + h / 2.0, add(u, k1, h / 2.0));
            let k3 = rhs(s + h / 2.0, add(u, k2, h / 2.0));
            let k4 = rhs(s + h, add(u, k3, h));
            for i in 0..4 {
                u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            s += h;
        }
        out.push(v(&u[..3]));
    }
    out
}

fn add(u: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [u[0] + h * k[0], u[1] + h * k[1], u[2] + h * k[2], u[3] + h * k[3]]
}

/// Curvature profiles of the five development test curves.
pub fn test_curvatures() -> Vec<Box<dyn Fn(f64) -> f64>> {
    vec![
        Box::new(|_| 1.0),
        Box::new(|_| 2.0),
        Box::new(|_| -0.5),
        Box::new(|s| 1.0 + s),
        Box::new(|s| 0.5 + (3.0 * s).cos()),
    ]
}
