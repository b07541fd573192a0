use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::pansu::SampledCurve;

/// Point `(x, x̄)` of `H(n) = R^{2n} × R`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    pub x: DVector<f64>,
    pub xbar: f64,
}

impl HPoint {
    pub fn new(x: DVector<f64>, xbar: f64) -> Result<Self> {
        if x.len() % 2 != 0 || x.is_empty() {
            return invalid(format!("horizontal part must have even positive length, got {}", x.len()));
        }
        if !xbar.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return invalid("Heisenberg point has non-finite entries");
        }
        Ok(Self { x, xbar })
    }

    pub fn origin(n: usize) -> Self {
        Self { x: DVector::zeros(2 * n), xbar: 0.0 }
    }

    /// Reads `(x_1..x_{2n}, x̄)` from a vector of odd length.
    pub fn from_vector(v: &DVector<f64>) -> Result<Self> {
        if v.len() < 3 {
            return invalid("a Heisenberg point needs at least three coordinates");
        }
        Self::new(v.rows(0, v.len() - 1).into_owned(), v[v.len() - 1])
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.x.len() + 1, self.x.iter().cloned().chain(std::iter::once(self.xbar)))
    }

    pub fn n(&self) -> usize {
        self.x.len() / 2
    }
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() || x.len() % 2 != 0 {
        return invalid(format!("dimension mismatch: {} vs {}", x.len(), y.len()));
    }
    Ok(())
}

/// Unchecked `ω(x, y) = Σ x_i y_{n+i} − x_{n+i} y_i`.
pub(crate) fn omega_raw(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
}

/// Standard symplectic form `xᵀ J y`, `J = [[0, I], [−I, 0]]`.
pub fn omega(x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    check_pair(x.as_slice(), y.as_slice())?;
    Ok(omega_raw(x.as_slice(), y.as_slice()))
}

/// `J v`, so that `ω(x, y) = ⟨x, J y⟩`.
pub(crate) fn apply_j(v: &[f64], out: &mut [f64]) {
    let n = v.len() / 2;
    for i in 0..n {
        out[i] = v[n + i];
        out[n + i] = -v[i];
    }
}

pub fn h_mul(p: &HPoint, q: &HPoint) -> Result<HPoint> {
    check_pair(p.x.as_slice(), q.x.as_slice())?;
    Ok(HPoint { x: &p.x + &q.x, xbar: p.xbar + q.xbar + 0.5 * omega_raw(p.x.as_slice(), q.x.as_slice()) })
}

pub fn h_inv(p: &HPoint) -> HPoint {
    HPoint { x: -&p.x, xbar: -p.xbar }
}

pub fn h_dilate(eps: f64, p: &HPoint) -> HPoint {
    HPoint { x: &p.x * eps, xbar: eps * eps * p.xbar }
}

/// Lie bracket of `h(n)`: `[(x, x̄), (y, ȳ)] = (0, ω(x, y))`.
pub fn h_bracket(p: &HPoint, q: &HPoint) -> Result<HPoint> {
    Ok(HPoint { x: DVector::zeros(p.x.len()), xbar: omega(&p.x, &q.x)? })
}

/// Exact CC distance from the origin to a point with horizontal radius `r`
/// and height `z`, for the metric making `e_1..e_{2n}` orthonormal.
///
/// Geodesics are arcs of circles in a complex line; the chord angle `a`
/// solves `(a − sin a) / (8 sin²(a/2)) = |z| / r²`.
pub fn h_norm_radial(r: f64, z: f64) -> f64 {
    let z = z.abs();
    if z == 0.0 {
        return r;
    }
    if r == 0.0 {
        return 2.0 * (PI * z).sqrt();
    }
    let target = z / (r * r);
    let f = |a: f64| {
        let s = (0.5 * a).sin();
        (a - a.sin()) / (8.0 * s * s)
    };
    let (mut lo, mut hi) = (0.0_f64, 2.0 * PI);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    0.5 * a * r / (0.5 * a).sin()
}

/// Exact CC distance `d(p, q) = |p^{-1} q|` in `H(n)`.
pub fn h_cc_distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    let d = h_mul(&h_inv(p), q)?;
    Ok(h_norm_radial(d.x.norm(), d.xbar))
}

/// Horizontal lift of a planar curve with its quadrature error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarLift {
    /// Points `(c(t), c̄(t))` as vectors of length `2n + 1`.
    pub curve: SampledCurve,
    /// Richardson estimate `|Δ_h − Δ_{2h}| / 3` of the error in the total
    /// vertical advance.
    pub quadrature_error: f64,
}

/// `c̄(t) = x̄₀ + ½ ∫ ω(c, ċ)`, exact on the polygon through the samples.
pub fn lift_planar_curve(c: &SampledCurve, xbar0: f64) -> Result<PlanarLift> {
    if c.dim() % 2 != 0 {
        return invalid(format!("planar curve must have even dimension, got {}", c.dim()));
    }
    let mut z = xbar0;
    let mut points = Vec::with_capacity(c.len());
    for (k, p) in c.points.iter().enumerate() {
        if k > 0 {
            z += 0.5 * omega_raw(c.points[k - 1].as_slice(), p.as_slice());
        }
        points.push(DVector::from_iterator(p.len() + 1, p.iter().cloned().chain(std::iter::once(z))));
    }
    let fine = z - xbar0;
    let mut coarse = 0.0;
    let mut prev = 0;
    for k in (2..c.len()).step_by(2).chain(std::iter::once(c.len() - 1)) {
        if k > prev {
            coarse += 0.5 * omega_raw(c.points[prev].as_slice(), c.points[k].as_slice());
            prev = k;
        }
    }
    let quadrature_error = if c.len() > 2 { (fine - coarse).abs() / 3.0 } else { 0.0 };
    Ok(PlanarLift { curve: SampledCurve::new(c.times.clone(), points)?, quadrature_error })
}
