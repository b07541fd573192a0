use nalgebra::DVector;

use crate::algebra_core::CarnotStructure;
use crate::error::{invalid, Result};
use crate::group_ops::GroupLaw;

/// How values between samples are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Straight segments in exponential coordinates.
    #[default]
    LinearInCoordinates,
}

/// Samples of a curve, either in the group or in the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub times: Vec<f64>,
    pub points: Vec<DVector<f64>>,
    pub interpolation: Interpolation,
}

impl SampledCurve {
    pub fn new(times: Vec<f64>, points: Vec<DVector<f64>>) -> Result<Self> {
        if times.len() != points.len() {
            return invalid("times and points differ in length");
        }
        if times.is_empty() {
            return invalid("a curve needs at least one sample");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("sample times must be strictly increasing");
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
            return invalid("points must be finite and of equal dimension");
        }
        Ok(Self { times, points, interpolation: Interpolation::LinearInCoordinates })
    }

    /// Samples `f` at `n + 1` uniform times on `[a, b]`.
    pub fn from_fn(a: f64, b: f64, n: usize, f: impl Fn(f64) -> DVector<f64>) -> Result<Self> {
        if n == 0 || !(b > a) {
            return invalid("need n ≥ 1 and b > a");
        }
        let times: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        let points = times.iter().map(|&t| f(t)).collect();
        Self::new(times, points)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    fn check_dim(&self, carnot: &CarnotStructure) -> Result<()> {
        if self.dim() != carnot.dim() {
            return invalid(format!("curve has dimension {}, algebra {}", self.dim(), carnot.dim()));
        }
        Ok(())
    }
}

/// `σ(t_j) = Σ_{k<j} log(c(t_k)^{-1} c(t_{k+1}))`.
pub fn develop_curve(carnot: &CarnotStructure, curve: &SampledCurve) -> Result<SampledCurve> {
    curve.check_dim(carnot)?;
    let law = GroupLaw::carnot(carnot)?;
    let mut acc = DVector::zeros(carnot.dim());
    let mut points = vec![acc.clone()];
    for w in curve.points.windows(2) {
        acc += law.mul(&law.inv(&w[0]), &w[1]);
        points.push(acc.clone());
    }
    Ok(SampledCurve { times: curve.times.clone(), points, interpolation: curve.interpolation })
}

/// Multiplicative integral `c(t_j) = Π_{k<j} (σ(t_{k+1}) − σ(t_k))`.
pub fn lift_curve(carnot: &CarnotStructure, sigma: &SampledCurve) -> Result<SampledCurve> {
    sigma.check_dim(carnot)?;
    let law = GroupLaw::carnot(carnot)?;
    let mut acc = DVector::zeros(carnot.dim());
    let mut points = vec![acc.clone()];
    for w in sigma.points.windows(2) {
        acc = law.mul(&acc, &(&w[1] - &w[0]));
        points.push(acc.clone());
    }
    Ok(SampledCurve { times: sigma.times.clone(), points, interpolation: sigma.interpolation })
}

/// `[x, y]_i = [x, [x, … [x, y]]]` with `i` copies of `x`.
pub fn multiple_bracket(carnot: &CarnotStructure, x: &DVector<f64>, y: &DVector<f64>, i: usize) -> DVector<f64> {
    let mut out = y.clone();
    for _ in 0..i {
        out = carnot.nilpotent().bracket(x, &out);
    }
    out
}

/// Partial sums `A^i(t_j) = Σ_{k<j} [σ(t_k), σ(t_{k+1})]_i`.
pub fn i_area(carnot: &CarnotStructure, sigma: &SampledCurve, i: usize) -> Result<SampledCurve> {
    sigma.check_dim(carnot)?;
    if i == 0 {
        return invalid("the area index starts at 1");
    }
    let mut acc = DVector::zeros(carnot.dim());
    let mut points = vec![acc.clone()];
    for w in sigma.points.windows(2) {
        acc += multiple_bracket(carnot, &w[0], &w[1], i);
        points.push(acc.clone());
    }
    Ok(SampledCurve { times: sigma.times.clone(), points, interpolation: sigma.interpolation })
}

/// Largest layer-`≥ 2` component of finite-difference velocities; zero for a
/// horizontal polygon.
pub fn horizontality_defect(carnot: &CarnotStructure, curve: &SampledCurve) -> Result<f64> {
    curve.check_dim(carnot)?;
    let law = GroupLaw::carnot(carnot)?;
    let h = carnot.horizontal_dim();
    let mut worst: f64 = 0.0;
    for (w, t) in curve.points.windows(2).zip(curve.times.windows(2)) {
        let inc = law.mul(&law.inv(&w[0]), &w[1]);
        let dt = t[1] - t[0];
        let vertical = inc.rows(h, inc.len() - h).amax();
        worst = worst.max(vertical / dt);
    }
    Ok(worst)
}
