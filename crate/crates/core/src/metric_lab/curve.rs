use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use super::space::FiniteMetricSpace;
use crate::error::{invalid, CarnotError, Result};
use crate::numeric::fit_line;

type SampleMetric = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

/// Samples `f(t_0), …, f(t_m)` of a curve in a metric space, seen only
/// through the distances between samples.
#[derive(Clone)]
pub struct MetricCurve {
    times: Vec<f64>,
    /// Sample slot of each retained time.
    slots: Vec<usize>,
    metric: SampleMetric,
}

impl std::fmt::Debug for MetricCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricCurve").field("times", &self.times).finish_non_exhaustive()
    }
}

impl MetricCurve {
    /// `metric(i, j)` is the distance between samples `i` and `j`.
    pub fn new(times: Vec<f64>, metric: impl Fn(usize, usize) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if times.len() < 2 {
            return invalid("a curve needs at least two samples");
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("sample times must be finite and strictly increasing");
        }
        let slots = (0..times.len()).collect();
        Ok(Self { times, slots, metric: Arc::new(metric) })
    }

    /// Coordinate points with an arbitrary distance function.
    pub fn from_points(
        times: Vec<f64>,
        points: Vec<DVector<f64>>,
        metric: impl Fn(&DVector<f64>, &DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if points.len() != times.len() {
            return invalid("times and points differ in length");
        }
        Self::new(times, move |i, j| metric(&points[i], &points[j]))
    }

    pub fn euclidean(times: Vec<f64>, points: Vec<DVector<f64>>) -> Result<Self> {
        Self::from_points(times, points, |a, b| (a - b).norm())
    }

    /// Samples `t ↦ f(t)` at `n` equally spaced times on `[a, b]`.
    pub fn sample_euclidean(a: f64, b: f64, n: usize, f: impl Fn(f64) -> DVector<f64>) -> Result<Self> {
        if n < 2 {
            return invalid("a curve needs at least two samples");
        }
        let times: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let points = times.iter().map(|&t| f(t)).collect();
        Self::euclidean(times, points)
    }

    /// A curve visiting points of a finite space, `f(t_k) = indices[k]`.
    pub fn in_space(space: &FiniteMetricSpace, times: Vec<f64>, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != times.len() {
            return invalid("times and indices differ in length");
        }
        if indices.iter().any(|&i| i >= space.len()) {
            return invalid("curve visits an index outside the space");
        }
        let space = space.clone();
        Self::new(times, move |i, j| space.distance(indices[i], indices[j]))
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Distance between the `i`-th and `j`-th retained samples.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.metric)(self.slots[i], self.slots[j])
    }

    /// The curve sampled on a sub-partition given by increasing positions.
    pub fn restrict(&self, positions: &[usize]) -> Result<Self> {
        if positions.len() < 2 || positions.windows(2).any(|w| w[1] <= w[0]) || positions.last() >= Some(&self.len()) {
            return invalid("positions must be increasing, in range and at least two");
        }
        Ok(Self {
            times: positions.iter().map(|&p| self.times[p]).collect(),
            slots: positions.iter().map(|&p| self.slots[p]).collect(),
            metric: Arc::clone(&self.metric),
        })
    }
}

/// `Σ d(f(t_i), f(t_{i+1}))` over the sample partition, a lower bound for
/// the variation that can only grow under refinement.
pub fn variation(curve: &MetricCurve) -> f64 {
    (0..curve.len() - 1).map(|i| curve.distance(i, i + 1)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilatationConfig {
    /// Initial half-window, in samples.
    pub max_window: usize,
    /// Relative change below which the windowed sup counts as stable.
    pub stabilize: f64,
    /// Curves whose largest quotient grows faster than `mesh^{slope}` with
    /// `slope` below this threshold are rejected.
    pub lipschitz_slope: f64,
}

impl Default for DilatationConfig {
    fn default() -> Self {
        Self { max_window: 4, stabilize: 0.01, lipschitz_slope: -0.2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilatationLength {
    /// Trapezoid integral of the sampled dilatation.
    pub length: f64,
    /// Sampled dilatation at each time.
    pub dil: Vec<f64>,
    /// Fitted exponent of the largest quotient against the mesh; near zero
    /// for Lipschitz curves.
    pub quotient_slope: f64,
}

/// `∫ dil(f)(t) dt`, with `dil` sampled as a windowed sup of difference
/// quotients.
///
/// At each sample the half-window starts at `max_window` and is halved while
/// the sup still drops by more than `stabilize`, stopping at one neighbour
/// on each side. The Lipschitz test fits the largest quotient at strides
/// `1, 2, 4, 8, 16` against the mesh.
pub fn length_via_dilatation(curve: &MetricCurve, cfg: &DilatationConfig) -> Result<DilatationLength> {
    let n = curve.len();
    let t = curve.times();
    let quotient_slope = quotient_growth(curve);
    if quotient_slope < cfg.lipschitz_slope {
        return Err(CarnotError::NotLipschitz { slope: quotient_slope });
    }
    let window_sup = |i: usize, w: usize| -> f64 {
        let lo = i.saturating_sub(w);
        let hi = (i + w).min(n - 1);
        (lo..=hi).filter(|&j| j != i).map(|j| curve.distance(i, j) / (t[j] - t[i]).abs()).fold(0.0, f64::max)
    };
    let dil: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut w = cfg.max_window.max(1);
            let mut q = window_sup(i, w);
            while w > 1 {
                let next = window_sup(i, w / 2);
                w /= 2;
                let stable = q - next <= cfg.stabilize * q;
                q = next;
                if stable {
                    break;
                }
            }
            q
        })
        .collect();
    let length = (0..n - 1).map(|i| 0.5 * (dil[i] + dil[i + 1]) * (t[i + 1] - t[i])).sum();
    Ok(DilatationLength { length, dil, quotient_slope })
}

/// Slope of `log max_i d(f(t_i), f(t_{i+s})) / (t_{i+s} − t_i)` against
/// `log(mean mesh · s)`; zero when too few samples.
fn quotient_growth(curve: &MetricCurve) -> f64 {
    let n = curve.len();
    let t = curve.times();
    let mesh = (t[n - 1] - t[0]) / (n - 1) as f64;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for s in [1usize, 2, 4, 8, 16] {
        if s * 2 >= n {
            break;
        }
        let q = (0..n - s)
            .into_par_iter()
            .map(|i| curve.distance(i, i + s) / (t[i + s] - t[i]))
            .reduce(|| 0.0, f64::max);
        if q > 0.0 {
            xs.push((mesh * s as f64).ln());
            ys.push(q.ln());
        }
    }
    if xs.len() < 3 {
        return 0.0;
    }
    fit_line(&xs, &ys).slope
}
