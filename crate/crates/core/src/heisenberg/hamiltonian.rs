use std::f64::consts::PI;

use nalgebra::DVector;

use super::group::{apply_j, omega_raw};
use super::lift::{LiftConfig, PathStrategy};
use crate::error::{invalid, CarnotError, Result};
use crate::numeric::{seeded_rng, GAUSS5};
use crate::pansu::SampledCurve;
use rand::Rng;

/// Time-dependent Hamiltonian on `R^{2n}` with its spatial gradient.
pub trait Hamiltonian: Sync {
    /// Dimension `2n` of the phase space.
    fn dim(&self) -> usize;
    fn value(&self, t: f64, x: &[f64]) -> f64;
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]);
    /// `H(t, x) = 0` whenever `|x| > support_radius`; infinite if unbounded.
    fn support_radius(&self) -> f64 {
        f64::INFINITY
    }
}

impl<H: Hamiltonian + ?Sized> Hamiltonian for Box<H> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        (**self).value(t, x)
    }
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        (**self).gradient(t, x, out)
    }
    fn support_radius(&self) -> f64 {
        (**self).support_radius()
    }
}

impl<H: Hamiltonian + ?Sized> Hamiltonian for &H {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        (**self).value(t, x)
    }
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        (**self).gradient(t, x, out)
    }
    fn support_radius(&self) -> f64 {
        (**self).support_radius()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroHamiltonian {
    pub dim: usize,
}

impl Hamiltonian for ZeroHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _: f64, _: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _: f64, _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn support_radius(&self) -> f64 {
        0.0
    }
}

/// `H(x) = ⟨p, x⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearHamiltonian {
    pub p: Vec<f64>,
}

impl Hamiltonian for LinearHamiltonian {
    fn dim(&self) -> usize {
        self.p.len()
    }
    fn value(&self, _: f64, x: &[f64]) -> f64 {
        self.p.iter().zip(x).map(|(a, b)| a * b).sum()
    }
    fn gradient(&self, _: f64, _: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.p);
    }
}

/// `H(x) = ½|x|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    pub dim: usize,
}

impl Hamiltonian for QuadraticHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _: f64, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }
    fn gradient(&self, _: f64, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
}

/// `C^∞` step: 1 for `u ≤ 0`, 0 for `u ≥ 1`, with its derivative.
fn cutoff(u: f64) -> (f64, f64) {
    if u <= 0.0 {
        return (1.0, 0.0);
    }
    if u >= 1.0 {
        return (0.0, 0.0);
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    let da = a / (u * u);
    let db = -b / ((1.0 - u) * (1.0 - u));
    let s = a + b;
    (b / s, (db * s - b * (da + db)) / (s * s))
}

/// `½|x|²` for `|x| ≤ inner`, smoothly cut off to zero at `|x| = outer`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedQuadratic {
    pub dim: usize,
    pub inner: f64,
    pub outer: f64,
}

impl TruncatedQuadratic {
    pub fn new(dim: usize, inner: f64, outer: f64) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 || !(inner > 0.0 && outer > inner) {
            return invalid("truncated quadratic needs even dim and 0 < inner < outer");
        }
        Ok(Self { dim, inner, outer })
    }
}

impl Hamiltonian for TruncatedQuadratic {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _: f64, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let (c, _) = cutoff((r2.sqrt() - self.inner) / (self.outer - self.inner));
        0.5 * r2 * c
    }
    fn gradient(&self, _: f64, x: &[f64], out: &mut [f64]) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        let w = self.outer - self.inner;
        let (c, dc) = cutoff((r - self.inner) / w);
        let factor = c + 0.5 * r * dc / w;
        for (o, v) in out.iter_mut().zip(x) {
            *o = factor * v;
        }
    }
    fn support_radius(&self) -> f64 {
        self.outer
    }
}

/// `A (1 − |x − c|²/R²)^k` inside the ball of radius `R` around `c`; `C^{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialBump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
    pub power: i32,
}

fn check_bump(center: &[f64], radius: f64, amplitude: f64) -> Result<()> {
    if center.is_empty() || center.len() % 2 != 0 || !(radius > 0.0) || !amplitude.is_finite() {
        return invalid("bump needs an even-dimensional centre, positive radius and finite amplitude");
    }
    Ok(())
}

fn scaled_sq_dist(center: &[f64], radius: f64, x: &[f64]) -> f64 {
    center.iter().zip(x).map(|(c, v)| (v - c) * (v - c)).sum::<f64>() / (radius * radius)
}

impl PolynomialBump {
    /// Cubic profile.
    pub fn new(center: Vec<f64>, radius: f64, amplitude: f64) -> Result<Self> {
        Self::with_power(center, radius, amplitude, 3)
    }

    pub fn with_power(center: Vec<f64>, radius: f64, amplitude: f64, power: i32) -> Result<Self> {
        check_bump(&center, radius, amplitude)?;
        if power < 2 {
            return invalid("bump power must be at least 2 for a C¹ gradient");
        }
        Ok(Self { center, radius, amplitude, power })
    }
}

impl Hamiltonian for PolynomialBump {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, _: f64, x: &[f64]) -> f64 {
        let u = scaled_sq_dist(&self.center, self.radius, x);
        if u >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - u).powi(self.power)
        }
    }
    fn gradient(&self, _: f64, x: &[f64], out: &mut [f64]) {
        let u = scaled_sq_dist(&self.center, self.radius, x);
        if u >= 1.0 {
            out.fill(0.0);
            return;
        }
        let k = -2.0 * self.power as f64 * self.amplitude * (1.0 - u).powi(self.power - 1) / (self.radius * self.radius);
        for ((o, v), c) in out.iter_mut().zip(x).zip(&self.center) {
            *o = k * (v - c);
        }
    }
    fn support_radius(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum::<f64>().sqrt() + self.radius
    }
}

/// `A exp(1 − 1/(1 − |x − c|²/R²))`, a `C^∞` bump with peak `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothBump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl SmoothBump {
    pub fn new(center: Vec<f64>, radius: f64, amplitude: f64) -> Result<Self> {
        check_bump(&center, radius, amplitude)?;
        Ok(Self { center, radius, amplitude })
    }
}

impl Hamiltonian for SmoothBump {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, _: f64, x: &[f64]) -> f64 {
        let u = scaled_sq_dist(&self.center, self.radius, x);
        if u >= 1.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 1.0 / (1.0 - u)).exp()
        }
    }
    fn gradient(&self, _: f64, x: &[f64], out: &mut [f64]) {
        let u = scaled_sq_dist(&self.center, self.radius, x);
        if u >= 1.0 {
            out.fill(0.0);
            return;
        }
        let w = 1.0 - u;
        let k = -self.amplitude * (1.0 - 1.0 / w).exp() / (w * w) * 2.0 / (self.radius * self.radius);
        for ((o, v), c) in out.iter_mut().zip(x).zip(&self.center) {
            *o = k * (v - c);
        }
    }
    fn support_radius(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum::<f64>().sqrt() + self.radius
    }
}

/// `s H`.
pub struct Scaled<H> {
    pub inner: H,
    pub factor: f64,
}

impl<H: Hamiltonian> Hamiltonian for Scaled<H> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self.factor * self.inner.value(t, x)
    }
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        self.inner.gradient(t, x, out);
        for o in out.iter_mut() {
            *o *= self.factor;
        }
    }
    fn support_radius(&self) -> f64 {
        if self.factor == 0.0 {
            0.0
        } else {
            self.inner.support_radius()
        }
    }
}

/// `(1 + depth · sin 2πt) H(x)`.
pub struct TimeModulated<H> {
    pub inner: H,
    pub depth: f64,
}

impl<H: Hamiltonian> TimeModulated<H> {
    fn weight(&self, t: f64) -> f64 {
        1.0 + self.depth * (2.0 * PI * t).sin()
    }
}

impl<H: Hamiltonian> Hamiltonian for TimeModulated<H> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, t: f64, x: &[f64]) -> f64 {
        self.weight(t) * self.inner.value(t, x)
    }
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        self.inner.gradient(t, x, out);
        let w = self.weight(t);
        for o in out.iter_mut() {
            *o *= w;
        }
    }
    fn support_radius(&self) -> f64 {
        self.inner.support_radius()
    }
}

/// Samples `|x| ∈ (R, 2R]` and returns the largest `|H|` found there.
pub fn support_violation(h: &dyn Hamiltonian, samples: usize, seed: u64) -> f64 {
    let r = h.support_radius();
    if !r.is_finite() {
        return 0.0;
    }
    let r = r.max(1e-3);
    let mut rng = seeded_rng(seed);
    let d = h.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let dir: Vec<f64> = (0..d).map(|_| rng.random::<f64>() - 0.5).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let rad = r * (1.0 + 1e-9 + rng.random::<f64>());
        let x: Vec<f64> = dir.iter().map(|v| v / norm * rad).collect();
        let t: f64 = rng.random();
        worst = worst.max(h.value(t, &x).abs());
    }
    worst
}

/// Extra scalar carried along each state.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Carry {
    None,
    /// `ż = ½ω(x, ẋ)`: height of the horizontal lift.
    Area,
    /// `ż = H + ½ω(x, ẋ)`: the generating function of the time-`t` map.
    Action,
}

/// Fixed-step RK4 for `ẋ = J∇H(t, x)` on a batch of states stored
/// contiguously.
pub(crate) struct Integrator<'a> {
    h: &'a dyn Hamiltonian,
    d: usize,
    carry: Carry,
    grad: Vec<f64>,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl<'a> Integrator<'a> {
    pub(crate) fn new(h: &'a dyn Hamiltonian, carry: Carry) -> Self {
        let d = h.dim();
        Self { h, d, carry, grad: vec![0.0; d], k: Default::default(), tmp: Vec::new() }
    }

    fn stride(&self) -> usize {
        self.d + usize::from(self.carry != Carry::None)
    }

    fn rhs(&mut self, t: f64, state: &[f64], out: &mut [f64]) {
        let (d, s) = (self.d, self.stride());
        for (x, o) in state.chunks(s).zip(out.chunks_mut(s)) {
            self.h.gradient(t, &x[..d], &mut self.grad);
            apply_j(&self.grad, &mut o[..d]);
            match self.carry {
                Carry::None => {}
                Carry::Area => o[d] = 0.5 * omega_raw(&x[..d], &o[..d]),
                Carry::Action => o[d] = self.h.value(t, &x[..d]) + 0.5 * omega_raw(&x[..d], &o[..d]),
            }
        }
    }

    pub(crate) fn step(&mut self, t: f64, dt: f64, state: &mut [f64]) {
        let len = state.len();
        for k in self.k.iter_mut() {
            k.resize(len, 0.0);
        }
        self.tmp.resize(len, 0.0);
        let mut k = std::mem::take(&mut self.k);
        let mut tmp = std::mem::take(&mut self.tmp);
        self.rhs(t, state, &mut k[0]);
        for i in 0..len {
            tmp[i] = state[i] + 0.5 * dt * k[0][i];
        }
        self.rhs(t + 0.5 * dt, &tmp, &mut k[1]);
        for i in 0..len {
            tmp[i] = state[i] + 0.5 * dt * k[1][i];
        }
        self.rhs(t + 0.5 * dt, &tmp, &mut k[2]);
        for i in 0..len {
            tmp[i] = state[i] + dt * k[2][i];
        }
        self.rhs(t + dt, &tmp, &mut k[3]);
        for i in 0..len {
            state[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        self.k = k;
        self.tmp = tmp;
    }
}

fn check_flow_args(h: &dyn Hamiltonian, x0: &[f64], t_end: f64, steps: usize) -> Result<()> {
    if steps == 0 {
        return invalid("need at least one integration step");
    }
    if x0.len() != h.dim() {
        return invalid(format!("initial point has length {}, Hamiltonian dimension {}", x0.len(), h.dim()));
    }
    if !t_end.is_finite() || t_end == 0.0 {
        return invalid("final time must be finite and non-zero");
    }
    Ok(())
}

/// Trajectory of `ẋ = J∇H` and the drift of `H` along it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub curve: SampledCurve,
    /// `max_t |H(t, x(t)) − H(0, x0)|`; meaningful for autonomous `H`.
    pub energy_drift: f64,
}

pub fn hamiltonian_flow(h: &dyn Hamiltonian, x0: &DVector<f64>, t_end: f64, steps: usize) -> Result<Trajectory> {
    check_flow_args(h, x0.as_slice(), t_end, steps)?;
    if t_end < 0.0 {
        return invalid("sampled trajectories run forward in time");
    }
    let dt = t_end / steps as f64;
    let mut integ = Integrator::new(h, Carry::None);
    let mut x: Vec<f64> = x0.iter().cloned().collect();
    let e0 = h.value(0.0, &x);
    let mut drift: f64 = 0.0;
    let mut times = vec![0.0];
    let mut points = vec![x0.clone()];
    for k in 0..steps {
        let t = k as f64 * dt;
        integ.step(t, dt, &mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CarnotError::IntegrationBlowup { last_valid_time: t });
        }
        let t1 = (k + 1) as f64 * dt;
        drift = drift.max((h.value(t1, &x) - e0).abs());
        times.push(t1);
        points.push(DVector::from_column_slice(&x));
    }
    Ok(Trajectory { curve: SampledCurve::new(times, points)?, energy_drift: drift })
}

/// Endpoint `φ_T(x)` of the flow from time 0.
pub fn flow_endpoint(h: &dyn Hamiltonian, x0: &[f64], t_end: f64, steps: usize) -> Result<Vec<f64>> {
    check_flow_args(h, x0, t_end, steps)?;
    let dt = t_end / steps as f64;
    let mut integ = Integrator::new(h, Carry::None);
    let mut x = x0.to_vec();
    for k in 0..steps {
        integ.step(k as f64 * dt, dt, &mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CarnotError::IntegrationBlowup { last_valid_time: k as f64 * dt });
        }
    }
    Ok(x)
}

/// Generating function of the time-`T` map at `x0`, normalised to vanish
/// outside the support: `F_T(x0) = ∫₀^T (H + λ(J∇H))(t, φ_t(x0)) dt`.
pub fn generating_function_action(h: &dyn Hamiltonian, x0: &[f64], t_end: f64, steps: usize) -> Result<f64> {
    check_flow_args(h, x0, t_end, steps)?;
    let dt = t_end / steps as f64;
    let mut integ = Integrator::new(h, Carry::Action);
    let mut x = x0.to_vec();
    x.push(0.0);
    for k in 0..steps {
        integ.step(k as f64 * dt, dt, &mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(CarnotError::IntegrationBlowup { last_valid_time: k as f64 * dt });
        }
    }
    Ok(x[x0.len()])
}

/// The time-`T` map of `H` as a [`PlanarMap`](super::PlanarMap).
pub fn flow_map<H: Hamiltonian>(h: H, t_end: f64, steps: usize) -> impl Fn(&DVector<f64>) -> Result<DVector<f64>> + Sync {
    move |x: &DVector<f64>| flow_endpoint(&h, x.as_slice(), t_end, steps).map(DVector::from_vec)
}

/// Maximum of `|d/dt (vertical part of φ^v_t) + H(t, φ_t(x0))|` over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalFlowCheck {
    pub max_residual: f64,
    /// `(t, vertical part of φ^v_t(x0, 0))`.
    pub vertical: Vec<(f64, f64)>,
    /// `(t, H(t, φ_t(x0)))`.
    pub hamiltonian: Vec<(f64, f64)>,
}

/// Per-time-step series along one trajectory: the horizontal lift height and
/// the generating function of the time-`t` map at the starting point.
pub(crate) struct SliceSeries {
    pub times: Vec<f64>,
    pub horizontal_height: Vec<f64>,
    pub generating: Vec<f64>,
    pub hamiltonian: Vec<f64>,
    pub speed: Vec<f64>,
}

/// Base point for generating functions: outside the support, where every
/// time slice is the identity and `F_t = 0`.
pub(crate) fn outside_base(h: &dyn Hamiltonian) -> Result<DVector<f64>> {
    let r = h.support_radius();
    if !r.is_finite() {
        return invalid("generating functions need a compactly supported Hamiltonian");
    }
    let mut b = DVector::zeros(h.dim());
    b[0] = r + 1.0;
    Ok(b)
}

/// Integrates the trajectory of `x0` together with every quadrature node of the
/// path from the base point (and its `±h` neighbours), so that `F_t(x0)` is
/// available at every step at the cost of a single batched integration.
pub(crate) fn slice_series(h: &dyn Hamiltonian, x0: &DVector<f64>, t_end: f64, steps: usize, cfg: &LiftConfig) -> Result<SliceSeries> {
    check_flow_args(h, x0.as_slice(), t_end, steps)?;
    let d = h.dim();
    let base = outside_base(h)?;
    let mut verts = vec![base.clone()];
    match cfg.path {
        PathStrategy::Straight => verts.push(x0.clone()),
        PathStrategy::CoordinateAxes => {
            let mut cur = base.clone();
            for i in 0..d {
                if cur[i] != x0[i] {
                    cur[i] = x0[i];
                    verts.push(cur.clone());
                }
            }
        }
    }
    struct Node {
        weight: f64,
        dir: DVector<f64>,
        y: DVector<f64>,
    }
    let mut nodes = Vec::new();
    for w in verts.windows(2) {
        let delta = &w[1] - &w[0];
        let len = delta.norm();
        if len == 0.0 {
            continue;
        }
        let dir = &delta / len;
        let panels = (len * cfg.panels_per_unit).ceil().max(1.0) as usize;
        let pw = len / panels as f64;
        for k in 0..panels {
            for &(s, weight) in &GAUSS5 {
                nodes.push(Node { weight: weight * pw, dir: dir.clone(), y: &w[0] + &dir * (pw * (k as f64 + s)) });
            }
        }
    }
    // Layout: x0 with its area coordinate, then (y, y+hv, y−hv) per node.
    let hstep = cfg.fd_step;
    let stride = d + 1;
    let mut state = Vec::with_capacity(stride * (1 + 3 * nodes.len()));
    let mut push = |p: &DVector<f64>| {
        state.extend(p.iter());
        state.push(0.0);
    };
    push(x0);
    for node in &nodes {
        push(&node.y);
        push(&(&node.y + &node.dir * hstep));
        push(&(&node.y - &node.dir * hstep));
    }
    let generating = |state: &[f64]| -> f64 {
        let mut total = 0.0;
        for (k, node) in nodes.iter().enumerate() {
            let off = stride * (1 + 3 * k);
            let fy = &state[off..off + d];
            let plus = &state[off + stride..off + stride + d];
            let minus = &state[off + 2 * stride..off + 2 * stride + d];
            let dv: Vec<f64> = plus.iter().zip(minus).map(|(a, b)| (a - b) / (2.0 * hstep)).collect();
            let g = 0.5 * omega_raw(fy, &dv) - 0.5 * omega_raw(node.y.as_slice(), node.dir.as_slice());
            total += node.weight * g;
        }
        total
    };
    let dt = t_end / steps as f64;
    let mut integ = Integrator::new(h, Carry::Area);
    let mut grad = vec![0.0; d];
    let mut record = |t: f64, state: &[f64], out: &mut SliceSeries| {
        out.times.push(t);
        out.horizontal_height.push(state[d]);
        out.generating.push(generating(state));
        out.hamiltonian.push(h.value(t, &state[..d]));
        h.gradient(t, &state[..d], &mut grad);
        out.speed.push(grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    };
    let mut out = SliceSeries {
        times: Vec::with_capacity(steps + 1),
        horizontal_height: Vec::with_capacity(steps + 1),
        generating: Vec::with_capacity(steps + 1),
        hamiltonian: Vec::with_capacity(steps + 1),
        speed: Vec::with_capacity(steps + 1),
    };
    record(0.0, &state, &mut out);
    for k in 0..steps {
        let t = k as f64 * dt;
        integ.step(t, dt, &mut state);
        if state.iter().any(|v| !v.is_finite()) {
            return Err(CarnotError::IntegrationBlowup { last_valid_time: t });
        }
        record((k + 1) as f64 * dt, &state, &mut out);
    }
    Ok(out)
}

/// Checks the vertical part of the Hamiltonian flow of `H(n)`.
///
/// With `φ^h_t` the horizontal lift of the trajectories and `φ̃_t` the lift of
/// the time-`t` map normalised outside the support, `φ^v_t = φ̃_t^{-1} ∘ φ^h_t`
/// fixes `x0` and moves the vertical coordinate with velocity
/// `−H(t, φ_t(x0))` under the conventions `ẋ = J∇H`, `λ_x = ½ω(x, ·)`.
pub fn vertical_flow_check(h: &dyn Hamiltonian, x0: &DVector<f64>, t_end: f64, steps: usize) -> Result<VerticalFlowCheck> {
    vertical_flow_check_with(h, x0, t_end, steps, &LiftConfig::default())
}

pub fn vertical_flow_check_with(
    h: &dyn Hamiltonian,
    x0: &DVector<f64>,
    t_end: f64,
    steps: usize,
    cfg: &LiftConfig,
) -> Result<VerticalFlowCheck> {
    if steps < 2 {
        return invalid("vertical flow check needs at least two steps");
    }
    let s = slice_series(h, x0, t_end, steps, cfg)?;
    let vertical: Vec<f64> = s.horizontal_height.iter().zip(&s.generating).map(|(z, f)| z - f).collect();
    let dt = t_end / steps as f64;
    let mut worst: f64 = 0.0;
    for k in 1..steps {
        let dv = (vertical[k + 1] - vertical[k - 1]) / (2.0 * dt);
        worst = worst.max((dv + s.hamiltonian[k]).abs());
    }
    Ok(VerticalFlowCheck {
        max_residual: worst,
        vertical: s.times.iter().cloned().zip(vertical).collect(),
        hamiltonian: s.times.iter().cloned().zip(s.hamiltonian.iter().cloned()).collect(),
    })
}

/// Horizontality versus motion of a lifted Hamiltonian flow at sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    /// Largest vertical velocity of `t ↦ φ̃_t(x, 0)` beyond the horizontal one.
    pub horizontality_defect: f64,
    /// Largest `|φ̇_t(x)|`.
    pub max_speed: f64,
}

impl RigidityReport {
    /// A flow of lifts with horizontal trajectories must be constant.
    pub fn consistent(&self, tol: f64) -> bool {
        self.horizontality_defect > tol || self.max_speed <= tol
    }
}

pub fn rigidity_check(h: &dyn Hamiltonian, samples: &[DVector<f64>], t_end: f64, steps: usize) -> Result<RigidityReport> {
    if steps < 2 {
        return invalid("rigidity check needs at least two steps");
    }
    let cfg = LiftConfig::default();
    let dt = t_end / steps as f64;
    let mut defect: f64 = 0.0;
    let mut speed: f64 = 0.0;
    for x in samples {
        let s = slice_series(h, x, t_end, steps, &cfg)?;
        for k in 1..steps {
            let dz = (s.generating[k + 1] - s.generating[k - 1]) / (2.0 * dt);
            let dh = (s.horizontal_height[k + 1] - s.horizontal_height[k - 1]) / (2.0 * dt);
            defect = defect.max((dz - dh).abs());
        }
        speed = speed.max(s.speed.iter().cloned().fold(0.0, f64::max));
    }
    Ok(RigidityReport { horizontality_defect: defect, max_speed: speed })
}

/// `∫₀¹ max_x |H(t, x)| dt` by the trapezoid rule on `time_nodes` points.
#[derive(Debug, Clone, PartialEq)]
pub struct HoferLength {
    pub value: f64,
    pub samples: usize,
    pub time_nodes: usize,
}

pub fn hofer_length(h: &dyn Hamiltonian, samples: &[DVector<f64>], time_nodes: usize) -> Result<HoferLength> {
    if time_nodes < 2 {
        return invalid("need at least two time nodes");
    }
    if samples.iter().any(|x| x.len() != h.dim()) {
        return invalid("sample dimension mismatch");
    }
    let sup: Vec<f64> = (0..time_nodes)
        .map(|k| {
            let t = k as f64 / (time_nodes - 1) as f64;
            samples.iter().map(|x| h.value(t, x.as_slice()).abs()).fold(0.0, f64::max)
        })
        .collect();
    let dt = 1.0 / (time_nodes - 1) as f64;
    let value = dt * (sup.iter().sum::<f64>() - 0.5 * (sup[0] + sup[time_nodes - 1]));
    Ok(HoferLength { value, samples: samples.len(), time_nodes })
}

/// Midpoints of a `per_axis^d` grid on `[-radius, radius]^d`, kept if they lie
/// in the closed ball of that radius.
pub fn ball_grid(d: usize, radius: f64, per_axis: usize) -> Vec<DVector<f64>> {
    let h = 2.0 * radius / per_axis as f64;
    let total = per_axis.pow(d as u32);
    (0..total)
        .filter_map(|mut idx| {
            let p = DVector::from_fn(d, |_, _| {
                let i = idx % per_axis;
                idx /= per_axis;
                -radius + h * (i as f64 + 0.5)
            });
            (p.norm() <= radius).then_some(p)
        })
        .collect()
}
