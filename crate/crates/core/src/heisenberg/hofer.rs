use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use super::group::{h_norm_radial, HPoint};
use super::hamiltonian::{ball_grid, generating_function_action, hofer_length, Hamiltonian, HoferLength};
use super::lift::{LiftedMap, PlanarMap};
use crate::error::{invalid, CarnotError, Result};
use crate::numeric::{mean_stderr, stream_rng};

/// Lebesgue volume of the Euclidean unit ball of `R^k`.
pub fn euclidean_ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / k as f64 * euclidean_ball_volume(k - 2),
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// `vol(B^CC(0,1)) / vol(B^E(0,1))`, both balls in `R^{2n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallRatio {
    pub ratio: Estimate,
    pub cc_volume: Estimate,
    pub samples: usize,
}

const CHUNK: usize = 4096;

/// Samples the outer box of the Ball-Box sandwich, `|x_i| ≤ 1` and
/// `|x̄| ≤ 1/(2π)` (reached by half circles), and counts points of the CC
/// unit ball.
pub fn cc_ball_ratio(n: usize, samples: usize, seed: u64) -> Result<BallRatio> {
    if n == 0 || samples == 0 {
        return invalid("need n ≥ 1 and at least one sample");
    }
    let zmax = 1.0 / (2.0 * PI);
    let chunks = samples.div_ceil(CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut hits = 0;
            for _ in 0..count {
                let r2: f64 = (0..2 * n).map(|_| (2.0 * rng.random::<f64>() - 1.0).powi(2)).sum();
                let z = zmax * (2.0 * rng.random::<f64>() - 1.0);
                if r2 <= 1.0 && h_norm_radial(r2.sqrt(), z) <= 1.0 {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let box_volume = 2f64.powi(2 * n as i32) * 2.0 * zmax;
    let p = hits as f64 / samples as f64;
    let cc = Estimate { value: box_volume * p, stderr: box_volume * (p * (1.0 - p) / samples as f64).sqrt() };
    let e = euclidean_ball_volume(2 * n + 1);
    Ok(BallRatio { ratio: Estimate { value: cc.value / e, stderr: cc.stderr / e }, cc_volume: cc, samples })
}

pub const DEFAULT_RATIO_SAMPLES: usize = 1 << 20;

/// [`cc_ball_ratio`] computed once per `(n, samples, seed)` and cached.
pub fn cached_ball_ratio(n: usize, samples: usize, seed: u64) -> Result<BallRatio> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, u64), BallRatio>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("cache poisoned").get(&(n, samples, seed)) {
        return Ok(*r);
    }
    let r = cc_ball_ratio(n, samples, seed)?;
    cache.lock().expect("cache poisoned").insert((n, samples, seed), r);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoferConfig {
    /// `A` is the ball of this radius around the origin.
    pub region_radius: f64,
    /// Grid nodes per axis for the generating function and the sup norm.
    pub grid_per_axis: usize,
    /// RK4 steps for the time-1 map.
    pub steps: usize,
    pub time_nodes: usize,
    pub ratio_samples: usize,
    pub seed: u64,
}

impl Default for HoferConfig {
    fn default() -> Self {
        Self {
            region_radius: 1.5,
            grid_per_axis: 40,
            steps: 400,
            time_nodes: 21,
            ratio_samples: DEFAULT_RATIO_SAMPLES,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoferCheck {
    /// `C V(φ, A)`.
    pub lhs: f64,
    /// `vol(A) ∫₀¹ ‖H_t‖_∞`.
    pub rhs: f64,
    pub v: f64,
    /// Minimising level `a₀ = −median(F)`.
    pub a0: f64,
    pub region_volume: f64,
    pub constant: BallRatio,
    pub hofer: HoferLength,
    pub pass: bool,
}

/// Volume-weighted median of `values` with equal weights.
fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Checks `C V(φ, A) ≤ vol(A) ∫₀¹ ‖H_t‖_∞` for the time-1 map of `H`.
///
/// `F` is the generating function normalised to vanish outside the support,
/// evaluated on grid midpoints of `A` through the action integral along each
/// trajectory; `V = min_a ∫_A |F + a|` is attained at `a = −median F`.
pub fn hofer_lower_bound_check(h: &dyn Hamiltonian, cfg: &HoferConfig) -> Result<HoferCheck> {
    let d = h.dim();
    if d == 0 || d % 2 != 0 {
        return invalid("Hamiltonian must live on an even-dimensional space");
    }
    if !(h.support_radius() <= cfg.region_radius) {
        return invalid(format!(
            "support radius {} exceeds the region radius {}",
            h.support_radius(),
            cfg.region_radius
        ));
    }
    if cfg.grid_per_axis == 0 {
        return invalid("grid needs at least one node per axis");
    }
    let grid = ball_grid(d, cfg.region_radius, cfg.grid_per_axis);
    let cell = (2.0 * cfg.region_radius / cfg.grid_per_axis as f64).powi(d as i32);
    let f: Vec<f64> = grid
        .par_iter()
        .map(|x| generating_function_action(h, x.as_slice(), 1.0, cfg.steps))
        .collect::<Result<_>>()?;
    let a0 = -median(f.clone());
    let v = cell * f.iter().map(|x| (x + a0).abs()).sum::<f64>();
    let constant = cached_ball_ratio(d / 2, cfg.ratio_samples, cfg.seed)?;
    let hofer = hofer_length(h, &grid, cfg.time_nodes)?;
    let region_volume = euclidean_ball_volume(d) * cfg.region_radius.powi(d as i32);
    let lhs = constant.ratio.value * v;
    let rhs = region_volume * hofer.value;
    let pass = lhs <= rhs + 1e-9 * rhs.max(1.0);
    Ok(HoferCheck { lhs, rhs, v, a0, region_volume, constant, hofer, pass })
}

/// Measurable subset of `H(n)` described by membership and a bounding box.
pub trait HRegion: Sync {
    /// Dimension `2n` of the horizontal part.
    fn dim(&self) -> usize;
    /// Box containing the projection to `R^{2n}`.
    fn base_bounds(&self) -> (DVector<f64>, DVector<f64>);
    fn vertical_bounds(&self) -> (f64, f64);
    fn contains(&self, p: &HPoint) -> bool;
    /// Length of `{x̄ : (x, x̄) ∈ region}` by midpoint counting.
    fn fiber_length(&self, x: &DVector<f64>, resolution: usize) -> f64 {
        let (lo, hi) = self.vertical_bounds();
        let dz = (hi - lo) / resolution as f64;
        let inside = (0..resolution)
            .filter(|&k| self.contains(&HPoint { x: x.clone(), xbar: lo + dz * (k as f64 + 0.5) }))
            .count();
        inside as f64 * dz
    }
}

type Profile = Box<dyn Fn(&DVector<f64>) -> f64 + Sync>;

/// `{(x, x̄) : |x − c| ≤ r, 0 ≤ x̄ − floor(x) ≤ height(x)}`.
pub struct Cylinder {
    pub center: DVector<f64>,
    pub radius: f64,
    pub floor: Profile,
    pub height: Profile,
    /// Vertical range containing the region.
    pub vertical: (f64, f64),
}

impl Cylinder {
    /// `B(c, r) × [lo, lo + h]`.
    pub fn straight(center: DVector<f64>, radius: f64, lo: f64, h: f64) -> Self {
        Self { center, radius, floor: Box::new(move |_| lo), height: Box::new(move |_| h), vertical: (lo, lo + h) }
    }
}

impl HRegion for Cylinder {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn base_bounds(&self) -> (DVector<f64>, DVector<f64>) {
        (self.center.add_scalar(-self.radius), self.center.add_scalar(self.radius))
    }
    fn vertical_bounds(&self) -> (f64, f64) {
        self.vertical
    }
    fn contains(&self, p: &HPoint) -> bool {
        if (&p.x - &self.center).norm() > self.radius {
            return false;
        }
        let z = p.xbar - (self.floor)(&p.x);
        z >= 0.0 && z <= (self.height)(&p.x)
    }
    fn fiber_length(&self, x: &DVector<f64>, _: usize) -> f64 {
        if (x - &self.center).norm() > self.radius {
            0.0
        } else {
            (self.height)(x).max(0.0)
        }
    }
}

/// Image `f̃(Ã)` of a region under a lifted map, given the inverse of `φ`.
pub struct LiftedImage<'a, R, M, I> {
    pub region: &'a R,
    pub lifted: &'a LiftedMap<M>,
    pub inverse: I,
    pub base_bounds: (DVector<f64>, DVector<f64>),
    pub vertical_bounds: (f64, f64),
}

impl<R: HRegion, M: PlanarMap, I: PlanarMap> LiftedImage<'_, R, M, I> {
    /// `f̃^{-1}(y, ȳ) = (x, ȳ − F(x))` with `x = φ^{-1}(y)`.
    fn preimage_base(&self, y: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
        let x = self.inverse.apply(y).ok()?;
        let f = self.lifted.generating(&x).ok()?;
        Some((x, f))
    }
}

impl<R: HRegion, M: PlanarMap, I: PlanarMap> HRegion for LiftedImage<'_, R, M, I> {
    fn dim(&self) -> usize {
        self.region.dim()
    }
    fn base_bounds(&self) -> (DVector<f64>, DVector<f64>) {
        self.base_bounds.clone()
    }
    fn vertical_bounds(&self) -> (f64, f64) {
        self.vertical_bounds
    }
    fn contains(&self, p: &HPoint) -> bool {
        match self.preimage_base(&p.x) {
            Some((x, f)) => self.region.contains(&HPoint { x, xbar: p.xbar - f }),
            None => false,
        }
    }
    fn fiber_length(&self, y: &DVector<f64>, resolution: usize) -> f64 {
        let Some((x, f)) = self.preimage_base(y) else { return 0.0 };
        let (lo, hi) = self.vertical_bounds;
        let dz = (hi - lo) / resolution as f64;
        let inside = (0..resolution)
            .filter(|&k| self.region.contains(&HPoint { x: x.clone(), xbar: lo + dz * (k as f64 + 0.5) - f }))
            .count();
        inside as f64 * dz
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantsConfig {
    pub base_samples: usize,
    /// Midpoints per fiber when lengths are counted.
    pub resolution: usize,
    pub batches: usize,
    pub heights: Vec<usize>,
    pub seed: u64,
}

impl Default for InvariantsConfig {
    fn default() -> Self {
        Self { base_samples: 20_000, resolution: 400, batches: 20, heights: vec![1, 2, 3], seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invariants {
    pub volume: Estimate,
    pub projected_volume: Estimate,
    pub width: Estimate,
    /// `(i, h_i)` with `h_i^i = vol(A)^{-i} ∫_A l(x)^{1/i} dx`.
    pub heights: Vec<(usize, Estimate)>,
}

struct Moments {
    inside: f64,
    length: f64,
    roots: Vec<f64>,
}

/// Width and i-heights by Monte Carlo over the projected bounding box, with
/// standard errors from batch means.
pub fn invariants_width_heights(region: &dyn HRegion, cfg: &InvariantsConfig) -> Result<Invariants> {
    if cfg.base_samples < cfg.batches || cfg.batches < 2 || cfg.resolution == 0 {
        return invalid("need at least two batches, one sample per batch and a positive resolution");
    }
    if cfg.heights.contains(&0) {
        return invalid("height index starts at 1");
    }
    let (lo, hi) = region.base_bounds();
    let d = region.dim();
    if lo.len() != d || hi.len() != d {
        return invalid("bounding box dimension mismatch");
    }
    let box_volume: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
    let per_batch = cfg.base_samples / cfg.batches;
    let batches: Vec<Moments> = (0..cfg.batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(cfg.seed, b as u64);
            let mut m = Moments { inside: 0.0, length: 0.0, roots: vec![0.0; cfg.heights.len()] };
            for _ in 0..per_batch {
                let x = DVector::from_fn(d, |i, _| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>());
                let l = region.fiber_length(&x, cfg.resolution);
                if l > 0.0 {
                    m.inside += 1.0;
                    m.length += l;
                    for (r, &i) in m.roots.iter_mut().zip(&cfg.heights) {
                        *r += l.powf(1.0 / i as f64);
                    }
                }
            }
            let k = per_batch as f64;
            m.inside /= k;
            m.length /= k;
            m.roots.iter_mut().for_each(|r| *r /= k);
            m
        })
        .collect();
    let estimates = |m: &Moments| -> Option<(f64, f64, f64, Vec<f64>)> {
        if m.inside == 0.0 {
            return None;
        }
        let proj = box_volume * m.inside;
        let vol = box_volume * m.length;
        let heights = cfg
            .heights
            .iter()
            .zip(&m.roots)
            .map(|(&i, r)| (box_volume * r / proj.powi(i as i32)).powf(1.0 / i as f64))
            .collect();
        Some((vol, proj, vol / proj, heights))
    };
    let nb = cfg.batches as f64;
    let pooled = Moments {
        inside: batches.iter().map(|m| m.inside).sum::<f64>() / nb,
        length: batches.iter().map(|m| m.length).sum::<f64>() / nb,
        roots: (0..cfg.heights.len()).map(|j| batches.iter().map(|m| m.roots[j]).sum::<f64>() / nb).collect(),
    };
    let Some(all) = estimates(&pooled) else {
        return Err(CarnotError::UndefinedInvariant("projected volume is zero".into()));
    };
    let per: Vec<_> = batches.iter().filter_map(estimates).collect();
    let se = |f: &dyn Fn(&(f64, f64, f64, Vec<f64>)) -> f64| -> f64 {
        let xs: Vec<f64> = per.iter().map(f).collect();
        let (_, s) = mean_stderr(&xs);
        // Batches with an empty projection are dropped; rescale to the pooled count.
        s * (xs.len() as f64 / nb).sqrt()
    };
    Ok(Invariants {
        volume: Estimate { value: all.0, stderr: se(&|e| e.0) },
        projected_volume: Estimate { value: all.1, stderr: se(&|e| e.1) },
        width: Estimate { value: all.2, stderr: se(&|e| e.2) },
        heights: cfg
            .heights
            .iter()
            .enumerate()
            .map(|(j, &i)| (i, Estimate { value: all.3[j], stderr: se(&|e| e.3[j]) }))
            .collect(),
    })
}
