//! Packing-count estimate of the Hausdorff dimension.
//!
//! At each scale `s` a greedy packing with separation `s` in the quasi-metric
//! `|p^{-1} q|_∞` is built from a jittered candidate grid whose spacing in
//! layer `i` is proportional to `s^i`, so the construction commutes with
//! dilations. Candidates extend past the region by a buffer and only centers
//! inside the region are counted, which removes the boundary bias.

use std::collections::{HashMap, HashSet};

use rand::Rng as _;

use super::bch::GroupLaw;
use crate::algebra_core::CarnotStructure;
use crate::error::{invalid, CarnotError, Result};
use crate::numeric::{fit_line, stream_rng, t_quantile_95};

/// A bounded subset of the group given by a membership test.
pub trait Region: Sync {
    fn contains(&self, x: &[f64]) -> bool;
    /// Coordinate-wise bounding box.
    fn bounds(&self) -> Vec<(f64, f64)>;
}

/// `Box(r) = {‖x_i‖ ≤ r^i}` of a Carnot structure.
pub struct HomogeneousBox {
    pub radius: f64,
    layer_ranges: Vec<std::ops::Range<usize>>,
    dim: usize,
}

impl HomogeneousBox {
    pub fn new(carnot: &CarnotStructure, radius: f64) -> Self {
        Self {
            radius,
            layer_ranges: (1..=carnot.step()).map(|i| carnot.layer_range(i)).collect(),
            dim: carnot.dim(),
        }
    }
}

impl Region for HomogeneousBox {
    fn contains(&self, x: &[f64]) -> bool {
        self.layer_ranges.iter().enumerate().all(|(i, r)| {
            let n2: f64 = r.clone().map(|k| x[k] * x[k]).sum();
            n2.sqrt() <= self.radius.powi(i as i32 + 1)
        })
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(0.0, 0.0); self.dim];
        for (i, r) in self.layer_ranges.iter().enumerate() {
            let h = self.radius.powi(i as i32 + 1);
            for k in r.clone() {
                b[k] = (-h, h);
            }
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionConfig {
    pub min_scales: usize,
    /// Minimum `log10(s_max / s_min)`.
    pub min_span_decades: f64,
    /// Candidate spacing in layer `i` is `eta * s^i`.
    pub eta: f64,
    /// Candidate jitter as a fraction of the spacing.
    pub jitter: f64,
    /// Bucket search half-width for layers above the first.
    pub search: i64,
    pub seed: u64,
}

impl Default for DimensionConfig {
    fn default() -> Self {
        Self { min_scales: 4, min_span_decades: 1.0, eta: 0.7, jitter: 0.3, search: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub dimension: f64,
    pub ci95: (f64, f64),
    pub slope_stderr: f64,
    pub r_squared: f64,
    /// `(s, N_s)` pairs.
    pub counts: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingCount {
    /// Centers inside the region.
    pub inside: usize,
    /// All accepted centers, buffer included.
    pub total: usize,
    pub candidates: usize,
}

struct Packer<'a> {
    law: &'a GroupLaw,
    carnot: &'a CarnotStructure,
    s: f64,
    search: i64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    /// Occupied key prefixes, one set per layer below the top.
    prefixes: Vec<HashSet<Vec<i64>>>,
    centers: Vec<Vec<f64>>,
}

impl<'a> Packer<'a> {
    fn quasi(&self, a: &[f64], q: &[f64], scratch: &mut [f64]) -> f64 {
        self.left_divide(a, q, scratch);
        let mut worst: f64 = 0.0;
        for i in 1..=self.carnot.step() {
            let n: f64 = self.carnot.layer_range(i).map(|k| scratch[k] * scratch[k]).sum::<f64>().sqrt();
            worst = worst.max(n.powf(1.0 / i as f64));
        }
        worst
    }

    /// `out = a^{-1} q`.
    fn left_divide(&self, a: &[f64], q: &[f64], out: &mut [f64]) {
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        self.law.mul_into(&neg, q, out);
    }

    fn layer_cell(&self, w: &[f64], layer: usize) -> Vec<i64> {
        let size = self.s.powi(layer as i32);
        self.carnot.layer_range(layer).map(|k| (w[k] / size).floor() as i64).collect()
    }

    /// Anchor-relative key: cells of layer 1, then of each higher layer after
    /// left-translating by the anchor built from the lower cells.
    fn key(&self, x: &[f64]) -> Vec<i64> {
        let dim = x.len();
        let mut anchor = vec![0.0; dim];
        let mut key = Vec::with_capacity(dim);
        let mut rel = x.to_vec();
        for layer in 1..=self.carnot.step() {
            let cell = self.layer_cell(&rel, layer);
            anchor = self.extend_anchor(&anchor, layer, &cell);
            self.left_divide(&anchor, x, &mut rel);
            key.extend(cell);
        }
        key
    }

    fn extend_anchor(&self, anchor: &[f64], layer: usize, cell: &[i64]) -> Vec<f64> {
        let size = self.s.powi(layer as i32);
        let mut step = vec![0.0; anchor.len()];
        for (c, k) in cell.iter().zip(self.carnot.layer_range(layer)) {
            step[k] = *c as f64 * size;
        }
        let mut out = vec![0.0; anchor.len()];
        self.law.mul_into(anchor, &step, &mut out);
        out
    }

    fn conflicts(&self, q: &[f64]) -> bool {
        let mut scratch = vec![0.0; q.len()];
        self.search_layer(q, 1, &vec![0.0; q.len()], &mut Vec::new(), &mut scratch)
    }

    fn search_layer(&self, q: &[f64], layer: usize, anchor: &[f64], prefix: &mut Vec<i64>, scratch: &mut [f64]) -> bool {
        self.left_divide(anchor, q, scratch);
        let center = self.layer_cell(scratch, layer);
        let reach = if layer == 1 { 1 } else { self.search };
        let top = layer == self.carnot.step();
        let width = (2 * reach + 1) as usize;
        let base = prefix.len();
        let mut found = false;
        for combo in 0..width.pow(center.len() as u32) {
            prefix.truncate(base);
            let mut c = combo;
            for &v in &center {
                prefix.push(v + (c % width) as i64 - reach);
                c /= width;
            }
            if top {
                if let Some(list) = self.cells.get(prefix.as_slice()) {
                    if list.iter().any(|&i| self.quasi(&self.centers[i], q, scratch) < self.s) {
                        found = true;
                        break;
                    }
                }
                continue;
            }
            if !self.prefixes[layer - 1].contains(prefix.as_slice()) {
                continue;
            }
            let cell = prefix[base..].to_vec();
            let next_anchor = self.extend_anchor(anchor, layer, &cell);
            if self.search_layer(q, layer + 1, &next_anchor, prefix, scratch) {
                found = true;
                break;
            }
        }
        prefix.truncate(base);
        found
    }

    fn insert(&mut self, q: Vec<f64>) {
        let key = self.key(&q);
        let mut len = 0;
        for (i, set) in self.prefixes.iter_mut().enumerate() {
            len += self.carnot.layer_range(i + 1).len();
            set.insert(key[..len].to_vec());
        }
        self.centers.push(q);
        self.cells.entry(key).or_default().push(self.centers.len() - 1);
    }
}

fn candidate_axes(carnot: &CarnotStructure, region: &dyn Region, s: f64, cfg: &DimensionConfig) -> Vec<Vec<f64>> {
    let bounds = region.bounds();
    let reach = bounds.iter().map(|(lo, hi)| lo.abs().max(hi.abs())).fold(0.0, f64::max).max(s);
    carnot
        .layer_of()
        .iter()
        .zip(bounds)
        .map(|(&l, (lo, hi))| {
            let spacing = cfg.eta * s.powi(l as i32);
            let buffer: f64 = (1..=l).map(|j| s.powi(j as i32) * reach.powi((l - j) as i32)).sum::<f64>();
            let (a, b) = (lo - buffer, hi + buffer);
            let n = ((b - a) / spacing).ceil() as usize + 1;
            (0..n).map(|i| a + i as f64 * spacing).collect()
        })
        .collect()
}

/// Greedy packing count at separation `s`, using the bucketed neighbor search.
pub fn packing_count(carnot: &CarnotStructure, region: &dyn Region, s: f64, cfg: &DimensionConfig) -> Result<PackingCount> {
    run_packing(carnot, region, s, cfg, false)
}

/// Same packing with an all-pairs neighbor scan; reference for the bucketed search.
pub fn packing_count_bruteforce(carnot: &CarnotStructure, region: &dyn Region, s: f64, cfg: &DimensionConfig) -> Result<PackingCount> {
    run_packing(carnot, region, s, cfg, true)
}

fn run_packing(carnot: &CarnotStructure, region: &dyn Region, s: f64, cfg: &DimensionConfig, brute: bool) -> Result<PackingCount> {
    if !(s > 0.0) {
        return invalid("packing scale must be positive");
    }
    let law = GroupLaw::carnot(carnot)?;
    let axes = candidate_axes(carnot, region, s, cfg);
    let dim = carnot.dim();
    let total: usize = axes.iter().map(|a| a.len()).product();
    if total > 50_000_000 {
        return invalid(format!("scale {s} needs {total} candidates; use coarser scales"));
    }
    let spacing: Vec<f64> = carnot.layer_of().iter().map(|&l| cfg.eta * s.powi(l as i32)).collect();
    let mut rng = stream_rng(cfg.seed, (s.to_bits() >> 12) ^ 0x5eed);
    let mut packer = Packer {
        law: &law,
        carnot,
        s,
        search: cfg.search,
        cells: HashMap::new(),
        prefixes: vec![HashSet::new(); carnot.step() - 1],
        centers: Vec::new(),
    };
    let mut scratch = vec![0.0; dim];
    let mut idx = vec![0usize; dim];
    let mut inside = 0;
    let mut q = vec![0.0; dim];
    'outer: loop {
        for k in 0..dim {
            q[k] = axes[k][idx[k]] + cfg.jitter * spacing[k] * (rng.random::<f64>() - 0.5);
        }
        let blocked = if brute {
            packer.centers.iter().any(|a| packer.quasi(a, &q, &mut scratch) < s)
        } else {
            packer.conflicts(&q)
        };
        if !blocked {
            if region.contains(&q) {
                inside += 1;
            }
            packer.insert(q.clone());
        }
        // Lexicographic order: last coordinate fastest.
        let mut k = dim;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(PackingCount { inside, total: packer.centers.len(), candidates: total })
}

/// Slope of `log N_s` against `log(1/s)` with a 95% confidence interval.
pub fn hausdorff_dimension_estimate(
    carnot: &CarnotStructure,
    region: &dyn Region,
    scales: &[f64],
    cfg: &DimensionConfig,
) -> Result<DimensionEstimate> {
    if scales.len() < cfg.min_scales {
        return invalid(format!("need at least {} scales, got {}", cfg.min_scales, scales.len()));
    }
    let smax = scales.iter().cloned().fold(f64::MIN, f64::max);
    let smin = scales.iter().cloned().fold(f64::MAX, f64::min);
    if !(smin > 0.0) || (smax / smin).log10() < cfg.min_span_decades - 1e-12 {
        return invalid(format!("scales must be positive and span at least {} decades", cfg.min_span_decades));
    }
    let counts: Vec<(f64, usize)> = scales
        .iter()
        .map(|&s| packing_count(carnot, region, s, cfg).map(|c| (s, c.inside)))
        .collect::<Result<_>>()?;
    let usable: Vec<&(f64, usize)> = counts.iter().filter(|(_, n)| *n > 0).collect();
    if usable.len() < 3 {
        return Err(CarnotError::DegenerateFit { usable: usable.len() });
    }
    let x: Vec<f64> = usable.iter().map(|(s, _)| (1.0 / s).ln()).collect();
    let y: Vec<f64> = usable.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let fit = fit_line(&x, &y);
    let half = t_quantile_95(usable.len() - 2) * fit.slope_stderr;
    Ok(DimensionEstimate {
        dimension: fit.slope,
        ci95: (fit.slope - half, fit.slope + half),
        slope_stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
        counts,
    })
}

/// Geometric ladder of `n` scales from `s_max` down to `s_min`.
pub fn geometric_scales(s_max: f64, s_min: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![s_max];
    }
    let r = (s_min / s_max).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| s_max * r.powi(i as i32)).collect()
}
