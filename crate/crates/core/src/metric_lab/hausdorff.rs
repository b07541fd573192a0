use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::numeric::fit_line;

#[derive(Debug, Clone, PartialEq)]
pub struct HausdorffConfig {
    /// `|fitted exponent|` below which the sums count as settled.
    pub settle_slope: f64,
    /// Relative slack for the monotonicity report.
    pub monotone_slack: f64,
    /// Points used to estimate the cloud resolution.
    pub resolution_probes: usize,
}

impl Default for HausdorffConfig {
    fn default() -> Self {
        Self { settle_slope: 0.3, monotone_slack: 0.02, resolution_probes: 256 }
    }
}

/// Behaviour of the covering sums as `δ → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Settles,
    Diverges,
    Vanishes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverLevel {
    pub delta: f64,
    pub sets: usize,
    /// `Σ (diam E_i)^k` for the greedy cover.
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HausdorffEstimate {
    /// Extrapolated `H^k`: the intercept of a line in `δ` when the sums
    /// settle, `∞` or `0` otherwise.
    pub value: f64,
    pub trend: Trend,
    /// Fitted exponent `b` in `sum ∝ δ^b`; about `k − dim`.
    pub exponent: f64,
    /// Sums nondecreasing as `δ` decreases, up to the slack.
    pub monotone: bool,
    /// Median nearest-neighbour distance of the cloud.
    pub resolution: f64,
    pub levels: Vec<CoverLevel>,
}

/// Estimate of `H^k` of the set sampled by `cloud`.
///
/// Centers come from one farthest-point traversal; the cover at scale `δ` is
/// the prefix whose covering radius is at most `δ/2`, each point joining its
/// nearest center. A cluster stands for the piece of the set it samples, so
/// its diameter is taken as the cluster diameter plus the cloud resolution.
pub fn hausdorff_measure_estimate<P: Sync>(
    cloud: &[P],
    metric: impl Fn(&P, &P) -> f64 + Sync,
    k: f64,
    delta_ladder: &[f64],
    cfg: &HausdorffConfig,
) -> Result<HausdorffEstimate> {
    if cloud.is_empty() {
        return invalid("point cloud is empty");
    }
    if !(k > 0.0) {
        return invalid("exponent k must be positive");
    }
    if delta_ladder.len() < 2 || delta_ladder.iter().any(|d| !(*d > 0.0)) || delta_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("δ ladder must be positive, strictly decreasing and have at least two entries");
    }
    let n = cloud.len();
    let resolution = cloud_resolution(cloud, &metric, cfg.resolution_probes);
    let smallest = delta_ladder[delta_ladder.len() - 1];
    let (order, radii) = farthest_point_order(cloud, &metric, 0.5 * smallest);

    let mut levels = Vec::with_capacity(delta_ladder.len());
    for &delta in delta_ladder {
        let m = radii.iter().position(|&r| r <= 0.5 * delta).map_or(order.len(), |p| p + 1);
        let centers = &order[..m];
        let owner: Vec<usize> = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut best = (f64::INFINITY, 0);
                for (c, &q) in centers.iter().enumerate() {
                    let d = metric(&cloud[p], &cloud[q]);
                    if d < best.0 {
                        best = (d, c);
                    }
                }
                best.1
            })
            .collect();
        let mut members = vec![Vec::new(); m];
        for (p, &c) in owner.iter().enumerate() {
            members[c].push(p);
        }
        let sum: f64 = members
            .par_iter()
            .map(|list| {
                let mut diam: f64 = 0.0;
                for (a, &p) in list.iter().enumerate() {
                    for &q in &list[a + 1..] {
                        diam = diam.max(metric(&cloud[p], &cloud[q]));
                    }
                }
                (diam + resolution).powf(k)
            })
            .sum();
        levels.push(CoverLevel { delta, sets: m, sum });
    }

    let xs: Vec<f64> = levels.iter().map(|l| l.delta.ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.sum.ln()).collect();
    let exponent = if levels.len() >= 2 { fit_line(&xs, &ys).slope } else { 0.0 };
    let trend = if exponent.abs() < cfg.settle_slope {
        Trend::Settles
    } else if exponent < 0.0 {
        Trend::Diverges
    } else {
        Trend::Vanishes
    };
    let value = match trend {
        Trend::Settles => {
            let d: Vec<f64> = levels.iter().map(|l| l.delta).collect();
            let s: Vec<f64> = levels.iter().map(|l| l.sum).collect();
            let intercept = fit_line(&d, &s).intercept;
            if intercept > 0.0 { intercept } else { s[s.len() - 1] }
        }
        Trend::Diverges => f64::INFINITY,
        Trend::Vanishes => 0.0,
    };
    let monotone = levels.windows(2).all(|w| w[1].sum >= w[0].sum * (1.0 - cfg.monotone_slack));
    Ok(HausdorffEstimate { value, trend, exponent, monotone, resolution, levels })
}

/// Farthest-point traversal from the first point, stopped once the covering
/// radius is at most `stop`. `radii[m-1]` is the covering radius of the first
/// `m` centers.
fn farthest_point_order<P: Sync>(cloud: &[P], metric: &(impl Fn(&P, &P) -> f64 + Sync), stop: f64) -> (Vec<usize>, Vec<f64>) {
    let mut nearest: Vec<f64> = cloud.par_iter().map(|p| metric(p, &cloud[0])).collect();
    let mut order = vec![0];
    let mut radii = Vec::new();
    loop {
        let (far, r) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        radii.push(r);
        if r <= stop || order.len() == cloud.len() {
            break;
        }
        order.push(far);
        let c = &cloud[far];
        nearest.par_iter_mut().zip(cloud.par_iter()).for_each(|(d, p)| *d = d.min(metric(p, c)));
    }
    (order, radii)
}

/// Median nearest-neighbour distance over evenly spread probe points.
fn cloud_resolution<P: Sync>(cloud: &[P], metric: &(impl Fn(&P, &P) -> f64 + Sync), probes: usize) -> f64 {
    let n = cloud.len();
    if n < 2 {
        return 0.0;
    }
    let step = (n / probes.max(1)).max(1);
    let mut nn: Vec<f64> = (0..n)
        .step_by(step)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| (0..n).filter(|&j| j != i).map(|j| metric(&cloud[i], &cloud[j])).fold(f64::INFINITY, f64::min))
        .collect();
    nn.sort_by(|a, b| a.total_cmp(b));
    nn[nn.len() / 2]
}
