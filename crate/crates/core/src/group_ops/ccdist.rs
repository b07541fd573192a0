//! Upper bounds on the Carnot-Carathéodory distance from explicit horizontal
//! paths with piecewise-constant controls.
//!
//! The endpoint map `g(u) = Π_k exp(τ u_k)` is driven onto the target by a
//! minimum-norm Gauss-Newton (SQP) iteration on `½‖u‖²` subject to
//! `g(u) = z`, from several starts. A length is only reported once the
//! endpoint residual is below tolerance.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::bch::GroupLaw;
use super::norms::{homogeneous_norm, NormKind};
use crate::algebra_core::CarnotStructure;
use crate::error::{invalid, CarnotError, Result};
use crate::numeric::stream_rng;

/// Piecewise-constant horizontal controls with their durations.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalPath {
    /// Controls in `V_1` coordinates (length `dim V_1` each).
    pub controls: Vec<DVector<f64>>,
    pub durations: Vec<f64>,
}

impl HorizontalPath {
    pub fn length(&self) -> f64 {
        self.controls.iter().zip(&self.durations).map(|(u, t)| u.norm() * t).sum()
    }

    /// Endpoint when started at the identity.
    pub fn endpoint(&self, law: &GroupLaw) -> DVector<f64> {
        let dim = law.dim();
        let steps: Vec<DVector<f64>> = self
            .controls
            .iter()
            .zip(&self.durations)
            .map(|(u, t)| {
                let mut v = DVector::zeros(dim);
                for (i, c) in u.iter().enumerate() {
                    v[i] = c * t;
                }
                v
            })
            .collect();
        law.product(steps.iter())
    }
}

const SCREEN_ITERS: usize = 20;
const REFINED: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CcConfig {
    pub segments: usize,
    pub starts: usize,
    pub max_iters: usize,
    /// Endpoint tolerance certifying the bound.
    pub endpoint_tol: f64,
    pub seed: u64,
}

impl Default for CcConfig {
    fn default() -> Self {
        Self { segments: 8, starts: 8, max_iters: 200, endpoint_tol: 1e-6, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcResult {
    pub length: f64,
    pub residual: f64,
    pub path: HorizontalPath,
}

/// Problem data: the group law and the number of horizontal coordinates
/// (the first `horizontal` coordinates span `V_1`).
pub struct CcProblem<'a> {
    pub law: &'a GroupLaw,
    pub horizontal: usize,
    /// Layer of each coordinate; enables normalizing the target by dilation
    /// (valid only for a graded law).
    pub layers: Option<&'a [usize]>,
}

struct Solver<'a> {
    law: &'a GroupLaw,
    p: usize,
    k: usize,
    tau: f64,
    target: DVector<f64>,
}

impl<'a> Solver<'a> {
    fn endpoint(&self, u: &[f64]) -> DVector<f64> {
        let dim = self.law.dim();
        let mut acc = vec![0.0; dim];
        let mut tmp = vec![0.0; dim];
        let mut step = vec![0.0; dim];
        for seg in 0..self.k {
            for i in 0..self.p {
                step[i] = u[seg * self.p + i] * self.tau;
            }
            self.law.mul_into(&acc, &step, &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        DVector::from_vec(acc)
    }

    fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        let n = u.len();
        let dim = self.law.dim();
        let mut jac = DMatrix::zeros(dim, n);
        let mut w = u.to_vec();
        for j in 0..n {
            let h = 1e-6 * (1.0 + u[j].abs());
            w[j] = u[j] + h;
            let fp = self.endpoint(&w);
            w[j] = u[j] - h;
            let fm = self.endpoint(&w);
            w[j] = u[j];
            jac.column_mut(j).copy_from(&((fp - fm) / (2.0 * h)));
        }
        jac
    }

    /// Minimum-norm solution `d` of `J d = r`.
    fn min_norm(jac: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
        let jjt = jac * jac.transpose();
        let reg = 1e-14 * jjt.trace().max(1e-300);
        let m = &jjt + DMatrix::identity(jjt.nrows(), jjt.nrows()) * reg;
        let lam = m.cholesky()?.solve(r);
        Some(jac.transpose() * lam)
    }

    fn violation(&self, u: &[f64]) -> f64 {
        (self.endpoint(u) - &self.target).norm()
    }

    fn solve(&self, start: Vec<f64>, max_iters: usize) -> (Vec<f64>, f64) {
        let mut u = DVector::from_vec(start);
        let mut mu: f64 = 10.0;
        for _ in 0..max_iters {
            let c = self.endpoint(u.as_slice()) - &self.target;
            let jac = self.jacobian(u.as_slice());
            // Linearized constraint J (u+ − u) = −c with minimum ‖u+‖.
            let rhs = &jac * &u - &c;
            let Some(u_new) = Self::min_norm(&jac, &rhs) else { break };
            let dir = &u_new - &u;
            let viol = c.norm();
            let jjt = &jac * jac.transpose();
            if let Some(ch) = (jjt.clone() + DMatrix::identity(jjt.nrows(), jjt.nrows()) * 1e-14 * jjt.trace().max(1e-300)).cholesky() {
                let lam = ch.solve(&(&jac * &u));
                mu = mu.max(2.0 * lam.amax() + 1.0);
            }
            let merit = |v: &DVector<f64>| 0.5 * v.norm_squared() + mu * self.violation(v.as_slice());
            let m0 = 0.5 * u.norm_squared() + mu * viol;
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = &u + &dir * alpha;
                if merit(&trial) < m0 {
                    u = trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted || dir.norm() * alpha <= 1e-10 * (1.0 + u.norm()) {
                break;
            }
        }
        // Pure feasibility polish.
        for _ in 0..20 {
            let c = self.endpoint(u.as_slice()) - &self.target;
            if c.norm() <= 1e-13 * (1.0 + self.target.norm()) {
                break;
            }
            let jac = self.jacobian(u.as_slice());
            let Some(d) = Self::min_norm(&jac, &(-&c)) else { break };
            let trial = &u + &d;
            if self.violation(trial.as_slice()) >= c.norm() {
                break;
            }
            u = trial;
        }
        let v = self.violation(u.as_slice());
        (u.as_slice().to_vec(), v)
    }
}

/// Upper bound on `d(x, y)` for the nilpotent group of `carnot`.
pub fn cc_distance_upper(carnot: &CarnotStructure, x: &DVector<f64>, y: &DVector<f64>, cfg: &CcConfig) -> Result<CcResult> {
    let law = GroupLaw::carnot(carnot)?;
    let problem = CcProblem { law: &law, horizontal: carnot.horizontal_dim(), layers: Some(carnot.layer_of()) };
    cc_distance_upper_with(&problem, x, y, cfg, &[])
}

/// General form: any group law with horizontal coordinates first, plus
/// optional warm starts (flattened controls, `segments * horizontal` long).
pub fn cc_distance_upper_with(
    problem: &CcProblem,
    x: &DVector<f64>,
    y: &DVector<f64>,
    cfg: &CcConfig,
    warm: &[Vec<f64>],
) -> Result<CcResult> {
    let dim = problem.law.dim();
    if x.len() != dim || y.len() != dim {
        return invalid(format!("expected vectors of length {dim}"));
    }
    if cfg.segments == 0 {
        return invalid("at least one segment is required");
    }
    let p = problem.horizontal;
    let k = cfg.segments;
    let z = problem.law.mul(&problem.law.inv(x), y);
    let tau = 1.0 / k as f64;
    let empty = |p: usize| HorizontalPath { controls: vec![DVector::zeros(p); k], durations: vec![tau; k] };
    if z.amax() == 0.0 {
        return Ok(CcResult { length: 0.0, residual: 0.0, path: empty(p) });
    }
    // Normalize the target to unit homogeneous size when the law is graded.
    let (scale, target) = match problem.layers {
        Some(layers) => {
            let rho = layers
                .iter()
                .zip(z.iter())
                .map(|(&l, c)| c.abs().powf(1.0 / l as f64))
                .fold(0.0, f64::max);
            let t = DVector::from_fn(dim, |i, _| z[i] / rho.powi(layers[i] as i32));
            (rho, t)
        }
        None => (1.0, z.clone()),
    };
    let solver = Solver { law: problem.law, p, k, tau, target: target.clone() };

    let mut starts: Vec<Vec<f64>> = warm.iter().map(|w| w.iter().map(|c| c / scale).collect()).collect();
    let size = target.iter().map(|c| c.abs()).fold(0.0, f64::max).max(1e-3).sqrt().max(0.3);
    for s in 0..cfg.starts {
        let mut rng = stream_rng(cfg.seed, s as u64);
        let mut u = vec![0.0; k * p];
        if s == 0 {
            for seg in 0..k {
                for i in 0..p {
                    u[seg * p + i] = target[i] + 0.05 * size * sample_normal(&mut rng);
                }
            }
        } else {
            for c in u.iter_mut() {
                *c = 2.0 * size * sample_normal(&mut rng);
            }
        }
        starts.push(u);
    }
    if starts.iter().any(|s| s.len() != k * p) {
        return invalid("warm start has the wrong length");
    }
    // Short screening run from every start, then full refinement of the most
    // promising few.
    let screen = cfg.max_iters.min(SCREEN_ITERS);
    let mut results: Vec<(Vec<f64>, f64)> = starts.into_par_iter().map(|s| solver.solve(s, screen)).collect();
    if cfg.max_iters > screen {
        let rank_key = |(u, viol): &(Vec<f64>, f64)| {
            let len: f64 = u.chunks(p).map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).sum();
            (*viol > 1e-3, len)
        };
        let mut order: Vec<usize> = (0..results.len()).collect();
        order.sort_by(|&a, &b| rank_key(&results[a]).partial_cmp(&rank_key(&results[b])).unwrap_or(std::cmp::Ordering::Equal));
        let keep: Vec<usize> = order.into_iter().take(REFINED).collect();
        let refined: Vec<(usize, (Vec<f64>, f64))> = keep
            .into_par_iter()
            .map(|i| (i, solver.solve(results[i].0.clone(), cfg.max_iters - screen)))
            .collect();
        for (i, r) in refined {
            results[i] = r;
        }
    }

    let tol_norm = cfg.endpoint_tol / scale.max(1.0).powi(problem.layers.map_or(1, |l| *l.iter().max().unwrap_or(&1) as i32));
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut best_residual = f64::INFINITY;
    for (u, viol) in results {
        best_residual = best_residual.min(viol);
        if viol > tol_norm {
            continue;
        }
        let len: f64 = u.chunks(p).map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt() * tau).sum();
        if best.as_ref().map_or(true, |b| len < b.0) {
            best = Some((len, u, viol));
        }
    }
    let Some((len, u, _)) = best else {
        return Err(CarnotError::NoFeasiblePath { residual: best_residual * scale });
    };
    let controls: Vec<DVector<f64>> = u.chunks(p).map(|c| DVector::from_iterator(p, c.iter().map(|v| v * scale))).collect();
    let path = HorizontalPath { controls, durations: vec![tau; k] };
    let residual = (path.endpoint(problem.law) - &z).norm();
    Ok(CcResult { length: len * scale, residual, path })
}

/// `|z|_∞` of `x^{-1} y`, the homogeneous quasi-distance.
pub fn quasi_distance(carnot: &CarnotStructure, law: &GroupLaw, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    homogeneous_norm(carnot, &law.mul(&law.inv(x), y), NormKind::Inf)
}

fn sample_normal(rng: &mut crate::numeric::Rng) -> f64 {
    StandardNormal.sample(rng)
}
