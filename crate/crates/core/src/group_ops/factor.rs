use nalgebra::DVector;

use super::bch::GroupLaw;
use super::norms::{homogeneous_norm, NormKind};
use crate::algebra_core::CarnotStructure;
use crate::error::{invalid, CarnotError, Result};

/// `exp(t X_g)` for a generator index `g` of the horizontal layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Letter {
    pub t: f64,
    pub generator: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub letters: Vec<Letter>,
    /// `‖Π exp(t_i X_{g(i)}) − x‖`.
    pub residual: f64,
    /// `max |t_i| / |x|_∞`; dilation invariant.
    pub homogeneous_constant: f64,
    /// `max |t_i| / ‖x‖^{1/m}`.
    pub euclidean_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorConfig {
    /// Points with `|x|_1` above this are dilated into the chart first.
    pub chart_radius: f64,
    pub max_sweeps: usize,
    pub tol: f64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self { chart_radius: 0.5, max_sweeps: 50, tol: 1e-12 }
    }
}

fn inverse_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| Letter { t: -l.t, generator: l.generator }).collect()
}

fn commutator(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
    let mut out = a.to_vec();
    out.extend_from_slice(b);
    out.extend(inverse_word(a));
    out.extend(inverse_word(b));
    out
}

/// Group-commutator word whose logarithm is `s^L [X_{w_1}, [X_{w_2}, …]]` plus
/// terms of higher layer.
fn commutator_word(word: &[usize], s: f64) -> Vec<Letter> {
    let head = vec![Letter { t: s, generator: word[0] }];
    if word.len() == 1 {
        return head;
    }
    commutator(&head, &commutator_word(&word[1..], s))
}

/// Word realizing `exp(t Y)` up to higher layers for the basis vector with the
/// given bracket word. Negative `t` on even lengths swaps the outer commutator.
fn word_for(word: &[usize], t: f64) -> Vec<Letter> {
    if t == 0.0 {
        return Vec::new();
    }
    let len = word.len();
    if len == 1 {
        return vec![Letter { t, generator: word[0] }];
    }
    if len % 2 == 1 {
        let s = t.signum() * t.abs().powf(1.0 / len as f64);
        return commutator_word(word, s);
    }
    let s = t.abs().powf(1.0 / len as f64);
    let head = vec![Letter { t: s, generator: word[0] }];
    let tail = commutator_word(&word[1..], s);
    if t > 0.0 {
        commutator(&head, &tail)
    } else {
        commutator(&tail, &head)
    }
}

pub fn evaluate_word(law: &GroupLaw, letters: &[Letter]) -> DVector<f64> {
    let dim = law.dim();
    let elems: Vec<DVector<f64>> = letters
        .iter()
        .map(|l| {
            let mut v = DVector::zeros(dim);
            v[l.generator] = l.t;
            v
        })
        .collect();
    law.product(elems.iter())
}

fn assemble(carnot: &CarnotStructure, t: &[f64]) -> Vec<Letter> {
    let mut letters = Vec::new();
    for (i, &ti) in t.iter().enumerate() {
        letters.extend(word_for(&carnot.words()[i], ti));
    }
    letters
}

/// Writes `x` (adapted coordinates) as a product of horizontal exponentials.
///
/// One commutator word per adapted basis vector; the parameters are solved
/// layer by layer, which is exact for the graded law because the layer-`k`
/// part of the product depends linearly on the layer-`k` parameters once the
/// lower ones are fixed. Points outside the chart are dilated in and the
/// letters scaled back.
pub fn word_factorization(carnot: &CarnotStructure, x: &DVector<f64>) -> Result<Factorization> {
    word_factorization_with(carnot, x, FactorConfig::default())
}

pub fn word_factorization_with(carnot: &CarnotStructure, x: &DVector<f64>, cfg: FactorConfig) -> Result<Factorization> {
    if x.len() != carnot.dim() {
        return invalid(format!("expected a vector of length {}", carnot.dim()));
    }
    let law = GroupLaw::carnot(carnot)?;
    let norm1 = homogeneous_norm(carnot, x, NormKind::One);
    if norm1 == 0.0 {
        return Ok(Factorization { letters: Vec::new(), residual: 0.0, homogeneous_constant: 0.0, euclidean_constant: 0.0 });
    }
    let scale = if norm1 > cfg.chart_radius { cfg.chart_radius / norm1 } else { 1.0 };
    let target = carnot.dilate(scale, x);

    let mut t = vec![0.0; carnot.dim()];
    let mut residual = f64::INFINITY;
    let target_scale = target.amax().max(1e-300);
    for _ in 0..cfg.max_sweeps {
        for layer in 1..=carnot.step() {
            let current = evaluate_word(&law, &assemble(carnot, &t));
            for k in carnot.layer_range(layer) {
                t[k] += target[k] - current[k];
            }
        }
        residual = (evaluate_word(&law, &assemble(carnot, &t)) - &target).amax();
        if residual <= cfg.tol * target_scale.max(1.0) {
            break;
        }
        if !residual.is_finite() {
            break;
        }
    }
    if !(residual <= cfg.tol * target_scale.max(1.0) * 1e4) {
        return Err(CarnotError::OutOfChartRadius { residual });
    }
    let letters: Vec<Letter> = assemble(carnot, &t)
        .into_iter()
        .map(|l| Letter { t: l.t / scale, generator: l.generator })
        .collect();
    let full_residual = (evaluate_word(&law, &letters) - x).norm();
    let tmax = letters.iter().map(|l| l.t.abs()).fold(0.0, f64::max);
    let m = carnot.step() as f64;
    Ok(Factorization {
        homogeneous_constant: tmax / homogeneous_norm(carnot, x, NormKind::Inf),
        euclidean_constant: tmax / x.norm().powf(1.0 / m),
        letters,
        residual: full_residual,
    })
}
