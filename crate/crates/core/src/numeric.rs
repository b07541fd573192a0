//! Small numerical helpers shared by the modules: rank tests, polynomial
//! extrapolation, least-squares fits and seeded random streams.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Relative singular-value threshold used for every rank decision.
pub const RANK_TOL: f64 = 1e-10;

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub fn stream_rng(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}

/// Numerical rank with threshold `RANK_TOL * sigma_max`.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

/// Orthonormal basis (as columns) of the column span of `m`.
pub fn orthonormal_span(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > RANK_TOL * smax)
        .collect();
    DMatrix::from_fn(m.nrows(), cols.len(), |r, c| u[(r, cols[c])])
}

/// Columns of `a` followed by columns of `b`.
pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows().max(b.nrows());
    let mut out = DMatrix::zeros(n, a.ncols() + b.ncols());
    for c in 0..a.ncols() {
        out.column_mut(c).copy_from(&a.column(c));
    }
    for c in 0..b.ncols() {
        out.column_mut(a.ncols() + c).copy_from(&b.column(c));
    }
    out
}

/// Neville evaluation at 0 of the interpolating polynomial through
/// `(h[i], values[i])`. Exact for data polynomial in `h` of degree below `h.len()`.
pub fn extrapolate_to_zero(h: &[f64], values: &[DVector<f64>]) -> DVector<f64> {
    assert_eq!(h.len(), values.len());
    let mut p: Vec<DVector<f64>> = values.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            let num = &p[i + 1] * hi - &p[i] * hj;
            p[i] = num / (hi - hj);
        }
    }
    p.swap_remove(0)
}

/// Convergence diagnostics of a sequence sampled on a decreasing ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderDiagnostic {
    /// Norms of successive differences `f(h_i) - f(h_{i+1})`.
    pub differences: Vec<f64>,
    /// Empirical order from the last two differences; infinite when the
    /// sequence is constant to rounding.
    pub order: f64,
    /// Differences are non-increasing (up to rounding noise).
    pub converging: bool,
}

pub fn ladder_diagnostic(h: &[f64], values: &[DVector<f64>]) -> LadderDiagnostic {
    let scale = values.iter().map(|v| v.amax()).fold(1.0, f64::max);
    let floor = 1e-13 * scale;
    let differences: Vec<f64> = values.windows(2).map(|w| (&w[0] - &w[1]).norm()).collect();
    let converging = differences
        .windows(2)
        .all(|d| d[1] <= d[0] * (1.0 + 1e-9) + floor);
    let order = if differences.len() >= 2 {
        let k = differences.len();
        let (d0, d1) = (differences[k - 2], differences[k - 1]);
        if d0 <= floor && d1 <= floor {
            f64::INFINITY
        } else if d1 <= floor {
            f64::INFINITY
        } else {
            let ratio = (h[k - 2] - h[k - 1]) / (h[k - 1] - h[k]);
            (d0 / d1).ln() / ratio.ln()
        }
    } else {
        f64::NAN
    };
    LadderDiagnostic { differences, order, converging }
}

/// Ordinary least-squares line with standard error of the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_stderr = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LineFit { slope, intercept, slope_stderr, r_squared }
}

/// Two-sided 95% Student t quantile.
pub fn t_quantile_95(dof: usize) -> f64 {
    const TABLE: [f64; 10] = [12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228];
    match dof {
        0 => f64::INFINITY,
        1..=10 => TABLE[dof - 1],
        11..=20 => 2.16,
        21..=40 => 2.05,
        _ => 1.96,
    }
}

/// Five-point Gauss-Legendre rule on [0, 1].
pub const GAUSS5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_004, 0.118_463_442_528_094_54),
    (0.230_765_344_947_158_45, 0.239_314_335_249_683_23),
    (0.5, 0.284_444_444_444_444_44),
    (0.769_234_655_052_841_6, 0.239_314_335_249_683_23),
    (0.953_089_922_969_332, 0.118_463_442_528_094_54),
];

/// Mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
