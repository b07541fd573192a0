//! Deterministic inputs shared by the criterion benches.

use nalgebra::DVector;

/// `n` points in `[-1, 1]^dim` from a fixed low-discrepancy sequence.
pub fn sample_points(n: usize, dim: usize) -> Vec<DVector<f64>> {
    let golden = 0.618_033_988_749_895;
    (0..n)
        .map(|i| DVector::from_fn(dim, |k, _| 2.0 * ((i as f64 + 1.0) * golden * (k as f64 + 1.0).sqrt()).fract() - 1.0))
        .collect()
}

/// The unit circle sampled at `n` uniform times on `[0, 2π]`.
pub fn circle(n: usize) -> (Vec<f64>, Vec<DVector<f64>>) {
    let times: Vec<f64> = (0..n).map(|k| std::f64::consts::TAU * k as f64 / (n - 1) as f64).collect();
    let points = times.iter().map(|t| DVector::from_vec(vec![t.cos(), t.sin()])).collect();
    (times, points)
}
