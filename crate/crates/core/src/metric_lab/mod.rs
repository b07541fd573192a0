//! Metric-space numerics on finite samples: variation and dilatation length
//! of curves, covering estimates of Hausdorff measures, distortion and
//! Gromov-Hausdorff bounds, the midpoint criterion for length spaces and
//! rescaling experiments for tangent cones.

mod cone;
mod curve;
mod gh;
mod hausdorff;
mod space;

pub use cone::{carnot_cone_experiment, cc_distance_space, rescaled_law, rescaled_table};
pub use curve::{length_via_dilatation, variation, DilatationConfig, DilatationLength, MetricCurve};
pub use gh::{
    decreasing_with_slack, distortion, gh_upper_bound, net_radius, path_metric_midpoint_check,
    tangent_cone_experiment, ConeStep, GhBound, IsometryWitness, MidpointReport,
};
pub use hausdorff::{hausdorff_measure_estimate, CoverLevel, HausdorffConfig, HausdorffEstimate, Trend};
pub use space::{triangle_violation, FiniteMetricSpace, METRIC_TOL};
