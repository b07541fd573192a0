//! Pansu calculus: finite differences and derivative estimates, classification
//! of linear maps, development and lift of curves, i-area functions and the
//! rescaled group law limit.

mod curves;
mod derivative;

pub use curves::{
    develop_curve, horizontality_defect, i_area, lift_curve, multiple_bracket, Interpolation,
    SampledCurve,
};
pub use derivative::{
    beta_limit, classify_linear, default_probes, dilation, finite_difference, left_translation,
    linear_map, pansu_derivative_estimate, probe_set, right_translation, Convergence, GroupMap,
    LinearCandidate, LinearClass, PansuEstimate,
};
