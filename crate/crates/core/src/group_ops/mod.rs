//! Group arithmetic in exponential coordinates, homogeneous norms and boxes,
//! word factorization, Carnot-Carathéodory distance bounds and packing-based
//! dimension estimates.

mod bch;
mod ccdist;
mod factor;
mod hausdim;
mod norms;

pub use bch::{bch_multiply, dynkin_terms, group_inverse, DynkinTerm, GroupLaw, MAX_ORDER};
pub use ccdist::{
    cc_distance_upper, cc_distance_upper_with, quasi_distance, CcConfig, CcProblem, CcResult,
    HorizontalPath,
};
pub use factor::{
    evaluate_word, word_factorization, word_factorization_with, FactorConfig, Factorization, Letter,
};
pub use hausdim::{
    geometric_scales, hausdorff_dimension_estimate, packing_count, packing_count_bruteforce,
    DimensionConfig, DimensionEstimate, HomogeneousBox, PackingCount, Region,
};
pub use norms::{box_constants_estimate, box_membership, homogeneous_norm, BoxConstants, NormKind};
