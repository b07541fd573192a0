//! Lie algebra ingestion, filtration by bracket length, adapted bases and
//! nilpotentisation, plus the algebraic identities relating `[.,.]` and `[.,.]_N`.

pub mod builtin;
mod carnot;
mod filtration;
mod identities;
mod io;
mod structure;

pub use carnot::{
    build_graded_basis, constants, nilpotency_step, nilpotentize, CarnotStructure, GradedBasis,
};
pub use filtration::{build_filtration, Filtration};
pub use identities::{
    default_ladder, left_translation_derivative, left_translation_derivative_for,
    left_translation_jacobian, left_translation_series, magic_identity_residual,
    nilpotent_bracket_limit, LimitEstimate, MagicResidual,
};
pub(crate) use identities::{check_ladder, extrapolate};
pub use io::{load_algebra, parse_algebra, parse_coefficient_str, write_algebra};
pub use structure::{
    jacobi_residual, validate_algebra, LieAlgebraSpec, StructureConstant, StructureTable,
    ValidationReport,
};
pub(crate) use filtration::unit;
