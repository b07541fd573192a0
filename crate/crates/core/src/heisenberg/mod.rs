//! The Heisenberg group `H(n)`: closed-form arithmetic, horizontal lifts of
//! planar curves, lifts of symplectomorphisms, Hamiltonian flows with their
//! vertical parts, the Hofer lower bound and volume invariants.
//!
//! Conventions: `ω(x, y) = xᵀJy` with `J = [[0, I], [−I, 0]]`,
//! `λ_x(v) = ½ω(x, v)` so that `dλ = ω`, and flows solve `ẋ = J∇H`.

mod group;
mod hamiltonian;
mod hofer;
mod lift;

pub use group::{h_bracket, h_cc_distance, h_dilate, h_inv, h_mul, h_norm_radial, lift_planar_curve, omega, HPoint, PlanarLift};
pub use hamiltonian::{
    ball_grid, flow_endpoint, flow_map, generating_function_action, hamiltonian_flow, hofer_length, rigidity_check,
    support_violation, vertical_flow_check, vertical_flow_check_with, Hamiltonian, HoferLength, LinearHamiltonian,
    PolynomialBump, QuadraticHamiltonian, RigidityReport, Scaled, SmoothBump, TimeModulated, Trajectory, TruncatedQuadratic,
    VerticalFlowCheck, ZeroHamiltonian,
};
pub use hofer::{
    cached_ball_ratio, cc_ball_ratio, euclidean_ball_volume, hofer_lower_bound_check, invariants_width_heights,
    BallRatio, Cylinder, Estimate, HRegion, HoferCheck, HoferConfig, Invariants, InvariantsConfig, LiftedImage,
    DEFAULT_RATIO_SAMPLES,
};
pub use lift::{
    lift_symplectomorphism, pansu_derivative_closed_form, planar_jacobian, symplectic_defect_of, ClosedFormDerivative,
    HeisenbergMap, LiftConfig, LiftedMap, PathStrategy, PlanarMap,
};
