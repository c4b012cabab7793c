//! Solvers and experiment machinery for non-atomic congestion games with
//! incentive mechanisms (tolls and subsidies) and users that differ in how
//! strongly they respond to incentives.
//!
//! The crate is organised around four layers:
//!
//! * [`netmodel`]: latency polynomials, routing problems, flows, sensitivity
//!   distributions and the JSON instance format.
//! * [`incentives`]: mechanisms mapping a latency function to an incentive
//!   function, including the nominal-equivalence transform and the
//!   sensitivity map that carries equilibria across it.
//! * [`equilibrium`]: optimal flows, homogeneous Nash flows (pairwise
//!   Frank–Wolfe on the Beckmann potential) and multi-class Nash flows on
//!   parallel networks, each with a variational-inequality certificate.
//! * [`poa`]: price-of-anarchy reports, closed-form bounds for affine games,
//!   instance generators and grid searches over two-link affine networks.
//!
//! [`sweeps`] builds the experiment tables on top of those layers.

pub mod equilibrium;
pub mod error;
pub mod incentives;
pub mod netmodel;
mod numeric;
pub mod poa;
pub mod sweeps;

pub use equilibrium::{
    certify, nash_candidates, nash_flow, nash_flow_heterogeneous, nash_flow_homogeneous,
    optimal_flow, worst_case_nash, Certificate, EquilibriumResult, SolverParams,
};
pub use error::{ConvergenceFailure, Error, Result};
pub use incentives::{
    affine_transform, classify_bound, marginal_cost, nominally_equivalent_subsidy,
    opt_bounded_subsidy_affine, opt_bounded_toll_affine, scaled_marginal_cost, sensitivity_map,
    toll_to_subsidy_factor,
    BoundReport, Mechanism,
};
pub use netmodel::{
    parse_instance, player_path_cost, serialize_instance, total_latency, Commodity, Edge, Flow,
    GameInstance, LatencyFunction, Path, Polynomial, RoutingProblem, SensitivityClass,
    SensitivityModel,
};
pub use poa::{
    affine_subsidy_poa_formula, affine_toll_poa_formula, affine_worstcase_search,
    nes_poa_formula, pigou_generator, poa_family, poa_instance, smc_poa_formula, AffineGrid,
    FamilyReport, GridReport, PoAReport, SensitivitySpec,
};

/// Equilibrium tolerance: relative VI gap accepted as a certified equilibrium.
pub const EPS_EQ: f64 = 1e-8;

/// Feasibility tolerance for demand and mass constraints.
pub const EPS_FEAS: f64 = 1e-9;
