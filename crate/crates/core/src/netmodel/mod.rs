//! Routing problems, flows, latency polynomials, sensitivity distributions and
//! the serialized instance format.

pub(crate) mod flow;
mod format;
mod instance;
mod latency;
mod problem;
mod sensitivity;

pub use flow::{total_latency, Flow};
pub use format::{parse_instance, serialize_instance};
pub use instance::{player_path_cost, GameInstance};
pub use latency::{LatencyFunction, Polynomial};
pub use problem::{Commodity, Edge, Path, RoutingProblem, MAX_PATHS};
pub use sensitivity::{SensitivityClass, SensitivityModel};
