//! Optimal flows and Nash flows, each returned with a variational-inequality
//! certificate.
//!
//! A flow is certified when, for every sensitivity class, the mass-weighted
//! excess of used-path costs over the cheapest path of the same commodity is
//! at most the tolerance, relative to `max(1, Σ x_P·|C_P|)`.

mod heterogeneous;
mod homogeneous;
mod worst;

pub use heterogeneous::nash_flow_heterogeneous;
pub use homogeneous::{nash_flow_homogeneous, optimal_flow};
pub use worst::{nash_candidates, worst_case_nash};

use crate::error::{Error, Result};
use crate::netmodel::flow::{edge_flows_of, latency_of_edge_flows};
use crate::netmodel::{Flow, GameInstance, Polynomial, RoutingProblem};
use crate::{EPS_EQ, EPS_FEAS};

/// Stopping rule shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Relative VI gap at which a flow counts as an equilibrium.
    pub tol: f64,
    pub max_iters: usize,
    /// Keep the potential value of every iterate (homogeneous solver only).
    pub record_trace: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tol: EPS_EQ,
            max_iters: 100_000,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    /// Aggregate flow.
    pub flow: Flow,
    /// One flow per sensitivity class, in absolute mass; they sum to `flow`.
    pub class_flows: Vec<Flow>,
    pub vi_gap: f64,
    pub class_gaps: Vec<f64>,
    pub total_latency: f64,
    pub iterations: usize,
    /// Every edge carries more than `EPS_FEAS` mass.
    pub fully_utilized: bool,
    /// Potential value per iteration when requested.
    pub potential_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Sum of the class gaps.
    pub vi_gap: f64,
    pub class_gaps: Vec<f64>,
    /// Normalisation `max(1, Σ x_P·|C_P|)` the gaps were divided by.
    pub scale: f64,
}

/// Recomputes the equilibrium certificate of `class_flows` under the costs
/// of `instance`.
///
/// Class `c` must route `m_c·r_i` on every commodity `i`, where `m_c` is its
/// mass in the sensitivity model.
pub fn certify(instance: &GameInstance, class_flows: &[Flow]) -> Result<Certificate> {
    let problem = instance.problem();
    let classes = instance.sensitivity().classes();
    if class_flows.len() != classes.len() {
        return Err(Error::invalid(
            "class_flows",
            format!("{} class flows for {} classes", class_flows.len(), classes.len()),
        ));
    }
    for (c, (flow, class)) in class_flows.iter().zip(classes).enumerate() {
        if flow.path_flows().len() != problem.paths().len() {
            return Err(Error::invalid(
                format!("class_flows[{c}]"),
                "flow does not belong to this problem",
            ));
        }
        flow.check_feasible(problem, class.mass)?;
    }
    let mut edge_flows = vec![0.0; problem.edges().len()];
    for flow in class_flows {
        for (e, f) in flow.edge_flows().iter().enumerate() {
            edge_flows[e] += f;
        }
    }
    if let Some(e) = edge_flows.iter().position(|f| *f > 1.0 + EPS_FEAS) {
        return Err(Error::Infeasible(format!(
            "edge `{}` carries aggregate mass {}",
            problem.edges()[e].id,
            edge_flows[e]
        )));
    }
    let costs = class_cost_table(instance);
    let paths: Vec<&[f64]> = class_flows.iter().map(|f| f.path_flows()).collect();
    let (class_gaps, scale) = vi_gaps(problem, &costs, &paths, &edge_flows);
    Ok(Certificate {
        vi_gap: class_gaps.iter().sum(),
        class_gaps,
        scale,
    })
}

/// Runs the solver matching the instance: the potential-based solver for a
/// single sensitivity class, the multi-class solver otherwise.
pub fn nash_flow(instance: &GameInstance, params: &SolverParams) -> Result<EquilibriumResult> {
    if instance.sensitivity().classes().len() == 1 {
        nash_flow_homogeneous(instance, params)
    } else {
        nash_flow_heterogeneous(instance, params)
    }
}

/// Observed-cost polynomials, indexed `[class][edge]`.
pub(crate) fn class_cost_table(instance: &GameInstance) -> Vec<Vec<Polynomial>> {
    instance
        .sensitivity()
        .classes()
        .iter()
        .map(|c| instance.class_costs(c.s))
        .collect()
}

/// Normalised per-class VI gaps and the shared normalisation.
pub(crate) fn vi_gaps(
    problem: &RoutingProblem,
    costs: &[Vec<Polynomial>],
    class_paths: &[&[f64]],
    edge_flows: &[f64],
) -> (Vec<f64>, f64) {
    let mut gaps = Vec::with_capacity(costs.len());
    let mut weight = 0.0;
    let mut path_cost = vec![0.0; problem.paths().len()];
    for (class_costs, x) in costs.iter().zip(class_paths) {
        let edge_cost: Vec<f64> = class_costs
            .iter()
            .zip(edge_flows)
            .map(|(c, f)| c.eval(*f))
            .collect();
        for (p, path) in problem.paths().iter().enumerate() {
            path_cost[p] = path.edges.iter().map(|&e| edge_cost[e]).sum();
        }
        let mut gap = 0.0;
        for i in 0..problem.commodities().len() {
            let ps = problem.commodity_paths(i);
            let min = ps.iter().map(|&p| path_cost[p]).fold(f64::INFINITY, f64::min);
            for &p in ps {
                gap += x[p] * (path_cost[p] - min);
                weight += x[p] * path_cost[p].abs();
            }
        }
        gaps.push(gap);
    }
    let scale = weight.max(1.0);
    for g in &mut gaps {
        *g /= scale;
    }
    (gaps, scale)
}

/// Rejects cost functions that decrease somewhere on `[0, 1]`; potential
/// minimisation and water-filling both rely on monotone costs.
pub(crate) fn check_monotone(
    problem: &RoutingProblem,
    costs: &[Polynomial],
    class: usize,
) -> Result<()> {
    for (e, c) in costs.iter().enumerate() {
        if c.coeffs().iter().skip(1).all(|a| *a >= 0.0) {
            continue;
        }
        let mut prev = c.eval(0.0);
        for k in 1..=1000 {
            let f = k as f64 / 1000.0;
            let v = c.eval(f);
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return Err(Error::NonMonotone {
                    edge: problem.edges()[e].id.clone(),
                    class,
                    at: f,
                });
            }
            prev = v;
        }
    }
    Ok(())
}

/// Assembles a result from per-class path flows.
pub(crate) fn assemble(
    problem: &RoutingProblem,
    class_paths: Vec<Vec<f64>>,
    class_gaps: Vec<f64>,
    iterations: usize,
    potential_trace: Vec<f64>,
) -> EquilibriumResult {
    let (flow, class_flows) = flows_of(problem, class_paths);
    let total_latency = latency_of_edge_flows(problem, flow.edge_flows());
    EquilibriumResult {
        fully_utilized: flow.uses_every_edge(EPS_FEAS),
        flow,
        class_flows,
        vi_gap: class_gaps.iter().sum(),
        class_gaps,
        total_latency,
        iterations,
        potential_trace,
    }
}

pub(crate) fn flows_of(problem: &RoutingProblem, class_paths: Vec<Vec<f64>>) -> (Flow, Vec<Flow>) {
    let mut total = vec![0.0; problem.paths().len()];
    for x in &class_paths {
        for (t, v) in total.iter_mut().zip(x) {
            *t += v;
        }
    }
    let class_flows = class_paths
        .into_iter()
        .map(|x| {
            let e = edge_flows_of(problem, &x);
            Flow::from_parts_unchecked(x, e)
        })
        .collect();
    let e = edge_flows_of(problem, &total);
    (Flow::from_parts_unchecked(total, e), class_flows)
}

pub(crate) fn convergence_error(
    problem: &RoutingProblem,
    class_paths: Vec<Vec<f64>>,
    iterations: usize,
    gap: f64,
    gap_trace: Vec<f64>,
) -> Error {
    let (best_flow, best_class_flows) = flows_of(problem, class_paths);
    Error::Convergence(Box::new(crate::error::ConvergenceFailure {
        iterations,
        gap,
        gap_trace,
        best_flow,
        best_class_flows,
    }))
}
