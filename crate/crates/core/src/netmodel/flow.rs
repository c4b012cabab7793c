use super::RoutingProblem;
use crate::error::{Error, Result};
use crate::EPS_FEAS;

/// Path masses together with the edge masses they induce.
///
/// Edge flows are always recomputed from path flows on construction; a
/// `Flow` is never mutated in place.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    path_flows: Vec<f64>,
    edge_flows: Vec<f64>,
}

impl Flow {
    pub fn from_path_flows(problem: &RoutingProblem, path_flows: Vec<f64>) -> Result<Self> {
        if path_flows.len() != problem.paths().len() {
            return Err(Error::Infeasible(format!(
                "expected {} path flows, got {}",
                problem.paths().len(),
                path_flows.len()
            )));
        }
        if let Some(i) = path_flows.iter().position(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::Infeasible(format!(
                "path {i} carries invalid mass {}",
                path_flows[i]
            )));
        }
        let edge_flows = edge_flows_of(problem, &path_flows);
        Ok(Self {
            path_flows,
            edge_flows,
        })
    }

    /// All-zero flow on `problem`.
    pub fn zero(problem: &RoutingProblem) -> Self {
        Self {
            path_flows: vec![0.0; problem.paths().len()],
            edge_flows: vec![0.0; problem.edges().len()],
        }
    }

    pub(crate) fn from_parts_unchecked(path_flows: Vec<f64>, edge_flows: Vec<f64>) -> Self {
        Self {
            path_flows,
            edge_flows,
        }
    }

    pub fn path_flows(&self) -> &[f64] {
        &self.path_flows
    }

    pub fn edge_flows(&self) -> &[f64] {
        &self.edge_flows
    }

    /// Checks `Σ_{P∈Pᵢ} f_P = scale·rᵢ` per commodity and that every mass
    /// lies in `[0, 1]`.
    pub fn check_feasible(&self, problem: &RoutingProblem, scale: f64) -> Result<()> {
        if self.path_flows.len() != problem.paths().len() {
            return Err(Error::Infeasible("flow does not belong to this problem".into()));
        }
        for (i, c) in problem.commodities().iter().enumerate() {
            let routed: f64 = problem
                .commodity_paths(i)
                .iter()
                .map(|&p| self.path_flows[p])
                .sum();
            if (routed - scale * c.demand).abs() > EPS_FEAS {
                return Err(Error::Infeasible(format!(
                    "commodity {i} routes {routed}, demand is {}",
                    scale * c.demand
                )));
            }
        }
        for (e, f) in self.edge_flows.iter().enumerate() {
            if *f < 0.0 || *f > 1.0 + EPS_FEAS {
                return Err(Error::Infeasible(format!(
                    "edge `{}` carries mass {f} outside [0, 1]",
                    problem.edges()[e].id
                )));
            }
        }
        Ok(())
    }

    /// True when every edge carries more than `threshold` mass.
    pub fn uses_every_edge(&self, threshold: f64) -> bool {
        self.edge_flows.iter().all(|f| *f > threshold)
    }
}

pub(crate) fn edge_flows_of(problem: &RoutingProblem, path_flows: &[f64]) -> Vec<f64> {
    let mut edge_flows = vec![0.0; problem.edges().len()];
    for (p, f) in problem.paths().iter().zip(path_flows) {
        for &e in &p.edges {
            edge_flows[e] += f;
        }
    }
    edge_flows
}

pub(crate) fn latency_of_edge_flows(problem: &RoutingProblem, edge_flows: &[f64]) -> f64 {
    problem
        .edges()
        .iter()
        .zip(edge_flows)
        .map(|(e, f)| f * e.latency.eval(*f))
        .sum()
}

/// Total latency `Σ_e f_e·ℓ_e(f_e)` of a feasible flow.
pub fn total_latency(problem: &RoutingProblem, flow: &Flow) -> Result<f64> {
    flow.check_feasible(problem, 1.0)?;
    Ok(latency_of_edge_flows(problem, flow.edge_flows()))
}
