use super::{Flow, Polynomial, RoutingProblem, SensitivityModel};
use crate::error::{Error, Result};
use crate::incentives::Mechanism;

/// A routing problem together with a sensitivity distribution and one
/// incentive function per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    problem: RoutingProblem,
    sensitivity: SensitivityModel,
    incentives: Vec<Polynomial>,
}

impl GameInstance {
    pub fn new(
        problem: RoutingProblem,
        sensitivity: SensitivityModel,
        incentives: Vec<Polynomial>,
    ) -> Result<Self> {
        if incentives.len() != problem.edges().len() {
            return Err(Error::invalid(
                "incentives",
                format!(
                    "{} incentive functions for {} edges",
                    incentives.len(),
                    problem.edges().len()
                ),
            ));
        }
        if let Some(i) = incentives
            .iter()
            .position(|t| t.coeffs().iter().any(|c| !c.is_finite()))
        {
            return Err(Error::invalid(format!("incentives[{i}]"), "non-finite coefficient"));
        }
        Ok(Self {
            problem,
            sensitivity,
            incentives,
        })
    }

    /// Instance without incentives.
    pub fn untolled(problem: RoutingProblem, sensitivity: SensitivityModel) -> Self {
        let incentives = vec![Polynomial::zero(); problem.edges().len()];
        Self {
            problem,
            sensitivity,
            incentives,
        }
    }

    /// Instance whose incentives are produced by `mechanism` edge by edge.
    pub fn with_mechanism(
        problem: RoutingProblem,
        sensitivity: SensitivityModel,
        mechanism: &Mechanism,
    ) -> Result<Self> {
        let incentives = problem
            .edges()
            .iter()
            .map(|e| mechanism.apply(&e.latency))
            .collect::<Result<Vec<_>>>()?;
        Self::new(problem, sensitivity, incentives)
    }

    /// Same problem and incentives under a different sensitivity model.
    pub fn with_sensitivity(&self, sensitivity: SensitivityModel) -> Self {
        Self {
            problem: self.problem.clone(),
            sensitivity,
            incentives: self.incentives.clone(),
        }
    }

    /// Same problem and sensitivities, incentives re-derived from `mechanism`.
    pub fn remechanised(&self, mechanism: &Mechanism) -> Result<Self> {
        Self::with_mechanism(self.problem.clone(), self.sensitivity.clone(), mechanism)
    }

    pub fn problem(&self) -> &RoutingProblem {
        &self.problem
    }

    pub fn sensitivity(&self) -> &SensitivityModel {
        &self.sensitivity
    }

    pub fn incentives(&self) -> &[Polynomial] {
        &self.incentives
    }

    /// Per-edge observed cost polynomials `ℓ_e + s·τ_e` for sensitivity `s`.
    pub fn class_costs(&self, s: f64) -> Vec<Polynomial> {
        self.problem
            .edges()
            .iter()
            .zip(&self.incentives)
            .map(|(e, t)| e.latency.poly().add_scaled(t, s))
            .collect()
    }

    pub fn edge_cost(&self, edge: usize, f: f64, s: f64) -> f64 {
        self.problem.edges()[edge].latency.eval(f) + s * self.incentives[edge].eval(f)
    }
}

/// Cost `Σ_{e∈P} ℓ_e(f_e) + s·τ_e(f_e)` observed on `path` by a user of
/// sensitivity `s`.
pub fn player_path_cost(instance: &GameInstance, path: usize, flow: &Flow, s: f64) -> Result<f64> {
    let p = instance.problem().paths().get(path).ok_or_else(|| Error::Lookup {
        kind: "path",
        id: path.to_string(),
    })?;
    if !(s >= 0.0) {
        return Err(Error::parameter("sensitivity", "must be non-negative"));
    }
    if flow.edge_flows().len() != instance.problem().edges().len() {
        return Err(Error::Infeasible("flow does not belong to this instance".into()));
    }
    Ok(p
        .edges
        .iter()
        .map(|&e| instance.edge_cost(e, flow.edge_flows()[e], s))
        .sum())
}
