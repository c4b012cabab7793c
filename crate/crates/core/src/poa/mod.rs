//! Price of anarchy: per-instance and per-family ratios, closed-form bounds
//! for affine games, instance generators and grid searches.

mod formulas;
mod grid;

pub use formulas::{
    affine_subsidy_poa_formula, affine_toll_poa_formula, nes_poa_formula, smc_poa_formula,
};
pub use grid::{affine_worstcase_search, AffineGrid, GridPoint, GridReport, SensitivitySpec};

use crate::equilibrium::{optimal_flow, worst_case_nash, SolverParams};
use crate::error::{Error, Result};
use crate::incentives::Mechanism;
use crate::netmodel::{GameInstance, LatencyFunction, RoutingProblem};

/// Ratio of the worst equilibrium latency found to the optimal latency.
#[derive(Debug, Clone, PartialEq)]
pub struct PoAReport {
    pub instance_id: String,
    pub nash_latency: f64,
    pub opt_latency: f64,
    pub poa: f64,
    /// Mechanism string, empty when the incentives were given directly.
    pub mechanism: String,
    pub s_bounds: (f64, f64),
    pub nash_gap: f64,
    pub opt_gap: f64,
    pub fully_utilized: bool,
}

/// Maximum over a list of instances.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub worst: PoAReport,
    /// Index of `worst` in the input list.
    pub argmax: usize,
    pub reports: Vec<PoAReport>,
    /// Members skipped because their optimal latency is zero.
    pub excluded: usize,
}

/// PoA of one instance against the worst equilibrium found by
/// [`worst_case_nash`].
pub fn poa_instance(
    instance: &GameInstance,
    restarts: usize,
    seed: u64,
    params: &SolverParams,
) -> Result<PoAReport> {
    let opt = optimal_flow(instance.problem(), params)?;
    if !(opt.total_latency > 0.0) {
        return Err(Error::Degenerate("optimal latency is zero; PoA undefined".into()));
    }
    let nash = worst_case_nash(instance, restarts, seed, params)?;
    Ok(PoAReport {
        instance_id: String::new(),
        nash_latency: nash.total_latency,
        opt_latency: opt.total_latency,
        poa: nash.total_latency / opt.total_latency,
        mechanism: String::new(),
        s_bounds: instance.sensitivity().bounds(),
        nash_gap: nash.vi_gap,
        opt_gap: opt.vi_gap,
        fully_utilized: nash.fully_utilized,
    })
}

/// Applies `mechanism` to every instance and returns the largest PoA.
pub fn poa_family(
    instances: &[GameInstance],
    mechanism: &Mechanism,
    restarts: usize,
    seed: u64,
    params: &SolverParams,
) -> Result<FamilyReport> {
    if instances.is_empty() {
        return Err(Error::parameter("instances", "family is empty"));
    }
    let mut reports: Vec<PoAReport> = Vec::with_capacity(instances.len());
    let mut excluded = 0;
    let mut worst: Option<(usize, usize)> = None;
    for (i, inst) in instances.iter().enumerate() {
        let game = inst.remechanised(mechanism)?;
        match poa_instance(&game, restarts, seed, params) {
            Ok(mut r) => {
                r.instance_id = i.to_string();
                r.mechanism = mechanism.to_string();
                if worst.map_or(true, |(_, w)| r.poa > reports[w].poa) {
                    worst = Some((i, reports.len()));
                }
                reports.push(r);
            }
            Err(Error::Degenerate(_)) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    let (argmax, at) = worst.ok_or_else(|| {
        Error::Degenerate("every family member has zero optimal latency".into())
    })?;
    Ok(FamilyReport {
        worst: reports[at].clone(),
        argmax,
        reports,
        excluded,
    })
}

/// Two parallel links with `ℓ₁(f) = f^p` and `ℓ₂(f) = 1`.
pub fn pigou_generator(p: usize) -> Result<RoutingProblem> {
    if p < 1 {
        return Err(Error::parameter("p", "degree must be at least 1"));
    }
    RoutingProblem::parallel(vec![LatencyFunction::monomial(p), LatencyFunction::constant(1.0)?])
}

/// Two parallel links with `ℓᵢ(f) = aᵢ·f + bᵢ`.
pub fn two_link_affine(a1: f64, b1: f64, a2: f64, b2: f64) -> Result<RoutingProblem> {
    RoutingProblem::parallel(vec![
        LatencyFunction::affine(a1, b1)?,
        LatencyFunction::affine(a2, b2)?,
    ])
}
