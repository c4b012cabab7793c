use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::heterogeneous::{self, Start};
use super::homogeneous::homogeneous_from;
use super::{class_cost_table, nash_flow, EquilibriumResult, SolverParams};
use crate::error::Result;
use crate::netmodel::GameInstance;

/// Largest network and class count for which priority orderings are tried.
const MAX_ORDERED_EDGES: usize = 4;
const MAX_ORDERED_CLASSES: usize = 3;
/// Per-class orderings are enumerated while `(K!)^C` stays below this;
/// beyond it all classes share one ordering.
const MAX_ORDER_PRODUCTS: usize = 576;

/// Every equilibrium found from the default start, each priority ordering
/// (small parallel networks) and `restarts` seeded random starts.
pub fn nash_candidates(
    instance: &GameInstance,
    restarts: usize,
    seed: u64,
    params: &SolverParams,
) -> Result<Vec<EquilibriumResult>> {
    collect(instance, restarts, seed, params, false)
}

/// Highest-latency equilibrium among [`nash_candidates`].
///
/// Orderings are skipped when the equilibrium latency is provably unique.
/// The result bounds the worst-case equilibrium latency from below.
pub fn worst_case_nash(
    instance: &GameInstance,
    restarts: usize,
    seed: u64,
    params: &SolverParams,
) -> Result<EquilibriumResult> {
    let candidates = collect(instance, restarts, seed, params, true)?;
    let mut worst: Option<EquilibriumResult> = None;
    for c in candidates {
        if worst.as_ref().map_or(true, |w| c.total_latency > w.total_latency) {
            worst = Some(c);
        }
    }
    Ok(worst.expect("at least the default start is solved"))
}

fn collect(
    instance: &GameInstance,
    restarts: usize,
    seed: u64,
    params: &SolverParams,
    skip_unique: bool,
) -> Result<Vec<EquilibriumResult>> {
    let mut out = vec![nash_flow(instance, params)?];
    let problem = instance.problem();
    let k = problem.edges().len();
    let classes = instance.sensitivity().classes().len();
    let small = problem.is_parallel() && k <= MAX_ORDERED_EDGES && classes <= MAX_ORDERED_CLASSES;
    if small && !(skip_unique && latency_is_unique(instance)) {
        for priority in orderings(k, classes) {
            let start = Start {
                init: None,
                priority: Some(priority),
            };
            out.push(heterogeneous::solve(instance, &start, params)?);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        if classes == 1 {
            let mut x = vec![0.0; problem.paths().len()];
            for (i, c) in problem.commodities().iter().enumerate() {
                let ps = problem.commodity_paths(i);
                let w: Vec<f64> = ps.iter().map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
                let total: f64 = w.iter().sum();
                for (&p, wi) in ps.iter().zip(&w) {
                    x[p] = c.demand * wi / total;
                }
            }
            out.push(homogeneous_from(instance, x, params)?);
        } else {
            let init = instance
                .sensitivity()
                .classes()
                .iter()
                .map(|c| {
                    let w: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
                    let total: f64 = w.iter().sum();
                    w.iter().map(|v| c.mass * v / total).collect()
                })
                .collect();
            let start = Start {
                init: Some(init),
                priority: None,
            };
            out.push(heterogeneous::solve(instance, &start, params)?);
        }
    }
    Ok(out)
}

/// Cases where every equilibrium has the same total latency: one class with
/// strictly increasing costs everywhere, or two links where no class finds
/// both links flat.
fn latency_is_unique(instance: &GameInstance) -> bool {
    let costs = class_cost_table(instance);
    let flat = |c: usize, e: usize| costs[c][e].is_constant();
    if costs.len() == 1 {
        return (0..costs[0].len()).all(|e| !flat(0, e));
    }
    instance.problem().edges().len() == 2 && (0..costs.len()).all(|c| !(flat(c, 0) && flat(c, 1)))
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for e in 0..k {
            if !prefix.contains(&e) {
                prefix.push(e);
                rec(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), k, &mut out);
    out
}

/// Per-class priority assignments to try.
fn orderings(k: usize, classes: usize) -> Vec<Vec<Vec<usize>>> {
    let perms = permutations(k);
    let product = perms.len().checked_pow(classes as u32).unwrap_or(usize::MAX);
    if product > MAX_ORDER_PRODUCTS {
        return perms.into_iter().map(|p| vec![p; classes]).collect();
    }
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..classes {
        out = out
            .into_iter()
            .flat_map(|partial| {
                perms.iter().map(move |p| {
                    let mut next = partial.clone();
                    next.push(p.clone());
                    next
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{LatencyFunction, RoutingProblem, SensitivityClass, SensitivityModel};
    use crate::poa::pigou_generator;

    #[test]
    fn ordering_counts() {
        assert_eq!(orderings(2, 1).len(), 2);
        assert_eq!(orderings(3, 2).len(), 36);
        assert_eq!(orderings(4, 2).len(), 576);
        assert_eq!(orderings(4, 3).len(), 24);
    }

    #[test]
    fn untolled_pigou_restarts_all_agree() {
        let game = GameInstance::untolled(pigou_generator(1).unwrap(), SensitivityModel::homogeneous());
        let all = nash_candidates(&game, 10, 7, &SolverParams::default()).unwrap();
        assert_eq!(all.len(), 1 + 2 + 10);
        for r in &all {
            assert!((r.total_latency - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_links_have_many_equilibria_with_equal_latency() {
        let problem = RoutingProblem::parallel(vec![
            LatencyFunction::constant(1.0).unwrap(),
            LatencyFunction::constant(1.0).unwrap(),
        ])
        .unwrap();
        let game = GameInstance::untolled(problem, SensitivityModel::homogeneous());
        let all = nash_candidates(&game, 5, 3, &SolverParams::default()).unwrap();
        let firsts: Vec<f64> = all.iter().map(|r| r.flow.edge_flows()[0]).collect();
        assert!(firsts.iter().any(|f| *f > 0.99) && firsts.iter().any(|f| *f < 0.01));
        for r in &all {
            assert!((r.total_latency - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn worst_case_prefers_the_expensive_split() {
        // Both classes are indifferent between two flat links of equal cost
        // but different latency; the worst equilibrium routes all mass over
        // the higher-latency link.
        let problem = RoutingProblem::parallel(vec![
            LatencyFunction::constant(1.0).unwrap(),
            LatencyFunction::constant(2.0).unwrap(),
        ])
        .unwrap();
        let sens = SensitivityModel::new(
            vec![SensitivityClass { mass: 0.5, s: 1.0 }, SensitivityClass { mass: 0.5, s: 1.0 }],
            (1.0, 1.0),
        )
        .unwrap();
        let game = GameInstance::new(
            problem,
            sens,
            vec![crate::Polynomial::constant(1.0), crate::Polynomial::zero()],
        )
        .unwrap();
        let w = worst_case_nash(&game, 0, 0, &SolverParams::default()).unwrap();
        assert!((w.total_latency - 2.0).abs() < 1e-12);
    }

    #[test]
    fn seeded_restarts_are_reproducible() {
        let problem = RoutingProblem::parallel(vec![
            LatencyFunction::affine(1.0, 0.0).unwrap(),
            LatencyFunction::affine(1.0, 0.2).unwrap(),
            LatencyFunction::affine(2.0, 0.1).unwrap(),
        ])
        .unwrap();
        let game = GameInstance::untolled(problem, SensitivityModel::homogeneous());
        let a = nash_candidates(&game, 4, 11, &SolverParams::default()).unwrap();
        let b = nash_candidates(&game, 4, 11, &SolverParams::default()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.flow, y.flow);
        }
        for r in &a {
            assert!((r.total_latency - a[0].total_latency).abs() < 1e-8);
        }
    }
}
