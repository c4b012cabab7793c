use super::{assemble, check_monotone, convergence_error, vi_gaps, EquilibriumResult, SolverParams};
use crate::error::{Error, Result};
use crate::netmodel::flow::edge_flows_of;
use crate::netmodel::{GameInstance, Polynomial, RoutingProblem};
use crate::numeric::root_nondecreasing;

/// Flow minimising total latency `Σ_e f_e·ℓ_e(f_e)`.
///
/// Solved as the equilibrium of the marginal costs `ℓ_e + f·ℓ_e'`, so the
/// reported gap is the first-order optimality residual and the potential
/// trace is the total latency of each iterate.
pub fn optimal_flow(problem: &RoutingProblem, params: &SolverParams) -> Result<EquilibriumResult> {
    let costs: Vec<Polynomial> = problem
        .edges()
        .iter()
        .map(|e| e.latency.poly().add_scaled(&e.latency.poly().x_times_derivative(), 1.0))
        .collect();
    let init = uniform_split(problem);
    solve_potential(problem, &costs, init, params)
}

/// Nash flow of a single-class instance by minimising the potential
/// `Σ_e ∫₀^{f_e} ℓ_e + s·τ_e`.
///
/// The class normally has `s = 1`; any single sensitivity works since it only
/// rescales the incentive.
pub fn nash_flow_homogeneous(
    instance: &GameInstance,
    params: &SolverParams,
) -> Result<EquilibriumResult> {
    homogeneous_from(instance, uniform_split(instance.problem()), params)
}

pub(super) fn homogeneous_from(
    instance: &GameInstance,
    init: Vec<f64>,
    params: &SolverParams,
) -> Result<EquilibriumResult> {
    let classes = instance.sensitivity().classes();
    if classes.len() != 1 {
        return Err(Error::parameter(
            "sensitivity",
            format!("potential solver needs one class, instance has {}", classes.len()),
        ));
    }
    let costs = instance.class_costs(classes[0].s);
    check_monotone(instance.problem(), &costs, 0)?;
    solve_potential(instance.problem(), &costs, init, params)
}

pub(super) fn uniform_split(problem: &RoutingProblem) -> Vec<f64> {
    let mut x = vec![0.0; problem.paths().len()];
    for (i, c) in problem.commodities().iter().enumerate() {
        let ps = problem.commodity_paths(i);
        for &p in ps {
            x[p] = c.demand / ps.len() as f64;
        }
    }
    x
}

fn potential(costs: &[Polynomial], edge_flows: &[f64]) -> f64 {
    costs.iter().zip(edge_flows).map(|(c, f)| c.integral_at(*f)).sum()
}

/// Pairwise Frank–Wolfe: per commodity, shift mass from the costliest used
/// path to the cheapest path with an exact line search on the potential.
fn solve_potential(
    problem: &RoutingProblem,
    costs: &[Polynomial],
    mut x: Vec<f64>,
    params: &SolverParams,
) -> Result<EquilibriumResult> {
    let mut f = edge_flows_of(problem, &x);
    let mut trace = Vec::new();
    let mut gap_trace = Vec::new();
    let mut best = (f64::INFINITY, x.clone());
    let mut path_cost = vec![0.0; problem.paths().len()];
    let table = [costs.to_vec()];
    let mut iter = 0;
    loop {
        let (gaps, _) = vi_gaps(problem, &table, &[&x], &f);
        let gap = gaps[0];
        if params.record_trace {
            trace.push(potential(costs, &f));
        }
        if gap <= params.tol {
            return Ok(assemble(problem, vec![x], gaps, iter, trace));
        }
        gap_trace.push(gap);
        if gap < best.0 {
            best = (gap, x.clone());
        }
        if iter >= params.max_iters {
            return Err(convergence_error(problem, vec![best.1], iter, best.0, gap_trace));
        }
        iter += 1;

        for i in 0..problem.commodities().len() {
            let ps = problem.commodity_paths(i);
            if ps.len() < 2 {
                continue;
            }
            for &p in ps {
                path_cost[p] = problem.paths()[p].edges.iter().map(|&e| costs[e].eval(f[e])).sum();
            }
            let mut cheap = ps[0];
            let mut dear = None;
            for &p in ps {
                if path_cost[p] < path_cost[cheap] {
                    cheap = p;
                }
                if x[p] > 0.0 && dear.map_or(true, |d| path_cost[p] > path_cost[d]) {
                    dear = Some(p);
                }
            }
            let Some(dear) = dear else { continue };
            if dear == cheap || path_cost[dear] <= path_cost[cheap] {
                continue;
            }
            let to = &problem.paths()[cheap].edges;
            let from = &problem.paths()[dear].edges;
            let plus: Vec<usize> = to.iter().copied().filter(|e| !from.contains(e)).collect();
            let minus: Vec<usize> = from.iter().copied().filter(|e| !to.contains(e)).collect();
            let slope = |d: f64| -> f64 {
                plus.iter().map(|&e| costs[e].eval(f[e] + d)).sum::<f64>()
                    - minus.iter().map(|&e| costs[e].eval((f[e] - d).max(0.0))).sum::<f64>()
            };
            let dmax = x[dear];
            let step = if slope(dmax) <= 0.0 {
                dmax
            } else {
                root_nondecreasing(slope, 0.0, dmax)
            };
            if step <= 0.0 {
                continue;
            }
            x[dear] = if step >= dmax { 0.0 } else { x[dear] - step };
            x[cheap] += step;
            for &e in &plus {
                f[e] += step;
            }
            for &e in &minus {
                f[e] = (f[e] - step).max(0.0);
            }
        }
        // Incremental updates drift; resynchronise the edge flows.
        f = edge_flows_of(problem, &x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incentives::Mechanism;
    use crate::netmodel::{Commodity, Edge, LatencyFunction, SensitivityModel};
    use crate::poa::pigou_generator;

    fn params() -> SolverParams {
        SolverParams::default()
    }

    fn pigou_game(p: usize, m: &Mechanism) -> GameInstance {
        GameInstance::with_mechanism(pigou_generator(p).unwrap(), SensitivityModel::homogeneous(), m)
            .unwrap()
    }

    #[test]
    fn pigou_nash_and_optimum() {
        let r = nash_flow_homogeneous(&pigou_game(1, &Mechanism::None), &params()).unwrap();
        assert!((r.flow.edge_flows()[0] - 1.0).abs() < 1e-9);
        assert!((r.total_latency - 1.0).abs() < 1e-9);
        let o = optimal_flow(&pigou_generator(1).unwrap(), &params()).unwrap();
        assert!((o.flow.edge_flows()[0] - 0.5).abs() < 1e-9);
        assert!((o.total_latency - 0.75).abs() < 1e-9);
    }

    #[test]
    fn optimum_of_polynomial_pigou() {
        for p in 1..=6 {
            let o = optimal_flow(&pigou_generator(p).unwrap(), &params()).unwrap();
            let expect = (1.0 / (p as f64 + 1.0)).powf(1.0 / p as f64);
            assert!((o.flow.edge_flows()[0] - expect).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn marginal_cost_toll_and_subsidy_reach_the_optimum() {
        for p in 1..=4usize {
            let expect = (1.0 / (p as f64 + 1.0)).powf(1.0 / p as f64);
            let mc = nash_flow_homogeneous(&pigou_game(p, &Mechanism::MarginalCost), &params()).unwrap();
            assert!((mc.flow.edge_flows()[0] - expect).abs() < 1e-9);
            let sub = GameInstance::new(
                pigou_generator(p).unwrap(),
                SensitivityModel::homogeneous(),
                vec![Polynomial::zero(), Polynomial::constant(-(p as f64) / (p as f64 + 1.0))],
            )
            .unwrap();
            let r = nash_flow_homogeneous(&sub, &params()).unwrap();
            assert!((r.flow.edge_flows()[0] - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn single_edge_carries_everything() {
        let problem = RoutingProblem::parallel(vec![LatencyFunction::affine(2.0, 1.0).unwrap()]).unwrap();
        let o = optimal_flow(&problem, &params()).unwrap();
        assert_eq!(o.flow.edge_flows(), &[1.0]);
        assert!((o.total_latency - 3.0).abs() < 1e-15);
    }

    #[test]
    fn potential_never_increases() {
        let problem = braess();
        let game = GameInstance::untolled(problem, SensitivityModel::homogeneous());
        let p = SolverParams { record_trace: true, tol: 1e-12, ..params() };
        let r = nash_flow_homogeneous(&game, &p).unwrap();
        assert!(r.potential_trace.len() >= 2);
        for w in r.potential_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-14, "{:?}", r.potential_trace);
        }
        // Braess: everyone takes the zig-zag route, latency 2.
        assert!((r.total_latency - 2.0).abs() < 1e-9);
    }

    fn braess() -> RoutingProblem {
        let e = |id: &str, t: usize, h: usize, l: LatencyFunction| Edge {
            id: id.into(),
            tail: t,
            head: h,
            latency: l,
        };
        RoutingProblem::new(
            vec!["s".into(), "a".into(), "b".into(), "t".into()],
            vec![
                e("sa", 0, 1, LatencyFunction::monomial(1)),
                e("sb", 0, 2, LatencyFunction::constant(1.0).unwrap()),
                e("ab", 1, 2, LatencyFunction::constant(0.0).unwrap()),
                e("at", 1, 3, LatencyFunction::constant(1.0).unwrap()),
                e("bt", 2, 3, LatencyFunction::monomial(1)),
            ],
            vec![Commodity { origin: 0, destination: 3, demand: 1.0 }],
        )
        .unwrap()
    }

    #[test]
    fn rejects_decreasing_costs() {
        let game = GameInstance::new(
            pigou_generator(1).unwrap(),
            SensitivityModel::homogeneous(),
            vec![Polynomial::new(vec![0.0, -2.0]), Polynomial::zero()],
        )
        .unwrap();
        assert!(matches!(
            nash_flow_homogeneous(&game, &params()),
            Err(Error::NonMonotone { class: 0, .. })
        ));
    }

    #[test]
    fn reports_non_convergence_with_best_iterate() {
        let game = GameInstance::untolled(braess(), SensitivityModel::homogeneous());
        let p = SolverParams { max_iters: 0, ..params() };
        match nash_flow_homogeneous(&game, &p) {
            Err(Error::Convergence(f)) => {
                assert_eq!(f.iterations, 0);
                assert!(f.gap > 0.0);
                assert_eq!(f.best_class_flows.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
