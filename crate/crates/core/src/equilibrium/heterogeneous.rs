use super::{
    assemble, check_monotone, class_cost_table, convergence_error, vi_gaps, EquilibriumResult,
    SolverParams,
};
use crate::error::{Error, Result};
use crate::netmodel::{GameInstance, Polynomial, RoutingProblem};
use crate::numeric::root_nondecreasing;

const INITIAL_DAMPING: f64 = 0.5;
const MIN_DAMPING: f64 = 1.0 / 1048576.0;
/// Growth of the gap over its best level that counts as oscillation.
const OSCILLATION: f64 = 10.0;
/// Flat edges whose costs differ by less than this count as tied.
const TIE: f64 = 1e-10;
/// Extra iterations after reaching the tolerance, so that mass on links the
/// classes are abandoning decays well below the utilization threshold.
const POLISH_ITERS: usize = 64;

/// Multi-class Nash flow on a parallel network.
///
/// Each class sees `ℓ_e + s_c·τ_e`. Two-link networks are solved directly by
/// a monotone search on the aggregate flow of the first link; larger networks
/// use damped best responses taken one class at a time against the current
/// flows, each computed by water-filling.
pub fn nash_flow_heterogeneous(
    instance: &GameInstance,
    params: &SolverParams,
) -> Result<EquilibriumResult> {
    solve(instance, &Start::default(), params)
}

/// Where the iteration starts and how ties between flat edges are broken.
#[derive(Debug, Clone, Default)]
pub(super) struct Start {
    /// Initial class flows `[class][edge]` in absolute mass.
    pub init: Option<Vec<Vec<f64>>>,
    /// Per-class edge order; tied flat edges are filled in this order when
    /// the class has no flow on them yet.
    pub priority: Option<Vec<Vec<usize>>>,
}

pub(super) fn solve(
    instance: &GameInstance,
    start: &Start,
    params: &SolverParams,
) -> Result<EquilibriumResult> {
    let problem = instance.problem();
    if !problem.is_parallel() {
        return Err(Error::Topology(
            "multi-class solver needs a single-commodity parallel network".into(),
        ));
    }
    let k = problem.edges().len();
    let costs = class_cost_table(instance);
    for (c, cc) in costs.iter().enumerate() {
        check_monotone(problem, cc, c)?;
    }
    let masses: Vec<f64> = instance.sensitivity().classes().iter().map(|c| c.mass).collect();
    let priority = match &start.priority {
        Some(p) => p.clone(),
        None => vec![null_edges_first(instance); masses.len()],
    };
    let mut init = match (&start.init, &start.priority) {
        (Some(x), _) => x.clone(),
        (None, Some(_)) => masses
            .iter()
            .zip(&priority)
            .map(|(m, order)| {
                let mut x = vec![0.0; k];
                x[order[0]] = *m;
                x
            })
            .collect(),
        (None, None) => masses.iter().map(|m| vec![m / k as f64; k]).collect(),
    };
    let mut done = 0;
    if k == 2 {
        let (x, iters) = two_link(&costs, &masses, &init);
        let f = aggregate(&x, k);
        let (gaps, _) = vi_gaps(problem, &costs, &refs(&x), &f);
        if gaps.iter().sum::<f64>() <= params.tol {
            return Ok(assemble(problem, x, gaps, iters, Vec::new()));
        }
        log::debug!("two-link search left gap {:e}; refining", gaps.iter().sum::<f64>());
        init = x;
        done = iters;
    }
    best_response_sweeps(problem, &costs, &masses, &priority, init, done, params)
}

/// Edges with zero latency and zero incentive first, the rest in index order.
fn null_edges_first(instance: &GameInstance) -> Vec<usize> {
    let edges = instance.problem().edges();
    let is_null = |e: usize| edges[e].latency.poly().is_zero() && instance.incentives()[e].is_zero();
    let mut order: Vec<usize> = (0..edges.len()).filter(|&e| is_null(e)).collect();
    order.extend((0..edges.len()).filter(|&e| !is_null(e)));
    order
}

fn aggregate(x: &[Vec<f64>], k: usize) -> Vec<f64> {
    let mut f = vec![0.0; k];
    for row in x {
        for (t, v) in f.iter_mut().zip(row) {
            *t += v;
        }
    }
    f
}

fn refs(x: &[Vec<f64>]) -> Vec<&[f64]> {
    x.iter().map(|r| r.as_slice()).collect()
}

fn best_response_sweeps(
    problem: &RoutingProblem,
    costs: &[Vec<Polynomial>],
    masses: &[f64],
    priority: &[Vec<usize>],
    mut x: Vec<Vec<f64>>,
    start_iter: usize,
    params: &SolverParams,
) -> Result<EquilibriumResult> {
    let k = problem.edges().len();
    let mut theta = INITIAL_DAMPING;
    let mut reference = f64::INFINITY;
    let mut best = (f64::INFINITY, x.clone());
    let mut gap_trace = Vec::new();
    let mut polish: Option<(usize, f64, Vec<Vec<f64>>, Vec<f64>)> = None;
    for iter in 0..=params.max_iters {
        let f = aggregate(&x, k);
        let (gaps, _) = vi_gaps(problem, costs, &refs(&x), &f);
        let gap: f64 = gaps.iter().sum();
        if gap <= params.tol {
            let improved = polish.as_ref().map_or(true, |p| gap <= p.1);
            if improved {
                polish = Some((iter, gap, x.clone(), gaps));
            }
            let (first, best_gap) = polish.as_ref().map(|p| (p.0, p.1)).expect("set above");
            let settled = !improved || best_gap <= params.tol * 1e-6 || iter - first >= POLISH_ITERS;
            if settled || iter == params.max_iters {
                let (at, _, x, gaps) = polish.expect("set above");
                return Ok(assemble(problem, x, gaps, start_iter + at, Vec::new()));
            }
        } else if let Some((at, _, x, gaps)) = polish {
            return Ok(assemble(problem, x, gaps, start_iter + at, Vec::new()));
        }
        gap_trace.push(gap);
        if gap < best.0 {
            best = (gap, x.clone());
        }
        if iter == params.max_iters {
            break;
        }
        // The gap is not monotone along the sweeps; only a rise well above
        // the best level reached counts as oscillation.
        if gap < reference {
            reference = gap;
        } else if gap > OSCILLATION * reference {
            theta = (theta * 0.5).max(MIN_DAMPING);
            reference = gap;
        }
        let mut f = f;
        for c in 0..masses.len() {
            let br = water_fill(&costs[c], masses[c], &f, &x[c], &priority[c]);
            for ((v, b), t) in x[c].iter_mut().zip(br).zip(f.iter_mut()) {
                let next = (1.0 - theta) * *v + theta * b;
                *t += next - *v;
                *v = next;
            }
        }
    }
    Err(convergence_error(
        problem,
        best.1,
        start_iter + params.max_iters,
        best.0,
        gap_trace,
    ))
}

/// Best response of one class of mass `m` against the flow of the others:
/// fill edges up to a common cost level `π`, with flat edges absorbing
/// whatever the others cannot take at the flat level.
fn water_fill(costs: &[Polynomial], m: f64, f: &[f64], own: &[f64], priority: &[usize]) -> Vec<f64> {
    let k = costs.len();
    let mut y = vec![0.0; k];
    if m <= 0.0 {
        return y;
    }
    let g: Vec<f64> = f.iter().zip(own).map(|(a, b)| (a - b).max(0.0)).collect();
    let flat: Vec<bool> = costs.iter().map(|c| c.is_constant()).collect();
    let fill = |e: usize, pi: f64| -> f64 {
        let c = &costs[e];
        let base = c.eval(g[e]);
        if base >= pi {
            return 0.0;
        }
        if c.eval(g[e] + m) <= pi {
            return m;
        }
        match c.affine_parts() {
            Some((slope, _)) if slope > 0.0 => ((pi - base) / slope).clamp(0.0, m),
            _ => root_nondecreasing(|v| c.eval(g[e] + v) - pi, 0.0, m),
        }
    };
    let sloped: Vec<usize> = (0..k).filter(|&e| !flat[e]).collect();
    let level = (0..k)
        .filter(|&e| flat[e])
        .map(|e| costs[e].coeff(0))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
    let absorbed = |pi: f64| -> f64 { sloped.iter().map(|&e| fill(e, pi)).sum() };

    if let Some(kstar) = level {
        let taken = absorbed(kstar);
        if taken <= m {
            for &e in &sloped {
                y[e] = fill(e, kstar);
            }
            let rest = m - taken;
            let tied: Vec<usize> = (0..k)
                .filter(|&e| flat[e] && costs[e].coeff(0) <= kstar + TIE)
                .collect();
            let weight: f64 = tied.iter().map(|&e| own[e]).sum();
            if weight > 0.0 {
                for &e in &tied {
                    y[e] = rest * own[e] / weight;
                }
            } else {
                let first = priority.iter().copied().find(|e| tied.contains(e)).unwrap_or(tied[0]);
                y[first] = rest;
            }
            return y;
        }
    }
    let lo = sloped.iter().map(|&e| costs[e].eval(g[e])).fold(f64::INFINITY, f64::min);
    let mut hi = sloped
        .iter()
        .map(|&e| costs[e].eval(g[e] + m))
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some(kstar) = level {
        hi = hi.min(kstar);
    }
    let pi = root_nondecreasing(|p| absorbed(p) - m, lo, hi);
    let mut total = 0.0;
    for &e in &sloped {
        y[e] = fill(e, pi);
        total += y[e];
    }
    if total > 0.0 {
        for v in &mut y {
            *v *= m / total;
        }
    }
    y
}

/// Two-link equilibrium by bisection on the aggregate flow `f` of link 0.
///
/// Class `c` prefers link 0 exactly when `D_c(f) = j_c0(f) − j_c1(1 − f) < 0`,
/// and `D_c` is non-decreasing, so `f − z − mass{c : D_c(f) < 0}` is
/// increasing. `z` is the link-0 mass of classes that are indifferent
/// everywhere (both links flat at the same level); their split is taken from
/// the starting point.
fn two_link(costs: &[Vec<Polynomial>], masses: &[f64], init: &[Vec<f64>]) -> (Vec<Vec<f64>>, usize) {
    let d = |c: usize, f: f64| costs[c][0].eval(f) - costs[c][1].eval(1.0 - f);
    let free: Vec<bool> = costs
        .iter()
        .map(|cc| {
            cc[0].is_constant() && cc[1].is_constant() && (cc[0].coeff(0) - cc[1].coeff(0)).abs() <= TIE
        })
        .collect();
    let share = |c: usize| {
        let s = init[c][0] + init[c][1];
        if s > 0.0 {
            init[c][0] / s
        } else {
            0.5
        }
    };
    let classes = masses.len();
    let z: f64 = (0..classes).filter(|&c| free[c]).map(|c| masses[c] * share(c)).sum();
    let h = |f: f64| {
        f - z - (0..classes)
            .filter(|&c| !free[c] && masses[c] > 0.0 && d(c, f) < 0.0)
            .map(|c| masses[c])
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut iters = 0;
    if h(0.0) >= 0.0 {
        hi = 0.0;
    } else {
        while iters < 200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            iters += 1;
        }
    }
    let mut x = vec![vec![0.0; 2]; classes];
    let (mut on_first, mut crossing) = (0.0, 0.0);
    let mut crossers = Vec::new();
    for c in 0..classes {
        let m = masses[c];
        if free[c] {
            x[c] = vec![m * share(c), m * (1.0 - share(c))];
        } else if d(c, hi) < 0.0 {
            x[c][0] = m;
            on_first += m;
        } else if d(c, lo) > 0.0 {
            x[c][1] = m;
        } else {
            crossers.push(c);
            crossing += m;
        }
    }
    let target = (0.5 * (lo + hi)).clamp(z + on_first, z + on_first + crossing);
    let w = target - z - on_first;
    for c in crossers {
        let part = if crossing > 0.0 { w * masses[c] / crossing } else { 0.0 };
        x[c] = vec![part, masses[c] - part];
    }
    (x, iters.max(1))
}
