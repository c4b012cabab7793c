use rayon::prelude::*;

use super::{two_link_affine, PoAReport};
use crate::equilibrium::{optimal_flow, worst_case_nash, SolverParams};
use crate::error::{Error, Result};
use crate::incentives::Mechanism;
use crate::netmodel::{GameInstance, SensitivityModel};

/// Grid over two-link affine instances `ℓᵢ = aᵢ·f + bᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineGrid {
    /// Points per coefficient, evenly spaced on `[0, max]`.
    pub points: usize,
    pub max: f64,
    /// Low-class mass fractions `0, 1/(n−1), …, 1` for two-class searches.
    pub mass_splits: usize,
    /// Keep only equilibria that use both links.
    pub fully_utilized_only: bool,
}

impl Default for AffineGrid {
    fn default() -> Self {
        Self {
            points: 21,
            max: 2.0,
            mass_splits: 11,
            fully_utilized_only: false,
        }
    }
}

impl AffineGrid {
    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::parameter("grid points", "need at least 2"));
        }
        if !(self.max > 0.0 && self.max.is_finite()) {
            return Err(Error::parameter("grid max", "must be positive"));
        }
        if self.mass_splits < 2 {
            return Err(Error::parameter("mass splits", "need at least 2"));
        }
        Ok(())
    }

    fn value(&self, i: usize) -> f64 {
        self.max * i as f64 / (self.points - 1) as f64
    }
}

/// Sensitivity classes used at every grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensitivitySpec {
    /// One class with `s = 1`.
    Homogeneous,
    /// Classes `s_low` and `s_high` with every grid mass split.
    TwoClass { s_low: f64, s_high: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    /// Mass of the low-sensitivity class (1 when homogeneous).
    pub mass_low: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridReport {
    /// Largest PoA found; `None` if no point could be evaluated.
    pub worst: Option<PoAReport>,
    pub argmax: Option<GridPoint>,
    /// Instances whose PoA entered the maximum.
    pub evaluated: usize,
    /// Instances skipped because their optimal latency is zero.
    pub excluded_zero_opt: usize,
    /// Instances skipped by the fully-utilized filter.
    pub excluded_not_utilized: usize,
    /// Instances where a solver did not converge; they are left out.
    pub uncertified: usize,
    /// Largest certificate gap among the evaluated instances.
    pub max_gap: f64,
}

impl GridReport {
    /// Supremum found, or NaN when nothing was evaluated.
    pub fn sup(&self) -> f64 {
        self.worst.as_ref().map_or(f64::NAN, |w| w.poa)
    }
}

#[derive(Default)]
struct Partial {
    best: Option<(PoAReport, GridPoint)>,
    evaluated: usize,
    zero_opt: usize,
    not_utilized: usize,
    uncertified: usize,
    max_gap: f64,
}

/// Largest PoA of `mechanism` over two-link affine instances on `grid`.
///
/// Swapping the two links gives the same game, so only points with
/// `(a₁, b₁) ≤ (a₂, b₂)` are visited. Each point uses the worst equilibrium
/// from [`worst_case_nash`] without random restarts. The result is a lower
/// bound on the supremum over all affine two-link games.
pub fn affine_worstcase_search(
    mechanism: &Mechanism,
    sensitivity: &SensitivitySpec,
    grid: &AffineGrid,
    params: &SolverParams,
) -> Result<GridReport> {
    grid.validate()?;
    let models: Vec<(f64, SensitivityModel)> = match *sensitivity {
        SensitivitySpec::Homogeneous => vec![(1.0, SensitivityModel::homogeneous())],
        SensitivitySpec::TwoClass { s_low, s_high } => (0..grid.mass_splits)
            .map(|j| {
                let m = j as f64 / (grid.mass_splits - 1) as f64;
                SensitivityModel::two_class(m, s_low, s_high).map(|s| (m, s))
            })
            .collect::<Result<_>>()?,
    };
    let n = grid.points;
    let mut coords = Vec::new();
    for i1 in 0..n {
        for j1 in 0..n {
            for i2 in i1..n {
                for j2 in 0..n {
                    if i2 == i1 && j2 < j1 {
                        continue;
                    }
                    coords.push([i1, j1, i2, j2]);
                }
            }
        }
    }
    let parts: Vec<Result<Partial>> = coords
        .par_iter()
        .map(|c| {
            let (a1, b1, a2, b2) = (grid.value(c[0]), grid.value(c[1]), grid.value(c[2]), grid.value(c[3]));
            evaluate_point(mechanism, &models, grid, params, [a1, b1, a2, b2])
        })
        .collect();

    let mut total = Partial::default();
    for part in parts {
        let p = part?;
        total.evaluated += p.evaluated;
        total.zero_opt += p.zero_opt;
        total.not_utilized += p.not_utilized;
        total.uncertified += p.uncertified;
        total.max_gap = total.max_gap.max(p.max_gap);
        if let Some((r, pt)) = p.best {
            if total.best.as_ref().map_or(true, |(b, _)| r.poa > b.poa) {
                total.best = Some((r, pt));
            }
        }
    }
    let (worst, argmax) = match total.best {
        Some((r, p)) => (Some(r), Some(p)),
        None => (None, None),
    };
    Ok(GridReport {
        worst,
        argmax,
        evaluated: total.evaluated,
        excluded_zero_opt: total.zero_opt,
        excluded_not_utilized: total.not_utilized,
        uncertified: total.uncertified,
        max_gap: total.max_gap,
    })
}

fn evaluate_point(
    mechanism: &Mechanism,
    models: &[(f64, SensitivityModel)],
    grid: &AffineGrid,
    params: &SolverParams,
    [a1, b1, a2, b2]: [f64; 4],
) -> Result<Partial> {
    let mut out = Partial::default();
    let problem = two_link_affine(a1, b1, a2, b2)?;
    let opt = match optimal_flow(&problem, params) {
        Ok(o) => o,
        Err(Error::Convergence(_)) => {
            out.uncertified += models.len();
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    if !(opt.total_latency > 0.0) {
        out.zero_opt += models.len();
        return Ok(out);
    }
    for (mass_low, model) in models {
        let game = GameInstance::with_mechanism(problem.clone(), model.clone(), mechanism)?;
        let nash = match worst_case_nash(&game, 0, 0, params) {
            Ok(n) => n,
            Err(Error::Convergence(_)) => {
                out.uncertified += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if grid.fully_utilized_only && !nash.fully_utilized {
            out.not_utilized += 1;
            continue;
        }
        out.evaluated += 1;
        out.max_gap = out.max_gap.max(nash.vi_gap).max(opt.vi_gap);
        let poa = nash.total_latency / opt.total_latency;
        if out.best.as_ref().map_or(true, |(b, _)| poa > b.poa) {
            let report = PoAReport {
                instance_id: format!("a1={a1},b1={b1},a2={a2},b2={b2},mass_low={mass_low}"),
                nash_latency: nash.total_latency,
                opt_latency: opt.total_latency,
                poa,
                mechanism: mechanism.to_string(),
                s_bounds: model.bounds(),
                nash_gap: nash.vi_gap,
                opt_gap: opt.vi_gap,
                fully_utilized: nash.fully_utilized,
            };
            let point = GridPoint { a1, b1, a2, b2, mass_low: *mass_low };
            out.best = Some((report, point));
        }
    }
    Ok(out)
}
