//! Tables behind the experiment commands: bounded incentives on polynomial
//! Pigou networks, affine formulas against grid suprema, and the toll versus
//! subsidy comparisons with and without heterogeneity.

use crate::equilibrium::SolverParams;
use crate::error::{Error, Result};
use crate::incentives::Mechanism;
use crate::netmodel::{GameInstance, Polynomial, SensitivityModel};
use crate::poa::{
    affine_subsidy_poa_formula, affine_toll_poa_formula, affine_worstcase_search,
    nes_poa_formula, pigou_generator, poa_instance, smc_poa_formula, AffineGrid, GridReport,
    SensitivitySpec,
};
use crate::EPS_EQ;

/// Slack allowed when comparing two empirical suprema.
pub const COMPARE_TOL: f64 = 10.0 * EPS_EQ;

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Row {
    pub beta: f64,
    /// PoA under the bounded toll, one entry per degree `1..=p_max`.
    pub toll: Vec<f64>,
    pub subsidy: Vec<f64>,
    pub toll_sup: f64,
    pub subsidy_sup: f64,
    pub max_gap: f64,
}

/// Pigou networks `f^p | 1` for `p = 1..=p_max` under incentives bounded by
/// `β`.
///
/// The toll charges `min(β, p)·f^p` on the polynomial link; `p` is where it
/// reaches the marginal-cost toll. The subsidy pays `min(β, p/(p+1))` on the
/// constant link, where `p/(p+1)` already routes optimally.
pub fn fig1(
    betas: &[f64],
    p_max: usize,
    restarts: usize,
    seed: u64,
    params: &SolverParams,
) -> Result<Vec<Fig1Row>> {
    if p_max < 1 {
        return Err(Error::parameter("p_max", "must be at least 1"));
    }
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        if !(beta >= 0.0) {
            return Err(Error::parameter("beta", format!("must be ≥ 0, got {beta}")));
        }
        let mut row = Fig1Row {
            beta,
            toll: Vec::new(),
            subsidy: Vec::new(),
            toll_sup: f64::NEG_INFINITY,
            subsidy_sup: f64::NEG_INFINITY,
            max_gap: 0.0,
        };
        for p in 1..=p_max {
            let problem = pigou_generator(p)?;
            let pf = p as f64;
            let toll = GameInstance::new(
                problem.clone(),
                SensitivityModel::homogeneous(),
                vec![Polynomial::monomial(beta.min(pf), p), Polynomial::zero()],
            )?;
            let subsidy = GameInstance::new(
                problem,
                SensitivityModel::homogeneous(),
                vec![Polynomial::zero(), Polynomial::constant(-beta.min(pf / (pf + 1.0)))],
            )?;
            let t = poa_instance(&toll, restarts, seed, params)?;
            let s = poa_instance(&subsidy, restarts, seed, params)?;
            row.max_gap = row.max_gap.max(t.nash_gap).max(s.nash_gap).max(t.opt_gap);
            row.toll_sup = row.toll_sup.max(t.poa);
            row.subsidy_sup = row.subsidy_sup.max(s.poa);
            row.toll.push(t.poa);
            row.subsidy.push(s.poa);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2aRow {
    pub beta: f64,
    pub toll_formula: f64,
    pub subsidy_formula: f64,
    pub toll: GridReport,
    pub subsidy: GridReport,
}

/// Closed-form and grid-search PoA of the optimal bounded toll and subsidy.
pub fn fig2a(betas: &[f64], grid: &AffineGrid, params: &SolverParams) -> Result<Vec<Fig2aRow>> {
    betas
        .iter()
        .map(|&beta| {
            Ok(Fig2aRow {
                beta,
                toll_formula: affine_toll_poa_formula(beta)?,
                subsidy_formula: affine_subsidy_poa_formula(beta)?,
                toll: affine_worstcase_search(
                    &Mechanism::opt_bounded_toll(beta)?,
                    &SensitivitySpec::Homogeneous,
                    grid,
                    params,
                )?,
                subsidy: affine_worstcase_search(
                    &Mechanism::opt_bounded_subsidy(beta)?,
                    &SensitivitySpec::Homogeneous,
                    grid,
                    params,
                )?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2bRow {
    pub q: f64,
    pub s_low: f64,
    pub s_high: f64,
    pub smc_formula: f64,
    pub nes_formula: f64,
    pub smc: GridReport,
    pub nes: GridReport,
}

/// Scaled marginal-cost toll against its nominally equivalent subsidy with
/// two classes `s_low` and `s_low/q`.
pub fn fig2b(
    qs: &[f64],
    s_low: f64,
    grid: &AffineGrid,
    params: &SolverParams,
) -> Result<Vec<Fig2bRow>> {
    qs.iter()
        .map(|&q| {
            let smc_formula = smc_poa_formula(q)?;
            let s_high = s_low / q;
            let spec = SensitivitySpec::TwoClass { s_low, s_high };
            Ok(Fig2bRow {
                q,
                s_low,
                s_high,
                smc_formula,
                nes_formula: nes_poa_formula(s_low, s_high)?,
                smc: affine_worstcase_search(
                    &Mechanism::scaled_marginal_cost(s_low, s_high)?,
                    &spec,
                    grid,
                    params,
                )?,
                nes: affine_worstcase_search(
                    &Mechanism::nominally_equivalent_subsidy(s_low, s_high)?,
                    &spec,
                    grid,
                    params,
                )?,
            })
        })
        .collect()
}

/// One grid point of a toll-versus-subsidy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremRow {
    /// `β` for the homogeneous comparison, `q` for the heterogeneous one.
    pub param: f64,
    pub toll_beta: f64,
    pub subsidy_beta: f64,
    pub toll: GridReport,
    pub subsidy: GridReport,
    /// Amount by which the inequality holds; negative means violated.
    pub margin: f64,
    pub pass: bool,
}

/// Homogeneous users: the optimal subsidy bounded by `β` should do no worse
/// than the optimal toll with the same bound. `margin = toll − subsidy`;
/// a row passes when the margin reaches `min_margin` up to [`COMPARE_TOL`].
pub fn theorem1_check(
    betas: &[f64],
    grid: &AffineGrid,
    min_margin: f64,
    params: &SolverParams,
) -> Result<Vec<TheoremRow>> {
    betas
        .iter()
        .map(|&beta| {
            let toll = affine_worstcase_search(
                &Mechanism::opt_bounded_toll(beta)?,
                &SensitivitySpec::Homogeneous,
                grid,
                params,
            )?;
            let subsidy = affine_worstcase_search(
                &Mechanism::opt_bounded_subsidy(beta)?,
                &SensitivitySpec::Homogeneous,
                grid,
                params,
            )?;
            let margin = toll.sup() - subsidy.sup();
            Ok(TheoremRow {
                param: beta,
                toll_beta: beta,
                subsidy_beta: beta,
                pass: margin >= min_margin - COMPARE_TOL,
                toll,
                subsidy,
                margin,
            })
        })
        .collect()
}

/// Heterogeneous users with `s_L = 1`, `s_U = 1/q`: a toll bounded by `β⁺`
/// against the subsidy bounded by `β⁻ = β⁺/(1 + β⁺)`, which has the same
/// homogeneous PoA. `margin = subsidy − toll`, expected non-negative.
pub fn theorem2_check(
    qs: &[f64],
    beta_plus: f64,
    grid: &AffineGrid,
    params: &SolverParams,
) -> Result<Vec<TheoremRow>> {
    let beta_minus = beta_plus / (1.0 + beta_plus);
    qs.iter()
        .map(|&q| {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::Domain(format!("q must lie in (0, 1], got {q}")));
            }
            let spec = SensitivitySpec::TwoClass { s_low: 1.0, s_high: 1.0 / q };
            let toll = affine_worstcase_search(
                &Mechanism::opt_bounded_toll(beta_plus)?,
                &spec,
                grid,
                params,
            )?;
            let subsidy = affine_worstcase_search(
                &Mechanism::opt_bounded_subsidy(beta_minus)?,
                &spec,
                grid,
                params,
            )?;
            let margin = subsidy.sup() - toll.sup();
            Ok(TheoremRow {
                param: q,
                toll_beta: beta_plus,
                subsidy_beta: beta_minus,
                pass: margin >= -COMPARE_TOL,
                toll,
                subsidy,
                margin,
            })
        })
        .collect()
}
