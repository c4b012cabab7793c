//! Incentive mechanisms: maps from an edge latency function to the toll
//! (non-negative) or subsidy (non-positive) charged on that edge.
//!
//! Mechanisms are kept symbolic. Applying one to a polynomial latency gives a
//! polynomial incentive, and [`affine_transform`] stays inside that class, so
//! nominally equivalent mechanisms can be evaluated exactly.

mod bounds;
mod parse;

use std::fmt;

pub use bounds::{classify_bound, BoundReport};

use crate::error::{Error, Result};
use crate::netmodel::{LatencyFunction, Polynomial};

#[derive(Debug, Clone, PartialEq)]
pub enum Mechanism {
    /// No incentive.
    None,
    /// `τ(f) = f·ℓ'(f)`.
    MarginalCost,
    /// Optimal toll for affine latencies under the bound `τ ≤ β·ℓ`.
    OptBoundedToll { beta: f64 },
    /// Optimal subsidy for affine latencies under the bound `|τ| ≤ β·ℓ`.
    OptBoundedSubsidy { beta: f64 },
    /// Marginal-cost toll on the congestion term scaled by `1/√(s_L·s_U)`.
    ScaledMarginalCost { s_low: f64, s_high: f64 },
    /// Subsidy on the constant term, nominally equivalent to
    /// [`Mechanism::ScaledMarginalCost`].
    NominallyEquivalentSubsidy { s_low: f64, s_high: f64 },
    /// `λ·T(ℓ) + (λ − 1)·ℓ`.
    AffineTransform { base: Box<Mechanism>, lambda: f64 },
}

impl Mechanism {
    pub fn opt_bounded_toll(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::OptBoundedToll { beta })
    }

    pub fn opt_bounded_subsidy(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::OptBoundedSubsidy { beta })
    }

    pub fn scaled_marginal_cost(s_low: f64, s_high: f64) -> Result<Self> {
        check_bounds(s_low, s_high)?;
        Ok(Self::ScaledMarginalCost { s_low, s_high })
    }

    pub fn nominally_equivalent_subsidy(s_low: f64, s_high: f64) -> Result<Self> {
        check_bounds(s_low, s_high)?;
        Ok(Self::NominallyEquivalentSubsidy { s_low, s_high })
    }

    /// Incentive function this mechanism assigns to latency `l`.
    pub fn apply(&self, l: &LatencyFunction) -> Result<Polynomial> {
        match self {
            Mechanism::None => Ok(Polynomial::zero()),
            Mechanism::MarginalCost => Ok(marginal_cost(l)),
            Mechanism::OptBoundedToll { beta } => opt_bounded_toll_affine(l, *beta),
            Mechanism::OptBoundedSubsidy { beta } => opt_bounded_subsidy_affine(l, *beta),
            Mechanism::ScaledMarginalCost { s_low, s_high } => {
                scaled_marginal_cost(l, *s_low, *s_high)
            }
            Mechanism::NominallyEquivalentSubsidy { s_low, s_high } => {
                nominally_equivalent_subsidy(l, *s_low, *s_high)
            }
            Mechanism::AffineTransform { base, lambda } => {
                let t = base.apply(l)?;
                Ok(t.scaled(*lambda).add_scaled(l.poly(), lambda - 1.0))
            }
        }
    }

    /// Bound `β` the mechanism is constructed to respect, where it has one.
    pub fn declared_bound(&self) -> Option<f64> {
        match self {
            Mechanism::None => Some(0.0),
            Mechanism::OptBoundedToll { beta } | Mechanism::OptBoundedSubsidy { beta } => {
                Some(*beta)
            }
            _ => None,
        }
    }

    /// Parses the CLI mechanism syntax, e.g. `toll:β=0.5` or
    /// `xform(smc:sL=1,sU=4,λ=0.5)`.
    pub fn parse(text: &str) -> Result<Self> {
        parse::parse_mechanism(text)
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::None => write!(f, "none"),
            Mechanism::MarginalCost => write!(f, "mc"),
            Mechanism::OptBoundedToll { beta } => write!(f, "toll:β={beta}"),
            Mechanism::OptBoundedSubsidy { beta } => write!(f, "subsidy:β={beta}"),
            Mechanism::ScaledMarginalCost { s_low, s_high } => {
                write!(f, "smc:sL={s_low},sU={s_high}")
            }
            Mechanism::NominallyEquivalentSubsidy { s_low, s_high } => {
                write!(f, "nes:sL={s_low},sU={s_high}")
            }
            Mechanism::AffineTransform { base, lambda } => write!(f, "xform({base},λ={lambda})"),
        }
    }
}

impl std::str::FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::parameter("beta", format!("must be finite and ≥ 0, got {beta}")));
    }
    Ok(())
}

fn check_bounds(s_low: f64, s_high: f64) -> Result<()> {
    if !(s_low.is_finite() && s_high.is_finite() && s_low > 0.0 && s_high >= s_low) {
        return Err(Error::parameter(
            "sensitivity bounds",
            format!("need 0 < s_L <= s_U, got s_L = {s_low}, s_U = {s_high}"),
        ));
    }
    Ok(())
}

fn affine_parts(l: &LatencyFunction) -> Result<(f64, f64)> {
    l.affine_parts()
        .ok_or_else(|| Error::LatencyClass(format!("mechanism requires an affine latency, got {l}")))
}

/// Grid check that `τ` keeps its sign and stays within `β·ℓ` on `[0, 1]`.
fn check_bounded(tau: &Polynomial, l: &LatencyFunction, beta: f64, toll: bool) -> Result<()> {
    for k in 0..=1000 {
        let f = k as f64 / 1000.0;
        let t = tau.eval(f);
        let cap = beta * l.eval(f) + 1e-12;
        let ok = if toll { t >= -1e-12 && t <= cap } else { t <= 1e-12 && -t <= cap };
        if !ok {
            return Err(Error::Domain(format!(
                "incentive {tau} leaves the β = {beta} bound of {l} at f = {f}"
            )));
        }
    }
    Ok(())
}

/// `τ(f) = f·ℓ'(f)`; for `ℓ = Σ αᵢ fⁱ` this is `Σ i·αᵢ fⁱ`.
pub fn marginal_cost(l: &LatencyFunction) -> Polynomial {
    l.poly().x_times_derivative()
}

/// `β·a·f` for `β < 1`, `a·f` for `β ≥ 1`, on `ℓ = a·f + b`.
pub fn opt_bounded_toll_affine(l: &LatencyFunction, beta: f64) -> Result<Polynomial> {
    check_beta(beta)?;
    let (a, _) = affine_parts(l)?;
    let tau = Polynomial::new(vec![0.0, beta.min(1.0) * a]);
    check_bounded(&tau, l, beta, true)?;
    Ok(tau)
}

/// `−β·b` for `β < 1/2`, `−b/2` for `β ≥ 1/2`, on `ℓ = a·f + b`.
pub fn opt_bounded_subsidy_affine(l: &LatencyFunction, beta: f64) -> Result<Polynomial> {
    check_beta(beta)?;
    let (_, b) = affine_parts(l)?;
    let tau = Polynomial::constant(-beta.min(0.5) * b);
    check_bounded(&tau, l, beta, false)?;
    Ok(tau)
}

/// `a·f / √(s_L·s_U)` on `ℓ = a·f + b`.
pub fn scaled_marginal_cost(l: &LatencyFunction, s_low: f64, s_high: f64) -> Result<Polynomial> {
    check_bounds(s_low, s_high)?;
    let (a, _) = affine_parts(l)?;
    Ok(Polynomial::new(vec![0.0, a / (s_low * s_high).sqrt()]))
}

/// `−b / (1 + √(s_L·s_U))` on `ℓ = a·f + b`.
pub fn nominally_equivalent_subsidy(
    l: &LatencyFunction,
    s_low: f64,
    s_high: f64,
) -> Result<Polynomial> {
    check_bounds(s_low, s_high)?;
    let (_, b) = affine_parts(l)?;
    Ok(Polynomial::constant(-b / (1.0 + (s_low * s_high).sqrt())))
}

/// The nominally equivalent mechanism `λ·T(ℓ) + (λ − 1)·ℓ`.
///
/// Nested transforms collapse: transforming by `λ₁` then `λ₂` is the
/// transform by `λ₁λ₂`.
pub fn affine_transform(mechanism: &Mechanism, lambda: f64) -> Result<Mechanism> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::parameter("lambda", format!("must be > 0, got {lambda}")));
    }
    Ok(match mechanism {
        Mechanism::AffineTransform { base, lambda: inner } => Mechanism::AffineTransform {
            base: base.clone(),
            lambda: inner * lambda,
        },
        other => Mechanism::AffineTransform {
            base: Box::new(other.clone()),
            lambda,
        },
    })
}

/// `g(s, λ) = s / (λ + s − s·λ)`: the sensitivity under which the
/// `λ`-transformed mechanism reproduces the preferences that sensitivity `s`
/// has under the original one.
pub fn sensitivity_map(s: f64, lambda: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Domain(format!("sensitivity must be ≥ 0, got {s}")));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("λ must lie in (0, 1], got {lambda}")));
    }
    let denom = lambda + s - s * lambda;
    if denom <= 0.0 {
        return Err(Error::Domain(format!("g({s}, {lambda}) has non-positive denominator")));
    }
    Ok(s / denom)
}

/// Transform factor turning a toll bounded by `β` into a subsidy bounded by
/// `β` with the same homogeneous equilibria: `1 − β` below one, `1/(1 + β)`
/// from one on.
pub fn toll_to_subsidy_factor(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(if beta < 1.0 { 1.0 - beta } else { 1.0 / (1.0 + beta) })
}
