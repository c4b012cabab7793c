use super::Mechanism;
use crate::error::Result;
use crate::netmodel::LatencyFunction;

const GRID: usize = 1000;
const SIGN_TOL: f64 = 1e-12;
const TIGHT_TOL: f64 = 1e-9;

/// Empirical sign and size of a mechanism over a set of latency functions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `τ ≥ 0` everywhere.
    pub is_toll: bool,
    /// `τ ≤ 0` everywhere.
    pub is_subsidy: bool,
    /// Smallest `β` with `|τ(f)| ≤ β·ℓ(f)` on `[0, 1]`; infinite when the
    /// incentive is non-zero where the latency vanishes.
    pub tight_bound: f64,
    /// Whether the declared bound (or `tight_bound` if none is declared) is
    /// attained somewhere. Always false for a zero bound.
    pub tight: bool,
}

/// Evaluates `mechanism` on every latency over a 1001-point grid on `[0, 1]`.
///
/// For affine latencies and incentives the ratio `|τ|/ℓ` is monotone in `f`,
/// so its extremes sit at the endpoints and the grid is exact.
pub fn classify_bound(mechanism: &Mechanism, latencies: &[LatencyFunction]) -> Result<BoundReport> {
    let mut is_toll = true;
    let mut is_subsidy = true;
    let mut beta: f64 = 0.0;
    let mut samples = Vec::new();
    for l in latencies {
        let tau = mechanism.apply(l)?;
        for k in 0..=GRID {
            let f = k as f64 / GRID as f64;
            let (t, lf) = (tau.eval(f), l.eval(f));
            is_toll &= t >= -SIGN_TOL;
            is_subsidy &= t <= SIGN_TOL;
            if lf > 0.0 {
                beta = beta.max(t.abs() / lf);
                samples.push((t.abs(), lf));
            } else if t.abs() > SIGN_TOL {
                beta = f64::INFINITY;
            }
        }
    }
    let target = mechanism.declared_bound().unwrap_or(beta);
    let tight = target > 0.0
        && target.is_finite()
        && samples.iter().any(|&(t, lf)| t >= target * lf - TIGHT_TOL);
    Ok(BoundReport { is_toll, is_subsidy, tight_bound: beta, tight })
}
