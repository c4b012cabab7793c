use crate::error::{Error, Result};

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("β must be finite and ≥ 0, got {beta}")));
    }
    Ok(())
}

/// Worst-case PoA of affine games under the optimal toll bounded by `β`:
/// `4 / (3 + 2β − β²)` below one, `1` from one on.
pub fn affine_toll_poa_formula(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(if beta < 1.0 {
        4.0 / (3.0 + 2.0 * beta - beta * beta)
    } else {
        1.0
    })
}

/// Worst-case PoA of affine games under the optimal subsidy bounded by `β`:
/// the toll value at `β̂ = 1/(1 − β) − 1` below one half, `1` from one half on.
pub fn affine_subsidy_poa_formula(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if beta < 0.5 {
        affine_toll_poa_formula(1.0 / (1.0 - beta) - 1.0)
    } else {
        Ok(1.0)
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("q must lie in (0, 1], got {q}")));
    }
    Ok(())
}

/// PoA of the scaled marginal-cost toll on fully-utilized parallel affine
/// games with heterogeneity `q = s_L/s_U`: `(4/3)(1 − √q/(1 + √q)²)`.
pub fn smc_poa_formula(q: f64) -> Result<f64> {
    check_q(q)?;
    let t = q.sqrt();
    Ok(4.0 / 3.0 * (1.0 - t / ((1.0 + t) * (1.0 + t))))
}

/// PoA of the nominally equivalent subsidy: the scaled marginal-cost value
/// at the effective heterogeneity `q̂ = λq / (1 − q + λq)`, with
/// `λ = √(s_L s_U) / (1 + √(s_L s_U))`.
pub fn nes_poa_formula(s_low: f64, s_high: f64) -> Result<f64> {
    if !(s_low > 0.0 && s_high >= s_low && s_high.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < s_L <= s_U, got s_L = {s_low}, s_U = {s_high}"
        )));
    }
    let q = s_low / s_high;
    let r = (s_low * s_high).sqrt();
    let lambda = r / (1.0 + r);
    let q_hat = lambda * q / (1.0 - q + lambda * q);
    debug_assert!(q_hat <= q * (1.0 + 1e-12));
    smc_poa_formula(q_hat)
}
