use std::fmt;

use crate::error::{Error, Result};

/// Real polynomial `c₀ + c₁x + … + c_p x^p`, stored by ascending power.
///
/// Incentive functions use this type directly (coefficients of any sign);
/// latencies wrap it in [`LatencyFunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

/// Coefficients at or below this magnitude (relative to the largest one) are
/// treated as zero when classifying a polynomial as constant or affine.
const NEGLIGIBLE: f64 = 1e-14;

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `c·x^p`.
    pub fn monomial(c: f64, p: usize) -> Self {
        let mut coeffs = vec![0.0; p + 1];
        coeffs[p] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the highest non-zero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    #[inline]
    pub fn derivative_at(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + (i as f64) * c;
        }
        acc
    }

    /// `∫₀ˣ p(t) dt`.
    pub fn integral_at(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * x + c / (i as f64 + 1.0);
        }
        acc * x
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// `self + k·other`.
    pub fn add_scaled(&self, other: &Polynomial, k: f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + k * other.coeff(i)).collect();
        Self { coeffs }
    }

    /// `x·p'(x)`, i.e. `Σ i·cᵢ xⁱ`.
    pub fn x_times_derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| i as f64 * c)
                .collect(),
        }
    }

    fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// True when every non-constant coefficient is negligible.
    pub fn is_constant(&self) -> bool {
        let tol = NEGLIGIBLE * self.scale().max(1.0);
        self.coeffs.iter().skip(1).all(|c| c.abs() <= tol)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// `(slope, intercept)` when every coefficient above degree one is
    /// negligible.
    pub fn affine_parts(&self) -> Option<(f64, f64)> {
        let tol = NEGLIGIBLE * self.scale().max(1.0);
        if self.coeffs.iter().skip(2).all(|c| c.abs() <= tol) {
            Some((self.coeff(1), self.coeff(0)))
        } else {
            None
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if wrote {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
            } else if *c < 0.0 {
                write!(f, "-")?;
            }
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}·f")?,
                _ => write!(f, "{a}·f^{i}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Edge latency `ℓ(f) = Σ αᵢ fⁱ` with every `αᵢ ≥ 0`, hence non-negative and
/// non-decreasing on `f ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyFunction(Polynomial);

impl LatencyFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("coeffs", "latency needs at least one coefficient"));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::invalid(
                    format!("coeffs[{i}]"),
                    "non-finite latency coefficient",
                ));
            }
            if *c < 0.0 {
                return Err(Error::invalid(
                    format!("coeffs[{i}]"),
                    format!("negative latency coefficient {c}"),
                ));
            }
        }
        Ok(Self(Polynomial::new(coeffs)))
    }

    /// `a·f + b`.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![b, a])
    }

    /// `f^p`.
    pub fn monomial(p: usize) -> Self {
        Self(Polynomial::monomial(1.0, p))
    }

    pub fn constant(b: f64) -> Result<Self> {
        Self::new(vec![b])
    }

    pub fn poly(&self) -> &Polynomial {
        &self.0
    }

    pub fn coeffs(&self) -> &[f64] {
        self.0.coeffs()
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    #[inline]
    pub fn eval(&self, f: f64) -> f64 {
        self.0.eval(f)
    }

    pub fn affine_parts(&self) -> Option<(f64, f64)> {
        self.0.affine_parts()
    }
}

impl fmt::Display for LatencyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_negative_coefficients() {
        let err = LatencyFunction::new(vec![0.0, -1.0]).unwrap_err();
        assert!(err.to_string().contains("negative latency coefficient"));
        assert!(err.to_string().contains("coeffs[1]"));
    }

    #[test]
    fn evaluates_and_integrates() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 1.0 + 4.0 + 12.0);
        assert_eq!(p.derivative_at(2.0), 2.0 + 12.0);
        assert!((p.integral_at(2.0) - (2.0 + 4.0 + 8.0)).abs() < 1e-12);
        assert_eq!(p.x_times_derivative().coeffs(), &[0.0, 2.0, 6.0]);
    }

    #[test]
    fn zero_at_origin_is_constant_term() {
        let l = LatencyFunction::new(vec![0.7, 1.0, 2.0]).unwrap();
        assert_eq!(l.eval(0.0), 0.7);
    }

    #[test]
    fn classifies_shape() {
        assert!(Polynomial::constant(3.0).is_constant());
        assert!(Polynomial::new(vec![1.0, 1e-18]).is_constant());
        assert_eq!(Polynomial::new(vec![3.0, 2.0, 0.0]).affine_parts(), Some((2.0, 3.0)));
        assert_eq!(Polynomial::monomial(1.0, 2).affine_parts(), None);
    }

    proptest! {
        #[test]
        fn nonnegative_coefficients_give_monotone_latency(
            coeffs in proptest::collection::vec(0.0f64..5.0, 1..5)
        ) {
            let l = LatencyFunction::new(coeffs).unwrap();
            let mut prev = l.eval(0.0);
            prop_assert!(prev >= 0.0);
            for k in 1..=200 {
                let v = l.eval(k as f64 / 200.0);
                prop_assert!(v >= prev);
                prev = v;
            }
        }
    }
}
