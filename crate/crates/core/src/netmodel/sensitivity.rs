use crate::error::{Error, Result};
use crate::incentives::sensitivity_map;
use crate::EPS_FEAS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityClass {
    /// Fraction of the total population.
    pub mass: f64,
    /// Multiplier applied to incentives in this class's observed cost.
    pub s: f64,
}

/// Finitely many sensitivity classes approximating a sensitivity
/// distribution with values in `[s_low, s_high]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityModel {
    classes: Vec<SensitivityClass>,
    bounds: (f64, f64),
}

impl SensitivityModel {
    pub fn new(classes: Vec<SensitivityClass>, bounds: (f64, f64)) -> Result<Self> {
        let (lo, hi) = bounds;
        if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
            return Err(Error::invalid(
                "sensitivity.bounds",
                format!("bounds must satisfy 0 < s_L <= s_U, got [{lo}, {hi}]"),
            ));
        }
        if classes.is_empty() {
            return Err(Error::invalid("sensitivity.classes", "at least one class required"));
        }
        let mut total = 0.0;
        for (i, c) in classes.iter().enumerate() {
            if !c.mass.is_finite() || c.mass < 0.0 {
                return Err(Error::invalid(
                    format!("sensitivity.classes[{i}].mass"),
                    "class mass must be non-negative",
                ));
            }
            if !c.s.is_finite() || c.s < lo - EPS_FEAS || c.s > hi + EPS_FEAS {
                return Err(Error::invalid(
                    format!("sensitivity.classes[{i}].s"),
                    format!("sensitivity {} outside bounds [{lo}, {hi}]", c.s),
                ));
            }
            total += c.mass;
        }
        if (total - 1.0).abs() > EPS_FEAS {
            return Err(Error::invalid(
                "sensitivity.classes",
                format!("sensitivity masses sum ≠ 1 (got {total})"),
            ));
        }
        Ok(Self { classes, bounds })
    }

    /// Single class with `s = 1`.
    pub fn homogeneous() -> Self {
        Self {
            classes: vec![SensitivityClass { mass: 1.0, s: 1.0 }],
            bounds: (1.0, 1.0),
        }
    }

    /// Mass `mass_low` at `s_low`, the rest at `s_high`; empty classes are
    /// omitted.
    pub fn two_class(mass_low: f64, s_low: f64, s_high: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mass_low) {
            return Err(Error::parameter("mass_low", "must lie in [0, 1]"));
        }
        let classes = [
            SensitivityClass {
                mass: mass_low,
                s: s_low,
            },
            SensitivityClass {
                mass: 1.0 - mass_low,
                s: s_high,
            },
        ]
        .into_iter()
        .filter(|c| c.mass > 0.0)
        .collect();
        Self::new(classes, (s_low, s_high))
    }

    pub fn classes(&self) -> &[SensitivityClass] {
        &self.classes
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }

    pub fn is_homogeneous(&self) -> bool {
        self.classes.len() == 1 && self.classes[0].s == 1.0
    }

    /// Sensitivities `g(s, λ)` for every class, with the bounds mapped the
    /// same way (`g` is increasing in `s`).
    pub fn mapped(&self, lambda: f64) -> Result<Self> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                Ok(SensitivityClass {
                    mass: c.mass,
                    s: sensitivity_map(c.s, lambda)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let bounds = (
            sensitivity_map(self.bounds.0, lambda)?,
            sensitivity_map(self.bounds.1, lambda)?,
        );
        Self::new(classes, bounds)
    }
}
