//! Integration engines: semi-axis integrals, vertical-line (Mellin–Barnes)
//! contour integrals, symmetric whole-line index integrals, and finite
//! intervals.

mod gk;
mod line;
mod semi;

pub use gk::{integrate_interval, try_integrate_interval};
pub use line::{
    integrate_contour, integrate_symmetric_real_line, integrate_vertical_line,
    try_integrate_contour, try_integrate_real_line, try_integrate_symmetric_real_line,
    try_integrate_vertical_line, BentLine,
};
pub use semi::{integrate_log_axis, integrate_semi_axis, try_integrate_log_axis, try_integrate_semi_axis};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance, truncation and refinement budget for every integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// First truncation point: contour half-height, or semi-axis cut.
    pub initial_truncation: f64,
    pub truncation_growth: f64,
    pub max_truncation_steps: usize,
    /// Bisection depth per panel, and trapezoid halvings for the semi-axis engine.
    pub max_refinements: usize,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        QuadratureControl {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            initial_truncation: 20.0,
            truncation_growth: 1.5,
            max_truncation_steps: 12,
            max_refinements: 12,
        }
    }
}

impl QuadratureControl {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let c = QuadratureControl {
            abs_tol,
            rel_tol,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if !positive(self.initial_truncation) {
            return Err(Error::InvalidParameter(format!(
                "initial truncation {} must be positive",
                self.initial_truncation
            )));
        }
        if !(self.truncation_growth > 1.0 && self.truncation_growth <= 4.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation growth {} must lie in (1, 4]",
                self.truncation_growth
            )));
        }
        if self.max_truncation_steps == 0 || self.max_refinements == 0 {
            return Err(Error::InvalidParameter(
                "step and refinement caps must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The same control with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureControl {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            ..*self
        }
    }

    /// The same control with the given tolerances.
    pub fn with_tolerances(&self, abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureControl {
            abs_tol,
            rel_tol,
            ..*self
        }
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }
}

/// A vertical line Re s = abscissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerticalLine {
    pub abscissa: f64,
    /// Distance from the line to the nearest pole of the integrand.
    pub pole_clearance: f64,
}

/// Smallest pole clearance accepted by the vertical-line engine.
pub const MIN_POLE_CLEARANCE: f64 = 1e-6;

impl VerticalLine {
    pub fn new(abscissa: f64, pole_clearance: f64) -> Self {
        VerticalLine {
            abscissa,
            pole_clearance,
        }
    }

    /// Line whose clearance is the distance from `abscissa` to the nearest of `poles`.
    pub fn clear_of(abscissa: f64, poles: &[f64]) -> Self {
        let clearance = poles
            .iter()
            .map(|p| (abscissa - p).abs())
            .fold(f64::INFINITY, f64::min);
        VerticalLine::new(abscissa, clearance)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.abscissa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "abscissa {} is not finite",
                self.abscissa
            )));
        }
        if !(self.pole_clearance > MIN_POLE_CLEARANCE) {
            return Err(Error::Pole {
                at: Complex64::new(self.abscissa, 0.0),
                margin: self.pole_clearance,
            });
        }
        Ok(())
    }
}

/// Value of an integral with the engine's own accounting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    /// Estimated absolute error: discretization plus omitted tail.
    pub abs_error: f64,
    /// Final truncation point (0 when not applicable).
    pub truncation: f64,
    pub evaluations: usize,
}

fn check_finite(v: Complex64, what: &str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_invariants() {
        assert!(QuadratureControl::default().validate().is_ok());
        let mut c = QuadratureControl::default();
        c.truncation_growth = 1.0;
        assert!(c.validate().is_err());
        c.truncation_growth = 4.5;
        assert!(c.validate().is_err());
        c.truncation_growth = 4.0;
        assert!(c.validate().is_ok());
        assert!(QuadratureControl::new(0.0, 1e-10).is_err());
    }

    #[test]
    fn pole_clearance_is_required() {
        assert!(VerticalLine::new(0.5, 1e-7).validate().is_err());
        assert!(VerticalLine::clear_of(0.5, &[0.0, 1.0]).validate().is_ok());
        assert_eq!(VerticalLine::clear_of(0.3, &[0.0, 1.0]).pole_clearance, 0.3);
    }
}
