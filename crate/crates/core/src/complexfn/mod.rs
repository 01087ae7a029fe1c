//! Complex special functions: gamma, incomplete gamma, modified Bessel
//! functions and generalized hypergeometric series.

mod bessel;
mod gamma;
mod hyper;
mod incgamma;

pub use bessel::{bessel_i, bessel_i_with, bessel_k, bessel_k_checked, BesselK, BESSEL_K_MAX_IMAG_ORDER};
pub use gamma::{
    binomial, cos_pi_real, factorial, gamma, gamma_real, ln_sin_pi, log_gamma, reciprocal_gamma,
    sin_pi, sin_pi_real, POLE_MARGIN,
};
pub use hyper::generalized_hyp;
pub(crate) use hyper::non_positive_integer;
pub use incgamma::{exp_integral_e1, upper_incomplete_gamma, upper_incomplete_gamma_scaled, INCGAMMA_MAX_ORDER};

use crate::error::{Error, Result};

/// Tolerance and iteration caps for series and iterative evaluations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionBudget {
    pub target_abs_tol: f64,
    pub target_rel_tol: f64,
    pub max_terms: usize,
    pub max_refinements: usize,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget {
            target_abs_tol: 0.0,
            target_rel_tol: 1e-16,
            max_terms: 500,
            max_refinements: 12,
        }
    }
}

impl PrecisionBudget {
    pub fn new(
        target_abs_tol: f64,
        target_rel_tol: f64,
        max_terms: usize,
        max_refinements: usize,
    ) -> Result<Self> {
        let b = PrecisionBudget {
            target_abs_tol,
            target_rel_tol,
            max_terms,
            max_refinements,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.target_abs_tol) || !finite_nonneg(self.target_rel_tol) {
            return Err(Error::InvalidParameter(
                "tolerances must be finite and non-negative".into(),
            ));
        }
        if self.target_abs_tol == 0.0 && self.target_rel_tol == 0.0 {
            return Err(Error::InvalidParameter(
                "at least one tolerance must be positive".into(),
            ));
        }
        if self.max_terms < 16 {
            return Err(Error::InvalidParameter(format!(
                "max_terms = {} is below 16",
                self.max_terms
            )));
        }
        if self.max_refinements < 4 {
            return Err(Error::InvalidParameter(format!(
                "max_refinements = {} is below 4",
                self.max_refinements
            )));
        }
        Ok(())
    }

    /// True when a term of size `term_norm` no longer matters to a partial
    /// sum of size `sum_norm`.
    pub fn negligible(&self, term_norm: f64, sum_norm: f64) -> bool {
        term_norm <= self.target_abs_tol || term_norm <= self.target_rel_tol * sum_norm
    }
}
