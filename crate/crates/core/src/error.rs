use num_complex::Complex64;
use std::fmt;

/// Diagnostic attached to a failed tail probe on an infinite integration range.
#[derive(Clone, Debug, PartialEq)]
pub struct TailDiagnostic {
    /// Truncation point reached when the engine gave up.
    pub truncation: f64,
    /// Estimated magnitude of the omitted tail.
    pub tail_estimate: f64,
    /// Ratio of the two outermost panel magnitudes (1.0 or more means no decay).
    pub decay_ratio: f64,
    /// Fitted power-law exponent of the panel magnitudes, when one could be formed.
    pub power_exponent: Option<f64>,
}

impl fmt::Display for TailDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "truncation={:.3}, tail_estimate={:.3e}, decay_ratio={:.4}",
            self.truncation, self.tail_estimate, self.decay_ratio
        )?;
        if let Some(p) = self.power_exponent {
            write!(f, ", power_exponent={p:.3}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum Error {
    #[error("argument {at} is within {margin:e} of a pole")]
    Pole { at: Complex64, margin: f64 },

    #[error("outside supported envelope: {0}")]
    Envelope(String),

    #[error("series did not converge within {terms} terms")]
    SeriesDivergence { terms: usize },

    #[error("series with {p} numerator(s) and {q} denominator(s) diverges for non-terminating parameters")]
    DivergentSeries { p: usize, q: usize },

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("refinement near the origin failed to stabilize: {0}")]
    EndpointSingularity(String),

    #[error("integrand tail decays too slowly ({0})")]
    SlowDecay(TailDiagnostic),

    #[error("integrand is not even: f({tau}) = {plus}, f(-{tau}) = {minus}")]
    Asymmetry {
        tau: f64,
        plus: Complex64,
        minus: Complex64,
    },

    #[error("{what}: Re z = {re} is outside ({lo}, {hi})")]
    Region {
        what: &'static str,
        re: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{what}: {value} is outside the strip ({lo}, {hi})")]
    Strip {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("function is not a member of the required space: {0}")]
    Membership(String),

    #[error("weighted norm diverges (truncated value {truncated:.6e}, growth ratio {growth:.4})")]
    Divergence { truncated: f64, growth: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
