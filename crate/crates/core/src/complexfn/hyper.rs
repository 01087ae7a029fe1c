use num_complex::Complex64;

use super::PrecisionBudget;
use crate::error::{Error, Result};

/// If `a` is a non-positive integer, returns n with a = -n.
pub(crate) fn non_positive_integer(a: Complex64) -> Option<u64> {
    if a.im != 0.0 || a.re > 0.0 {
        return None;
    }
    let n = a.re.round();
    if (a.re - n).abs() <= 1e-14 * n.abs().max(1.0) {
        Some((-n) as u64)
    } else {
        None
    }
}

/// Generalized hypergeometric series pFq(numerators; denominators; arg).
///
/// A non-positive integer numerator -n makes the series a polynomial of
/// n + 1 terms, summed exactly. Otherwise the series must have p <= q and is
/// truncated once three consecutive terms fall below the budget's tolerance
/// relative to the partial sum.
pub fn generalized_hyp(
    numerators: &[Complex64],
    denominators: &[Complex64],
    arg: Complex64,
    budget: &PrecisionBudget,
) -> Result<Complex64> {
    let terminating = numerators
        .iter()
        .filter_map(|&a| non_positive_integer(a))
        .min();

    let p = numerators.len();
    let q = denominators.len();
    if terminating.is_none() && p > q {
        return Err(Error::DivergentSeries { p, q });
    }

    // a denominator pole is harmless only if the series stops before reaching it
    for &b in denominators {
        if let Some(m) = non_positive_integer(b) {
            if terminating.map_or(true, |n| n >= m) {
                return Err(Error::Pole { at: b, margin: 1e-14 });
            }
        }
    }

    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);

    if let Some(n) = terminating {
        for k in 0..n {
            let kf = k as f64;
            let num: Complex64 = numerators.iter().map(|&a| a + kf).product();
            let den: Complex64 = denominators.iter().map(|&b| b + kf).product();
            term = term * num / den * arg / (kf + 1.0);
            sum += term;
        }
        return Ok(sum);
    }

    let mut small_run = 0;
    for k in 0..budget.max_terms {
        let kf = k as f64;
        let num: Complex64 = numerators.iter().map(|&a| a + kf).product();
        let den: Complex64 = denominators.iter().map(|&b| b + kf).product();
        term = term * num / den * arg / (kf + 1.0);
        sum += term;
        if !sum.re.is_finite() || !sum.im.is_finite() {
            return Err(Error::NonFinite(format!("{p}F{q} partial sum")));
        }
        if budget.negligible(term.norm(), sum.norm()) {
            small_run += 1;
            if small_run >= 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::SeriesDivergence {
        terms: budget.max_terms,
    })
}
