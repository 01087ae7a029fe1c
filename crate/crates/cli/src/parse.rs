//! Parsers for the textual inputs of the command line and config files.

use num_complex::Complex64;

use crate::CliError;

/// Largest number of grid points accepted.
pub const MAX_GRID_POINTS: usize = 10_000;

fn bad(what: &str, text: &str, why: &str) -> CliError {
    CliError::Resolution(format!("invalid {what} '{text}': {why}"))
}

/// A finite real number. Rejects `inf`, `nan` and friends, which `f64::from_str` accepts.
pub fn parse_real(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(bad("number", text, "empty"));
    }
    if !t.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E')) {
        return Err(bad("number", text, "unexpected character"));
    }
    let v: f64 = t.parse().map_err(|_| bad("number", text, "not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad("number", text, "not finite"))
    }
}

/// A complex literal: `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, or `(a,b)`.
/// `j` may stand for `i`; surrounding whitespace is ignored.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| bad("complex", text, "expected (re,im)"))?;
        return Ok(Complex64::new(parse_real(re)?, parse_real(im)?));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(parse_real(t)?, 0.0));
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, imaginary_part(&body[k..], text)?),
        None => (0.0, imaginary_part(body, text)?),
    };
    Ok(Complex64::new(re, im))
}

fn imaginary_part(coefficient: &str, text: &str) -> Result<f64, CliError> {
    match coefficient.trim() {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        c => parse_real(c).map_err(|_| bad("complex", text, "bad imaginary part")),
    }
}

/// A grid of evaluation points: `x1,x2,...`, `lo:hi:n` (linear) or
/// `log:lo:hi:n` (geometric). Points must be positive, finite and strictly
/// increasing.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let t = text.trim();
    let fields: Vec<&str> = t.split(':').collect();
    let points = match fields.as_slice() {
        [single] => single.split(',').map(parse_real).collect::<Result<Vec<_>, _>>()?,
        [lo, hi, n] => spaced(parse_real(lo)?, parse_real(hi)?, parse_count(n, text)?, false, text)?,
        ["log", lo, hi, n] => spaced(parse_real(lo)?, parse_real(hi)?, parse_count(n, text)?, true, text)?,
        _ => return Err(bad("grid", text, "expected a list, lo:hi:n or log:lo:hi:n")),
    };
    validate_grid(&points).map_err(|why| bad("grid", text, &why))?;
    Ok(points)
}

fn parse_count(n: &str, text: &str) -> Result<usize, CliError> {
    let n: usize = n.trim().parse().map_err(|_| bad("grid", text, "bad point count"))?;
    if n == 0 || n > MAX_GRID_POINTS {
        return Err(bad("grid", text, &format!("point count must be in 1..={MAX_GRID_POINTS}")));
    }
    Ok(n)
}

fn spaced(lo: f64, hi: f64, n: usize, geometric: bool, text: &str) -> Result<Vec<f64>, CliError> {
    if geometric && !(lo > 0.0 && hi > 0.0) {
        return Err(bad("grid", text, "geometric ends must be positive"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = if geometric { (lo.ln(), hi.ln()) } else { (lo, hi) };
    Ok((0..n)
        .map(|k| {
            let v = a + (b - a) * k as f64 / (n - 1) as f64;
            if geometric {
                v.exp()
            } else {
                v
            }
        })
        .collect())
}

/// Nonempty, positive, finite and strictly increasing.
pub fn validate_grid(points: &[f64]) -> Result<(), String> {
    if points.is_empty() {
        return Err("empty".into());
    }
    if points.len() > MAX_GRID_POINTS {
        return Err(format!("more than {MAX_GRID_POINTS} points"));
    }
    if let Some(p) = points.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(format!("point {p} is not positive"));
    }
    if points.windows(2).any(|w| w[1] <= w[0]) {
        return Err("points are not strictly increasing".into());
    }
    Ok(())
}
