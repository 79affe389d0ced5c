//! Jacobi theta constant `θ₃(Q) = Σ_{k∈ℤ} Q^{k²}` and its derivative.
//!
//! Plain `q`-series summation. For `Q = e^{-t}` the summation runs to about
//! `k ≈ √(41/t)` before terms drop below the cutoff, which stays cheap down to
//! `t ≈ 0.01`.

use crate::error::{Error, Result};

/// Relative cutoff: stop once `|term| < REL_CUTOFF · |partial sum|`.
const REL_CUTOFF: f64 = 1e-18;
const MIN_TERMS: u64 = 4;

fn check_nome(q: f64) -> Result<()> {
    if q.is_finite() && q.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::NomeOutOfRange(q.abs()))
    }
}

/// `Q^m` for real `Q` with `|Q| < 1`, through `exp(m ln|Q|)`.
fn signed_power(q: f64, m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if q == 0.0 {
        return 0.0;
    }
    let mag = (m as f64 * q.abs().ln()).exp();
    if q < 0.0 && m % 2 == 1 {
        -mag
    } else {
        mag
    }
}

fn sum_series<F: Fn(u64) -> f64>(start: f64, term: F) -> f64 {
    let mut sum = start;
    let mut k = 1u64;
    loop {
        let t = term(k);
        sum += t;
        if k >= MIN_TERMS && (t == 0.0 || t.abs() < REL_CUTOFF * sum.abs()) {
            break;
        }
        k += 1;
    }
    sum
}

/// `θ₃(Q) = 1 + 2 Σ_{k≥1} Q^{k²}`.
pub fn theta3(q: f64) -> Result<f64> {
    check_nome(q)?;
    Ok(sum_series(1.0, |k| 2.0 * signed_power(q, k * k)))
}

/// `θ₃'(Q) = 2 Σ_{k≥1} k² Q^{k²-1}`.
pub fn theta3_prime(q: f64) -> Result<f64> {
    check_nome(q)?;
    Ok(sum_series(0.0, |k| {
        2.0 * (k * k) as f64 * signed_power(q, k * k - 1)
    }))
}
