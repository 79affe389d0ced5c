//! Odd π-periodic Mathieu functions `se_{2n+2}(y; q)`.
//!
//! Writing `se_{2n+2}(y; q) = Σ_k B_{2k+2} sin((2k+2)y)` turns
//! `f'' + (a − 2q cos 2y) f = 0` into the three-term recurrence
//!
//! ```text
//! (a − 4)B₂ − qB₄ = 0
//! (a − 4k²)B_{2k} − q(B_{2k−2} + B_{2k+2}) = 0,   k ≥ 2
//! ```
//!
//! i.e. the eigenproblem of the symmetric tridiagonal matrix with diagonal
//! `(2k+2)²` and off-diagonal `q`. The characteristic value `b_{2n+2}(q)` is its
//! `(n+1)`-th smallest eigenvalue.
//!
//! Coefficients are normalized to `Σ B² = 1` and signed so that
//! `se'(0) = Σ (2k+2) B_{2k+2} > 0`. Since `se'(0)` never vanishes for a
//! nontrivial odd solution, this sign is the one continuous in `q` from
//! `se_{2n+2}(y; 0) = sin((2n+2)y)`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::tridiag::SymTridiagonal;

/// Extra rows beyond the level index (and beyond `2√q`) in the default
/// truncation.
pub const TAIL_PADDING: usize = 16;
/// Largest acceptable magnitude of the last retained coefficient.
pub const TAIL_BOUND: f64 = 1e-12;
/// Relative residual the eigensolver must reach.
pub const RESIDUAL_TOL: f64 = 1e-13;
/// Largest truncation attempted.
pub const MAX_TRUNC: usize = 1 << 22;
const MAX_DOUBLINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct MathieuSolution {
    pub n: usize,
    pub q: f64,
    /// Characteristic value `b_{2n+2}(q)`.
    pub b: f64,
    /// `B_{2k+2}` for `k = 0..trunc`.
    pub coeffs: Vec<f64>,
    pub trunc: usize,
}

impl MathieuSolution {
    /// `se_{2n+2}(y; q)`.
    pub fn se(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, b)| b * (wavenumber(k) * y).sin())
            .sum()
    }

    pub fn se_prime(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, b)| b * wavenumber(k) * (wavenumber(k) * y).cos())
            .sum()
    }

    pub fn se_second(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, b)| -b * wavenumber(k).powi(2) * (wavenumber(k) * y).sin())
            .sum()
    }

    /// `|se'' + (b − 2q cos 2y) se|` at `y`.
    pub fn ode_residual(&self, y: f64) -> f64 {
        (self.se_second(y) + (self.b - 2.0 * self.q * (2.0 * y).cos()) * self.se(y)).abs()
    }

    /// `max_k |(b − 4(k+1)²)B_{2k+2} − q(B_{2k} + B_{2k+4})|` with `B₀ = 0`;
    /// the term past the truncation is taken as zero.
    pub fn recurrence_residual(&self) -> f64 {
        recurrence_residual(self.b, self.q, &self.coeffs)
    }

    /// Magnitude of the last retained coefficient.
    pub fn tail(&self) -> f64 {
        self.coeffs.last().map_or(0.0, |b| b.abs())
    }
}

fn wavenumber(k: usize) -> f64 {
    (2 * k + 2) as f64
}

/// Residual of the `B_{2k+2}` recurrence for an arbitrary coefficient vector.
pub fn recurrence_residual(a: f64, q: f64, coeffs: &[f64]) -> f64 {
    let at = |k: isize| -> f64 {
        if k < 0 {
            0.0
        } else {
            coeffs.get(k as usize).copied().unwrap_or(0.0)
        }
    };
    (0..coeffs.len())
        .map(|k| {
            let ki = k as isize;
            ((a - wavenumber(k).powi(2)) * coeffs[k] - q * (at(ki - 1) + at(ki + 1))).abs()
        })
        .fold(0.0, f64::max)
}

/// `max(n + 16, ⌈2√|q|⌉ + 16)`.
pub fn default_trunc(n: usize, q: f64) -> usize {
    let spread = (2.0 * q.abs().sqrt()).ceil() as usize;
    n.saturating_add(TAIL_PADDING)
        .max(spread.saturating_add(TAIL_PADDING))
}

/// Truncated recurrence matrix of size `trunc`.
pub fn recurrence_matrix(q: f64, trunc: usize) -> SymTridiagonal {
    let diag = (0..trunc).map(|k| wavenumber(k).powi(2)).collect();
    SymTridiagonal::new(diag, vec![q; trunc.saturating_sub(1)])
}

/// Solves for level `n` with an explicit truncation.
pub fn solve(n: usize, q: f64, trunc: usize) -> Result<MathieuSolution> {
    if !q.is_finite() {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
        });
    }
    if trunc < n + TAIL_PADDING {
        return Err(Error::InvalidTruncation {
            trunc,
            reason: format!("need at least n + {TAIL_PADDING} = {}", n + TAIL_PADDING),
        });
    }
    if trunc > MAX_TRUNC {
        return Err(Error::InvalidTruncation {
            trunc,
            reason: format!("exceeds the maximum {MAX_TRUNC}"),
        });
    }
    let matrix = recurrence_matrix(q, trunc);
    let (b, mut coeffs) = matrix.eigenpair(n, RESIDUAL_TOL)?;
    let slope: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| wavenumber(k) * c)
        .sum();
    if slope < 0.0 {
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    let solution = MathieuSolution {
        n,
        q,
        b,
        coeffs,
        trunc,
    };
    let tail = solution.tail();
    if tail > TAIL_BOUND {
        return Err(Error::Truncation {
            trunc,
            tail,
            bound: TAIL_BOUND,
        });
    }
    Ok(solution)
}

/// Solves starting from `max(min_trunc, default_trunc(n, q))`, doubling the
/// truncation while the tail bound is violated.
pub fn solve_from(n: usize, q: f64, min_trunc: usize) -> Result<MathieuSolution> {
    let mut trunc = default_trunc(n, q).max(min_trunc);
    let mut doublings = 0;
    loop {
        match solve(n, q, trunc) {
            Err(Error::Truncation { .. })
                if doublings < MAX_DOUBLINGS && trunc <= MAX_TRUNC / 2 =>
            {
                trunc *= 2;
                doublings += 1;
            }
            other => return other,
        }
    }
}

/// Solves with the default truncation, doubling as needed.
pub fn solve_adaptive(n: usize, q: f64) -> Result<MathieuSolution> {
    solve_from(n, q, 0)
}

/// Characteristic value `b_{2n+2}(q)`.
pub fn characteristic_b(n: usize, q: f64) -> Result<f64> {
    Ok(solve_adaptive(n, q)?.b)
}

/// `se_{2n+2}(y; q)` with the default truncation.
pub fn se(n: usize, q: f64, y: f64) -> Result<f64> {
    Ok(solve_adaptive(n, q)?.se(y))
}

/// Memo of solutions keyed by `(n, q, minimum truncation)`; safe to share
/// between threads.
#[derive(Debug, Default)]
pub struct MathieuCache {
    entries: RwLock<HashMap<(usize, u64, usize), Arc<MathieuSolution>>>,
}

impl MathieuCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_solve(&self, n: usize, q: f64, min_trunc: usize) -> Result<Arc<MathieuSolution>> {
        let key = (n, q.to_bits(), min_trunc);
        if let Some(hit) = self.entries.read().expect("cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let solution = Arc::new(solve_from(n, q, min_trunc)?);
        self.entries
            .write()
            .expect("cache poisoned")
            .entry(key)
            .or_insert_with(|| Arc::clone(&solution));
        Ok(solution)
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn free_case() {
        let s = solve(0, 0.0, 16).unwrap();
        assert_eq!(s.b, 4.0);
        assert_eq!(s.coeffs[0], 1.0);
        assert!(s.coeffs[1..].iter().all(|&c| c == 0.0));
        assert_eq!(characteristic_b(3, 0.0).unwrap(), 64.0);
        for n in 0..10 {
            let s = solve_adaptive(n, 0.0).unwrap();
            for (k, c) in s.coeffs.iter().enumerate() {
                assert_eq!(*c, if k == n { 1.0 } else { 0.0 });
            }
        }
        let y = 0.37;
        assert!((se(0, 0.0, y).unwrap() - (2.0 * y).sin()).abs() < 1e-15);
    }

    #[test]
    fn truncation_contract() {
        assert!(matches!(
            solve(5, 1.0, 20),
            Err(Error::InvalidTruncation { .. })
        ));
        // Too short for q = 400: the tail bound trips.
        assert!(matches!(solve(0, 400.0, 16), Err(Error::Truncation { .. })));
        assert!(matches!(
            solve_adaptive(0, 1e300),
            Err(Error::InvalidTruncation { .. })
        ));
        let s = solve_adaptive(0, 400.0).unwrap();
        assert!(s.tail() <= TAIL_BOUND);
        assert!(solve(0, f64::NAN, 32).is_err());
    }

    #[test]
    fn normalized_and_recurrence_satisfied() {
        for &q in &[0.0, 1.0, 4.0, 16.0, 48.0, 96.0] {
            for n in 0..10 {
                let s = solve_adaptive(n, q).unwrap();
                let norm: f64 = s.coeffs.iter().map(|c| c * c).sum();
                assert!((norm - 1.0).abs() < 1e-12);
                assert!(s.recurrence_residual() < 1e-10, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn characteristic_values_increase() {
        for &q in &[0.0, 1.0, 4.0, 16.0, 48.0, 96.0] {
            let bs: Vec<f64> = (0..10).map(|n| characteristic_b(n, q).unwrap()).collect();
            assert!(bs.windows(2).all(|w| w[0] < w[1]), "q={q}: {bs:?}");
        }
    }

    #[test]
    fn boundary_values_vanish() {
        for &q in &[1.0, 4.0, 16.0] {
            for n in 0..=8 {
                let s = solve_adaptive(n, q).unwrap();
                assert!(s.se(0.0).abs() < 1e-12);
                assert!(s.se(-FRAC_PI_2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ode_residual_small() {
        for &q in &[1.0, 4.0, 16.0, 48.0] {
            for n in 0..6 {
                let s = solve_adaptive(n, q).unwrap();
                for i in 0..50 {
                    let y = -FRAC_PI_2 + PI * (i as f64 + 0.5) / 100.0;
                    assert!(s.ode_residual(y) < 1e-7, "n={n} q={q} y={y}");
                }
            }
        }
    }

    #[test]
    fn continuity_in_q() {
        for n in 0..6 {
            let mut prev = solve(n, 0.0, 64).unwrap();
            for step in 1..=200 {
                let q = 0.5 * step as f64;
                let cur = solve(n, q, 64).unwrap();
                let dot: f64 = prev
                    .coeffs
                    .iter()
                    .zip(&cur.coeffs)
                    .map(|(a, b)| a * b)
                    .sum();
                assert!(dot > 0.0, "n={n} q={q}");
                prev = cur;
            }
        }
    }

    #[test]
    fn anchor_component_positive_for_small_q() {
        for n in 0..6 {
            for &q in &[0.1, 0.5, 1.0, 2.0] {
                let s = solve_adaptive(n, q).unwrap();
                assert!(s.coeffs[n] > 0.0);
            }
        }
    }

    #[test]
    fn negative_q_reflection() {
        // se_{2n+2}(y; −q) = (−1)^n se_{2n+2}(π/2 − y; q), up to the sign convention.
        let q = 5.0;
        for n in 0..4 {
            let pos = solve_adaptive(n, q).unwrap();
            let neg = solve_adaptive(n, -q).unwrap();
            assert!((pos.b - neg.b).abs() < 1e-10);
            let y = -0.3;
            assert!((neg.se(y).abs() - pos.se(FRAC_PI_2 - y).abs()).abs() < 1e-10);
        }
    }

    #[test]
    fn cache_reuses_solutions() {
        let cache = MathieuCache::new();
        let a = cache.get_or_solve(2, 24.0, 0).unwrap();
        let b = cache.get_or_solve(2, 24.0, 0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
        std::thread::scope(|s| {
            for n in 0..4 {
                let cache = &cache;
                s.spawn(move || cache.get_or_solve(n, 8.0, 0).unwrap());
            }
        });
        assert_eq!(cache.len(), 5);
    }
}
