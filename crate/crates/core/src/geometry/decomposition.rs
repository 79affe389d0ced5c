//! Highest-weight monomials `δ_1^{α_1} ⋯ δ_s^{α_s}` of degree `k`, i.e.
//! tuples with `Σ m·α_m = k`.

use crate::error::{Error, Result};

pub type Exponents = Vec<u32>;

/// All `(α_1, …, α_s)` with `Σ_m m·α_m = k`, in descending lexicographic order.
pub fn monomial_decomposition(s: usize, k: u32) -> Vec<Exponents> {
    assert!(s >= 1, "need at least one minor");
    let mut out = Vec::new();
    let mut current = vec![0u32; s];
    fill(0, k, &mut current, &mut out);
    out
}

fn fill(pos: usize, remaining: u32, current: &mut Exponents, out: &mut Vec<Exponents>) {
    let weight = pos as u32 + 1;
    if pos + 1 == current.len() {
        if remaining.is_multiple_of(weight) {
            current[pos] = remaining / weight;
            out.push(current.clone());
        }
        return;
    }
    for a in (0..=remaining / weight).rev() {
        current[pos] = a;
        fill(pos + 1, remaining - a * weight, current, out);
    }
    current[pos] = 0;
}

/// Monomials split by whether they involve `δ_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub kernel: Vec<Exponents>,
    pub image: Vec<Exponents>,
}

/// Splits `monomial_decomposition(s, k)` into the `α_s ≥ 1` part, killed by
/// restricting to rank `s − 1`, and the `α_s = 0` part, which maps
/// isomorphically.
pub fn restriction_kernel(s: usize, k: u32) -> Result<Restriction> {
    if s < 2 {
        return Err(Error::Dimension(format!(
            "restriction needs s ≥ 2, got {s}"
        )));
    }
    let (kernel, image) = monomial_decomposition(s, k)
        .into_iter()
        .partition(|a| a[s - 1] >= 1);
    Ok(Restriction { kernel, image })
}
