//! Energy spectrum of the single-plaquette Hamiltonian
//! `H = −(ħ²/2)Δ_K + (ν/2)(3 − χ₁)` and the stratum-projector expectation
//! values in its eigenstates.
//!
//! Two independent routes to the spectrum are provided:
//!
//! * the Mathieu route: `E_n = (ħ²β²/2)(b_{2n+2}(4ν̃)/4 + 3ν̃ − 1)` with
//!   eigenvector components `⟨ξ_n|k⟩ = (−1)^{n+k} B^{2n+2}_{2k+2}(4ν̃)`;
//! * the matrix route: `H` written in the basis `|k⟩`, where `−Δ_K` is
//!   diagonal with `β²k(k+2)` and `χ₁|k⟩ = |k+1⟩ + |k−1⟩`, diagonalized densely.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::characters::ModelParams;
use crate::costratified::{self, StateVector, Vertex};
use crate::error::{Error, Result};
use crate::mathieu::{self, MathieuSolution};
use crate::tridiag::SymTridiagonal;

/// Tail bound for both factors of an overlap sum.
pub const OVERLAP_TAIL_BOUND: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub n: usize,
    pub energy: f64,
    /// Components `⟨k|ξ_n⟩`.
    pub xi: StateVector,
    pub params: ModelParams,
}

/// `H` in the basis `|0⟩ … |dim−1⟩`: diagonal `(ħ²β²/2)k(k+2) + 3ν/2`,
/// off-diagonal `−ν/2`.
pub fn hamiltonian_matrix(params: &ModelParams, dim: usize) -> Result<SymTridiagonal> {
    if dim < 2 {
        return Err(Error::Dimension(format!(
            "hamiltonian needs dim >= 2, got {dim}"
        )));
    }
    let kinetic = 0.5 * params.hbar2_beta2();
    let nu = params.nu();
    let diag = (0..dim)
        .map(|k| {
            let k = k as f64;
            kinetic * k * (k + 2.0) + 1.5 * nu
        })
        .collect();
    Ok(SymTridiagonal::new(diag, vec![-0.5 * nu; dim - 1]))
}

/// Dense eigendecomposition of [`hamiltonian_matrix`], ascending eigenvalues
/// with eigenvectors as columns.
pub fn hamiltonian_eigensystem(
    params: &ModelParams,
    dim: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dense = hamiltonian_matrix(params, dim)?.to_dense();
    let eig = dense.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Truncation used for level `n`: enough for the Mathieu tail and for `ψ±`.
pub fn working_trunc(n: usize, params: &ModelParams) -> usize {
    mathieu::default_trunc(n, params.mathieu_q())
        .max(costratified::default_trunc(params.hbar_beta2()))
}

fn mathieu_solution(n: usize, params: &ModelParams, min_trunc: usize) -> Result<MathieuSolution> {
    mathieu::solve_from(n, params.mathieu_q(), min_trunc)
}

/// `E_n` in terms of the characteristic value `b_{2n+2}(4ν̃)`.
pub fn energy_from_characteristic(b: f64, params: &ModelParams) -> f64 {
    0.5 * params.hbar2_beta2() * (0.25 * b + 3.0 * params.nu_tilde() - 1.0)
}

/// `E_n = (ħ²β²/2)(b_{2n+2}(4ν̃)/4 + 3ν̃ − 1)`.
pub fn energy(n: usize, params: &ModelParams) -> Result<f64> {
    let b = mathieu::solve_adaptive(n, params.mathieu_q())?.b;
    Ok(energy_from_characteristic(b, params))
}

fn alternating(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `ξ_n` with `⟨k|ξ_n⟩ = (−1)^{n+k} B_{2k+2}`. `min_trunc = 0` selects the
/// default truncation.
pub fn eigenstate(n: usize, params: &ModelParams, min_trunc: usize) -> Result<SpectralResult> {
    let solution = mathieu_solution(n, params, min_trunc)?;
    let coeffs = solution
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, b)| Complex64::new(alternating(n + k) * b, 0.0))
        .collect();
    Ok(SpectralResult {
        n,
        energy: energy_from_characteristic(solution.b, params),
        xi: StateVector::new(coeffs, *params),
        params: *params,
    })
}

/// `ξ_n(x) = (−1)^{n+1} √2 se_{2n+2}((x − π)/2; 4ν̃)` on `[0, π]`.
pub fn eigenfunction_x(n: usize, params: &ModelParams, x: f64) -> Result<f64> {
    let solution = mathieu::solve_adaptive(n, params.mathieu_q())?;
    Ok(eigenfunction_from_solution(&solution, x))
}

/// Same as [`eigenfunction_x`] for an already solved level.
pub fn eigenfunction_from_solution(solution: &MathieuSolution, x: f64) -> f64 {
    alternating(solution.n + 1) * SQRT_2 * solution.se(0.5 * (x - PI))
}

/// `⟨ξ_n|ψ±⟩`:
///
/// ```text
/// ⟨ξ_n|ψ+⟩ = ((−1)^n / N) Σ_k (−1)^k (k+1) e^{−t(k+1)²/2} B_{2k+2}(4ν̃)
/// ⟨ξ_n|ψ−⟩ = ((−1)^n / N) Σ_k        (k+1) e^{−t(k+1)²/2} B_{2k+2}(4ν̃)
/// ```
pub fn xi_psi_overlap(n: usize, params: &ModelParams, vertex: Vertex) -> Result<f64> {
    let solution = mathieu_solution(n, params, working_trunc(n, params))?;
    overlap_from_solution(&solution, params, vertex)
}

/// [`xi_psi_overlap`] for an already solved level.
pub fn overlap_from_solution(
    solution: &MathieuSolution,
    params: &ModelParams,
    vertex: Vertex,
) -> Result<f64> {
    let t = params.hbar_beta2();
    let norm = costratified::normalization_n(t)?;
    let amplitude = |k: usize| {
        let m = (k + 1) as f64;
        m * (-0.5 * t * m * m).exp() / norm
    };
    let trunc = solution.coeffs.len();
    let psi_tail = amplitude(trunc - 1);
    let tail = psi_tail.max(solution.tail());
    if psi_tail > OVERLAP_TAIL_BOUND {
        return Err(Error::Truncation {
            trunc,
            tail,
            bound: OVERLAP_TAIL_BOUND,
        });
    }
    let vertex_sign = |k: usize| match vertex {
        Vertex::Plus => alternating(k),
        Vertex::Minus => 1.0,
    };
    let sum: f64 = solution
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, b)| vertex_sign(k) * amplitude(k) * b)
        .sum();
    Ok(alternating(solution.n) * sum)
}

/// `P_{±,n} = |⟨ξ_n|ψ±⟩|²`.
pub fn projector_expectation(n: usize, params: &ModelParams, vertex: Vertex) -> Result<f64> {
    Ok(xi_psi_overlap(n, params, vertex)?.powi(2))
}

/// `P_{±,n}` at `ν̃ = 0`, where `ξ_n = |n⟩`: `(n+1)² e^{−t(n+1)²} / N²`.
pub fn free_projector_expectation(n: usize, t: f64) -> Result<f64> {
    let m = (n + 1) as f64;
    Ok(m * m * (-t * m * m).exp() / costratified::normalization_n_squared(t)?)
}

/// How far the `ψ+` coefficient pattern `(−1)^k (k+1) e^{−t(k+1)²/2} / N` is
/// from solving the `B_{2k+2}` recurrence at parameter `q`: the 2-norm of the
/// recurrence residual at the least-squares optimal characteristic value.
pub fn psi_recurrence_mismatch(t: f64, q: f64) -> Result<f64> {
    let trunc = costratified::default_trunc(t);
    let norm = costratified::normalization_n(t)?;
    let pattern: Vec<f64> = (0..trunc)
        .map(|k| {
            let m = (k + 1) as f64;
            alternating(k) * m * (-0.5 * t * m * m).exp() / norm
        })
        .collect();
    // residual_k = a B_k − c_k with c_k = (2k+2)² B_k + q (B_{k−1} + B_{k+1})
    let c: Vec<f64> = (0..trunc)
        .map(|k| {
            let prev = if k > 0 { pattern[k - 1] } else { 0.0 };
            let next = pattern.get(k + 1).copied().unwrap_or(0.0);
            ((2 * k + 2) as f64).powi(2) * pattern[k] + q * (prev + next)
        })
        .collect();
    let bb: f64 = pattern.iter().map(|b| b * b).sum();
    let a = pattern.iter().zip(&c).map(|(b, c)| b * c).sum::<f64>() / bb;
    Ok(pattern
        .iter()
        .zip(&c)
        .map(|(b, c)| (a * b - c).powi(2))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamiltonian_examples() {
        // ħ²β² = 2 (ħ = 1, β² = 2) and ν = 2 (g = 1/√2).
        let p = ModelParams::new(1.0, 2.0, 0.5f64.sqrt()).unwrap();
        assert!((p.nu() - 2.0).abs() < 1e-15);
        let h = hamiltonian_matrix(&p, 2).unwrap();
        assert!((h.diag()[0] - 3.0).abs() < 1e-14);
        assert!((h.diag()[1] - 6.0).abs() < 1e-14);
        assert!((h.off()[0] + 1.0).abs() < 1e-14);
        let dense = hamiltonian_matrix(&p, 10).unwrap().to_dense();
        assert_eq!(dense, dense.transpose());
        assert!(hamiltonian_matrix(&p, 1).is_err());

        let free = ModelParams::new(0.5, 2.0, f64::INFINITY).unwrap();
        let h = hamiltonian_matrix(&free, 6).unwrap();
        for k in 0..6 {
            let eps = crate::characters::laplace_eigenvalue(k, &free);
            assert_eq!(h.diag()[k], 0.5 * free.hbar().powi(2) * eps);
        }
        assert!(h.off().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn free_energies() {
        let p = ModelParams::from_reduced(0.5, 0.0).unwrap();
        for n in 0..10 {
            let e = energy(n, &p).unwrap() / p.hbar2_beta2();
            assert_eq!(e, (n * (n + 2)) as f64 / 2.0);
        }
    }

    #[test]
    fn routes_agree() {
        for &nu_tilde in &[0.0, 3.0, 6.0, 12.0, 24.0] {
            for &t in &[0.5, 0.125] {
                let p = ModelParams::from_reduced(t, nu_tilde).unwrap();
                let dim = working_trunc(10, &p);
                let (values, _) = hamiltonian_eigensystem(&p, dim).unwrap();
                for (n, v) in values.iter().take(10).enumerate() {
                    let e = energy(n, &p).unwrap();
                    let scale = e.abs().max(p.hbar2_beta2());
                    assert!(
                        (e - v).abs() < 1e-8 * scale,
                        "ν̃={nu_tilde} n={n}: {e} vs {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigenstates() {
        let free = ModelParams::from_reduced(0.25, 0.0).unwrap();
        let xi = eigenstate(2, &free, 0).unwrap().xi;
        for (k, c) in xi.coeffs().iter().enumerate() {
            assert_eq!(c.re, if k == 2 { 1.0 } else { 0.0 });
        }
        let p = ModelParams::from_reduced(0.125, 6.0).unwrap();
        let dim = 40;
        let states: Vec<_> = (0..8).map(|n| eigenstate(n, &p, dim).unwrap()).collect();
        for a in &states {
            for b in &states {
                let expect = if a.n == b.n { 1.0 } else { 0.0 };
                assert!((a.xi.inner(&b.xi).re - expect).abs() < 1e-9);
            }
            let h = hamiltonian_matrix(&p, a.xi.trunc()).unwrap();
            let v: Vec<f64> = a.xi.coeffs().iter().map(|c| c.re).collect();
            assert!(h.residual(a.energy, &v) < 1e-7);
        }
    }

    #[test]
    fn eigenfunction_matches_expansion() {
        let free = ModelParams::from_reduced(0.5, 0.0).unwrap();
        for n in 0..4 {
            for i in 0..=20 {
                let x = PI * i as f64 / 20.0;
                let v = eigenfunction_x(n, &free, x).unwrap();
                assert!((v - crate::characters::char_l2(n, x)).abs() < 1e-14);
            }
        }
        let p = ModelParams::from_reduced(0.5, 12.0).unwrap();
        for n in 0..6 {
            assert!(eigenfunction_x(n, &p, 0.0).unwrap().abs() < 1e-12);
            assert!(eigenfunction_x(n, &p, PI).unwrap().abs() < 1e-12);
            let state = eigenstate(n, &p, 0).unwrap();
            for i in 0..10 {
                let x = 0.1 + 0.3 * i as f64;
                let expansion: f64 = state
                    .xi
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.re * crate::characters::char_l2(k, x))
                    .sum();
                assert!((eigenfunction_x(n, &p, x).unwrap() - expansion).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn free_projector_expectations() {
        for &t in &[0.5, 0.125, 1.0 / 32.0] {
            let p = ModelParams::from_reduced(t, 0.0).unwrap();
            for n in 0..10 {
                let closed = free_projector_expectation(n, t).unwrap();
                let plus = projector_expectation(n, &p, Vertex::Plus).unwrap();
                let minus = projector_expectation(n, &p, Vertex::Minus).unwrap();
                assert!((closed - plus).abs() < 1e-10);
                assert!((closed - minus).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn parity_split_for_positive_coupling() {
        let p = ModelParams::from_reduced(0.125, 6.0).unwrap();
        let plus = projector_expectation(0, &p, Vertex::Plus).unwrap();
        let minus = projector_expectation(0, &p, Vertex::Minus).unwrap();
        assert!((plus - minus).abs() > 1e-3, "{plus} vs {minus}");
    }

    #[test]
    fn completeness() {
        let p = ModelParams::from_reduced(0.125, 24.0).unwrap();
        let total: f64 = (0..60)
            .map(|n| projector_expectation(n, &p, Vertex::Plus).unwrap())
            .sum();
        assert!((1.0 - 1e-6..=1.0 + 1e-10).contains(&total), "{total}");
    }

    #[test]
    fn parameter_collapse() {
        // t = ħβ² = 1/8 and ν̃ = 6 reached from two different (ħ, β², g).
        let a = ModelParams::new(1.0, 0.125, 0.75f64.sqrt().recip()).unwrap();
        let b = ModelParams::new(0.5, 0.25, 0.375f64.sqrt().recip()).unwrap();
        assert_eq!(a.hbar_beta2(), b.hbar_beta2());
        assert!((a.nu_tilde() - 6.0).abs() < 1e-14);
        assert!((b.nu_tilde() - 6.0).abs() < 1e-14);
        for n in 0..6 {
            for vertex in [Vertex::Plus, Vertex::Minus] {
                let x = projector_expectation(n, &a, vertex).unwrap();
                let y = projector_expectation(n, &b, vertex).unwrap();
                if a.nu_tilde() == b.nu_tilde() {
                    assert_eq!(x, y);
                } else {
                    assert!((x - y).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn psi_pattern_is_not_a_mathieu_vector() {
        for &t in &[0.5, 0.125, 1.0 / 32.0] {
            for i in 0..40 {
                let q = 10f64.powf(-1.0 + 4.0 * i as f64 / 39.0);
                let r = psi_recurrence_mismatch(t, q).unwrap();
                assert!(r > 1e-2, "t={t} q={q}: {r}");
            }
        }
    }
}
