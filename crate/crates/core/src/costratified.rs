//! The costratified Hilbert space over the canoe.
//!
//! The reduced phase space has three orbit-type strata: the vertices `P₊`,
//! `P₋` (the classes of `±𝟙`) and the dense top stratum `P₁`. On the quantum
//! side `V±` is the subspace of states vanishing at `±𝟙`, and its orthogonal
//! complement `H±` is spanned by a single unit vector `ψ±`. Everything here is
//! expressed in the orthonormal basis `|n⟩`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::characters::{peter_weyl_inv_sqrt, ModelParams};
use crate::error::{Error, Result};
use crate::mathieu::MAX_TRUNC;
use crate::theta::theta3_prime;

/// Agreement required between the direct series and the theta form.
pub const DUAL_FORM_TOL: f64 = 1e-10;
/// Smallest `ħβ²` accepted by the series evaluations; below it the direct
/// sums need millions of terms and drift from the theta forms.
pub const MIN_HBAR_BETA2: f64 = 1e-6;
/// Bound on the first omitted `ψ±` term relative to `N²`.
const PSI_TAIL_REL: f64 = 1e-16;
/// Below this `t` the alternating series is evaluated in its resummed form.
const RESUM_BELOW: f64 = 1.0;

/// Orbit-type strata of the canoe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StratumLabel {
    Plus,
    Minus,
    Top,
}

/// The two vertex strata, where the lower-dimensional subspaces live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    Plus,
    Minus,
}

impl Vertex {
    /// `±1`, the torus point `±𝟙` seen by the characters.
    pub fn sign(self) -> f64 {
        match self {
            Vertex::Plus => 1.0,
            Vertex::Minus => -1.0,
        }
    }

    /// `(±1)^n`.
    pub fn parity(self, n: usize) -> f64 {
        match self {
            Vertex::Minus if n % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }
}

impl StratumLabel {
    pub fn vertex(self) -> Option<Vertex> {
        match self {
            StratumLabel::Plus => Some(Vertex::Plus),
            StratumLabel::Minus => Some(Vertex::Minus),
            StratumLabel::Top => None,
        }
    }
}

/// Truncated state `Σ a_n |n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    coeffs: Vec<Complex64>,
    params: ModelParams,
}

impl StateVector {
    pub fn new(coeffs: Vec<Complex64>, params: ModelParams) -> Self {
        Self { coeffs, params }
    }

    pub fn from_real(coeffs: &[f64], params: ModelParams) -> Self {
        Self::new(
            coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            params,
        )
    }

    /// The basis vector `|n⟩` in a truncation of size `trunc`.
    pub fn basis(n: usize, trunc: usize, params: ModelParams) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); trunc];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs, params }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `|a_{N−1}|`, for judging truncation adequacy.
    pub fn tail(&self) -> f64 {
        self.coeffs.last().map_or(0.0, |a| a.norm())
    }

    /// `⟨self, other⟩ = Σ conj(a_n) b_n`, over the common truncation.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        StateVector::new(
            self.coeffs.iter().map(|a| a * factor).collect(),
            self.params,
        )
    }

    /// `‖self − other‖`, padding the shorter vector with zeros.
    pub fn distance(&self, other: &StateVector) -> f64 {
        let len = self.trunc().max(other.trunc());
        let zero = Complex64::new(0.0, 0.0);
        (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(zero);
                let b = other.coeffs.get(i).copied().unwrap_or(zero);
                (a - b).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t >= MIN_HBAR_BETA2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "hbar_beta2",
            value: t,
        })
    }
}

/// `Σ_{m≥1} w(m) m² e^{−t m²}` summed until terms fall below `1e-18` of the sum.
fn gaussian_moment(t: f64, weight: impl Fn(u64) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut scale = 0.0f64;
    let mut m = 1u64;
    loop {
        let mf = m as f64;
        let term = mf * mf * (-t * mf * mf).exp();
        sum += weight(m) * term;
        scale = scale.max(term);
        if m >= 4 && (term == 0.0 || term < 1e-18 * scale) {
            break;
        }
        m += 1;
    }
    sum
}

/// `Σ_{m≥1} (−1)^{m+1} m² e^{−t m²}` through the Jacobi imaginary
/// transformation of `Σ_{m∈ℤ} (−1)^m e^{−t m²}`:
/// `(√π/2) t^{−5/2} Σ_{k∈ℤ} e^{−c_k/t} (c_k − t/2)`, `c_k = π²(k+½)²`.
/// Free of cancellation for small `t`, where the direct sum is pure rounding.
fn alternating_moment_resummed(t: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..64u32 {
        let c = PI * PI * (k as f64 + 0.5).powi(2);
        let term = 2.0 * (-c / t).exp() * (c - t / 2.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() || term == 0.0 {
            break;
        }
    }
    0.5 * PI.sqrt() * t.powf(-2.5) * sum
}

/// `N² = Σ_{n≥1} n² e^{−t n²}`, cross-checked against `½ e^{−t} θ₃'(e^{−t})`.
pub fn normalization_n_squared(t: f64) -> Result<f64> {
    check_t(t)?;
    let series = gaussian_moment(t, |_| 1.0);
    if !(series.is_normal() && series > 0.0) {
        return Err(Error::Underflow("normalization N²"));
    }
    let nome = (-t).exp();
    let theta_form = 0.5 * nome * theta3_prime(nome)?;
    if (series - theta_form).abs() > DUAL_FORM_TOL * series.abs() {
        return Err(Error::Inconsistent {
            what: "normalization N²",
            lhs: series,
            rhs: theta_form,
        });
    }
    Ok(series)
}

/// Normalization `N` of `ψ±`.
pub fn normalization_n(t: f64) -> Result<f64> {
    Ok(normalization_n_squared(t)?.sqrt())
}

/// `⌈√(80/t)⌉ + 8`.
pub fn default_trunc(t: f64) -> usize {
    ((80.0 / t).sqrt().ceil() as usize).saturating_add(8)
}

/// `ψ+` (`a_n = (n+1) e^{−t(n+1)²/2} / N`) or `ψ−` (with `(−1)^n`).
pub fn psi(vertex: Vertex, params: &ModelParams, trunc: usize) -> Result<StateVector> {
    let t = params.hbar_beta2();
    let n2 = normalization_n_squared(t)?;
    let first_omitted = (trunc as f64).powi(2) * (-t * (trunc as f64).powi(2)).exp();
    if trunc > MAX_TRUNC {
        return Err(Error::InvalidTruncation {
            trunc,
            reason: format!("exceeds the maximum {MAX_TRUNC}"),
        });
    }
    if trunc == 0 || first_omitted >= PSI_TAIL_REL * n2 {
        return Err(Error::InvalidTruncation {
            trunc,
            reason: format!("tail term {first_omitted:e} not below 1e-16·N² at t = {t}"),
        });
    }
    let n = n2.sqrt();
    let coeffs = (0..trunc)
        .map(|k| {
            let m = (k + 1) as f64;
            Complex64::new(vertex.parity(k) * m * (-0.5 * t * m * m).exp() / n, 0.0)
        })
        .collect();
    Ok(StateVector::new(coeffs, *params))
}

pub fn psi_plus(params: &ModelParams, trunc: usize) -> Result<StateVector> {
    psi(Vertex::Plus, params, trunc)
}

pub fn psi_minus(params: &ModelParams, trunc: usize) -> Result<StateVector> {
    psi(Vertex::Minus, params, trunc)
}

/// Value at `±𝟙` of the holomorphic function `Σ a_n C_n^{−1/2} χ^ℂ_n`, using
/// `χ^ℂ_n(±1) = (±1)^n (n+1)`. Zero exactly on `V±`.
pub fn vertex_evaluation(state: &StateVector, vertex: Vertex, params: &ModelParams) -> Complex64 {
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| a * (vertex.parity(n) * (n + 1) as f64 * peter_weyl_inv_sqrt(n, params)))
        .sum()
}

/// `⟨ψ±, v⟩ = κ · vertex_evaluation(v, ±)` with `κ = (ħπ)^{3/4} / N`.
pub fn reproducing_constant(params: &ModelParams) -> Result<f64> {
    Ok((params.hbar() * PI).powf(0.75) / normalization_n(params.hbar_beta2())?)
}

/// `Π± v = ψ± ⟨ψ±, v⟩`.
pub fn project(state: &StateVector, vertex: Vertex, params: &ModelParams) -> Result<StateVector> {
    let trunc = state.trunc().max(default_trunc(params.hbar_beta2()));
    let spanning = psi(vertex, params, trunc)?;
    let amplitude = spanning.inner(state);
    Ok(spanning.scaled(amplitude))
}

/// Scaled basis of `V±` inside a truncation: the vectors
/// `χ^ℂ_n − (n+1)χ^ℂ_0` (`n ≥ 1`) for `V+` and
/// `χ^ℂ_n + (−1)^n (n+1)/2 χ^ℂ_1` (`n ≠ 1`) for `V−`, each divided by
/// `C_n^{1/2}` so that the `|n⟩` component is 1.
pub fn vanishing_basis(vertex: Vertex, params: &ModelParams, trunc: usize) -> Vec<StateVector> {
    let (anchor, skip) = match vertex {
        Vertex::Plus => (0usize, 0usize),
        Vertex::Minus => (1, 1),
    };
    let zero = Complex64::new(0.0, 0.0);
    (0..trunc)
        .filter(|&n| n != skip)
        .map(|n| {
            let mut coeffs = vec![zero; trunc];
            coeffs[n] = Complex64::new(1.0, 0.0);
            // C_anchor^{1/2} / C_n^{1/2}
            let ratio = peter_weyl_inv_sqrt(n, params) / peter_weyl_inv_sqrt(anchor, params);
            let weight = match vertex {
                Vertex::Plus => -((n + 1) as f64),
                Vertex::Minus => vertex.parity(n) * (n + 1) as f64 / 2.0,
            };
            coeffs[anchor] += weight * ratio;
            StateVector::new(coeffs, *params)
        })
        .collect()
}

/// `⟨ψ+, ψ−⟩ = (1/N²) Σ_{m≥1} (−1)^{m+1} m² e^{−t m²}`.
///
/// The direct alternating series is always compared with the theta ratio
/// `θ₃'(−e^{−t}) / θ₃'(e^{−t})`; the value returned for `t < 1` comes from
/// the resummed series, which keeps full relative accuracy where the overlap
/// is exponentially small.
pub fn tunneling_overlap(t: f64) -> Result<f64> {
    check_t(t)?;
    let n2 = normalization_n_squared(t)?;
    let direct = gaussian_moment(t, |m| if m % 2 == 1 { 1.0 } else { -1.0 }) / n2;
    let nome = (-t).exp();
    let theta_ratio = theta3_prime(-nome)? / theta3_prime(nome)?;
    if (direct - theta_ratio).abs() > DUAL_FORM_TOL {
        return Err(Error::Inconsistent {
            what: "tunneling overlap",
            lhs: direct,
            rhs: theta_ratio,
        });
    }
    if t < RESUM_BELOW {
        Ok(alternating_moment_resummed(t) / n2)
    } else {
        Ok(direct)
    }
}

/// `|⟨ψ+, ψ−⟩|²`.
pub fn tunneling_probability(t: f64) -> Result<f64> {
    Ok(tunneling_overlap(t)?.powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(t: f64) -> ModelParams {
        ModelParams::new(1.0, t, 1.0).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, trunc: usize, p: ModelParams) -> StateVector {
        let coeffs = (0..trunc)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        StateVector::new(coeffs, p)
    }

    #[test]
    fn normalization_underflow_is_an_error() {
        assert_eq!(
            normalization_n_squared(800.0),
            Err(Error::Underflow("normalization N²"))
        );
        assert!(tunneling_overlap(800.0).is_err());
        assert!(normalization_n_squared(700.0).unwrap() > 0.0);
        assert!(normalization_n_squared(1e-6).is_ok());
        assert!(matches!(
            normalization_n_squared(1e-300),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn normalization_examples() {
        let direct: f64 = (1..40)
            .map(|n| (n * n) as f64 * (-((n * n) as f64)).exp())
            .sum();
        let n2 = normalization_n_squared(1.0).unwrap();
        assert!((n2 - direct).abs() < 1e-15);
        let theta_form = 0.5 * (-1f64).exp() * theta3_prime((-1f64).exp()).unwrap();
        assert!((n2 - theta_form).abs() < 1e-12 * n2);
        let big = normalization_n_squared(50.0).unwrap();
        assert!(((big - (-50f64).exp()) / big).abs() < 1e-60);
        assert!(normalization_n_squared(0.0).is_err());
        assert!(normalization_n(-1.0).is_err());
    }

    #[test]
    fn psi_unit_norm_and_parity() {
        for &t in &[0.01, 0.125, 1.0, 5.0] {
            let p = params(t);
            let trunc = default_trunc(t);
            let plus = psi_plus(&p, trunc).unwrap();
            let minus = psi_minus(&p, trunc).unwrap();
            assert!((plus.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((minus.norm_sqr() - 1.0).abs() < 1e-12);
            let n = normalization_n(t).unwrap();
            assert_eq!(plus.coeffs()[0].re, (-t / 2.0).exp() / n);
            for k in 0..trunc {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(minus.coeffs()[k], plus.coeffs()[k] * sign);
            }
        }
        assert!(matches!(
            psi_plus(&params(0.01), 10),
            Err(Error::InvalidTruncation { .. })
        ));
    }

    #[test]
    fn vertex_evaluation_examples() {
        let p = params(0.5);
        let trunc = 20;
        let plus = psi_plus(&p, trunc).unwrap();
        assert!(vertex_evaluation(&plus, Vertex::Plus, &p).norm() > 0.1);
        for v in vanishing_basis(Vertex::Plus, &p, trunc) {
            assert!(vertex_evaluation(&v, Vertex::Plus, &p).norm() < 1e-15);
        }
        for v in vanishing_basis(Vertex::Minus, &p, trunc) {
            assert!(vertex_evaluation(&v, Vertex::Minus, &p).norm() < 1e-15);
        }
        let zero = StateVector::basis(0, trunc, p);
        let c0 = crate::characters::peter_weyl_constant(0, &p).unwrap();
        let e = vertex_evaluation(&zero, Vertex::Minus, &p);
        assert!((e.re - c0.powf(-0.5)).abs() < 1e-15 && e.im == 0.0);
    }

    #[test]
    fn projection_examples() {
        let p = params(0.25);
        let trunc = default_trunc(0.25);
        let plus = psi_plus(&p, trunc).unwrap();
        assert!(project(&plus, Vertex::Plus, &p).unwrap().distance(&plus) < 1e-14);
        for v in vanishing_basis(Vertex::Plus, &p, trunc) {
            let image = project(&v, Vertex::Plus, &p).unwrap();
            assert!(image.norm_sqr().sqrt() < 1e-13 * v.norm_sqr().sqrt());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_state(&mut rng, trunc, p);
            for vertex in [Vertex::Plus, Vertex::Minus] {
                let once = project(&s, vertex, &p).unwrap();
                let twice = project(&once, vertex, &p).unwrap();
                assert!(once.distance(&twice) < 1e-12);
            }
        }
    }

    #[test]
    fn reproducing_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &t in &[0.125, 0.5, 2.0] {
            let p = ModelParams::new(0.7, t / 0.7, 1.0).unwrap();
            let trunc = default_trunc(t);
            let kappa = reproducing_constant(&p).unwrap();
            for vertex in [Vertex::Plus, Vertex::Minus] {
                let spanning = psi(vertex, &p, trunc).unwrap();
                for _ in 0..10 {
                    let v = random_state(&mut rng, trunc, p);
                    let lhs = spanning.inner(&v);
                    let rhs = vertex_evaluation(&v, vertex, &p) * kappa;
                    assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
                }
            }
        }
    }

    #[test]
    fn complement_of_vanishing_subspace_is_one_dimensional() {
        for vertex in [Vertex::Plus, Vertex::Minus] {
            for &t in &[0.125, 0.5, 1.0] {
                let p = params(t);
                let trunc = 12;
                let basis = vanishing_basis(vertex, &p, trunc);
                let cols: Vec<_> = basis
                    .iter()
                    .map(|v| {
                        let norm = v.norm_sqr().sqrt();
                        nalgebra::DVector::from_iterator(
                            trunc,
                            v.coeffs().iter().map(|a| a.re / norm),
                        )
                    })
                    .collect();
                let a = DMatrix::from_columns(&cols);
                let q = a.qr().q();
                let complement = DMatrix::identity(trunc, trunc) - &q * q.transpose();
                let mut sv: Vec<f64> = complement.singular_values().iter().copied().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                assert!((sv[0] - 1.0).abs() < 1e-10);
                assert!(sv[1] < 1e-10, "second singular value {}", sv[1]);
                // and the complement is spanned by ψ±
                let spanning = psi(vertex, &p, 40).unwrap();
                let head = nalgebra::DVector::from_iterator(
                    trunc,
                    spanning.coeffs()[..trunc].iter().map(|a| a.re),
                );
                let head = head.normalize();
                let image = &complement * &head;
                assert!((image - head).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn overlap_series_equals_theta_form() {
        let t: f64 = 1.0;
        let n2 = normalization_n_squared(t).unwrap();
        let series: f64 = (1..40)
            .map(|m| {
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                sign * (m * m) as f64 * (-t * (m * m) as f64).exp()
            })
            .sum::<f64>()
            / n2;
        let nome = (-t).exp();
        let theta = theta3_prime(-nome).unwrap() / theta3_prime(nome).unwrap();
        assert!((series - theta).abs() < 1e-12);
        assert!((tunneling_overlap(t).unwrap() - series).abs() < 1e-12);
        let p = params(t);
        let trunc = default_trunc(t);
        let direct = psi_plus(&p, trunc)
            .unwrap()
            .inner(&psi_minus(&p, trunc).unwrap());
        assert!((direct.re - series).abs() < 1e-14);
    }

    #[test]
    fn resummed_matches_direct_where_both_accurate() {
        for &t in &[0.3, 0.5, 0.8, 1.0, 1.5, 2.0] {
            let direct = gaussian_moment(t, |m| if m % 2 == 1 { 1.0 } else { -1.0 });
            let resummed = alternating_moment_resummed(t);
            assert!(
                ((direct - resummed) / direct).abs() < 1e-11,
                "t={t}: {direct} vs {resummed}"
            );
        }
    }

    #[test]
    fn tunneling_limits() {
        assert!(tunneling_probability(5.0).unwrap() > 0.99);
        assert!(tunneling_probability(0.005).unwrap() < 1e-6);
        let grid: Vec<f64> = (1..=500)
            .map(|i| tunneling_probability(0.01 * i as f64).unwrap())
            .collect();
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert!(grid.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn top_stratum_has_no_vertex() {
        assert_eq!(StratumLabel::Top.vertex(), None);
        assert_eq!(StratumLabel::Minus.vertex(), Some(Vertex::Minus));
    }
}
