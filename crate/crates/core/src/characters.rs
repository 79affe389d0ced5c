//! SU(2) character algebra.
//!
//! The reduced Hilbert space carries a distinguished orthonormal basis `|n⟩`
//! (`n` is twice the spin). It is realized three ways: by the real characters
//! on the maximal torus `T`, by the complex characters on `T^ℂ` (scaled by
//! `C_n^{-1/2}`), and by the functions `√2 sin((n+1)x)` in `L²[0,π]` with the
//! `dx/π` measure.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Twice the spin of an SU(2) irreducible; indexes the basis `|n⟩`.
pub type BasisIndex = usize;

/// Below this `|sin x|` the character quotient is replaced by its limit.
const SINGULAR_SIN: f64 = 1e-8;

/// Physical parameters of the single-plaquette model.
///
/// `coupling_g = +∞` is accepted and denotes the free theory (`ν = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    hbar: f64,
    beta2: f64,
    coupling_g: f64,
}

impl ModelParams {
    pub fn new(hbar: f64, beta2: f64, coupling_g: f64) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("beta2", beta2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if coupling_g.is_nan() || coupling_g <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "coupling_g",
                value: coupling_g,
            });
        }
        Ok(Self {
            hbar,
            beta2,
            coupling_g,
        })
    }

    /// Builds parameters from the two combinations every observable depends
    /// on, `t = ħβ²` and `ν̃ = ν/(ħ²β²)`, with `ħ = 1`.
    pub fn from_reduced(hbar_beta2: f64, nu_tilde: f64) -> Result<Self> {
        if !(nu_tilde.is_finite() && nu_tilde >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "nu_tilde",
                value: nu_tilde,
            });
        }
        let nu = nu_tilde * hbar_beta2;
        let g = if nu == 0.0 {
            f64::INFINITY
        } else {
            nu.sqrt().recip()
        };
        Self::new(1.0, hbar_beta2, g)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn coupling_g(&self) -> f64 {
        self.coupling_g
    }

    /// `ν = 1/g²`.
    pub fn nu(&self) -> f64 {
        (self.coupling_g * self.coupling_g).recip()
    }

    /// `ħβ²`, the dimensionless combination written `t` throughout.
    pub fn hbar_beta2(&self) -> f64 {
        self.hbar * self.beta2
    }

    /// `ħ²β²`, the energy unit.
    pub fn hbar2_beta2(&self) -> f64 {
        self.hbar * self.hbar * self.beta2
    }

    /// `ν̃ = ν/(ħ²β²)`.
    pub fn nu_tilde(&self) -> f64 {
        self.nu() / self.hbar2_beta2()
    }

    /// Mathieu parameter `q = 4ν̃`.
    pub fn mathieu_q(&self) -> f64 {
        4.0 * self.nu_tilde()
    }
}

/// Real character `sin((n+1)x)/sin(x)` on the torus, `x ∈ [0,π]`.
pub fn char_real(n: BasisIndex, x: f64) -> f64 {
    let s = x.sin();
    let dim = (n + 1) as f64;
    if s.abs() < SINGULAR_SIN {
        if x < PI / 2.0 || n.is_multiple_of(2) {
            dim
        } else {
            -dim
        }
    } else {
        (dim * x).sin() / s
    }
}

/// `L²[0,π]` realization of `|n⟩`: `√2 sin((n+1)x)`.
pub fn char_l2(n: BasisIndex, x: f64) -> f64 {
    std::f64::consts::SQRT_2 * (((n + 1) as f64) * x).sin()
}

/// Complex character `z^n + z^{n-2} + … + z^{-n}` on `T^ℂ`.
pub fn char_complex(n: BasisIndex, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    let z2 = z * z;
    let mut term = z.powi(-(n as i32));
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..=n {
        sum += term;
        term *= z2;
    }
    Ok(sum)
}

/// Eigenvalue `ε_n = β² n(n+2)` of `-Δ_K` on the isotypical summand `n`.
pub fn laplace_eigenvalue(n: BasisIndex, params: &ModelParams) -> f64 {
    let n = n as f64;
    params.beta2() * n * (n + 2.0)
}

/// Peter–Weyl constant `C_n = (ħπ)^{3/2} e^{ħβ²(n+1)²}`.
pub fn peter_weyl_constant(n: BasisIndex, params: &ModelParams) -> Result<f64> {
    let m = (n + 1) as f64;
    let c = (params.hbar() * PI).powf(1.5) * (params.hbar_beta2() * m * m).exp();
    if c.is_finite() {
        Ok(c)
    } else {
        Err(Error::Overflow("peter_weyl_constant"))
    }
}

/// `C_n^{-1/2}`, evaluated in log space so it never overflows.
pub fn peter_weyl_inv_sqrt(n: BasisIndex, params: &ModelParams) -> f64 {
    let m = (n + 1) as f64;
    (-0.75 * (params.hbar() * PI).ln() - 0.5 * params.hbar_beta2() * m * m).exp()
}

/// Density `sin²(x)/π` of the normalized Haar measure pushed to `[0,π]`.
pub fn haar_density(x: f64) -> f64 {
    let s = x.sin();
    s * s / PI
}
