//! Momentum maps for `O(s) × Sp(ℓ, ℝ)` acting on `ℓ` particles in `ℝ^s`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Positions `q_j` and momenta `p_j`, `j < ℓ`, each in `ℝ^s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleConfig {
    s: usize,
    q: Vec<DVector<f64>>,
    p: Vec<DVector<f64>>,
}

impl ParticleConfig {
    pub fn new(s: usize, q: Vec<DVector<f64>>, p: Vec<DVector<f64>>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::Dimension(format!(
                "{} positions but {} momenta",
                q.len(),
                p.len()
            )));
        }
        if let Some(v) = q.iter().chain(&p).find(|v| v.len() != s) {
            return Err(Error::Dimension(format!(
                "vector of length {} in ℝ^{s}",
                v.len()
            )));
        }
        Ok(Self { s, q, p })
    }

    /// Columns of `q` and `p` are the particle vectors.
    pub fn from_matrices(q: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<Self> {
        let cols = |m: &DMatrix<f64>| m.column_iter().map(|c| c.into_owned()).collect();
        if q.shape() != p.shape() {
            return Err(Error::Dimension(format!(
                "position block {:?} vs momentum block {:?}",
                q.shape(),
                p.shape()
            )));
        }
        Self::new(q.nrows(), cols(q), cols(p))
    }

    pub fn origin(s: usize, l: usize) -> Self {
        let zero = vec![DVector::zeros(s); l];
        Self {
            s,
            q: zero.clone(),
            p: zero,
        }
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn l(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[DVector<f64>] {
        &self.q
    }

    pub fn p(&self) -> &[DVector<f64>] {
        &self.p
    }

    /// Applies `g ∈ GL(s)` to every position and momentum.
    pub fn transform(&self, g: &DMatrix<f64>) -> Result<Self> {
        if g.shape() != (self.s, self.s) {
            return Err(Error::Dimension(format!(
                "{:?} matrix acting on ℝ^{}",
                g.shape(),
                self.s
            )));
        }
        let act = |vs: &[DVector<f64>]| vs.iter().map(|v| g * v).collect();
        Ok(Self {
            s: self.s,
            q: act(&self.q),
            p: act(&self.p),
        })
    }
}

/// Angular momentum about the origin, `Σ_j q_j p_jᵀ − p_j q_jᵀ`.
pub fn momentum_o(cfg: &ParticleConfig) -> DMatrix<f64> {
    let s = cfg.s;
    let mut m = DMatrix::zeros(s, s);
    for (q, p) in cfg.q.iter().zip(&cfg.p) {
        for a in 0..s {
            for b in (a + 1)..s {
                let v = q[a] * p[b] - p[a] * q[b];
                m[(a, b)] += v;
                m[(b, a)] -= v;
            }
        }
    }
    m
}

/// `𝔰𝔭(ℓ, ℝ)`-valued momentum, `[[q_j·p_k, −q_j·q_k], [p_j·p_k, −p_j·q_k]]`.
pub fn momentum_sp(cfg: &ParticleConfig) -> DMatrix<f64> {
    let l = cfg.l();
    let (q, p) = (&cfg.q, &cfg.p);
    DMatrix::from_fn(2 * l, 2 * l, |r, c| {
        let (j, k) = (r % l, c % l);
        match (r < l, c < l) {
            (true, true) => q[j].dot(&p[k]),
            (true, false) => -q[j].dot(&q[k]),
            (false, true) => p[j].dot(&p[k]),
            (false, false) => -p[j].dot(&q[k]),
        }
    })
}

/// Standard symplectic form `[[0, I], [−I, 0]]` on `ℝ^{2ℓ}`.
pub fn symplectic_form(l: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * l, 2 * l, |r, c| {
        if c == r + l {
            1.0
        } else if r == c + l {
            -1.0
        } else {
            0.0
        }
    })
}

/// `max |JM − (JM)ᵀ|`; zero exactly when `M ∈ 𝔰𝔭(ℓ, ℝ)`.
pub fn sp_residual(m: &DMatrix<f64>) -> Result<f64> {
    if !m.is_square() || !m.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(format!("{:?} is not 2ℓ×2ℓ", m.shape())));
    }
    let jm = symplectic_form(m.nrows() / 2) * m;
    Ok((&jm - jm.transpose()).amax())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricProjection {
    pub matrix: DMatrix<Complex64>,
    pub rank: usize,
}

/// `M_jk = z_j · z_k` with `z_j = q_j + i p_j` (bilinear), and its rank.
pub fn symmetric_projection(cfg: &ParticleConfig) -> SymmetricProjection {
    let l = cfg.l();
    let z: Vec<Vec<Complex64>> = cfg
        .q
        .iter()
        .zip(&cfg.p)
        .map(|(q, p)| {
            q.iter()
                .zip(p.iter())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect()
        })
        .collect();
    let matrix = DMatrix::from_fn(l, l, |j, k| {
        z[j].iter()
            .zip(&z[k])
            .map(|(a, b)| a * b)
            .sum::<Complex64>()
    });
    let sv = matrix.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let rank = if max == 0.0 {
        0
    } else {
        sv.iter().filter(|&&v| v > RANK_TOL * max).count()
    };
    SymmetricProjection { matrix, rank }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: usize, q: &[&[f64]], p: &[&[f64]]) -> ParticleConfig {
        let v = |xs: &[&[f64]]| xs.iter().map(|x| DVector::from_column_slice(x)).collect();
        ParticleConfig::new(s, v(q), v(p)).unwrap()
    }

    #[test]
    fn planar_rotation_generator() {
        let c = cfg(2, &[&[1.0, 0.0]], &[&[0.0, 1.0]]);
        assert_eq!(
            momentum_o(&c),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
        );
    }

    #[test]
    fn collinear_has_no_angular_momentum() {
        let c = cfg(
            3,
            &[&[1.0, 2.0, 3.0], &[0.0, 1.0, 0.0]],
            &[&[2.0, 4.0, 6.0], &[0.0, -5.0, 0.0]],
        );
        assert!(momentum_o(&c).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_particle_on_line() {
        let (a, b) = (1.5, -0.5);
        let m = momentum_sp(&cfg(1, &[&[a]], &[&[b]]));
        assert_eq!(
            m,
            DMatrix::from_row_slice(2, 2, &[a * b, -a * a, b * b, -a * b])
        );
        assert_eq!(sp_residual(&m).unwrap(), 0.0);
    }

    #[test]
    fn origin_is_zero() {
        let c = ParticleConfig::origin(3, 2);
        assert!(momentum_sp(&c).iter().all(|&v| v == 0.0));
        assert!(momentum_o(&c).iter().all(|&v| v == 0.0));
        assert_eq!(symmetric_projection(&c).rank, 0);
    }

    #[test]
    fn dimension_checks() {
        let v = |n| DVector::<f64>::zeros(n);
        assert!(ParticleConfig::new(2, vec![v(2)], vec![]).is_err());
        assert!(ParticleConfig::new(2, vec![v(3)], vec![v(2)]).is_err());
        assert!(sp_residual(&DMatrix::zeros(3, 3)).is_err());
        let c = ParticleConfig::origin(2, 1);
        assert!(c.transform(&DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn symplectic_form_squares_to_minus_one() {
        let j = symplectic_form(3);
        assert_eq!(&j * &j, -DMatrix::<f64>::identity(6, 6));
    }
}
