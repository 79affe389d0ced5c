//! Symmetric tridiagonal eigenpairs by Sturm-sequence bisection and inverse
//! iteration. Only one eigenpair is computed per call, selected by its rank.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty());
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i + 1 == j {
                self.off[i]
            } else if j + 1 == i {
                self.off[j]
            } else {
                0.0
            }
        })
    }

    /// Infinity norm, used as the residual scale.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |e| e.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + self.off.get(i).map_or(0.0, |e| e.abs());
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + self.norm_inf());
        let mut count = 0;
        let mut pivot = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                let e = self.off[i - 1];
                pivot = self.diag[i] - x - e * e / pivot;
            }
            if pivot == 0.0 {
                pivot = -tiny;
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * (1.0 + lo.abs().max(hi.abs()));
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for the eigenvalue `lambda` by inverse iteration,
    /// together with the relative residual `‖Tv − λv‖ / ‖T‖`.
    pub fn eigenvector(&self, lambda: f64) -> (Vec<f64>, f64) {
        let n = self.dim();
        let scale = self.norm_inf().max(1.0);
        // A start vector with no special structure.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662466927).fract())
            .collect();
        normalize(&mut v);
        let mut residual = f64::INFINITY;
        for _ in 0..6 {
            let mut w = self.shifted_solve(lambda, &v, scale);
            normalize(&mut w);
            v = w;
            residual = self.residual(lambda, &v) / scale;
            if residual < 1e-15 {
                break;
            }
        }
        (v, residual)
    }

    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        self.mul_vec(v)
            .iter()
            .zip(v)
            .map(|(tv, vi)| (tv - lambda * vi).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Solves `(T − λI) x = b` by Gaussian elimination with partial pivoting.
    /// Zero pivots are replaced by `ε‖T‖`, which is what inverse iteration wants.
    fn shifted_solve(&self, lambda: f64, b: &[f64], scale: f64) -> Vec<f64> {
        let n = self.dim();
        let eps = f64::EPSILON * scale;
        // Row i of U holds (u0, u1, u2) at columns i, i+1, i+2.
        let mut u = vec![[0.0f64; 3]; n];
        let mut rhs = b.to_vec();
        let mut cur = [
            self.diag[0] - lambda,
            self.off.first().copied().unwrap_or(0.0),
            0.0,
        ];
        for i in 0..n {
            if i + 1 == n {
                if cur[0] == 0.0 {
                    cur[0] = eps;
                }
                u[i] = cur;
                break;
            }
            let next = [
                self.off[i],
                self.diag[i + 1] - lambda,
                self.off.get(i + 1).copied().unwrap_or(0.0),
            ];
            if next[0].abs() > cur[0].abs() {
                // swap rows i and i+1
                rhs.swap(i, i + 1);
                let m = cur[0] / next[0];
                u[i] = next;
                cur = [cur[1] - m * next[1], cur[2] - m * next[2], 0.0];
                rhs[i + 1] -= m * rhs[i];
            } else {
                if cur[0] == 0.0 {
                    cur[0] = eps;
                }
                let m = next[0] / cur[0];
                u[i] = cur;
                cur = [next[1] - m * cur[1], next[2] - m * cur[2], 0.0];
                rhs[i + 1] -= m * rhs[i];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u[i][1] * x[i + 1];
            }
            if i + 2 < n {
                s -= u[i][2] * x[i + 2];
            }
            x[i] = s / u[i][0];
        }
        x
    }

    /// Eigenpair of rank `k`, failing if the relative residual exceeds `tol`.
    pub fn eigenpair(&self, k: usize, tol: f64) -> Result<(f64, Vec<f64>)> {
        if self.off.iter().all(|&e| e == 0.0) {
            // Decoupled: the eigenpairs are the sorted diagonal and unit vectors.
            let mut order: Vec<usize> = (0..self.dim()).collect();
            order.sort_by(|&i, &j| self.diag[i].total_cmp(&self.diag[j]));
            let mut v = vec![0.0; self.dim()];
            v[order[k]] = 1.0;
            return Ok((self.diag[order[k]], v));
        }
        let lambda = self.eigenvalue(k);
        let (v, residual) = self.eigenvector(lambda);
        if residual.is_finite() && residual <= tol {
            Ok((lambda, v))
        } else {
            Err(Error::Convergence { residual })
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_solver() {
        let n = 30;
        let diag: Vec<f64> = (0..n).map(|k| ((2 * k + 2) as f64).powi(2)).collect();
        let t = SymTridiagonal::new(diag, vec![24.0; n - 1]);
        let mut reference: Vec<f64> = t
            .to_dense()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        reference.sort_by(f64::total_cmp);
        for (k, r) in reference.iter().enumerate() {
            let (lambda, v) = t.eigenpair(k, 1e-13).unwrap();
            assert!(
                (lambda - r).abs() < 1e-9 * r.abs().max(1.0),
                "{k}: {lambda} vs {r}"
            );
            let norm: f64 = v.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_matrix_gives_basis_vectors() {
        let t = SymTridiagonal::new(vec![4.0, 16.0, 36.0, 64.0], vec![0.0; 3]);
        for k in 0..4 {
            let (lambda, v) = t.eigenpair(k, 1e-13).unwrap();
            assert_eq!(lambda, t.diag[k]);
            for (i, x) in v.iter().enumerate() {
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((x.abs() - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sturm_count_brackets() {
        let t = SymTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.5]);
        assert_eq!(t.count_below(-10.0), 0);
        assert_eq!(t.count_below(10.0), 3);
        let l1 = t.eigenvalue(1);
        assert_eq!(t.count_below(l1 - 1e-9), 1);
        assert_eq!(t.count_below(l1 + 1e-9), 2);
    }
}
