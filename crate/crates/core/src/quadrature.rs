//! Fixed-order Gauss–Legendre quadrature.

use std::f64::consts::PI;

/// Default node count for inner products on `[0,π]`.
pub const DEFAULT_NODES: usize = 512;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1,1]`, found by Newton iteration on `P_n`
    /// from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(x, w)` pairs mapped onto `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.points(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// `∫₀^π f g dx/π`, the inner product in which the constant 1 has norm 1.
    pub fn inner_product_0_pi<F, G>(&self, f: F, g: G) -> f64
    where
        F: Fn(f64) -> f64,
        G: Fn(f64) -> f64,
    {
        self.integrate(0.0, PI, |x| f(x) * g(x)) / PI
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let gl = GaussLegendre::new(5);
        // degree 9 is integrated exactly by 5 nodes
        let v = gl.integrate(-1.0, 1.0, |x| x.powi(8) + x.powi(3));
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        let w: f64 = gl.points(0.0, 3.0).map(|(_, w)| w).sum();
        assert!((w - 3.0).abs() < 1e-14);
    }

    #[test]
    fn trigonometric_integrals() {
        let gl = GaussLegendre::new(DEFAULT_NODES);
        let v = gl.integrate(0.0, PI, |x| x.sin().powi(2));
        assert!((v - PI / 2.0).abs() < 1e-13);
        let one = gl.inner_product_0_pi(|_| 1.0, |_| 1.0);
        assert!((one - 1.0).abs() < 1e-13);
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        for n in [1, 2, 7, 64, 256] {
            let gl = GaussLegendre::new(n);
            assert!(gl.nodes.windows(2).all(|w| w[0] < w[1]));
            for i in 0..n {
                assert!((gl.nodes[i] + gl.nodes[n - 1 - i]).abs() < 1e-15);
            }
        }
    }
}
