//! Sparse real polynomials in a fixed, ordered list of generators.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector, one entry per generator.
pub type Monomial = Vec<u32>;

/// Finitely supported map from monomials to nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFunction {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl PolyFunction {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c)])
    }

    /// The `i`-th generator as a polynomial.
    pub fn generator(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "generator index {i} out of range");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::from_terms(nvars, [(exps, 1.0)])
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Self {
        let mut out = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial arity mismatch");
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, v)| (m.clone(), v * c)),
        )
    }

    /// `∂/∂g_i`.
    pub fn partial(&self, i: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, c)| {
                let mut d = m.clone();
                d[i] -= 1;
                (d, c * m[i] as f64)
            }),
        )
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.eval_with_scale(point).0
    }

    /// Value together with `Σ |c · monomial(point)|`, the magnitude against
    /// which rounding in the value should be judged.
    pub fn eval_with_scale(&self, point: &[f64]) -> (f64, f64) {
        assert_eq!(point.len(), self.nvars, "point arity mismatch");
        let mut value = 0.0;
        let mut scale = 0.0;
        for (m, c) in &self.terms {
            let term = m
                .iter()
                .zip(point)
                .fold(*c, |acc, (&e, &x)| acc * x.powi(e as i32));
            value += term;
            scale += term.abs();
        }
        (value, scale)
    }
}

impl Add for &PolyFunction {
    type Output = PolyFunction;

    fn add(self, rhs: &PolyFunction) -> PolyFunction {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Sub for &PolyFunction {
    type Output = PolyFunction;

    fn sub(self, rhs: &PolyFunction) -> PolyFunction {
        self + &(-rhs)
    }
}

impl Neg for &PolyFunction {
    type Output = PolyFunction;

    fn neg(self) -> PolyFunction {
        self.scale(-1.0)
    }
}

impl Mul for &PolyFunction {
    type Output = PolyFunction;

    fn mul(self, rhs: &PolyFunction) -> PolyFunction {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = PolyFunction::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let m = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for PolyFunction {
            type Output = PolyFunction;
            fn $method(self, rhs: PolyFunction) -> PolyFunction {
                (&self).$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl fmt::Display for PolyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("g{i}")
                        } else {
                            format!("g{i}^{e}")
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_cancellation() {
        let x = PolyFunction::generator(2, 0);
        let y = PolyFunction::generator(2, 1);
        let sq = &(&x + &y) * &(&x - &y);
        let expect = &(&x * &x) - &(&y * &y);
        assert_eq!(sq, expect);
        assert!((&sq - &expect).is_zero());
        assert_eq!(sq.degree(), Some(2));
        assert_eq!(sq.eval(&[3.0, 2.0]), 5.0);
    }

    #[test]
    fn partial_derivatives() {
        let x = PolyFunction::generator(2, 0);
        let y = PolyFunction::generator(2, 1);
        let f = &(&(&x * &x) * &y) + &PolyFunction::constant(2, 4.0);
        assert_eq!(f.partial(0), (&x * &y).scale(2.0));
        assert_eq!(f.partial(1), &x * &x);
        assert!(PolyFunction::constant(2, 1.0).partial(0).is_zero());
    }
}
