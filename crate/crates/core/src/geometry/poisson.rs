//! Poisson algebras of the reduced phase spaces, given by generator-level
//! bracket tables plus defining relations, and extended to polynomials by
//! bilinearity and the Leibniz rule.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::PolyFunction;
use crate::costratified::StratumLabel;
use crate::error::{Error, Result};

/// Relative tolerance for a point to count as lying on the variety.
pub const ON_VARIETY_TOL: f64 = 1e-10;
/// Distance from `±2` below which a point of `ℂ` is a canoe vertex.
pub const VERTEX_TOL: f64 = 1e-9;

/// Values of the generators at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint(pub Vec<f64>);

#[derive(Debug, Clone)]
pub struct PoissonTable {
    generators: Vec<String>,
    brackets: Vec<Vec<PolyFunction>>,
    relations: Vec<PolyFunction>,
}

impl PoissonTable {
    /// `upper` lists `{g_i, g_j}` for `i < j`; missing pairs commute.
    pub fn new(
        generators: &[&str],
        upper: Vec<((usize, usize), PolyFunction)>,
        relations: Vec<PolyFunction>,
    ) -> Self {
        let n = generators.len();
        let mut brackets = vec![vec![PolyFunction::zero(n); n]; n];
        for ((i, j), p) in upper {
            assert!(
                i < j && j < n,
                "bracket entry ({i}, {j}) not strictly upper"
            );
            brackets[j][i] = -&p;
            brackets[i][j] = p;
        }
        Self {
            generators: generators.iter().map(|s| s.to_string()).collect(),
            brackets,
            relations,
        }
    }

    /// Exotic plane with one vertex: `x² + y² = r²`, `r ≥ 0`, with
    /// `{x,y} = 2r`, `{x,r} = 2y`, `{y,r} = −2x`.
    pub fn semicone() -> Self {
        let g = |i| PolyFunction::generator(3, i);
        let (x, y, r) = (g(0), g(1), g(2));
        let relation = &(&(&x * &x) + &(&y * &y)) - &(&r * &r);
        Self::new(
            &["x", "y", "r"],
            vec![
                ((0, 1), r.scale(2.0)),
                ((0, 2), y.scale(2.0)),
                ((1, 2), x.scale(-2.0)),
            ],
            vec![relation],
        )
    }

    /// The canoe in the chart `(X, Y, τ)`: `Y² = (X² + Y² + 4(τ − 1))τ`, with
    /// `{X,Y} = X² + Y² + 4(2τ − 1)`, `{X,τ} = 2(1 − τ)Y`, `{Y,τ} = 2τX`.
    pub fn canoe() -> Self {
        let g = |i| PolyFunction::generator(3, i);
        let c = |v| PolyFunction::constant(3, v);
        let (x, y, tau) = (g(0), g(1), g(2));
        let radius2 = &(&x * &x) + &(&y * &y);
        let xy = &(&radius2 + &tau.scale(8.0)) - &c(4.0);
        let x_tau = &(&c(1.0) - &tau) * &y.scale(2.0);
        let y_tau = (&tau * &x).scale(2.0);
        let relation = &(&y * &y) - &(&(&(&radius2 + &tau.scale(4.0)) - &c(4.0)) * &tau);
        Self::new(
            &["X", "Y", "tau"],
            vec![((0, 1), xy), ((0, 2), x_tau), ((1, 2), y_tau)],
            vec![relation],
        )
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[PolyFunction] {
        &self.relations
    }

    pub fn nvars(&self) -> usize {
        self.generators.len()
    }

    /// Table entry `{g_i, g_j}`.
    pub fn entry(&self, i: usize, j: usize) -> &PolyFunction {
        &self.brackets[i][j]
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generator(&self, name: &str) -> Result<PolyFunction> {
        Ok(PolyFunction::generator(
            self.nvars(),
            self.generator_index(name)?,
        ))
    }

    fn check_arity(&self, f: &PolyFunction) -> Result<()> {
        if f.nvars() == self.nvars() {
            Ok(())
        } else {
            Err(Error::UnknownGenerator(format!(
                "polynomial over {} generators, table has {}",
                f.nvars(),
                self.nvars()
            )))
        }
    }

    /// `{f, g} = Σ_{i,j} ∂_i f ∂_j g {g_i, g_j}`.
    pub fn bracket(&self, f: &PolyFunction, g: &PolyFunction) -> Result<PolyFunction> {
        self.check_arity(f)?;
        self.check_arity(g)?;
        let n = self.nvars();
        let df: Vec<_> = (0..n).map(|i| f.partial(i)).collect();
        let dg: Vec<_> = (0..n).map(|j| g.partial(j)).collect();
        let mut out = PolyFunction::zero(n);
        for (i, dfi) in df.iter().enumerate().filter(|(_, d)| !d.is_zero()) {
            for (j, dgj) in dg.iter().enumerate().filter(|(_, d)| !d.is_zero()) {
                let entry = &self.brackets[i][j];
                if !entry.is_zero() {
                    out = &out + &(&(dfi * dgj) * entry);
                }
            }
        }
        Ok(out)
    }

    /// Largest relation residual at `pt`, relative to the size of its terms.
    pub fn variety_residual(&self, pt: &PhasePoint) -> Result<f64> {
        if pt.0.len() != self.nvars() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, table has {} generators",
                pt.0.len(),
                self.nvars()
            )));
        }
        Ok(self
            .relations
            .iter()
            .map(|rel| {
                let (v, scale) = rel.eval_with_scale(&pt.0);
                v.abs() / scale.max(1.0)
            })
            .fold(0.0, f64::max))
    }

    fn require_on_variety(&self, pt: &PhasePoint) -> Result<()> {
        let r = self.variety_residual(pt)?;
        if r <= ON_VARIETY_TOL {
            Ok(())
        } else {
            Err(Error::OffVariety(r))
        }
    }

    /// `|{f,{g,h}} + {g,{h,f}} + {h,{f,g}}|` at an on-variety point.
    pub fn jacobi_residual(
        &self,
        f: &PolyFunction,
        g: &PolyFunction,
        h: &PolyFunction,
        pt: &PhasePoint,
    ) -> Result<f64> {
        self.require_on_variety(pt)?;
        let a = self.bracket(f, &self.bracket(g, h)?)?;
        let b = self.bracket(g, &self.bracket(h, f)?)?;
        let c = self.bracket(h, &self.bracket(f, g)?)?;
        Ok((&(&a + &b) + &c).eval(&pt.0).abs())
    }

    /// `max_rel |{g_i, rel}|` at an on-variety point.
    pub fn relation_casimir_residual(&self, generator: &str, pt: &PhasePoint) -> Result<f64> {
        self.require_on_variety(pt)?;
        let g = self.generator(generator)?;
        let mut worst = 0.0f64;
        for rel in &self.relations {
            worst = worst.max(self.bracket(&g, rel)?.eval(&pt.0).abs());
        }
        Ok(worst)
    }

    /// Antisymmetric matrix `({g_i, g_j}(pt))`.
    pub fn poisson_tensor(&self, pt: &PhasePoint) -> DMatrix<f64> {
        let n = self.nvars();
        DMatrix::from_fn(n, n, |i, j| self.brackets[i][j].eval(&pt.0))
    }
}

/// Numerical rank: singular values above `rel_tol · σ_max` (and above zero).
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// `τ ≥ 0` on the canoe over `(X, Y)`:
/// `τ = ½√(Y² + s²/16) − s/8` with `s = X² + Y² − 4`, evaluated without
/// cancellation when `s > 0`.
pub fn canoe_tau(x: f64, y: f64) -> f64 {
    let s = x * x + y * y - 4.0;
    let root = 0.5 * (y * y + s * s / 16.0).sqrt();
    if s > 0.0 {
        // (A − B) = (A² − B²)/(A + B), A² − B² = Y²/4
        0.25 * y * y / (root + s / 8.0)
    } else {
        root - s / 8.0
    }
}

/// Point of the canoe above `(X, Y)`.
pub fn canoe_point(x: f64, y: f64) -> PhasePoint {
    PhasePoint(vec![x, y, canoe_tau(x, y)])
}

/// Point of the semicone above `(x, y)`.
pub fn semicone_point(x: f64, y: f64) -> PhasePoint {
    PhasePoint(vec![x, y, x.hypot(y)])
}

/// Orbit-type stratum of `Z ∈ ℂ ≅ P`.
pub fn classify_stratum(z: Complex64) -> StratumLabel {
    if (z - 2.0).norm() < VERTEX_TOL {
        StratumLabel::Plus
    } else if (z + 2.0).norm() < VERTEX_TOL {
        StratumLabel::Minus
    } else {
        StratumLabel::Top
    }
}

/// `Z = z + 1/z`, the Weyl-invariant coordinate on `ℂ*/W ≅ ℂ`.
pub fn reduce_point(z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok(z + z.inv())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicone_brackets() {
        let table = PoissonTable::semicone();
        let x = table.generator("x").unwrap();
        let rel = table.relations()[0].clone();
        assert!(table.bracket(&x, &rel).unwrap().is_zero());
        for name in ["x", "y", "r"] {
            let g = table.generator(name).unwrap();
            assert!(table.bracket(&g, &rel).unwrap().is_zero());
        }
        assert!(matches!(
            table.generator("z"),
            Err(Error::UnknownGenerator(_))
        ));
        let foreign = PolyFunction::generator(2, 0);
        assert!(table.bracket(&foreign, &x).is_err());
    }

    #[test]
    fn canoe_xy_bracket() {
        let table = PoissonTable::canoe();
        let x = table.generator("X").unwrap();
        let y = table.generator("Y").unwrap();
        let tau = table.generator("tau").unwrap();
        let expect =
            &(&(&(&x * &x) + &(&y * &y)) + &tau.scale(8.0)) - &PolyFunction::constant(3, 4.0);
        assert_eq!(table.bracket(&x, &y).unwrap(), expect);
        assert_eq!(table.bracket(&y, &x).unwrap(), -&expect);
    }

    #[test]
    fn canoe_tau_examples() {
        assert_eq!(canoe_tau(2.0, 0.0), 0.0);
        assert_eq!(canoe_tau(-2.0, 0.0), 0.0);
        assert_eq!(canoe_tau(0.0, 0.0), 1.0);
        let table = PoissonTable::canoe();
        for i in 0..50 {
            for j in 0..50 {
                let x = -10.0 + 20.0 * i as f64 / 49.0;
                let y = -10.0 + 20.0 * j as f64 / 49.0;
                let tau = canoe_tau(x, y);
                assert!(tau >= 0.0);
                let rel = y * y - (x * x + y * y + 4.0 * (tau - 1.0)) * tau;
                assert!(rel.abs() < 1e-12, "({x}, {y}): {rel}");
                assert!(table.variety_residual(&canoe_point(x, y)).unwrap() < 1e-14);
            }
        }
    }

    #[test]
    fn off_variety_is_rejected() {
        let table = PoissonTable::canoe();
        let bad = PhasePoint(vec![1.0, 1.0, 5.0]);
        let x = table.generator("X").unwrap();
        assert!(matches!(
            table.relation_casimir_residual("X", &bad),
            Err(Error::OffVariety(_))
        ));
        assert!(matches!(
            table.jacobi_residual(&x, &x, &x, &bad),
            Err(Error::OffVariety(_))
        ));
        assert!(table.variety_residual(&PhasePoint(vec![1.0])).is_err());
    }

    #[test]
    fn strata_and_reduction() {
        assert_eq!(
            classify_stratum(Complex64::new(2.0, 0.0)),
            StratumLabel::Plus
        );
        assert_eq!(
            classify_stratum(Complex64::new(-2.0, 0.0)),
            StratumLabel::Minus
        );
        assert_eq!(
            classify_stratum(Complex64::new(0.0, 1.0)),
            StratumLabel::Top
        );
        assert_eq!(
            reduce_point(Complex64::new(1.0, 0.0)).unwrap(),
            Complex64::new(2.0, 0.0)
        );
        assert_eq!(
            reduce_point(Complex64::new(-1.0, 0.0)).unwrap(),
            Complex64::new(-2.0, 0.0)
        );
        assert_eq!(
            reduce_point(Complex64::new(0.0, 0.0)),
            Err(Error::ZeroArgument)
        );
    }

    #[test]
    fn poisson_tensor_vanishes_at_vertices() {
        let table = PoissonTable::canoe();
        for x in [2.0, -2.0] {
            let m = table.poisson_tensor(&PhasePoint(vec![x, 0.0, 0.0]));
            assert!(m.iter().all(|&v| v == 0.0));
            assert_eq!(numerical_rank(&m, 1e-10), 0);
        }
        let m = table.poisson_tensor(&canoe_point(0.3, 1.7));
        assert_eq!(m, -m.transpose());
        assert_eq!(numerical_rank(&m, 1e-10), 2);
    }
}
