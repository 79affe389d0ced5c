//! Self-checks reported by `verify` and `geometry-verify`.

use std::fmt::Write as _;

use nalgebra::DVector;
use num_complex::Complex64;
use plaquette_core::characters::ModelParams;
use plaquette_core::costratified;
use plaquette_core::geometry::{
    canoe_point, momentum_o, momentum_sp, monomial_decomposition, numerical_rank, reduce_point,
    restriction_kernel, semicone_point, sp_residual, symmetric_projection, ParticleConfig,
    PhasePoint, PoissonTable,
};
use plaquette_core::mathieu;
use plaquette_core::spectrum;
use plaquette_core::theta::theta3_prime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands::{level_overlaps, COMPLETENESS_LEVELS};
use crate::output::RunConfig;

/// `(⟨ξ_n|ψ+⟩, ⟨ξ_n|ψ−⟩)` for level `n`.
pub type OverlapFn = dyn Fn(usize, &ModelParams) -> plaquette_core::Result<(f64, f64)> + Sync;

pub struct VerifyOptions<'a> {
    pub seed: u64,
    pub samples: usize,
    pub overlaps: &'a OverlapFn,
}

pub fn default_overlaps(n: usize, params: &ModelParams) -> plaquette_core::Result<(f64, f64)> {
    level_overlaps(n, params, 0)
}

impl Default for VerifyOptions<'static> {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: 100,
            overlaps: &default_overlaps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

impl SuiteResult {
    fn from_residual(name: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            max_residual: residual,
            tolerance,
            detail: None,
        }
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: false,
            max_residual: f64::NAN,
            tolerance,
            detail: Some(detail),
        }
    }

    fn with_detail(mut self, detail: Option<String>) -> Self {
        if !self.passed {
            self.detail = detail;
        }
        self
    }
}

/// Runs `body`, turning any numerical error into a failed suite.
fn suite(
    name: &str,
    tolerance: f64,
    body: impl FnOnce() -> plaquette_core::Result<(f64, Option<String>)>,
) -> SuiteResult {
    match body() {
        Ok((residual, detail)) => {
            SuiteResult::from_residual(name, residual, tolerance).with_detail(detail)
        }
        Err(e) => SuiteResult::failed(name, tolerance, e.to_string()),
    }
}

fn samples(table: &str, rng: &mut ChaCha8Rng, count: usize) -> Vec<PhasePoint> {
    (0..count)
        .map(|_| {
            let x = rng.random_range(-10.0..=10.0);
            let y = rng.random_range(-10.0..=10.0);
            if table == "canoe" {
                canoe_point(x, y)
            } else {
                semicone_point(x, y)
            }
        })
        .collect()
}

fn random_config(rng: &mut ChaCha8Rng, s: usize, l: usize) -> ParticleConfig {
    let mut draw = || -> Vec<_> {
        (0..l)
            .map(|_| DVector::from_fn(s, |_, _| rng.random_range(-1.0..1.0)))
            .collect()
    };
    let q = draw();
    let p = draw();
    ParticleConfig::new(s, q, p).expect("consistent dimensions")
}

pub fn geometry_suites(opts: &VerifyOptions) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for (name, table) in [
        ("semicone", PoissonTable::semicone()),
        ("canoe", PoissonTable::canoe()),
    ] {
        let pts = samples(name, &mut rng, opts.samples);
        let gens: Vec<_> = table
            .generators()
            .iter()
            .map(|g| table.generator(g).expect("own generator"))
            .collect();
        out.push(suite(&format!("jacobi/{name}"), 1e-9, || {
            let mut worst = 0.0f64;
            for pt in &pts {
                worst = worst.max(table.jacobi_residual(&gens[0], &gens[1], &gens[2], pt)?);
            }
            Ok((worst, None))
        }));
        out.push(suite(&format!("poisson-ideal/{name}"), 1e-9, || {
            let mut worst = 0.0f64;
            for pt in &pts {
                for g in table.generators() {
                    worst = worst.max(table.relation_casimir_residual(g, pt)?);
                }
            }
            Ok((worst, None))
        }));
    }

    let canoe = PoissonTable::canoe();
    let pts = samples("canoe", &mut rng, opts.samples);
    out.push(suite("tensor-rank/canoe", 0.0, || {
        let at_vertices = [2.0, -2.0]
            .iter()
            .map(|&x| canoe.poisson_tensor(&PhasePoint(vec![x, 0.0, 0.0])).amax())
            .fold(0.0, f64::max);
        let bad = pts
            .iter()
            .filter(|pt| numerical_rank(&canoe.poisson_tensor(pt), 1e-10) != 2)
            .count();
        let detail = format!("{bad} top-stratum points without rank 2");
        Ok((
            if bad > 0 {
                at_vertices.max(1.0)
            } else {
                at_vertices
            },
            Some(detail),
        ))
    }));

    out.push(suite("rank/symmetric-projection", 0.0, || {
        let mut excess = 0usize;
        for i in 0..1000 {
            let (s, l) = (1 + i % 3, 1 + (i / 3) % 3);
            let r = symmetric_projection(&random_config(&mut rng, s, l)).rank;
            excess = excess.max(r.saturating_sub(s.min(l)));
        }
        Ok((excess as f64, None))
    }));

    out.push(suite("momentum/sp-membership", 1e-12, || {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let cfg = random_config(&mut rng, 1 + i % 3, 1 + (i / 3) % 3);
            worst = worst.max(sp_residual(&momentum_sp(&cfg))?);
            let m = momentum_o(&cfg);
            worst = worst.max((&m + m.transpose()).amax());
        }
        Ok((worst, None))
    }));

    out.push(suite("weyl-invariance", 1e-14, || {
        let mut worst = 0.0f64;
        for _ in 0..opts.samples {
            let z = Complex64::from_polar(rng.random_range(0.1..3.0), rng.random_range(-3.0..3.0));
            let a = reduce_point(z)?;
            worst = worst.max((a - reduce_point(z.inv())?).norm() / a.norm().max(1.0));
        }
        Ok((worst, None))
    }));

    out.push(suite("decomposition/partitions", 0.0, || {
        let mut mismatches = 0usize;
        for s in 1..=6 {
            for k in 0..=20u32 {
                let len = monomial_decomposition(s, k).len();
                if len != bounded_partitions(k, s as u32) {
                    mismatches += 1;
                }
                if s >= 2
                    && restriction_kernel(s, k)?.image.len()
                        != monomial_decomposition(s - 1, k).len()
                {
                    mismatches += 1;
                }
            }
        }
        Ok((mismatches as f64, None))
    }));
    out
}

/// Partitions of `k` into parts `≤ cap` by the standard table recurrence.
fn bounded_partitions(k: u32, cap: u32) -> usize {
    let mut ways = vec![0usize; k as usize + 1];
    ways[0] = 1;
    for part in 1..=cap as usize {
        for total in part..=k as usize {
            ways[total] += ways[total - part];
        }
    }
    ways[k as usize]
}

const T_VALUES: [f64; 3] = [0.5, 0.125, 0.03125];

pub fn spectral_suites(opts: &VerifyOptions) -> Vec<SuiteResult> {
    let mut out = Vec::new();

    out.push(suite("free-anchor", 1e-12, || {
        let mut worst = 0.0f64;
        for n in 0..10 {
            let params = ModelParams::from_reduced(1.0, 0.0)?;
            let e = spectrum::energy(n, &params)? / params.hbar2_beta2();
            let exact = (n * (n + 2)) as f64 / 2.0;
            worst = worst.max((e - exact).abs());
            let xi = spectrum::eigenstate(n, &params, 0)?.xi;
            let unit = costratified::StateVector::basis(n, xi.trunc(), params);
            worst = worst.max(xi.distance(&unit));
        }
        Ok((worst, None))
    }));

    out.push(suite("spectral-equivalence", 1e-8, || {
        let mut worst = 0.0f64;
        for &nu in &[3.0, 6.0, 12.0, 24.0] {
            for &t in &T_VALUES {
                let params = ModelParams::from_reduced(t, nu)?;
                let dim = 64 + (4.0 * nu.sqrt()) as usize;
                let (values, _) = spectrum::hamiltonian_eigensystem(&params, dim)?;
                for (n, &value) in values.iter().enumerate().take(10) {
                    let e = spectrum::energy(n, &params)?;
                    worst = worst.max((e - value).abs() / value.abs());
                }
            }
        }
        Ok((worst, None))
    }));

    out.push(suite("orthonormality/xi", 1e-9, || {
        let params = ModelParams::from_reduced(1.0, 6.0)?;
        let trunc = spectrum::working_trunc(7, &params);
        let states: Vec<_> = (0..8)
            .map(|n| spectrum::eigenstate(n, &params, trunc).map(|r| r.xi))
            .collect::<plaquette_core::Result<_>>()?;
        let mut worst = 0.0f64;
        for (i, a) in states.iter().enumerate() {
            for (j, b) in states.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        Ok((worst, None))
    }));

    out.push(suite("normalization-theta", 1e-10, || {
        let mut worst = 0.0f64;
        for i in 0..=60 {
            let t = 0.01 * (500.0f64).powf(i as f64 / 60.0);
            let q = (-t).exp();
            let (mut n2, mut alt) = (0.0, 0.0);
            for m in 1..=(10.0 + (60.0 / t).sqrt()) as i64 {
                let w = (m * m) as f64 * (-t * (m * m) as f64).exp();
                n2 += w;
                alt += if m % 2 == 1 { w } else { -w };
            }
            let theta_n2 = 0.5 * q * theta3_prime(q)?;
            worst = worst.max((n2 - theta_n2).abs() / n2);
            let theta_overlap = theta3_prime(-q)? / theta3_prime(q)?;
            worst = worst.max((alt / n2 - theta_overlap).abs());
            worst = worst.max((costratified::tunneling_overlap(t)? - theta_overlap).abs());
        }
        Ok((worst, None))
    }));

    out.push(suite("tunneling-limits", 0.0, || {
        let small = costratified::tunneling_probability(0.005)?;
        let large = costratified::tunneling_probability(5.0)?;
        let violation = (small - 1e-6).max(0.0) + (0.99 - large).max(0.0);
        Ok((
            violation,
            Some(format!("P(0.005) = {small:e}, P(5) = {large}")),
        ))
    }));

    let grid: Vec<(f64, f64)> = T_VALUES
        .iter()
        .flat_map(|&t| [0.0, 0.1, 1.0, 10.0, 100.0].map(|nu| (t, nu)))
        .collect();
    let per_point: Vec<plaquette_core::Result<(f64, Option<String>)>> = grid
        .par_iter()
        .map(|&(t, nu)| {
            let params = ModelParams::from_reduced(t, nu)?;
            let overlap = costratified::tunneling_overlap(t)?;
            let (mut sum_plus, mut cross, mut range) = (0.0, 0.0, 0.0f64);
            for n in 0..COMPLETENESS_LEVELS {
                let (gp, gm) = (opts.overlaps)(n, &params)?;
                let (pp, pm) = (gp * gp, gm * gm);
                range = range.max((pp - 1.0).max(0.0)).max((pm - 1.0).max(0.0));
                sum_plus += pp;
                cross += gp * gm;
            }
            let residual = (1.0 - sum_plus).max(0.0).max((cross - overlap).abs()).max(range);
            Ok((residual, Some(format!("t = {t}, nu_tilde = {nu}: sum P+ = {sum_plus}, sum G+G- = {cross} vs {overlap}"))))
        })
        .collect();
    out.push(suite("completeness", 1e-6, || {
        let mut worst = (0.0f64, None);
        for r in per_point {
            let r = r?;
            if r.0 > worst.0 || worst.1.is_none() {
                worst = r;
            }
        }
        Ok(worst)
    }));

    out.push(suite("free-projector", 1e-10, || {
        let mut worst = 0.0f64;
        for &t in &T_VALUES {
            let params = ModelParams::from_reduced(t, 0.0)?;
            for n in 0..10 {
                let (gp, _) = (opts.overlaps)(n, &params)?;
                worst = worst.max((gp * gp - spectrum::free_projector_expectation(n, t)?).abs());
            }
        }
        Ok((worst, None))
    }));

    out.push(suite("mathieu/boundary-and-ode", 1e-7, || {
        let mut worst = 0.0f64;
        for &q in &[1.0, 4.0, 16.0, 48.0, 96.0] {
            for n in 0..6 {
                let sol = mathieu::solve_adaptive(n, q)?;
                let boundary = sol
                    .se(-std::f64::consts::FRAC_PI_2)
                    .abs()
                    .max(sol.se(0.0).abs());
                if boundary > 1e-10 {
                    worst = worst.max(1.0);
                }
                for i in 0..=32 {
                    let y = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * i as f64 / 32.0;
                    worst = worst.max(sol.ode_residual(y));
                }
            }
        }
        Ok((worst, None))
    }));
    out
}

pub fn render_report(config: &RunConfig, results: &[SuiteResult]) -> String {
    let mut out = String::new();
    writeln!(out, "{}", config.header_line()).unwrap();
    writeln!(
        out,
        "{:<28} {:<6} {:>12} {:>10}",
        "suite", "status", "max_residual", "tolerance"
    )
    .unwrap();
    for r in results {
        writeln!(
            out,
            "{:<28} {:<6} {:>12.3e} {:>10.1e}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.max_residual,
            r.tolerance
        )
        .unwrap();
        if let Some(d) = &r.detail {
            writeln!(out, "    {d}").unwrap();
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    writeln!(out, "summary: {passed}/{} suites passed", results.len()).unwrap();
    out
}
