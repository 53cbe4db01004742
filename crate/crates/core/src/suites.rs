//! Named verification suites, each a list of [`CheckReport`]s over a fixed
//! parameter grid.
//!
//! Reports come out in grid order regardless of how the work is scheduled,
//! and random inputs are drawn from seeds derived from the configured seed,
//! so a suite run is reproducible byte for byte.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::embedding::{
    adjoint_identity_check, adjointness, equivariance_defect, isometry_check, isometry_check_weighted,
    m_operator, m_operator_kernel, EmbeddingContext, Generator, TransverseRule,
};
use crate::error::{Error, Result};
use crate::exterior::reflection;
use crate::group::{bruhat_decompose, iwasawa_decompose, make_u, make_w};
use crate::intertwine::{c_u, functional_equation, gram_matrix, hermitian_eigenvalues, pairing_bruhat, CSParams};
use crate::params::{boundary_chain, chain, cohomological_limit, descend_u, validate, DescentStep, StepStatus};
use crate::quadrature::{polar_adaptive, sphere_area, GaussRule, QuadratureSpec};
use crate::report::CheckReport;
use crate::schwartz::family::{atom_family, wedge_family};
use crate::schwartz::{weighted_norm, SchwartzFn, WedgeFn};

/// Every suite name accepted by [`run_suite`] other than `all`, in the order
/// `all` runs them.
pub const SUITES: [&str; 12] = [
    "bruhat",
    "iwasawa",
    "jacobian",
    "functional-eq",
    "unramified-norm",
    "form-positivity",
    "m-operator",
    "isometry",
    "adjoint",
    "adjoint-identity",
    "equivariance",
    "chain",
];

/// Size of the parameter grid a suite sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid {
    /// The full grid, with the sample counts the checks are specified at.
    #[default]
    Default,
    /// One parameter point per window and a few samples, for quick runs.
    Smoke,
}

/// Settings shared by all suites. Unset fields fall back to each suite's
/// own grid and tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub i: Option<usize>,
    pub u: Option<f64>,
    pub s: Option<f64>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub grid: Grid,
    /// Starting radial node count; angular nodes start at half of it.
    pub quad_nodes: Option<usize>,
    /// Record wall-clock time in the reports. Off by default since it makes
    /// reports differ between runs.
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: None,
            i: None,
            u: None,
            s: None,
            tol: None,
            seed: 1,
            grid: Grid::Default,
            quad_nodes: None,
            timings: false,
        }
    }
}

impl SuiteConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn quad(&self, target: f64) -> QuadratureSpec {
        let spec = QuadratureSpec::default().with_target(target);
        match self.quad_nodes {
            Some(q) => spec.with_nodes(q, (q / 2).max(4)),
            None => spec,
        }
    }

    fn ns(&self, default: &[usize]) -> Vec<usize> {
        self.n.map(|n| vec![n]).unwrap_or_else(|| default.to_vec())
    }

    fn is(&self, default: &[usize]) -> Vec<usize> {
        self.i.map(|i| vec![i]).unwrap_or_else(|| default.to_vec())
    }

    fn smoke(&self) -> bool {
        self.grid == Grid::Smoke
    }

    fn count(&self, full: usize, smoke: usize) -> usize {
        if self.smoke() {
            smoke
        } else {
            full
        }
    }

    fn seed_for(&self, parts: &[u64]) -> u64 {
        sub_seed(self.seed, parts)
    }
}

/// Mixes `parts` into `seed` with the splitmix64 finalizer.
fn sub_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut z = seed;
    for p in parts {
        z = z.wrapping_add(p.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

fn tag(name: &str) -> u64 {
    name.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64))
}

/// Runs `name`, or every suite for `all`.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, cfg)?);
        }
        return Ok(out);
    }
    let reports = match name {
        "bruhat" => bruhat(cfg),
        "iwasawa" => iwasawa(cfg),
        "jacobian" => jacobian(cfg),
        "functional-eq" => functional_eq(cfg),
        "unramified-norm" => unramified_norm(cfg),
        "form-positivity" => form_positivity(cfg),
        "m-operator" => m_operator_suite(cfg),
        "isometry" => isometry(cfg),
        "adjoint" => adjoint(cfg),
        "adjoint-identity" => adjoint_identity(cfg),
        "equivariance" => equivariance(cfg),
        "chain" => chain_suite(cfg),
        other => return Err(Error::UnknownSuite(other.to_string())),
    }?;
    Ok(reports.into_iter().map(|r| r.with_param("seed", cfg.seed)).collect())
}

fn timed<F>(cfg: &SuiteConfig, f: F) -> Result<CheckReport>
where
    F: FnOnce() -> Result<CheckReport>,
{
    let start = Instant::now();
    let report = f()?;
    Ok(if cfg.timings {
        report.with_time(start.elapsed().as_millis() as u64)
    } else {
        report
    })
}

/// Three points inside `(lo, hi)`: a tenth of the width from either end and
/// the midpoint. Smoke grids keep the midpoint only.
fn window_points(cfg: &SuiteConfig, lo: f64, hi: f64) -> Vec<f64> {
    if let Some(u) = cfg.u {
        return vec![u];
    }
    if !(hi > lo) {
        return Vec::new();
    }
    let w = hi - lo;
    if cfg.smoke() {
        vec![lo + w / 2.0]
    } else {
        vec![lo + 0.1 * w, lo + w / 2.0, hi - 0.1 * w]
    }
}

fn embedding_window(n: usize, i: usize) -> (f64, f64) {
    let lo = 1.0 / (n as f64 - 1.0);
    let hi = 1.0 - 2.0 * i as f64 / (n as f64 - 1.0);
    // (4, 1) has lo = hi, but 1 - 2/3 rounds above 1/3
    if i + 1 > n / 2 || hi - lo < 1e-12 {
        (lo, lo)
    } else {
        (lo, hi)
    }
}

/// Valid embedding contexts over the `(n, i)` grid, three `u` per window.
fn embedding_grid(cfg: &SuiteConfig, ns: &[usize], is: &[usize]) -> Result<Vec<EmbeddingContext>> {
    let mut out = Vec::new();
    for n in cfg.ns(ns) {
        for i in cfg.is(is) {
            let (lo, hi) = embedding_window(n, i);
            for u in window_points(cfg, lo, hi) {
                out.push(EmbeddingContext::new(n, i, u)?);
            }
        }
    }
    Ok(out)
}

fn uniform_points(rng: &mut ChaCha8Rng, count: usize, dim: usize, half: f64, min_norm: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-half..half)).collect();
        if x.iter().map(|v| v * v).sum::<f64>().sqrt() >= min_norm {
            out.push(x);
        }
    }
    out
}

fn ctx_params(r: CheckReport, ctx: &EmbeddingContext) -> CheckReport {
    r.with_param("n", ctx.big.n)
        .with_param("i", ctx.big.i)
        .with_param("u", ctx.big.u)
        .with_param("u_small", ctx.small.u)
}

fn spread(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    (mean, (max - min) / mean.abs())
}

fn bruhat(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let count = cfg.count(1000, 50);
    cfg.ns(&[2, 3, 4, 5, 6])
        .into_par_iter()
        .map(|n| {
            timed(cfg, || {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(&[tag("bruhat"), n as u64]));
                let w = make_w(n);
                let mut err: f64 = 0.0;
                for x in uniform_points(&mut rng, count, n - 1, 3.0, 1e-3) {
                    let target = w.mul(&make_u(&x)).mul(&w);
                    err = err.max(bruhat_decompose(&x)?.reconstruct().distance(&target));
                }
                Ok(CheckReport::bound(
                    "bruhat",
                    err,
                    cfg.tol(1e-10),
                    "w u(x) w = u(z) w m d(a) u(y) with z = y = 2x/|x|^2, m the reflection in x, a = |x|^2/2",
                )
                .with_param("n", n)
                .with_param("samples", count))
            })
        })
        .collect()
}

fn iwasawa(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let count = cfg.count(1000, 50);
    cfg.ns(&[2, 3, 4, 5, 6])
        .into_par_iter()
        .map(|n| {
            timed(cfg, || {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(&[tag("iwasawa"), n as u64]));
                let w = make_w(n);
                let mut err: f64 = 0.0;
                for x in uniform_points(&mut rng, count, n - 1, 3.0, 0.0) {
                    let f = iwasawa_decompose(&x);
                    let target = make_u(&x).mul(&w);
                    err = err
                        .max(f.reconstruct().distance(&target))
                        .max(f.k.form_deviation())
                        .max(f.k.orthogonality_deviation());
                }
                Ok(CheckReport::bound(
                    "iwasawa",
                    err,
                    cfg.tol(1e-10),
                    "u(x) w = k d(a) u(y) with a = 1 + |x|^2/2, y = x/a, k in K",
                )
                .with_param("n", n)
                .with_param("samples", count))
            })
        })
        .collect()
}

fn bump(r: f64) -> f64 {
    if r <= 1.0 || r >= 2.0 {
        0.0
    } else {
        (-1.0 / ((r - 1.0) * (2.0 - r))).exp()
    }
}

/// `f(y) = bump(|y|) (1 + y_1^2/(2|y|^2))`, supported on `1 < |y| < 2`.
fn annulus_profile(y: &[f64]) -> f64 {
    let r2: f64 = y.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return 0.0;
    }
    bump(r2.sqrt()) * (1.0 + 0.5 * y[0] * y[0] / r2)
}

fn jacobian(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let ds: Vec<usize> = cfg.ns(&[3, 4]).into_iter().map(|n| n - 1).collect();
    let spec = cfg.quad(1e-10).with_nodes(cfg.quad_nodes.unwrap_or(200), 8);
    let radial = GaussRule::tanh_sinh(1.0, 2.0, 0.02, 400);
    let mut out = Vec::new();
    for d in ds {
        let dd = d as f64;
        let anchor = "int f(2x/|x|^2) dx = int f(x) (|x|^2/2)^{-(n-1)} dx";
        let r = timed(cfg, || {
            let lhs = polar_adaptive(d, 0.0, 2.0, &spec, &|x: &[f64]| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let y: Vec<f64> = x.iter().map(|v| 2.0 * v / r2).collect();
                Complex64::new(annulus_profile(&y), 0.0)
            })?
            .value;
            let oracle = sphere_area(d) * (1.0 + 0.5 / dd) * radial.integrate(|r| bump(r) * (r * r / 2.0).powf(-dd) * r.powf(dd - 1.0));
            Ok(CheckReport::compare("jacobian", lhs, Complex64::new(oracle, 0.0), cfg.tol(1e-8), anchor)
                .with_param("n", d + 1)
                .with_param("side", "inversion"))
        })?;
        out.push(r);
        let r = timed(cfg, || {
            let rhs = polar_adaptive(d, 0.0, 2.0, &spec, &|x: &[f64]| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Complex64::new(annulus_profile(x) * (r2 / 2.0).powf(-dd), 0.0)
            })?
            .value;
            let oracle = sphere_area(d) * (1.0 + 0.5 / dd) * radial.integrate(|r| bump(2.0 / r) * r.powf(dd - 1.0));
            Ok(CheckReport::compare("jacobian", rhs, Complex64::new(oracle, 0.0), cfg.tol(1e-8), anchor)
                .with_param("n", d + 1)
                .with_param("side", "weighted"))
        })?;
        out.push(r);
    }
    Ok(out)
}

fn functional_eq(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let quad = cfg.quad(1e-11);
    let anchor = "Gamma(s) int |x|^{-2s} f^ = Gamma((n-1)/2 - s) int |x|^{2s-(n-1)} f";
    let mut jobs: Vec<(usize, usize, SchwartzFn, f64)> = Vec::new();
    for n in cfg.ns(&[3, 4, 5]) {
        let d = n as f64 - 1.0;
        let svals: Vec<f64> = match cfg.s {
            Some(s) => vec![s],
            None => {
                let k = cfg.count(5, 2);
                (1..=k).map(|j| d / 2.0 * j as f64 / (k + 1) as f64).collect()
            }
        };
        let atoms = atom_family(n - 1, cfg.count(10, 2), 1, cfg.seed_for(&[tag("functional-eq"), n as u64]));
        for (a, f) in atoms.into_iter().enumerate() {
            for &s in &svals {
                jobs.push((n, a, f.clone(), s));
            }
        }
    }
    let mut out: Vec<CheckReport> = jobs
        .par_iter()
        .map(|(n, a, f, s)| {
            timed(cfg, || {
                let (lhs, rhs) = functional_equation(f, *s, *n, &quad)?;
                Ok(CheckReport::compare("functional-eq", lhs, rhs, cfg.tol(1e-6), anchor)
                    .with_param("n", *n)
                    .with_param("s", *s)
                    .with_param("atom", *a))
            })
        })
        .collect::<Result<_>>()?;
    if cfg.ns(&[3]).contains(&3) {
        let svals: Vec<f64> = match cfg.s {
            Some(s) => vec![s],
            None => vec![0.25, 0.5, 0.75],
        };
        let g = SchwartzFn::gaussian(2, 1.0);
        for s in svals {
            out.push(timed(cfg, || {
                let (lhs, _) = functional_equation(&g, s, 3, &quad)?;
                let exact = PI * gamma(s) * gamma(1.0 - s);
                Ok(CheckReport::compare(
                    "functional-eq-gaussian",
                    lhs,
                    Complex64::new(exact, 0.0),
                    cfg.tol(1e-8),
                    "self-dual Gaussian on R^2: both sides equal pi Gamma(s) Gamma(1-s)",
                )
                .with_param("n", 3)
                .with_param("s", s))
            })?);
        }
    }
    Ok(out)
}

fn unramified_norm(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let quad = cfg.quad(1e-9);
    let us = cfg.u.map(|u| vec![u]).unwrap_or_else(|| {
        if cfg.smoke() {
            vec![0.5]
        } else {
            vec![0.3, 0.5, 0.7]
        }
    });
    let mut grid = Vec::new();
    for n in cfg.ns(&[3, 4, 5]) {
        for &u in &us {
            grid.push((n, u));
        }
    }
    let per_ctx: Vec<Vec<CheckReport>> = grid
        .par_iter()
        .map(|&(n, u)| {
            let start = Instant::now();
            let p = CSParams::new(n, 0, u);
            p.validate_form()?;
            let atoms = atom_family(n - 1, cfg.count(5, 3), 1, cfg.seed_for(&[tag("unramified-norm"), n as u64]));
            let ratios = atoms
                .par_iter()
                .map(|f| {
                    let w = WedgeFn::scalar(f.clone());
                    let pair = pairing_bruhat(&w, &w, &p, &quad)?.value.re;
                    Ok(pair / weighted_norm(&f.fourier(), u, n, &quad)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            let (mean, dev) = spread(&ratios);
            let ms = start.elapsed().as_millis() as u64;
            let anchor = "<f, I(u) f> = c(u) int |x|^{-(n-1)u} |f^|^2, c(u) = pi^{(n-1)/2} Gamma((n-1)u/2) / Gamma((n-1)(1-u)/2)";
            let finish = |r: CheckReport| {
                let r = r.with_param("n", n).with_param("u", u).with_param("atoms", ratios.len());
                if cfg.timings {
                    r.with_time(ms)
                } else {
                    r
                }
            };
            Ok(vec![
                finish(CheckReport::bound("unramified-norm-constancy", dev, cfg.tol(1e-3), anchor).with_param("ratio_mean", mean)),
                finish(CheckReport::compare(
                    "unramified-norm",
                    Complex64::new(mean, 0.0),
                    Complex64::new(c_u(n, u), 0.0),
                    cfg.tol(1e-3),
                    anchor,
                )),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per_ctx.into_iter().flatten().collect())
}

fn form_positivity(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let quad = cfg.quad(1e-6);
    let mut grid = Vec::new();
    for n in cfg.ns(&[3, 4, 5]) {
        for i in cfg.is(&[0, 1]) {
            if i + 1 > n / 2 {
                continue;
            }
            let hi = 1.0 - 2.0 * i as f64 / (n as f64 - 1.0);
            for u in window_points(cfg, 0.0, hi) {
                grid.push((n, i, u));
            }
        }
    }
    let threshold = cfg.tol(1e10);
    grid.par_iter()
        .map(|&(n, i, u)| {
            timed(cfg, || {
                let p = CSParams::new(n, i, u);
                p.validate_form()?;
                let fam = wedge_family(n - 1, i, cfg.count(6, 3), 1, cfg.seed_for(&[tag("form-positivity"), n as u64, i as u64]))?;
                let ev = hermitian_eigenvalues(&gram_matrix(&fam, &p, &quad)?);
                let (min, max) = (ev[0], ev[ev.len() - 1]);
                let cond = if min > 0.0 { max / min } else { f64::MAX };
                Ok(CheckReport::bound(
                    "form-positivity",
                    cond,
                    threshold,
                    "the form <phi, psi> on the Fourier model is positive definite for 0 < u < 1 - 2i/(n-1); err is the Gram condition number",
                )
                .with_param("n", n)
                .with_param("i", i)
                .with_param("u", u)
                .with_param("atoms", fam.len())
                .with_param("min_eigenvalue", min)
                .with_param("max_eigenvalue", max))
            })
        })
        .collect()
}

fn m_operator_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let rule = TransverseRule::default();
    let count = cfg.count(50, 5);
    let mut grid = Vec::new();
    for n in cfg.ns(&[3, 4, 5]) {
        for i in cfg.is(&[0, 1]) {
            grid.push((n, i));
        }
    }
    grid.par_iter()
        .map(|&(n, i)| {
            timed(cfg, || {
                let (lo, hi) = embedding_window(n, i);
                let ctx = match cfg.u {
                    Some(u) if validate(n, i, u).ok => Some(EmbeddingContext::new(n, i, u)?),
                    Some(_) => None,
                    None if hi > lo => Some(EmbeddingContext::new(n, i, (lo + hi) / 2.0)?),
                    None => None,
                };
                // outside the window the kernel is still defined for any lambda > 0
                let u = ctx.map(|c| c.big.u).unwrap_or(cfg.u.unwrap_or(0.5));
                let lambda = (n as f64 - 1.0) * (1.0 - u);
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(&[tag("m-operator"), n as u64, i as u64]));
                let mut worst: f64 = 0.0;
                for x in uniform_points(&mut rng, count, n - 2, 2.0, 0.05) {
                    let m = match &ctx {
                        Some(c) => m_operator(&x, c, &rule)?,
                        None => m_operator_kernel(&x, i, lambda, &rule)?,
                    };
                    worst = worst.max(m.max_rel_deviation());
                }
                Ok(CheckReport::bound(
                    "m-operator",
                    worst,
                    cfg.tol(1e-4),
                    "M_i(x) = int ds F_t[m_i(x,t) |(x,t)|^{-lambda}](s) = m_i((x,0)) |x|^{-lambda}",
                )
                .with_param("n", n)
                .with_param("i", i)
                .with_param("u", u)
                .with_param("lambda", lambda)
                .with_param("kernel_only", ctx.is_none())
                .with_param("samples", count))
            })
        })
        .collect()
}

fn isometry(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let quad = cfg.quad(1e-8);
    let ctxs = embedding_grid(cfg, &[3, 4, 5], &[0, 1])?;
    let per_ctx: Vec<Vec<CheckReport>> = ctxs
        .par_iter()
        .map(|ctx| {
            let start = Instant::now();
            let (n, i) = (ctx.big.n, ctx.big.i);
            let fam = wedge_family(n - 2, i, cfg.count(6, 3), 1, cfg.seed_for(&[tag("isometry"), n as u64, i as u64]))?;
            let ratios = fam
                .par_iter()
                .map(|f| Ok(isometry_check(f, ctx, &quad)?.ratio))
                .collect::<Result<Vec<f64>>>()?;
            let (mean, dev) = spread(&ratios);
            let mut out = vec![
                CheckReport::bound(
                    "isometry-constancy",
                    dev,
                    cfg.tol(1e-3),
                    "<J phi, J phi> in the larger form is a fixed multiple of <phi, phi> in the smaller one",
                )
                .with_param("ratio_mean", mean),
                CheckReport::compare(
                    "isometry-constant",
                    Complex64::new(mean, 0.0),
                    Complex64::new(PI, 0.0),
                    cfg.tol(1e-3),
                    "the transverse integrals collapse to pi M_i(x), so the ratio is pi",
                ),
            ];
            if i == 0 {
                let exact = ctx.transverse_mass();
                let mut worst = exact;
                for f in &fam {
                    let r = isometry_check_weighted(f, ctx, &quad)?.ratio;
                    if (r - exact).abs() >= (worst - exact).abs() {
                        worst = r;
                    }
                }
                out.push(CheckReport::compare(
                    "isometry-unramified",
                    Complex64::new(worst, 0.0),
                    Complex64::new(exact, 0.0),
                    cfg.tol(1e-4),
                    "weighted L^2 norms: ratio int (1 + s^2)^{-(n-1)u/2} ds = sqrt(pi) Gamma(p - 1/2) / Gamma(p)",
                ));
            }
            let ms = start.elapsed().as_millis() as u64;
            Ok(out
                .into_iter()
                .map(|r| {
                    let r = ctx_params(r, ctx).with_param("atoms", fam.len());
                    if cfg.timings {
                        r.with_time(ms)
                    } else {
                        r
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_ctx.into_iter().flatten().collect())
}

/// Contexts for the adjoint suites: the unramified windows of `n = 3, 4`
/// and the ramified `(5, 1)` window, since `(4, 1)` has none.
fn adjoint_contexts(cfg: &SuiteConfig) -> Result<Vec<EmbeddingContext>> {
    let defaults = [(3usize, 0usize, 0.6), (4, 0, 0.6), (5, 1, 0.4)];
    let mut out = Vec::new();
    for (n, i, u) in defaults {
        if cfg.n.is_some_and(|m| m != n) || cfg.i.is_some_and(|j| j != i) {
            continue;
        }
        out.push(EmbeddingContext::new(n, i, cfg.u.unwrap_or(u))?);
    }
    if out.is_empty() {
        if let (Some(n), Some(i), Some(u)) = (cfg.n, cfg.i, cfg.u) {
            out.push(EmbeddingContext::new(n, i, u)?);
        }
    }
    Ok(out)
}

fn adjoint(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let quad = cfg.quad(1e-6);
    let mut jobs = Vec::new();
    for ctx in adjoint_contexts(cfg)? {
        let (n, i) = (ctx.big.n, ctx.big.i);
        let k = cfg.count(3, 1);
        let gs = wedge_family(n - 2, i, k, 1, cfg.seed_for(&[tag("adjoint-g"), n as u64]))?;
        let fs = wedge_family(n - 1, i, k, 1, cfg.seed_for(&[tag("adjoint-f"), n as u64]))?;
        for (a, (g, f)) in gs.into_iter().zip(fs).enumerate() {
            jobs.push((ctx, a, g, f));
        }
    }
    jobs.par_iter()
        .map(|(ctx, a, g, f)| {
            timed(cfg, || {
                let (lhs, rhs) = adjointness(g, f, ctx, &quad)?;
                Ok(ctx_params(
                    CheckReport::compare(
                        "adjoint",
                        lhs,
                        rhs,
                        cfg.tol(1e-3),
                        "<J g, f> = <g, J* f> with J* f(y) = int (1 + s^2)^{-(n-1)u/2} f(y, |y| s) ds",
                    ),
                    ctx,
                )
                .with_param("pair", *a))
            })
        })
        .collect()
}

fn adjoint_identity(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let quad = cfg.quad(1e-6);
    let mut jobs = Vec::new();
    for ctx in adjoint_contexts(cfg)? {
        let (n, i) = (ctx.big.n, ctx.big.i);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(&[tag("adjoint-identity"), n as u64]));
        let samples = uniform_points(&mut rng, cfg.count(10, 4), n - 2, 1.0, 0.0);
        let mut psis = Vec::new();
        if i == 0 {
            psis.push(WedgeFn::scalar(SchwartzFn::gaussian(n - 1, 1.0)));
        }
        psis.extend(wedge_family(n - 1, i, cfg.count(2, 1), 1, cfg.seed_for(&[tag("adjoint-identity-psi"), n as u64]))?);
        for (a, psi) in psis.into_iter().enumerate() {
            jobs.push((ctx, a, psi, samples.clone()));
        }
    }
    jobs.par_iter()
        .map(|(ctx, a, psi, samples)| {
            timed(cfg, || Ok(adjoint_identity_check(psi, ctx, samples, &quad, cfg.tol(1e-3))?.with_param("psi", *a)))
        })
        .collect()
}

fn equivariance(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut ctxs = Vec::new();
    for n in cfg.ns(&[3, 4, 5]) {
        for i in cfg.is(&[0, 1]) {
            let (lo, hi) = embedding_window(n, i);
            if let Some(u) = cfg.u {
                ctxs.push(EmbeddingContext::new(n, i, u)?);
            } else if hi > lo {
                ctxs.push(EmbeddingContext::new(n, i, (lo + hi) / 2.0)?);
            }
        }
    }
    let mut out = Vec::new();
    for ctx in ctxs {
        let (n, i) = (ctx.big.n, ctx.big.i);
        let dim = n - 2;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed_for(&[tag("equivariance"), n as u64, i as u64]));
        let phi = &wedge_family(dim, i, 1, 1, rng.random())?[0];
        let points = uniform_points(&mut rng, 20, n - 1, 1.5, 0.0);
        let shift: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect();
        let rotation = if dim == 1 {
            DMatrix::from_element(1, 1, -1.0)
        } else {
            let a: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            reflection(&a)? * reflection(&b)?
        };
        for (label, gen) in [
            ("translation", Generator::Translation(shift)),
            ("rotation", Generator::Rotation(rotation)),
            ("dilation", Generator::Dilation(1.7)),
        ] {
            out.push(timed(cfg, || {
                let dev = equivariance_defect(&gen, phi, &ctx, &points)?;
                Ok(ctx_params(
                    CheckReport::bound(
                        "equivariance",
                        dev,
                        cfg.tol(1e-6),
                        "J(h phi) = h (J phi) for h in the parabolic subgroup of the smaller group",
                    ),
                    &ctx,
                )
                .with_param("generator", label)
                .with_param("points", points.len()))
            })?);
        }
    }
    Ok(out)
}

fn chain_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for m in cfg.ns(&[3, 4, 5, 6, 7, 8]) {
        let degrees: Vec<usize> = match cfg.i {
            Some(i) => vec![i],
            None => (0..m / 2).collect(),
        };
        for i in degrees {
            let limit = cohomological_limit(m, i)?;
            let next = 1.0 - 2.0 * i as f64 / (m as f64 - 2.0);
            out.push(
                CheckReport::compare(
                    "chain-boundary",
                    Complex64::new(descend_u(m, limit), 0.0),
                    Complex64::new(next, 0.0),
                    cfg.tol(1e-14),
                    "u = 1 - 2i/(m-1) descends to u' = 1 - 2i/(m-2)",
                )
                .with_param("m", m)
                .with_param("i", i),
            );
            let steps = boundary_chain(m, i)?;
            let (last, status) = steps[steps.len() - 1];
            // i = 0 never becomes tempered; those chains stop at m = 2
            let ok = if i == 0 {
                status == StepStatus::Bottom && last.m == 2
            } else {
                status == StepStatus::Tempered && last.i == last.m / 2 && last.m == 2 * i + 1
            };
            out.push(
                CheckReport::bound(
                    "chain-termination",
                    if ok { 0.0 } else { 1.0 },
                    0.0,
                    "boundary chains descend until i = [m/2], or to m = 2 when i = 0",
                )
                .with_param("m", m)
                .with_param("i", i)
                .with_param("final_m", last.m)
                .with_param("steps", steps.len()),
            );
        }
    }
    if let (Some(n), Some(i), Some(u)) = (cfg.n, cfg.i, cfg.u) {
        let steps = chain(n, i, u);
        let lambda = steps[0].0.lambda();
        let dev = steps.iter().map(|(s, _)| (s.lambda() - lambda).abs()).fold(0.0, f64::max);
        out.push(
            CheckReport::bound(
                "chain-lambda",
                dev / lambda.abs().max(1.0),
                cfg.tol(1e-14),
                "(m-1)(1-u_m) is constant along a chain",
            )
            .with_param("n", n)
            .with_param("i", i)
            .with_param("u", u)
            .with_param("steps", steps.len()),
        );
    }
    Ok(out)
}

/// One row of the descent table written by [`chain_table_csv`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    /// `interior` for the chain started at `(n, i, u)`, `boundary` for the
    /// chain of upper limits.
    pub kind: &'static str,
    pub m: usize,
    pub i: usize,
    pub u: f64,
    /// `1 - 2i/(m-1)`.
    pub limit: f64,
    pub status: StepStatus,
}

/// The interior chain from `(n, i, u)` followed by the boundary chain of
/// `(n, i)`, when `i` is in range.
pub fn chain_rows(n: usize, i: usize, u: f64) -> Vec<ChainRow> {
    let row = |kind, (s, status): (DescentStep, StepStatus)| ChainRow {
        kind,
        m: s.m,
        i: s.i,
        u: s.u_m,
        limit: 1.0 - 2.0 * s.i as f64 / (s.m as f64 - 1.0),
        status,
    };
    let mut rows: Vec<ChainRow> = chain(n, i, u).into_iter().map(|e| row("interior", e)).collect();
    if let Ok(b) = boundary_chain(n, i) {
        rows.extend(b.into_iter().map(|e| row("boundary", e)));
    }
    rows
}

/// [`chain_rows`] as CSV with header `kind,m,i,u,limit,status`.
pub fn chain_table_csv(n: usize, i: usize, u: f64) -> String {
    let mut s = String::from("kind,m,i,u,limit,status\n");
    for r in chain_rows(n, i, u) {
        s.push_str(&format!("{},{},{},{},{},{}\n", r.kind, r.m, r.i, r.u, r.limit, r.status.as_str()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smoke() -> SuiteConfig {
        SuiteConfig {
            grid: Grid::Smoke,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(matches!(run_suite("nope", &smoke()), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(1, &[1, 2]), sub_seed(1, &[2, 1]));
        assert_ne!(sub_seed(1, &[3]), sub_seed(2, &[3]));
        assert_eq!(sub_seed(5, &[7, 8]), sub_seed(5, &[7, 8]));
    }

    #[test]
    fn window_points_sit_inside() {
        let pts = window_points(&SuiteConfig::default(), 0.25, 0.5);
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|u| *u > 0.25 && *u < 0.5));
        assert!(window_points(&SuiteConfig::default(), 1.0 / 3.0, 1.0 / 3.0).is_empty());
    }

    #[test]
    fn group_suites_pass_on_smoke_grid() {
        for s in ["bruhat", "iwasawa", "chain"] {
            let reports = run_suite(s, &smoke()).unwrap();
            assert!(!reports.is_empty());
            assert!(reports.iter().all(|r| r.pass), "{s}: {reports:?}");
        }
    }

    #[test]
    fn chain_table_for_an_empty_window() {
        let csv = chain_table_csv(6, 2, 0.19);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "kind,m,i,u,limit,status");
        assert!(lines[1].starts_with("interior,6,2,0.19,"));
        assert!(lines[1].ends_with("window-collapsed"));
        assert!(lines.last().unwrap().starts_with("boundary,5,2,"));
        assert!(lines.last().unwrap().ends_with("tempered"));
    }

    #[test]
    fn explicit_parameters_reach_the_checks() {
        let cfg = SuiteConfig {
            n: Some(3),
            s: Some(0.5),
            tol: Some(1e-6),
            ..smoke()
        };
        let reports = run_suite("functional-eq", &cfg).unwrap();
        let gauss = reports.iter().find(|r| r.check_name == "functional-eq-gaussian").unwrap();
        assert!((gauss.lhs[0] - PI * PI).abs() < 1e-8);
        assert!(reports.iter().all(|r| r.pass));
        let bad = SuiteConfig {
            n: Some(4),
            i: Some(1),
            u: Some(0.3),
            ..smoke()
        };
        assert!(run_suite("isometry", &bad).is_err());
    }
}
