//! Node/weight tables for the integrals in this crate.
//!
//! Gauss rules are built with the Golub–Welsch eigenvalue method, polished by
//! Newton steps on the three-term recurrence, with Christoffel weights. The
//! polar rule integrates `f(x) |x|^{-alpha}` over a ball in `R^d` with the
//! singular weight absorbed into a radial Gauss–Jacobi rule, so the origin is
//! never sampled.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Environment variable capping the number of integrand evaluations.
pub const BUDGET_ENV: &str = "CS_EMBED_QUAD_BUDGET";

static NODES_USED: AtomicU64 = AtomicU64::new(0);
static BUDGET: OnceLock<Option<u64>> = OnceLock::new();

fn budget_limit() -> Option<u64> {
    *BUDGET.get_or_init(|| std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()))
}

/// Records `count` integrand evaluations against the global budget.
pub fn charge(count: u64) -> Result<()> {
    let used = NODES_USED.fetch_add(count, Ordering::Relaxed) + count;
    match budget_limit() {
        Some(limit) if used > limit => Err(Error::NodeBudgetExhausted { limit }),
        _ => Ok(()),
    }
}

/// Total integrand evaluations charged so far in this process.
pub fn nodes_used() -> u64 {
    NODES_USED.load(Ordering::Relaxed)
}

/// A one-dimensional rule `sum_k w_k f(x_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Gauss–Legendre on `[-1, 1]`.
    pub fn legendre(n: usize) -> Self {
        Self::jacobi(n, 0.0, 0.0)
    }

    /// Gauss–Jacobi on `[-1, 1]` with weight `(1-x)^alpha (1+x)^beta`.
    pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Self {
        assert!(alpha > -1.0 && beta > -1.0);
        let ab = alpha + beta;
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n);
        for j in 0..n {
            let jf = j as f64;
            let a = if j == 0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * jf + ab) * (2.0 * jf + ab + 2.0))
            };
            diag.push(a);
            let k = jf + 1.0;
            let b2 = if j == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * k * (k + alpha) * (k + beta) * (k + ab)
                    / ((2.0 * k + ab).powi(2) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0))
            };
            off.push(b2.sqrt());
        }
        let log_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
            - ln_gamma(ab + 2.0);
        golub_welsch(&diag, &off, log_mu0)
    }

    /// Generalized Gauss–Laguerre on `[0, inf)` with weight `x^alpha e^{-x}`.
    pub fn laguerre(n: usize, alpha: f64) -> Self {
        assert!(alpha > -1.0);
        let diag: Vec<f64> = (0..n).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
        let off: Vec<f64> = (0..n)
            .map(|j| {
                let k = j as f64 + 1.0;
                (k * (k + alpha)).sqrt()
            })
            .collect();
        golub_welsch(&diag, &off, ln_gamma(alpha + 1.0))
    }

    /// Gauss–Hermite on the real line with weight `e^{-x^2}`.
    pub fn hermite(n: usize) -> Self {
        let diag = vec![0.0; n];
        let off: Vec<f64> = (0..n).map(|j| ((j as f64 + 1.0) / 2.0).sqrt()).collect();
        golub_welsch(&diag, &off, 0.5 * std::f64::consts::PI.ln())
    }

    /// Maps a rule on `[-1, 1]` to `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> Self {
        let half = (hi - lo) / 2.0;
        let mid = (hi + lo) / 2.0;
        GaussRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    /// Radial rule on `[0, r_max]` for the weight `r^gamma`:
    /// `int_0^R r^gamma g(r) dr ~ sum w_k g(r_k)`.
    pub fn radial(n: usize, gamma: f64, r_max: f64) -> Self {
        let base = Self::jacobi(n, 0.0, gamma);
        let scale = (r_max / 2.0).powf(gamma + 1.0);
        GaussRule {
            nodes: base.nodes.iter().map(|x| r_max * (1.0 + x) / 2.0).collect(),
            weights: base.weights.iter().map(|w| w * scale).collect(),
        }
    }

    /// Tanh-sinh rule on `[lo, hi]` with step `h` and `levels` steps per side.
    pub fn tanh_sinh(lo: f64, hi: f64, h: f64, levels: usize) -> Self {
        use std::f64::consts::FRAC_PI_2;
        let half = (hi - lo) / 2.0;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for k in -(levels as i64)..=(levels as i64) {
            let t = k as f64 * h;
            let s = FRAC_PI_2 * t.sinh();
            let cosh_s = s.cosh();
            // distance to the nearer endpoint, computed without cancellation
            let gap = half / (s.abs().exp() * cosh_s);
            let w = h * half * FRAC_PI_2 * t.cosh() / (cosh_s * cosh_s);
            if gap <= 0.0 || w == 0.0 {
                continue;
            }
            let x = if s < 0.0 { lo + gap } else { hi - gap };
            if x <= lo || x >= hi {
                continue;
            }
            nodes.push(x);
            weights.push(w);
        }
        GaussRule { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}

/// Eigenvalue solve of the Jacobi matrix plus Newton polish and Christoffel
/// weights. `off[j]` couples `j` and `j + 1`; `off[n-1]` is `b_n`.
fn golub_welsch(diag: &[f64], off: &[f64], log_mu0: f64) -> GaussRule {
    let n = diag.len();
    if n == 0 {
        return GaussRule {
            nodes: vec![],
            weights: vec![],
        };
    }
    let mut jm = DMatrix::zeros(n, n);
    for j in 0..n {
        jm[(j, j)] = diag[j];
        if j + 1 < n {
            jm[(j, j + 1)] = off[j];
            jm[(j + 1, j)] = off[j];
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p0 = (-0.5 * log_mu0).exp();
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp, _) = orthonormal_eval(diag, off, p0, *x);
            if dp == 0.0 || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, _, sum_sq) = orthonormal_eval(diag, off, p0, *x);
        weights.push(if sum_sq.is_finite() { 1.0 / sum_sq } else { 0.0 });
    }
    GaussRule { nodes, weights }
}

/// Returns `(p_n(x), p_n'(x), sum_{j<n} p_j(x)^2)` for orthonormal `p_j`.
fn orthonormal_eval(diag: &[f64], off: &[f64], p0: f64, x: f64) -> (f64, f64, f64) {
    let n = diag.len();
    let (mut p_prev, mut p) = (0.0, p0);
    let (mut dp_prev, mut dp) = (0.0, 0.0);
    let mut sum_sq = 0.0;
    for j in 0..n {
        sum_sq += p * p;
        let b_prev = if j == 0 { 0.0 } else { off[j - 1] };
        let p_next = ((x - diag[j]) * p - b_prev * p_prev) / off[j];
        let dp_next = (p + (x - diag[j]) * dp - b_prev * dp_prev) / off[j];
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp, sum_sq)
}

/// Node and weight table on the unit sphere `S^{d-1}`.
///
/// `base` is the node count on circles; polar-angle factors use `base / 2`
/// (at least 4) Gauss–Jacobi nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(d: usize, base: usize) -> Self {
        assert!(d >= 1);
        match d {
            1 => SphereRule {
                points: vec![vec![1.0], vec![-1.0]],
                weights: vec![1.0, 1.0],
            },
            2 => {
                let m = base.max(4);
                let step = 2.0 * std::f64::consts::PI / m as f64;
                // half-step offset keeps nodes off the coordinate axes
                let points = (0..m)
                    .map(|k| {
                        let th = (k as f64 + 0.5) * step;
                        vec![th.cos(), th.sin()]
                    })
                    .collect();
                SphereRule {
                    points,
                    weights: vec![step; m],
                }
            }
            _ => {
                let lower = SphereRule::new(d - 1, base);
                let e = (d as f64 - 3.0) / 2.0;
                let polar = GaussRule::jacobi((base / 2).max(4), e, e);
                let mut points = Vec::with_capacity(lower.points.len() * polar.len());
                let mut weights = Vec::with_capacity(points.capacity());
                for (t, wt) in polar.nodes.iter().zip(&polar.weights) {
                    let s = (1.0 - t * t).sqrt();
                    for (p, wp) in lower.points.iter().zip(&lower.weights) {
                        let mut q: Vec<f64> = p.iter().map(|v| v * s).collect();
                        q.push(*t);
                        points.push(q);
                        weights.push(wt * wp);
                    }
                }
                SphereRule { points, weights }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Surface area of `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / statrs::function::gamma::gamma(h)
}

/// Parameters of a polar-coordinate quadrature in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Radial Gauss–Jacobi nodes at the coarsest level.
    pub radial_nodes: usize,
    /// Circle node count at the coarsest level.
    pub angular_nodes: usize,
    /// Truncation radius; `None` lets the caller pick one from the integrand.
    pub box_halfwidth: Option<f64>,
    /// Relative error target, measured against the integral of `|f|`.
    pub target_rel_err: f64,
    /// Maximum number of refinement levels.
    pub max_levels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 16,
            angular_nodes: 8,
            box_halfwidth: None,
            target_rel_err: 1e-8,
            max_levels: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn with_target(mut self, target: f64) -> Self {
        self.target_rel_err = target;
        self
    }

    pub fn with_nodes(mut self, radial: usize, angular: usize) -> Self {
        self.radial_nodes = radial;
        self.angular_nodes = angular;
        self
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.box_halfwidth = Some(r);
        self
    }
}

/// An integral value with its refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub abs_err: f64,
    pub nodes: u64,
}

fn refine(count: usize, level: usize) -> usize {
    let mut c = count as f64;
    for _ in 0..level {
        c *= 1.5;
    }
    c.ceil() as usize
}

/// A vector-valued integral with its refinement error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct VecEstimate {
    pub value: Vec<Complex64>,
    pub abs_err: f64,
    pub nodes: u64,
}

/// `int_{|x| < R} f(x) |x|^{-alpha} dx` at a fixed node count, for `f` with
/// `dim` complex components written into the output slice.
///
/// Returns the integral and `int |f| |x|^{-alpha}` (Euclidean norm of the
/// components), the scale against which errors are measured.
pub fn polar_fixed_vec<F>(
    d: usize,
    alpha: f64,
    r_max: f64,
    radial: usize,
    angular: usize,
    dim: usize,
    f: &F,
) -> Result<(Vec<Complex64>, f64)>
where
    F: Fn(&[f64], &mut [Complex64]) + Sync,
{
    let gamma = d as f64 - 1.0 - alpha;
    if gamma <= -1.0 {
        return Err(Error::WeightNotIntegrable { alpha, dim: d });
    }
    let rr = GaussRule::radial(radial, gamma, r_max);
    let sphere = SphereRule::new(d, angular);
    charge((rr.len() * sphere.len()) as u64)?;
    let zero = Complex64::new(0.0, 0.0);
    let partial: Vec<(Vec<Complex64>, f64)> = rr
        .nodes
        .par_iter()
        .zip(rr.weights.par_iter())
        .map(|(r, wr)| {
            let mut acc = vec![zero; dim];
            let mut acc_abs = 0.0;
            let mut x = vec![0.0; d];
            let mut v = vec![zero; dim];
            for (p, wp) in sphere.points.iter().zip(&sphere.weights) {
                for (xi, pi) in x.iter_mut().zip(p) {
                    *xi = r * pi;
                }
                v.iter_mut().for_each(|c| *c = zero);
                f(&x, &mut v);
                let mut sq = 0.0;
                for (a, c) in acc.iter_mut().zip(&v) {
                    *a += c * *wp;
                    sq += c.norm_sqr();
                }
                acc_abs += sq.sqrt() * wp;
            }
            (acc.into_iter().map(|a| a * *wr).collect(), acc_abs * wr)
        })
        .collect();
    let mut total = vec![zero; dim];
    let mut total_abs = 0.0;
    for (v, a) in partial {
        for (t, c) in total.iter_mut().zip(v) {
            *t += c;
        }
        total_abs += a;
    }
    Ok((total, total_abs))
}

/// Scalar form of [`polar_fixed_vec`].
pub fn polar_fixed<F>(d: usize, alpha: f64, r_max: f64, radial: usize, angular: usize, f: &F) -> Result<(Complex64, f64)>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let (v, a) = polar_fixed_vec(d, alpha, r_max, radial, angular, 1, &|x: &[f64], out: &mut [Complex64]| {
        out[0] = f(x)
    })?;
    Ok((v[0], a))
}

/// Adaptive version of [`polar_fixed_vec`]: refines both node counts by 1.5x
/// until two successive levels agree to `target_rel_err` relative to
/// `int |f| |x|^{-alpha}`.
pub fn polar_adaptive_vec<F>(
    d: usize,
    alpha: f64,
    r_max: f64,
    spec: &QuadratureSpec,
    dim: usize,
    f: &F,
) -> Result<VecEstimate>
where
    F: Fn(&[f64], &mut [Complex64]) + Sync,
{
    if alpha >= d as f64 {
        return Err(Error::WeightNotIntegrable { alpha, dim: d });
    }
    let mut prev: Option<Vec<Complex64>> = None;
    let mut total_nodes = 0u64;
    let mut last = (0.0, f64::INFINITY);
    for level in 0..spec.max_levels.max(2) {
        let radial = refine(spec.radial_nodes, level);
        let angular = refine(spec.angular_nodes, level);
        let (value, abs_int) = polar_fixed_vec(d, alpha, r_max, radial, angular, dim, f)?;
        total_nodes += (radial * SphereRule::new(d, angular).len()) as u64;
        if let Some(p) = prev {
            let est = value.iter().zip(&p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let target = spec.target_rel_err * abs_int.max(f64::MIN_POSITIVE);
            last = (abs_int, est);
            if est <= target {
                return Ok(VecEstimate {
                    value,
                    abs_err: est,
                    nodes: total_nodes,
                });
            }
        }
        prev = Some(value);
    }
    Err(Error::QuadratureBudgetExceeded {
        estimate: last.1,
        target: spec.target_rel_err * last.0,
        nodes: total_nodes,
    })
}

/// Scalar form of [`polar_adaptive_vec`].
pub fn polar_adaptive<F>(d: usize, alpha: f64, r_max: f64, spec: &QuadratureSpec, f: &F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let v = polar_adaptive_vec(d, alpha, r_max, spec, 1, &|x: &[f64], out: &mut [Complex64]| out[0] = f(x))?;
    Ok(Estimate {
        value: v.value[0],
        abs_err: v.abs_err,
        nodes: v.nodes,
    })
}

/// Tanh-sinh with step `h` on `[0, r_max/8]`, where the integrand may behave
/// like `r^beta`, and `n` Gauss–Legendre nodes on the smooth remainder.
fn singular_radial(r_max: f64, h: f64, n: usize) -> GaussRule {
    let a = r_max / 8.0;
    let mut rule = GaussRule::tanh_sinh(0.0, a, h, (3.6 / h).ceil() as usize);
    let outer = GaussRule::legendre(n).mapped(a, r_max);
    rule.nodes.extend(outer.nodes);
    rule.weights.extend(outer.weights);
    rule
}

/// Like [`polar_adaptive_vec`] but with a tanh-sinh radial rule near the
/// origin, for integrands with non-analytic behaviour (such as `r^beta`
/// terms) there. Each level divides the tanh-sinh step by 1.5.
pub fn polar_singular_adaptive_vec<F>(
    d: usize,
    alpha: f64,
    r_max: f64,
    spec: &QuadratureSpec,
    dim: usize,
    f: &F,
) -> Result<VecEstimate>
where
    F: Fn(&[f64], &mut [Complex64]) + Sync,
{
    let gamma = d as f64 - 1.0 - alpha;
    if gamma <= -1.0 {
        return Err(Error::WeightNotIntegrable { alpha, dim: d });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut prev: Option<Vec<Complex64>> = None;
    let mut total_nodes = 0u64;
    let mut last = (0.0, f64::INFINITY);
    let mut h = 0.4;
    for level in 0..spec.max_levels.max(2) {
        let radial = singular_radial(r_max, h, refine(spec.radial_nodes, level));
        let sphere = SphereRule::new(d, refine(spec.angular_nodes, level));
        let count = (radial.len() * sphere.len()) as u64;
        charge(count)?;
        total_nodes += count;
        let partial: Vec<(Vec<Complex64>, f64)> = radial
            .nodes
            .par_iter()
            .zip(radial.weights.par_iter())
            .map(|(r, wr)| {
                let wr = wr * r.powf(gamma);
                let mut acc = vec![zero; dim];
                let mut acc_abs = 0.0;
                let mut x = vec![0.0; d];
                let mut v = vec![zero; dim];
                for (p, wp) in sphere.points.iter().zip(&sphere.weights) {
                    for (xi, pi) in x.iter_mut().zip(p) {
                        *xi = r * pi;
                    }
                    v.iter_mut().for_each(|c| *c = zero);
                    f(&x, &mut v);
                    let mut sq = 0.0;
                    for (a, c) in acc.iter_mut().zip(&v) {
                        *a += c * *wp;
                        sq += c.norm_sqr();
                    }
                    acc_abs += sq.sqrt() * wp;
                }
                (acc.into_iter().map(|a| a * wr).collect(), acc_abs * wr)
            })
            .collect();
        let mut value = vec![zero; dim];
        let mut abs_int = 0.0;
        for (v, a) in partial {
            for (t, c) in value.iter_mut().zip(v) {
                *t += c;
            }
            abs_int += a;
        }
        if let Some(p) = prev {
            let est = value.iter().zip(&p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            last = (abs_int, est);
            if est <= spec.target_rel_err * abs_int.max(f64::MIN_POSITIVE) {
                return Ok(VecEstimate {
                    value,
                    abs_err: est,
                    nodes: total_nodes,
                });
            }
        }
        prev = Some(value);
        h /= 1.5;
    }
    Err(Error::QuadratureBudgetExceeded {
        estimate: last.1,
        target: spec.target_rel_err * last.0,
        nodes: total_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;
    use std::f64::consts::PI;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = GaussRule::legendre(10);
        for k in 0..20 {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let got = r.integrate(|x| x.powi(k));
            assert!((got - exact).abs() < 1e-14, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn jacobi_moments() {
        let (a, b) = (0.3, -0.6);
        let r = GaussRule::jacobi(12, a, b);
        // int_{-1}^1 (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
        let exact = 2f64.powf(a + b + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0);
        assert!((r.weights.iter().sum::<f64>() - exact).abs() < 1e-13);
        // first moment: exact (b - a)/(a + b + 2) times the mass
        let m1 = r.integrate(|x| x);
        assert!((m1 - exact * (b - a) / (a + b + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn laguerre_and_hermite_moments() {
        let alpha = 0.4;
        let r = GaussRule::laguerre(20, alpha);
        for k in 0..10 {
            let exact = gamma(alpha + 1.0 + k as f64);
            let got = r.integrate(|x| x.powi(k));
            assert!((got - exact).abs() < 1e-11 * exact, "k={k}");
        }
        let h = GaussRule::hermite(30);
        assert!((h.integrate(|x| x * x) - PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((h.integrate(|x| (2.0 * x).cos()) - PI.sqrt() * (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn large_rules_stay_accurate() {
        let r = GaussRule::legendre(300);
        assert!((r.integrate(|x| x.exp()) - (1f64.exp() - (-1f64).exp())).abs() < 1e-13);
        let h = GaussRule::hermite(150);
        assert!((h.weights.iter().sum::<f64>() - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn radial_rule_absorbs_singular_weight() {
        // int_0^inf r^{-0.7} e^{-r^2} dr = Gamma(0.15)/2
        let r = GaussRule::radial(60, -0.7, 8.0);
        let got = r.integrate(|x| (-x * x).exp());
        let exact = gamma(0.15) / 2.0;
        assert!((got - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let r = GaussRule::tanh_sinh(0.0, 1.0, 0.05, 120);
        // int_0^1 x^{-1/2} + ln(1 - x) dx = 2 - 1
        let got = r.integrate(|x| x.powf(-0.5) + (1.0 - x).ln());
        assert!((got - 1.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn sphere_areas() {
        for d in 1..=5 {
            let s = SphereRule::new(d, 12);
            let total: f64 = s.weights.iter().sum();
            assert!((total - sphere_area(d)).abs() < 1e-12, "d={d}");
            for p in &s.points {
                let norm: f64 = p.iter().map(|v| v * v).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
        // second moment of a coordinate: area / d
        let s = SphereRule::new(4, 12);
        let m2: f64 = s.points.iter().zip(&s.weights).map(|(p, w)| w * p[0] * p[0]).sum();
        assert!((m2 - sphere_area(4) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn polar_gaussian_with_weight() {
        for d in 1..=4 {
            let alpha = 0.8;
            let spec = QuadratureSpec::default().with_target(1e-12);
            let f = |x: &[f64]| Complex64::new((-x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0);
            let est = polar_adaptive(d, alpha, 7.0, &spec, &f).unwrap();
            let exact = sphere_area(d) * gamma((d as f64 - alpha) / 2.0) / 2.0;
            assert!((est.value.re - exact).abs() < 1e-11 * exact, "d={d}");
        }
    }

    #[test]
    fn non_integrable_weight_is_rejected() {
        let f = |_: &[f64]| Complex64::new(1.0, 0.0);
        let spec = QuadratureSpec::default();
        assert!(matches!(
            polar_adaptive(2, 2.0, 1.0, &spec, &f),
            Err(Error::WeightNotIntegrable { .. })
        ));
    }

    #[test]
    fn unattainable_target_reports_budget_error() {
        let f = |x: &[f64]| Complex64::new((40.0 * x[0]).cos(), 0.0);
        let spec = QuadratureSpec {
            radial_nodes: 4,
            angular_nodes: 4,
            box_halfwidth: None,
            target_rel_err: 1e-14,
            max_levels: 2,
        };
        assert!(matches!(
            polar_adaptive(2, 0.0, 3.0, &spec, &f),
            Err(Error::QuadratureBudgetExceeded { .. })
        ));
    }
    #[test]
    fn singular_polar_handles_fractional_powers() {
        // int_{|x|<1} |x|^{-0.5} (1 + |x|^{0.3}) dx in d = 2 is 2 pi (1/1.5 + 1/1.8)
        let f = |x: &[f64], out: &mut [Complex64]| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            out[0] = Complex64::new(1.0 + r.powf(0.3), 0.0);
        };
        let got = polar_singular_adaptive_vec(2, 0.5, 1.0, &QuadratureSpec::default().with_target(1e-10), 1, &f).unwrap();
        let exact = 2.0 * PI * (1.0 / 1.5 + 1.0 / 1.8);
        assert!((got.value[0].re - exact).abs() < 1e-9 * exact);
    }

}
