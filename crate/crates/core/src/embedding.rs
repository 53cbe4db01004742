//! The embedding `J` of the Fourier model of `SO(n-1,1)` on `R^{n-2}` into
//! that of `SO(n,1)` on `R^{n-1}`, its adjoint `J*`, and the transverse
//! kernel `M_i`.
//!
//! `J` extends a function constantly in the last coordinate. Integrals
//! against `J phi` are reduced in the transverse variable before any
//! quadrature, so every numeric integral converges absolutely.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::exterior::{included_positions, m_i, phi_poly_in_t, wedge_matrix, SubsetBasis, WedgeOperator};
use crate::group::max_abs;
use crate::intertwine::{a_g_map_wedge, form_wu, CSParams};
use crate::params::{descend_u, DESCENT_TOL};
use crate::quadrature::{polar_singular_adaptive_vec, GaussRule, QuadratureSpec};
use crate::report::CheckReport;
use crate::schwartz::{integrate_weighted_with, Scales, SchwartzFn, WedgeFn};

/// Smallest `|x|` accepted by [`m_operator`].
pub const M_OPERATOR_MIN_NORM: f64 = 1e-8;

/// The pair `(SO(n,1), u)`, `(SO(n-1,1), u')` linked by `J`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingContext {
    pub big: CSParams,
    pub small: CSParams,
    /// `(n-1)(1-u) = (n-2)(1-u')`.
    pub lambda: f64,
}

impl EmbeddingContext {
    /// Builds the context for `(n, i, u)` with `u' = ((n-1)u - 1)/(n-2)`.
    pub fn new(n: usize, i: usize, u: f64) -> Result<Self> {
        let big = CSParams::new(n, i, u);
        let exponent = big.weight_exponent();
        if !(exponent > 1.0) {
            return Err(Error::ExponentTooSmall { exponent });
        }
        big.validate()?;
        let small = CSParams::new(n - 1, i, descend_u(n, u));
        let lambda = big.lambda();
        let dev = (lambda - small.lambda()).abs();
        if dev > DESCENT_TOL * lambda.max(1.0) {
            return Err(Error::InvalidParams(format!(
                "kernel exponents differ by {dev:e} between (n, u) and (n-1, u')"
            )));
        }
        small.validate_form()?;
        Ok(EmbeddingContext { big, small, lambda })
    }

    /// `p = (n-1)u/2`, the exponent of `(1 + s^2)^{-p}` in `J*`.
    pub fn p(&self) -> f64 {
        self.big.weight_exponent() / 2.0
    }

    /// `int (1 + s^2)^{-p} ds = sqrt(pi) Gamma(p - 1/2) / Gamma(p)`.
    pub fn transverse_mass(&self) -> f64 {
        transverse_mass_closed(self.p())
    }

    fn small_dim(&self) -> usize {
        self.small.d()
    }
}

fn transverse_mass_closed(p: f64) -> f64 {
    PI.sqrt() * gamma(p - 0.5) / gamma(p)
}

/// `int (1 + s^2)^{-p} ds` by quadrature: with `s = tan(pi xi / 2)` the
/// integrand is `(pi/2) cos(pi xi/2)^{2p-2}`, integrated by Gauss–Jacobi
/// with weight `(1 - xi^2)^{2p-2}` against an analytic remainder.
pub fn transverse_integral(p: f64, nodes: usize) -> f64 {
    let rule = GaussRule::jacobi(nodes, 2.0 * p - 2.0, 2.0 * p - 2.0);
    rule.integrate(|xi| {
        let c = (PI * xi / 2.0).cos();
        (PI / 2.0) * (c / (1.0 - xi * xi)).powf(2.0 * p - 2.0)
    })
}

/// `J phi`: `(y, t) -> include(phi(y))` on `R^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JFn {
    pub phi: WedgeFn,
    pub basis: SubsetBasis,
    positions: Vec<usize>,
}

impl JFn {
    /// Dimension of the domain, `n - 1`.
    pub fn dim(&self) -> usize {
        self.phi.dim() + 1
    }

    pub fn eval(&self, z: &[f64]) -> DVector<Complex64> {
        let small = self.phi.eval(&z[..z.len() - 1]);
        let mut out = DVector::zeros(self.basis.len());
        for (k, &pos) in self.positions.iter().enumerate() {
            out[pos] = small[k];
        }
        out
    }
}

/// Builds `J phi` for `phi` on `R^{n-2}` with values in `Λ^i(R^{n-2})`.
pub fn j_apply(phi: &WedgeFn) -> Result<JFn> {
    let d = phi.dim() + 1;
    let i = phi.degree();
    Ok(JFn {
        phi: phi.clone(),
        basis: SubsetBasis::new(d, i)?,
        positions: included_positions(d, i)?,
    })
}

/// Node counts for the transverse `(t, s)` integral behind [`m_operator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseRule {
    /// Generalized Gauss–Laguerre nodes in the subordination variable.
    pub laguerre: usize,
    /// Gauss–Hermite nodes in `t`.
    pub hermite: usize,
    /// Trapezoid range and step in the scaled frequency `sigma`.
    pub sigma_max: f64,
    pub sigma_step: f64,
}

impl Default for TransverseRule {
    fn default() -> Self {
        TransverseRule {
            laguerre: 8,
            hermite: 80,
            sigma_max: 6.0,
            sigma_step: 0.3,
        }
    }
}

/// `M_i(x)` by quadrature next to its closed form `m_i((x, 0)) |x|^{-lambda}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MOperator {
    pub quadrature: WedgeOperator,
    pub closed_form: WedgeOperator,
}

impl MOperator {
    /// Largest entry deviation relative to the largest closed-form entry.
    pub fn max_rel_deviation(&self) -> f64 {
        max_abs(&(&self.quadrature.entries - &self.closed_form.entries)) / max_abs(&self.closed_form.entries)
    }
}

/// `M_i(x) = (1/pi) int ds int dt e^{-2its} m_i((x,t)) |(x,t)|^{-lambda}` for
/// `x` in `R^{n-2}`, an operator on `Λ^i(R^{n-1})`.
pub fn m_operator(x: &[f64], ctx: &EmbeddingContext, rule: &TransverseRule) -> Result<MOperator> {
    if x.len() != ctx.small_dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.small_dim(),
            found: x.len(),
        });
    }
    m_operator_kernel(x, ctx.big.i, ctx.lambda, rule)
}

/// [`m_operator`] for an arbitrary kernel exponent `lambda > 0`.
///
/// Writing `m_i((x,t)) = Φ_i(x,t) / (|x|^2+t^2)^i` with `Φ_i` polynomial in
/// `t`, the factor `(|x|^2+t^2)^{-mu}`, `mu = lambda/2 + i`, is subordinated
/// to Gaussians: `Gamma(mu)^{-1} int v^{mu-1} e^{-v(|x|^2+t^2)} dv`. For each
/// `v` the `t` integral uses Gauss–Hermite in `tau = sqrt(v) t` and the `s`
/// integral a trapezoid rule in `sigma = s / sqrt(v)`.
pub fn m_operator_kernel(x: &[f64], i: usize, lambda: f64, rule: &TransverseRule) -> Result<MOperator> {
    let x2: f64 = x.iter().map(|v| v * v).sum();
    let norm = x2.sqrt();
    if norm < M_OPERATOR_MIN_NORM {
        return Err(Error::ZeroVector { norm });
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParams(format!("kernel exponent {lambda} must be positive")));
    }
    let (basis, table) = phi_poly_in_t(x, i)?;
    let k = basis.len();
    let mu = lambda / 2.0 + i as f64;
    let lag = GaussRule::laguerre(rule.laguerre, mu - 1.0);
    let herm = GaussRule::hermite(rule.hermite);
    let steps = (rule.sigma_max / rule.sigma_step).round() as i64;
    // trapezoid sum over sigma of cos(2 sigma tau), per Hermite node
    let sigma_sums: Vec<f64> = herm
        .nodes
        .iter()
        .map(|tau| {
            (-steps..=steps)
                .map(|j| rule.sigma_step * (2.0 * j as f64 * rule.sigma_step * tau).cos())
                .sum()
        })
        .collect();
    let mut acc = DMatrix::<f64>::zeros(k, k);
    for (w, ww) in lag.nodes.iter().zip(&lag.weights) {
        let v = w / x2;
        let sv = v.sqrt();
        for ((tau, h), a) in herm.nodes.iter().zip(&herm.weights).zip(&sigma_sums) {
            let t = tau / sv;
            let c = ww * h * a;
            for r in 0..k {
                for col in 0..k {
                    acc[(r, col)] += c * table[r][col].eval(t);
                }
            }
        }
    }
    let quadrature = acc * (x2.powf(-mu) / (PI * gamma(mu)));
    let mut a = x.to_vec();
    a.push(0.0);
    let closed = if i == 0 {
        DMatrix::identity(1, 1)
    } else {
        m_i(&a, i)?.entries
    } * norm.powf(-lambda);
    Ok(MOperator {
        quadrature: WedgeOperator {
            basis: basis.clone(),
            entries: quadrature,
        },
        closed_form: WedgeOperator {
            basis,
            entries: closed,
        },
    })
}

/// Norms of `phi` and `J phi` and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub big_norm: f64,
    pub small_norm: f64,
    pub ratio: f64,
}

fn check_small(phi: &WedgeFn, ctx: &EmbeddingContext) -> Result<()> {
    if phi.dim() != ctx.small_dim() || phi.degree() != ctx.big.i {
        return Err(Error::InvalidParams(format!(
            "expected a Λ^{}-valued function on R^{}, got degree {} on R^{}",
            ctx.big.i,
            ctx.small_dim(),
            phi.degree(),
            phi.dim()
        )));
    }
    Ok(())
}

/// Cache of `M_i` on unit directions, keyed by the direction rounded to
/// `1e-12`. Values are computed at the rounded direction, so a lookup does
/// not depend on which node populated the entry.
struct DirectionCache {
    i: usize,
    lambda: f64,
    rule: TransverseRule,
    positions: Vec<usize>,
    map: Mutex<HashMap<Vec<i64>, DMatrix<f64>>>,
}

impl DirectionCache {
    fn restricted(&self, x: &[f64]) -> DMatrix<f64> {
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let key: Vec<i64> = x.iter().map(|v| (v / r * 1e12).round() as i64).collect();
        if let Some(m) = self.map.lock().expect("cache lock").get(&key) {
            return m.clone();
        }
        let dir: Vec<f64> = key.iter().map(|&k| k as f64 * 1e-12).collect();
        let full = m_operator_kernel(&dir, self.i, self.lambda, &self.rule)
            .expect("unit directions are nonzero")
            .quadrature
            .entries;
        let p = &self.positions;
        let m = DMatrix::from_fn(p.len(), p.len(), |a, b| full[(p[a], p[b])]);
        self.map.lock().expect("cache lock").insert(key, m.clone());
        m
    }
}

/// Compares `<J phi, J phi>` in the larger form with `<phi, phi>` in the
/// smaller one.
///
/// The transverse integrals in the larger form collapse to `pi M_i(x)`,
/// which is evaluated by the quadrature of [`m_operator`] (using
/// `M_i(r w) = r^{-lambda} M_i(w)`), leaving one weighted integral over
/// `R^{n-2}`.
pub fn isometry_check(phi: &WedgeFn, ctx: &EmbeddingContext, quad: &QuadratureSpec) -> Result<Isometry> {
    check_small(phi, ctx)?;
    let small_norm = form_wu(phi, phi, &ctx.small, quad)?.value.re;
    let d = ctx.small_dim();
    let k = phi.basis.len();
    let scale = Complex64::new(PI.powf(d as f64 / 2.0), 0.0);
    let mut table = Vec::with_capacity(k * k);
    for a in &phi.components {
        for b in &phi.components {
            table.push(a.conj().multiply(b)?.fourier().scale(scale));
        }
    }
    let cache = DirectionCache {
        i: ctx.big.i,
        lambda: ctx.lambda,
        rule: TransverseRule::default(),
        positions: included_positions(d + 1, ctx.big.i)?,
        map: Mutex::new(HashMap::new()),
    };
    let integrand = |x: &[f64]| -> Complex64 {
        let m = cache.restricted(x);
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..k {
            for t in 0..k {
                acc += table[s * k + t].eval(x) * m[(s, t)];
            }
        }
        acc
    };
    let scales = table.iter().map(Scales::of).reduce(Scales::merge).expect("non-empty");
    let big_norm = PI * integrate_weighted_with(d, ctx.lambda, scales, quad, &integrand)?.value.re;
    Ok(Isometry {
        big_norm,
        small_norm,
        ratio: big_norm / small_norm,
    })
}

/// The same comparison in the weighted `L^2` norms of the Fourier models,
/// `int |x|^{-(n-1)u} |f(x)|^2 dx`. Substituting `t = |y| s` splits the
/// larger norm into `int (1 + s^2)^{-p} ds`, computed by
/// [`transverse_integral`], times the smaller norm.
pub fn isometry_check_weighted(phi: &WedgeFn, ctx: &EmbeddingContext, quad: &QuadratureSpec) -> Result<Isometry> {
    check_small(phi, ctx)?;
    let mut sq = SchwartzFn::zero(phi.dim());
    for c in &phi.components {
        sq = sq.add(&c.conj().multiply(c)?);
    }
    let exponent = ctx.small.weight_exponent();
    let small_norm = integrate_weighted_with(sq.d, exponent, Scales::of(&sq), quad, &|y: &[f64]| sq.eval(y))?.value.re;
    let t = transverse_integral(ctx.p(), 64);
    let big_norm = integrate_weighted_with(sq.d, exponent, Scales::of(&sq), quad, &|y: &[f64]| sq.eval(y) * t)?.value.re;
    Ok(Isometry {
        big_norm,
        small_norm,
        ratio: big_norm / small_norm,
    })
}

fn wedge_scales(f: &WedgeFn) -> Scales {
    f.components
        .iter()
        .map(Scales::of)
        .reduce(Scales::merge)
        .unwrap_or(Scales {
            radius: 1.0,
            sharpness: 0.0,
            frequency: 0.0,
            degree: 0,
        })
}

fn legendre16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::legendre(16))
}

/// Panel endpoints on `[0, reach]`: geometric near `0` at the scale `r` of
/// the weight `(r^2 + t^2)^{-p}`, and no longer than `step` elsewhere.
fn transverse_panels(r: f64, reach: f64, step: f64) -> Vec<f64> {
    let mut pts = vec![0.0, reach];
    let mut g = r;
    while g < reach {
        pts.push(g);
        g *= 2.0;
    }
    let mut u = step;
    while u < reach {
        pts.push(u);
        u += step;
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * reach);
    pts
}

/// `(J* f)(y) = restrict int (1 + s^2)^{-p} f(y, |y| s) ds` for `f` on
/// `R^{n-1}`. At `y = 0` this is `restrict f(0) * int (1 + s^2)^{-p} ds`.
pub fn j_star_apply(f: &WedgeFn, ctx: &EmbeddingContext, y: &[f64]) -> Result<DVector<Complex64>> {
    let d = ctx.big.d();
    if f.dim() != d || y.len() != d - 1 {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f.dim(),
        });
    }
    let p = ctx.p();
    if !(2.0 * p > 1.0) {
        return Err(Error::ExponentTooSmall { exponent: 2.0 * p });
    }
    let positions = included_positions(d, f.degree())?;
    let r: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut z = y.to_vec();
    z.push(0.0);
    if r == 0.0 {
        let v = f.eval(&z);
        let t = transverse_mass_closed(p);
        return Ok(DVector::from_iterator(positions.len(), positions.iter().map(|&k| v[k] * t)));
    }
    // in t = |y| s: |y|^{2p-1} int (|y|^2 + t^2)^{-p} f(y, t) dt
    let reach = f.support_radius();
    let sharp = f.max_sharpness().sqrt() + f.max_frequency();
    let panels = transverse_panels(r, reach, 2.0 / (1.0 + sharp));
    let gl = legendre16();
    let mut acc = vec![Complex64::new(0.0, 0.0); positions.len()];
    for w in panels.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let half = (hi - lo) / 2.0;
        for (node, weight) in gl.nodes.iter().zip(&gl.weights) {
            let t = lo + half * (1.0 + node);
            let wt = weight * half * (r * r + t * t).powf(-p);
            for sign in [1.0, -1.0] {
                z[d - 1] = sign * t;
                for (a, &k) in acc.iter_mut().zip(&positions) {
                    *a += f.components[k].eval(&z) * wt;
                }
            }
        }
    }
    let pre = r.powf(2.0 * p - 1.0);
    Ok(DVector::from_iterator(acc.len(), acc.into_iter().map(|a| a * pre)))
}

/// Both sides of `<J g, f> = <g, J* f>` in the weighted `L^2` products of the
/// two Fourier models, each by its own quadrature.
pub fn adjointness(g: &WedgeFn, f: &WedgeFn, ctx: &EmbeddingContext, quad: &QuadratureSpec) -> Result<(Complex64, Complex64)> {
    check_small(g, ctx)?;
    let d = ctx.big.d();
    let jg = j_apply(g)?;
    let sf = wedge_scales(f);
    let sg = wedge_scales(g);
    let scales = Scales {
        radius: sf.radius,
        ..sf.merge(sg)
    };
    let lhs = integrate_weighted_with(d, ctx.big.weight_exponent(), scales, quad, &|z: &[f64]| {
        jg.eval(z).iter().zip(f.eval(z).iter()).map(|(a, b)| a.conj() * b).sum()
    })?
    .value;
    let rhs = polar_singular_adaptive_vec(
        d - 1,
        ctx.small.weight_exponent(),
        f.support_radius(),
        &scales.sized(quad),
        1,
        &|y: &[f64], out: &mut [Complex64]| {
            let js = j_star_apply(f, ctx, y).expect("dimensions checked");
            out[0] = g.eval(y).iter().zip(js.iter()).map(|(a, b)| a.conj() * b).sum();
        },
    )?
    .value[0];
    Ok((lhs, rhs))
}

/// `A_H (J* psi)` against `restrict (A_G psi)(x, 0)` at each sample point,
/// with `A` the weighted Fourier integral of each component.
pub fn adjoint_identity_check(
    psi: &WedgeFn,
    ctx: &EmbeddingContext,
    samples: &[Vec<f64>],
    quad: &QuadratureSpec,
    tol: f64,
) -> Result<CheckReport> {
    let d = ctx.big.d();
    let positions = included_positions(d, psi.degree())?;
    let k = positions.len();
    let m = samples.len();
    let lhs = polar_singular_adaptive_vec(
        d - 1,
        ctx.small.weight_exponent(),
        psi.support_radius(),
        &wedge_scales(psi).sized(quad),
        m * k,
        &|y: &[f64], out: &mut [Complex64]| {
            let js = j_star_apply(psi, ctx, y).expect("dimensions checked");
            for (s, x) in samples.iter().enumerate() {
                let phase: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                let e = Complex64::from_polar(1.0, -2.0 * phase);
                for c in 0..k {
                    out[s * k + c] = js[c] * e;
                }
            }
        },
    )?
    .value;
    let mut worst = (0.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (s, x) in samples.iter().enumerate() {
        let mut z = x.clone();
        z.push(0.0);
        let full = a_g_map_wedge(psi, &ctx.big, &z, quad)?;
        let l = DVector::from_column_slice(&lhs[s * k..(s + 1) * k]);
        let r = DVector::from_iterator(k, positions.iter().map(|&p| full[p]));
        let scale = r.norm();
        let dev = (&l - &r).norm();
        let rel = if scale > 0.0 { dev / scale } else { dev };
        if rel >= worst.0 {
            let c = (0..k).max_by(|&a, &b| r[a].norm().partial_cmp(&r[b].norm()).unwrap()).unwrap_or(0);
            worst = (rel, l[c], r[c]);
        }
    }
    let mut report = CheckReport::compare(
        "adjoint-identity",
        worst.1,
        worst.2,
        tol,
        "A_H J* = res A_G for the adjoint of the embedding",
    );
    report.rel_err = worst.0;
    report.pass = worst.0 <= tol;
    Ok(report
        .with_param("n", ctx.big.n)
        .with_param("i", ctx.big.i)
        .with_param("u", ctx.big.u)
        .with_param("u_small", ctx.small.u)
        .with_param("samples", m))
}

/// Generators of the parabolic subgroup of the smaller group, plus the Weyl
/// element, which acts through the intertwining integral instead.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Translation(Vec<f64>),
    Rotation(DMatrix<f64>),
    Dilation(f64),
    Weyl,
}

impl Generator {
    /// The same element viewed in the larger group: `(y0, 0)`, `r ⊕ 1`, `a`.
    pub fn lift(&self) -> Generator {
        match self {
            Generator::Translation(y0) => {
                let mut v = y0.clone();
                v.push(0.0);
                Generator::Translation(v)
            }
            Generator::Rotation(r) => {
                let k = r.nrows();
                let mut big = DMatrix::identity(k + 1, k + 1);
                big.view_mut((0, 0), (k, k)).copy_from(r);
                Generator::Rotation(big)
            }
            other => other.clone(),
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        match self {
            Generator::Translation(y0) if y0.len() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                found: y0.len(),
            }),
            Generator::Rotation(r) if r.nrows() != dim || r.ncols() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                found: r.nrows(),
            }),
            Generator::Rotation(r) if max_abs(&(r.transpose() * r - DMatrix::identity(dim, dim))) > 1e-10 => {
                Err(Error::UnsupportedGenerator("rotation matrix is not orthogonal".into()))
            }
            Generator::Dilation(a) if !(*a > 0.0) => {
                Err(Error::UnsupportedGenerator(format!("dilation factor {a} must be positive")))
            }
            Generator::Weyl => Err(Error::UnsupportedGenerator(
                "the Weyl element is not in the parabolic subgroup".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Which realization of the representation a function lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Sections on the Bruhat cell, transforming by `rho_P(a)^{-(1+u)}`.
    Bruhat,
    /// Fourier transforms of those.
    Fourier,
}

/// Action of a parabolic generator on an atom-algebra function.
///
/// Bruhat model: `f(x - y0)`, `Λ^i(r) f(r^{-1} x)`, `a^{-d(1+u)/2} f(x/a)`.
/// Fourier model: `e^{-2i y0.x} f(x)`, `Λ^i(r) f(r^{-1} x)`,
/// `a^{d(1-u)/2} f(a x)`, with `d = n - 1`.
pub fn parabolic_action(gen: &Generator, f: &WedgeFn, p: &CSParams, model: Model) -> Result<WedgeFn> {
    gen.check(f.dim())?;
    let d = f.dim() as f64;
    Ok(match (gen, model) {
        (Generator::Translation(y0), Model::Bruhat) => f.translate(y0),
        (Generator::Translation(y0), Model::Fourier) => f.modulate(&y0.iter().map(|v| -v).collect::<Vec<_>>()),
        (Generator::Rotation(r), _) => f.rotate(r)?,
        (Generator::Dilation(a), Model::Bruhat) => {
            f.dilate(1.0 / a).scale(Complex64::new(a.powf(-d * (1.0 + p.u) / 2.0), 0.0))
        }
        (Generator::Dilation(a), Model::Fourier) => f.dilate(*a).scale(Complex64::new(a.powf(d * (1.0 - p.u) / 2.0), 0.0)),
        (Generator::Weyl, _) => unreachable!("rejected by check"),
    })
}

/// The action of [`parabolic_action`] applied pointwise to an arbitrary
/// `Λ^i(R^d)`-valued function, evaluated at `x`.
pub fn act_pointwise<F>(gen: &Generator, p: &CSParams, model: Model, i: usize, f: F, x: &[f64]) -> Result<DVector<Complex64>>
where
    F: Fn(&[f64]) -> DVector<Complex64>,
{
    gen.check(x.len())?;
    let d = x.len() as f64;
    Ok(match (gen, model) {
        (Generator::Translation(y0), Model::Bruhat) => f(&x.iter().zip(y0).map(|(a, b)| a - b).collect::<Vec<_>>()),
        (Generator::Translation(y0), Model::Fourier) => {
            let phase: f64 = x.iter().zip(y0).map(|(a, b)| a * b).sum();
            f(x) * Complex64::from_polar(1.0, -2.0 * phase)
        }
        (Generator::Rotation(r), _) => {
            let arg = r.transpose() * DVector::from_column_slice(x);
            let w = wedge_matrix(r, i)?.entries.map(|v| Complex64::new(v, 0.0));
            w * f(arg.as_slice())
        }
        (Generator::Dilation(a), Model::Bruhat) => {
            let arg: Vec<f64> = x.iter().map(|v| v / a).collect();
            f(&arg) * Complex64::new(a.powf(-d * (1.0 + p.u) / 2.0), 0.0)
        }
        (Generator::Dilation(a), Model::Fourier) => {
            let arg: Vec<f64> = x.iter().map(|v| v * a).collect();
            f(&arg) * Complex64::new(a.powf(d * (1.0 - p.u) / 2.0), 0.0)
        }
        (Generator::Weyl, _) => unreachable!("rejected by check"),
    })
}

/// `max |J(h phi)(z) - h (J phi)(z)| / max |h (J phi)(z)|` over the sample
/// points `z` in `R^{n-1}`, in the Fourier model. The left side acts on the
/// atoms of `phi` with the parameters of `ctx.small`; the right side acts
/// pointwise on `J phi` with those of `ctx.big`.
pub fn equivariance_defect(gen: &Generator, phi: &WedgeFn, ctx: &EmbeddingContext, points: &[Vec<f64>]) -> Result<f64> {
    let left = j_apply(&parabolic_action(gen, phi, &ctx.small, Model::Fourier)?)?;
    let jphi = j_apply(phi)?;
    let lifted = gen.lift();
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for z in points {
        let l = left.eval(z);
        let r = act_pointwise(&lifted, &ctx.big, Model::Fourier, phi.degree(), |w| jphi.eval(w), z)?;
        dev = dev.max((&l - &r).norm());
        scale = scale.max(r.norm());
    }
    Ok(if scale > 0.0 { dev / scale } else { dev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::reflection;
    use crate::schwartz::family::wedge_family;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default().with_target(1e-9)
    }

    #[test]
    fn context_invariants() {
        let ctx = EmbeddingContext::new(3, 0, 0.6).unwrap();
        assert!((ctx.small.u - 0.2).abs() < 1e-15);
        assert!((ctx.lambda - ctx.small.lambda()).abs() < 1e-14);
        assert!(matches!(EmbeddingContext::new(3, 0, 0.5), Err(Error::ExponentTooSmall { .. })));
        assert!(matches!(EmbeddingContext::new(4, 1, 0.4), Err(Error::InvalidParams(_))));
        assert!(EmbeddingContext::new(5, 1, 0.4).is_ok());
    }

    #[test]
    fn transverse_integral_matches_beta() {
        for p in [0.55, 0.8, 1.0, 1.7, 2.4] {
            let exact = transverse_mass_closed(p);
            assert!((transverse_integral(p, 64) - exact).abs() < 1e-12 * exact, "p={p}");
        }
        // p = 1 gives arctan over the line
        assert!((transverse_mass_closed(1.0) - PI).abs() < 1e-14);
    }

    #[test]
    fn j_is_constant_in_t_and_avoids_the_last_index() {
        let phi = &wedge_family(3, 1, 1, 1, 1).unwrap()[0];
        let j = j_apply(phi).unwrap();
        for y in [[0.1, 0.2, -0.3], [1.0, 0.0, 0.5]] {
            let a = j.eval(&[y[0], y[1], y[2], 0.0]);
            let b = j.eval(&[y[0], y[1], y[2], 17.3]);
            assert_eq!(a, b);
            let last = j.basis.index_of(&[3]).unwrap();
            assert_eq!(a[last], Complex64::new(0.0, 0.0));
        }
        let zero = j_apply(&WedgeFn::zero(2, 0).unwrap()).unwrap();
        assert_eq!(zero.eval(&[0.3, 0.1, 2.0])[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn m_operator_scalar_and_reflection_cases() {
        let rule = TransverseRule::default();
        let m = m_operator_kernel(&[1.3], 0, 0.8, &rule).unwrap();
        assert!(m.max_rel_deviation() < 1e-10);
        assert!((m.closed_form.entries[(0, 0)] - 1.3f64.powf(-0.8)).abs() < 1e-15);
        // n = 4, i = 1, x = e1: the reflection diag(-1, 1, 1)
        let m = m_operator_kernel(&[1.0, 0.0], 1, 1.5, &rule).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0]));
        assert!(max_abs(&(&m.closed_form.entries - &expected)) < 1e-15);
        assert!(m.max_rel_deviation() < 1e-10);
    }

    #[test]
    fn m_operator_homogeneity_and_random_points() {
        let rule = TransverseRule::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (d, i, lambda) in [(2usize, 1usize, 2.4), (3, 1, 3.0), (3, 2, 2.2), (1, 0, 0.8)] {
            for _ in 0..10 {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
                let m = m_operator_kernel(&x, i, lambda, &rule).unwrap();
                assert!(m.max_rel_deviation() < 1e-9, "d={d} i={i}");
                let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
                let m2 = m_operator_kernel(&x2, i, lambda, &rule).unwrap();
                let scaled = &m.quadrature.entries * 2f64.powf(-lambda);
                assert!(max_abs(&(&m2.quadrature.entries - &scaled)) < 1e-9 * max_abs(&scaled));
            }
        }
        assert!(matches!(m_operator_kernel(&[0.0, 1e-9], 1, 2.0, &rule), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn isometry_ratio_is_constant() {
        let ctx = EmbeddingContext::new(4, 0, 0.6).unwrap();
        let fam = wedge_family(2, 0, 5, 1, 4).unwrap();
        let ratios: Vec<f64> = fam.iter().map(|f| isometry_check(f, &ctx, &quad()).unwrap().ratio).collect();
        for r in &ratios {
            assert!((r - PI).abs() < 1e-7, "{ratios:?}");
        }
        let doubled = fam[0].scale(Complex64::new(2.0, 0.0));
        let r2 = isometry_check(&doubled, &ctx, &quad()).unwrap().ratio;
        assert!((r2 - ratios[0]).abs() < 1e-9);
    }

    #[test]
    fn isometry_ratio_ramified() {
        let ctx = EmbeddingContext::new(5, 1, 0.35).unwrap();
        let fam = wedge_family(3, 1, 2, 1, 5).unwrap();
        for f in &fam {
            let iso = isometry_check(f, &ctx, &QuadratureSpec::default().with_target(1e-7)).unwrap();
            assert!((iso.ratio - PI).abs() < 1e-5, "{iso:?}");
        }
    }

    #[test]
    fn weighted_isometry_ratio_is_the_beta_integral() {
        let ctx = EmbeddingContext::new(3, 0, 0.7).unwrap();
        for f in wedge_family(1, 0, 3, 2, 6).unwrap() {
            let iso = isometry_check_weighted(&f, &ctx, &quad()).unwrap();
            assert!((iso.ratio - ctx.transverse_mass()).abs() < 1e-9 * iso.ratio);
        }
    }

    #[test]
    fn j_star_of_a_gaussian() {
        let ctx = EmbeddingContext::new(3, 0, 0.8).unwrap();
        let f = WedgeFn::scalar(SchwartzFn::gaussian(2, 1.0));
        // e^{-y^2} |y|^{0.6} int (y^2 + t^2)^{-0.8} e^{-t^2} dt, to 20 digits
        let table = [
            (0.05, 3.8348242474225222621),
            (0.3, 2.4105127236310900265),
            (1.0, 0.51843497656150240965),
            (2.0, 0.014972098863044857055),
        ];
        for (y, expected) in table {
            let got = j_star_apply(&f, &ctx, &[y]).unwrap()[0];
            assert!((got.re - expected).abs() < 1e-10 * expected && got.im.abs() < 1e-14, "y={y}: {got}");
        }
        let at_zero = j_star_apply(&f, &ctx, &[0.0]).unwrap()[0];
        assert!((at_zero.re - ctx.transverse_mass()).abs() < 1e-14);
        let low = EmbeddingContext {
            big: CSParams::new(3, 0, 0.4),
            ..ctx
        };
        assert!(matches!(j_star_apply(&f, &low, &[0.2]), Err(Error::ExponentTooSmall { .. })));
    }

    #[test]
    fn adjointness_on_atoms() {
        for (n, u) in [(3usize, 0.6), (4, 0.5)] {
            let ctx = EmbeddingContext::new(n, 0, u).unwrap();
            let g = &wedge_family(n - 2, 0, 1, 1, 7).unwrap()[0];
            let f = &wedge_family(n - 1, 0, 1, 1, 8).unwrap()[0];
            let (lhs, rhs) = adjointness(g, f, &ctx, &QuadratureSpec::default().with_target(1e-8)).unwrap();
            assert!((lhs - rhs).norm() < 1e-6 * lhs.norm(), "n={n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn adjoint_identity_gaussian() {
        let ctx = EmbeddingContext::new(3, 0, 0.6).unwrap();
        let psi = WedgeFn::scalar(SchwartzFn::gaussian(2, 1.0));
        let samples: Vec<Vec<f64>> = (0..10).map(|k| vec![-1.2 + 0.25 * k as f64]).collect();
        let report = adjoint_identity_check(&psi, &ctx, &samples, &QuadratureSpec::default().with_target(1e-8), 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.rel_err < 1e-6, "{report:?}");
        let zero = WedgeFn::zero(2, 0).unwrap();
        let z = adjoint_identity_check(&zero, &ctx, &samples, &QuadratureSpec::default(), 1e-3);
        assert!(z.map(|r| r.abs_err == 0.0).unwrap_or(true));
    }

    #[test]
    fn parabolic_group_law() {
        let p = CSParams::new(4, 1, 0.2);
        let f = &wedge_family(3, 1, 1, 1, 9).unwrap()[0];
        let zero = parabolic_action(&Generator::Translation(vec![0.0; 3]), f, &p, Model::Bruhat).unwrap();
        assert_eq!(&zero, f);
        let (a, b) = (vec![0.3, -0.2, 0.5], vec![-0.1, 0.4, 0.2]);
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        for model in [Model::Bruhat, Model::Fourier] {
            let two = parabolic_action(
                &Generator::Translation(a.clone()),
                &parabolic_action(&Generator::Translation(b.clone()), f, &p, model).unwrap(),
                &p,
                model,
            )
            .unwrap();
            let one = parabolic_action(&Generator::Translation(ab.clone()), f, &p, model).unwrap();
            for x in [[0.1, 0.2, 0.3], [-1.0, 0.5, 0.0]] {
                assert!((two.eval(&x) - one.eval(&x)).norm() < 1e-12);
            }
        }
        assert!(matches!(
            parabolic_action(&Generator::Weyl, f, &p, Model::Bruhat),
            Err(Error::UnsupportedGenerator(_))
        ));
        assert!(matches!(
            parabolic_action(&Generator::Dilation(-1.0), f, &p, Model::Fourier),
            Err(Error::UnsupportedGenerator(_))
        ));
    }

    /// The Fourier transform intertwines the two models.
    #[test]
    fn fourier_intertwines_the_models() {
        let p = CSParams::new(4, 1, 0.3);
        let f = &wedge_family(3, 1, 1, 1, 10).unwrap()[0];
        let r = reflection(&[0.2, 0.9, -0.4]).unwrap();
        for gen in [Generator::Translation(vec![0.4, -0.3, 0.1]), Generator::Rotation(r), Generator::Dilation(1.7)] {
            let a = parabolic_action(&gen, f, &p, Model::Bruhat).unwrap().fourier();
            let b = parabolic_action(&gen, &f.fourier(), &p, Model::Fourier).unwrap();
            for x in [[0.1, 0.2, 0.3], [-0.7, 0.5, 1.0]] {
                assert!((a.eval(&x) - b.eval(&x)).norm() < 1e-12, "{gen:?}");
            }
        }
    }

    #[test]
    fn j_is_equivariant() {
        let ctx = EmbeddingContext::new(5, 1, 0.4).unwrap();
        let phi = &wedge_family(3, 1, 1, 1, 11).unwrap()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let points: Vec<Vec<f64>> = (0..20).map(|_| (0..4).map(|_| rng.random_range(-1.5..1.5)).collect()).collect();
        let r = reflection(&[0.3, -0.6, 0.2]).unwrap() * reflection(&[1.0, 0.1, 0.4]).unwrap();
        for gen in [Generator::Translation(vec![0.4, -0.3, 0.1]), Generator::Rotation(r), Generator::Dilation(1.7)] {
            assert!(equivariance_defect(&gen, phi, &ctx, &points).unwrap() < 1e-12, "{gen:?}");
        }
        // using u on both sides breaks the dilation equivariance
        let wrong = EmbeddingContext {
            small: CSParams::new(4, 1, 0.4),
            ..ctx
        };
        assert!(equivariance_defect(&Generator::Dilation(1.7), phi, &wrong, &points).unwrap() > 1e-3);
    }
}
