//! The intertwining operator `I(u)`, the invariant forms it defines, and the
//! Gamma functional equation behind the unramified norm identity.
//!
//! For `lambda = (n-1)(1-u)` and `d = n - 1`,
//!
//! ```text
//! I(u) f(y)        = int |x|^{-lambda} m_i(x) f(y + x) dx
//! pairing(f, g)    = int <f(y), I(u) g(y)> dy
//! form_wu(phi, psi) = int |x|^{-lambda} int <phi(y), m_i(x) psi(y)> e^{-2i y.x} dy dx
//! ```
//!
//! In both forms the `y`-integral is a closed-form atom, so each form value
//! costs a single weighted quadrature in `R^d`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

pub use crate::params::CSParams;

use crate::error::{Error, Result};
use crate::exterior::m_i;
use crate::quadrature::{polar_fixed_vec, GaussRule, QuadratureSpec};
use crate::schwartz::{integrate_weighted, integrate_weighted_vec, integrate_weighted_with, Scales, SchwartzFn, WedgeFn};

/// A form value and its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormValue {
    pub value: Complex64,
    pub abs_err_estimate: f64,
}

/// `Gamma((n-1)u/2) / Gamma((n-1)(1-u)/2)`: the multiplier relating
/// `I(u)` to the weighted Fourier integral, `I(u) F = kappa A_G`.
pub fn kappa_g(n: usize, u: f64) -> f64 {
    let d = n as f64 - 1.0;
    gamma(d * u / 2.0) / gamma(d * (1.0 - u) / 2.0)
}

/// The constant in `pairing(f, f) = c(u) int |f^(x)|^2 |x|^{-(n-1)u} dx`
/// for scalar `f`, under this crate's Fourier normalization.
pub fn c_u(n: usize, u: f64) -> f64 {
    PI.powf((n as f64 - 1.0) / 2.0) * kappa_g(n, u)
}

pub(crate) fn scales_of_wedge(f: &WedgeFn) -> Scales {
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

pub(crate) fn scales_of_table(table: &[SchwartzFn]) -> Scales {
    table.iter().map(Scales::of).reduce(Scales::merge).expect("non-empty table")
}

/// Entries of `m_i(x)` in row-major order.
pub(crate) fn kernel_entries(x: &[f64], i: usize) -> DMatrix<f64> {
    if i == 0 {
        return DMatrix::identity(1, 1);
    }
    m_i(x, i).expect("quadrature nodes avoid the origin").entries
}

fn check_pair(f: &WedgeFn, g: &WedgeFn) -> Result<()> {
    if f.basis != g.basis {
        return Err(Error::DimensionMismatch {
            expected: f.basis.len(),
            found: g.basis.len(),
        });
    }
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

fn check_params(f: &WedgeFn, p: &CSParams) -> Result<()> {
    p.validate_form()?;
    if f.dim() != p.d() || f.basis.d != p.d() || f.degree() != p.i {
        return Err(Error::InvalidParams(format!(
            "function on R^{} with degree {} does not match (n, i) = ({}, {})",
            f.dim(),
            f.degree(),
            p.n,
            p.i
        )));
    }
    Ok(())
}

/// `int |x|^{-lambda} sum_{S,T} m_i(x)_{S,T} table[S k + T](x) dx`.
fn contract_kernel(table: &[SchwartzFn], k: usize, p: &CSParams, quad: &QuadratureSpec, reflect: bool) -> Result<FormValue> {
    let d = p.d();
    let i = p.i;
    let integrand = |x: &[f64]| -> Complex64 {
        let m = kernel_entries(x, i);
        let arg: Vec<f64> = if reflect { x.iter().map(|v| -v).collect() } else { x.to_vec() };
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..k {
            for t in 0..k {
                let w = m[(s, t)];
                if w != 0.0 {
                    acc += table[s * k + t].eval(&arg) * w;
                }
            }
        }
        acc
    };
    let est = integrate_weighted_with(d, p.lambda(), scales_of_table(table), quad, &integrand)?;
    Ok(FormValue {
        value: est.value,
        abs_err_estimate: est.abs_err,
    })
}

/// `y -> int conj(f(z)) g(z + y) dz` for scalar atoms, in closed form.
pub fn cross_correlation(f: &SchwartzFn, g: &SchwartzFn) -> Result<SchwartzFn> {
    // the transform of z -> g(z + y) is e^{2i y.xi} g^(xi); Plancherel then
    // gives pi^{d/2} F[conj(f^) g^](-y)
    let prod = f.fourier().conj().multiply(&g.fourier())?;
    let minus = DMatrix::identity(f.d, f.d) * -1.0;
    Ok(prod.fourier().compose_orthogonal(&minus).scale(Complex64::new(PI.powf(f.d as f64 / 2.0), 0.0)))
}

/// `(I(u) f)(y)`, a vector in `Λ^i`.
pub fn intertwine_apply(f: &WedgeFn, p: &CSParams, y: &[f64], quad: &QuadratureSpec) -> Result<DVector<Complex64>> {
    check_params(f, p)?;
    let k = f.basis.len();
    let shifted = f.translate(&y.iter().map(|v| -v).collect::<Vec<_>>());
    let i = p.i;
    let integrand = |x: &[f64], out: &mut [Complex64]| {
        let m = kernel_entries(x, i);
        let vals: Vec<Complex64> = shifted.components.iter().map(|c| c.eval(x)).collect();
        for s in 0..k {
            out[s] = (0..k).map(|t| vals[t] * m[(s, t)]).sum();
        }
    };
    let est = integrate_weighted_vec(p.d(), p.lambda(), scales_of_wedge(&shifted), quad, k, &integrand)?;
    Ok(DVector::from_vec(est.value))
}

/// `int <f(y), (I(u) g)(y)> dy` on the Bruhat cell.
pub fn pairing_bruhat(f: &WedgeFn, g: &WedgeFn, p: &CSParams, quad: &QuadratureSpec) -> Result<FormValue> {
    check_pair(f, g)?;
    check_params(f, p)?;
    if f.components.iter().all(SchwartzFn::is_zero) || g.components.iter().all(SchwartzFn::is_zero) {
        return Ok(FormValue {
            value: Complex64::new(0.0, 0.0),
            abs_err_estimate: 0.0,
        });
    }
    let k = f.basis.len();
    let mut table = Vec::with_capacity(k * k);
    for fs in &f.components {
        for gt in &g.components {
            table.push(cross_correlation(fs, gt)?);
        }
    }
    contract_kernel(&table, k, p, quad, false)
}

/// [`pairing_bruhat`] by literal nested quadrature: a tensor Gauss–Legendre
/// grid in `y` over the support of `f`, and at each node a fixed polar rule
/// for `(I(u) g)(y)`.
pub fn pairing_bruhat_nested(
    f: &WedgeFn,
    g: &WedgeFn,
    p: &CSParams,
    grid_nodes: usize,
    polar_nodes: (usize, usize),
) -> Result<Complex64> {
    check_pair(f, g)?;
    check_params(f, p)?;
    let d = p.d();
    let k = f.basis.len();
    let r_f = scales_of_wedge(f).radius;
    let r_g = scales_of_wedge(g).radius;
    let rule = GaussRule::legendre(grid_nodes).mapped(-r_f, r_f);
    let total = rule.len().pow(d as u32);
    let i = p.i;
    let acc: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut y = vec![0.0; d];
            let mut w = 1.0;
            let mut rem = flat;
            for yj in y.iter_mut() {
                let idx = rem % rule.len();
                rem /= rule.len();
                *yj = rule.nodes[idx];
                w *= rule.weights[idx];
            }
            let fy = f.eval(&y);
            if fy.iter().all(|v| v.norm() < 1e-300) {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let yn: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let integrand = |x: &[f64], out: &mut [Complex64]| {
                let m = kernel_entries(x, i);
                let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                let vals = g.eval(&z);
                for s in 0..k {
                    out[s] = (0..k).map(|t| vals[t] * m[(s, t)]).sum();
                }
            };
            let (ig, _) = polar_fixed_vec(d, p.lambda(), r_g + yn, polar_nodes.0, polar_nodes.1, k, &integrand)?;
            Ok(fy.iter().zip(&ig).map(|(a, b)| a.conj() * b).sum::<Complex64>() * w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(acc.into_iter().sum())
}

/// The sesquilinear form on Fourier-side functions.
pub fn form_wu(phi: &WedgeFn, psi: &WedgeFn, p: &CSParams, quad: &QuadratureSpec) -> Result<FormValue> {
    check_pair(phi, psi)?;
    check_params(phi, p)?;
    let k = phi.basis.len();
    let scale = Complex64::new(PI.powf(p.d() as f64 / 2.0), 0.0);
    let mut table = Vec::with_capacity(k * k);
    for a in &phi.components {
        for b in &psi.components {
            table.push(a.conj().multiply(b)?.fourier().scale(scale));
        }
    }
    contract_kernel(&table, k, p, quad, false)
}

/// Gram matrix `G[a][b] = form_wu(fam[a], fam[b])`.
pub fn gram_matrix(fam: &[WedgeFn], p: &CSParams, quad: &QuadratureSpec) -> Result<DMatrix<Complex64>> {
    let m = fam.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
    let values = pairs
        .par_iter()
        .map(|&(a, b)| form_wu(&fam[a], &fam[b], p, quad).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let mut g = DMatrix::zeros(m, m);
    for (&(a, b), v) in pairs.iter().zip(values) {
        g[(a, b)] = v;
        g[(b, a)] = v.conj();
    }
    Ok(g)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Both sides of `Gamma(s) int |x|^{-2s} f^ = Gamma(d/2 - s) int |x|^{2s-d} f`,
/// `d = n - 1`, for real `s` in the strip `0 < s < d/2`.
pub fn functional_equation(f: &SchwartzFn, s: f64, n: usize, quad: &QuadratureSpec) -> Result<(Complex64, Complex64)> {
    let d = n as f64 - 1.0;
    if !(s > 0.0 && s < d / 2.0) {
        return Err(Error::OutOfStrip { s, upper: d / 2.0 });
    }
    if f.d != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: f.d,
        });
    }
    let lhs = integrate_weighted(&f.fourier(), 2.0 * s, quad)?.value * gamma(s);
    let rhs = integrate_weighted(f, d - 2.0 * s, quad)?.value * gamma(d / 2.0 - s);
    Ok((lhs, rhs))
}

/// `A_G phi^(y) = int |x|^{-(n-1)u} phi^(x) e^{-2i x.y} dx`.
pub fn a_g_map(phi_hat: &SchwartzFn, p: &CSParams, y: &[f64], quad: &QuadratureSpec) -> Result<Complex64> {
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    Ok(integrate_weighted(&phi_hat.modulate(&neg), p.weight_exponent(), quad)?.value)
}

/// [`a_g_map`] applied to each component.
pub fn a_g_map_wedge(phi_hat: &WedgeFn, p: &CSParams, y: &[f64], quad: &QuadratureSpec) -> Result<DVector<Complex64>> {
    let vals = phi_hat
        .components
        .iter()
        .map(|c| a_g_map(c, p, y, quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(vals))
}

/// `I(u)` applied to the Fourier transform: the ramified analogue of
/// [`a_g_map`], equal to `kappa_g(n, u) * a_g_map` when `i = 0`.
pub fn a_g_intertwined(phi_hat: &WedgeFn, p: &CSParams, y: &[f64], quad: &QuadratureSpec) -> Result<DVector<Complex64>> {
    intertwine_apply(&phi_hat.fourier(), p, y, quad)
}
