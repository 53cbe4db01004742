use num_complex::Complex64;

use super::atom::SchwartzFn;
use crate::error::{Error, Result};
use crate::quadrature::{polar_adaptive, polar_adaptive_vec, Estimate, QuadratureSpec, VecEstimate};

/// Length and frequency scales of an integrand, used to size node tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub radius: f64,
    pub sharpness: f64,
    pub frequency: f64,
    pub degree: usize,
}

impl Scales {
    pub fn of(f: &SchwartzFn) -> Self {
        Scales {
            radius: f.support_radius(),
            sharpness: f.max_sharpness(),
            frequency: f.max_frequency(),
            degree: f.max_degree(),
        }
    }

    pub fn merge(self, other: Scales) -> Scales {
        Scales {
            radius: self.radius.max(other.radius),
            sharpness: self.sharpness.max(other.sharpness),
            frequency: self.frequency.max(other.frequency),
            degree: self.degree.max(other.degree),
        }
    }

    /// Starting node counts for [`polar_adaptive`].
    pub fn sized(&self, spec: &QuadratureSpec) -> QuadratureSpec {
        let waves = self.radius * (self.sharpness + self.frequency);
        let radial = spec.radial_nodes + (0.4 * waves).ceil() as usize + self.degree;
        let angular = spec.angular_nodes + (0.3 * waves).ceil() as usize + self.degree;
        QuadratureSpec {
            radial_nodes: radial,
            angular_nodes: angular,
            box_halfwidth: Some(spec.box_halfwidth.unwrap_or(self.radius)),
            ..spec.clone()
        }
    }
}

/// `int_{R^d} g(x) |x|^{-alpha} dx` for an integrand with the given scales.
pub fn integrate_weighted_with<F>(d: usize, alpha: f64, scales: Scales, quad: &QuadratureSpec, g: &F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    if alpha >= d as f64 {
        return Err(Error::WeightNotIntegrable { alpha, dim: d });
    }
    let spec = scales.sized(quad);
    let radius = spec.box_halfwidth.expect("sized spec carries a radius");
    polar_adaptive(d, alpha, radius, &spec, g)
}

/// Vector-valued form of [`integrate_weighted_with`].
pub fn integrate_weighted_vec<F>(
    d: usize,
    alpha: f64,
    scales: Scales,
    quad: &QuadratureSpec,
    dim: usize,
    g: &F,
) -> Result<VecEstimate>
where
    F: Fn(&[f64], &mut [Complex64]) + Sync,
{
    if alpha >= d as f64 {
        return Err(Error::WeightNotIntegrable { alpha, dim: d });
    }
    let spec = scales.sized(quad);
    let radius = spec.box_halfwidth.expect("sized spec carries a radius");
    polar_adaptive_vec(d, alpha, radius, &spec, dim, g)
}

/// `int_{R^d} f(x) |x|^{-alpha} dx`.
pub fn integrate_weighted(f: &SchwartzFn, alpha: f64, quad: &QuadratureSpec) -> Result<Estimate> {
    integrate_weighted_with(f.d, alpha, Scales::of(f), quad, &|x: &[f64]| f.eval(x))
}

/// `int |phi_hat(x)|^2 |x|^{-(n-1)u} dx`.
pub fn weighted_norm(phi_hat: &SchwartzFn, u: f64, n: usize, quad: &QuadratureSpec) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParams(format!("weighted norm needs 0 < u < 1, got {u}")));
    }
    let sq = phi_hat.conj().multiply(phi_hat)?;
    Ok(integrate_weighted(&sq, (n as f64 - 1.0) * u, quad)?.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{sphere_area, GaussRule};
    use crate::schwartz::family::atom_family;
    use statrs::function::gamma::gamma;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_target(1e-10)
    }

    #[test]
    fn gaussian_closed_forms() {
        let g = SchwartzFn::gaussian(2, 1.0);
        let plain = integrate_weighted(&g, 0.0, &spec()).unwrap().value.re;
        assert!((plain - PI).abs() < 1e-12);
        for d in 1..=4 {
            for alpha in [0.3, 0.9, d as f64 - 0.4] {
                let f = SchwartzFn::gaussian(d, 1.0);
                let got = integrate_weighted(&f, alpha, &spec()).unwrap().value.re;
                let exact = sphere_area(d) * gamma((d as f64 - alpha) / 2.0) / 2.0;
                assert!((got - exact).abs() < 1e-10 * exact, "d={d} alpha={alpha}");
            }
        }
    }

    #[test]
    fn rejects_non_integrable_weight() {
        let g = SchwartzFn::gaussian(2, 1.0);
        assert!(matches!(
            integrate_weighted(&g, 2.0, &spec()),
            Err(Error::WeightNotIntegrable { .. })
        ));
    }

    /// Smooth radial bump on the annulus 1 < r < 2, checked against a 1D radial rule.
    #[test]
    fn annulus_bump_against_radial_oracle() {
        let bump = |r: f64| {
            if r <= 1.0 || r >= 2.0 {
                0.0
            } else {
                (-1.0 / ((r - 1.0) * (2.0 - r))).exp()
            }
        };
        let radial = GaussRule::tanh_sinh(1.0, 2.0, 0.02, 400);
        for d in [2usize, 3] {
            let alpha = 0.7;
            let oracle = sphere_area(d) * radial.integrate(|r| bump(r) * r.powf(d as f64 - 1.0 - alpha));
            let g = |x: &[f64]| Complex64::new(bump(x.iter().map(|v| v * v).sum::<f64>().sqrt()), 0.0);
            let got = crate::quadrature::polar_adaptive(
                d,
                alpha,
                2.0,
                &QuadratureSpec::default().with_nodes(200, 8).with_target(1e-9),
                &g,
            )
            .unwrap();
            // the radial Jacobi rule meets a C^inf but non-analytic profile
            assert!((got.value.re - oracle).abs() < 1e-8 * oracle, "{} vs {oracle}", got.value.re);
        }
    }

    #[test]
    fn weighted_norm_gaussian_n3() {
        for u in [0.2, 0.5, 0.8] {
            let got = weighted_norm(&SchwartzFn::gaussian(2, 1.0), u, 3, &spec()).unwrap();
            let exact = PI * 2f64.powf(u - 1.0) * gamma(1.0 - u);
            assert!((got - exact).abs() < 1e-10 * exact);
        }
        let half = PI * 2f64.powf(-0.5) * PI.sqrt();
        let got = weighted_norm(&SchwartzFn::gaussian(2, 1.0), 0.5, 3, &spec()).unwrap();
        assert!((got - half).abs() < 1e-10 * half);
        // u -> 0 approaches the plain L^2 norm pi/2
        let small = weighted_norm(&SchwartzFn::gaussian(2, 1.0), 1e-6, 3, &spec()).unwrap();
        assert!((small - PI / 2.0).abs() < 1e-5);
    }

    #[test]
    fn weighted_norm_scaling_exponent() {
        let fam = atom_family(2, 3, 1, 9);
        let (n, u, lam) = (3usize, 0.4, 1.6);
        for f in &fam {
            let base = weighted_norm(f, u, n, &spec()).unwrap();
            let scaled = weighted_norm(&f.dilate(lam), u, n, &spec()).unwrap();
            let d = (n - 1) as f64;
            let expected = base * lam.powf(d * u - d);
            assert!((scaled - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn weighted_norm_is_positive_on_random_atoms() {
        for (k, f) in atom_family(3, 5, 2, 10).iter().enumerate() {
            let v = weighted_norm(f, 0.1 + 0.15 * k as f64, 4, &spec()).unwrap();
            assert!(v > 0.0);
        }
    }

    #[test]
    fn refinement_cost_is_modest() {
        let f = &atom_family(2, 1, 2, 11)[0];
        let coarse = integrate_weighted(f, 0.5, &QuadratureSpec::default().with_target(1e-6)).unwrap();
        let fine = integrate_weighted(f, 0.5, &QuadratureSpec::default().with_target(1e-12)).unwrap();
        assert!((coarse.value - fine.value).norm() < 1e-6 * fine.value.norm().max(1.0));
        assert!(fine.nodes <= 8 * coarse.nodes, "{} vs {}", fine.nodes, coarse.nodes);
    }
}
