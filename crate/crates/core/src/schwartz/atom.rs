use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::poly::{hermite_of, MultiPoly, DEGREE_CAP};
use crate::error::{Error, Result};
use crate::exterior::{wedge_matrix, SubsetBasis};

/// `p(x) exp(-a |x - b|^2) exp(2i c.x)` on `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianAtom {
    pub width: f64,
    pub center: Vec<f64>,
    pub modulation: Vec<f64>,
    pub poly: MultiPoly,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

impl GaussianAtom {
    pub fn new(width: f64, center: Vec<f64>, modulation: Vec<f64>, poly: MultiPoly) -> Result<Self> {
        let d = center.len();
        if !(width > 0.0) {
            return Err(Error::InvalidParams(format!("atom width must be positive, got {width}")));
        }
        for len in [modulation.len(), poly.dim()] {
            if len != d {
                return Err(Error::DimensionMismatch { expected: d, found: len });
            }
        }
        if poly.degree() > DEGREE_CAP {
            return Err(Error::DegreeCapExceeded {
                degree: poly.degree(),
                cap: DEGREE_CAP,
            });
        }
        Ok(GaussianAtom {
            width,
            center,
            modulation,
            poly,
        })
    }

    /// `exp(-a |x|^2)`.
    pub fn gaussian(d: usize, a: f64) -> Self {
        GaussianAtom::new(a, vec![0.0; d], vec![0.0; d], MultiPoly::one(d)).expect("valid gaussian")
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(v, b)| (v - b) * (v - b)).sum();
        let phase = 2.0 * dot(&self.modulation, x);
        self.poly.eval(x) * Complex64::from_polar((-self.width * r2).exp(), phase)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        GaussianAtom {
            poly: self.poly.scale(s),
            ..self.clone()
        }
    }

    pub fn conj(&self) -> Self {
        GaussianAtom {
            width: self.width,
            center: self.center.clone(),
            modulation: self.modulation.iter().map(|v| -v).collect(),
            poly: self.poly.conj(),
        }
    }

    pub fn mul(&self, other: &GaussianAtom) -> Result<Self> {
        let (a1, a2) = (self.width, other.width);
        let a = a1 + a2;
        let center: Vec<f64> = self
            .center
            .iter()
            .zip(&other.center)
            .map(|(b1, b2)| (a1 * b1 + a2 * b2) / a)
            .collect();
        let gap2: f64 = self.center.iter().zip(&other.center).map(|(b1, b2)| (b1 - b2).powi(2)).sum();
        let k = (-a1 * a2 * gap2 / a).exp();
        let modulation = self.modulation.iter().zip(&other.modulation).map(|(c1, c2)| c1 + c2).collect();
        let poly = self.poly.mul_capped(&other.poly)?.scale(Complex64::new(k, 0.0));
        Ok(GaussianAtom {
            width: a,
            center,
            modulation,
            poly,
        })
    }

    /// `y -> pi^{-d/2} int f(x) exp(-2i x.y) dx`, in closed form.
    pub fn fourier(&self) -> Self {
        let d = self.dim();
        let a = self.width;
        let sa = a.sqrt();
        let q = self.poly.translate(&self.center);
        let step = Complex64::new(0.0, -1.0 / (2.0 * sa));
        let s: Vec<MultiPoly> = (0..d)
            .map(|j| {
                MultiPoly::var(d, j)
                    .add(&MultiPoly::constant(d, Complex64::new(-self.modulation[j], 0.0)))
                    .scale(Complex64::new(1.0 / sa, 0.0))
            })
            .collect();
        let max_deg = q.degree();
        let hermite: Vec<Vec<MultiPoly>> = s
            .iter()
            .map(|sj| (0..=max_deg).map(|k| hermite_of(k, sj).scale(step.powi(k as i32))).collect())
            .collect();
        let mut out = MultiPoly::zero(d);
        for (alpha, coeff) in q.terms() {
            let mut term = MultiPoly::constant(d, *coeff);
            for (j, &k) in alpha.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&hermite[j][k as usize]);
                }
            }
            out = out.add(&term);
        }
        let prefactor = cis(2.0 * dot(&self.center, &self.modulation)) * a.powf(-(d as f64) / 2.0);
        GaussianAtom {
            width: 1.0 / a,
            center: self.modulation.clone(),
            modulation: self.center.iter().map(|v| -v).collect(),
            poly: out.scale(prefactor),
        }
    }

    /// `int_{R^d} f`, exact.
    pub fn integral(&self) -> Complex64 {
        let d = self.dim();
        self.fourier().eval(&vec![0.0; d]) * PI.powf(d as f64 / 2.0)
    }

    /// `x -> f(x - y0)`.
    pub fn translate(&self, y0: &[f64]) -> Self {
        let neg: Vec<f64> = y0.iter().map(|v| -v).collect();
        GaussianAtom {
            width: self.width,
            center: self.center.iter().zip(y0).map(|(b, y)| b + y).collect(),
            modulation: self.modulation.clone(),
            poly: self.poly.translate(&neg).scale(cis(-2.0 * dot(&self.modulation, y0))),
        }
    }

    /// `x -> f(x) exp(2i c0.x)`.
    pub fn modulate(&self, c0: &[f64]) -> Self {
        GaussianAtom {
            modulation: self.modulation.iter().zip(c0).map(|(c, e)| c + e).collect(),
            ..self.clone()
        }
    }

    /// `x -> f(lam x)`, `lam > 0`.
    pub fn dilate(&self, lam: f64) -> Self {
        GaussianAtom {
            width: self.width * lam * lam,
            center: self.center.iter().map(|b| b / lam).collect(),
            modulation: self.modulation.iter().map(|c| c * lam).collect(),
            poly: self.poly.dilate(lam),
        }
    }

    /// `x -> f(R x)` for orthogonal `R`.
    pub fn compose_orthogonal(&self, r: &DMatrix<f64>) -> Self {
        let rt = r.transpose();
        let apply = |v: &[f64]| (&rt * DVector::from_column_slice(v)).iter().copied().collect::<Vec<f64>>();
        GaussianAtom {
            width: self.width,
            center: apply(&self.center),
            modulation: apply(&self.modulation),
            poly: self.poly.linear_substitute(r),
        }
    }

    /// Radius beyond which the atom is below `exp(-45)` relative to its peak scale.
    pub fn support_radius(&self) -> f64 {
        let b: f64 = dot(&self.center, &self.center).sqrt();
        let cut = 45.0 + 4.0 * self.poly.degree() as f64;
        b + (cut / self.width).sqrt()
    }
}

/// A finite sum of atoms on `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwartzFn {
    pub d: usize,
    pub atoms: Vec<GaussianAtom>,
}

impl SchwartzFn {
    pub fn zero(d: usize) -> Self {
        SchwartzFn { d, atoms: vec![] }
    }

    pub fn from_atom(atom: GaussianAtom) -> Self {
        SchwartzFn {
            d: atom.dim(),
            atoms: vec![atom],
        }
    }

    pub fn from_atoms(d: usize, atoms: Vec<GaussianAtom>) -> Result<Self> {
        for a in &atoms {
            if a.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
            }
        }
        Ok(SchwartzFn { d, atoms })
    }

    pub fn gaussian(d: usize, a: f64) -> Self {
        Self::from_atom(GaussianAtom::gaussian(d, a))
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.poly.is_zero())
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }

    fn map(&self, f: impl Fn(&GaussianAtom) -> GaussianAtom) -> Self {
        SchwartzFn {
            d: self.d,
            atoms: self.atoms.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &SchwartzFn) -> Self {
        assert_eq!(self.d, other.d);
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        SchwartzFn { d: self.d, atoms }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|a| a.scale(s))
    }

    pub fn conj(&self) -> Self {
        self.map(GaussianAtom::conj)
    }

    pub fn fourier(&self) -> Self {
        self.map(GaussianAtom::fourier)
    }

    pub fn translate(&self, y0: &[f64]) -> Self {
        self.map(|a| a.translate(y0))
    }

    pub fn modulate(&self, c0: &[f64]) -> Self {
        self.map(|a| a.modulate(c0))
    }

    pub fn dilate(&self, lam: f64) -> Self {
        self.map(|a| a.dilate(lam))
    }

    pub fn compose_orthogonal(&self, r: &DMatrix<f64>) -> Self {
        self.map(|a| a.compose_orthogonal(r))
    }

    pub fn multiply(&self, other: &SchwartzFn) -> Result<Self> {
        assert_eq!(self.d, other.d);
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(a.mul(b)?);
            }
        }
        Ok(SchwartzFn { d: self.d, atoms })
    }

    /// `|fourier(f)|^2`.
    pub fn autocorrelation_transform(&self) -> Result<Self> {
        let h = self.fourier();
        h.conj().multiply(&h)
    }

    pub fn integral(&self) -> Complex64 {
        self.atoms.iter().map(GaussianAtom::integral).sum()
    }

    /// `int conj(f) g`, exact.
    pub fn inner(&self, other: &SchwartzFn) -> Result<Complex64> {
        Ok(self.conj().multiply(other)?.integral())
    }

    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(GaussianAtom::support_radius).fold(0.0, f64::max)
    }

    /// Largest `|c|` over the atoms; sets the oscillation scale.
    pub fn max_frequency(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| dot(&a.modulation, &a.modulation).sqrt())
            .fold(0.0, f64::max)
    }

    /// Largest `sqrt(a)` over the atoms; sets the spatial resolution scale.
    pub fn max_sharpness(&self) -> f64 {
        self.atoms.iter().map(|a| a.width.sqrt()).fold(0.0, f64::max)
    }

    pub fn max_degree(&self) -> usize {
        self.atoms.iter().map(|a| a.poly.degree()).max().unwrap_or(0)
    }
}

/// A `Λ^i(R^d)`-valued function on `R^d`, one scalar function per subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeFn {
    pub basis: SubsetBasis,
    pub components: Vec<SchwartzFn>,
}

impl WedgeFn {
    pub fn new(basis: SubsetBasis, components: Vec<SchwartzFn>) -> Result<Self> {
        if components.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: components.len(),
            });
        }
        let d = components.first().map(|c| c.d).unwrap_or(basis.d);
        if components.iter().any(|c| c.d != d) {
            return Err(Error::InvalidParams("components must share a domain dimension".into()));
        }
        Ok(WedgeFn { basis, components })
    }

    /// A scalar function viewed as `Λ^0`-valued.
    pub fn scalar(f: SchwartzFn) -> Self {
        let basis = SubsetBasis::new(f.d, 0).expect("degree zero");
        WedgeFn {
            basis,
            components: vec![f],
        }
    }

    pub fn zero(d: usize, i: usize) -> Result<Self> {
        let basis = SubsetBasis::new(d, i)?;
        let components = vec![SchwartzFn::zero(d); basis.len()];
        Ok(WedgeFn { basis, components })
    }

    pub fn degree(&self) -> usize {
        self.basis.i
    }

    pub fn dim(&self) -> usize {
        self.components.first().map(|c| c.d).unwrap_or(self.basis.d)
    }

    pub fn eval(&self, x: &[f64]) -> DVector<Complex64> {
        DVector::from_iterator(self.components.len(), self.components.iter().map(|c| c.eval(x)))
    }

    fn map(&self, f: impl Fn(&SchwartzFn) -> SchwartzFn) -> Self {
        WedgeFn {
            basis: self.basis.clone(),
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn fourier(&self) -> Self {
        self.map(SchwartzFn::fourier)
    }

    pub fn conj(&self) -> Self {
        self.map(SchwartzFn::conj)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn translate(&self, y0: &[f64]) -> Self {
        self.map(|c| c.translate(y0))
    }

    pub fn modulate(&self, c0: &[f64]) -> Self {
        self.map(|c| c.modulate(c0))
    }

    pub fn dilate(&self, lam: f64) -> Self {
        self.map(|c| c.dilate(lam))
    }

    pub fn add(&self, other: &WedgeFn) -> Self {
        assert_eq!(self.basis, other.basis);
        WedgeFn {
            basis: self.basis.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Applies a constant matrix to the values.
    pub fn apply_matrix(&self, m: &DMatrix<f64>) -> Self {
        let d = self.dim();
        let components = (0..self.components.len())
            .map(|r| {
                let mut acc = SchwartzFn::zero(d);
                for (c, comp) in self.components.iter().enumerate() {
                    let w = m[(r, c)];
                    if w != 0.0 {
                        acc = acc.add(&comp.scale(Complex64::new(w, 0.0)));
                    }
                }
                acc
            })
            .collect();
        WedgeFn {
            basis: self.basis.clone(),
            components,
        }
    }

    /// `x -> Λ^i(r) f(r^{-1} x)` for orthogonal `r`.
    pub fn rotate(&self, r: &DMatrix<f64>) -> Result<Self> {
        let w = wedge_matrix(r, self.degree())?;
        Ok(self.map(|c| c.compose_orthogonal(&r.transpose())).apply_matrix(&w.entries))
    }

    /// `int <f(x), g(x)> dx`, exact.
    pub fn inner(&self, other: &WedgeFn) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.components.iter().zip(&other.components) {
            acc += a.inner(b)?;
        }
        Ok(acc)
    }

    pub fn support_radius(&self) -> f64 {
        self.components.iter().map(SchwartzFn::support_radius).fold(0.0, f64::max)
    }

    pub fn max_frequency(&self) -> f64 {
        self.components.iter().map(SchwartzFn::max_frequency).fold(0.0, f64::max)
    }

    pub fn max_sharpness(&self) -> f64 {
        self.components.iter().map(SchwartzFn::max_sharpness).fold(0.0, f64::max)
    }
}
