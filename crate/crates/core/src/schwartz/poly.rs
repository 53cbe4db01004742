use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cap on the total degree of atom polynomials.
pub const DEGREE_CAP: usize = 8;

/// A polynomial in `d` real variables with complex coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "PolyRepr", try_from = "PolyRepr")]
pub struct MultiPoly {
    d: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

/// Serialized form of one monomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PolyRepr {
    dim: usize,
    terms: Vec<PolyTerm>,
}

impl From<MultiPoly> for PolyRepr {
    fn from(p: MultiPoly) -> Self {
        PolyRepr {
            dim: p.d,
            terms: p
                .terms
                .into_iter()
                .map(|(exponents, coeff)| PolyTerm { exponents, coeff })
                .collect(),
        }
    }
}

impl TryFrom<PolyRepr> for MultiPoly {
    type Error = String;

    fn try_from(repr: PolyRepr) -> std::result::Result<Self, String> {
        let mut p = MultiPoly::zero(repr.dim);
        for t in repr.terms {
            if t.exponents.len() != repr.dim {
                return Err(format!("monomial has {} exponents, expected {}", t.exponents.len(), repr.dim));
            }
            p.add_term(t.exponents, t.coeff);
        }
        if p.degree() > DEGREE_CAP {
            return Err(format!("degree {} exceeds cap {}", p.degree(), DEGREE_CAP));
        }
        Ok(p)
    }
}

impl MultiPoly {
    pub fn zero(d: usize) -> Self {
        MultiPoly {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: usize, c: Complex64) -> Self {
        let mut p = Self::zero(d);
        p.add_term(vec![0; d], c);
        p
    }

    pub fn one(d: usize) -> Self {
        Self::constant(d, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `x_j`.
    pub fn var(d: usize, j: usize) -> Self {
        let mut e = vec![0; d];
        e[j] = 1;
        let mut p = Self::zero(d);
        p.add_term(e, Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(d: usize, terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Self {
        let mut p = Self::zero(d);
        for (e, c) in terms {
            assert_eq!(e.len(), d);
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>() as usize)
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> MultiPoly {
        let mut out = Self::zero(self.d);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.d, other.d);
        let mut out = Self::zero(self.d);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Product with a degree check against [`DEGREE_CAP`].
    pub fn mul_capped(&self, other: &MultiPoly) -> Result<MultiPoly> {
        let degree = self.degree() + other.degree();
        if degree > DEGREE_CAP {
            return Err(Error::DegreeCapExceeded {
                degree,
                cap: DEGREE_CAP,
            });
        }
        Ok(self.mul(other))
    }

    pub fn conj(&self) -> MultiPoly {
        let mut out = Self::zero(self.d);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.conj());
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(k, v)| v.powi(*k as i32)).product::<f64>())
            .sum()
    }

    /// `z -> p(z + b)`.
    pub fn translate(&self, b: &[f64]) -> MultiPoly {
        let mut out = Self::zero(self.d);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.d, *c);
            for (j, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let shifted = Self::var(self.d, j).add(&Self::constant(self.d, Complex64::new(b[j], 0.0)));
                term = term.mul(&shifted.pow(k));
            }
            out = out.add(&term);
        }
        out
    }

    /// `x -> p(lam x)`.
    pub fn dilate(&self, lam: f64) -> MultiPoly {
        let mut out = Self::zero(self.d);
        for (e, c) in &self.terms {
            let k: u32 = e.iter().sum();
            out.add_term(e.clone(), c * lam.powi(k as i32));
        }
        out
    }

    /// `x -> p(R x)` for a square matrix `R`.
    pub fn linear_substitute(&self, r: &nalgebra::DMatrix<f64>) -> MultiPoly {
        let rows: Vec<MultiPoly> = (0..self.d)
            .map(|j| {
                (0..self.d).fold(Self::zero(self.d), |acc, k| {
                    acc.add(&Self::var(self.d, k).scale(Complex64::new(r[(j, k)], 0.0)))
                })
            })
            .collect();
        let mut out = Self::zero(self.d);
        for (e, c) in &self.terms {
            let mut term = Self::constant(self.d, *c);
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&rows[j].pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        (0..k).fold(Self::one(self.d), |acc, _| acc.mul(self))
    }

    /// Embeds into `d + 1` variables, constant in the new last variable.
    pub fn extend_dim(&self) -> MultiPoly {
        let mut out = Self::zero(self.d + 1);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.push(0);
            out.add_term(e2, *c);
        }
        out
    }
}

/// Physicists' Hermite polynomial `H_k` applied to a polynomial argument.
pub fn hermite_of(k: usize, s: &MultiPoly) -> MultiPoly {
    let d = s.dim();
    let mut prev = MultiPoly::one(d);
    if k == 0 {
        return prev;
    }
    let two = Complex64::new(2.0, 0.0);
    let mut cur = s.scale(two);
    for j in 1..k {
        let next = s.mul(&cur).scale(two).add(&prev.scale(Complex64::new(-2.0 * j as f64, 0.0)));
        prev = cur;
        cur = next;
    }
    cur
}
