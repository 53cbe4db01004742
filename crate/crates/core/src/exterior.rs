//! Exterior powers of matrices on lexicographic subset bases.
//!
//! Indices are zero-based: the basis of `Λ^i(R^d)` is the list of increasing
//! `i`-subsets of `{0, ..., d-1}` in lexicographic order.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{max_abs, EXACT_TOL, ZERO_NORM};

/// The increasing `i`-subsets of `{0, ..., d-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetBasis {
    pub d: usize,
    pub i: usize,
    pub elements: Vec<Vec<usize>>,
}

impl SubsetBasis {
    pub fn new(d: usize, i: usize) -> Result<Self> {
        if i > d {
            return Err(Error::DegreeOutOfRange { degree: i, dim: d });
        }
        let mut elements = Vec::new();
        let mut current = Vec::with_capacity(i);
        push_subsets(0, d, i, &mut current, &mut elements);
        Ok(SubsetBasis { d, i, elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, subset: &[usize]) -> Option<usize> {
        self.elements.binary_search_by(|e| e.as_slice().cmp(subset)).ok()
    }
}

fn push_subsets(start: usize, d: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if left == 0 {
        out.push(current.clone());
        return;
    }
    for k in start..=(d - left) {
        current.push(k);
        push_subsets(k + 1, d, left - 1, current, out);
        current.pop();
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1))
}

/// A linear operator on `Λ^i(R^d)` in the subset basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeOperator {
    pub basis: SubsetBasis,
    pub entries: DMatrix<f64>,
}

impl WedgeOperator {
    pub fn identity(d: usize, i: usize) -> Result<Self> {
        let basis = SubsetBasis::new(d, i)?;
        let k = basis.len();
        Ok(WedgeOperator {
            basis,
            entries: DMatrix::identity(k, k),
        })
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.entries * v
    }

    pub fn compose(&self, other: &WedgeOperator) -> WedgeOperator {
        assert_eq!(self.basis, other.basis);
        WedgeOperator {
            basis: self.basis.clone(),
            entries: &self.entries * &other.entries,
        }
    }

    pub fn scale(&self, s: f64) -> WedgeOperator {
        WedgeOperator {
            basis: self.basis.clone(),
            entries: &self.entries * s,
        }
    }

    /// Largest entry of `E^T E - I`.
    pub fn orthogonality_deviation(&self) -> f64 {
        let k = self.basis.len();
        max_abs(&(self.entries.transpose() * &self.entries - DMatrix::identity(k, k)))
    }
}

/// The reflection `I - 2 x x^T / |x|^2`.
pub fn reflection(x: &[f64]) -> Result<DMatrix<f64>> {
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if norm2.sqrt() < ZERO_NORM {
        return Err(Error::ZeroVector { norm: norm2.sqrt() });
    }
    let d = x.len();
    let v = DVector::from_column_slice(x);
    Ok(DMatrix::identity(d, d) - (&v * v.transpose()) * (2.0 / norm2))
}

fn minor(a: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => a[(rows[0], cols[0])],
        2 => a[(rows[0], cols[0])] * a[(rows[1], cols[1])] - a[(rows[0], cols[1])] * a[(rows[1], cols[0])],
        k => DMatrix::from_fn(k, k, |r, c| a[(rows[r], cols[c])]).determinant(),
    }
}

/// The compound matrix: entry `(T, S)` is `det A[T, S]`.
pub fn wedge_matrix(a: &DMatrix<f64>, i: usize) -> Result<WedgeOperator> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.ncols(),
        });
    }
    let basis = SubsetBasis::new(d, i)?;
    let k = basis.len();
    let entries = DMatrix::from_fn(k, k, |r, c| minor(a, &basis.elements[r], &basis.elements[c]));
    Ok(WedgeOperator { basis, entries })
}

/// `Λ^i` of the reflection through `x^⊥`.
pub fn m_i(x: &[f64], i: usize) -> Result<WedgeOperator> {
    wedge_matrix(&reflection(x)?, i)
}

/// `Φ_i(x, t) = (|x|^2 + t^2)^i m_i((x, t))`, evaluated without division.
pub fn phi_poly(x: &[f64], t: f64, i: usize) -> Result<WedgeOperator> {
    let mut a: Vec<f64> = x.to_vec();
    a.push(t);
    let norm2: f64 = a.iter().map(|v| v * v).sum();
    if norm2.sqrt() < ZERO_NORM {
        return Err(Error::ZeroVector { norm: norm2.sqrt() });
    }
    let d = a.len();
    let v = DVector::from_column_slice(&a);
    let b = DMatrix::identity(d, d) * norm2 - (&v * v.transpose()) * 2.0;
    wedge_matrix(&b, i)
}

/// Dense univariate polynomial, coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.0.len().max(other.0.len());
        Poly((0..len)
            .map(|k| self.0.get(k).copied().unwrap_or(0.0) + other.0.get(k).copied().unwrap_or(0.0))
            .collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (j, a) in self.0.iter().enumerate() {
            for (k, b) in other.0.iter().enumerate() {
                out[j + k] += a * b;
            }
        }
        Poly(out)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let k = m.len();
    if k == 0 {
        return Poly::constant(1.0);
    }
    if k == 1 {
        return m[0][0].clone();
    }
    // Laplace expansion along the first row
    let mut acc = Poly::constant(0.0);
    for c in 0..k {
        let sub: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = m[0][c].mul(&poly_det(&sub));
        acc = acc.add(&if c % 2 == 0 { term } else { term.scale(-1.0) });
    }
    acc
}

/// Entries of `Φ_i(x, t)` as exact polynomials in `t` (degree at most `2i`).
pub fn phi_poly_in_t(x: &[f64], i: usize) -> Result<(SubsetBasis, Vec<Vec<Poly>>)> {
    let d = x.len() + 1;
    let basis = SubsetBasis::new(d, i)?;
    let x2: f64 = x.iter().map(|v| v * v).sum();
    // B(t) = (|x|^2 + t^2) I - 2 a a^T, a = (x, t)
    let entry = |r: usize, c: usize| -> Poly {
        let mut p = if r == c {
            Poly(vec![x2, 0.0, 1.0])
        } else {
            Poly::constant(0.0)
        };
        let ar = if r < d - 1 { Poly(vec![x[r]]) } else { Poly(vec![0.0, 1.0]) };
        let ac = if c < d - 1 { Poly(vec![x[c]]) } else { Poly(vec![0.0, 1.0]) };
        p = p.add(&ar.mul(&ac).scale(-2.0));
        p
    };
    let k = basis.len();
    let mut table = vec![vec![Poly::constant(0.0); k]; k];
    for (r, rows) in basis.elements.iter().enumerate() {
        for (c, cols) in basis.elements.iter().enumerate() {
            let sub: Vec<Vec<Poly>> = rows.iter().map(|&a| cols.iter().map(|&b| entry(a, b)).collect()).collect();
            table[r][c] = poly_det(&sub);
        }
    }
    Ok((basis, table))
}

/// Embeds `Λ^i(R^{d-1})` into `Λ^i(R^d)` by keeping subsets.
pub fn include_wedge(v: &DVector<f64>, d: usize, i: usize) -> Result<DVector<f64>> {
    let small = SubsetBasis::new(d - 1, i)?;
    let big = SubsetBasis::new(d, i)?;
    if v.len() != small.len() {
        return Err(Error::DimensionMismatch {
            expected: small.len(),
            found: v.len(),
        });
    }
    let mut out = DVector::zeros(big.len());
    for (k, s) in small.elements.iter().enumerate() {
        out[big.index_of(s).expect("subset of a smaller range")] = v[k];
    }
    Ok(out)
}

/// Adjoint of [`include_wedge`]: drops subsets containing the last index.
pub fn restrict_wedge(v: &DVector<f64>, d: usize, i: usize) -> Result<DVector<f64>> {
    let small = SubsetBasis::new(d - 1, i)?;
    let big = SubsetBasis::new(d, i)?;
    if v.len() != big.len() {
        return Err(Error::DimensionMismatch {
            expected: big.len(),
            found: v.len(),
        });
    }
    Ok(DVector::from_iterator(
        small.len(),
        small.elements.iter().map(|s| v[big.index_of(s).expect("subset of a smaller range")]),
    ))
}

/// Positions in the `Λ^i(R^d)` basis of the subsets avoiding the last index.
pub fn included_positions(d: usize, i: usize) -> Result<Vec<usize>> {
    let big = SubsetBasis::new(d, i)?;
    Ok(big
        .elements
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.contains(&(d - 1)))
        .map(|(k, _)| k)
        .collect())
}

/// Checks that an operator built from an orthogonal matrix stays orthogonal.
pub fn is_orthogonal(op: &WedgeOperator) -> bool {
    op.orthogonality_deviation() <= EXACT_TOL * 10.0
}
