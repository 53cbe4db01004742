//! Matrix realization of `G = SO(n,1)` and its Bruhat and Iwasawa
//! decompositions.
//!
//! Group elements are `(n+1) x (n+1)` real matrices indexed `0..=n`. The
//! invariant form is the Gram matrix returned by [`gram_form`]: the quadratic
//! form `-2 v_0 v_n + v_1^2 + ... + v_{n-1}^2`. With this form the unipotent
//! elements `u(x)`, the diagonal torus `d(a)` and the block embeddings of
//! `O(n-1)` all lie in the group.
//!
//! The Weyl representative [`make_w`] swaps `e_0` and `e_n` (both corner
//! entries `+1`). Together with corner sign `+1` for the `M` factor this is the
//! unique sign choice for which the Bruhat factorization of `w u(x) w`
//! reconstructs; see [`WEYL_CORNER_SIGN`] and the brute-force test below.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Corner sign of the Weyl representative: `w e_0 = s e_n`, `w e_n = s e_0`.
pub const WEYL_CORNER_SIGN: f64 = 1.0;
/// Corner sign of the `M` factor in the Bruhat factorization of `w u(x) w`.
pub const BRUHAT_M_CORNER_SIGN: f64 = 1.0;

/// Tolerance for exact algebraic identities.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for products of a handful of matrices.
pub const PRODUCT_TOL: f64 = 1e-10;
/// Norm below which a vector is treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

/// An element of `SO(n,1)` (or `O(n,1)`), stored as a dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    n: usize,
    entries: DMatrix<f64>,
}

impl GroupElement {
    /// Wraps a matrix without checking membership.
    pub fn from_matrix(n: usize, entries: DMatrix<f64>) -> Self {
        assert_eq!(entries.nrows(), n + 1);
        assert_eq!(entries.ncols(), n + 1);
        Self { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(n, DMatrix::identity(n + 1, n + 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.n, other.n);
        GroupElement::from_matrix(self.n, &self.entries * &other.entries)
    }

    pub fn inverse(&self) -> GroupElement {
        // g^{-1} = S^{-1} g^T S, and S is its own inverse.
        let s = gram_form(self.n);
        GroupElement::from_matrix(self.n, &s * self.entries.transpose() * &s)
    }

    pub fn transpose(&self) -> GroupElement {
        GroupElement::from_matrix(self.n, self.entries.transpose())
    }

    /// Largest entry of `g^T S g - S`.
    pub fn form_deviation(&self) -> f64 {
        let s = gram_form(self.n);
        max_abs(&(self.entries.transpose() * &s * &self.entries - &s))
    }

    /// Largest entry of `g^T g - I`; zero for elements of `K`.
    pub fn orthogonality_deviation(&self) -> f64 {
        let id = DMatrix::identity(self.n + 1, self.n + 1);
        max_abs(&(self.entries.transpose() * &self.entries - id))
    }

    pub fn is_in_group(&self) -> bool {
        self.form_deviation() <= EXACT_TOL && (self.entries.determinant().abs() - 1.0).abs() <= 1e-10
    }

    pub fn is_in_k(&self) -> bool {
        self.is_in_group() && self.orthogonality_deviation() <= EXACT_TOL
    }

    /// Largest entrywise difference to another element.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// The invariant Gram matrix `S` of `SO(n,1)`.
pub fn gram_form(n: usize) -> DMatrix<f64> {
    assert!(n >= 2, "SO(n,1) needs n >= 2");
    let mut s = DMatrix::zeros(n + 1, n + 1);
    s[(0, n)] = -1.0;
    s[(n, 0)] = -1.0;
    for j in 1..n {
        s[(j, j)] = 1.0;
    }
    s
}

/// The unipotent element `u(x)`, `x` in `R^{n-1}`.
pub fn make_u(x: &[f64]) -> GroupElement {
    let n = x.len() + 1;
    let mut g = DMatrix::identity(n + 1, n + 1);
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    for (j, &xj) in x.iter().enumerate() {
        g[(0, j + 1)] = xj;
        g[(j + 1, n)] = xj;
    }
    g[(0, n)] = norm2 / 2.0;
    GroupElement::from_matrix(n, g)
}

/// The torus element `d(a) = diag(a, 1, ..., 1, 1/a)`.
pub fn make_d(a: f64, n: usize) -> GroupElement {
    assert!(a != 0.0, "d(a) needs a != 0");
    let mut g = DMatrix::identity(n + 1, n + 1);
    g[(0, 0)] = a;
    g[(n, n)] = 1.0 / a;
    GroupElement::from_matrix(n, g)
}

/// Embeds an orthogonal `(n-1) x (n-1)` matrix with corner entries `eps`.
pub fn make_m(m: &DMatrix<f64>, eps: f64) -> Result<GroupElement> {
    let k = m.nrows();
    if m.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: m.ncols(),
        });
    }
    let deviation = max_abs(&(m.transpose() * m - DMatrix::identity(k, k)));
    if deviation > EXACT_TOL {
        return Err(Error::NotOrthogonal { deviation });
    }
    let n = k + 1;
    let mut g = DMatrix::zeros(n + 1, n + 1);
    g[(0, 0)] = eps;
    g[(n, n)] = eps;
    g.view_mut((1, 1), (k, k)).copy_from(m);
    Ok(GroupElement::from_matrix(n, g))
}

/// The Weyl representative with the fixed corner sign.
pub fn make_w(n: usize) -> GroupElement {
    make_w_signed(n, WEYL_CORNER_SIGN)
}

/// A candidate Weyl representative `e_0 -> s e_n`, `e_n -> s e_0`.
pub fn make_w_signed(n: usize, sign: f64) -> GroupElement {
    let mut g = DMatrix::identity(n + 1, n + 1);
    g[(0, 0)] = 0.0;
    g[(n, n)] = 0.0;
    g[(0, n)] = sign;
    g[(n, 0)] = sign;
    GroupElement::from_matrix(n, g)
}

/// Factors of `w u(x) w = u(z) w m d(a) u(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BruhatFactors {
    pub z: Vec<f64>,
    pub m: DMatrix<f64>,
    pub a: f64,
    pub y: Vec<f64>,
}

impl BruhatFactors {
    pub fn reconstruct(&self) -> GroupElement {
        self.reconstruct_with_signs(WEYL_CORNER_SIGN, BRUHAT_M_CORNER_SIGN)
            .expect("reflection factor is orthogonal")
    }

    pub fn reconstruct_with_signs(&self, w_sign: f64, m_sign: f64) -> Result<GroupElement> {
        let n = self.z.len() + 1;
        let w = make_w_signed(n, w_sign);
        let m = make_m(&self.m, m_sign)?;
        Ok(make_u(&self.z)
            .mul(&w)
            .mul(&m)
            .mul(&make_d(self.a, n))
            .mul(&make_u(&self.y)))
    }
}

/// Bruhat factorization of `w u(x) w` for `x != 0`.
///
/// The right unipotent factor is `u(2x/|x|^2)`, the same vector as the left
/// one. Only this choice reconstructs the product entrywise; the left factor,
/// the reflection and the torus parameter `|x|^2/2` are the ones that enter
/// every intertwining computation.
pub fn bruhat_decompose(x: &[f64]) -> Result<BruhatFactors> {
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if norm2.sqrt() < ZERO_NORM {
        return Err(Error::ZeroVector { norm: norm2.sqrt() });
    }
    let z: Vec<f64> = x.iter().map(|v| 2.0 * v / norm2).collect();
    let m = crate::exterior::reflection(x)?;
    Ok(BruhatFactors {
        y: z.clone(),
        z,
        m,
        a: norm2 / 2.0,
    })
}

/// Factors of `u(x) w = k d(a) u(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaFactors {
    pub k: GroupElement,
    pub a: f64,
    pub y: Vec<f64>,
}

impl IwasawaFactors {
    pub fn reconstruct(&self) -> GroupElement {
        let n = self.k.n();
        self.k.mul(&make_d(self.a, n)).mul(&make_u(&self.y))
    }
}

pub fn iwasawa_decompose(x: &[f64]) -> IwasawaFactors {
    let n = x.len() + 1;
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    let a = 1.0 + norm2 / 2.0;
    let y: Vec<f64> = x.iter().map(|v| v / a).collect();
    let neg_y: Vec<f64> = y.iter().map(|v| -v).collect();
    let k = make_u(x)
        .mul(&make_w(n))
        .mul(&make_u(&neg_y))
        .mul(&make_d(1.0 / a, n));
    IwasawaFactors { k, a, y }
}

/// The modulus character `rho_P(d(a)) = a^{(n-1)/2}`.
pub fn rho_p(a: f64, n: usize) -> f64 {
    assert!(a > 0.0);
    a.powf((n as f64 - 1.0) / 2.0)
}

/// Matrix of `Ad(d(a))` on `Lie(N)` in the basis of generators
/// `N_j = d/dt u(t e_j)|_{t=0}`.
pub fn adjoint_on_lie_n(a: f64, n: usize) -> DMatrix<f64> {
    let d = make_d(a, n);
    let d_inv = make_d(1.0 / a, n);
    let dim = n - 1;
    let mut out = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut gen = DMatrix::zeros(n + 1, n + 1);
        gen[(0, j + 1)] = 1.0;
        gen[(j + 1, n)] = 1.0;
        let image = d.matrix() * gen * d_inv.matrix();
        // coordinates of the image along N_k are read off row 0
        for k in 0..dim {
            out[(k, j)] = image[(0, k + 1)];
        }
    }
    out
}

/// Sphere point of `G/P = K/M` represented by `g`: the spacelike part of the
/// null line `g e_0`, normalized.
pub fn boundary_point(g: &GroupElement) -> DVector<f64> {
    let n = g.n();
    let col = g.matrix().column(0);
    // spacelike frame: (e_0 - e_n)/sqrt2, e_1, ..., e_{n-1}
    let mut p = DVector::zeros(n);
    p[0] = (col[0] - col[n]) / std::f64::consts::SQRT_2;
    for j in 1..n {
        p[j] = col[j];
    }
    let norm = p.norm();
    p / norm
}

/// Both sides of the Haar consistency identity for `SO(2,1)`.
///
/// `f` is a function on the circle `K/M`, extended to `phi(k d(a) u) = a^{-1} f(k)`.
/// Returns `(int_R dx phi(u(x) w), int_K phi(k) dk)` where `dk` is the
/// rotation-invariant measure of total mass `int_R dx / (1 + x^2/2)`.
pub fn haar_consistency_n2<F: Fn(f64) -> f64>(f: F, nodes: usize) -> (f64, f64) {
    use std::f64::consts::PI;
    let rule = crate::quadrature::GaussRule::legendre(nodes);
    // x = tan(tau), tau in (-pi/2, pi/2)
    let mut bruhat = 0.0;
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let tau = t * PI / 2.0;
        let x = tau.tan();
        let jac = (PI / 2.0) / tau.cos().powi(2);
        let iw = iwasawa_decompose(&[x]);
        let p = boundary_point(&iw.k);
        let theta = p[1].atan2(p[0]);
        bruhat += w * jac * f(theta) / iw.a;
    }
    let total_mass = PI * std::f64::consts::SQRT_2;
    let m = 4 * nodes;
    let mut circle = 0.0;
    for j in 0..m {
        circle += f(2.0 * PI * j as f64 / m as f64);
    }
    circle *= total_mass / m as f64;
    (bruhat, circle)
}
