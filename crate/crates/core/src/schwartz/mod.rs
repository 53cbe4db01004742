//! Polynomial-times-Gaussian test functions with closed-form Fourier
//! transforms, and weighted integrals over `R^d`.
//!
//! The Fourier transform is `f^(y) = pi^{-d/2} int f(x) exp(-2i x.y) dx`.
//! It is unitary, sends `exp(-t|x|^2)` to `t^{-d/2} exp(-|y|^2/t)`, and its
//! square is `f(x) -> f(-x)`.

mod atom;
pub mod family;
mod poly;
mod weighted;

pub use atom::{GaussianAtom, SchwartzFn, WedgeFn};
pub use poly::{hermite_of, MultiPoly, PolyTerm, DEGREE_CAP};
pub use weighted::{integrate_weighted, integrate_weighted_vec, integrate_weighted_with, weighted_norm, Scales};
