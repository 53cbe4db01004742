//! Seeded test-function families.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::atom::{GaussianAtom, SchwartzFn, WedgeFn};
use super::poly::MultiPoly;
use crate::error::Result;
use crate::exterior::SubsetBasis;

/// A random atom with moderate width, center, modulation and polynomial part.
pub fn random_atom<R: Rng>(d: usize, max_degree: usize, rng: &mut R) -> GaussianAtom {
    let width = rng.random_range(0.6..1.6);
    let center: Vec<f64> = (0..d).map(|_| rng.random_range(-0.8..0.8)).collect();
    let modulation: Vec<f64> = (0..d).map(|_| rng.random_range(-0.4..0.4)).collect();
    let mut poly = MultiPoly::one(d);
    for _ in 0..max_degree {
        let deg = rng.random_range(1..=max_degree);
        let mut e = vec![0u32; d];
        for _ in 0..deg {
            e[rng.random_range(0..d)] += 1;
        }
        let c = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        poly = poly.add(&MultiPoly::from_terms(d, vec![(e, c)]));
    }
    GaussianAtom::new(width, center, modulation, poly).expect("sampled atom is valid")
}

/// `count` scalar single-atom functions on `R^d`.
pub fn atom_family(d: usize, count: usize, max_degree: usize, seed: u64) -> Vec<SchwartzFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| SchwartzFn::from_atom(random_atom(d, max_degree, &mut rng)))
        .collect()
}

/// `count` functions with values in `Λ^i(R^d)`, one atom per component.
pub fn wedge_family(d: usize, i: usize, count: usize, max_degree: usize, seed: u64) -> Result<Vec<WedgeFn>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = SubsetBasis::new(d, i)?;
    (0..count)
        .map(|_| {
            let comps = (0..basis.len())
                .map(|_| SchwartzFn::from_atom(random_atom(d, max_degree, &mut rng)))
                .collect();
            WedgeFn::new(basis.clone(), comps)
        })
        .collect()
}

/// The scalar family with its radial member first: a centered Gaussian
/// followed by `count - 1` random atoms.
pub fn standard_family(d: usize, count: usize, seed: u64) -> Vec<SchwartzFn> {
    let mut out = vec![SchwartzFn::gaussian(d, 1.0)];
    out.extend(atom_family(d, count.saturating_sub(1), 1, seed));
    out
}
