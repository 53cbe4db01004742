//! Regression against constants pinned in `fixtures/derived_constants.json`,
//! which were computed independently at 30 digits.

use cs_embed::embedding::{isometry_check, EmbeddingContext};
use cs_embed::intertwine::{c_u, kappa_g};
use cs_embed::quadrature::QuadratureSpec;
use cs_embed::schwartz::family::wedge_family;
use serde::Deserialize;

#[derive(Deserialize)]
struct Unramified {
    n: usize,
    u: f64,
    kappa_g: f64,
    c_u: f64,
}

#[derive(Deserialize)]
struct Transverse {
    n: usize,
    i: usize,
    u: f64,
    u_small: f64,
    lambda: f64,
    transverse_mass: f64,
    isometry_ratio: f64,
}

#[derive(Deserialize)]
struct Fixture {
    unramified: Vec<Unramified>,
    transverse: Vec<Transverse>,
}

fn load() -> Fixture {
    serde_json::from_str(include_str!("../fixtures/derived_constants.json")).expect("fixture parses")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn unramified_constants() {
    for e in load().unramified {
        assert!(close(kappa_g(e.n, e.u), e.kappa_g, 1e-13), "kappa n={} u={}", e.n, e.u);
        assert!(close(c_u(e.n, e.u), e.c_u, 1e-13), "c(u) n={} u={}", e.n, e.u);
    }
}

#[test]
fn embedding_contexts() {
    for e in load().transverse {
        let ctx = EmbeddingContext::new(e.n, e.i, e.u).unwrap();
        assert!(close(ctx.small.u, e.u_small, 1e-14));
        assert!(close(ctx.lambda, e.lambda, 1e-14));
        assert!(close(ctx.transverse_mass(), e.transverse_mass, 1e-13));
    }
}

#[test]
fn isometry_ratios() {
    let quad = QuadratureSpec::default().with_target(1e-8);
    for e in load().transverse {
        let ctx = EmbeddingContext::new(e.n, e.i, e.u).unwrap();
        let phi = &wedge_family(e.n - 2, e.i, 1, 1, 17).unwrap()[0];
        let ratio = isometry_check(phi, &ctx, &quad).unwrap().ratio;
        assert!(close(ratio, e.isometry_ratio, 1e-6), "n={} i={}: {ratio}", e.n, e.i);
    }
}
