//! Property tests for the structural invariants across modules.

use cs_embed::embedding::{equivariance_defect, m_operator_kernel, EmbeddingContext, Generator, TransverseRule};
use cs_embed::exterior::m_i;
use cs_embed::group::{bruhat_decompose, iwasawa_decompose, make_u, make_w};
use cs_embed::intertwine::{form_wu, CSParams};
use cs_embed::params::descend_u;
use cs_embed::quadrature::QuadratureSpec;
use cs_embed::report::CheckReport;
use cs_embed::schwartz::family::{atom_family, wedge_family};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn point(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    dims.prop_flat_map(|d| prop::collection::vec(-3.0f64..3.0, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bruhat_factors_rebuild_the_product(x in point(1..=5)) {
        prop_assume!(norm(&x) > 1e-3);
        let n = x.len() + 1;
        let w = make_w(n);
        let target = w.mul(&make_u(&x)).mul(&w);
        let f = bruhat_decompose(&x).unwrap();
        prop_assert!(f.reconstruct().distance(&target) < 1e-10);
        prop_assert!((f.a - norm(&x).powi(2) / 2.0).abs() < 1e-14 * f.a.max(1.0));
    }

    #[test]
    fn iwasawa_k_lies_in_k(x in point(1..=5)) {
        let n = x.len() + 1;
        let f = iwasawa_decompose(&x);
        prop_assert!(f.reconstruct().distance(&make_u(&x).mul(&make_w(n))) < 1e-10);
        prop_assert!(f.k.is_in_k());
        prop_assert!(f.a >= 1.0);
    }

    #[test]
    fn m_i_is_an_orthogonal_involution(x in point(2..=5), i in 0usize..=5) {
        prop_assume!(norm(&x) > 1e-3 && i <= x.len());
        let m = m_i(&x, i).unwrap();
        prop_assert!(m.orthogonality_deviation() < 1e-12);
        let k = m.basis.len();
        let sq = &m.entries * &m.entries - DMatrix::identity(k, k);
        prop_assert!(sq.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn descent_lowers_u_and_keeps_lambda(m in 4usize..30, t in 0.01f64..0.99) {
        let lo = 1.0 / (m as f64 - 1.0);
        let u = lo + t * (1.0 - lo);
        let v = descend_u(m, u);
        prop_assert!(v < u && v > 0.0);
        let lhs = (m as f64 - 1.0) * (1.0 - u);
        prop_assert!((lhs - (m as f64 - 2.0) * (1.0 - v)).abs() < 1e-14 * lhs.max(1.0));
    }

    #[test]
    fn report_pass_tracks_the_tolerance(a in -1e3f64..1e3, b in -1e3f64..1e3, tol in 1e-12f64..1.0) {
        let r = CheckReport::compare("p", Complex64::new(a, 0.5), Complex64::new(b, -0.25), tol, "x");
        prop_assert_eq!(r.pass, r.rel_err <= tol);
        let back: CheckReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fourier_transform_is_unitary(seed in any::<u64>()) {
        let fam = atom_family(3, 2, 2, seed);
        let (f, g) = (&fam[0], &fam[1]);
        let plain = f.inner(g).unwrap();
        let hat = f.fourier().inner(&g.fourier()).unwrap();
        prop_assert!((plain - hat).norm() < 1e-11 * (1.0 + plain.norm()));
        let twice = f.fourier().fourier();
        for x in [[0.3, -0.2, 0.5], [1.0, 0.0, -0.7]] {
            let neg = [-x[0], -x[1], -x[2]];
            prop_assert!((twice.eval(&x) - f.eval(&neg)).norm() < 1e-12);
        }
    }

    #[test]
    fn m_operator_is_homogeneous(x in point(1..=3), i in 0usize..=1, scale in 0.4f64..3.0, lambda in 0.3f64..3.0) {
        prop_assume!(norm(&x) > 0.05);
        let rule = TransverseRule::default();
        let m = m_operator_kernel(&x, i, lambda, &rule).unwrap();
        prop_assert!(m.max_rel_deviation() < 1e-8);
        let y: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let my = m_operator_kernel(&y, i, lambda, &rule).unwrap();
        let expect = &m.quadrature.entries * scale.powf(-lambda);
        let dev = (&my.quadrature.entries - &expect).abs().max();
        prop_assert!(dev < 1e-8 * expect.abs().max());
    }

    #[test]
    fn j_commutes_with_dilations(a in 0.3f64..3.0, seed in any::<u64>()) {
        let ctx = EmbeddingContext::new(4, 0, 0.7).unwrap();
        let phi = &wedge_family(2, 0, 1, 1, seed).unwrap()[0];
        let points: Vec<Vec<f64>> = (0..8).map(|k| vec![0.2 * k as f64 - 0.7, 0.5 - 0.1 * k as f64, 0.3 * k as f64]).collect();
        prop_assert!(equivariance_defect(&Generator::Dilation(a), phi, &ctx, &points).unwrap() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn form_is_hermitian(seed in any::<u64>()) {
        let p = CSParams::new(4, 1, 0.2);
        let fam = wedge_family(3, 1, 2, 1, seed).unwrap();
        let quad = QuadratureSpec::default().with_target(1e-9);
        let ab = form_wu(&fam[0], &fam[1], &p, &quad).unwrap().value;
        let ba = form_wu(&fam[1], &fam[0], &p, &quad).unwrap().value;
        prop_assert!((ab - ba.conj()).norm() < 1e-7 * ab.norm().max(1e-3));
        let aa = form_wu(&fam[0], &fam[0], &p, &quad).unwrap().value;
        prop_assert!(aa.re > 0.0 && aa.im.abs() < 1e-7 * aa.re);
    }
}
