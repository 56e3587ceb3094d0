use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use weylscope_core::catalog::*;
use weylscope_core::curvature::*;
use weylscope_core::four_dim::spectrum;
use weylscope_core::metric::{ChartMetric, DerivativeStrategy, Formula, ScalarField};
use weylscope_core::random::{random_rotation, seeded};
use weylscope_core::tensor::{Tensor3, Tensor4};
use weylscope_core::GeometryError;

const X: [f64; 4] = [0.1, -0.2, 0.3, 0.15];

fn catalog(key: &str) -> ChartMetric {
    catalog_metric(key, &CatalogParams::default()).unwrap()
}

fn both(key: &str) -> [ChartMetric; 2] {
    let m = catalog(key);
    [m.clone(), m.with_strategy(DerivativeStrategy::fd_default())]
}

/// Coordinate Riemann `R_{abcd}` from nested central differences of the metric
/// values alone, written independently of the jet machinery.
fn riemann_oracle(m: &ChartMetric, x: &[f64]) -> Tensor4 {
    let n = m.dim();
    let gamma = |p: &[f64]| -> Tensor3 {
        let h = 1e-4;
        let g = m.metric_at(p).unwrap();
        let ginv = g.clone().try_inverse().unwrap();
        let dg: Vec<DMatrix<f64>> = (0..n)
            .map(|k| {
                let mut a = p.to_vec();
                let mut b = p.to_vec();
                a[k] += h;
                b[k] -= h;
                (m.metric_at(&a).unwrap() - m.metric_at(&b).unwrap()) / (2.0 * h)
            })
            .collect();
        Tensor3::from_fn(n, |a, b, c| {
            (0..n)
                .map(|d| 0.5 * ginv[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]))
                .sum()
        })
    };
    let h = 1e-3;
    let g0 = gamma(x);
    let dgamma: Vec<Tensor3> = (0..n)
        .map(|k| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[k] += h;
            b[k] -= h;
            (&gamma(&a) - &gamma(&b)).scale(1.0 / (2.0 * h))
        })
        .collect();
    let g = m.metric_at(x).unwrap();
    let up = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        let mut r = dgamma[c].get(a, b, d) - dgamma[d].get(a, b, c);
        for e in 0..n {
            r += g0.get(a, c, e) * g0.get(e, b, d) - g0.get(a, d, e) * g0.get(e, b, c);
        }
        r
    };
    Tensor4::from_fn(n, |a, b, c, d| (0..n).map(|e| g[(a, e)] * up(e, b, c, d)).sum())
}

#[test]
fn riemann_matches_nested_difference_oracle() {
    for key in ["poly-warped", "random-poly", "conformal-s2xs2"] {
        let m = catalog(key);
        let x = [0.05, -0.1, 0.2, 0.1];
        let b = curvature_bundle(&m, &x).unwrap();
        let oracle = riemann_oracle(&m, &x).change_frame(&b.frame);
        let err = (&oracle - &b.riemann).max_abs();
        assert!(err < 1e-5 * (1.0 + b.riemann.max_abs()), "{key}: {err:e}");
    }
}

#[test]
fn christoffel_of_diagonal_metric() {
    // g = diag(1 + x1^2, 1 + x2^2, 1, 1): G^0_00 = x1 / (1 + x1^2), others zero except G^1_11.
    let m = catalog("poly-diag");
    let g = christoffel(&m, &X).unwrap();
    assert!((g.get(0, 0, 0) - X[0] / (1.0 + X[0] * X[0])).abs() < 1e-14);
    assert!((g.get(1, 1, 1) - X[1] / (1.0 + X[1] * X[1])).abs() < 1e-14);
    assert!(g.get(0, 1, 1).abs() < 1e-14 && g.get(2, 0, 0).abs() < 1e-14);
}

#[test]
fn flat_metrics_have_no_curvature() {
    let cases = [
        (catalog("flat"), 1e-10, 1e-10),
        (catalog("flat").with_strategy(DerivativeStrategy::fd_default()), 1e-10, 1e-10),
        (catalog("poly-diag"), 1e-10, 1e-10),
        // second derivatives then Cotton/Bach-level quantities through stencils
        (catalog("poly-diag").with_strategy(DerivativeStrategy::fd_default()), 1e-6, 1e-4),
    ];
    for (m, tol2, tol4) in cases {
        let b = curvature_bundle(&m, &X).unwrap();
        assert!(b.riemann.max_abs() < tol2, "{}", m.name());
        assert!(b.cotton().unwrap().max_abs() < tol4);
        assert!(b.bach().unwrap().matrix().amax() < tol4);
    }
}

#[test]
fn round_spheres_have_constant_curvature() {
    for (dim, radius) in [(3, 1.0), (4, 1.0), (4, 2.0), (5, 0.5)] {
        let m = catalog_metric(
            "round-sphere",
            &CatalogParams {
                dim: Some(dim),
                radius: Some(radius),
                ..Default::default()
            },
        )
        .unwrap();
        let x = &X[..dim.min(4)];
        let x: Vec<f64> = x.iter().copied().chain(std::iter::repeat(0.05)).take(dim).collect();
        let b = curvature_bundle(&m, &x).unwrap();
        let k = 1.0 / (radius * radius);
        let expect = Tensor4::from_fn(dim, |a, bb, c, d| {
            k * (f64::from(u8::from(a == c && bb == d)) - f64::from(u8::from(a == d && bb == c)))
        });
        assert!((&expect - &b.riemann).max_abs() < 1e-10 * (1.0 + k), "{dim} {radius}");
        assert!((b.scalar - (dim * (dim - 1)) as f64 * k).abs() < 1e-10 * (1.0 + k));
        assert!(b.weyl.norm() < 1e-9 * (1.0 + k));
    }
}

#[test]
fn product_of_spheres_is_einstein_with_nonzero_weyl() {
    for m in both("s2xs2") {
        let b = curvature_bundle(&m, &X).unwrap();
        let ric = b.ricci.matrix();
        let tf = ric - DMatrix::identity(4, 4) * (ric.trace() / 4.0);
        assert!(tf.norm() < 1e-6);
        assert!((b.scalar - 4.0).abs() < 1e-6);
        assert!(b.weyl.norm() > 0.1);
        assert!(b.cotton().unwrap().norm() < 1e-5);
        assert!(b.bach().unwrap().matrix().norm() < 1e-4);
        // W+ and W- have spectra (2, -1, -1)/3 up to sign conventions
        let s = spectrum(&b.weyl).unwrap();
        assert!((s.lambda_plus[0].abs() - 2.0 / 3.0).abs() < 1e-6);
        assert!(b.warnings.is_empty());
    }
}

#[test]
fn identities_hold_on_the_whole_catalog() {
    for key in CATALOG_KEYS {
        for m in both(key) {
            let b = curvature_bundle(&m, &X).unwrap();
            let c = &b.checks;
            assert!(c.decomposition < 1e-10, "{key}");
            assert!(c.projection_agreement < 1e-10, "{key}");
            assert!(c.delta_w_identity.unwrap() < 1e-5, "{key} {:?}", m.strategy());
            assert!(c.second_bianchi.unwrap() < 1e-5, "{key}");
            assert!(c.cotton_antisymmetry.unwrap() < 1e-12, "{key}");
            assert!(c.bach_trace.unwrap() < 1e-6, "{key}");
        }
    }
}

#[test]
fn divergence_identity_in_three_and_five_dimensions() {
    for dim in [3, 5] {
        let m = catalog_metric(
            "random-poly",
            &CatalogParams {
                dim: Some(dim),
                seed: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        let x = vec![0.1; dim];
        let b = curvature_bundle(&m, &x).unwrap();
        assert!(b.checks.delta_w_identity.unwrap() < 1e-9, "{dim}");
        if dim == 3 {
            assert!(b.weyl.norm() < 1e-10);
            assert!(b.cotton().unwrap().norm() > 1e-3);
        }
    }
}

#[test]
fn fd_agrees_with_exact_jets() {
    let [exact, fd] = both("random-poly");
    let x = [0.1, -0.05, 0.2, 0.0];
    let a = curvature_bundle(&exact, &x).unwrap();
    let b = curvature_bundle(&fd, &x).unwrap();
    assert!((a.weyl.tensor() - b.weyl.tensor()).max_abs() < 1e-6);
    assert!((a.cotton().unwrap() - b.cotton().unwrap()).max_abs() < 1e-5);
    assert!((a.bach().unwrap().matrix() - b.bach().unwrap().matrix()).amax() < 1e-3);
    assert!(a.fd_error == 0.0 && b.fd_error > 0.0);
}

#[test]
fn conformal_weights_in_frame_components() {
    let base = catalog("poly-warped");
    let f: Arc<dyn ScalarField> = Arc::new(Formula(default_conformal_factor()));
    let resc = base.conformal_rescale(f.clone());
    for m in [resc.clone(), resc.with_strategy(DerivativeStrategy::fd_default())] {
        let b0 = curvature_bundle(&base, &X).unwrap();
        let b1 = curvature_bundle(&m, &X).unwrap();
        let fx = f.eval(&X);
        let w_diff = (b1.weyl.tensor() - &b0.weyl.tensor().scale((-2.0 * fx).exp())).max_abs();
        assert!(w_diff < 1e-5);
        let bach_diff = (b1.bach().unwrap().matrix() - b0.bach().unwrap().matrix() * (-4.0 * fx).exp()).amax();
        assert!(bach_diff < 1e-4, "{bach_diff:e}");
    }
}

#[test]
fn outside_the_box_is_an_error() {
    let m = catalog("s2xs2");
    assert!(matches!(
        curvature_bundle(&m, &[2.0, 0.0, 0.0, 0.0]),
        Err(GeometryError::OutsideBox { .. })
    ));
}

#[test]
fn bundles_are_reentrant_across_threads() {
    let m = catalog("conformal-s2xs2");
    let points: Vec<[f64; 4]> = (0..6).map(|k| [0.05 * k as f64, -0.1, 0.2, 0.02 * k as f64]).collect();
    let serial: Vec<f64> = points.iter().map(|p| curvature_bundle(&m, p).unwrap().bach().unwrap().matrix().norm()).collect();
    let parallel: Vec<f64> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .iter()
            .map(|p| {
                let m = &m;
                s.spawn(move || curvature_bundle(m, p).unwrap().bach().unwrap().matrix().norm())
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(serial, parallel);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn frame_rotation_leaves_invariants(seed in any::<u64>()) {
        let m = catalog("random-poly");
        let x = [0.1, 0.2, -0.1, 0.05];
        let rot = random_rotation(4, &mut seeded(seed));
        let a = curvature_bundle(&m, &x).unwrap();
        let b = curvature_bundle_with(&m, &x, &BundleOptions { level: BundleLevel::Full, rotation: Some(rot.clone()) }).unwrap();
        prop_assert!((a.weyl.norm() - b.weyl.norm()).abs() < 1e-9);
        prop_assert!((a.cotton().unwrap().norm() - b.cotton().unwrap().norm()).abs() < 1e-9);
        prop_assert!((a.bach().unwrap().matrix().norm() - b.bach().unwrap().matrix().norm()).abs() < 1e-9);
        let (sa, sb) = (spectrum(&a.weyl).unwrap(), spectrum(&b.weyl).unwrap());
        for k in 0..3 {
            prop_assert!((sa.lambda_plus[k] - sb.lambda_plus[k]).abs() < 1e-9);
            prop_assert!((sa.lambda_minus[k] - sb.lambda_minus[k]).abs() < 1e-9);
        }
        prop_assert!((&a.riemann.change_frame(&rot) - &b.riemann).max_abs() < 1e-10);
    }
}
