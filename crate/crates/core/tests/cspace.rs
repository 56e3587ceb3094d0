use std::sync::Arc;

use proptest::prelude::*;
use weylscope_core::catalog::*;
use weylscope_core::cspace::*;
use weylscope_core::curvature::curvature_bundle;
use weylscope_core::metric::{ChartMetric, DerivativeStrategy, Formula, ScalarField};
use weylscope_core::random::{random_weyl, seeded};

const X: [f64; 4] = [0.1, -0.2, 0.3, 0.15];

fn catalog(key: &str) -> ChartMetric {
    catalog_metric(key, &CatalogParams::default()).unwrap()
}

fn default_factor() -> Arc<dyn ScalarField> {
    Arc::new(Formula(default_conformal_factor()))
}

fn minus_df() -> ZetaField {
    ZetaField::Gradient {
        potential: default_factor(),
        scale: -1.0,
    }
}

struct Swirl;

impl OneFormField for Swirl {
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        vec![x[1], -x[0], 0.3 * x[2] * x[3], 0.2]
    }
}

#[test]
fn rescaled_product_is_a_closed_c_space() {
    let tol = AnalysisTolerances::default();
    let m = catalog("conformal-s2xs2");
    for m in [m.clone(), m.with_strategy(DerivativeStrategy::fd_default())] {
        let d = classify_point(&m, &X, &tol).unwrap();
        assert_eq!(d.classification, PointClass::ConformalCSpace);
        assert!(d.cspace_residual <= 1e-5);
        assert!(d.dzeta_norm.unwrap() <= 1e-3);
        assert!(!d.anomaly);
        assert!(d.detectors_agree);
        assert!(d.weyl_norm > 0.1);
        assert!(d.einstein_weyl.as_ref().unwrap().residual_sym < 1e-5);
    }
}

#[test]
fn zeta_is_minus_the_gradient_of_the_factor() {
    let tol = AnalysisTolerances::default();
    let m = catalog("conformal-s2xs2");
    let solved = zeta_coordinates(&ZetaField::Solved, &m, &X, &tol).unwrap();
    let expect = zeta_coordinates(&minus_df(), &m, &X, &tol).unwrap();
    for (a, b) in solved.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn differential_checks_on_the_rescaled_product() {
    let tol = AnalysisTolerances::default();
    let m = catalog("conformal-s2xs2");
    for m in [m.clone(), m.with_strategy(DerivativeStrategy::fd_default())] {
        for field in [ZetaField::Solved, minus_df()] {
            assert!(check_gnl(&m, &field, &X, &tol).unwrap() < 1e-4, "{field:?}");
            let div = divc_identity_check(&m, &field, &X, &tol).unwrap();
            assert!(div.residual < 1e-3, "{div:?}");
            assert!(div.skew_norm < 1e-3);
            assert!(div.divergence_norm > 1e-2);
            let bach = bach_consequence_check(&m, &field, &X, &tol).unwrap();
            assert!(bach.bach_norm < 1e-3 && bach.extension_norm < 1e-3 && bach.deg1_residual < 1e-3);
            assert!(!bach.conformally_flat);
        }
    }
}

#[test]
fn divergence_identity_sign_convention() {
    let tol = AnalysisTolerances::default();
    let div = divc_identity_check(&catalog("conformal-s2xs2"), &minus_df(), &X, &tol).unwrap();
    assert!(div.residual < 1e-12);
    assert!(div.residual_flipped_convention > 1e-2);
}

#[test]
fn wrong_sign_zeta_fails_the_checks() {
    let tol = AnalysisTolerances::default();
    let m = catalog("conformal-s2xs2");
    let plus = ZetaField::Gradient {
        potential: default_factor(),
        scale: 1.0,
    };
    assert!(check_gnl(&m, &plus, &X, &tol).unwrap() > 1e-2);
    assert!(matches!(
        divc_identity_check(&m, &plus, &X, &tol),
        Err(weylscope_core::GeometryError::Precondition(_))
    ));
}

#[test]
fn cotton_and_einstein_examples() {
    let tol = AnalysisTolerances::default();
    let d = classify_point(&catalog("s2xs2"), &X, &tol).unwrap();
    assert_eq!(d.classification, PointClass::CottonSpace);
    assert!(d.dzeta_norm.unwrap() < 1e-6 && !d.anomaly);
    let ew = einstein_weyl_residual(&catalog("s2xs2"), &ZetaField::Zero, &X, &tol).unwrap();
    assert!(ew.residual_sym < 1e-10);
    let b = curvature_bundle(&catalog("s2xs2"), &X).unwrap();
    assert!((ew.best_f - b.h.trace() / 4.0).abs() < 1e-12);
    assert!(check_gnl(&catalog("s2xs2"), &ZetaField::Zero, &X, &tol).unwrap() < 1e-10);
    let ew_round = einstein_weyl_residual(&catalog("round-sphere"), &ZetaField::Zero, &X, &tol).unwrap();
    assert!(ew_round.residual_sym < 1e-10);
}

#[test]
fn conformally_flat_examples() {
    let tol = AnalysisTolerances::default();
    for key in ["flat", "round-sphere", "conformal-round-sphere", "conformal-flat"] {
        let d = classify_point(&catalog(key), &X, &tol).unwrap();
        assert_eq!(d.classification, PointClass::ConformallyFlat, "{key}");
        assert_eq!(d.status, CSpaceStatus::WeylZeroCottonZero);
    }
    let bach = bach_consequence_check(&catalog("conformal-round-sphere"), &ZetaField::Solved, &X, &tol).unwrap();
    assert!(bach.conformally_flat);
    assert!(bach.bach_norm < 1e-10);
}

#[test]
fn negative_controls() {
    let tol = AnalysisTolerances::default();
    let generic = catalog("random-poly");
    let x = [0.1, -0.1, 0.2, 0.05];
    let swirl = ZetaField::OneForm(Arc::new(Swirl));
    assert!(check_gnl(&generic, &swirl, &x, &tol).unwrap() > 1e-2);
    let ew = einstein_weyl_residual(&catalog("poly-warped"), &ZetaField::Zero, &X, &tol).unwrap();
    assert!(ew.residual_sym > 1e-2);
    let bach = bach_consequence_check(&generic, &ZetaField::Zero, &x, &tol).unwrap();
    assert!(bach.bach_norm > 1e-2);
    let d = classify_point(&generic, &x, &tol).unwrap();
    assert_eq!(d.classification, PointClass::NotCSpace);
    assert!(d.obstruction_norm.unwrap() > 1e-3);
    assert!(d.detectors_agree);
    assert!(matches!(
        divc_identity_check(&generic, &ZetaField::Solved, &x, &tol),
        Err(weylscope_core::GeometryError::Precondition(_))
    ));
}

#[test]
fn non_closed_one_form_has_nonzero_exterior_derivative() {
    let tol = AnalysisTolerances::default();
    let m = catalog("flat");
    let b = curvature_bundle(&m, &X).unwrap();
    let zj = zeta_jet(&ZetaField::OneForm(Arc::new(Swirl)), &m, &b, &tol).unwrap();
    // d(x2 dx1 - x1 dx2) has components -2 and 2 in the (0,1) block
    assert!((zj.d_zeta[(0, 1)].abs() - 2.0).abs() < 1e-8);
    assert!((zj.d_zeta[(0, 1)] + zj.d_zeta[(1, 0)]).abs() < 1e-12);
}

#[test]
fn small_weyl_is_flagged_as_ill_conditioned() {
    let w = random_weyl(4, &mut seeded(6)).scale(1e-7);
    let v = [0.3, -0.2, 0.1, 0.4];
    let c = weyl_contract(&w, &v).scale(-1.0);
    let sol = solve_zeta(&w, &c).unwrap();
    assert!(sol.ill_conditioned);
    assert_eq!(sol.status, CSpaceStatus::Solved);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn c_space_property_is_conformally_invariant(seed in any::<u64>()) {
        let tol = AnalysisTolerances::default();
        let f: Arc<dyn ScalarField> = Arc::new(Formula(random_conformal_factor(4, seed)));
        let x = [0.05, 0.1, -0.15, 0.2];
        for key in ["s2xs2", "conformal-s2xs2", "random-poly", "poly-warped"] {
            let base = catalog(key);
            let resc = base.conformal_rescale(f.clone());
            let d0 = classify_point(&base, &x, &tol).unwrap();
            let d1 = classify_point(&resc, &x, &tol).unwrap();
            let solved = |s: CSpaceStatus| s == CSpaceStatus::Solved;
            prop_assert_eq!(solved(d0.status), solved(d1.status), "{}", key);
            if solved(d0.status) {
                // coordinate components: zeta picks up -df
                let z0 = zeta_coordinates(&ZetaField::Solved, &base, &x, &tol).unwrap();
                let z1 = zeta_coordinates(&ZetaField::Solved, &resc, &x, &tol).unwrap();
                let df = zeta_coordinates(&ZetaField::Gradient { potential: f.clone(), scale: 1.0 }, &base, &x, &tol).unwrap();
                for k in 0..4 {
                    prop_assert!((z1[k] - (z0[k] - df[k])).abs() < 1e-9);
                }
            }
        }
    }
}
