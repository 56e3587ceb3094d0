use proptest::prelude::*;
use weylscope_core::four_dim::*;
use weylscope_core::random::{random_rotation, random_weyl, seeded};
use weylscope_core::tensor::{Endo, Inner, TwoForm};
use weylscope_core::weyl::{extend, residual_deg1, solve_space, SpaceTag};

fn sorted_desc(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

#[test]
fn one_zero_pair_admits_sigma_11() {
    let mut rng = seeded(8);
    let (w, s, sigma) = random_spectral_weyl(SpectrumPattern::OneZeroPair, &mut rng);
    // the zero eigenvalues sit in the first slot of each side
    assert!(s.lambda_plus[0].abs() < 1e-12 && s.lambda_minus[0].abs() < 1e-12);
    let h = &sigma.sigma[0][0];
    assert!(residual_deg1(&w, h).norm() < 1e-10);
    assert!(extend(&w, h).norm() < 1e-10);
    let report = symker_report(&w, h, 1e-8).unwrap();
    assert!(report.passed, "{report:?}");
    assert_eq!(admissible_trace_free(&w).len(), 1);
}

#[test]
fn generic_spectra_force_trace_free_kernel_to_vanish() {
    let mut rng = seeded(9);
    for _ in 0..10 {
        let (w, _, _) = random_spectral_weyl(SpectrumPattern::Generic, &mut rng);
        assert!(admissible_trace_free(&w).is_empty());
    }
}

#[test]
fn supersymmetry_fails_outside_four_dimensions() {
    let r = supersym_search(5, 10, 3);
    assert_eq!(r.dim, 5);
    assert!(r.failures > 0);
    let r4 = supersym_search(4, 10, 3);
    assert_eq!(r4.failures, 0);
}

#[test]
fn wrong_dimension_is_rejected() {
    let w = random_weyl(5, &mut seeded(1));
    assert!(spectrum(&w).is_err());
    assert!(split_weyl(&w).is_err());
    assert!(ew_split_4d(&w).is_err());
}

#[test]
fn hodge_star_is_an_isometry_of_forms() {
    for f in TwoForm::standard_basis(4) {
        let s = hodge_star(&f).unwrap();
        assert!((s.norm() - f.norm()).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectra_round_trip(seed in any::<u64>(), pattern_ix in 0usize..7) {
        let mut rng = seeded(seed);
        let pattern = SpectrumPattern::ALL[pattern_ix];
        let (lp, lm) = random_spectra(pattern, &mut rng);
        let rot = random_rotation(4, &mut rng);
        let (w, _, _) = build_weyl_from_spectra(lp, lm, &FrameChoice::Rotation(rot)).unwrap();
        let s = spectrum(&w).unwrap();
        let (ep, em) = (sorted_desc(lp), sorted_desc(lm));
        for k in 0..3 {
            prop_assert!((s.lambda_plus[k] - ep[k]).abs() < 1e-10);
            prop_assert!((s.lambda_minus[k] - em[k]).abs() < 1e-10);
        }
        prop_assert!(s.defects(&w) < 1e-9);
    }

    #[test]
    fn eigsym_and_split(seed in any::<u64>(), pattern_ix in 0usize..7) {
        let mut rng = seeded(seed);
        let (w, s, sigma) = random_spectral_weyl(SpectrumPattern::ALL[pattern_ix], &mut rng);
        prop_assert!(check_eigsym(&w, &s, &sigma) < 1e-9);
        prop_assert!(sigma.defects() < 1e-9);
        let split = ew_split_4d(&w).unwrap();
        let direct = solve_space(&w, SpaceTag::EW).dimension();
        prop_assert_eq!(split.dimension(), direct);
        prop_assert!(split.distance_to_solved(&w) < 1e-8);
    }

    #[test]
    fn self_dual_parts_are_eigenvectors_of_star(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let m = weylscope_core::random::random_matrix(4, &mut rng);
        let f = TwoForm::from_matrix(&m);
        let p = self_dual_part(&f).unwrap();
        let q = anti_self_dual_part(&f).unwrap();
        prop_assert!((hodge_star(&p).unwrap().sub(&p)).norm() < 1e-14);
        prop_assert!((hodge_star(&q).unwrap().add(&q)).norm() < 1e-14);
        prop_assert!(p.inner(&q).abs() < 1e-14);
    }

    #[test]
    fn split_recombines_and_is_orthogonal(seed in any::<u64>()) {
        let w = random_weyl(4, &mut seeded(seed));
        let (p, m) = split_weyl(&w).unwrap();
        prop_assert!((&(p.tensor() + m.tensor()) - w.tensor()).max_abs() < 1e-13);
        prop_assert!(p.tensor().inner(m.tensor()).abs() < 1e-12);
    }

    #[test]
    fn supersym_grid(seed in any::<u64>()) {
        let w = random_weyl(4, &mut seeded(seed));
        let (anti, comm) = supersym_grid_residual(&w);
        prop_assert!(anti < 1e-10 && comm < 1e-10);
    }

    #[test]
    fn four_id_constant_is_universal(seed in any::<u64>()) {
        let w = random_weyl(4, &mut seeded(seed));
        prop_assert!(check_4id(&w).unwrap() < 1e-10);
        for r in four_id_ratios(&w) {
            prop_assert!((r - FOUR_ID_CONSTANT).abs() < 1e-12);
        }
        let sv = slot_map_singular_values(&w);
        let expect = FOUR_ID_CONSTANT.sqrt() * w.norm();
        prop_assert!(sv.iter().all(|s| (s - expect).abs() < 1e-10));
    }

    #[test]
    fn sigma_basis_passes_shift(seed in any::<u64>()) {
        let (_, s, sigma) = random_spectral_weyl(SpectrumPattern::Generic, &mut seeded(seed));
        for (_, _, h) in sigma.iter() {
            prop_assert!(h.trace().abs() < 1e-12);
            prop_assert!(check_shift(h, &s).unwrap() < 1e-12);
        }
        prop_assert!(check_shift(&Endo::identity(4), &s).unwrap() > 0.5);
    }
}
