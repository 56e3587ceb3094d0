//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::Command;
use std::time::Instant;

use serde_json::Value;
use weylscope::points::{resolve_points, PointsArg};
use weylscope::report::without_timing;
use weylscope::suites::{cspace_algebra_suites, lattice_suite, lemma_suites, structure_suites, SuiteResult, SuiteTolerances};
use weylscope_core::catalog::{catalog_metric, CatalogParams, CATALOG_KEYS};
use weylscope_core::cspace::{
    bach_consequence_check, check_gnl, classify_point, divc_identity_check, AnalysisTolerances, PointClass, ZetaField,
};
use weylscope_core::curvature::curvature_bundle;
use weylscope_core::four_dim::{random_spectral_weyl, SpectrumPattern};
use weylscope_core::metric::{ChartMetric, DerivativeStrategy};
use weylscope_core::random::seeded;
use weylscope_core::weyl::{solve_space, SpaceTag};

const SEED: u64 = 42;

struct Outcome {
    passed: bool,
    detail: String,
}

fn suites_outcome(suites: &[SuiteResult]) -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for s in suites.iter().filter(|s| !s.informational) {
        passed &= s.passed;
        parts.push(format!("{}={:.1e}/{:.0e}", s.name, s.max_residual, s.tolerance));
    }
    Outcome {
        passed,
        detail: parts.join(" "),
    }
}

fn catalog(key: &str) -> ChartMetric {
    catalog_metric(key, &CatalogParams::default()).unwrap()
}

fn crit1() -> Outcome {
    let start = Instant::now();
    let suites = lemma_suites(SEED, 500, 4, &SuiteTolerances::default());
    let secs = start.elapsed().as_secs_f64();
    let mut out = suites_outcome(&suites);
    out.passed &= secs <= 60.0;
    out.detail = format!("{} runtime={secs:.1}s/60s", out.detail);
    out
}

fn crit2() -> Outcome {
    suites_outcome(&[lattice_suite(SEED, 100, 4, &SuiteTolerances::default())])
}

fn crit3() -> Outcome {
    let mut out = suites_outcome(&structure_suites(SEED, 500, &SuiteTolerances::default()));
    // the constructed single-zero-pair spectra give a four-dimensional E_W
    let mut rng = seeded(SEED);
    let dims: Vec<usize> = (0..20)
        .map(|_| solve_space(&random_spectral_weyl(SpectrumPattern::OneZeroPair, &mut rng).0, SpaceTag::EW).dimension())
        .collect();
    let four = dims.iter().all(|d| *d == 4);
    out.passed &= four;
    out.detail = format!("{} one_zero_pair_dim_e_w_is_4={four}", out.detail);
    out
}

fn crit4() -> Outcome {
    suites_outcome(&cspace_algebra_suites(SEED, 200, &SuiteTolerances::default()))
}

fn crit5() -> Outcome {
    let start = Instant::now();
    let x = [0.1, -0.2, 0.3, 0.15];
    let mut passed = true;
    let mut parts = Vec::new();
    let mut note = |name: &str, v: f64, ok: bool| {
        passed &= ok;
        parts.push(format!("{name}={v:.1e}"));
    };

    let b = curvature_bundle(&catalog("flat"), &x).unwrap();
    let flat = [
        b.riemann.max_abs(),
        b.weyl.tensor().max_abs(),
        b.ricci.matrix().amax(),
        b.cotton().unwrap().max_abs(),
        b.bach().unwrap().matrix().amax(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    note("flat_all", flat, flat <= 1e-10);

    let w_s4 = curvature_bundle(&catalog("round-sphere"), &x).unwrap().weyl.norm();
    note("s4_weyl", w_s4, w_s4 <= 1e-6);

    let b = curvature_bundle(&catalog("s2xs2"), &x).unwrap();
    let n = b.dim() as f64;
    // orthonormal frame: |Ric - s g / n|^2 = |Ric|^2 - s^2 / n
    let tf = (b.ricci.matrix().norm_squared() - b.scalar * b.scalar / n).max(0.0).sqrt();
    note("s2xs2_tracefree_ric", tf, tf <= 1e-6);
    let c = b.cotton().unwrap().norm();
    note("s2xs2_cotton", c, c <= 1e-5);
    let w = b.weyl.norm();
    note("s2xs2_weyl", w, w > 0.1);
    let bach = b.bach().unwrap().matrix().norm();
    note("s2xs2_bach", bach, bach <= 1e-4);

    let (mut dw, mut bianchi) = (0.0f64, 0.0f64);
    for key in CATALOG_KEYS {
        let m = catalog(key);
        let p: Vec<f64> = m.center().iter().zip(&x).map(|(c, d)| c + 0.5 * d).collect();
        let b = curvature_bundle(&m, &p).unwrap();
        dw = dw.max(b.checks.delta_w_identity.unwrap());
        bianchi = bianchi.max(b.checks.second_bianchi.unwrap());
    }
    note("delta_w_identity", dw, dw <= 1e-5);
    note("second_bianchi", bianchi, bianchi <= 1e-5);

    let secs = start.elapsed().as_secs_f64();
    note("runtime_s", secs, secs <= 30.0);
    Outcome {
        passed,
        detail: parts.join(" "),
    }
}

fn crit6() -> Outcome {
    let tol = AnalysisTolerances::default();
    let base = catalog("conformal-s2xs2");
    let points = resolve_points(&PointsArg::Grid(5), None, &base, SEED).unwrap();
    let mut passed = true;
    let (mut res, mut dz, mut gnl, mut div, mut flipped, mut bach, mut ext) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, f64::MAX, 0.0f64, 0.0f64);
    for m in [base.clone(), base.with_strategy(DerivativeStrategy::fd_default())] {
        for x in &points {
            let d = classify_point(&m, x, &tol).unwrap();
            passed &= d.classification == PointClass::ConformalCSpace && !d.anomaly;
            res = res.max(d.cspace_residual);
            dz = dz.max(d.dzeta_norm.unwrap_or(f64::INFINITY));
            gnl = gnl.max(check_gnl(&m, &ZetaField::Solved, x, &tol).unwrap());
            let r = divc_identity_check(&m, &ZetaField::Solved, x, &tol).unwrap();
            div = div.max(r.residual);
            flipped = flipped.min(r.residual_flipped_convention);
            let b = bach_consequence_check(&m, &ZetaField::Solved, x, &tol).unwrap();
            bach = bach.max(b.bach_norm);
            ext = ext.max(b.extension_norm);
        }
    }
    passed &= res <= 1e-5 && dz <= 1e-3 && gnl <= 1e-4 && div <= 1e-3 && bach <= 1e-3 && ext <= 1e-3;
    Outcome {
        passed,
        detail: format!(
            "class=conformal_c_space residual={res:.1e} dzeta={dz:.1e} gnl={gnl:.1e} divc={div:.1e} \
             (opposite-sign form min {flipped:.1e}) bach={bach:.1e} W(h_zeta)={ext:.1e}"
        ),
    }
}

fn run_cli(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_weylscope"))
        .args(args)
        .env_remove("WEYLSCOPE_SEED")
        .output()
        .unwrap();
    serde_json::from_slice(&out.stdout).unwrap()
}

fn crit7() -> Outcome {
    let mut same = true;
    for args in [
        &["verify-algebra", "--seed", "7", "--count", "30"][..],
        &["analyze", "--spec", "random-poly", "--points", "random:4", "--seed", "7"][..],
    ] {
        let a = serde_json::to_string(&without_timing(run_cli(args))).unwrap();
        let b = serde_json::to_string(&without_timing(run_cli(args))).unwrap();
        same &= a == b;
    }

    let tol = AnalysisTolerances::default();
    let (mut total, mut obstructed) = (0usize, 0usize);
    for seed in 0..20u64 {
        let params = CatalogParams {
            seed: Some(seed),
            ..CatalogParams::default()
        };
        let m = catalog_metric("random-poly", &params).unwrap();
        for x in resolve_points(&PointsArg::Random(10), None, &m, seed).unwrap() {
            let d = classify_point(&m, &x, &tol).unwrap();
            total += 1;
            if d.obstruction_norm.is_some_and(|o| o > 1e-3) {
                obstructed += 1;
            }
        }
    }
    let frac = obstructed as f64 / total as f64;
    Outcome {
        passed: same && frac >= 0.9,
        detail: format!("reports_identical={same} obstructed={obstructed}/{total} ({:.0}% >= 90%)", 100.0 * frac),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("algebraic lemma suite", crit1),
        ("equivalence lattice", crit2),
        ("four-dimensional structure", crit3),
        ("slot identity and zeta recovery", crit4),
        ("curvature pipeline", crit5),
        ("c-space end to end", crit6),
        ("determinism and negative controls", crit7),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {} {name}: {} {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
