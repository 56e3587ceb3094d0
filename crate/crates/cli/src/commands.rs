//! The analysis commands. Each returns a finalized [`Report`] without timing.

use rayon::prelude::*;
use serde_json::Value;
use weylscope_core::catalog::CATALOG_KEYS;
use weylscope_core::cspace::{classify_point, AnalysisTolerances};
use weylscope_core::curvature::{curvature_bundle_with, BundleLevel, BundleOptions};
use weylscope_core::four_dim::{check_eigsym, ew_split_4d, sigma_basis, spectrum};
use weylscope_core::metric::ChartMetric;
use weylscope_core::weyl::{solve_space, SpaceTag};

use crate::error::CliError;
use crate::points::{resolve_points, PointsArg};
use crate::report::{Check, MetricSummary, Report, SpectrumRecord};
use crate::spec::{parse_metric_spec, MetricSpec};
use crate::suites::{run_all, SuiteTolerances};

/// Default bound on curvature identity residuals in `analyze`.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-5;
/// Default bound on `eigsym` and split residuals in `spectrum`, relative to `1 + |W|`.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-9;

/// A metric together with the spec it came from.
pub struct LoadedMetric {
    pub spec: MetricSpec,
    pub metric: ChartMetric,
}

/// Load `--spec`: a JSON file, or a catalog key when no such file exists.
pub fn load_metric(spec: &str) -> Result<LoadedMetric, CliError> {
    let path = std::path::Path::new(spec);
    let spec = if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: spec.to_string(),
            source,
        })?;
        parse_metric_spec(&text)?
    } else if CATALOG_KEYS.contains(&spec) {
        MetricSpec::from_catalog(spec)
    } else {
        return Err(CliError::Io {
            path: spec.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or catalog key"),
        });
    };
    let metric = spec.build()?;
    Ok(LoadedMetric { spec, metric })
}

fn summary(m: &ChartMetric) -> MetricSummary {
    MetricSummary {
        name: m.name().to_string(),
        dim: m.dim(),
        derivatives: m.strategy(),
        bounds: m.bounds().to_vec(),
    }
}

fn label(point: &[f64]) -> String {
    let coords: Vec<String> = point.iter().map(|v| format!("{v}")).collect();
    format!("({})", coords.join(","))
}

pub fn cmd_analyze(loaded: &LoadedMetric, points: &PointsArg, seed: u64, tol: Option<f64>) -> Result<Report, CliError> {
    let m = &loaded.metric;
    let pts = resolve_points(points, loaded.spec.sample_points.as_ref(), m, seed)?;
    let atol = AnalysisTolerances::default();
    let diags = pts
        .par_iter()
        .map(|x| classify_point(m, x, &atol))
        .collect::<Result<Vec<_>, _>>()?;
    let tol = tol.unwrap_or(DEFAULT_IDENTITY_TOL);
    let mut report = Report::new("analyze", Some(seed));
    report.metric = Some(summary(m));
    for d in &diags {
        let at = label(&d.point);
        if let Some(v) = d.checks.delta_w_identity {
            report.checks.push(Check::at_most(format!("delta_w_identity{at}"), v, tol));
        }
        if let Some(v) = d.checks.second_bianchi {
            report.checks.push(Check::at_most(format!("second_bianchi{at}"), v, tol));
        }
        report.checks.push(Check::holds(format!("detectors_agree{at}"), d.detectors_agree));
        report.checks.push(Check::holds(format!("no_anomaly{at}"), !d.anomaly));
    }
    report.points = diags;
    report.finalize();
    Ok(report)
}

fn spectrum_record(m: &ChartMetric, x: &[f64]) -> Result<SpectrumRecord, CliError> {
    let opts = BundleOptions {
        level: BundleLevel::Curvature,
        ..BundleOptions::default()
    };
    let b = curvature_bundle_with(m, x, &opts)?;
    let w = &b.weyl;
    let s = spectrum(w).map_err(weylscope_core::error::GeometryError::from)?;
    let sigma = sigma_basis(&s);
    let split = ew_split_4d(w).map_err(weylscope_core::error::GeometryError::from)?;
    Ok(SpectrumRecord {
        point: x.to_vec(),
        weyl_norm: w.norm(),
        lambda_plus: s.lambda_plus,
        lambda_minus: s.lambda_minus,
        dim_e_w: solve_space(w, SpaceTag::EW).dimension(),
        dim_s_w: split.s_w.len(),
        dim_a_w: split.a_w.len(),
        dim_g_w: solve_space(w, SpaceTag::GW).dimension(),
        admissible_trace_free: weylscope_core::four_dim::admissible_trace_free(w).len(),
        eigsym_residual: check_eigsym(w, &s, &sigma) / (1.0 + w.norm()),
    })
}

pub fn cmd_spectrum(loaded: &LoadedMetric, points: &PointsArg, seed: u64, tol: Option<f64>) -> Result<Report, CliError> {
    let m = &loaded.metric;
    if m.dim() != 4 {
        return Err(CliError::Spec(format!("spectrum needs a 4-dimensional metric, got dimension {}", m.dim())));
    }
    let pts = resolve_points(points, loaded.spec.sample_points.as_ref(), m, seed)?;
    let records = pts
        .par_iter()
        .map(|x| spectrum_record(m, x))
        .collect::<Result<Vec<_>, _>>()?;
    let tol = tol.unwrap_or(DEFAULT_SPECTRUM_TOL);
    let mut report = Report::new("spectrum", Some(seed));
    report.metric = Some(summary(m));
    for r in &records {
        let at = label(&r.point);
        report.checks.push(Check::at_most(format!("eigsym{at}"), r.eigsym_residual, tol));
        report.checks.push(Check::holds(
            format!("split_dimension{at}"),
            r.dim_e_w == r.dim_s_w + r.dim_a_w,
        ));
    }
    report.spectra = records;
    report.finalize();
    Ok(report)
}

pub fn cmd_verify_algebra(seed: u64, count: usize, dims: &[usize], tol: Option<f64>) -> Result<Report, CliError> {
    if count == 0 {
        return Err(CliError::Args("--count must be positive".into()));
    }
    for &d in dims {
        if !(weylscope_core::tensor::MIN_DIM..=weylscope_core::tensor::MAX_DIM).contains(&d) {
            return Err(CliError::Args(format!(
                "--dim {d} is outside {}..={}",
                weylscope_core::tensor::MIN_DIM,
                weylscope_core::tensor::MAX_DIM
            )));
        }
    }
    let tols = tol.map(SuiteTolerances::uniform).unwrap_or_default();
    let mut report = Report::new("verify-algebra", Some(seed));
    for &d in dims {
        let mut suites = run_all(seed, count, d, &tols);
        if dims.len() > 1 {
            for s in &mut suites {
                s.name = format!("{}[dim={d}]", s.name);
            }
        }
        report.suites.extend(suites);
    }
    report.finalize();
    Ok(report)
}

/// Whether a saved report passed.
pub fn saved_report_passed(v: &Value) -> Result<bool, CliError> {
    v.get("passed")
        .and_then(Value::as_bool)
        .ok_or_else(|| CliError::Spec("not a weylscope report: missing \"passed\"".into()))
}
