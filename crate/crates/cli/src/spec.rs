//! JSON metric definitions.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use weylscope_core::catalog::{catalog_metric, CatalogParams};
use weylscope_core::jet::{Jet, Scalar};
use weylscope_core::metric::{ChartMetric, DerivativeStrategy, MetricComponents, ScalarField, DEFAULT_FD_STEP};

use crate::error::CliError;
use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivativeChoice {
    Fd,
    Analytic,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogParamsSpec {
    pub seed: Option<u64>,
    pub radius: Option<f64>,
}

/// Sample points: an explicit list or `{"grid": K}` for `K` points on the box diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SamplePoints {
    List(Vec<Vec<f64>>),
    Grid { grid: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub name: Option<String>,
    pub dim: Option<usize>,
    pub catalog: Option<String>,
    #[serde(default)]
    pub params: CatalogParamsSpec,
    /// Component expressions `g[i][j]`.
    pub g: Option<Vec<Vec<String>>>,
    /// Optional `f` applied as `exp(2 f) g`.
    pub conformal_factor: Option<String>,
    #[serde(rename = "box")]
    pub bounds: Option<Vec<[f64; 2]>>,
    pub sample_points: Option<SamplePoints>,
    pub derivatives: Option<DerivativeChoice>,
    pub fd_step: Option<f64>,
}

/// Metric given by parsed component expressions.
#[derive(Debug, Clone)]
pub struct ExpressionMetric {
    dim: usize,
    entries: Vec<Expr>,
}

impl ExpressionMetric {
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        self.entries.iter().map(|e| e.eval(x)).collect()
    }
}

impl MetricComponents for ExpressionMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components(x)
    }
    fn eval_jet(&self, x: &[Jet]) -> Option<Vec<Jet>> {
        Some(self.components(x))
    }
}

#[derive(Debug, Clone)]
pub struct ExpressionField(pub Expr);

impl ScalarField for ExpressionField {
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x)
    }
    fn eval_jet(&self, x: &[Jet]) -> Option<Jet> {
        Some(self.0.eval(x))
    }
}

/// Parse a metric definition; JSON errors carry line and column.
pub fn parse_metric_spec(text: &str) -> Result<MetricSpec, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn spec_err(msg: impl Into<String>) -> CliError {
    CliError::Spec(msg.into())
}

fn parse_entry(src: &str, what: String, dim: usize) -> Result<Expr, CliError> {
    let e = Expr::parse(src).map_err(|source| CliError::Expr {
        entry: what.clone(),
        source,
    })?;
    if e.arity() > dim {
        return Err(spec_err(format!("{what} uses x{} but dim is {dim}", e.arity())));
    }
    Ok(e)
}

/// Deterministic probe points for the numerical symmetry check.
fn probe_points(bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
    [0.5, 0.3, 0.8]
        .iter()
        .enumerate()
        .map(|(k, t)| {
            bounds
                .iter()
                .enumerate()
                .map(|(i, (lo, hi))| {
                    let s = if (i + k) % 2 == 0 { *t } else { 1.0 - t };
                    lo + s * (hi - lo)
                })
                .collect()
        })
        .collect()
}

impl MetricSpec {
    pub fn from_catalog(key: &str) -> Self {
        Self {
            name: None,
            dim: None,
            catalog: Some(key.to_string()),
            params: CatalogParamsSpec::default(),
            g: None,
            conformal_factor: None,
            bounds: None,
            sample_points: None,
            derivatives: None,
            fd_step: None,
        }
    }

    fn strategy(&self, default: DerivativeChoice) -> Result<DerivativeStrategy, CliError> {
        Ok(match self.derivatives.unwrap_or(default) {
            DerivativeChoice::Analytic => {
                if self.fd_step.is_some() {
                    return Err(spec_err("fd_step given with analytic derivatives"));
                }
                DerivativeStrategy::Analytic
            }
            DerivativeChoice::Fd => DerivativeStrategy::FiniteDifference {
                step: self.fd_step.unwrap_or(DEFAULT_FD_STEP),
            },
        })
    }

    /// Build the chart metric. Catalog entries default to exact derivatives,
    /// expression metrics to finite differences.
    pub fn build(&self) -> Result<ChartMetric, CliError> {
        let mut m = match (&self.catalog, &self.g) {
            (Some(_), Some(_)) => return Err(spec_err("give either \"catalog\" or \"g\", not both")),
            (None, None) => return Err(spec_err("missing \"catalog\" or \"g\"")),
            (Some(key), None) => {
                let params = CatalogParams {
                    dim: self.dim,
                    seed: self.params.seed,
                    radius: self.params.radius,
                };
                let m = catalog_metric(key, &params)?;
                m.with_strategy(self.strategy(DerivativeChoice::Analytic)?)
            }
            (None, Some(rows)) => self.build_expression(rows)?,
        };
        if let Some(b) = &self.bounds {
            if b.len() != m.dim() {
                return Err(spec_err(format!("box has {} entries but dim is {}", b.len(), m.dim())));
            }
            m = m.with_bounds(b.iter().map(|[lo, hi]| (*lo, *hi)).collect())?;
        }
        if let Some(f) = &self.conformal_factor {
            let e = parse_entry(f, "conformal_factor".into(), m.dim())?;
            m = m.conformal_rescale(Arc::new(ExpressionField(e)));
        }
        if let Some(name) = &self.name {
            m = m.with_name(name.clone());
        }
        Ok(m)
    }

    fn build_expression(&self, rows: &[Vec<String>]) -> Result<ChartMetric, CliError> {
        let n = rows.len();
        if let Some(d) = self.dim {
            if d != n {
                return Err(spec_err(format!("dim is {d} but g has {n} rows")));
            }
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(spec_err(format!("row {} of g has {} entries, expected {n}", i + 1, row.len())));
            }
            for (j, src) in row.iter().enumerate() {
                entries.push(parse_entry(src, format!("g[{}][{}]", i + 1, j + 1), n)?);
            }
        }
        let bounds: Vec<(f64, f64)> = match &self.bounds {
            Some(b) => b.iter().map(|[lo, hi]| (*lo, *hi)).collect(),
            None => vec![(-1.0, 1.0); n],
        };
        if bounds.len() != n {
            return Err(spec_err(format!("box has {} entries but dim is {n}", bounds.len())));
        }
        let metric = ExpressionMetric { dim: n, entries };
        for p in probe_points(&bounds) {
            let g = metric.eval(&p);
            for i in 0..n {
                for j in i + 1..n {
                    let (a, b) = (g[i * n + j], g[j * n + i]);
                    if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                        return Err(spec_err(format!(
                            "g is not symmetric: g[{}][{}] != g[{}][{}]",
                            i + 1,
                            j + 1,
                            j + 1,
                            i + 1
                        )));
                    }
                }
            }
        }
        let name = self.name.clone().unwrap_or_else(|| "expression".to_string());
        Ok(ChartMetric::new(
            name,
            Arc::new(metric),
            bounds,
            self.strategy(DerivativeChoice::Fd)?,
        )?)
    }
}
