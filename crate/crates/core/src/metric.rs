//! Riemannian metrics given by components on a coordinate box, and the
//! derivative strategies used to obtain their Taylor jets at a point.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::GeometryError;
use crate::jet::{Jet, JetSpace, Scalar};
use crate::tensor::{MAX_DIM, MIN_DIM};

/// Highest derivative order ever needed (the Bach tensor uses fourth derivatives).
pub const JET_ORDER: usize = 4;

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Step multiplier for third and fourth derivatives, which are dominated by
/// rounding at the default step.
pub const HIGH_ORDER_STEP_FACTOR: f64 = 10.0;

/// Estimated FD error above which results are flagged as degraded.
pub const FD_DEGRADATION_THRESHOLD: f64 = 1e-4;

/// Shared monomial tables, one per `(vars, order)`.
pub fn jet_space(vars: usize, order: usize) -> Arc<JetSpace> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((vars, order))
        .or_insert_with(|| JetSpace::new(vars, order))
        .clone()
}

/// Metric components as functions of the coordinates.
pub trait MetricComponents: Send + Sync {
    fn dim(&self) -> usize;

    /// Row-major `n x n` components at `x`.
    fn eval(&self, x: &[f64]) -> Vec<f64>;

    /// Components on jets of the coordinates, when the formula supports it.
    fn eval_jet(&self, _x: &[Jet]) -> Option<Vec<Jet>> {
        None
    }
}

/// A scalar function on the chart (used for conformal factors and potentials).
pub trait ScalarField: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;

    fn eval_jet(&self, _x: &[Jet]) -> Option<Jet> {
        None
    }
}

/// Formulas written once for any [`Scalar`] type.
pub trait GenericMetric: Send + Sync {
    fn dim(&self) -> usize;
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T>;
}

pub trait GenericField: Send + Sync {
    fn value<T: Scalar>(&self, x: &[T]) -> T;
}

/// Adapter turning a [`GenericMetric`] or [`GenericField`] into the object-safe traits.
#[derive(Debug, Clone)]
pub struct Formula<M>(pub M);

impl<M: GenericMetric> MetricComponents for Formula<M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.0.components(x)
    }
    fn eval_jet(&self, x: &[Jet]) -> Option<Vec<Jet>> {
        Some(self.0.components(x))
    }
}

impl<F: GenericField> ScalarField for Formula<F> {
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.value(x)
    }
    fn eval_jet(&self, x: &[Jet]) -> Option<Jet> {
        Some(self.0.value(x))
    }
}

/// How derivatives of the components are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DerivativeStrategy {
    /// Exact Taylor jets propagated through the component formulas.
    Analytic,
    /// Central differences with one Richardson level.
    FiniteDifference { step: f64 },
}

impl DerivativeStrategy {
    pub fn fd_default() -> Self {
        DerivativeStrategy::FiniteDifference { step: DEFAULT_FD_STEP }
    }
}

/// Sum of conformal factors applied so far; the metric is `exp(2 f) g_base`.
#[derive(Clone)]
pub struct ConformalRecord {
    pub factors: Vec<Arc<dyn ScalarField>>,
}

impl ConformalRecord {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.factors.iter().map(|f| f.eval(x)).sum()
    }
}

impl fmt::Debug for ConformalRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConformalRecord({} factors)", self.factors.len())
    }
}

impl ScalarField for ConformalRecord {
    fn eval(&self, x: &[f64]) -> f64 {
        ConformalRecord::eval(self, x)
    }
    fn eval_jet(&self, x: &[Jet]) -> Option<Jet> {
        let mut acc: Option<Jet> = None;
        for f in &self.factors {
            let v = f.eval_jet(x)?;
            acc = Some(match acc {
                Some(a) => a + v,
                None => v,
            });
        }
        acc.or_else(|| x.first().map(|v| v.lift(0.0)))
    }
}

struct Rescaled {
    base: Arc<dyn MetricComponents>,
    factor: Arc<dyn ScalarField>,
}

impl MetricComponents for Rescaled {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let w = (2.0 * self.factor.eval(x)).exp();
        self.base.eval(x).into_iter().map(|g| w * g).collect()
    }
    fn eval_jet(&self, x: &[Jet]) -> Option<Vec<Jet>> {
        let w = self.factor.eval_jet(x)?.scale(2.0).exp();
        Some(self.base.eval_jet(x)?.iter().map(|g| &w * g).collect())
    }
}

/// The Taylor jets of all components at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub point: Vec<f64>,
    /// Row-major component jets.
    pub components: Vec<Jet>,
    pub strategy: DerivativeStrategy,
    /// Estimated error of the highest FD coefficients (zero for jets).
    pub fd_error: f64,
    pub warnings: Vec<String>,
}

/// A metric on a coordinate box `prod (lo_i, hi_i)`.
#[derive(Clone)]
pub struct ChartMetric {
    name: String,
    components: Arc<dyn MetricComponents>,
    bounds: Vec<(f64, f64)>,
    strategy: DerivativeStrategy,
    conformal: Option<ConformalRecord>,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("bounds", &self.bounds)
            .field("strategy", &self.strategy)
            .field("conformal", &self.conformal)
            .finish()
    }
}

impl ChartMetric {
    pub fn new(
        name: impl Into<String>,
        components: Arc<dyn MetricComponents>,
        bounds: Vec<(f64, f64)>,
        strategy: DerivativeStrategy,
    ) -> Result<Self, GeometryError> {
        let n = components.dim();
        if !(MIN_DIM..=MAX_DIM).contains(&n) {
            return Err(crate::TensorError::UnsupportedDimension(n).into());
        }
        if bounds.len() != n {
            return Err(crate::TensorError::DimensionMismatch {
                expected: n,
                found: bounds.len(),
            }
            .into());
        }
        if bounds.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(GeometryError::Precondition("coordinate box has an empty side".into()));
        }
        if let DerivativeStrategy::FiniteDifference { step } = strategy {
            if !(step > 0.0 && step.is_finite()) {
                return Err(GeometryError::Precondition(format!("invalid finite-difference step {step}")));
            }
        }
        Ok(Self {
            name: name.into(),
            components,
            bounds,
            strategy,
            conformal: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.components.dim()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn strategy(&self) -> DerivativeStrategy {
        self.strategy
    }

    pub fn conformal_record(&self) -> Option<&ConformalRecord> {
        self.conformal.as_ref()
    }

    pub fn components(&self) -> &Arc<dyn MetricComponents> {
        &self.components
    }

    pub fn with_strategy(&self, strategy: DerivativeStrategy) -> Self {
        let mut out = self.clone();
        out.strategy = strategy;
        out
    }

    pub fn with_name(&self, name: impl Into<String>) -> Self {
        let mut out = self.clone();
        out.name = name.into();
        out
    }

    pub fn with_bounds(&self, bounds: Vec<(f64, f64)>) -> Result<Self, GeometryError> {
        let mut out = Self::new(self.name.clone(), self.components.clone(), bounds, self.strategy)?;
        out.conformal = self.conformal.clone();
        Ok(out)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.bounds).all(|(v, (lo, hi))| lo < v && v < hi)
    }

    /// Centre of the coordinate box.
    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Metric matrix at `x`, validated for symmetry and positive-definiteness.
    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
        if !self.contains(x) {
            return Err(GeometryError::OutsideBox { point: x.to_vec() });
        }
        let n = self.dim();
        let values = self.components.eval(x);
        if values.len() != n * n {
            return Err(crate::TensorError::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            }
            .into());
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { point: x.to_vec() });
        }
        let g = DMatrix::from_row_slice(n, n, &values);
        let asym = (&g - g.transpose()).abs().max();
        if asym > 1e-12 * (1.0 + g.abs().max()) {
            return Err(GeometryError::NotSymmetric {
                point: x.to_vec(),
                asymmetry: asym,
            });
        }
        let g = (&g + g.transpose()) * 0.5;
        if g.clone().cholesky().is_none() {
            return Err(GeometryError::NotPositiveDefinite { point: x.to_vec() });
        }
        Ok(g)
    }

    /// Taylor jets of the components at `x`, valid to `order`.
    pub fn jet_at(&self, x: &[f64], order: usize) -> Result<MetricJet, GeometryError> {
        let g = self.metric_at(x)?;
        let n = self.dim();
        let space = jet_space(n, order);
        let mut warnings = Vec::new();
        if self.strategy == DerivativeStrategy::Analytic {
            if let Some(components) = self.components.eval_jet(&Jet::variables(&space, x)) {
                if components.iter().any(|j| j.coeffs().iter().any(|c| !c.is_finite())) {
                    return Err(GeometryError::NonFinite { point: x.to_vec() });
                }
                return Ok(MetricJet {
                    point: x.to_vec(),
                    components: symmetrise(components, n),
                    strategy: self.strategy,
                    fd_error: 0.0,
                    warnings,
                });
            }
            warnings.push("analytic derivatives unavailable; using finite differences".to_string());
        }
        let step = match self.strategy {
            DerivativeStrategy::FiniteDifference { step } => step,
            DerivativeStrategy::Analytic => DEFAULT_FD_STEP,
        };
        let (components, fd_error) = fd_jets(self.components.as_ref(), x, step, &space, g.abs().max())?;
        if fd_error > FD_DEGRADATION_THRESHOLD {
            warnings.push(format!(
                "finite-difference error estimate {fd_error:.2e} exceeds {FD_DEGRADATION_THRESHOLD:.0e}"
            ));
        }
        Ok(MetricJet {
            point: x.to_vec(),
            components: symmetrise(components, n),
            strategy: DerivativeStrategy::FiniteDifference { step },
            fd_error,
            warnings,
        })
    }

    /// The metric `exp(2 f) g`, with the factor added to the conformal record.
    pub fn conformal_rescale(&self, f: Arc<dyn ScalarField>) -> Self {
        let mut record = self.conformal.clone().unwrap_or(ConformalRecord { factors: Vec::new() });
        record.factors.push(f.clone());
        Self {
            name: format!("{}+conformal", self.name),
            components: Arc::new(Rescaled {
                base: self.components.clone(),
                factor: f,
            }),
            bounds: self.bounds.clone(),
            strategy: self.strategy,
            conformal: Some(record),
        }
    }
}

fn symmetrise(mut c: Vec<Jet>, n: usize) -> Vec<Jet> {
    for a in 0..n {
        for b in a + 1..n {
            let s = (&c[a * n + b] + &c[b * n + a]).scale(0.5);
            c[a * n + b] = s.clone();
            c[b * n + a] = s;
        }
    }
    c
}

/// Central stencil for the `k`-th derivative, second-order accurate: `(offset, weight)`.
pub fn stencil(k: u8) -> &'static [(i8, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => panic!("stencils are provided up to fourth order"),
    }
}

/// Step used for a derivative of total order `degree`.
pub fn step_for_degree(step: f64, degree: usize) -> f64 {
    if degree <= 2 {
        step
    } else {
        step * HIGH_ORDER_STEP_FACTOR
    }
}

struct StencilCache<'a> {
    metric: &'a dyn MetricComponents,
    x: &'a [f64],
    values: HashMap<(Vec<i8>, u64), Vec<f64>>,
}

impl StencilCache<'_> {
    fn at(&mut self, offsets: &[i8], step: f64) -> Result<&Vec<f64>, GeometryError> {
        let key = (offsets.to_vec(), step.to_bits());
        if !self.values.contains_key(&key) {
            let p: Vec<f64> = self.x.iter().zip(offsets).map(|(x, o)| x + step * (*o as f64)).collect();
            let v = self.metric.eval(&p);
            if v.iter().any(|c| !c.is_finite()) {
                return Err(GeometryError::NonFinite { point: p });
            }
            self.values.insert(key.clone(), v);
        }
        Ok(&self.values[&key])
    }

    /// Tensor-product stencil estimate of `d^alpha g` at step `h`.
    fn derivative(&mut self, alpha: &[u8], h: f64) -> Result<Vec<f64>, GeometryError> {
        let n = self.x.len();
        let mut acc: Vec<f64> = Vec::new();
        let mut offsets = vec![0i8; n];
        let stencils: Vec<&[(i8, f64)]> = alpha.iter().map(|k| stencil(*k)).collect();
        let mut cursor = vec![0usize; n];
        loop {
            let mut weight = 1.0;
            for v in 0..n {
                let (o, w) = stencils[v][cursor[v]];
                offsets[v] = o;
                weight *= w;
            }
            let vals = self.at(&offsets, h)?;
            if acc.is_empty() {
                acc = vec![0.0; vals.len()];
            }
            for (a, v) in acc.iter_mut().zip(vals) {
                *a += weight * v;
            }
            // advance the mixed-radix cursor
            let mut v = 0;
            loop {
                if v == n {
                    let degree: i32 = alpha.iter().map(|k| *k as i32).sum();
                    let scale = h.powi(degree);
                    return Ok(acc.into_iter().map(|a| a / scale).collect());
                }
                cursor[v] += 1;
                if cursor[v] < stencils[v].len() {
                    break;
                }
                cursor[v] = 0;
                v += 1;
            }
        }
    }
}

/// Taylor coefficients of every component by Richardson-extrapolated central
/// differences at steps `h` and `h/2`. The error estimate is the largest
/// discrepancy against the extrapolation from `2h` and `h`, relative to
/// `1 + scale`.
pub fn fd_jets(
    metric: &dyn MetricComponents,
    x: &[f64],
    step: f64,
    space: &Arc<JetSpace>,
    scale: f64,
) -> Result<(Vec<Jet>, f64), GeometryError> {
    let n = x.len();
    let half_min = 0.5 * step;
    if x.iter().any(|v| v + half_min == *v) {
        return Err(GeometryError::StepUnderflow {
            step,
            point: x.to_vec(),
        });
    }
    let mut cache = StencilCache {
        metric,
        x,
        values: HashMap::new(),
    };
    let m = space.len();
    let mut coeffs = vec![vec![0.0; m]; n * n];
    let mut worst: f64 = 0.0;
    for idx in 0..m {
        let alpha = space.exponents(idx).to_vec();
        let degree = space.degree(idx);
        let factorial: f64 = alpha.iter().map(|k| (1..=*k as u64).product::<u64>() as f64).product();
        let value = if degree == 0 {
            cache.at(&vec![0; n], step)?.clone()
        } else {
            let h = step_for_degree(step, degree);
            let wide = cache.derivative(&alpha, 2.0 * h)?;
            let coarse = cache.derivative(&alpha, h)?;
            let fine = cache.derivative(&alpha, 0.5 * h)?;
            let mut out = Vec::with_capacity(coarse.len());
            for ((w, c), f) in wide.iter().zip(&coarse).zip(&fine) {
                let value = (4.0 * f - c) / 3.0;
                // the same extrapolation one step coarser bounds the error of `value`
                let check = (4.0 * c - w) / 3.0;
                worst = worst.max((value - check).abs() / factorial);
                out.push(value);
            }
            out
        };
        for (comp, v) in coeffs.iter_mut().zip(value) {
            comp[idx] = v / factorial;
        }
    }
    let jets = coeffs
        .into_iter()
        .map(|c| Jet::from_coeffs(space, c, space.max_order()))
        .collect();
    Ok((jets, worst / (1.0 + scale)))
}
