//! Built-in metrics with closed-form components.

use std::sync::Arc;

use rand::Rng;

use crate::error::GeometryError;
use crate::jet::Scalar;
use crate::metric::{ChartMetric, DerivativeStrategy, Formula, GenericField, GenericMetric, ScalarField};
use crate::random::seeded;

/// Keys accepted by [`catalog_metric`].
pub const CATALOG_KEYS: &[&str] = &[
    "flat",
    "round-sphere",
    "s2xs2",
    "conformal-flat",
    "conformal-round-sphere",
    "conformal-s2xs2",
    "poly-diag",
    "poly-warped",
    "random-poly",
];

/// Optional parameters of catalog entries.
#[derive(Debug, Clone, Default)]
pub struct CatalogParams {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub radius: Option<f64>,
}

fn zeros<T: Scalar>(x: &[T], n: usize) -> Vec<T> {
    vec![x[0].lift(0.0); n * n]
}

/// Euclidean metric.
#[derive(Debug, Clone, Copy)]
pub struct Flat(pub usize);

impl GenericMetric for Flat {
    fn dim(&self) -> usize {
        self.0
    }
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = self.0;
        let mut g = zeros(x, n);
        for a in 0..n {
            g[a * n + a] = x[0].lift(1.0);
        }
        g
    }
}

fn radial_factor<T: Scalar>(x: &[T], radius: f64) -> T {
    // 4 r^2 / (1 + |x|^2)^2
    let mut s = x[0].lift(1.0);
    for v in x {
        s = s + v.square();
    }
    s.square().recip().scale(4.0 * radius * radius)
}

/// Round sphere of radius `r` in stereographic coordinates.
#[derive(Debug, Clone, Copy)]
pub struct RoundSphere {
    pub dim: usize,
    pub radius: f64,
}

impl GenericMetric for RoundSphere {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = self.dim;
        let w = radial_factor(x, self.radius);
        let mut g = zeros(x, n);
        for a in 0..n {
            g[a * n + a] = w.clone();
        }
        g
    }
}

/// Product of two unit 2-spheres, stereographic on each factor.
#[derive(Debug, Clone, Copy)]
pub struct ProductSpheres;

impl GenericMetric for ProductSpheres {
    fn dim(&self) -> usize {
        4
    }
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let w1 = radial_factor(&x[0..2], 1.0);
        let w2 = radial_factor(&x[2..4], 1.0);
        let mut g = zeros(x, 4);
        g[0] = w1.clone();
        g[5] = w1;
        g[10] = w2.clone();
        g[15] = w2;
        g
    }
}

/// `diag(1 + x1^2, 1 + x2^2, 1, 1)`; flat, but with non-trivial Christoffel symbols.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalPolynomial;

impl GenericMetric for DiagonalPolynomial {
    fn dim(&self) -> usize {
        4
    }
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let one = x[0].lift(1.0);
        let mut g = zeros(x, 4);
        g[0] = x[0].square() + one.clone();
        g[5] = x[1].square() + one.clone();
        g[10] = one.clone();
        g[15] = one;
        g
    }
}

/// `diag(1, 1 + x1^2, 1 + x1^2 + x2^2, 1 + x1^2 x3^2)`; curved.
#[derive(Debug, Clone, Copy)]
pub struct WarpedPolynomial;

impl GenericMetric for WarpedPolynomial {
    fn dim(&self) -> usize {
        4
    }
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let one = x[0].lift(1.0);
        let x1 = x[0].square();
        let mut g = zeros(x, 4);
        g[0] = one.clone();
        g[5] = x1.clone() + one.clone();
        g[10] = x1.clone() + x[1].square() + one.clone();
        g[15] = x1 * x[2].square() + one;
        g
    }
}

/// Quadratic polynomial in the coordinates.
#[derive(Debug, Clone)]
pub struct QuadraticPoly {
    pub constant: f64,
    pub linear: Vec<f64>,
    /// `(i, j, c)` contributes `c x_i x_j`.
    pub quadratic: Vec<(usize, usize, f64)>,
}

impl QuadraticPoly {
    fn eval<T: Scalar>(&self, x: &[T]) -> T {
        let mut acc = x[0].lift(self.constant);
        for (v, c) in x.iter().zip(&self.linear) {
            if *c != 0.0 {
                acc = acc + v.scale(*c);
            }
        }
        for (i, j, c) in &self.quadratic {
            acc = acc + (x[*i].clone() * x[*j].clone()).scale(*c);
        }
        acc
    }

    /// Random coefficients uniform in `[-amplitude, amplitude]`.
    pub fn random(n: usize, amplitude: f64, rng: &mut crate::random::SeededRng) -> Self {
        let mut u = || rng.gen_range(-amplitude..=amplitude);
        let constant = u();
        let linear = (0..n).map(|_| u()).collect();
        let mut quadratic = Vec::new();
        for i in 0..n {
            for j in i..n {
                quadratic.push((i, j, u()));
            }
        }
        Self {
            constant,
            linear,
            quadratic,
        }
    }
}

impl GenericField for QuadraticPoly {
    fn value<T: Scalar>(&self, x: &[T]) -> T {
        self.eval(x)
    }
}

/// The default conformal factor `0.3 x1 + 0.2 x2 x3 - 0.15 x4^2 + 0.1 x1 x4`.
pub fn default_conformal_factor() -> QuadraticPoly {
    QuadraticPoly {
        constant: 0.0,
        linear: vec![0.3, 0.0, 0.0, 0.0],
        quadratic: vec![(1, 2, 0.2), (3, 3, -0.15), (0, 3, 0.1)],
    }
}

/// Seeded random conformal factor with small quadratic coefficients.
pub fn random_conformal_factor(n: usize, seed: u64) -> QuadraticPoly {
    QuadraticPoly::random(n, 0.25, &mut seeded(seed))
}

/// `g = M M^T + eps I` with `M = I + quadratic polynomial entries`; positive
/// definite everywhere and generically far from any special structure.
#[derive(Debug, Clone)]
pub struct RandomPolynomialMetric {
    pub dim: usize,
    pub entries: Vec<QuadraticPoly>,
}

impl RandomPolynomialMetric {
    pub fn new(dim: usize, seed: u64) -> Self {
        let mut rng = seeded(seed);
        let entries = (0..dim * dim).map(|_| QuadraticPoly::random(dim, 0.35, &mut rng)).collect();
        Self { dim, entries }
    }
}

impl GenericMetric for RandomPolynomialMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = self.dim;
        let m: Vec<T> = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let v = p.eval(x);
                if k / n == k % n {
                    v.add_const(1.0)
                } else {
                    v
                }
            })
            .collect();
        let mut g = zeros(x, n);
        for a in 0..n {
            for b in a..n {
                let mut acc = x[0].lift(if a == b { 0.1 } else { 0.0 });
                for k in 0..n {
                    acc = acc + m[a * n + k].clone() * m[b * n + k].clone();
                }
                g[a * n + b] = acc.clone();
                g[b * n + a] = acc;
            }
        }
        g
    }
}

fn chart(
    name: &str,
    components: Arc<dyn crate::metric::MetricComponents>,
    half_width: f64,
) -> Result<ChartMetric, GeometryError> {
    let n = components.dim();
    ChartMetric::new(name, components, vec![(-half_width, half_width); n], DerivativeStrategy::Analytic)
}

/// Look up a catalog metric. All entries use exact jets by default.
pub fn catalog_metric(key: &str, params: &CatalogParams) -> Result<ChartMetric, GeometryError> {
    let dim = params.dim.unwrap_or(4);
    let radius = params.radius.unwrap_or(1.0);
    let need_four = |_key: &str| -> Result<(), GeometryError> {
        if dim != 4 {
            return Err(GeometryError::WrongDimension {
                operation: "this catalog entry",
                required: 4,
                found: dim,
            });
        }
        Ok(())
    };
    let factor: Arc<dyn ScalarField> = match params.seed {
        Some(seed) => Arc::new(Formula(random_conformal_factor(dim, seed))),
        None if dim == 4 => Arc::new(Formula(default_conformal_factor())),
        None => Arc::new(Formula(random_conformal_factor(dim, 0))),
    };
    let m = match key {
        "flat" => chart(key, Arc::new(Formula(Flat(dim))), 1.0)?,
        "round-sphere" => chart(key, Arc::new(Formula(RoundSphere { dim, radius })), 1.0)?,
        "s2xs2" => {
            need_four(key)?;
            chart(key, Arc::new(Formula(ProductSpheres)), 1.0)?
        }
        "conformal-flat" => chart("flat", Arc::new(Formula(Flat(dim))), 1.0)?
            .conformal_rescale(factor)
            .with_name(key),
        "conformal-round-sphere" => chart("round-sphere", Arc::new(Formula(RoundSphere { dim, radius })), 1.0)?
            .conformal_rescale(factor)
            .with_name(key),
        "conformal-s2xs2" => {
            need_four(key)?;
            chart("s2xs2", Arc::new(Formula(ProductSpheres)), 1.0)?
                .conformal_rescale(factor)
                .with_name(key)
        }
        "poly-diag" => {
            need_four(key)?;
            chart(key, Arc::new(Formula(DiagonalPolynomial)), 1.0)?
        }
        "poly-warped" => {
            need_four(key)?;
            chart(key, Arc::new(Formula(WarpedPolynomial)), 1.0)?
        }
        "random-poly" => chart(
            key,
            Arc::new(Formula(RandomPolynomialMetric::new(dim, params.seed.unwrap_or(0)))),
            0.5,
        )?,
        other => return Err(GeometryError::UnknownCatalogKey(other.to_string())),
    };
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_resolves_at_its_center() {
        for key in CATALOG_KEYS {
            let m = catalog_metric(key, &CatalogParams::default()).unwrap();
            m.metric_at(&m.center()).unwrap();
        }
        assert!(matches!(
            catalog_metric("nope", &CatalogParams::default()),
            Err(GeometryError::UnknownCatalogKey(_))
        ));
    }

    #[test]
    fn random_metric_is_positive_definite_on_its_box() {
        let m = catalog_metric(
            "random-poly",
            &CatalogParams {
                seed: Some(5),
                ..Default::default()
            },
        )
        .unwrap();
        for corner in [[-0.49; 4], [0.49; 4], [0.49, -0.49, 0.49, -0.49]] {
            m.metric_at(&corner).unwrap();
        }
    }

    #[test]
    fn conformal_record_accumulates() {
        let m = catalog_metric("conformal-flat", &CatalogParams::default()).unwrap();
        let f: Arc<dyn ScalarField> = Arc::new(Formula(default_conformal_factor()));
        let twice = m.conformal_rescale(f);
        let x = [0.1, 0.2, -0.3, 0.4];
        let expect = 2.0 * default_conformal_factor().eval(&x);
        assert!((twice.conformal_record().unwrap().eval(&x) - expect).abs() < 1e-15);
        let g = twice.metric_at(&x).unwrap();
        assert!((g[(0, 0)] - (2.0 * expect).exp()).abs() < 1e-12);
    }
}
