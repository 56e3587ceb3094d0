//! Pointwise curvature of a chart metric: Christoffel symbols, Riemann,
//! Ricci, Schouten, Weyl, Cotton, the divergence of Weyl and the Bach tensor.
//!
//! Coordinate tensors are carried as Taylor jets so that every derivative is
//! exact up to the quality of the metric jet. Results are delivered in the
//! orthonormal frame `E = L^{-T}` where `g = L L^T` is the Cholesky factor
//! at the point (optionally rotated by a caller-supplied `SO(n)` matrix).
//!
//! Sign conventions: `R(x, y, z, u) = g_{ae} R^e_{bcd} x^a y^b z^c u^d` with
//! `R^a_{bcd} = d_c G^a_{bd} - d_d G^a_{bc} + G^a_{ce} G^e_{bd} - G^a_{de} G^e_{bc}`,
//! so that the unit sphere has `R = g . g / 2` and `Ric(y, u) = sum_i R(e_i, y, e_i, u)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::GeometryError;
use crate::jet::Jet;
use crate::metric::{ChartMetric, MetricJet};
use crate::tensor::{kulkarni_nomizu, SymBilinear, Tensor3, Tensor4};
use crate::weyl::{project_to_weyl, reduced_ricci, AlgWeyl, WeylDefects};

/// How much of the curvature hierarchy to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum BundleLevel {
    /// Up to the Weyl tensor and `h` (second derivatives of the metric).
    Curvature,
    /// Adds Cotton, `nabla W` and `delta W` (third derivatives).
    Cotton,
    /// Adds the Bach tensor and `nabla C` (fourth derivatives).
    Full,
}

impl BundleLevel {
    pub fn jet_order(&self) -> usize {
        match self {
            BundleLevel::Curvature => 2,
            BundleLevel::Cotton => 3,
            BundleLevel::Full => 4,
        }
    }
}

/// Dense coordinate tensor of jets, row-major.
#[derive(Debug, Clone)]
struct JetTensor {
    n: usize,
    rank: usize,
    data: Vec<Jet>,
}

impl JetTensor {
    fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Self {
        let total = n.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut data = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            for slot in (0..rank).rev() {
                idx[slot] = rem % n;
                rem /= n;
            }
            data.push(f(&idx));
        }
        Self { n, rank, data }
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, i| acc * self.n + i)
    }

    fn at(&self, idx: &[usize]) -> &Jet {
        &self.data[self.offset(idx)]
    }

    fn values(&self) -> Vec<f64> {
        self.data.iter().map(Jet::value).collect()
    }

    /// `(nabla T)_{e i_1 .. i_r}` with the derivative index first.
    fn covariant_derivative(&self, gamma: &JetTensor) -> JetTensor {
        let n = self.n;
        let rank = self.rank;
        JetTensor::from_fn(n, rank + 1, |idx| {
            let e = idx[0];
            let inner = &idx[1..];
            let mut acc = self.at(inner).derivative(e);
            let mut moved = inner.to_vec();
            for slot in 0..rank {
                let orig = inner[slot];
                for f in 0..n {
                    moved[slot] = f;
                    let term = gamma.at(&[f, e, orig]) * self.at(&moved);
                    acc = &acc - &term;
                }
                moved[slot] = orig;
            }
            acc
        })
    }
}

/// Coordinate-level curvature quantities.
struct CoordinateCurvature {
    ginv: JetTensor,
    gamma: JetTensor,
    riemann: JetTensor,
    h: JetTensor,
    weyl: JetTensor,
}

fn inverse_metric(g: &JetTensor, g0: &DMatrix<f64>) -> Result<JetTensor, GeometryError> {
    let n = g.n;
    let a = g0
        .clone()
        .try_inverse()
        .ok_or_else(|| GeometryError::Precondition("metric is singular".into()))?;
    let space = g.data[0].space().clone();
    let order = g.data.iter().map(Jet::order).min().unwrap_or(0);
    // g = g0 + D with D nilpotent in the jet algebra; g^{-1} = sum_k (-A D)^k A
    let delta = JetTensor::from_fn(n, 2, |i| g.at(i).add_scalar(-g0[(i[0], i[1])]));
    let constant = |v: f64| Jet::constant(&space, v).truncate(order);
    let mut term = JetTensor::from_fn(n, 2, |i| constant(a[(i[0], i[1])]));
    let mut sum = term.clone();
    for _ in 0..order {
        // term <- -A D term
        let ad = JetTensor::from_fn(n, 2, |i| {
            let mut acc = constant(0.0);
            for k in 0..n {
                acc = &acc + &delta.at(&[k, i[1]]).scale(a[(i[0], k)]);
            }
            acc
        });
        term = JetTensor::from_fn(n, 2, |i| {
            let mut acc = constant(0.0);
            for k in 0..n {
                acc = &acc - &(ad.at(&[i[0], k]) * term.at(&[k, i[1]]));
            }
            acc
        });
        for (s, t) in sum.data.iter_mut().zip(&term.data) {
            *s = &*s + t;
        }
    }
    Ok(sum)
}

fn coordinate_curvature(mj: &MetricJet, g0: &DMatrix<f64>) -> Result<CoordinateCurvature, GeometryError> {
    let n = g0.nrows();
    let g = JetTensor {
        n,
        rank: 2,
        data: mj.components.clone(),
    };
    let ginv = inverse_metric(&g, g0)?;
    let dg = JetTensor::from_fn(n, 3, |i| g.at(&[i[1], i[2]]).derivative(i[0]));
    // first kind: G_{d,bc} = (d_b g_dc + d_c g_db - d_d g_bc) / 2
    let first = JetTensor::from_fn(n, 3, |i| {
        let (d, b, c) = (i[0], i[1], i[2]);
        (&(dg.at(&[b, d, c]) + dg.at(&[c, d, b])) - dg.at(&[d, b, c])).scale(0.5)
    });
    let gamma = JetTensor::from_fn(n, 3, |i| {
        let mut acc = ginv.at(&[i[0], 0]) * first.at(&[0, i[1], i[2]]);
        for d in 1..n {
            acc = &acc + &(ginv.at(&[i[0], d]) * first.at(&[d, i[1], i[2]]));
        }
        acc
    });
    let riemann_up = JetTensor::from_fn(n, 4, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        let mut acc = &gamma.at(&[a, b, d]).derivative(c) - &gamma.at(&[a, b, c]).derivative(d);
        for e in 0..n {
            acc = &acc + &(gamma.at(&[a, c, e]) * gamma.at(&[e, b, d]));
            acc = &acc - &(gamma.at(&[a, d, e]) * gamma.at(&[e, b, c]));
        }
        acc
    });
    let riemann = JetTensor::from_fn(n, 4, |i| {
        let mut acc = g.at(&[i[0], 0]) * riemann_up.at(&[0, i[1], i[2], i[3]]);
        for e in 1..n {
            acc = &acc + &(g.at(&[i[0], e]) * riemann_up.at(&[e, i[1], i[2], i[3]]));
        }
        acc
    });
    let ricci = JetTensor::from_fn(n, 2, |i| {
        let mut acc: Option<Jet> = None;
        for a in 0..n {
            for c in 0..n {
                let t = ginv.at(&[a, c]) * riemann.at(&[a, i[0], c, i[1]]);
                acc = Some(match acc {
                    Some(x) => &x + &t,
                    None => t,
                });
            }
        }
        acc.expect("dimension is positive")
    });
    let mut scalar = ginv.at(&[0, 0]) * ricci.at(&[0, 0]);
    for b in 0..n {
        for d in 0..n {
            if (b, d) != (0, 0) {
                scalar = &scalar + &(ginv.at(&[b, d]) * ricci.at(&[b, d]));
            }
        }
    }
    let nf = n as f64;
    let h = JetTensor::from_fn(n, 2, |i| {
        (ricci.at(i) - &(g.at(i) * &scalar).scale(1.0 / (2.0 * (nf - 1.0)))).scale(1.0 / (nf - 2.0))
    });
    let weyl = JetTensor::from_fn(n, 4, |i| {
        let (x, y, z, t) = (i[0], i[1], i[2], i[3]);
        let kn = &(&(h.at(&[x, z]) * g.at(&[y, t])) + &(h.at(&[y, t]) * g.at(&[x, z])))
            - &(&(h.at(&[x, t]) * g.at(&[y, z])) + &(h.at(&[y, z]) * g.at(&[x, t])));
        riemann.at(i) - &kn
    });
    Ok(CoordinateCurvature {
        ginv,
        gamma,
        riemann,
        h,
        weyl,
    })
}

fn frame_matrix(g0: &DMatrix<f64>, rotation: Option<&DMatrix<f64>>) -> Result<DMatrix<f64>, GeometryError> {
    let n = g0.nrows();
    let chol = g0
        .clone()
        .cholesky()
        .ok_or_else(|| GeometryError::Precondition("metric is not positive definite".into()))?;
    let l = chol.l();
    let e = l
        .transpose()
        .try_inverse()
        .ok_or_else(|| GeometryError::Precondition("Cholesky factor is singular".into()))?;
    match rotation {
        None => Ok(e),
        Some(q) => {
            if q.nrows() != n || q.ncols() != n {
                return Err(crate::TensorError::DimensionMismatch {
                    expected: n,
                    found: q.nrows(),
                }
                .into());
            }
            if (q.transpose() * q - DMatrix::identity(n, n)).abs().max() > 1e-10 || q.determinant() < 0.0 {
                return Err(crate::TensorError::NotRotation.into());
            }
            Ok(e * q)
        }
    }
}

fn to_frame4(values: &[f64], n: usize, e: &DMatrix<f64>) -> Tensor4 {
    Tensor4::from_vec(n, values.to_vec()).change_frame(e)
}

fn to_frame3(values: &[f64], n: usize, e: &DMatrix<f64>) -> Tensor3 {
    Tensor3::from_vec(n, values.to_vec()).change_frame(e)
}

fn to_frame2(values: &[f64], n: usize, e: &DMatrix<f64>) -> DMatrix<f64> {
    e.transpose() * DMatrix::from_row_slice(n, n, values) * e
}

/// Split a coordinate tensor with a leading derivative index into frame
/// tensors indexed by the frame direction.
fn split_derivative(values: &[f64], n: usize, block: usize, e: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..n)
        .map(|a| {
            let mut acc = vec![0.0; block];
            for i in 0..n {
                let w = e[(i, a)];
                if w != 0.0 {
                    for (k, v) in acc.iter_mut().enumerate() {
                        *v += w * values[i * block + k];
                    }
                }
            }
            acc
        })
        .collect()
}

/// Self-consistency residuals computed alongside the bundle.
#[derive(Debug, Clone, Serialize)]
pub struct BundleChecks {
    /// `max |R - W - h . g|`, zero up to rounding by construction.
    pub decomposition: f64,
    /// `max |project_to_weyl(R) - W|`.
    pub projection_agreement: f64,
    /// Largest defect of the Weyl identities of `W`.
    pub weyl_defect: f64,
    /// Largest defect of the algebraic symmetries of `R`.
    pub riemann_defect: f64,
    /// `max |delta W + (n - 3) C|`.
    pub delta_w_identity: Option<f64>,
    /// Second Bianchi identity with the Cotton correction.
    pub second_bianchi: Option<f64>,
    pub cotton_antisymmetry: Option<f64>,
    pub bach_asymmetry: Option<f64>,
    pub bach_trace: Option<f64>,
}

/// Curvature at a point, in an orthonormal frame.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub level: BundleLevel,
    /// Coordinate metric at the point.
    pub metric: DMatrix<f64>,
    /// Columns are the frame vectors in coordinates.
    pub frame: DMatrix<f64>,
    /// Coordinate Christoffel symbols `G^a_{bc}` at the point.
    pub christoffel: Tensor3,
    pub riemann: Tensor4,
    pub ricci: SymBilinear,
    pub scalar: f64,
    pub h: SymBilinear,
    pub schouten: Tensor4,
    pub weyl: AlgWeyl,
    pub cotton: Option<Tensor3>,
    pub delta_w: Option<Tensor3>,
    /// `nabla_{e_i} W` for each frame direction.
    pub nabla_weyl: Option<Vec<Tensor4>>,
    /// `nabla_{e_i} C` for each frame direction.
    pub nabla_cotton: Option<Vec<Tensor3>>,
    pub bach: Option<SymBilinear>,
    pub checks: BundleChecks,
    pub fd_error: f64,
    pub warnings: Vec<String>,
}

impl CurvatureBundle {
    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn cotton(&self) -> Result<&Tensor3, GeometryError> {
        self.cotton
            .as_ref()
            .ok_or_else(|| GeometryError::Precondition("Cotton tensor was not computed at this level".into()))
    }

    pub fn bach(&self) -> Result<&SymBilinear, GeometryError> {
        self.bach
            .as_ref()
            .ok_or_else(|| GeometryError::Precondition("Bach tensor was not computed at this level".into()))
    }

    /// `delta-hat C (A, B) = sum_i (nabla_{e_i} C)(A, e_i, B)`.
    pub fn cotton_divergence(&self) -> Result<DMatrix<f64>, GeometryError> {
        let nc = self
            .nabla_cotton
            .as_ref()
            .ok_or_else(|| GeometryError::Precondition("nabla C needs fourth derivatives".into()))?;
        let n = self.dim();
        Ok(DMatrix::from_fn(n, n, |a, b| (0..n).map(|i| nc[i].get(a, i, b)).sum()))
    }

    /// Convert a coordinate covector to frame components.
    pub fn covector_to_frame(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|a| (0..n).map(|i| self.frame[(i, a)] * v[i]).sum()).collect()
    }

    /// Convert frame components of a covector to coordinate components.
    pub fn covector_to_coordinates(&self, v: &[f64]) -> Vec<f64> {
        let inv = self.frame.clone().try_inverse().expect("frame is invertible");
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|a| inv[(a, i)] * v[a]).sum()).collect()
    }
}

/// Options for [`curvature_bundle_with`].
#[derive(Debug, Clone)]
pub struct BundleOptions {
    pub level: BundleLevel,
    /// Extra `SO(n)` rotation applied to the Cholesky frame.
    pub rotation: Option<DMatrix<f64>>,
}

impl Default for BundleOptions {
    fn default() -> Self {
        Self {
            level: BundleLevel::Full,
            rotation: None,
        }
    }
}

/// Coordinate Christoffel symbols `G^a_{bc}` (first index raised) at `x`.
pub fn christoffel(m: &ChartMetric, x: &[f64]) -> Result<Tensor3, GeometryError> {
    let g0 = m.metric_at(x)?;
    let mj = m.jet_at(x, 1)?;
    let n = m.dim();
    let g = JetTensor {
        n,
        rank: 2,
        data: mj.components,
    };
    let ginv = inverse_metric(&g, &g0)?;
    Ok(Tensor3::from_fn(n, |a, b, c| {
        let mut acc = 0.0;
        for d in 0..n {
            let first = 0.5
                * (g.at(&[d, c]).derivative(b).value() + g.at(&[d, b]).derivative(c).value()
                    - g.at(&[b, c]).derivative(d).value());
            acc += ginv.at(&[a, d]).value() * first;
        }
        acc
    }))
}

/// Riemann tensor at `x` in the Cholesky orthonormal frame.
pub fn riemann(m: &ChartMetric, x: &[f64]) -> Result<Tensor4, GeometryError> {
    Ok(curvature_bundle_with(
        m,
        x,
        &BundleOptions {
            level: BundleLevel::Curvature,
            rotation: None,
        },
    )?
    .riemann)
}

/// All curvature quantities at `x`, including Bach.
pub fn curvature_bundle(m: &ChartMetric, x: &[f64]) -> Result<CurvatureBundle, GeometryError> {
    curvature_bundle_with(m, x, &BundleOptions::default())
}

pub fn curvature_bundle_with(m: &ChartMetric, x: &[f64], opts: &BundleOptions) -> Result<CurvatureBundle, GeometryError> {
    let n = m.dim();
    let g0 = m.metric_at(x)?;
    let mj = m.jet_at(x, opts.level.jet_order())?;
    let cc = coordinate_curvature(&mj, &g0)?;
    let e = frame_matrix(&g0, opts.rotation.as_ref())?;

    let riemann = to_frame4(&cc.riemann.values(), n, &e);
    let weyl_t = to_frame4(&cc.weyl.values(), n, &e);
    let h = SymBilinear::from_matrix(&to_frame2(&cc.h.values(), n, &e));
    let ricci = crate::tensor::ricci_contraction(&riemann);
    let scalar = ricci.trace();
    let gid = SymBilinear::identity(n);
    let schouten = kulkarni_nomizu(&h, &gid)?;
    let christoffel = Tensor3::from_vec(n, cc.gamma.values());

    let decomposition = (&(&riemann - &weyl_t) - &schouten).max_abs();
    let projection_agreement = (project_to_weyl(&riemann).weyl.tensor() - &weyl_t).max_abs();
    let weyl_defect = WeylDefects::of(&weyl_t).max();
    let riemann_defect = riemann
        .pair_antisymmetry_defect()
        .max(riemann.pair_swap_defect())
        .max(crate::tensor::bianchi_map(&riemann).max_abs());
    // reduced Ricci recomputed from R as a consistency cross-check
    let h_check = (reduced_ricci(&riemann).matrix() - h.matrix()).abs().max();
    let mut warnings = mj.warnings.clone();
    if h_check > 1e-8 * (1.0 + h.matrix().abs().max()) {
        warnings.push(format!("reduced Ricci routes disagree by {h_check:.2e}"));
    }

    let mut bundle = CurvatureBundle {
        point: x.to_vec(),
        level: opts.level,
        metric: g0,
        frame: e.clone(),
        christoffel,
        riemann,
        ricci,
        scalar,
        h,
        schouten,
        weyl: AlgWeyl::new_unchecked(weyl_t),
        cotton: None,
        delta_w: None,
        nabla_weyl: None,
        nabla_cotton: None,
        bach: None,
        checks: BundleChecks {
            decomposition,
            projection_agreement,
            weyl_defect,
            riemann_defect,
            delta_w_identity: None,
            second_bianchi: None,
            cotton_antisymmetry: None,
            bach_asymmetry: None,
            bach_trace: None,
        },
        fd_error: mj.fd_error,
        warnings,
    };
    if opts.level == BundleLevel::Curvature {
        return Ok(bundle);
    }

    let nabla_h = cc.h.covariant_derivative(&cc.gamma);
    // C(u, x, y) = (nabla_x h)(y, u) - (nabla_y h)(x, u)
    let cotton_c = JetTensor::from_fn(n, 3, |i| {
        let (u, xx, y) = (i[0], i[1], i[2]);
        nabla_h.at(&[xx, y, u]) - nabla_h.at(&[y, xx, u])
    });
    let nabla_w = cc.weyl.covariant_derivative(&cc.gamma);
    // delta W(b, c, d) = - g^{ea} (nabla_e W)(a, b, c, d)
    let delta_w_c = JetTensor::from_fn(n, 3, |i| {
        let mut acc: Option<Jet> = None;
        for ee in 0..n {
            for a in 0..n {
                let t = cc.ginv.at(&[ee, a]) * nabla_w.at(&[ee, a, i[0], i[1], i[2]]);
                acc = Some(match acc {
                    Some(s) => &s + &t,
                    None => t,
                });
            }
        }
        -acc.expect("dimension is positive")
    });
    let cotton = to_frame3(&cotton_c.values(), n, &e);
    let delta_w = to_frame3(&delta_w_c.values(), n, &e);
    let nabla_weyl: Vec<Tensor4> = split_derivative(&nabla_w.values(), n, n.pow(4), &e)
        .into_iter()
        .map(|v| to_frame4(&v, n, &e))
        .collect();

    let nf = n as f64;
    let identity = (&delta_w + &cotton.scale(nf - 3.0)).max_abs();
    bundle.checks.delta_w_identity = Some(identity);
    bundle.checks.cotton_antisymmetry = Some(cotton.last_pair_antisymmetry_defect());
    bundle.checks.second_bianchi = Some(second_bianchi_residual(&nabla_weyl, &cotton));

    if opts.level == BundleLevel::Full {
        let nabla_dw = delta_w_c.covariant_derivative(&cc.gamma);
        let nabla_dw: Vec<Tensor3> = split_derivative(&nabla_dw.values(), n, n.pow(3), &e)
            .into_iter()
            .map(|v| to_frame3(&v, n, &e))
            .collect();
        let nabla_c = cotton_c.covariant_derivative(&cc.gamma);
        let nabla_c: Vec<Tensor3> = split_derivative(&nabla_c.values(), n, n.pow(3), &e)
            .into_iter()
            .map(|v| to_frame3(&v, n, &e))
            .collect();
        let w = bundle.weyl.tensor();
        let hm = bundle.h.matrix();
        let raw = DMatrix::from_fn(n, n, |xx, y| {
            let mut acc = 0.0;
            for i in 0..n {
                acc += nabla_dw[i].get(xx, i, y);
                for k in 0..n {
                    acc += hm[(i, k)] * w.get(xx, i, k, y);
                }
            }
            acc
        });
        bundle.checks.bach_asymmetry = Some((&raw - raw.transpose()).abs().max());
        bundle.checks.bach_trace = Some(raw.trace().abs());
        bundle.bach = Some(SymBilinear::from_matrix(&raw));
        bundle.nabla_cotton = Some(nabla_c);
    }
    bundle.cotton = Some(cotton);
    bundle.delta_w = Some(delta_w);
    bundle.nabla_weyl = Some(nabla_weyl);
    Ok(bundle)
}

/// `max | sum_cyc(X,Y,Z) [ (nabla_X W)(Y,Z,U,T) + C(U,X,Y) g(Z,T) - C(T,X,Y) g(Z,U) ] |`.
pub fn second_bianchi_residual(nabla_weyl: &[Tensor4], cotton: &Tensor3) -> f64 {
    let n = cotton.dim();
    let mut worst: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for u in 0..n {
                    for t in 0..n {
                        let mut acc = 0.0;
                        for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                            acc += nabla_weyl[a].get(b, c, u, t);
                            if c == t {
                                acc += cotton.get(u, a, b);
                            }
                            if c == u {
                                acc -= cotton.get(t, a, b);
                            }
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
    }
    worst
}

/// Rescale by `exp(2 f)`; see [`ChartMetric::conformal_rescale`].
pub fn conformal_rescale(m: &ChartMetric, f: std::sync::Arc<dyn crate::metric::ScalarField>) -> ChartMetric {
    m.conformal_rescale(f)
}

/// Evaluate a scalar field's jet, falling back to a value-only constant jet.
pub fn scalar_jet(f: &dyn crate::metric::ScalarField, x: &[f64], order: usize) -> Option<Jet> {
    let space = crate::metric::jet_space(x.len(), order);
    f.eval_jet(&Jet::variables(&space, x))
}
