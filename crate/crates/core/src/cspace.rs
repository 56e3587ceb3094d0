//! Pointwise conformal C-space analysis.
//!
//! Slot contract: a point is a conformal C-space point when some covector
//! `zeta` satisfies `W(zeta, U, X, Y) + C(U, X, Y) = 0` for all `U, X, Y`,
//! with `C(U, X, Y) = (nabla_X h)(Y, U) - (nabla_Y h)(X, U)`.
//! Under this contract `zeta` for a metric `exp(2f) g_E` with `g_E` Einstein
//! is `-df`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::curvature::{curvature_bundle_with, BundleChecks, BundleLevel, BundleOptions, CurvatureBundle};
use crate::error::GeometryError;
use crate::four_dim::split_weyl;
use crate::jet::Jet;
use crate::metric::{jet_space, ChartMetric, ScalarField};
use crate::tensor::{Endo, Inner, Tensor3};
use crate::weyl::{extend, residual_deg1, AlgWeyl};

/// Outcome of solving the C-space equation at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CSpaceStatus {
    Solved,
    WeylZeroCottonZero,
    WeylZeroCottonNonzero,
    Obstructed,
}

#[derive(Debug, Clone, Serialize)]
pub struct CSpaceSolution {
    /// Frame components of `zeta`.
    pub zeta: Vec<f64>,
    /// `|W(zeta, ., ., .) + C|`.
    pub residual: f64,
    pub status: CSpaceStatus,
    /// Set when `|W|` is above the zero threshold but below `1e-6`.
    pub ill_conditioned: bool,
}

/// Thresholds for the pointwise analysis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalysisTolerances {
    /// `|W|` at or below this counts as zero.
    pub weyl_zero: f64,
    /// `|C|` at or below this counts as zero (when `W` vanishes).
    pub cotton_zero: f64,
    /// Solved iff `residual <= cspace_residual * (1 + |C|)`.
    pub cspace_residual: f64,
    /// `|zeta|` at or below this counts as a Cotton space.
    pub zeta_zero: f64,
    /// Stencil radius for differentiating a pointwise-solved `zeta`.
    pub zeta_step: f64,
    /// `|d zeta|` above this on a point with `W != 0` flags an anomaly.
    pub probe_tol: f64,
}

impl Default for AnalysisTolerances {
    fn default() -> Self {
        Self {
            weyl_zero: 1e-8,
            cotton_zero: 1e-5,
            cspace_residual: 1e-5,
            zeta_zero: 1e-6,
            zeta_step: 1e-2,
            probe_tol: 1e-3,
        }
    }
}

/// Relative residual threshold used by [`solve_zeta`].
pub const ALGEBRAIC_RESIDUAL_TOL: f64 = 1e-8;

/// `W_zeta = W(zeta, ., ., .)`.
pub fn weyl_contract(w: &AlgWeyl, zeta: &[f64]) -> Tensor3 {
    w.tensor().contract_first(zeta)
}

fn check_shapes(w: &AlgWeyl, c: &Tensor3) -> Result<(), GeometryError> {
    if w.dim() != c.dim() {
        return Err(crate::TensorError::DimensionMismatch {
            expected: w.dim(),
            found: c.dim(),
        }
        .into());
    }
    Ok(())
}

/// Solve `W(zeta, ., ., .) + C = 0` with the algebraic tolerance.
pub fn solve_zeta(w: &AlgWeyl, c: &Tensor3) -> Result<CSpaceSolution, GeometryError> {
    solve_zeta_with(w, c, 1e-9, ALGEBRAIC_RESIDUAL_TOL)
}

/// Solve with explicit thresholds. In dimension 4 the identity
/// `<W_X, W_Y> = |W|^2 <X, Y> / 4` gives `zeta_a = -4 <W_a, C> / |W|^2`;
/// otherwise the least-squares solution is used.
pub fn solve_zeta_with(w: &AlgWeyl, c: &Tensor3, weyl_zero: f64, rel_tol: f64) -> Result<CSpaceSolution, GeometryError> {
    check_shapes(w, c)?;
    let n = w.dim();
    let wn = w.norm();
    let cn = c.norm();
    if wn <= weyl_zero {
        let status = if cn <= rel_tol * (1.0 + cn).max(1.0) {
            CSpaceStatus::WeylZeroCottonZero
        } else {
            CSpaceStatus::WeylZeroCottonNonzero
        };
        return Ok(CSpaceSolution {
            zeta: vec![0.0; n],
            residual: cn,
            status,
            ill_conditioned: false,
        });
    }
    let slices: Vec<Tensor3> = (0..n).map(|a| w.tensor().slice_first(a)).collect();
    let rhs: Vec<f64> = slices.iter().map(|s| s.inner(c)).collect();
    let zeta: Vec<f64> = if n == 4 {
        rhs.iter().map(|r| -4.0 * r / (wn * wn)).collect()
    } else {
        let gram = DMatrix::from_fn(n, n, |a, b| slices[a].inner(&slices[b]));
        let b = nalgebra::DVector::from_iterator(n, rhs.iter().map(|r| -r));
        let svd = gram.svd(true, true);
        let sol = svd.solve(&b, 1e-12 * wn * wn).map_err(|e| GeometryError::Precondition(e.to_string()))?;
        sol.iter().copied().collect()
    };
    let residual = (&weyl_contract(w, &zeta) + c).norm();
    let status = if residual <= rel_tol * (1.0 + cn) {
        CSpaceStatus::Solved
    } else {
        CSpaceStatus::Obstructed
    };
    Ok(CSpaceSolution {
        zeta,
        residual,
        status,
        ill_conditioned: wn < 1e-6,
    })
}

/// `|W|^2 C - 4 sum_d <W_d, C> W_d`, which equals `|W|^2 (C + W_zeta)` for the
/// least-squares `zeta` and so vanishes exactly at C-space points.
pub fn obstruction(w: &AlgWeyl, c: &Tensor3) -> Result<Tensor3, GeometryError> {
    check_shapes(w, c)?;
    let n = w.dim();
    let w2 = w.norm().powi(2);
    let mut out = c.scale(w2);
    for d in 0..n {
        let wd = w.tensor().slice_first(d);
        let coeff = -4.0 * wd.inner(c);
        out = &out + &wd.scale(coeff);
    }
    Ok(out)
}

/// A covector field given by its coordinate components.
pub trait OneFormField: Send + Sync {
    fn eval(&self, x: &[f64]) -> Vec<f64>;
}

/// The `zeta` used by the differential checks.
#[derive(Clone)]
pub enum ZetaField {
    Zero,
    /// `zeta` solved pointwise from `W` and `C` wherever it is evaluated.
    Solved,
    /// Coordinate components of an explicit field.
    OneForm(Arc<dyn OneFormField>),
    /// `zeta = scale * d(potential)`.
    Gradient { potential: Arc<dyn ScalarField>, scale: f64 },
}

impl std::fmt::Debug for ZetaField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZetaField::Zero => write!(f, "Zero"),
            ZetaField::Solved => write!(f, "Solved"),
            ZetaField::OneForm(_) => write!(f, "OneForm"),
            ZetaField::Gradient { scale, .. } => write!(f, "Gradient {{ scale: {scale} }}"),
        }
    }
}

/// `zeta` and its first derivatives at a point, in frame components.
#[derive(Debug, Clone, Serialize)]
pub struct ZetaJet {
    pub zeta: Vec<f64>,
    /// `nabla_zeta[(a, b)] = (nabla_{e_a} zeta)(e_b)`.
    #[serde(skip)]
    pub nabla_zeta: DMatrix<f64>,
    /// `d zeta (e_a, e_b)`.
    #[serde(skip)]
    pub d_zeta: DMatrix<f64>,
}

impl ZetaJet {
    pub fn d_zeta_norm(&self) -> f64 {
        self.d_zeta.norm()
    }
}

fn solved_coordinate_zeta(m: &ChartMetric, x: &[f64], tol: &AnalysisTolerances) -> Result<Vec<f64>, GeometryError> {
    let b = curvature_bundle_with(
        m,
        x,
        &BundleOptions {
            level: BundleLevel::Cotton,
            rotation: None,
        },
    )?;
    let sol = solve_zeta_with(&b.weyl, b.cotton()?, tol.weyl_zero, tol.cspace_residual)?;
    Ok(b.covector_to_coordinates(&sol.zeta))
}

/// Coordinate components of `zeta` at `x`.
pub fn zeta_coordinates(
    field: &ZetaField,
    m: &ChartMetric,
    x: &[f64],
    tol: &AnalysisTolerances,
) -> Result<Vec<f64>, GeometryError> {
    let n = m.dim();
    match field {
        ZetaField::Zero => Ok(vec![0.0; n]),
        ZetaField::Solved => solved_coordinate_zeta(m, x, tol),
        ZetaField::OneForm(f) => Ok(f.eval(x)),
        ZetaField::Gradient { potential, scale } => {
            if let Some(j) = potential.eval_jet(&Jet::variables(&jet_space(n, 1), x)) {
                Ok((0..n).map(|i| scale * j.derivative(i).value()).collect())
            } else {
                let h = 1e-4;
                Ok((0..n)
                    .map(|i| {
                        let mut p = x.to_vec();
                        let mut q = x.to_vec();
                        p[i] += h;
                        q[i] -= h;
                        scale * (potential.eval(&p) - potential.eval(&q)) / (2.0 * h)
                    })
                    .collect())
            }
        }
    }
}

/// Coordinate derivatives `dz[(j, i)] = d_j zeta_i`.
fn zeta_coordinate_derivatives(
    field: &ZetaField,
    m: &ChartMetric,
    x: &[f64],
    tol: &AnalysisTolerances,
) -> Result<DMatrix<f64>, GeometryError> {
    let n = m.dim();
    match field {
        ZetaField::Zero => Ok(DMatrix::zeros(n, n)),
        ZetaField::Gradient { potential, scale } => {
            if let Some(j) = potential.eval_jet(&Jet::variables(&jet_space(n, 2), x)) {
                return Ok(DMatrix::from_fn(n, n, |a, b| scale * j.derivative(a).derivative(b).value()));
            }
            richardson_jacobian(|p| zeta_coordinates(field, m, p, tol), x, 1e-3)
        }
        ZetaField::OneForm(_) => richardson_jacobian(|p| zeta_coordinates(field, m, p, tol), x, 1e-3),
        ZetaField::Solved => richardson_jacobian(|p| zeta_coordinates(field, m, p, tol), x, tol.zeta_step),
    }
}

/// Central differences at `h` and `h/2`, one Richardson level; `out[(j, i)] = d_j f_i`.
fn richardson_jacobian(
    mut f: impl FnMut(&[f64]) -> Result<Vec<f64>, GeometryError>,
    x: &[f64],
    h: f64,
) -> Result<DMatrix<f64>, GeometryError> {
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut diff = |step: f64| -> Result<Vec<f64>, GeometryError> {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[j] += step;
            q[j] -= step;
            let (fp, fq) = (f(&p)?, f(&q)?);
            Ok(fp.iter().zip(&fq).map(|(a, b)| (a - b) / (2.0 * step)).collect())
        };
        let coarse = diff(h)?;
        let fine = diff(0.5 * h)?;
        for i in 0..n {
            out[(j, i)] = (4.0 * fine[i] - coarse[i]) / 3.0;
        }
    }
    Ok(out)
}

/// `zeta`, `nabla zeta` and `d zeta` at `x` in the frame of `bundle`.
pub fn zeta_jet(
    field: &ZetaField,
    m: &ChartMetric,
    bundle: &CurvatureBundle,
    tol: &AnalysisTolerances,
) -> Result<ZetaJet, GeometryError> {
    let x = &bundle.point;
    let n = m.dim();
    let zc = zeta_coordinates(field, m, x, tol)?;
    let dz = zeta_coordinate_derivatives(field, m, x, tol)?;
    let gamma = &bundle.christoffel;
    // (nabla_j zeta)_i = d_j zeta_i - G^k_{ji} zeta_k
    let cov = DMatrix::from_fn(n, n, |j, i| dz[(j, i)] - (0..n).map(|k| gamma.get(k, j, i) * zc[k]).sum::<f64>());
    let e = &bundle.frame;
    let nabla = e.transpose() * &cov * e;
    let d = &nabla - nabla.transpose();
    Ok(ZetaJet {
        zeta: bundle.covector_to_frame(&zc),
        nabla_zeta: nabla,
        d_zeta: d,
    })
}

fn bundle_at(m: &ChartMetric, x: &[f64], level: BundleLevel) -> Result<CurvatureBundle, GeometryError> {
    curvature_bundle_with(m, x, &BundleOptions { level, rotation: None })
}

/// `h_zeta = h - nabla zeta + zeta (x) zeta` as an endomorphism
/// (bilinear form `h_zeta(X, Y)` with `nabla zeta (X, Y) = (nabla_X zeta)(Y)`).
pub fn h_zeta_from(bundle: &CurvatureBundle, zj: &ZetaJet) -> Endo {
    let n = bundle.dim();
    let h = bundle.h.matrix();
    let beta = DMatrix::from_fn(n, n, |a, b| h[(a, b)] - zj.nabla_zeta[(a, b)] + zj.zeta[a] * zj.zeta[b]);
    Endo::from_bilinear(&beta)
}

pub fn h_zeta(m: &ChartMetric, field: &ZetaField, x: &[f64], tol: &AnalysisTolerances) -> Result<Endo, GeometryError> {
    let b = bundle_at(m, x, BundleLevel::Cotton)?;
    let zj = zeta_jet(field, m, &b, tol)?;
    Ok(h_zeta_from(&b, &zj))
}

/// `|residual_deg1(W, h_zeta)|`: membership of `h_zeta` in `E_W`.
pub fn check_gnl(m: &ChartMetric, field: &ZetaField, x: &[f64], tol: &AnalysisTolerances) -> Result<f64, GeometryError> {
    let b = bundle_at(m, x, BundleLevel::Cotton)?;
    let zj = zeta_jet(field, m, &b, tol)?;
    Ok(residual_deg1(&b.weyl, &h_zeta_from(&b, &zj)).norm())
}

/// Einstein-Weyl residual.
#[derive(Debug, Clone, Serialize)]
pub struct EWResidual {
    /// Minimiser `f = tr(h - nabla zeta + zeta (x) zeta) / n`.
    pub best_f: f64,
    /// Trace-free symmetric part of `h - nabla zeta + zeta (x) zeta + d zeta / 2 - f g`.
    pub residual_sym: f64,
    pub dzeta_norm: f64,
}

pub fn einstein_weyl_from(bundle: &CurvatureBundle, zj: &ZetaJet) -> EWResidual {
    let n = bundle.dim();
    let h = bundle.h.matrix();
    let t = DMatrix::from_fn(n, n, |a, b| {
        h[(a, b)] - zj.nabla_zeta[(a, b)] + zj.zeta[a] * zj.zeta[b] + 0.5 * zj.d_zeta[(a, b)]
    });
    let sym = (&t + t.transpose()) * 0.5;
    let best_f = sym.trace() / n as f64;
    let tf = sym - DMatrix::identity(n, n) * best_f;
    EWResidual {
        best_f,
        residual_sym: tf.norm(),
        dzeta_norm: zj.d_zeta_norm(),
    }
}

pub fn einstein_weyl_residual(
    m: &ChartMetric,
    field: &ZetaField,
    x: &[f64],
    tol: &AnalysisTolerances,
) -> Result<EWResidual, GeometryError> {
    let b = bundle_at(m, x, BundleLevel::Cotton)?;
    let zj = zeta_jet(field, m, &b, tol)?;
    Ok(einstein_weyl_from(&b, &zj))
}

/// The Bach-flat C-space signature at a point.
#[derive(Debug, Clone, Serialize)]
pub struct BachReport {
    pub bach_norm: f64,
    /// `|W(h_zeta)|`.
    pub extension_norm: f64,
    /// `|residual_deg1(W, h_zeta)|`.
    pub deg1_residual: f64,
    pub dzeta_norm: f64,
    pub weyl_norm: f64,
    /// `W` vanishes here, so the remaining entries carry no information.
    pub conformally_flat: bool,
}

pub fn bach_consequence_check(
    m: &ChartMetric,
    field: &ZetaField,
    x: &[f64],
    tol: &AnalysisTolerances,
) -> Result<BachReport, GeometryError> {
    let b = bundle_at(m, x, BundleLevel::Full)?;
    let zj = zeta_jet(field, m, &b, tol)?;
    let hz = h_zeta_from(&b, &zj);
    Ok(BachReport {
        bach_norm: b.bach()?.matrix().norm(),
        extension_norm: extend(&b.weyl, &hz).norm(),
        deg1_residual: residual_deg1(&b.weyl, &hz).norm(),
        dzeta_norm: zj.d_zeta_norm(),
        weyl_norm: b.weyl.norm(),
        conformally_flat: b.weyl.norm() <= tol.weyl_zero,
    })
}

/// Divergence identity for the Cotton tensor on C-space data.
#[derive(Debug, Clone, Serialize)]
pub struct DivCReport {
    /// `|delta-hat C + W(nabla zeta - (n-3) zeta (x) zeta)|`, the form the
    /// identity takes under this crate's slot contract.
    pub residual: f64,
    /// `|delta-hat C + W(nabla zeta + (n-3) zeta (x) zeta)|`. This form holds when
    /// `zeta` and `C` both carry the opposite sign; kept for comparison.
    pub residual_flipped_convention: f64,
    /// Norm of the skew part of `delta-hat C`.
    pub skew_norm: f64,
    pub divergence_norm: f64,
    /// C-space residual at the point; the identity is only meaningful when small.
    pub cspace_residual: f64,
}

pub fn divc_identity_check(
    m: &ChartMetric,
    field: &ZetaField,
    x: &[f64],
    tol: &AnalysisTolerances,
) -> Result<DivCReport, GeometryError> {
    let b = bundle_at(m, x, BundleLevel::Full)?;
    let zj = zeta_jet(field, m, &b, tol)?;
    let c = b.cotton()?;
    let cres = (&weyl_contract(&b.weyl, &zj.zeta) + c).norm();
    if cres > tol.cspace_residual * (1.0 + c.norm()) {
        return Err(GeometryError::Precondition(format!(
            "divergence identity needs C-space data (residual {cres:.2e})"
        )));
    }
    let n = b.dim();
    let div = b.cotton_divergence()?;
    let q = (n as f64) - 3.0;
    let side = |sign: f64| {
        let t = DMatrix::from_fn(n, n, |a, bb| zj.nabla_zeta[(a, bb)] + sign * q * zj.zeta[a] * zj.zeta[bb]);
        extend(&b.weyl, &Endo::from_bilinear(&t)).to_bilinear()
    };
    Ok(DivCReport {
        residual: (&div + side(-1.0)).norm(),
        residual_flipped_convention: (&div + side(1.0)).norm(),
        skew_norm: ((&div - div.transpose()) * 0.5).norm(),
        divergence_norm: div.norm(),
        cspace_residual: cres,
    })
}

/// Overall classification of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    /// `W = 0` and `C = 0`.
    ConformallyFlat,
    /// `W = 0` but `C != 0`; no `zeta` exists.
    WeylZeroCottonNonzero,
    /// Solved with `zeta = 0`.
    CottonSpace,
    /// Solved with `zeta != 0`.
    ConformalCSpace,
    NotCSpace,
}

/// Everything the analyzer reports about one point.
#[derive(Debug, Clone, Serialize)]
pub struct PointDiagnostics {
    pub point: Vec<f64>,
    pub weyl_norm: f64,
    pub weyl_plus_norm: Option<f64>,
    pub weyl_minus_norm: Option<f64>,
    pub cotton_norm: f64,
    pub bach_norm: f64,
    pub classification: PointClass,
    pub status: CSpaceStatus,
    pub zeta: Vec<f64>,
    pub cspace_residual: f64,
    pub obstruction_norm: Option<f64>,
    /// Obstruction and direct solve agree on solvability.
    pub detectors_agree: bool,
    pub dzeta_norm: Option<f64>,
    pub einstein_weyl: Option<EWResidual>,
    /// `W != 0` and `|d zeta| > probe_tol` at a C-space point.
    pub anomaly: bool,
    /// Identity residuals of the curvature computation at the point.
    pub checks: BundleChecks,
    pub fd_error: f64,
    pub warnings: Vec<String>,
}

pub fn classify_point(m: &ChartMetric, x: &[f64], tol: &AnalysisTolerances) -> Result<PointDiagnostics, GeometryError> {
    let b = bundle_at(m, x, BundleLevel::Full)?;
    let c = b.cotton()?;
    let sol = solve_zeta_with(&b.weyl, c, tol.weyl_zero, tol.cspace_residual)?;
    let n = b.dim();
    let (wp, wm) = if n == 4 {
        let (p, mm) = split_weyl(&b.weyl)?;
        (Some(p.norm()), Some(mm.norm()))
    } else {
        (None, None)
    };
    let weyl_norm = b.weyl.norm();
    let cotton_norm = c.norm();
    let mut warnings = b.warnings.clone();
    if sol.ill_conditioned {
        warnings.push(format!("|W| = {weyl_norm:.2e} is small; zeta is ill-conditioned"));
    }
    let status = match sol.status {
        CSpaceStatus::WeylZeroCottonZero | CSpaceStatus::WeylZeroCottonNonzero => {
            if cotton_norm <= tol.cotton_zero {
                CSpaceStatus::WeylZeroCottonZero
            } else {
                CSpaceStatus::WeylZeroCottonNonzero
            }
        }
        s => s,
    };
    let zeta_norm = sol.zeta.iter().map(|z| z * z).sum::<f64>().sqrt();
    let classification = match status {
        CSpaceStatus::WeylZeroCottonZero => PointClass::ConformallyFlat,
        CSpaceStatus::WeylZeroCottonNonzero => PointClass::WeylZeroCottonNonzero,
        CSpaceStatus::Obstructed => PointClass::NotCSpace,
        CSpaceStatus::Solved if zeta_norm <= tol.zeta_zero => PointClass::CottonSpace,
        CSpaceStatus::Solved => PointClass::ConformalCSpace,
    };
    let (obstruction_norm, detectors_agree) = if n == 4 && weyl_norm > tol.weyl_zero {
        let o = obstruction(&b.weyl, c)?.norm();
        let vanishes = o <= weyl_norm.powi(2) * tol.cspace_residual * (1.0 + cotton_norm);
        (Some(o), vanishes == (status == CSpaceStatus::Solved))
    } else {
        (None, true)
    };
    let (dzeta_norm, einstein_weyl, anomaly) = if status == CSpaceStatus::Solved {
        match zeta_jet(&ZetaField::Solved, m, &b, tol) {
            Ok(zj) => {
                let ew = einstein_weyl_from(&b, &zj);
                let dz = zj.d_zeta_norm();
                (Some(dz), Some(ew), weyl_norm > tol.weyl_zero && dz > tol.probe_tol)
            }
            Err(e) => {
                warnings.push(format!("zeta could not be differentiated: {e}"));
                (None, None, false)
            }
        }
    } else {
        (None, None, false)
    };
    Ok(PointDiagnostics {
        point: x.to_vec(),
        weyl_norm,
        weyl_plus_norm: wp,
        weyl_minus_norm: wm,
        cotton_norm,
        bach_norm: b.bach()?.matrix().norm(),
        classification,
        status,
        zeta: sol.zeta,
        cspace_residual: sol.residual,
        obstruction_norm,
        detectors_agree,
        dzeta_norm,
        einstein_weyl,
        anomaly,
        checks: b.checks.clone(),
        fd_error: b.fd_error,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_weyl, seeded};
    use rand::Rng;

    fn random_cotton(n: usize, rng: &mut crate::random::SeededRng) -> Tensor3 {
        let mut c = Tensor3::from_fn(n, |_, _, _| rng.gen_range(-1.0..1.0));
        // antisymmetric in the last pair, like a Cotton tensor
        c = Tensor3::from_fn(n, |a, b, d| 0.5 * (c.get(a, b, d) - c.get(a, d, b)));
        c
    }

    #[test]
    fn constructed_instance_recovers_the_covector() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            let w = random_weyl(4, &mut rng);
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = weyl_contract(&w, &v).scale(-1.0);
            let sol = solve_zeta(&w, &c).unwrap();
            assert_eq!(sol.status, CSpaceStatus::Solved);
            for (a, b) in sol.zeta.iter().zip(&v) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!(obstruction(&w, &c).unwrap().norm() < 1e-9 * w.norm().powi(2) * (1.0 + c.norm()));
        }
    }

    #[test]
    fn cotton_space_gives_zero_zeta() {
        let w = random_weyl(4, &mut seeded(3));
        let sol = solve_zeta(&w, &Tensor3::zeros(4)).unwrap();
        assert_eq!(sol.status, CSpaceStatus::Solved);
        assert!(sol.zeta.iter().all(|z| *z == 0.0));
    }

    #[test]
    fn generic_cotton_is_obstructed() {
        let mut rng = seeded(5);
        let w = random_weyl(4, &mut rng);
        let c = random_cotton(4, &mut rng);
        let sol = solve_zeta(&w, &c).unwrap();
        assert_eq!(sol.status, CSpaceStatus::Obstructed);
        let o = obstruction(&w, &c).unwrap().norm();
        assert!((o - w.norm().powi(2) * sol.residual).abs() < 1e-9 * o);
    }

    #[test]
    fn vanishing_weyl_branches_on_cotton() {
        let w = AlgWeyl::zero(4);
        let c = random_cotton(4, &mut seeded(1));
        assert_eq!(solve_zeta(&w, &c).unwrap().status, CSpaceStatus::WeylZeroCottonNonzero);
        assert_eq!(
            solve_zeta(&w, &Tensor3::zeros(4)).unwrap().status,
            CSpaceStatus::WeylZeroCottonZero
        );
    }

    #[test]
    fn least_squares_path_in_five_dimensions() {
        let mut rng = seeded(8);
        let w = random_weyl(5, &mut rng);
        let v: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = weyl_contract(&w, &v).scale(-1.0);
        let sol = solve_zeta(&w, &c).unwrap();
        assert_eq!(sol.status, CSpaceStatus::Solved);
        for (a, b) in sol.zeta.iter().zip(&v) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let w = random_weyl(4, &mut seeded(2));
        assert!(solve_zeta(&w, &Tensor3::zeros(5)).is_err());
    }
}
