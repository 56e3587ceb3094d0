//! Four-dimensional structure: Hodge star, the splitting `W = W+ + W-`,
//! eigenforms and quaternion triples, the sigma basis of `S^2_0`, and the
//! identities special to `n = 4`.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::error::TensorError;
use crate::linalg::{self, DEFAULT_RANK_CUT};
use crate::random::{random_rotation, SeededRng};
use crate::tensor::{Endo, Inner, Tensor4, TwoForm};
use crate::weyl::{
    endos_to_matrix, extend, extension_kernel, kernel_basis, project_to_weyl, residual_deg1, solve_space, AlgWeyl,
    Domain, ResidualKind, SpaceTag,
};

fn require_four(n: usize) -> Result<(), TensorError> {
    if n == 4 {
        Ok(())
    } else {
        Err(TensorError::WrongDimension { required: 4, found: n })
    }
}

/// Sign of the permutation `(a, b, c, d)` of `(0, 1, 2, 3)`, zero on repeats.
pub fn levi_civita(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let p = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
        }
    }
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn form_from_components(alpha: &DMatrix<f64>) -> TwoForm {
    TwoForm::from_matrix(&alpha.transpose())
}

fn components(f: &TwoForm) -> DMatrix<f64> {
    f.matrix().transpose()
}

/// Hodge star for the orientation `e1 ^ e2 ^ e3 ^ e4`.
pub fn hodge_star(f: &TwoForm) -> Result<TwoForm, TensorError> {
    require_four(f.dim())?;
    let alpha = components(f);
    let star = DMatrix::from_fn(4, 4, |c, d| {
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                acc += levi_civita(a, b, c, d) * alpha[(a, b)];
            }
        }
        0.5 * acc
    });
    Ok(form_from_components(&star))
}

/// `(F ^ G)(e1, e2, e3, e4)` computed from components.
pub fn wedge_pairing(f: &TwoForm, g: &TwoForm) -> f64 {
    let (a, b) = (components(f), components(g));
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    acc += levi_civita(i, j, k, l) * a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    acc / 4.0
}

pub fn self_dual_part(f: &TwoForm) -> Result<TwoForm, TensorError> {
    Ok(f.add(&hodge_star(f)?).scale(0.5))
}

pub fn anti_self_dual_part(f: &TwoForm) -> Result<TwoForm, TensorError> {
    Ok(f.sub(&hodge_star(f)?).scale(0.5))
}

/// Orthogonal bases of `Lambda+` and `Lambda-` with form-norm 2, each ordered
/// so that `J3 = J1 J2`.
#[derive(Debug, Clone)]
pub struct SDBasis {
    pub plus: [TwoForm; 3],
    pub minus: [TwoForm; 3],
}

impl SDBasis {
    pub fn standard() -> Self {
        let w = |a, b| TwoForm::wedge(4, a, b);
        let plus = quaternion_ordered([w(0, 1).add(&w(2, 3)), w(0, 2).sub(&w(1, 3)), w(0, 3).add(&w(1, 2))]);
        let minus = quaternion_ordered([w(0, 1).sub(&w(2, 3)), w(0, 2).add(&w(1, 3)), w(0, 3).sub(&w(1, 2))]);
        Self { plus, minus }
    }
}

fn quaternion_ordered(mut f: [TwoForm; 3]) -> [TwoForm; 3] {
    let prod = &f[0].to_endo() * &f[1].to_endo();
    if prod.inner(&f[2].to_endo()) < 0.0 {
        f[2] = f[2].scale(-1.0);
    }
    f
}

/// Apply `P = (1 + s *)/2` to the pair of slots starting at `first` (0 or 2).
fn project_pair(t: &Tensor4, first: usize, sign: f64) -> Tensor4 {
    Tensor4::from_fn(4, |a, b, c, d| {
        let idx = [a, b, c, d];
        let (p, q) = (idx[first], idx[first + 1]);
        let mut star = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let e = levi_civita(i, j, p, q);
                if e != 0.0 {
                    let mut k = idx;
                    k[first] = i;
                    k[first + 1] = j;
                    star += e * t.get(k[0], k[1], k[2], k[3]);
                }
            }
        }
        0.5 * (t.get(a, b, c, d) + sign * 0.5 * star)
    })
}

/// Self-dual and anti-self-dual parts `(W+, W-)`.
pub fn split_weyl(w: &AlgWeyl) -> Result<(AlgWeyl, AlgWeyl), TensorError> {
    require_four(w.dim())?;
    let t = w.tensor();
    let plus = project_pair(&project_pair(t, 0, 1.0), 2, 1.0);
    let minus = project_pair(&project_pair(t, 0, -1.0), 2, -1.0);
    Ok((AlgWeyl::new(plus)?, AlgWeyl::new(minus)?))
}

/// Spectral data of `W+` and `W-`: eigenvalues, eigenforms and their complex structures.
#[derive(Debug, Clone)]
pub struct WeylSpectrum {
    pub lambda_plus: [f64; 3],
    pub lambda_minus: [f64; 3],
    pub omega_plus: [TwoForm; 3],
    pub omega_minus: [TwoForm; 3],
    pub j_plus: [Endo; 3],
    pub j_minus: [Endo; 3],
}

impl WeylSpectrum {
    fn from_forms(lambda_plus: [f64; 3], lambda_minus: [f64; 3], plus: [TwoForm; 3], minus: [TwoForm; 3]) -> Self {
        let j_plus = plus.clone().map(|f| f.to_endo());
        let j_minus = minus.clone().map(|f| f.to_endo());
        Self {
            lambda_plus,
            lambda_minus,
            omega_plus: plus,
            omega_minus: minus,
            j_plus,
            j_minus,
        }
    }

    /// Largest defect among the structural invariants of a spectrum of `w`.
    pub fn defects(&self, w: &AlgWeyl) -> f64 {
        let id = Endo::identity(4);
        let mut worst: f64 = self.lambda_plus.iter().sum::<f64>().abs();
        worst = worst.max(self.lambda_minus.iter().sum::<f64>().abs());
        for (lambdas, omegas) in [(&self.lambda_plus, &self.omega_plus), (&self.lambda_minus, &self.omega_minus)] {
            for k in 0..3 {
                let image = extend(w, &omegas[k].to_endo());
                worst = worst.max((&image - &omegas[k].to_endo().scale(lambdas[k])).norm());
            }
        }
        for js in [&self.j_plus, &self.j_minus] {
            for j in js.iter() {
                worst = worst.max((&(j * j) + &id).max_abs());
                worst = worst.max((&(&j.adjoint() * j) - &id).max_abs());
            }
            worst = worst.max(js[0].anticommutator(&js[1]).max_abs());
            worst = worst.max((&js[2] - &(&js[0] * &js[1])).max_abs());
        }
        for jp in &self.j_plus {
            for jm in &self.j_minus {
                worst = worst.max(jp.commutator(jm).max_abs());
            }
        }
        worst
    }
}

/// `sigma[i][j] = J_i+ J_j-`.
#[derive(Debug, Clone)]
pub struct SigmaBasis {
    pub sigma: [[Endo; 3]; 3],
}

impl SigmaBasis {
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Endo)> {
        (0..3).flat_map(move |i| (0..3).map(move |j| (i, j, &self.sigma[i][j])))
    }

    /// Largest defect among: symmetric, involutive, trace-free, norm 2, pairwise orthogonal.
    pub fn defects(&self) -> f64 {
        let id = Endo::identity(4);
        let mut worst: f64 = 0.0;
        for (i, j, s) in self.iter() {
            worst = worst.max((s - &s.adjoint()).max_abs());
            worst = worst.max((&(s * s) - &id).max_abs());
            worst = worst.max(s.trace().abs());
            worst = worst.max((s.norm() - 2.0).abs());
            for (k, l, t) in self.iter() {
                if (i, j) != (k, l) {
                    worst = worst.max(s.inner(t).abs());
                }
            }
        }
        worst
    }
}

pub fn sigma_basis(s: &WeylSpectrum) -> SigmaBasis {
    let sigma = std::array::from_fn(|i| std::array::from_fn(|j| &s.j_plus[i] * &s.j_minus[j]));
    SigmaBasis { sigma }
}

/// Frame in which the standard quaternion triples are placed.
#[derive(Debug, Clone)]
pub enum FrameChoice {
    Standard,
    /// Columns are the images of the standard basis; must lie in `SO(4)`.
    Rotation(DMatrix<f64>),
}

fn check_triple(l: &[f64; 3]) -> Result<(), TensorError> {
    let scale = 1.0 + l.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if l.iter().sum::<f64>().abs() > 1e-12 * scale {
        return Err(TensorError::NonZeroSumSpectrum(*l));
    }
    Ok(())
}

/// `W = 1/2 sum_k (lambda_k+ w_k+ (x) w_k+ + lambda_k- w_k- (x) w_k-)`.
pub fn build_weyl_from_spectra(
    lambda_plus: [f64; 3],
    lambda_minus: [f64; 3],
    frame: &FrameChoice,
) -> Result<(AlgWeyl, WeylSpectrum, SigmaBasis), TensorError> {
    check_triple(&lambda_plus)?;
    check_triple(&lambda_minus)?;
    let base = SDBasis::standard();
    let (plus, minus) = match frame {
        FrameChoice::Standard => (base.plus, base.minus),
        FrameChoice::Rotation(q) => {
            if q.nrows() != 4 || q.ncols() != 4 {
                return Err(TensorError::DimensionMismatch {
                    expected: 4,
                    found: q.nrows(),
                });
            }
            let orth = (q.transpose() * q - DMatrix::identity(4, 4)).abs().max();
            if orth > 1e-10 || q.determinant() < 0.0 {
                return Err(TensorError::NotRotation);
            }
            let rot = |f: &TwoForm| TwoForm::from_matrix(&(q * f.matrix() * q.transpose()));
            (base.plus.each_ref().map(rot), base.minus.each_ref().map(rot))
        }
    };
    let comps: Vec<(f64, DMatrix<f64>)> = lambda_plus
        .iter()
        .zip(plus.iter())
        .chain(lambda_minus.iter().zip(minus.iter()))
        .map(|(l, f)| (*l, components(f)))
        .collect();
    let t = Tensor4::from_fn(4, |a, b, c, d| {
        comps.iter().map(|(l, f)| 0.5 * l * f[(a, b)] * f[(c, d)]).sum()
    });
    let w = AlgWeyl::new(t)?;
    let spec = WeylSpectrum::from_forms(lambda_plus, lambda_minus, plus, minus);
    let sigma = sigma_basis(&spec);
    Ok((w, spec, sigma))
}

fn half_spectrum(w: &AlgWeyl, basis: &[TwoForm; 3]) -> ([f64; 3], [TwoForm; 3]) {
    let m = Matrix3::from_fn(|k, l| 0.25 * extend(w, &basis[k].to_endo()).inner(&basis[l].to_endo()));
    let m = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|a, b| eig.eigenvalues[*b].partial_cmp(&eig.eigenvalues[*a]).unwrap());
    let lambdas = order.map(|i| eig.eigenvalues[i]);
    let forms = order.map(|i| {
        let mut v = DVector::from_iterator(3, eig.eigenvectors.column(i).iter().copied());
        linalg::canonical_sign(&mut v);
        basis[0].scale(v[0]).add(&basis[1].scale(v[1])).add(&basis[2].scale(v[2]))
    });
    (lambdas, quaternion_ordered(forms))
}

/// Eigen-decomposition of `W+` and `W-`, eigenvalues sorted in decreasing order.
pub fn spectrum(w: &AlgWeyl) -> Result<WeylSpectrum, TensorError> {
    require_four(w.dim())?;
    let base = SDBasis::standard();
    let (lp, fp) = half_spectrum(w, &base.plus);
    let (lm, fm) = half_spectrum(w, &base.minus);
    Ok(WeylSpectrum::from_forms(lp, lm, fp, fm))
}

/// `max_ij |W(sigma_ij) - (lambda_i+ + lambda_j-) sigma_ij|`.
pub fn check_eigsym(w: &AlgWeyl, s: &WeylSpectrum, sigma: &SigmaBasis) -> f64 {
    sigma
        .iter()
        .map(|(i, j, x)| (&extend(w, x) - &x.scale(s.lambda_plus[i] + s.lambda_minus[j])).norm())
        .fold(0.0, f64::max)
}

/// Largest deviation of `{h, J_k+-}` from `Lambda-+`, for symmetric trace-free `h`.
pub fn check_shift(h: &Endo, s: &WeylSpectrum) -> Result<f64, TensorError> {
    require_four(h.dim())?;
    let mut worst: f64 = 0.0;
    for (js, sign) in [(&s.j_plus, 1.0), (&s.j_minus, -1.0)] {
        for j in js.iter() {
            let a = TwoForm::from_matrix(h.anticommutator(j).matrix());
            // the anticommutator should be an eigenform of the star with the opposite sign
            let star = hodge_star(&a)?;
            worst = worst.max(a.add(&star.scale(sign)).matrix().abs().max());
        }
    }
    Ok(worst)
}

/// Residuals of `W{F,G} = {W(F),G}_0 + {F,W(G)}_0` and `-W[F,G] = [W(F),G] + [F,W(G)]`.
pub fn check_supersym(w: &AlgWeyl, f: &TwoForm, g: &TwoForm) -> (f64, f64) {
    let (fe, ge) = (f.to_endo(), g.to_endo());
    let (wf, wg) = (extend(w, &fe), extend(w, &ge));
    let anti = &extend(w, &fe.anticommutator(&ge))
        - &(&wf.anticommutator(&ge).trace_free() + &fe.anticommutator(&wg).trace_free());
    let comm = &(-&extend(w, &fe.commutator(&ge))) - &(&wf.commutator(&ge) + &fe.commutator(&wg));
    (anti.norm(), comm.norm())
}

/// Max of both supersymmetry residuals over all pairs of standard basis forms.
pub fn supersym_grid_residual(w: &AlgWeyl) -> (f64, f64) {
    let basis = TwoForm::standard_basis(w.dim());
    let mut worst = (0.0_f64, 0.0_f64);
    for f in &basis {
        for g in &basis {
            let (a, c) = check_supersym(w, f, g);
            worst = (worst.0.max(a), worst.1.max(c));
        }
    }
    worst
}

/// Findings of a randomized search for failures of the supersymmetry identities.
#[derive(Debug, Clone, Serialize)]
pub struct SupersymSearch {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    /// Largest relative residuals `r / (1 + |W|)` over the basis grid.
    pub max_anti: f64,
    pub max_comm: f64,
    /// Samples whose relative residual exceeds `1e-8`.
    pub failures: usize,
}

pub fn supersym_search(dim: usize, samples: usize, seed: u64) -> SupersymSearch {
    let mut rng = crate::random::seeded(seed);
    let mut out = SupersymSearch {
        dim,
        samples,
        seed,
        max_anti: 0.0,
        max_comm: 0.0,
        failures: 0,
    };
    for _ in 0..samples {
        let w = crate::random::random_weyl(dim, &mut rng);
        let (a, c) = supersym_grid_residual(&w);
        let scale = 1.0 + w.norm();
        out.max_anti = out.max_anti.max(a / scale);
        out.max_comm = out.max_comm.max(c / scale);
        if a.max(c) > 1e-8 * scale {
            out.failures += 1;
        }
    }
    out
}

/// `E_W` assembled as `S_W (+) A_W`, with `A_W = Ker(W on Lambda^2)`.
#[derive(Debug, Clone)]
pub struct EwSplit {
    pub s_w: Vec<Endo>,
    pub a_w: Vec<Endo>,
}

impl EwSplit {
    pub fn basis(&self) -> Vec<Endo> {
        self.s_w.iter().chain(self.a_w.iter()).cloned().collect()
    }

    pub fn dimension(&self) -> usize {
        self.s_w.len() + self.a_w.len()
    }

    /// Largest principal-angle sine against an independently solved `E_W`.
    pub fn distance_to_solved(&self, w: &AlgWeyl) -> f64 {
        let direct = solve_space(w, SpaceTag::EW);
        linalg::subspace_distance(&endos_to_matrix(&self.basis(), 4), &direct.as_matrix(4))
    }
}

pub fn ew_split_4d(w: &AlgWeyl) -> Result<EwSplit, TensorError> {
    require_four(w.dim())?;
    Ok(EwSplit {
        s_w: solve_space(w, SpaceTag::SW).basis,
        a_w: extension_kernel(w, Domain::Skew, DEFAULT_RANK_CUT),
    })
}

/// Trace-free symmetric endomorphisms admitted by the cyclic equation.
pub fn admissible_trace_free(w: &AlgWeyl) -> Vec<Endo> {
    kernel_basis(w, &[ResidualKind::Deg1], Domain::TraceFreeSym, DEFAULT_RANK_CUT)
}

/// Diagnostics for a trace-free symmetric `h` in `S_W`.
#[derive(Debug, Clone, Serialize)]
pub struct SymkerReport {
    pub h_norm: f64,
    pub lambda_plus: [f64; 3],
    pub lambda_minus: [f64; 3],
    pub kernel_dim_plus: usize,
    pub kernel_dim_minus: usize,
    pub w_plus_zero: bool,
    pub w_minus_zero: bool,
    pub deg1_residual: f64,
    pub extension_residual: f64,
    pub trace: f64,
    pub precondition_violated: bool,
    pub passed: bool,
}

pub fn symker_report(w: &AlgWeyl, h: &Endo, tol: f64) -> Result<SymkerReport, TensorError> {
    require_four(w.dim())?;
    let s = spectrum(w)?;
    let scale = 1.0 + w.norm();
    let zero_eig = |l: &[f64; 3]| l.iter().filter(|x| x.abs() <= tol * scale).count();
    let w_plus_zero = s.lambda_plus.iter().all(|x| x.abs() <= tol * scale);
    let w_minus_zero = s.lambda_minus.iter().all(|x| x.abs() <= tol * scale);
    let deg1 = residual_deg1(w, h).norm();
    let ext = extend(w, h).norm();
    let asym = (h - &h.adjoint()).max_abs();
    let precondition_violated = deg1 > tol * scale * (1.0 + h.norm())
        || ext > tol * scale * (1.0 + h.norm())
        || h.trace().abs() > tol
        || asym > tol;
    let (kp, km) = (zero_eig(&s.lambda_plus), zero_eig(&s.lambda_minus));
    let nontrivial = h.norm() > tol;
    let passed = !nontrivial || ((w_plus_zero || kp == 1) && (w_minus_zero || km == 1));
    Ok(SymkerReport {
        h_norm: h.norm(),
        lambda_plus: s.lambda_plus,
        lambda_minus: s.lambda_minus,
        kernel_dim_plus: kp,
        kernel_dim_minus: km,
        w_plus_zero,
        w_minus_zero,
        deg1_residual: deg1,
        extension_residual: ext,
        trace: h.trace(),
        precondition_violated,
        passed: passed && !precondition_violated,
    })
}

/// Gram matrix `<W_X, W_Y>` over the standard frame.
pub fn slot_gram(w: &AlgWeyl) -> DMatrix<f64> {
    let n = w.dim();
    let slices: Vec<_> = (0..n).map(|a| w.tensor().slice_first(a)).collect();
    DMatrix::from_fn(n, n, |a, b| slices[a].inner(&slices[b]))
}

/// The constant in `<W_X, W_Y> = c |W|^2 <X, Y>`.
pub const FOUR_ID_CONSTANT: f64 = 0.25;

/// `max_XY |<W_X, W_Y> - |W|^2/4 delta_XY|`.
pub fn check_4id(w: &AlgWeyl) -> Result<f64, TensorError> {
    require_four(w.dim())?;
    let gram = slot_gram(w);
    let target = FOUR_ID_CONSTANT * w.norm().powi(2);
    Ok((gram - DMatrix::identity(4, 4) * target).abs().max())
}

/// Ratio `<W_X, W_X> / |W|^2` over the frame, used to validate the constant.
pub fn four_id_ratios(w: &AlgWeyl) -> Vec<f64> {
    let gram = slot_gram(w);
    let total = w.norm().powi(2);
    (0..w.dim()).map(|a| gram[(a, a)] / total).collect()
}

/// Singular values of `X -> W_X`, descending.
pub fn slot_map_singular_values(w: &AlgWeyl) -> Vec<f64> {
    let n = w.dim();
    let cols: Vec<DVector<f64>> = (0..n)
        .map(|a| DVector::from_column_slice(w.tensor().slice_first(a).data()))
        .collect();
    linalg::singular_values(&DMatrix::from_columns(&cols))
}

/// Degeneracy patterns for generated spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumPattern {
    /// Distinct eigenvalues with all sums `lambda_i+ + lambda_j-` bounded away from zero.
    Generic,
    /// `(0, l, -l)` and `(0, m, -m)` with `l != +-m`.
    OneZeroPair,
    /// `(0, l, -l)` and `(0, -l, l)`.
    MatchedZeroPair,
    /// `(l, l, -2l)` on both sides.
    DoubleEigenvalue,
    /// `W+ = 0` and `W-` invertible.
    PlusVanishing,
    /// `W- = 0` and `W+` invertible.
    MinusVanishing,
    Zero,
}

impl SpectrumPattern {
    pub const ALL: [SpectrumPattern; 7] = [
        SpectrumPattern::Generic,
        SpectrumPattern::OneZeroPair,
        SpectrumPattern::MatchedZeroPair,
        SpectrumPattern::DoubleEigenvalue,
        SpectrumPattern::PlusVanishing,
        SpectrumPattern::MinusVanishing,
        SpectrumPattern::Zero,
    ];
}

fn separated(vals: &[f64], gap: f64) -> bool {
    vals.iter().all(|x| x.abs() > gap)
}

fn generic_triple(rng: &mut SeededRng) -> [f64; 3] {
    loop {
        let a: f64 = rng.gen_range(-1.0..=1.0);
        let b: f64 = rng.gen_range(-1.0..=1.0);
        let l = [a, b, -a - b];
        if separated(&[l[0], l[1], l[2], l[0] - l[1], l[0] - l[2], l[1] - l[2]], 0.1) {
            return l;
        }
    }
}

fn nonzero(rng: &mut SeededRng) -> f64 {
    let x: f64 = rng.gen_range(0.2..=1.0);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Random eigenvalue triples following `pattern`.
pub fn random_spectra(pattern: SpectrumPattern, rng: &mut SeededRng) -> ([f64; 3], [f64; 3]) {
    match pattern {
        SpectrumPattern::Generic => loop {
            let (p, m) = (generic_triple(rng), generic_triple(rng));
            let sums: Vec<f64> = p.iter().flat_map(|x| m.iter().map(move |y| x + y)).collect();
            if separated(&sums, 0.1) {
                return (p, m);
            }
        },
        SpectrumPattern::OneZeroPair => loop {
            let (l, m) = (nonzero(rng), nonzero(rng));
            if (l.abs() - m.abs()).abs() > 0.1 {
                return ([0.0, l, -l], [0.0, m, -m]);
            }
        },
        SpectrumPattern::MatchedZeroPair => {
            let l = nonzero(rng);
            ([0.0, l, -l], [0.0, -l, l])
        }
        SpectrumPattern::DoubleEigenvalue => {
            let (l, m) = (nonzero(rng), nonzero(rng));
            ([l, l, -2.0 * l], [m, m, -2.0 * m])
        }
        SpectrumPattern::PlusVanishing => ([0.0; 3], generic_triple(rng)),
        SpectrumPattern::MinusVanishing => (generic_triple(rng), [0.0; 3]),
        SpectrumPattern::Zero => ([0.0; 3], [0.0; 3]),
    }
}

/// A spectrally built Weyl tensor in a random oriented frame.
pub fn random_spectral_weyl(pattern: SpectrumPattern, rng: &mut SeededRng) -> (AlgWeyl, WeylSpectrum, SigmaBasis) {
    let (p, m) = random_spectra(pattern, rng);
    let frame = FrameChoice::Rotation(random_rotation(4, rng));
    build_weyl_from_spectra(p, m, &frame).expect("generated spectra sum to zero")
}

/// The orthogonal complement of the spectral construction: any 4D Weyl
/// tensor obtained by projecting a random array.
pub fn random_projected_weyl(rng: &mut SeededRng) -> AlgWeyl {
    project_to_weyl(&crate::random::random_tensor4(4, rng)).weyl
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    #[test]
    fn star_of_basic_forms() {
        let e = |a, b| TwoForm::wedge(4, a, b);
        assert_eq!(hodge_star(&e(0, 1)).unwrap(), e(2, 3));
        assert_eq!(hodge_star(&e(0, 2)).unwrap(), e(3, 1));
        let sd = e(0, 1).add(&e(2, 3));
        assert_eq!(hodge_star(&sd).unwrap(), sd);
        assert!(matches!(
            hodge_star(&TwoForm::zeros(5)),
            Err(TensorError::WrongDimension { required: 4, found: 5 })
        ));
    }

    #[test]
    fn star_squares_to_identity_and_matches_wedge_pairing() {
        let basis = TwoForm::standard_basis(4);
        for f in &basis {
            let ss = hodge_star(&hodge_star(f).unwrap()).unwrap();
            assert_eq!(&ss, f);
            for g in &basis {
                // F ^ G = <F, *G>_forms vol, with the form inner product half the Frobenius one
                let lhs = wedge_pairing(f, g);
                let rhs = 0.5 * f.inner(&hodge_star(g).unwrap());
                assert!((lhs - rhs).abs() < 1e-15, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn standard_sd_basis_invariants() {
        let b = SDBasis::standard();
        for (forms, sign) in [(&b.plus, 1.0), (&b.minus, -1.0)] {
            for (k, f) in forms.iter().enumerate() {
                assert_eq!(hodge_star(f).unwrap(), f.scale(sign));
                assert!((f.norm() - 2.0).abs() < 1e-15);
                for g in forms.iter().skip(k + 1) {
                    assert_eq!(f.inner(g), 0.0);
                }
            }
        }
        for f in &b.plus {
            for g in &b.minus {
                assert_eq!(f.inner(g), 0.0);
            }
        }
    }

    #[test]
    fn exact_spectrum_round_trip() {
        let (w, s, sigma) = build_weyl_from_spectra([1.0, 0.0, -1.0], [2.0, -1.0, -1.0], &FrameChoice::Standard).unwrap();
        assert_eq!(s.defects(&w), 0.0);
        assert_eq!(sigma.defects(), 0.0);
        assert_eq!(check_eigsym(&w, &s, &sigma), 0.0);
        let e = &extend(&w, &sigma.sigma[0][0]) - &sigma.sigma[0][0].scale(3.0);
        assert_eq!(e.max_abs(), 0.0);
        let back = spectrum(&w).unwrap();
        assert_eq!(back.lambda_plus, [1.0, 0.0, -1.0]);
        let lm = back.lambda_minus;
        assert!((lm[0] - 2.0).abs() < 1e-14 && (lm[1] + 1.0).abs() < 1e-14 && (lm[2] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_zero_sum_rejected() {
        let r = build_weyl_from_spectra([1.0, 0.0, 0.0], [0.0; 3], &FrameChoice::Standard);
        assert!(matches!(r, Err(TensorError::NonZeroSumSpectrum(_))));
        let reflect = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]));
        let r = build_weyl_from_spectra([0.0; 3], [0.0; 3], &FrameChoice::Rotation(reflect));
        assert!(matches!(r, Err(TensorError::NotRotation)));
    }

    #[test]
    fn split_parts_are_orthogonal() {
        let mut rng = seeded(21);
        let w = random_projected_weyl(&mut rng);
        let (p, m) = split_weyl(&w).unwrap();
        assert!(p.tensor().inner(m.tensor()).abs() < 1e-12);
        assert!((&(p.tensor() + m.tensor()) - w.tensor()).max_abs() < 1e-14);
        let (pp, pm) = split_weyl(&p).unwrap();
        assert!((pp.tensor() - p.tensor()).max_abs() < 1e-14);
        assert!(pm.tensor().max_abs() < 1e-14);
    }

    #[test]
    fn four_id_constant_is_a_quarter() {
        let mut rng = seeded(22);
        for _ in 0..20 {
            let w = random_projected_weyl(&mut rng);
            for r in four_id_ratios(&w) {
                assert!((r - 0.25).abs() < 1e-12);
            }
            assert!(check_4id(&w).unwrap() < 1e-10);
        }
    }

    #[test]
    fn zero_spectrum_gives_zero_tensor() {
        let (w, _, _) = build_weyl_from_spectra([0.0; 3], [0.0; 3], &FrameChoice::Standard).unwrap();
        assert_eq!(w.norm(), 0.0);
        let s = spectrum(&w).unwrap();
        assert_eq!(s.lambda_plus, [0.0; 3]);
        assert_eq!(check_4id(&w).unwrap(), 0.0);
    }
}
