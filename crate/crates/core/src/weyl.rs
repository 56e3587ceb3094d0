//! Algebraic Weyl tensors in dimension `n >= 4`: projection onto the Weyl
//! space, the extension `W : (x)^2 V -> (x)^2 V`, the residual operators
//! cutting out `E_W` and `g_W`, and kernel solvers for them.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::TensorError;
use crate::linalg::{self, DEFAULT_RANK_CUT};
use crate::tensor::{
    bianchi_map, kulkarni_nomizu, proj_skew, proj_sym, ricci_contraction, CurvatureTensor, Endo, Inner,
    SymBilinear, Tensor4, TwoForm,
};

/// Absolute tolerance (relative to `max(1, |W|)`) for the defining identities.
pub const WEYL_TOL: f64 = 1e-12;

/// An algebraic Weyl tensor: pair antisymmetric, pair-swap symmetric,
/// satisfying the first Bianchi identity and trace-free.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgWeyl(Tensor4);

/// Largest defect among the four defining identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylDefects {
    pub antisymmetry: f64,
    pub pair_swap: f64,
    pub bianchi: f64,
    pub trace: f64,
}

impl WeylDefects {
    pub fn of(t: &Tensor4) -> Self {
        Self {
            antisymmetry: t.pair_antisymmetry_defect(),
            pair_swap: t.pair_swap_defect(),
            bianchi: bianchi_map(t).max_abs(),
            trace: ricci_contraction(t).matrix().abs().max(),
        }
    }

    pub fn max(&self) -> f64 {
        self.antisymmetry.max(self.pair_swap).max(self.bianchi).max(self.trace)
    }
}

impl AlgWeyl {
    /// Checks the Weyl identities to `WEYL_TOL * max(1, max|T|)`.
    pub fn new(t: Tensor4) -> Result<Self, TensorError> {
        Self::with_tolerance(t, WEYL_TOL)
    }

    pub fn with_tolerance(t: Tensor4, rel_tol: f64) -> Result<Self, TensorError> {
        let d = WeylDefects::of(&t);
        let tol = rel_tol * t.max_abs().max(1.0);
        if d.max() > tol {
            return Err(TensorError::NotWeyl {
                bianchi: d.bianchi.max(d.antisymmetry).max(d.pair_swap),
                trace: d.trace,
            });
        }
        Ok(Self(t))
    }

    pub(crate) fn new_unchecked(t: Tensor4) -> Self {
        Self(t)
    }

    pub fn zero(n: usize) -> Self {
        Self(Tensor4::zeros(n))
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor4 {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.0.get(a, b, c, d)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn change_frame(&self, frame: &DMatrix<f64>) -> Self {
        Self(self.0.change_frame(frame))
    }
}

/// Result of [`project_to_weyl`]. `vanishing_dimension` is set for `n < 4`,
/// where the Weyl space is zero.
#[derive(Debug, Clone)]
pub struct WeylProjection {
    pub weyl: AlgWeyl,
    pub vanishing_dimension: bool,
}

/// Orthogonal projection of an arbitrary rank-4 array onto the Weyl space:
/// pair symmetrisation, removal of the totally antisymmetric part, then
/// subtraction of `h . g` built from the Ricci contraction.
pub fn project_to_weyl(t: &Tensor4) -> WeylProjection {
    let n = t.dim();
    if n < 4 {
        return WeylProjection {
            weyl: AlgWeyl::zero(n),
            vanishing_dimension: true,
        };
    }
    let anti = Tensor4::from_fn(n, |a, b, c, d| {
        0.25 * (t.get(a, b, c, d) - t.get(b, a, c, d) - t.get(a, b, d, c) + t.get(b, a, d, c))
    });
    let sym = Tensor4::from_fn(n, |a, b, c, d| 0.5 * (anti.get(a, b, c, d) + anti.get(c, d, a, b)));
    let b1 = bianchi_map(&sym);
    let curv = &sym - &b1.scale(1.0 / 3.0);
    let h = reduced_ricci(&curv);
    let g = SymBilinear::identity(n);
    let weyl = &curv - &kulkarni_nomizu(&h, &g).expect("same dimension");
    WeylProjection {
        weyl: AlgWeyl(weyl),
        vanishing_dimension: false,
    }
}

/// `h = (Ric - s/(2(n-1)) g) / (n-2)` for an algebraic curvature tensor.
pub fn reduced_ricci(r: &CurvatureTensor) -> SymBilinear {
    let n = r.dim() as f64;
    let ric = ricci_contraction(r);
    let s = ric.trace();
    let g = SymBilinear::identity(r.dim());
    ric.sub(&g.scale(s / (2.0 * (n - 1.0)))).scale(1.0 / (n - 2.0))
}

/// Extension `W(h) = sum_i W(e_i, ., h e_i, .)`, returned as an endomorphism.
pub fn extend(w: &AlgWeyl, h: &Endo) -> Endo {
    extend_raw(w.tensor(), h)
}

pub(crate) fn extend_raw(w: &Tensor4, h: &Endo) -> Endo {
    let n = w.dim();
    let hm = h.matrix();
    // bilinear form beta(a, b) = sum_{i,c} W(i, a, c, b) h[c, i]
    let mut beta = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for c in 0..n {
                    let hc = hm[(c, i)];
                    if hc != 0.0 {
                        acc += w.get(i, a, c, b) * hc;
                    }
                }
            }
            beta[(a, b)] = acc;
        }
    }
    Endo::from_bilinear(&beta)
}

/// Independent route for 2-forms: `W(alpha)(x, y) = 1/2 sum_i W(e_i, F e_i, x, y)`.
pub fn extend_two_form(w: &AlgWeyl, f: &TwoForm) -> TwoForm {
    let n = w.dim();
    let fm = f.matrix();
    let beta = DMatrix::from_fn(n, n, |x, y| {
        let mut acc = 0.0;
        for i in 0..n {
            for c in 0..n {
                acc += fm[(c, i)] * w.get(i, c, x, y);
            }
        }
        0.5 * acc
    });
    TwoForm::from_matrix(&beta.transpose())
}

/// `T(x, y, z, u)` with `h` inserted in one slot, e.g. slot 2 gives `W(x, y, h z, u)`.
fn insert_in_slot(w: &Tensor4, h: &Endo, slot: usize) -> Tensor4 {
    let n = w.dim();
    let hm = h.matrix();
    Tensor4::from_fn(n, |a, b, c, d| {
        let mut idx = [a, b, c, d];
        let orig = idx[slot];
        let mut acc = 0.0;
        for k in 0..n {
            let coeff = hm[(k, orig)];
            if coeff != 0.0 {
                idx[slot] = k;
                acc += coeff * w.get(idx[0], idx[1], idx[2], idx[3]);
            }
        }
        acc
    })
}

/// `W(x,y,hz,u) + W(y,z,hx,u) + W(z,x,hy,u)`; vanishes iff `h` lies in `E_W`.
pub fn residual_deg1(w: &AlgWeyl, h: &Endo) -> Tensor4 {
    bianchi_map(&insert_in_slot(w.tensor(), h, 2))
}

fn deg11_tensor(w: &AlgWeyl, h: &Endo) -> Tensor4 {
    let t = w.tensor();
    let lhs = &insert_in_slot(t, h, 0) + &insert_in_slot(t, h, 1);
    let rhs = &insert_in_slot(t, h, 2) + &insert_in_slot(t, h, 3);
    &lhs - &rhs
}

fn lie_tensor(w: &AlgWeyl, h: &Endo) -> Tensor4 {
    let t = w.tensor();
    let mut acc = insert_in_slot(t, h, 0);
    for slot in 1..4 {
        acc += &insert_in_slot(t, h, slot);
    }
    acc
}

/// Norm of `W(hx,y,z,u)+W(x,hy,z,u)-W(x,y,hz,u)-W(x,y,z,hu)`.
pub fn residual_deg11(w: &AlgWeyl, h: &Endo) -> f64 {
    deg11_tensor(w, h).norm()
}

/// Norm of the derivation action of `h` on `W`; vanishes iff `h` lies in `g_W`.
pub fn residual_lie(w: &AlgWeyl, h: &Endo) -> f64 {
    lie_tensor(w, h).norm()
}

fn form_basis(n: usize) -> Vec<Endo> {
    TwoForm::standard_basis(n).iter().map(TwoForm::to_endo).collect()
}

fn sym_basis(n: usize) -> Vec<Endo> {
    SymBilinear::orthonormal_basis(n).iter().map(SymBilinear::to_endo).collect()
}

fn degplus_one(w: &AlgWeyl, h: &Endo, f: &Endo) -> Endo {
    let hs = h.adjoint();
    let wf = extend(w, f);
    &extend(w, &(&(h * f) - &(f * &hs))) - &(&(&wf * h) - &(&hs * &wf))
}

fn degminus_one(w: &AlgWeyl, h: &Endo, f: &Endo) -> Endo {
    let hs = h.adjoint();
    let wf = extend(w, f);
    &extend(w, &(&(h * f) + &(f * &hs))) - &(&(&wf * h) + &(&hs * &wf))
}

fn mainalg_one(w: &AlgWeyl, h: &Endo, f: &Endo) -> Endo {
    &(&extend(w, f) * h) - &extend(w, &(h * f))
}

/// `W(hF + F h*) + W(F) h + h* W(F)`, the 2-form reformulation of `g_W`.
fn lie_forms_one(w: &AlgWeyl, h: &Endo, f: &Endo) -> Endo {
    let hs = h.adjoint();
    let wf = extend(w, f);
    &extend(w, &(&(h * f) + &(f * &hs))) + &(&(&wf * h) + &(&hs * &wf))
}

fn max_over(basis: &[Endo], mut f: impl FnMut(&Endo) -> Endo) -> f64 {
    basis.iter().map(|b| f(b).norm()).fold(0.0, f64::max)
}

/// Max over `F` in the basis of `Lambda^2` of `|W(hF - Fh*) - (W(F)h - h*W(F))|`.
pub fn residual_degplus(w: &AlgWeyl, h: &Endo) -> f64 {
    max_over(&form_basis(w.dim()), |f| degplus_one(w, h, f))
}

/// Max over `F` in the basis of `Lambda^2` of `|W(hF + Fh*) - (W(F)h + h*W(F))|`.
pub fn residual_degminus(w: &AlgWeyl, h: &Endo) -> f64 {
    max_over(&form_basis(w.dim()), |f| degminus_one(w, h, f))
}

/// Max over `F` in the basis of `Lambda^2` of `|W(F)h - W(hF)|`.
pub fn residual_mainalg(w: &AlgWeyl, h: &Endo) -> f64 {
    max_over(&form_basis(w.dim()), |f| mainalg_one(w, h, f))
}

/// Same as [`residual_degplus`] with `F` ranging over a basis of `S^2`.
pub fn residual_degplus_sym(w: &AlgWeyl, h: &Endo) -> f64 {
    max_over(&sym_basis(w.dim()), |s| degplus_one(w, h, s))
}

/// Max over `F` in the basis of `Lambda^2` of `|W(hF + Fh*) + W(F)h + h*W(F)|`.
pub fn residual_lie_forms(w: &AlgWeyl, h: &Endo) -> f64 {
    max_over(&form_basis(w.dim()), |f| lie_forms_one(w, h, f))
}

/// The linear residual operators on `End(V)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ResidualKind {
    Deg1,
    Deg11,
    DegPlus,
    DegMinus,
    MainAlg,
    Lie,
    DegPlusSym,
    LieForms,
}

impl ResidualKind {
    pub const ALL: [ResidualKind; 8] = [
        ResidualKind::Deg1,
        ResidualKind::Deg11,
        ResidualKind::DegPlus,
        ResidualKind::DegMinus,
        ResidualKind::MainAlg,
        ResidualKind::Lie,
        ResidualKind::DegPlusSym,
        ResidualKind::LieForms,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ResidualKind::Deg1 => "deg1",
            ResidualKind::Deg11 => "deg11",
            ResidualKind::DegPlus => "deg+",
            ResidualKind::DegMinus => "deg-",
            ResidualKind::MainAlg => "mainalg",
            ResidualKind::Lie => "lie",
            ResidualKind::DegPlusSym => "deg+sym",
            ResidualKind::LieForms => "lie-forms",
        }
    }
}

impl fmt::Display for ResidualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn stack(out: &mut Vec<f64>, e: &Endo) {
    out.extend(e.matrix().iter().copied());
}

/// All components of a residual, stacked into one vector (linear in `h`).
pub fn residual_vector(w: &AlgWeyl, kind: ResidualKind, h: &Endo) -> Vec<f64> {
    let n = w.dim();
    let mut out = Vec::new();
    match kind {
        ResidualKind::Deg1 => out.extend_from_slice(residual_deg1(w, h).data()),
        ResidualKind::Deg11 => out.extend_from_slice(deg11_tensor(w, h).data()),
        ResidualKind::Lie => out.extend_from_slice(lie_tensor(w, h).data()),
        ResidualKind::DegPlus => form_basis(n).iter().for_each(|f| stack(&mut out, &degplus_one(w, h, f))),
        ResidualKind::DegMinus => form_basis(n).iter().for_each(|f| stack(&mut out, &degminus_one(w, h, f))),
        ResidualKind::MainAlg => form_basis(n).iter().for_each(|f| stack(&mut out, &mainalg_one(w, h, f))),
        ResidualKind::DegPlusSym => sym_basis(n).iter().for_each(|s| stack(&mut out, &degplus_one(w, h, s))),
        ResidualKind::LieForms => form_basis(n).iter().for_each(|f| stack(&mut out, &lie_forms_one(w, h, f))),
    }
    out
}

/// Domain restriction for kernel computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Domain {
    /// All of `End(V)`.
    Full,
    /// Symmetric endomorphisms `S^2`.
    Sym,
    /// Skew endomorphisms `Lambda^2`.
    Skew,
    /// Trace-free symmetric endomorphisms `S^2_0`.
    TraceFreeSym,
}

impl Domain {
    /// An orthonormal basis of the domain.
    pub fn basis(&self, n: usize) -> Vec<Endo> {
        match self {
            Domain::Full => {
                let mut out = Vec::with_capacity(n * n);
                for a in 0..n {
                    for b in 0..n {
                        out.push(Endo::unit(n, a, b));
                    }
                }
                out
            }
            Domain::Sym => sym_basis(n),
            Domain::Skew => TwoForm::orthonormal_basis(n).iter().map(TwoForm::to_endo).collect(),
            Domain::TraceFreeSym => {
                // off-diagonal unit elements plus an orthonormalised set of diagonal trace-free ones
                let mut out: Vec<Endo> = sym_basis(n)
                    .into_iter()
                    .filter(|e| e.matrix().diagonal().iter().all(|x| *x == 0.0))
                    .collect();
                for k in 1..n {
                    let norm = ((k * (k + 1)) as f64).sqrt();
                    let m = DMatrix::from_fn(n, n, |a, b| {
                        if a != b {
                            0.0
                        } else if a < k {
                            1.0 / norm
                        } else if a == k {
                            -(k as f64) / norm
                        } else {
                            0.0
                        }
                    });
                    out.push(Endo::from_matrix(m));
                }
                out
            }
        }
    }
}

/// Matrix of a residual operator restricted to `domain`, columns indexed by
/// the domain's orthonormal basis.
pub fn residual_operator(w: &AlgWeyl, kind: ResidualKind, domain: Domain) -> (DMatrix<f64>, Vec<Endo>) {
    let basis = domain.basis(w.dim());
    let cols: Vec<DVector<f64>> = basis
        .iter()
        .map(|b| DVector::from_vec(residual_vector(w, kind, b)))
        .collect();
    (DMatrix::from_columns(&cols), basis)
}

/// Orthonormal basis of the kernel of a stack of residual operators on a domain.
pub fn kernel_basis(w: &AlgWeyl, kinds: &[ResidualKind], domain: Domain, rank_cut: f64) -> Vec<Endo> {
    let basis = domain.basis(w.dim());
    let mut blocks: Vec<DMatrix<f64>> = Vec::new();
    for kind in kinds {
        let cols: Vec<DVector<f64>> = basis
            .iter()
            .map(|b| DVector::from_vec(residual_vector(w, *kind, b)))
            .collect();
        let m = DMatrix::from_columns(&cols);
        // equalise block scales so one operator does not swamp the rank cut
        let s = m.abs().max();
        blocks.push(if s > 0.0 { m / s } else { m });
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut op = DMatrix::zeros(rows, basis.len());
    let mut r = 0;
    for b in &blocks {
        op.view_mut((r, 0), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
    }
    let ker = linalg::null_space(&op, rank_cut);
    combine(&basis, &ker)
}

fn combine(basis: &[Endo], coeffs: &DMatrix<f64>) -> Vec<Endo> {
    let n = basis.first().map(Endo::dim).unwrap_or(0);
    (0..coeffs.ncols())
        .map(|j| {
            let mut m = DMatrix::zeros(n, n);
            for (i, b) in basis.iter().enumerate() {
                m += b.matrix() * coeffs[(i, j)];
            }
            Endo::from_matrix(m)
        })
        .collect()
}

/// Which symmetry space to solve for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SpaceTag {
    /// `E_W`: solutions of the cyclic residual on all of `End(V)`.
    EW,
    /// `S_W = E_W` intersected with `S^2`.
    SW,
    /// `A_W = E_W` intersected with `Lambda^2`.
    AW,
    /// `g_W`: the Lie algebra of the symmetry group of `W`.
    GW,
}

/// Orthonormal basis of one of the symmetry spaces.
#[derive(Debug, Clone)]
pub struct SymmetrySpaceBasis {
    pub tag: SpaceTag,
    pub basis: Vec<Endo>,
}

impl SymmetrySpaceBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Coefficient matrix with one column per basis element (in `E_ab` coordinates).
    pub fn as_matrix(&self, n: usize) -> DMatrix<f64> {
        endos_to_matrix(&self.basis, n)
    }
}

pub fn endos_to_matrix(basis: &[Endo], n: usize) -> DMatrix<f64> {
    if basis.is_empty() {
        return DMatrix::zeros(n * n, 0);
    }
    let cols: Vec<DVector<f64>> = basis.iter().map(Endo::to_vector).collect();
    DMatrix::from_columns(&cols)
}

/// Solve for a symmetry space with the default rank cut.
pub fn solve_space(w: &AlgWeyl, tag: SpaceTag) -> SymmetrySpaceBasis {
    solve_space_with_cut(w, tag, DEFAULT_RANK_CUT)
}

pub fn solve_space_with_cut(w: &AlgWeyl, tag: SpaceTag, rank_cut: f64) -> SymmetrySpaceBasis {
    let (kind, domain) = match tag {
        SpaceTag::EW => (ResidualKind::Deg1, Domain::Full),
        SpaceTag::SW => (ResidualKind::Deg1, Domain::Sym),
        SpaceTag::AW => (ResidualKind::Deg1, Domain::Skew),
        SpaceTag::GW => (ResidualKind::Lie, Domain::Full),
    };
    SymmetrySpaceBasis {
        tag,
        basis: kernel_basis(w, &[kind], domain, rank_cut),
    }
}

/// Kernel of `extend(W, .)` restricted to `Lambda^2` or `S^2`.
pub fn extension_kernel(w: &AlgWeyl, domain: Domain, rank_cut: f64) -> Vec<Endo> {
    let basis = domain.basis(w.dim());
    let cols: Vec<DVector<f64>> = basis.iter().map(|b| extend(w, b).to_vector()).collect();
    let ker = linalg::null_space(&DMatrix::from_columns(&cols), rank_cut);
    combine(&basis, &ker)
}

/// Residuals of the closure properties for a pair in `E_W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureResidual {
    pub residual: f64,
    /// Largest deg1 residual of the inputs; nonzero means the precondition failed.
    pub precondition: f64,
    pub tolerance: f64,
}

impl ClosureResidual {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }

    pub fn precondition_violated(&self) -> bool {
        self.precondition > self.tolerance
    }
}

fn closure_tolerance(w: &AlgWeyl, h1: &Endo, h2: &Endo) -> f64 {
    1e-8 * (1.0 + w.norm()) * (1.0 + h1.norm() * h2.norm())
}

/// `residual_lie(W, [h1, h2])`: brackets of `E_W` land in `g_W`.
pub fn check_bracket_closure(w: &AlgWeyl, h1: &Endo, h2: &Endo) -> ClosureResidual {
    ClosureResidual {
        residual: residual_lie(w, &h1.commutator(h2)),
        precondition: residual_deg1(w, h1).norm().max(residual_deg1(w, h2).norm()),
        tolerance: closure_tolerance(w, h1, h2),
    }
}

/// `residual_deg1(W, {h1, h2})`: `E_W` is closed under anticommutators.
pub fn check_anticommutator_closure(w: &AlgWeyl, h1: &Endo, h2: &Endo) -> ClosureResidual {
    ClosureResidual {
        residual: residual_deg1(w, &h1.anticommutator(h2)).norm(),
        precondition: residual_deg1(w, h1).norm().max(residual_deg1(w, h2).norm()),
        tolerance: closure_tolerance(w, h1, h2),
    }
}

/// Max over basis 2-forms of `|W(h F h*) - h* W(F) h|`.
pub fn check_conjugation(w: &AlgWeyl, h: &Endo) -> f64 {
    let hs = h.adjoint();
    max_over(&form_basis(w.dim()), |f| {
        &extend(w, &(&(h * f) * &hs)) - &(&(&hs * &extend(w, f)) * h)
    })
}

/// Max over `x,y,z,u` of `|W(hx,hy,z,u) - W(x,y,hz,hu)|`.
pub fn check_conjugation_components(w: &AlgWeyl, h: &Endo) -> f64 {
    let t = w.tensor();
    let left = insert_in_slot(&insert_in_slot(t, h, 0), h, 1);
    let right = insert_in_slot(&insert_in_slot(t, h, 2), h, 3);
    (&left - &right).max_abs()
}

/// Kernel inclusions `pi^- E_W in Ker(W|Lambda^2)` and `pi^+ g_W in Ker(W|S^2)`.
#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub dim_e_w: usize,
    pub dim_g_w: usize,
    pub dim_ker_lambda2: usize,
    pub dim_ker_s2: usize,
    /// max over `h` in `E_W` of `|W(pi^- h)|`.
    pub max_skew_residual: f64,
    /// max over `h` in `g_W` of `|W(pi^+ h)|`.
    pub max_sym_residual: f64,
    pub tolerance: f64,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.max_skew_residual <= self.tolerance && self.max_sym_residual <= self.tolerance
    }
}

pub fn check_kernel_obstructions(w: &AlgWeyl) -> KernelReport {
    let e_w = solve_space(w, SpaceTag::EW);
    let g_w = solve_space(w, SpaceTag::GW);
    let skew = e_w
        .basis
        .iter()
        .map(|h| extend(w, &proj_skew(h).to_endo()).norm())
        .fold(0.0, f64::max);
    let sym = g_w
        .basis
        .iter()
        .map(|h| extend(w, &proj_sym(h).to_endo()).norm())
        .fold(0.0, f64::max);
    KernelReport {
        dim_e_w: e_w.dimension(),
        dim_g_w: g_w.dimension(),
        dim_ker_lambda2: extension_kernel(w, Domain::Skew, DEFAULT_RANK_CUT).len(),
        dim_ker_s2: extension_kernel(w, Domain::Sym, DEFAULT_RANK_CUT).len(),
        max_skew_residual: skew,
        max_sym_residual: sym,
        tolerance: 1e-9 * (1.0 + w.norm()),
    }
}
