//! Dense multilinear algebra on a Euclidean vector space.
//!
//! Conventions used throughout the crate:
//!
//! * Vectors are expressed in a fixed orthonormal frame `e_0 .. e_{n-1}`.
//! * An [`Endo`] stores the matrix of an endomorphism, `(h v)_a = sum_b h[(a, b)] v_b`.
//!   The associated bilinear form is `beta(x, y) = g(h x, y)`, so the matrix of
//!   `beta` is the transpose of the matrix of `h`.
//! * A [`TwoForm`] is stored through its skew endomorphism `F` with
//!   `alpha = g(F ., .)`.
//! * Rank-2 inner products use the trace convention `<A, B> = sum_i <A e_i, B e_i>`,
//!   i.e. the Frobenius product of matrices. Rank-3 and rank-4 arrays use the
//!   plain component sum. With these choices a Kähler form has norm 2.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::TensorError;

pub const MIN_DIM: usize = 3;
pub const MAX_DIM: usize = 8;

/// The model space `(R^n, g)` with its standard orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EuclideanSpace {
    dim: usize,
}

impl EuclideanSpace {
    pub fn new(dim: usize) -> Result<Self, TensorError> {
        if !(MIN_DIM..=MAX_DIM).contains(&dim) {
            return Err(TensorError::UnsupportedDimension(dim));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The metric `g` as a symmetric bilinear form.
    pub fn metric(&self) -> SymBilinear {
        SymBilinear::identity(self.dim)
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }
}

/// Rank-2 tensors: inner product with the trace convention.
pub trait Inner {
    fn dim(&self) -> usize;

    /// Inner product. Panics on dimension mismatch; see [`checked_inner`].
    fn inner(&self, other: &Self) -> f64;

    fn norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }
}

/// Inner product that reports dimension mismatch instead of panicking.
pub fn checked_inner<T: Inner>(a: &T, b: &T) -> Result<f64, TensorError> {
    if a.dim() != b.dim() {
        return Err(TensorError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.inner(b))
}

fn frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "inner product of tensors of different shape");
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// An element of `End(V) = (x)^2 V`.
#[derive(Clone, PartialEq)]
pub struct Endo(DMatrix<f64>);

impl fmt::Debug for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endo{}", self.0)
    }
}

impl Endo {
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "endomorphism matrix must be square");
        Self(m)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        Self(DMatrix::from_fn(n, n, f))
    }

    /// Endomorphism associated with the bilinear form `beta` via `beta = g(h ., .)`.
    pub fn from_bilinear(beta: &DMatrix<f64>) -> Self {
        Self(beta.transpose())
    }

    /// Bilinear form `beta(x, y) = g(h x, y)` as a matrix `beta[(x, y)]`.
    pub fn to_bilinear(&self) -> DMatrix<f64> {
        self.0.transpose()
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// Elementary matrix `E_ab` (sends `e_b` to `e_a`).
    pub fn unit(n: usize, a: usize, b: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(a, b)] = 1.0;
        Self(m)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.0 * v
    }

    /// Adjoint with respect to `g`.
    pub fn adjoint(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// Trace-free part `h - tr(h)/n Id`.
    pub fn trace_free(&self) -> Self {
        let n = self.dim();
        let t = self.trace() / n as f64;
        Self(&self.0 - DMatrix::identity(n, n) * t)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Coefficient vector in the basis `E_ab`, row-major.
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n * n, |k, _| self.0[(k / n, k % n)])
    }

    pub fn from_vector(n: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), n * n);
        Self(DMatrix::from_fn(n, n, |a, b| v[a * n + b]))
    }
}

impl Inner for Endo {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn inner(&self, other: &Self) -> f64 {
        frobenius(&self.0, &other.0)
    }
}

impl Add for &Endo {
    type Output = Endo;
    fn add(self, rhs: &Endo) -> Endo {
        Endo(&self.0 + &rhs.0)
    }
}

impl Add for Endo {
    type Output = Endo;
    fn add(self, rhs: Endo) -> Endo {
        Endo(self.0 + rhs.0)
    }
}

impl Sub for &Endo {
    type Output = Endo;
    fn sub(self, rhs: &Endo) -> Endo {
        Endo(&self.0 - &rhs.0)
    }
}

impl Sub for Endo {
    type Output = Endo;
    fn sub(self, rhs: Endo) -> Endo {
        Endo(self.0 - rhs.0)
    }
}

/// Composition `self . rhs`.
impl Mul for &Endo {
    type Output = Endo;
    fn mul(self, rhs: &Endo) -> Endo {
        Endo(&self.0 * &rhs.0)
    }
}

impl Mul for Endo {
    type Output = Endo;
    fn mul(self, rhs: Endo) -> Endo {
        Endo(self.0 * rhs.0)
    }
}

impl Mul<f64> for &Endo {
    type Output = Endo;
    fn mul(self, rhs: f64) -> Endo {
        Endo(&self.0 * rhs)
    }
}

impl Neg for &Endo {
    type Output = Endo;
    fn neg(self) -> Endo {
        Endo(-&self.0)
    }
}

/// A 2-form, stored as its skew endomorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm(DMatrix<f64>);

impl TwoForm {
    /// Skew part of `m`; exact when `m` is already skew.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self((m - m.transpose()) * 0.5)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// The form `e_a ^ e_b` (so `alpha(e_a, e_b) = 1`). Its endomorphism sends
    /// `e_a` to `e_b` and `e_b` to `-e_a`.
    pub fn wedge(n: usize, a: usize, b: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        if a != b {
            m[(b, a)] = 1.0;
            m[(a, b)] = -1.0;
        }
        Self(m)
    }

    /// Form components `alpha(e_a, e_b)`.
    pub fn form_component(&self, a: usize, b: usize) -> f64 {
        self.0[(b, a)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn to_endo(&self) -> Endo {
        Endo(self.0.clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    /// Orthonormal basis `{e_a ^ e_b / sqrt 2 : a < b}` of `Lambda^2`.
    pub fn orthonormal_basis(n: usize) -> Vec<TwoForm> {
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                out.push(Self::wedge(n, a, b).scale(std::f64::consts::FRAC_1_SQRT_2));
            }
        }
        out
    }

    /// The standard basis `{e_a ^ e_b : a < b}`.
    pub fn standard_basis(n: usize) -> Vec<TwoForm> {
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                out.push(Self::wedge(n, a, b));
            }
        }
        out
    }
}

impl Inner for TwoForm {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn inner(&self, other: &Self) -> f64 {
        frobenius(&self.0, &other.0)
    }
}

/// A symmetric bilinear form (equivalently a self-adjoint endomorphism).
#[derive(Debug, Clone, PartialEq)]
pub struct SymBilinear(DMatrix<f64>);

impl SymBilinear {
    /// Symmetric part of `m`; exact when `m` is already symmetric.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self((m + m.transpose()) * 0.5)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.0[(a, b)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn to_endo(&self) -> Endo {
        Endo(self.0.clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn trace_free(&self) -> Self {
        let n = self.dim();
        let t = self.trace() / n as f64;
        Self(&self.0 - DMatrix::identity(n, n) * t)
    }

    /// Orthonormal basis of `S^2` in the trace inner product.
    pub fn orthonormal_basis(n: usize) -> Vec<SymBilinear> {
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in a..n {
                let mut m = DMatrix::zeros(n, n);
                if a == b {
                    m[(a, a)] = 1.0;
                } else {
                    m[(a, b)] = std::f64::consts::FRAC_1_SQRT_2;
                    m[(b, a)] = std::f64::consts::FRAC_1_SQRT_2;
                }
                out.push(Self(m));
            }
        }
        out
    }
}

impl Inner for SymBilinear {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn inner(&self, other: &Self) -> f64 {
        frobenius(&self.0, &other.0)
    }
}

/// Orthogonal projection of `(x)^2 V` onto `S^2`.
pub fn proj_sym(h: &Endo) -> SymBilinear {
    SymBilinear::from_matrix(h.matrix())
}

/// Orthogonal projection of `(x)^2 V` onto `Lambda^2`.
pub fn proj_skew(h: &Endo) -> TwoForm {
    TwoForm::from_matrix(h.matrix())
}

/// Dense rank-4 array `T(a, b, c, d)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

/// Elements of `Lambda^2 (x) Lambda^2` and the output of the Bianchi map share
/// the rank-4 storage.
pub type CurvatureTensor = Tensor4;

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        data.push(f(a, b, c, d));
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n * n);
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.n;
        self.data[((a * n + b) * n + c) * n + d]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "inner product of tensors of different dimension");
        self.data.iter().zip(&other.data).map(|(x, y)| x * y).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest violation of `T(a,b,c,d) = -T(b,a,c,d) = -T(a,b,d,c)`.
    pub fn pair_antisymmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let t = self.get(a, b, c, d);
                        worst = worst
                            .max((t + self.get(b, a, c, d)).abs())
                            .max((t + self.get(a, b, d, c)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest violation of `T(a,b,c,d) = T(c,d,a,b)`.
    pub fn pair_swap_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        worst = worst.max((self.get(a, b, c, d) - self.get(c, d, a, b)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `T_x = T(x, ., ., .)`.
    pub fn contract_first(&self, x: &[f64]) -> Tensor3 {
        let n = self.n;
        assert_eq!(x.len(), n);
        Tensor3::from_fn(n, |b, c, d| (0..n).map(|a| x[a] * self.get(a, b, c, d)).sum())
    }

    /// `T_{e_a} = T(e_a, ., ., .)`.
    pub fn slice_first(&self, a: usize) -> Tensor3 {
        let n = self.n;
        let start = a * n * n * n;
        Tensor3::from_vec(n, self.data[start..start + n * n * n].to_vec())
    }

    /// Express the tensor in another orthonormal frame whose vectors are the
    /// columns of `frame` (components in the current frame).
    pub fn change_frame(&self, frame: &DMatrix<f64>) -> Self {
        let n = self.n;
        let mut cur = self.data.clone();
        // contract one slot at a time
        for slot in 0..4 {
            let mut next = vec![0.0; cur.len()];
            let stride = n.pow(3 - slot as u32);
            for idx in 0..cur.len() {
                let new_i = (idx / stride) % n;
                let base = idx - new_i * stride;
                let mut acc = 0.0;
                for old_i in 0..n {
                    acc += frame[(old_i, new_i)] * cur[base + old_i * stride];
                }
                next[idx] = acc;
            }
            cur = next;
        }
        Self { n, data: cur }
    }
}

impl Index<[usize; 4]> for Tensor4 {
    type Output = f64;
    fn index(&self, i: [usize; 4]) -> &f64 {
        let n = self.n;
        &self.data[((i[0] * n + i[1]) * n + i[2]) * n + i[3]]
    }
}

impl IndexMut<[usize; 4]> for Tensor4 {
    fn index_mut(&mut self, i: [usize; 4]) -> &mut f64 {
        let n = self.n;
        &mut self.data[((i[0] * n + i[1]) * n + i[2]) * n + i[3]]
    }
}

impl Add for &Tensor4 {
    type Output = Tensor4;
    fn add(self, rhs: &Tensor4) -> Tensor4 {
        assert_eq!(self.n, rhs.n);
        Tensor4 {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Tensor4 {
    type Output = Tensor4;
    fn sub(self, rhs: &Tensor4) -> Tensor4 {
        assert_eq!(self.n, rhs.n);
        Tensor4 {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&Tensor4> for Tensor4 {
    fn add_assign(&mut self, rhs: &Tensor4) {
        assert_eq!(self.n, rhs.n);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// Dense rank-3 array `T(a, b, c)`; used for Cotton-type tensors in
/// `V (x) Lambda^2` (antisymmetric in the last two slots).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

pub type Rank3Tensor = Tensor3;

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data.push(f(a, b, c));
                }
            }
        }
        Self { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n);
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        let n = self.n;
        self.data[(a * n + b) * n + c]
    }

    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "inner product of tensors of different dimension");
        self.data.iter().zip(&other.data).map(|(x, y)| x * y).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest violation of antisymmetry in the last two slots.
    pub fn last_pair_antisymmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    worst = worst.max((self.get(a, b, c) + self.get(a, c, b)).abs());
                }
            }
        }
        worst
    }

    pub fn change_frame(&self, frame: &DMatrix<f64>) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j, k| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        acc += frame[(a, i)] * frame[(b, j)] * frame[(c, k)] * self.get(a, b, c);
                    }
                }
            }
            acc
        })
    }
}

impl Index<[usize; 3]> for Tensor3 {
    type Output = f64;
    fn index(&self, i: [usize; 3]) -> &f64 {
        let n = self.n;
        &self.data[(i[0] * n + i[1]) * n + i[2]]
    }
}

impl IndexMut<[usize; 3]> for Tensor3 {
    fn index_mut(&mut self, i: [usize; 3]) -> &mut f64 {
        let n = self.n;
        &mut self.data[(i[0] * n + i[1]) * n + i[2]]
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.n, rhs.n);
        Tensor3 {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.n, rhs.n);
        Tensor3 {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

fn kn_unchecked(h: &DMatrix<f64>, k: &DMatrix<f64>) -> Tensor4 {
    let n = h.nrows();
    Tensor4::from_fn(n, |x, y, z, t| {
        h[(x, z)] * k[(y, t)] + h[(y, t)] * k[(x, z)] - h[(x, t)] * k[(y, z)] - h[(y, z)] * k[(x, t)]
    })
}

/// Kulkarni–Nomizu product of two symmetric bilinear forms.
pub fn kulkarni_nomizu(h: &SymBilinear, k: &SymBilinear) -> Result<CurvatureTensor, TensorError> {
    if h.dim() != k.dim() {
        return Err(TensorError::DimensionMismatch {
            expected: h.dim(),
            found: k.dim(),
        });
    }
    Ok(kn_unchecked(h.matrix(), k.matrix()))
}

/// `(b1 T)(x, y, z, u) = T(x,y,z,u) + T(y,z,x,u) + T(z,x,y,u)`.
pub fn bianchi_map(t: &CurvatureTensor) -> Tensor4 {
    Tensor4::from_fn(t.dim(), |x, y, z, u| t.get(x, y, z, u) + t.get(y, z, x, u) + t.get(z, x, y, u))
}

/// `Ric(y, u) = sum_i T(e_i, y, e_i, u)`, symmetrised.
pub fn ricci_contraction(t: &CurvatureTensor) -> SymBilinear {
    let n = t.dim();
    let m = DMatrix::from_fn(n, n, |y, u| (0..n).map(|i| t.get(i, y, i, u)).sum());
    SymBilinear::from_matrix(&m)
}

/// `sum_{i,j} T(e_i, e_j, e_i, e_j)`.
pub fn total_trace(t: &CurvatureTensor) -> f64 {
    let n = t.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += t.get(i, j, i, j);
        }
    }
    s
}
