//! Numerical kernels and subspace comparisons.

use nalgebra::{DMatrix, DVector, SVD};

/// Default relative cut for singular values counted as zero.
pub const DEFAULT_RANK_CUT: f64 = 1e-9;

/// Orthonormal basis (as columns) of the numerical null space of `a`.
///
/// Singular values `<= rel_cut * sigma_max` count as zero. A zero operator has
/// the whole domain as its kernel.
pub fn null_space(a: &DMatrix<f64>, rel_cut: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    // nalgebra returns min(m, n) singular triples; pad so that every
    // direction of the domain is represented.
    let padded;
    let a = if a.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let sigma_max = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if sigma_max == 0.0 {
        return DMatrix::identity(cols, cols);
    }
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.max();
    let mut kernel: Vec<DVector<f64>> = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= rel_cut * smax {
            let mut v: DVector<f64> = v_t.row(i).transpose();
            canonical_sign(&mut v);
            kernel.push(v);
        }
    }
    if kernel.is_empty() {
        return DMatrix::zeros(cols, 0);
    }
    DMatrix::from_columns(&kernel)
}

/// Singular values of `a`, descending.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Flip `v` so that its largest-magnitude entry is positive.
pub fn canonical_sign(v: &mut DVector<f64>) {
    let mut best = 0.0_f64;
    let mut sign = 1.0;
    for x in v.iter() {
        if x.abs() > best + 1e-12 {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        *v *= -1.0;
    }
}

/// Orthonormalise the columns of `a`, dropping numerically dependent ones.
pub fn orthonormalize(a: &DMatrix<f64>, rel_cut: f64) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return a.clone();
    }
    let svd = SVD::new(a.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| smax > 0.0 && **s > rel_cut * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(a.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Sine of the largest principal angle needed to fit span(`a`) inside span(`b`).
/// Both arguments hold orthonormal columns of the same length. Zero means
/// span(`a`) is contained in span(`b`).
pub fn containment_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    if b.ncols() == 0 {
        return 1.0;
    }
    let residual = a - b * (b.transpose() * a);
    singular_values(&residual).first().copied().unwrap_or(0.0)
}

/// Sine of the largest principal angle between two subspaces, or 1 when the
/// dimensions differ.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    containment_gap(a, b).max(containment_gap(b, a))
}
