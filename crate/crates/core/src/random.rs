//! Seeded generators for random tensors and rotations.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{Endo, SymBilinear, Tensor4};
use crate::weyl::{project_to_weyl, AlgWeyl};

/// The generator used everywhere randomness is needed.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(rng: &mut SeededRng) -> f64 {
    rng.gen_range(-1.0..=1.0)
}

pub fn random_matrix(n: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| uniform(rng))
}

pub fn random_endo(n: usize, rng: &mut SeededRng) -> Endo {
    Endo::from_matrix(random_matrix(n, rng))
}

pub fn random_sym(n: usize, rng: &mut SeededRng) -> SymBilinear {
    SymBilinear::from_matrix(&random_matrix(n, rng))
}

/// Rank-4 array with independent uniform entries in `[-1, 1]`.
pub fn random_tensor4(n: usize, rng: &mut SeededRng) -> Tensor4 {
    Tensor4::from_fn(n, |_, _, _, _| uniform(rng))
}

/// Projection of a uniform random array onto the Weyl space.
pub fn random_weyl(n: usize, rng: &mut SeededRng) -> AlgWeyl {
    project_to_weyl(&random_tensor4(n, rng)).weyl
}

/// A rotation in `SO(n)` from the QR factorisation of a random matrix.
pub fn random_rotation(n: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    let qr = random_matrix(n, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = random_tensor4(4, &mut seeded(3));
        let b = random_tensor4(4, &mut seeded(3));
        assert_eq!(a, b);
    }

    #[test]
    fn rotations_are_special_orthogonal() {
        let mut rng = seeded(4);
        for n in 3..=6 {
            let q = random_rotation(n, &mut rng);
            assert!((q.transpose() * &q - DMatrix::identity(n, n)).abs().max() < 1e-13);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
        }
    }
}
