//! Seeded random test inputs: Gaussian entries, symmetrized or
//! antisymmetrized, then Frobenius-normalized.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::{Matrix, SkewMatrix, SymMatrix};
use crate::poisson::canonical_n;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of sample `index` within a run seeded by `seed`.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

fn unit(m: Matrix) -> Matrix {
    let f = m.norm_fro();
    if f > 0.0 {
        m.scale(1.0 / f)
    } else {
        m
    }
}

pub fn random_unit_sym(n: usize, rng: &mut Rng) -> SymMatrix {
    let s = SymMatrix::symmetrize(&random_matrix(n, n, rng));
    SymMatrix::symmetrize(&unit(s.into_matrix()))
}

pub fn random_unit_skew(n: usize, rng: &mut Rng) -> SkewMatrix {
    let s = SkewMatrix::antisymmetrize(&random_matrix(n, n, rng));
    SkewMatrix::antisymmetrize(&unit(s.into_matrix()))
}

/// Haar-like random orthogonal matrix from Gram–Schmidt on Gaussian columns.
pub fn random_orthogonal(n: usize, rng: &mut Rng) -> Matrix {
    let g = random_matrix(n, n, rng);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut c: Vec<f64> = (0..n).map(|i| g[(i, j)]).collect();
        for _ in 0..2 {
            for q in &cols {
                let d: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
                c.iter_mut().zip(q).for_each(|(x, qi)| *x -= d * qi);
            }
        }
        let nrm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.iter_mut().for_each(|x| *x /= nrm);
        cols.push(c);
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `Qᵀ N₀ Q` for a random orthogonal `Q`, where `N₀` is the canonical
/// block form with pair values `v` and nullity `d`.
pub fn random_skew_with_spectrum(v: &[f64], d: usize, rng: &mut Rng) -> SkewMatrix {
    let n0 = canonical_n(v, d);
    let q = random_orthogonal(n0.n(), rng);
    n0.conjugate(&q.transpose()).expect("sizes agree")
}
