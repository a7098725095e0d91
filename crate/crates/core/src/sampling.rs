//! Seeded random metrics and basis changes for property suites.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::MetricLieAlgebra;
use crate::error::Result;
use crate::linalg;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_matrix<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

/// Symmetric positive-definite matrix with eigenvalues in roughly
/// `[0.3, 3]`.
pub fn random_spd<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let q = random_orthogonal(n, rng);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        0.3 + 2.7 * rng.gen::<f64>()
    }));
    linalg::symmetrize(&(&q * d * q.transpose()))
}

/// Haar-like orthogonal matrix from the QR factorization of a random matrix.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let a = uniform_matrix(n, rng);
        let qr = a.qr();
        let r = qr.r();
        if (0..n).all(|i| r[(i, i)].abs() > 1e-3) {
            let mut q = qr.q();
            for i in 0..n {
                if r[(i, i)] < 0.0 {
                    q.column_mut(i).neg_mut();
                }
            }
            return q;
        }
    }
}

/// Same structure constants with a random positive-definite metric.
pub fn with_random_metric<R: Rng>(l: &MetricLieAlgebra, rng: &mut R) -> Result<MetricLieAlgebra> {
    MetricLieAlgebra::new(
        l.name.clone(),
        l.basis_names.clone(),
        l.structure_constants().to_vec(),
        random_spd(l.dim(), rng),
    )
}

/// An isometric copy of `l` in a new user basis `b'_i = Σ_j t[j][i] b_j`
/// where `t` is orthogonal for the metric `g`. The Gram matrix is unchanged.
pub fn isometric_scramble<R: Rng>(l: &MetricLieAlgebra, rng: &mut R) -> Result<MetricLieAlgebra> {
    let n = l.dim();
    let eig = nalgebra::SymmetricEigen::new(l.gram.clone());
    let sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let inv_sqrt = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
        * eig.eigenvectors.transpose();
    let t = inv_sqrt * random_orthogonal(n, rng) * sqrt;
    let mut out = l.change_basis(&t, format!("{}~", l.name))?;
    out.gram = l.gram.clone();
    Ok(out)
}
