//! Dense linear algebra helpers: rank decisions, nullspaces and basis
//! canonicalization. Every rank decision goes through [`nullspace`], which
//! thresholds singular values relative to the largest one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default relative tolerance for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Singular values below this absolute level mean "the operator is zero".
const ZERO_SCALE: f64 = 1e-300;

/// Result of a thresholded nullspace computation.
#[derive(Debug, Clone)]
pub struct Nullspace {
    /// Orthonormal basis of the nullspace, one column per vector.
    pub basis: DMatrix<f64>,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Rank of the operator.
    pub rank: usize,
}

/// Orthonormal nullspace basis of `a` with relative threshold `tol`.
///
/// A singular value `s` counts as zero when `s <= tol * s_max`. The decision
/// is rejected as ambiguous when the smallest retained value sits below
/// `10 * tol * s_max`.
pub fn nullspace(a: &DMatrix<f64>, tol: f64, context: &str) -> Result<Nullspace> {
    let ncols = a.ncols();
    if ncols == 0 {
        return Ok(Nullspace {
            basis: DMatrix::zeros(0, 0),
            singular_values: vec![],
            rank: 0,
        });
    }
    // Reduce to a square matrix with the same singular values and right
    // singular vectors.
    let square = if a.nrows() > ncols {
        a.clone().qr().r()
    } else if a.nrows() < ncols {
        let mut padded = DMatrix::zeros(ncols, ncols);
        padded.rows_mut(0, a.nrows()).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    let s_max = singular_values[0];
    let rank = if s_max <= ZERO_SCALE {
        0
    } else {
        let rank = singular_values.iter().filter(|&&s| s > tol * s_max).count();
        if rank > 0 {
            let retained = singular_values[rank - 1] / s_max;
            if retained < 10.0 * tol {
                return Err(Error::NumericalRankFailure {
                    context: context.to_string(),
                    retained,
                    threshold: 10.0 * tol,
                });
            }
        }
        rank
    };
    let mut basis = DMatrix::zeros(ncols, ncols - rank);
    for (col, &row) in order[rank..].iter().enumerate() {
        basis.set_column(col, &v_t.row(row).transpose());
    }
    Ok(Nullspace {
        basis,
        singular_values,
        rank,
    })
}

/// Numerical rank of `a` (relative threshold).
pub fn rank(a: &DMatrix<f64>, tol: f64, context: &str) -> Result<usize> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(0);
    }
    // rank(A) = rank(A^T); the nullspace routine handles the wide case.
    Ok(nullspace(a, tol, context)?.rank)
}

/// Orthonormal basis of the column span of `a`, computed through the
/// nullspace of `a^T`'s complement.
pub fn column_span(a: &DMatrix<f64>, tol: f64, context: &str) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() == 0 || n == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    let left_null = nullspace(&a.transpose(), tol, context)?;
    orthogonal_complement(&left_null.basis, n)
}

/// Orthonormal basis of the Euclidean orthogonal complement of the
/// (orthonormal) columns of `q` inside `R^n`.
pub fn orthogonal_complement(q: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    if q.ncols() == 0 {
        return Ok(DMatrix::identity(n, n));
    }
    let ns = nullspace(&q.transpose(), DEFAULT_TOL, "orthogonal complement")?;
    Ok(ns.basis)
}

/// Cholesky-based orthonormalization of the columns of `cols` with respect
/// to the inner product `gram`: returns `cols * L^{-T}` where
/// `cols^T gram cols = L L^T`.
pub fn gram_orthonormalize(cols: &DMatrix<f64>, gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if cols.ncols() == 0 {
        return Ok(cols.clone());
    }
    let inner = cols.transpose() * gram * cols;
    let inner = symmetrize(&inner);
    let chol = inner.cholesky().ok_or_else(|| {
        Error::InternalInvariantViolation("Gram matrix of a basis is not positive definite".into())
    })?;
    let l = chol.l();
    // Solve X L^T = cols  <=>  L X^T = cols^T.
    let xt = l
        .solve_lower_triangular(&cols.transpose())
        .ok_or_else(|| Error::InternalInvariantViolation("singular Cholesky factor".into()))?;
    Ok(xt.transpose())
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Frobenius norm of `m + m^T`.
pub fn skew_defect(m: &DMatrix<f64>) -> f64 {
    (m + m.transpose()).norm()
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Maximum of `|b - Q Q^T b|` over the columns `b` of `vectors`, with `q`
/// orthonormal.
pub fn projection_residual(vectors: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for b in vectors.column_iter() {
        let b = b.into_owned();
        let r = if q.ncols() == 0 {
            b.norm()
        } else {
            (&b - q * (q.transpose() * &b)).norm()
        };
        worst = worst.max(r);
    }
    worst
}

/// Deterministic basis of the span of the orthonormal columns of `basis`:
/// reduced row echelon form on the transposed vectors, then Gram-Schmidt in
/// pivot order, unit norm and first significant coefficient positive.
pub fn canonical_basis(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, d) = basis.shape();
    if d == 0 {
        return basis.clone();
    }
    let mut rows: DMatrix<f64> = basis.transpose();
    let scale = rows.amax().max(f64::MIN_POSITIVE);
    let mut pivot_row = 0;
    for col in 0..n {
        if pivot_row == d {
            break;
        }
        let (best, best_val) =
            (pivot_row..d)
                .map(|r| (r, rows[(r, col)].abs()))
                .fold(
                    (pivot_row, -1.0),
                    |acc, x| if x.1 > acc.1 { x } else { acc },
                );
        if best_val <= 1e-8 * scale {
            continue;
        }
        rows.swap_rows(pivot_row, best);
        let p = rows[(pivot_row, col)];
        for c in 0..n {
            rows[(pivot_row, c)] /= p;
        }
        for r in 0..d {
            if r != pivot_row {
                let f = rows[(r, col)];
                if f != 0.0 {
                    for c in 0..n {
                        let v = rows[(pivot_row, c)];
                        rows[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(d);
    for r in 0..d {
        let mut v: DVector<f64> = rows.row(r).transpose();
        for q in &out {
            let proj = q.dot(&v);
            v -= q * proj;
        }
        let norm = v.norm();
        if norm > 1e-12 {
            v /= norm;
            out.push(v);
        }
    }
    let mut m = DMatrix::zeros(n, out.len());
    for (i, v) in out.iter().enumerate() {
        m.set_column(i, &normalize_sign(v.clone()));
    }
    m
}

/// Flip `v` so that its first coefficient above `1e-12` in magnitude is
/// positive.
pub fn normalize_sign(mut v: DVector<f64>) -> DVector<f64> {
    let scale = v.amax();
    if let Some(first) = v
        .iter()
        .find(|x| x.abs() > 1e-9 * scale.max(f64::MIN_POSITIVE))
    {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
    v
}

/// Orthonormalize a list of column vectors (modified Gram-Schmidt),
/// dropping those that become numerically dependent.
pub fn orthonormalize_columns(cols: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = cols.nrows();
    let scale = cols.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut out: Vec<DVector<f64>> = Vec::new();
    for c in cols.column_iter() {
        let mut v = c.into_owned();
        for _ in 0..2 {
            for q in &out {
                let p = q.dot(&v);
                v -= q * p;
            }
        }
        let norm = v.norm();
        if norm > tol.max(1e-12) * scale.max(1.0) {
            out.push(v / norm);
        }
    }
    let mut m = DMatrix::zeros(n, out.len());
    for (i, v) in out.iter().enumerate() {
        m.set_column(i, v);
    }
    m
}
