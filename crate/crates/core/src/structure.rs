//! De Rham-type splitting of a metric 2-step nilpotent algebra into its
//! abelian part `a = ker j` and irreducible orthogonal ideals, plus the
//! per-factor analyses: bi-invariant orthogonal complex structures and
//! naturally reductive type.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::{subalgebra_from_frame, AdaptedFrame, MetricLieAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::exterior::binomial;
use crate::linalg;

/// Bracket `[[z_s, z_t]] = Σ_u c[s][t][u] z_u` on the center of a factor, in
/// the factor's z-frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactBracket {
    pub dim: usize,
    constants: Vec<f64>,
}

impl CompactBracket {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            constants: vec![0.0; dim * dim * dim],
        }
    }

    /// Table given as flattened `c[s][t][u]`.
    pub fn from_constants(dim: usize, constants: Vec<f64>) -> Result<Self> {
        if constants.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "bracket table has {} entries, expected {}",
                constants.len(),
                dim * dim * dim
            )));
        }
        Ok(Self { dim, constants })
    }

    #[inline]
    pub fn c(&self, s: usize, t: usize, u: usize) -> f64 {
        self.constants[(s * self.dim + t) * self.dim + u]
    }

    fn set(&mut self, s: usize, t: usize, u: usize, v: f64) {
        self.constants[(s * self.dim + t) * self.dim + u] = v;
    }

    /// `ad_s` as an `m × m` matrix: column `t` holds `[[z_s, z_t]]`.
    pub fn ad(&self, s: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |u, t| self.c(s, t, u))
    }

    /// Killing form `tr(ad_s ad_t)`.
    pub fn killing_form(&self) -> DMatrix<f64> {
        let ads: Vec<_> = (0..self.dim).map(|s| self.ad(s)).collect();
        DMatrix::from_fn(self.dim, self.dim, |s, t| (&ads[s] * &ads[t]).trace())
    }

    pub fn norm(&self) -> f64 {
        self.constants.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// The same bracket in the basis `w_i = Σ_j r[j][i] z_j` for orthogonal
    /// `r`.
    pub fn rotated(&self, r: &DMatrix<f64>) -> CompactBracket {
        let m = self.dim;
        let mut out = CompactBracket::zero(m);
        for i in 0..m {
            for j in 0..m {
                let mut v = DVector::zeros(m);
                for s in 0..m {
                    for t in 0..m {
                        let w = r[(s, i)] * r[(t, j)];
                        if w == 0.0 {
                            continue;
                        }
                        for u in 0..m {
                            v[u] += w * self.c(s, t, u);
                        }
                    }
                }
                let coords = r.transpose() * v;
                for k in 0..m {
                    out.set(i, j, k, coords[k]);
                }
            }
        }
        out
    }
}

/// One irreducible factor of the decomposition.
#[derive(Debug, Clone)]
pub struct FactorReport {
    /// The factor as a metric Lie algebra; its user basis is the columns of
    /// `embedding` with the identity metric.
    pub sub_algebra: MetricLieAlgebra,
    /// Orthonormal columns in the ambient frame spanning the factor.
    pub embedding: DMatrix<f64>,
    /// Adapted frame of `sub_algebra`.
    pub frame: AdaptedFrame,
    pub has_complex_structure: bool,
    /// Bi-invariant orthogonal complex structure in the factor frame.
    pub complex_structure: Option<DMatrix<f64>>,
    pub naturally_reductive: bool,
    pub compact_bracket: Option<CompactBracket>,
}

impl FactorReport {
    pub fn dim(&self) -> usize {
        self.embedding.ncols()
    }

    pub fn dims_vz(&self) -> (usize, usize) {
        (self.frame.dim_v, self.frame.dim_z)
    }

    /// Linear map from ambient frame coordinates to factor frame coordinates.
    pub fn restriction(&self) -> DMatrix<f64> {
        self.frame.frame.transpose() * self.embedding.transpose()
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Adapted frame of the whole algebra; all subspaces below are in its
    /// coordinates.
    pub frame: AdaptedFrame,
    pub abelian: Subspace,
    pub factors: Vec<FactorReport>,
    /// Orthogonal matrix `[a | factor_1 | factor_2 | …]`.
    pub transform: DMatrix<f64>,
}

impl Decomposition {
    pub fn d(&self) -> usize {
        self.abelian.dim()
    }

    pub fn r2(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| f.has_complex_structure)
            .count()
    }

    pub fn r3(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| f.naturally_reductive)
            .count()
    }

    /// Largest deviation between the ambient brackets and the block-diagonal
    /// reassembly of the factors.
    pub fn reassembly_residual(&self) -> f64 {
        let n = self.frame.dim();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let x = self.frame.unit(a);
                let y = self.frame.unit(b);
                let mut rebuilt = DVector::zeros(n);
                for f in &self.factors {
                    let q = &f.embedding;
                    let xs = q.transpose() * &x;
                    let ys = q.transpose() * &y;
                    rebuilt += q * f.sub_algebra.bracket(&xs, &ys);
                }
                worst = worst.max((self.frame.bracket(&x, &y) - rebuilt).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KillingDimensions {
    pub dim_k2: usize,
    pub dim_k3: usize,
    pub d: usize,
    pub r2: usize,
    pub r3: usize,
}

/// Basis of symmetric (or skew) matrices, orthonormal for the Frobenius
/// product.
fn matrix_basis(n: usize, symmetric: bool) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        if symmetric {
            let mut m = DMatrix::zeros(n, n);
            m[(i, i)] = 1.0;
            out.push(m);
        }
        for j in (i + 1)..n {
            let mut m = DMatrix::zeros(n, n);
            m[(i, j)] = h;
            m[(j, i)] = if symmetric { h } else { -h };
            out.push(m);
        }
    }
    out
}

/// Space of endomorphisms `S` (symmetric or skew) with `S[x,y] = [Sx,y]`.
fn intertwiners(frame: &AdaptedFrame, symmetric: bool, tol: f64) -> Result<Vec<DMatrix<f64>>> {
    let n = frame.dim();
    let basis = matrix_basis(n, symmetric);
    if basis.is_empty() {
        return Ok(vec![]);
    }
    let mut op = DMatrix::zeros(n * n * n, basis.len());
    for (col, e) in basis.iter().enumerate() {
        for a in 0..n {
            let ua = frame.unit(a);
            let eua = e * &ua;
            for b in 0..n {
                let ub = frame.unit(b);
                let r = e * frame.bracket(&ua, &ub) - frame.bracket(&eua, &ub);
                for k in 0..n {
                    op[((a * n + b) * n + k, col)] = r[k];
                }
            }
        }
    }
    let ctx = if symmetric {
        "symmetric bracket commutant"
    } else {
        "skew bracket commutant"
    };
    let ns = linalg::nullspace(&op, tol, ctx)?;
    let coeffs = linalg::canonical_basis(&ns.basis);
    Ok(coeffs
        .column_iter()
        .map(|c| {
            basis
                .iter()
                .zip(c.iter())
                .fold(DMatrix::zeros(n, n), |acc, (e, w)| acc + e * *w)
        })
        .collect())
}

/// Frobenius-orthonormal basis of the symmetric `S` with `S[x,y] = [Sx,y]`.
pub fn bracket_commutant(frame: &AdaptedFrame, tol: f64) -> Result<Vec<DMatrix<f64>>> {
    intertwiners(frame, true, tol)
}

/// Skew `D` with `D[x,y] = [Dx,y]`.
pub fn skew_bracket_commutant(frame: &AdaptedFrame, tol: f64) -> Result<Vec<DMatrix<f64>>> {
    intertwiners(frame, false, tol)
}

/// Bi-invariant orthogonal complex structure of an irreducible factor, in its
/// frame coordinates, if one exists. Unique up to sign.
pub fn find_complex_structure(frame: &AdaptedFrame, tol: f64) -> Result<Option<DMatrix<f64>>> {
    let sols = skew_bracket_commutant(frame, tol)?;
    match sols.len() {
        0 => Ok(None),
        1 => {
            let d = &sols[0];
            let n = frame.dim();
            let d2 = d * d;
            let lambda = d2.trace() / n as f64;
            let defect = (&d2 - DMatrix::identity(n, n) * lambda).norm();
            if lambda >= 0.0 || defect > 1e3 * tol.max(1e-12) * d2.norm() {
                return Err(Error::InternalInvariantViolation(format!(
                    "square of the bi-invariant skew map is not a negative scalar (λ = {lambda:.3e}, defect {defect:.3e})"
                )));
            }
            Ok(Some(d / (-lambda).sqrt()))
        }
        k => Err(Error::InternalInvariantViolation(format!(
            "bi-invariant skew maps form a {k}-dimensional space on an irreducible factor"
        ))),
    }
}

/// Tests the two naturally reductive conditions on a factor with injective
/// `j`: closure of `j(z)` under commutators, and skewness of the induced
/// bracket. Returns the bracket `[[z, z']] = j^{-1}[j(z), j(z')]` if both hold.
pub fn naturally_reductive_type(frame: &AdaptedFrame, tol: f64) -> Option<CompactBracket> {
    let m = frame.dim_z;
    if m == 0 || frame.dim_a() > 0 {
        return None;
    }
    let js = &frame.j_matrices;
    let gram = DMatrix::from_fn(m, m, |s, t| js[s].dot(&js[t]));
    let chol = gram.clone().cholesky()?;
    let mut bracket = CompactBracket::zero(m);
    for s in 0..m {
        for t in (s + 1)..m {
            let comm = linalg::commutator(&js[s], &js[t]);
            let rhs = DVector::from_fn(m, |u, _| js[u].dot(&comm));
            let coeffs = chol.solve(&rhs);
            let fit = js
                .iter()
                .zip(coeffs.iter())
                .fold(DMatrix::zeros(frame.dim_v, frame.dim_v), |acc, (j, c)| {
                    acc + j * *c
                });
            let scale = js[s].norm() * js[t].norm();
            if (&comm - fit).norm() > tol * scale {
                return None;
            }
            for u in 0..m {
                bracket.set(s, t, u, coeffs[u]);
                bracket.set(t, s, u, -coeffs[u]);
            }
        }
    }
    let scale = bracket.norm().max(1.0);
    for s in 0..m {
        if linalg::skew_defect(&bracket.ad(s)) > tol * scale {
            return None;
        }
    }
    Some(bracket)
}

fn ideal_leak(frame: &AdaptedFrame, whole: &DMatrix<f64>, part: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for x in whole.column_iter() {
        for y in part.column_iter() {
            let br = frame.bracket(&x.into_owned(), &y.into_owned());
            let inside = part * (part.transpose() * &br);
            worst = worst.max((br - inside).norm());
        }
    }
    worst
}

/// Splits `l` into `a ⊕ n_1 ⊕ … ⊕ n_q` with `a = ker j` and irreducible
/// orthogonal ideals `n_i`.
pub fn decompose(l: &MetricLieAlgebra, tol: f64) -> Result<Decomposition> {
    let frame = AdaptedFrame::new(l, tol)?;
    let n = frame.dim();
    let dim_a = frame.dim_a();
    let mut abelian = DMatrix::zeros(n, dim_a);
    for (c, &i) in frame.a_indices.iter().enumerate() {
        abelian[(i, c)] = 1.0;
    }
    let n0 = n - dim_a;
    let mut pending = Vec::new();
    if n0 > 0 {
        pending.push(DMatrix::<f64>::identity(n, n).columns(0, n0).into_owned());
    }
    let gap = 10.0 * tol;
    let mut irreducible = Vec::new();
    while let Some(q) = pending.pop() {
        let sub = subalgebra_from_frame(&frame, &q, "factor", tol)?;
        let sub_frame = AdaptedFrame::new(&sub, tol)?;
        if sub_frame.dim_a() > 0 {
            return Err(Error::DecompositionAmbiguous(
                "a split produced a factor with an abelian summand".into(),
            ));
        }
        let commutant = bracket_commutant(&sub_frame, tol)?;
        if commutant.len() <= 1 {
            irreducible.push((q, sub, sub_frame));
            continue;
        }
        let p = q.ncols();
        let (generic, _) = commutant
            .iter()
            .map(|s| {
                let centered = s - DMatrix::identity(p, p) * (s.trace() / p as f64);
                let d = centered.norm();
                (centered, d)
            })
            .fold((DMatrix::zeros(p, p), -1.0), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            });
        let generic = &generic / generic.norm();
        let eig = SymmetricEigen::new(linalg::symmetrize(&generic));
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let mut clusters: Vec<Vec<usize>> = vec![vec![order[0]]];
        for w in order.windows(2) {
            if eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]] > gap {
                clusters.push(vec![w[1]]);
            } else {
                clusters.last_mut().expect("non-empty").push(w[1]);
            }
        }
        if clusters.len() < 2 {
            return Err(Error::DecompositionAmbiguous(format!(
                "commutant has dimension {} but its generic element has no eigenvalue gap above {gap:.1e}",
                commutant.len()
            )));
        }
        // Sub frame coordinates -> ambient frame coordinates.
        let lift = &q * &sub_frame.frame;
        for cluster in clusters {
            let mut e = DMatrix::zeros(p, cluster.len());
            for (c, &i) in cluster.iter().enumerate() {
                e.set_column(c, &eig.eigenvectors.column(i));
            }
            let block = linalg::orthonormalize_columns(&(&lift * e), 1e-12);
            let leak = ideal_leak(&frame, &q, &block);
            if leak > 1e3 * tol.max(1e-12) {
                return Err(Error::DecompositionAmbiguous(format!(
                    "eigenspace block is not an ideal (leak {leak:.3e})"
                )));
            }
            pending.push(block);
        }
    }
    // Deterministic order: by dimension, then by dim z, then by position of
    // the first significant ambient coordinate.
    irreducible.sort_by(|a, b| {
        let key = |x: &(DMatrix<f64>, MetricLieAlgebra, AdaptedFrame)| {
            let first =
                x.0.row_iter()
                    .position(|r| r.amax() > 1e-6)
                    .unwrap_or(usize::MAX);
            (x.0.ncols(), x.2.dim_z, first)
        };
        key(a).cmp(&key(b))
    });

    let mut factors = Vec::with_capacity(irreducible.len());
    for (i, (q, mut sub, sub_frame)) in irreducible.into_iter().enumerate() {
        sub.name = format!("{}#{}", l.name, i + 1);
        let complex_structure = find_complex_structure(&sub_frame, tol)?;
        let compact_bracket = naturally_reductive_type(&sub_frame, tol);
        if complex_structure.is_some() && compact_bracket.is_some() {
            return Err(Error::InternalInvariantViolation(format!(
                "factor {} is flagged both complex and naturally reductive",
                i + 1
            )));
        }
        factors.push(FactorReport {
            sub_algebra: sub,
            embedding: q,
            frame: sub_frame,
            has_complex_structure: complex_structure.is_some(),
            complex_structure,
            naturally_reductive: compact_bracket.is_some(),
            compact_bracket,
        });
    }

    let mut transform = DMatrix::zeros(n, n);
    transform.columns_mut(0, dim_a).copy_from(&abelian);
    let mut col = dim_a;
    for f in &factors {
        transform.columns_mut(col, f.dim()).copy_from(&f.embedding);
        col += f.dim();
    }
    Ok(Decomposition {
        frame,
        abelian: Subspace::new(abelian, "a"),
        factors,
        transform,
    })
}

/// `dim K² = C(d,2) + r2` and `dim K³ = C(d,3) + r3` from the decomposition.
pub fn killing_dimensions(l: &MetricLieAlgebra, tol: f64) -> Result<KillingDimensions> {
    let dec = decompose(l, tol)?;
    Ok(dimensions_of(&dec))
}

pub fn dimensions_of(dec: &Decomposition) -> KillingDimensions {
    let d = dec.d();
    KillingDimensions {
        dim_k2: binomial(d, 2) + dec.r2(),
        dim_k3: binomial(d, 3) + dec.r3(),
        d,
        r2: dec.r2(),
        r3: dec.r3(),
    }
}

/// Equips `h` with the metric `g = gram + Jᵀ gram J`, for which the
/// bi-invariant complex structure `j_user` (user coordinates) is orthogonal.
pub fn compatible_metric(
    h: &MetricLieAlgebra,
    j_user: &DMatrix<f64>,
    gram: &DMatrix<f64>,
) -> Result<MetricLieAlgebra> {
    let n = h.dim();
    if j_user.shape() != (n, n) || gram.shape() != (n, n) {
        return Err(Error::DimensionMismatch("J and h must be n × n".into()));
    }
    let sq = (j_user * j_user + DMatrix::identity(n, n)).norm();
    if sq > 1e-9 * j_user.norm().max(1.0) {
        return Err(Error::NotComplexStructure(format!("|J² + Id| = {sq:.3e}")));
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
            let y = DVector::from_fn(n, |r, _| if r == k { 1.0 } else { 0.0 });
            let lhs = j_user * h.bracket(&x, &y);
            let rhs = h.bracket(&(j_user * &x), &y);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    if worst > 1e-9 {
        return Err(Error::NotComplexStructure(format!(
            "J[x,y] != [Jx,y] (defect {worst:.3e})"
        )));
    }
    let g = gram + j_user.transpose() * gram * j_user;
    MetricLieAlgebra::new(
        format!("{}(J-compatible)", h.name),
        h.basis_names.clone(),
        h.structure_constants().to_vec(),
        linalg::symmetrize(&g),
    )
}
