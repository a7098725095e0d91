//! Metric 2-step nilpotent Lie algebras: validation, center and commutator,
//! the adapted orthonormal frame `n = v ⊕ z` with its j-map, and the
//! Levi-Civita connection on left-invariant vector fields.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg;

/// A Lie algebra given by structure constants in a user basis together with
/// a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    pub name: String,
    pub basis_names: Vec<String>,
    /// Flattened `c[i][j][k]`: `[b_i, b_j] = Σ_k c[i][j][k] b_k`.
    structure: Vec<f64>,
    pub gram: DMatrix<f64>,
}

impl MetricLieAlgebra {
    /// Builds an algebra from a full structure-constant table. No validation
    /// is performed; see [`MetricLieAlgebra::validate`].
    pub fn new(
        name: impl Into<String>,
        basis_names: Vec<String>,
        structure: Vec<f64>,
        gram: DMatrix<f64>,
    ) -> Result<Self> {
        let n = basis_names.len();
        if structure.len() != n * n * n {
            return Err(Error::DimensionMismatch(format!(
                "structure table has {} entries, expected {}",
                structure.len(),
                n * n * n
            )));
        }
        if gram.nrows() != n || gram.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "gram is {}x{}, expected {n}x{n}",
                gram.nrows(),
                gram.ncols()
            )));
        }
        Ok(Self {
            name: name.into(),
            basis_names,
            structure,
            gram,
        })
    }

    /// Builds an algebra from a list of brackets `[b_i, b_j] = c b_k`, filling
    /// in the antisymmetric partner of each entry.
    pub fn from_brackets(
        name: impl Into<String>,
        basis_names: Vec<String>,
        brackets: &[(usize, usize, usize, f64)],
        gram: DMatrix<f64>,
    ) -> Result<Self> {
        let n = basis_names.len();
        let mut structure = vec![0.0; n * n * n];
        for &(i, j, k, c) in brackets {
            if i >= n || j >= n || k >= n {
                return Err(Error::DimensionMismatch(format!(
                    "bracket index out of range in ({i}, {j}, {k}) for dimension {n}"
                )));
            }
            if i == j {
                return Err(Error::Parse(format!("bracket [b_{i}, b_{i}] must vanish")));
            }
            structure[(i * n + j) * n + k] += c;
            structure[(j * n + i) * n + k] -= c;
        }
        Self::new(name, basis_names, structure, gram)
    }

    /// Default basis names `e1, …, en`.
    pub fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("e{i}")).collect()
    }

    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.structure[(i * n + j) * n + k]
    }

    pub fn structure_constants(&self) -> &[f64] {
        &self.structure
    }

    /// `[x, y]` in user coordinates.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.c(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` in user coordinates.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                if x[i] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    m[(k, j)] += x[i] * self.c(i, j, k);
                }
            }
        }
        m
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|&c| c == 0.0)
    }

    /// Same algebra in the basis `b'_i = Σ_j t[j][i] b_j`.
    pub fn change_basis(&self, t: &DMatrix<f64>, name: impl Into<String>) -> Result<Self> {
        let n = self.dim();
        let t_inv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DimensionMismatch("change of basis is singular".into()))?;
        let mut structure = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let br = self.bracket(&t.column(i).into_owned(), &t.column(j).into_owned());
                let coords = &t_inv * br;
                for k in 0..n {
                    structure[(i * n + j) * n + k] = coords[k];
                }
            }
        }
        let gram = t.transpose() * &self.gram * t;
        Self::new(
            name,
            self.basis_names.clone(),
            structure,
            linalg::symmetrize(&gram),
        )
    }

    /// Checks antisymmetry, 2-step nilpotency and positive-definiteness.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let n = self.dim();
        let mut violations = Vec::new();
        let scale = self.structure.iter().fold(1.0_f64, |m, c| m.max(c.abs()));

        'anti: for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let s = self.c(i, j, k) + self.c(j, i, k);
                    let bad = if i == j {
                        self.c(i, i, k).abs() > tol * scale
                    } else {
                        s.abs() > tol * scale
                    };
                    if bad {
                        violations.push(Violation::Antisymmetry {
                            i,
                            j,
                            k,
                            defect: if i == j { self.c(i, i, k) } else { s },
                        });
                        if violations.len() > 16 {
                            break 'anti;
                        }
                    }
                }
            }
        }

        let mut worst = (0.0, 0, 0, 0);
        for i in 0..n {
            for j in 0..n {
                for w in 0..n {
                    // [[b_i, b_j], b_w]
                    for m in 0..n {
                        let mut s = 0.0;
                        for k in 0..n {
                            s += self.c(i, j, k) * self.c(k, w, m);
                        }
                        if s.abs() > worst.0 {
                            worst = (s.abs(), i, j, w);
                        }
                    }
                }
            }
        }
        if worst.0 > tol * scale * scale {
            violations.push(Violation::NotTwoStep {
                i: worst.1,
                j: worst.2,
                w: worst.3,
                magnitude: worst.0,
            });
        }

        let asym = (&self.gram - self.gram.transpose()).amax();
        let gscale = self.gram.amax().max(1.0);
        if asym > tol * gscale {
            violations.push(Violation::GramNotSymmetric(asym));
        }
        if n > 0 {
            let eig = SymmetricEigen::new(linalg::symmetrize(&self.gram));
            let min = eig.eigenvalues.min();
            if min <= tol * gscale {
                violations.push(Violation::NotPositiveDefinite(min));
            }
        }
        ValidationReport { violations }
    }

    /// Errors with [`Error::InvalidAlgebra`] unless `validate` is clean.
    pub fn ensure_valid(&self, tol: f64) -> Result<()> {
        let report = self.validate(tol);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidAlgebra(
                report.violations.iter().map(|v| v.to_string()).collect(),
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Antisymmetry {
        i: usize,
        j: usize,
        k: usize,
        defect: f64,
    },
    NotTwoStep {
        i: usize,
        j: usize,
        w: usize,
        magnitude: f64,
    },
    GramNotSymmetric(f64),
    NotPositiveDefinite(f64),
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Antisymmetry { .. } => "antisymmetry",
            Violation::NotTwoStep { .. } => "two-step",
            Violation::GramNotSymmetric(_) => "gram-symmetry",
            Violation::NotPositiveDefinite(_) => "positive-definiteness",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Antisymmetry { i, j, k, defect } => write!(
                f,
                "antisymmetry: c[{i}][{j}][{k}] + c[{j}][{i}][{k}] = {defect:.3e}"
            ),
            Violation::NotTwoStep { i, j, w, magnitude } => write!(
                f,
                "two-step: [[b{i}, b{j}], b{w}] is nonzero (largest coefficient {magnitude:.3e})"
            ),
            Violation::GramNotSymmetric(d) => write!(f, "gram-symmetry: max |G - G^T| = {d:.3e}"),
            Violation::NotPositiveDefinite(m) => {
                write!(f, "positive-definiteness: smallest eigenvalue {m:.3e}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.kind() == kind)
    }
}

/// A labelled set of linearly independent column vectors.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub columns: DMatrix<f64>,
    pub label: String,
}

impl Subspace {
    pub fn new(columns: DMatrix<f64>, label: impl Into<String>) -> Self {
        Self {
            columns,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    /// Whether every column of `other` lies in this span, within `tol`.
    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        let q = linalg::orthonormalize_columns(&self.columns, tol);
        linalg::projection_residual(&other.columns, &q) <= tol.max(1e-12) * 10.0
    }
}

/// Center and commutator of `l`, in user coordinates (Euclidean-orthonormal
/// columns).
pub fn center_commutator(l: &MetricLieAlgebra, tol: f64) -> Result<(Subspace, Subspace)> {
    let center = center_basis(l, tol)?;
    let n = l.dim();
    let mut brackets = DMatrix::zeros(n, n * (n.saturating_sub(1)) / 2);
    let mut col = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                brackets[(k, col)] = l.c(i, j, k);
            }
            col += 1;
        }
    }
    let commutator = linalg::column_span(&brackets, tol, "commutator")?;
    if commutator.ncols() == 0 {
        return Err(Error::AlgebraAbelian);
    }
    Ok((
        Subspace::new(center, "center"),
        Subspace::new(commutator, "commutator"),
    ))
}

fn center_basis(l: &MetricLieAlgebra, tol: f64) -> Result<DMatrix<f64>> {
    let n = l.dim();
    // Row (j, k), column i: coefficient of b_k in [b_i, b_j].
    let mut stacked = DMatrix::zeros(n * n, n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                stacked[(j * n + k, i)] = l.c(i, j, k);
            }
        }
    }
    Ok(linalg::nullspace(&stacked, tol, "center")?.basis)
}

/// Orthonormal frame adapted to `n = v ⊕ z`, with `z` further split as
/// `a^⊥ ⊕ a`, where `a = ker j`.
///
/// Frame indices `0..dim_v` span `v`, `dim_v..dim_v + rank_j` span the part
/// of `z` on which `j` is injective, and the remaining indices span `a`.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    /// Columns are the frame vectors in user coordinates.
    pub frame: DMatrix<f64>,
    /// `frame^T · gram`: maps user coordinates to frame coordinates.
    to_frame: DMatrix<f64>,
    pub dim_v: usize,
    pub dim_z: usize,
    /// `J_t = j(z_t)` on `v` for each z-frame vector, in frame coordinates.
    pub j_matrices: Vec<DMatrix<f64>>,
    pub a_indices: Vec<usize>,
    /// Frame structure constants, flattened like [`MetricLieAlgebra`].
    structure: Vec<f64>,
}

impl AdaptedFrame {
    pub fn new(l: &MetricLieAlgebra, tol: f64) -> Result<Self> {
        let n = l.dim();
        let g = &l.gram;
        let center = linalg::canonical_basis(&center_basis(l, tol)?);
        let z_g = linalg::gram_orthonormalize(&center, g)?;
        let dim_z = z_g.ncols();

        let v_cols = if dim_z == 0 {
            DMatrix::identity(n, n)
        } else {
            let constraint = z_g.transpose() * g;
            linalg::canonical_basis(
                &linalg::nullspace(&constraint, tol, "center complement")?.basis,
            )
        };
        let v_g = linalg::gram_orthonormalize(&v_cols, g)?;
        let dim_v = v_g.ncols();
        if dim_v + dim_z != n {
            return Err(Error::InternalInvariantViolation(format!(
                "v ⊕ z has dimension {} + {} != {n}",
                dim_v, dim_z
            )));
        }

        let raw_j = j_from_basis(l, &v_g, &z_g);

        // Split z into a^⊥ ⊕ a through the kernel of the linear map j.
        let mut jmap = DMatrix::zeros(dim_v * dim_v, dim_z);
        for (t, jt) in raw_j.iter().enumerate() {
            for (r, x) in jt.iter().enumerate() {
                jmap[(r, t)] = *x;
            }
        }
        let kernel = if dim_z == 0 {
            DMatrix::zeros(0, 0)
        } else {
            linalg::canonical_basis(&linalg::nullspace(&jmap, tol, "kernel of j")?.basis)
        };
        let dim_a = kernel.ncols();
        let injective_part =
            linalg::canonical_basis(&linalg::orthogonal_complement(&kernel, dim_z)?);
        let mut rotation = DMatrix::zeros(dim_z, dim_z);
        if dim_z > 0 {
            rotation
                .columns_mut(0, dim_z - dim_a)
                .copy_from(&injective_part);
            rotation
                .columns_mut(dim_z - dim_a, dim_a)
                .copy_from(&kernel);
        }
        let z_frame = &z_g * &rotation;

        let mut j_matrices = Vec::with_capacity(dim_z);
        for t in 0..dim_z {
            if t >= dim_z - dim_a {
                j_matrices.push(DMatrix::zeros(dim_v, dim_v));
            } else {
                let mut m = DMatrix::zeros(dim_v, dim_v);
                for (s, js) in raw_j.iter().enumerate() {
                    m += js * rotation[(s, t)];
                }
                // Exactly skew.
                j_matrices.push((&m - m.transpose()) * 0.5);
            }
        }
        let a_indices = (dim_v + dim_z - dim_a..n).collect();

        let mut frame = DMatrix::zeros(n, n);
        frame.columns_mut(0, dim_v).copy_from(&v_g);
        frame.columns_mut(dim_v, dim_z).copy_from(&z_frame);
        let to_frame = frame.transpose() * g;

        let mut structure = vec![0.0; n * n * n];
        for (t, jt) in j_matrices.iter().enumerate() {
            for a in 0..dim_v {
                for b in 0..dim_v {
                    // g(z_t, [e_a, e_b]) = g(J_t e_a, e_b)
                    structure[(a * n + b) * n + dim_v + t] = jt[(b, a)];
                }
            }
        }

        Ok(Self {
            frame,
            to_frame,
            dim_v,
            dim_z,
            j_matrices,
            a_indices,
            structure,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim_v + self.dim_z
    }

    pub fn v_indices(&self) -> std::ops::Range<usize> {
        0..self.dim_v
    }

    pub fn z_indices(&self) -> std::ops::Range<usize> {
        self.dim_v..self.dim()
    }

    pub fn dim_a(&self) -> usize {
        self.a_indices.len()
    }

    pub fn is_v(&self, idx: usize) -> bool {
        idx < self.dim_v
    }

    /// Structure constant of the frame: coefficient of `u_k` in `[u_i, u_j]`.
    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.structure[(i * n + j) * n + k]
    }

    pub fn to_frame_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.to_frame * x
    }

    pub fn to_user_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.frame * x
    }

    /// Endomorphism given in frame coordinates, expressed in user coordinates.
    pub fn endo_to_user(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.frame * m * &self.to_frame
    }

    /// Endomorphism given in user coordinates, expressed in frame coordinates.
    pub fn endo_to_frame(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.to_frame * m * &self.frame
    }

    pub fn unit(&self, i: usize) -> DVector<f64> {
        let mut e = DVector::zeros(self.dim());
        e[i] = 1.0;
        e
    }

    /// `[x, y]` in frame coordinates.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for a in 0..self.dim_v {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..self.dim_v {
                let w = x[a] * y[b];
                if w == 0.0 {
                    continue;
                }
                for k in self.z_indices() {
                    out[k] += w * self.c(a, b, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` in frame coordinates.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for b in 0..n {
            let col = self.bracket(x, &self.unit(b));
            m.set_column(b, &col);
        }
        m
    }

    /// `j(z)` on `v` for `z` given by its z-frame coefficients.
    pub fn j_of(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim_v, self.dim_v);
        for (t, jt) in self.j_matrices.iter().enumerate() {
            if z[t] != 0.0 {
                m += jt * z[t];
            }
        }
        m
    }

    /// Levi-Civita derivative `∇_x y` of left-invariant fields, frame
    /// coordinates, via the v/z case table.
    pub fn levi_civita(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let nv = self.dim_v;
        let mut out = self.bracket(x, y) * 0.5;
        let xv = x.rows(0, nv);
        let yv = y.rows(0, nv);
        let xz = x.rows(nv, self.dim_z).into_owned();
        let yz = y.rows(nv, self.dim_z).into_owned();
        let corr = self.j_of(&yz) * xv + self.j_of(&xz) * yv;
        for i in 0..nv {
            out[i] -= 0.5 * corr[i];
        }
        out
    }

    /// `∇_x y = ½([x,y] − ad_x^* y − ad_y^* x)`, evaluated directly.
    pub fn levi_civita_koszul(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let adx = self.ad(x);
        let ady = self.ad(y);
        (self.bracket(x, y) - adx.transpose() * y - ady.transpose() * x) * 0.5
    }

    /// Matrix of the skew endomorphism `∇_y`, columns `∇_y u_i`.
    pub fn nabla_matrix(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m.set_column(i, &self.levi_civita(y, &self.unit(i)));
        }
        m
    }

    /// `[tr(J_s J_t)]_{s,t}` over the z-frame.
    pub fn j_trace_form(&self) -> DMatrix<f64> {
        let m = self.dim_z;
        DMatrix::from_fn(m, m, |s, t| {
            (&self.j_matrices[s] * &self.j_matrices[t]).trace()
        })
    }

    /// Number of frame z-vectors on which `j` is injective.
    pub fn rank_j(&self) -> usize {
        self.dim_z - self.dim_a()
    }
}

/// `J_t[b][a] = g(z_t, [e_a, e_b])` for orthonormal `v_g`, `z_g` (user coords).
fn j_from_basis(l: &MetricLieAlgebra, v_g: &DMatrix<f64>, z_g: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let nv = v_g.ncols();
    let gz = z_g.transpose() * &l.gram;
    let mut out = vec![DMatrix::zeros(nv, nv); z_g.ncols()];
    for a in 0..nv {
        for b in (a + 1)..nv {
            let br = l.bracket(&v_g.column(a).into_owned(), &v_g.column(b).into_owned());
            let coeffs = &gz * br;
            for (t, jt) in out.iter_mut().enumerate() {
                jt[(b, a)] = coeffs[t];
                jt[(a, b)] = -coeffs[t];
            }
        }
    }
    out
}

/// Sub-algebra spanned by the orthonormal frame-coordinate columns of `q`,
/// with the induced (identity) metric. Errors if `q` does not span an ideal.
pub fn subalgebra_from_frame(
    frame: &AdaptedFrame,
    q: &DMatrix<f64>,
    name: impl Into<String>,
    tol: f64,
) -> Result<MetricLieAlgebra> {
    let p = q.ncols();
    let mut structure = vec![0.0; p * p * p];
    let mut leak: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let br = frame.bracket(&q.column(i).into_owned(), &q.column(j).into_owned());
            let coords = q.transpose() * &br;
            leak = leak.max((&br - q * &coords).norm());
            for k in 0..p {
                structure[(i * p + j) * p + k] = coords[k];
            }
        }
    }
    if leak > tol.max(1e-12) * 1e3 {
        return Err(Error::DecompositionAmbiguous(format!(
            "subspace is not closed under the bracket (leak {leak:.3e})"
        )));
    }
    MetricLieAlgebra::new(
        name,
        MetricLieAlgebra::default_names(p),
        structure,
        DMatrix::identity(p, p),
    )
}
