//! Named algebras, direct sums, the construction from representations of
//! compact Lie algebras, and the two classification lists.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::error::{Error, Result};
use crate::linalg;
use crate::structure::CompactBracket;

/// `h_{2l+1}`: `[e_{2i-1}, e_{2i}] = z`, identity metric.
pub fn heisenberg(l: usize) -> Result<MetricLieAlgebra> {
    if l == 0 {
        return Err(Error::DimensionMismatch("heisenberg needs l >= 1".into()));
    }
    let n = 2 * l + 1;
    let mut names: Vec<String> = (1..=2 * l).map(|i| format!("e{i}")).collect();
    names.push("z".into());
    let brackets: Vec<_> = (0..l).map(|i| (2 * i, 2 * i + 1, n - 1, 1.0)).collect();
    MetricLieAlgebra::from_brackets(format!("h{n}"), names, &brackets, DMatrix::identity(n, n))
}

/// The real algebra underlying the complex Heisenberg algebra with the metric
/// `g_λ` making `e_1, …, e_4, z_1/λ, z_2/λ` orthonormal.
pub fn complex_heisenberg(lambda: f64) -> Result<MetricLieAlgebra> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::DimensionMismatch(format!(
            "complex_heisenberg needs λ > 0, got {lambda}"
        )));
    }
    let names = ["e1", "e2", "e3", "e4", "z1", "z2"]
        .map(String::from)
        .to_vec();
    let brackets = [
        (0, 2, 4, 1.0),
        (1, 3, 4, -1.0),
        (1, 2, 5, 1.0),
        (0, 3, 5, 1.0),
    ];
    let l2 = lambda * lambda;
    let gram = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        1.0, 1.0, 1.0, 1.0, l2, l2,
    ]));
    MetricLieAlgebra::from_brackets(format!("h3C(λ={lambda})"), names, &brackets, gram)
}

/// `n_{3,2}`: `[e_1,e_2] = e_4`, `[e_1,e_3] = e_5`, `[e_2,e_3] = e_6`.
pub fn free_two_step_3() -> Result<MetricLieAlgebra> {
    MetricLieAlgebra::from_brackets(
        "n32",
        MetricLieAlgebra::default_names(6),
        &[(0, 1, 3, 1.0), (0, 2, 4, 1.0), (1, 2, 5, 1.0)],
        DMatrix::identity(6, 6),
    )
}

/// Abelian `ℝ^d` with the identity metric.
pub fn euclidean(d: usize) -> MetricLieAlgebra {
    MetricLieAlgebra::new(
        format!("R{d}"),
        (1..=d).map(|i| format!("a{i}")).collect(),
        vec![0.0; d * d * d],
        DMatrix::identity(d, d),
    )
    .expect("sizes are consistent")
}

/// Orthogonal direct sum with block-diagonal structure constants and metric.
/// Basis names are suffixed with the part number when they would collide.
pub fn direct_sum(parts: &[MetricLieAlgebra]) -> Result<MetricLieAlgebra> {
    if parts.is_empty() {
        return Err(Error::EmptySum);
    }
    let n: usize = parts.iter().map(|p| p.dim()).sum();
    let all_names: Vec<&String> = parts.iter().flat_map(|p| p.basis_names.iter()).collect();
    let collide = (0..all_names.len()).any(|i| all_names[..i].contains(&all_names[i]));
    let mut names = Vec::with_capacity(n);
    let mut structure = vec![0.0; n * n * n];
    let mut gram = DMatrix::zeros(n, n);
    let mut off = 0;
    for (pi, p) in parts.iter().enumerate() {
        let m = p.dim();
        for name in &p.basis_names {
            names.push(if collide {
                format!("{name}_{}", pi + 1)
            } else {
                name.clone()
            });
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    structure[((off + i) * n + off + j) * n + off + k] = p.c(i, j, k);
                }
            }
        }
        gram.view_mut((off, off), (m, m)).copy_from(&p.gram);
        off += m;
    }
    let name = parts
        .iter()
        .map(|p| p.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    MetricLieAlgebra::new(name, names, structure, gram)
}

/// `ℝ^d ⊕ h`, or `h` itself when `d = 0`.
pub fn with_flat(d: usize, h: MetricLieAlgebra) -> Result<MetricLieAlgebra> {
    if d == 0 {
        Ok(h)
    } else {
        direct_sum(&[euclidean(d), h])
    }
}

/// The metric algebra `v ⊕ z` with `g([x,y], z) = g_v(ρ(z)x, y)`, for a
/// faithful orthogonal representation `ρ` of a compact algebra `z` on an
/// orthonormal `v`. `rho[t]` is `ρ(z_t)`.
pub fn from_representation(
    bracket: &CompactBracket,
    rho: &[DMatrix<f64>],
    gram_z: &DMatrix<f64>,
    tol: f64,
) -> Result<MetricLieAlgebra> {
    let m = bracket.dim;
    if rho.len() != m || gram_z.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "{} representation matrices and a {}x{} metric for a {m}-dimensional algebra",
            rho.len(),
            gram_z.nrows(),
            gram_z.ncols()
        )));
    }
    let p = rho.first().map(|r| r.nrows()).unwrap_or(0);
    if rho.iter().any(|r| r.shape() != (p, p)) {
        return Err(Error::DimensionMismatch(
            "representation matrices differ in size".into(),
        ));
    }
    let scale = rho.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1.0);
    for r in rho {
        let defect = linalg::skew_defect(r);
        if defect > tol * scale {
            return Err(Error::NotSkew(defect));
        }
    }
    for s in 0..m {
        for t in 0..m {
            let comm = linalg::commutator(&rho[s], &rho[t]);
            let image = (0..m).fold(DMatrix::zeros(p, p), |acc, u| {
                acc + &rho[u] * bracket.c(s, t, u)
            });
            let defect = (comm - image).norm();
            if defect > tol * scale * scale {
                return Err(Error::NotRepresentation(defect));
            }
        }
    }
    let bscale = bracket.norm().max(1.0) * gram_z.norm().max(1.0);
    for s in 0..m {
        let ad = bracket.ad(s);
        let defect = (ad.transpose() * gram_z + gram_z * &ad).norm();
        if defect > tol * bscale {
            return Err(Error::NotAdInvariant(defect));
        }
    }
    let mut stacked = DMatrix::zeros(p * m, p);
    for (t, r) in rho.iter().enumerate() {
        stacked.view_mut((t * p, 0), (p, p)).copy_from(r);
    }
    let common = linalg::nullspace(&stacked, tol, "common kernel of the representation")?;
    if common.basis.ncols() > 0 {
        return Err(Error::TrivialSubrepresentation(common.basis.ncols()));
    }
    let g_inv = gram_z
        .clone()
        .try_inverse()
        .ok_or(Error::NotAdInvariant(f64::INFINITY))?;

    let n = p + m;
    let mut brackets = Vec::new();
    for a in 0..p {
        for b in (a + 1)..p {
            // g([e_a,e_b], z_t) = g(ρ(z_t)e_a, e_b) = ρ_t[b][a]
            let r = nalgebra::DVector::from_fn(m, |t, _| rho[t][(b, a)]);
            let w = &g_inv * r;
            for u in 0..m {
                if w[u] != 0.0 {
                    brackets.push((a, b, p + u, w[u]));
                }
            }
        }
    }
    let mut gram = DMatrix::identity(n, n);
    gram.view_mut((p, p), (m, m)).copy_from(gram_z);
    let mut names: Vec<String> = (1..=p).map(|i| format!("x{i}")).collect();
    names.extend((1..=m).map(|i| format!("z{i}")));
    MetricLieAlgebra::from_brackets("rep", names, &brackets, gram)
}

/// `so(3)` with `[[z_1,z_2]] = z_3` and cyclic, and its standard
/// representation `ρ(z_t) = L_t` on `ℝ³`.
pub fn so3_standard() -> (CompactBracket, Vec<DMatrix<f64>>) {
    let mut c = vec![0.0; 27];
    let mut put = |s: usize, t: usize, u: usize, v: f64| c[(s * 3 + t) * 3 + u] = v;
    for (s, t, u) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        put(s, t, u, 1.0);
        put(t, s, u, -1.0);
    }
    let bracket = CompactBracket::from_constants(3, c).expect("27 entries");
    let l = |a: usize, b: usize| {
        let mut m = DMatrix::zeros(3, 3);
        m[(b, a)] = 1.0;
        m[(a, b)] = -1.0;
        m
    };
    // L_1 rotates e_2 → e_3, L_2 rotates e_3 → e_1, L_3 rotates e_1 → e_2.
    (bracket, vec![l(1, 2), l(2, 0), l(0, 1)])
}

/// Parameters of the parametrized catalog constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub lambda: f64,
    pub l: usize,
    /// Dimension of an extra flat summand (or of `euclidean` itself).
    pub d: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            l: 1,
            d: None,
        }
    }
}

/// One building block of a catalog algebra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Block {
    Flat(usize),
    Heisenberg(usize),
    ComplexHeisenberg,
    Free32,
}

fn build_blocks(blocks: &[Block], lambda: f64) -> Result<MetricLieAlgebra> {
    let parts = blocks
        .iter()
        .map(|b| match *b {
            Block::Flat(d) => Ok(euclidean(d)),
            Block::Heisenberg(l) => heisenberg(l),
            Block::ComplexHeisenberg => complex_heisenberg(lambda),
            Block::Free32 => free_two_step_3(),
        })
        .collect::<Result<Vec<_>>>()?;
    if parts.len() == 1 {
        Ok(parts.into_iter().next().expect("one part"))
    } else {
        direct_sum(&parts)
    }
}

/// A classification entry: name, dimension and expected `(dim K², dim K³)`.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub key: &'static str,
    pub name: &'static str,
    pub dim: usize,
    pub expected: Option<(usize, usize)>,
    /// The entry depends on an external classification and has no
    /// construction here.
    pub construction_external: bool,
    pub blocks: Vec<Block>,
}

impl CatalogEntry {
    fn built(
        key: &'static str,
        name: &'static str,
        blocks: Vec<Block>,
        expected: (usize, usize),
    ) -> Self {
        let dim = blocks
            .iter()
            .map(|b| match *b {
                Block::Flat(d) => d,
                Block::Heisenberg(l) => 2 * l + 1,
                Block::ComplexHeisenberg | Block::Free32 => 6,
            })
            .sum();
        Self {
            key,
            name,
            dim,
            expected: Some(expected),
            construction_external: false,
            blocks,
        }
    }

    fn external(key: &'static str, name: &'static str, dim: usize) -> Self {
        Self {
            key,
            name,
            dim,
            expected: None,
            construction_external: true,
            blocks: vec![],
        }
    }

    /// Builds the entry with its catalog metric, `None` for placeholders.
    pub fn build(&self) -> Option<Result<MetricLieAlgebra>> {
        if self.construction_external {
            return None;
        }
        Some(build_blocks(&self.blocks, 1.0).map(|mut l| {
            l.name = self.key.to_string();
            l
        }))
    }
}

use Block::{ComplexHeisenberg as HC, Flat as R, Free32 as N32, Heisenberg as H};

fn entry_table() -> Vec<CatalogEntry> {
    let e = CatalogEntry::built;
    vec![
        e("h3", "h₃", vec![H(1)], (0, 1)),
        e("r+h3", "ℝ⊕h₃", vec![R(1), H(1)], (0, 1)),
        e("r2+h3", "ℝ²⊕h₃", vec![R(2), H(1)], (1, 1)),
        e("h5", "h₅", vec![H(2)], (0, 1)),
        e("r3+h3", "ℝ³⊕h₃", vec![R(3), H(1)], (3, 2)),
        e("h3c", "h₃^ℂ", vec![HC], (1, 0)),
        e("h3+h3", "h₃⊕h₃", vec![H(1), H(1)], (0, 2)),
        e("r+h5", "ℝ⊕h₅", vec![R(1), H(2)], (0, 1)),
        e("n32", "n₃,₂", vec![N32], (0, 1)),
        e("r+h3c", "ℝ⊕h₃^ℂ", vec![R(1), HC], (1, 0)),
        e("r4+h3", "ℝ²⊕(ℝ²⊕h₃)", vec![R(4), H(1)], (6, 5)),
        e("r2+h5", "ℝ²⊕h₅", vec![R(2), H(2)], (1, 1)),
        e("r5+h3", "ℝ²⊕(ℝ³⊕h₃)", vec![R(5), H(1)], (10, 11)),
        e("r2+h3c", "ℝ²⊕h₃^ℂ", vec![R(2), HC], (2, 0)),
        e("r2+h3+h3", "ℝ²⊕(h₃⊕h₃)", vec![R(2), H(1), H(1)], (1, 2)),
        e("r3+h5", "ℝ²⊕(ℝ⊕h₅)", vec![R(3), H(2)], (3, 2)),
        e("r2+n32", "ℝ²⊕n₃,₂", vec![R(2), N32], (1, 1)),
    ]
}

fn find_entry(key: &str) -> CatalogEntry {
    entry_table()
        .into_iter()
        .find(|e| e.key == key)
        .expect("table key")
}

/// The two classification lists: algebras of dimension ≤ 8 with non-zero
/// Killing 2-forms (14 classes) and of dimension ≤ 6 with non-zero Killing
/// 3-forms (8 classes). Members of `ℝ² ⊕ N₅` and `ℝ² ⊕ N₆` that the
/// classification names only through an external list are placeholders.
pub fn classification_lists() -> (Vec<CatalogEntry>, Vec<CatalogEntry>) {
    let two = vec![
        find_entry("r2+h3"),
        find_entry("r3+h3"),
        find_entry("h3c"),
        find_entry("r+h3c"),
        find_entry("r4+h3"),
        find_entry("r2+h5"),
        CatalogEntry::external("r2+n5-c", "ℝ²⊕h, h the third class of N₅", 7),
        find_entry("r5+h3"),
        find_entry("r2+h3c"),
        find_entry("r2+h3+h3"),
        find_entry("r3+h5"),
        find_entry("r2+n32"),
        CatalogEntry::external("r2+n6-f", "ℝ²⊕h, h a further class of N₆", 8),
        CatalogEntry::external("r2+n6-g", "ℝ²⊕h, h a further class of N₆", 8),
    ];
    let three = ["h3", "r+h3", "r2+h3", "h5", "r3+h3", "h3+h3", "r+h5", "n32"]
        .into_iter()
        .map(find_entry)
        .collect();
    (two, three)
}

/// Every buildable table entry, in table order.
pub fn entries() -> Vec<CatalogEntry> {
    entry_table()
}

/// Names accepted by [`lookup`] besides the table keys.
pub const PARAMETRIC: [&str; 4] = [
    "heisenberg",
    "complex_heisenberg",
    "free_two_step_3",
    "euclidean",
];

/// Builds a catalog algebra by name. `params.d` adds a flat summand, except
/// for `euclidean` where it is the dimension.
pub fn lookup(name: &str, params: &Params) -> Result<MetricLieAlgebra> {
    let base = match name {
        "heisenberg" => heisenberg(params.l)?,
        "complex_heisenberg" => complex_heisenberg(params.lambda)?,
        "free_two_step_3" => free_two_step_3()?,
        "euclidean" => return Ok(euclidean(params.d.unwrap_or(1))),
        key => {
            let entry = entry_table()
                .into_iter()
                .chain(classification_lists().0)
                .find(|e| e.key == key)
                .ok_or_else(|| Error::UnknownCatalogEntry(key.to_string()))?;
            if entry.construction_external {
                return Err(Error::UnknownCatalogEntry(format!(
                    "{key} has no explicit construction"
                )));
            }
            let mut l = build_blocks(&entry.blocks, params.lambda)?;
            l.name = key.to_string();
            l
        }
    };
    with_flat(params.d.unwrap_or(0), base)
}

/// A representative set of catalog algebras for property suites: the
/// parametric constructors at a few parameters and every table entry.
pub fn all_algebras() -> Vec<MetricLieAlgebra> {
    let mut out = vec![
        heisenberg(3).expect("l >= 1"),
        complex_heisenberg(2.0).expect("λ > 0"),
        complex_heisenberg(0.5).expect("λ > 0"),
        euclidean(3),
    ];
    out.extend(
        entry_table()
            .iter()
            .map(|e| e.build().expect("buildable").expect("valid blocks")),
    );
    out
}
