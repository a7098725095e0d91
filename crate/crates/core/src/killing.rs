//! Left-invariant Killing forms: `∇_y α = (1/(k+1)) y ⌟ dα` for all `y`.
//!
//! [`killing_nullspace_brute`] solves the equation directly as a linear
//! system over `Λ^k n*` and is the oracle for the structured solvers
//! [`solve_killing2`] and [`solve_killing3`], which assemble the solution
//! space factor by factor from the decomposition.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{AdaptedFrame, MetricLieAlgebra};
use crate::error::{Error, Result};
use crate::exterior::{self, bigrade, combos, lie_diff, mask_indices, Form};
use crate::linalg;
use crate::structure::{decompose, CompactBracket, Decomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Structured,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Brute => write!(f, "brute"),
            Method::Structured => write!(f, "structured"),
        }
    }
}

/// Basis of the space of Killing `k`-forms, in the ambient frame.
#[derive(Debug, Clone)]
pub struct KillingSpace {
    pub degree: usize,
    pub basis: Vec<Form>,
    pub method: Method,
    pub algebra: String,
}

impl KillingSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis coefficient vectors as matrix columns.
    pub fn matrix(&self) -> DMatrix<f64> {
        let rows = self.basis.first().map(|f| f.coeffs().len()).unwrap_or(0);
        let mut m = DMatrix::zeros(rows, self.basis.len());
        for (i, f) in self.basis.iter().enumerate() {
            m.set_column(i, f.coeffs());
        }
        m
    }

    /// Largest residual of projecting either basis onto the other's span.
    /// Infinite when the dimensions differ.
    pub fn span_residual(&self, other: &KillingSpace) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        if self.dim() == 0 {
            return 0.0;
        }
        let a = self.matrix();
        let b = other.matrix();
        let qa = linalg::orthonormalize_columns(&a, 1e-12);
        let qb = linalg::orthonormalize_columns(&b, 1e-12);
        linalg::projection_residual(&a, &qb).max(linalg::projection_residual(&b, &qa))
    }
}

fn space_from_forms(
    n: usize,
    degree: usize,
    forms: &[Form],
    method: Method,
    algebra: &str,
) -> KillingSpace {
    let mut m = DMatrix::zeros(exterior::binomial(n, degree), forms.len());
    for (i, f) in forms.iter().enumerate() {
        m.set_column(i, f.coeffs());
    }
    let q = linalg::orthonormalize_columns(&m, 1e-10);
    let canon = linalg::canonical_basis(&q);
    let basis = canon
        .column_iter()
        .map(|c| Form::from_coeffs(n, degree, c.into_owned()).expect("sizes match"))
        .collect();
    KillingSpace {
        degree,
        basis,
        method,
        algebra: algebra.to_string(),
    }
}

/// The two equivalent residuals of the Killing equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KillingResidual {
    /// `max_a |∇_{u_a} ω − (1/(k+1)) u_a ⌟ dω|`.
    pub direct: f64,
    /// `max_{a≤b} |u_a ⌟ ∇_{u_b} ω + u_b ⌟ ∇_{u_a} ω|`.
    pub polarized: f64,
}

impl KillingResidual {
    pub fn is_killing(&self, tol: f64) -> bool {
        self.direct <= tol
    }

    /// Whether both residuals give the same verdict at `tol`.
    pub fn verdicts_agree(&self, tol: f64) -> bool {
        (self.direct <= tol) == (self.polarized <= tol)
    }
}

pub fn killing_residuals(frame: &AdaptedFrame, omega: &Form) -> KillingResidual {
    let n = frame.dim();
    let k = omega.degree();
    let d_omega = lie_diff(frame, omega);
    let nablas: Vec<Form> = (0..n)
        .map(|a| exterior::nabla_form(frame, &frame.unit(a), omega))
        .collect();
    let mut direct: f64 = 0.0;
    for (a, na) in nablas.iter().enumerate() {
        let r = na.sub(&d_term(frame, &d_omega, k, &frame.unit(a)));
        direct = direct.max(r.norm());
    }
    let mut polarized: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let r = nablas[b]
                .contract(&frame.unit(a))
                .add(&nablas[a].contract(&frame.unit(b)));
            polarized = polarized.max(r.norm());
        }
    }
    KillingResidual { direct, polarized }
}

/// `(1/(k+1)) u ⌟ dω`, zero in top degree.
fn d_term(frame: &AdaptedFrame, d_omega: &Form, k: usize, u: &DVector<f64>) -> Form {
    if k >= frame.dim() {
        return Form::zero(frame.dim(), k);
    }
    d_omega.contract(u).scale(1.0 / (k as f64 + 1.0))
}

/// `max_a |∇_{u_a} ω − (1/(k+1)) u_a ⌟ dω|`; zero exactly on Killing forms.
pub fn killing_residual(frame: &AdaptedFrame, omega: &Form) -> f64 {
    killing_residuals(frame, omega).direct
}

/// Matrix of `α ↦ (∇_{u_a} α − (1/(k+1)) u_a ⌟ dα)_a` on `Λ^k n*`.
pub fn killing_operator(frame: &AdaptedFrame, k: usize) -> DMatrix<f64> {
    let n = frame.dim();
    let size = exterior::binomial(n, k);
    let nablas: Vec<DMatrix<f64>> = (0..n).map(|a| frame.nabla_matrix(&frame.unit(a))).collect();
    let units: Vec<DVector<f64>> = (0..n).map(|a| frame.unit(a)).collect();
    let mut op = DMatrix::zeros(n * size, size);
    let masks = combos(n, k);
    for (col, &mask) in masks.masks.iter().enumerate() {
        let e = Form::basis(n, &mask_indices(mask));
        let de = lie_diff(frame, &e);
        for a in 0..n {
            let r = e
                .derivation(&nablas[a])
                .sub(&d_term(frame, &de, k, &units[a]));
            op.view_mut((a * size, col), (size, 1))
                .copy_from(r.coeffs());
        }
    }
    op
}

/// Killing `k`-forms as the nullspace of [`killing_operator`].
pub fn killing_nullspace_brute(
    l: &MetricLieAlgebra,
    frame: &AdaptedFrame,
    k: usize,
    tol: f64,
) -> Result<KillingSpace> {
    let n = frame.dim();
    if k == 0 || k > n {
        return Err(Error::DimensionMismatch(format!(
            "degree {k} outside 1..={n}"
        )));
    }
    let op = killing_operator(frame, k);
    let ns = linalg::nullspace(&op, tol, "Killing operator")?;
    let canon = linalg::canonical_basis(&ns.basis);
    let basis = canon
        .column_iter()
        .map(|c| Form::from_coeffs(n, k, c.into_owned()).expect("sizes match"))
        .collect();
    Ok(KillingSpace {
        degree: k,
        basis,
        method: Method::Brute,
        algebra: l.name.clone(),
    })
}

/// `max_a |∇_{u_a} ω|` compared against `tol · |ω|`.
pub fn is_parallel(frame: &AdaptedFrame, omega: &Form, tol: f64) -> bool {
    parallel_defect(frame, omega) <= tol * omega.norm()
}

pub fn parallel_defect(frame: &AdaptedFrame, omega: &Form) -> f64 {
    (0..frame.dim())
        .map(|a| exterior::nabla_form(frame, &frame.unit(a), omega).norm())
        .fold(0.0, f64::max)
}

/// The three families of per-bidegree conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    /// `Σ_i [x,e_i] ∧ (x⌟e_i⌟α_{l+2}) = Σ_t j(z_t)x ∧ (x⌟z_t⌟α_l)`
    VV,
    /// `Σ_i j(z)e_i ∧ (z⌟e_i⌟α_l) = 0`
    ZZ,
    /// the mixed `(x, z)` condition
    VZ,
}

#[derive(Debug, Clone, Default)]
pub struct ConditionResiduals {
    pub entries: Vec<(Condition, usize, f64)>,
}

impl ConditionResiduals {
    pub fn get(&self, cond: Condition, l: usize) -> f64 {
        self.entries
            .iter()
            .find(|(c, ll, _)| *c == cond && *ll == l)
            .map(|e| e.2)
            .unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.2).fold(0.0, f64::max)
    }
}

/// Evaluates the per-bidegree conditions on frame vectors, polarizing the
/// quadratic ones over frame pairs.
pub fn killgen_residuals(frame: &AdaptedFrame, omega: &Form) -> ConditionResiduals {
    let n = frame.dim();
    let k = omega.degree();
    let nv = frame.dim_v;
    let comps: Vec<Form> = (0..=k).map(|l| bigrade(frame, omega, l)).collect();
    let comp = |l: isize| -> Option<&Form> {
        if l < 0 || l as usize > k {
            None
        } else {
            Some(&comps[l as usize])
        }
    };
    let zero = Form::zero(n, k.saturating_sub(1));
    let v_units: Vec<DVector<f64>> = (0..nv).map(|i| frame.unit(i)).collect();
    let z_units: Vec<DVector<f64>> = frame.z_indices().map(|i| frame.unit(i)).collect();
    // j(z)x embedded in n.
    let jz = |z: &DVector<f64>, x: &DVector<f64>| -> DVector<f64> {
        let zz = z.rows(nv, frame.dim_z).into_owned();
        let xv = x.rows(0, nv).into_owned();
        let mut out = DVector::zeros(n);
        out.rows_mut(0, nv).copy_from(&(frame.j_of(&zz) * xv));
        out
    };
    let one = Form::one_form;
    let wedge = |a: &Form, b: &Form| a.wedge(b).expect("degree bounded");

    // Σ_i [x,e_i] ∧ (x' ⌟ e_i ⌟ α)
    let vv_lhs = |x: &DVector<f64>, xp: &DVector<f64>, a: &Form| -> Form {
        v_units.iter().fold(zero.clone(), |acc, e| {
            acc.add(&wedge(
                &one(&frame.bracket(x, e)),
                &a.contract(e).contract(xp),
            ))
        })
    };
    // Σ_t j(z_t)x ∧ (x' ⌟ z_t ⌟ α)
    let vv_rhs = |x: &DVector<f64>, xp: &DVector<f64>, a: &Form| -> Form {
        z_units.iter().fold(zero.clone(), |acc, z| {
            acc.add(&wedge(&one(&jz(z, x)), &a.contract(z).contract(xp)))
        })
    };
    // Σ_i j(z)e_i ∧ (w ⌟ e_i ⌟ α)
    let jze = |z: &DVector<f64>, w: &DVector<f64>, a: &Form| -> Form {
        v_units.iter().fold(zero.clone(), |acc, e| {
            acc.add(&wedge(&one(&jz(z, e)), &a.contract(e).contract(w)))
        })
    };

    let mut out = ConditionResiduals::default();
    if k == 0 {
        return out;
    }
    for l in 0..k {
        let li = l as isize;
        // VV, polarized over v-frame pairs.
        let mut worst: f64 = 0.0;
        for i in 0..nv {
            for ip in i..nv {
                let (x, xp) = (&v_units[i], &v_units[ip]);
                let mut r = zero.clone();
                if let Some(a) = comp(li + 2) {
                    r = r.add(&vv_lhs(x, xp, a)).add(&vv_lhs(xp, x, a));
                }
                if let Some(a) = comp(li) {
                    r = r.sub(&vv_rhs(x, xp, a)).sub(&vv_rhs(xp, x, a));
                }
                worst = worst.max(r.norm());
            }
        }
        out.entries.push((Condition::VV, l, worst));

        // ZZ, polarized over z-frame pairs.
        let mut worst: f64 = 0.0;
        if let Some(a) = comp(li) {
            for s in 0..z_units.len() {
                for t in s..z_units.len() {
                    let (z, zp) = (&z_units[s], &z_units[t]);
                    let r = jze(z, zp, a).add(&jze(zp, z, a));
                    worst = worst.max(r.norm());
                }
            }
        }
        out.entries.push((Condition::ZZ, l, worst));

        // VZ, bilinear in (x, z).
        let mut worst: f64 = 0.0;
        for x in &v_units {
            for z in &z_units {
                let mut r = zero.clone();
                if let Some(a) = comp(li + 1) {
                    r = r
                        .add(&vv_lhs(x, z, a))
                        .sub(&a.contract(&jz(z, x)).scale(2.0))
                        .sub(&jze(z, x, a));
                }
                if let Some(a) = comp(li - 1) {
                    r = r.sub(&vv_rhs(x, z, a));
                }
                worst = worst.max(r.norm());
            }
        }
        out.entries.push((Condition::VZ, l, worst));
    }
    out
}

/// 2-form `α(x, y) = g(Ax, y)` for a skew endomorphism `A`.
pub fn two_form_from_endo(a: &DMatrix<f64>) -> Form {
    let n = a.nrows();
    let mut out = Form::zero(n, 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = a[(j, i)];
            if c != 0.0 {
                out = out.add(&Form::basis(n, &[i, j]).scale(c));
            }
        }
    }
    out
}

/// Inverse of [`two_form_from_endo`].
pub fn endo_from_two_form(alpha: &Form) -> DMatrix<f64> {
    assert_eq!(alpha.degree(), 2);
    let n = alpha.dim();
    let mut a = DMatrix::zeros(n, n);
    for (mask, w) in alpha.terms() {
        let idx = mask_indices(mask);
        a[(idx[1], idx[0])] = w;
        a[(idx[0], idx[1])] = -w;
    }
    a
}

/// `max_t max(|j(α₀ z_t) − 3 α₂ J_t|, |α₂ J_t + J_t α₂|)` for a 2-form
/// split as `α₂ ∈ so(v)`, `α₀ ∈ so(z)`.
pub fn kill2_residual(frame: &AdaptedFrame, alpha: &Form) -> f64 {
    let a = endo_from_two_form(alpha);
    let nv = frame.dim_v;
    let nz = frame.dim_z;
    let a2 = a.view((0, 0), (nv, nv)).into_owned();
    let a0 = a.view((nv, nv), (nz, nz)).into_owned();
    let mut worst: f64 = 0.0;
    for (t, jt) in frame.j_matrices.iter().enumerate() {
        let jz = frame.j_of(&a0.column(t).into_owned());
        worst = worst.max((&jz - &a2 * jt * 3.0).norm());
        worst = worst.max((&a2 * jt + jt * &a2).norm());
    }
    worst
}

/// `β(z_t)` as a skew endomorphism of `v`: `g(β(z_t)x, y) = α(x, y, z_t)`.
pub fn beta_maps(frame: &AdaptedFrame, alpha: &Form) -> Vec<DMatrix<f64>> {
    assert_eq!(alpha.degree(), 3, "β is defined for 3-forms");
    let nv = frame.dim_v;
    let mut out = vec![DMatrix::zeros(nv, nv); frame.dim_z];
    let b = bigrade(frame, alpha, 2);
    for (mask, w) in b.terms() {
        let idx = mask_indices(mask);
        let t = idx[2] - nv;
        out[t][(idx[1], idx[0])] = w;
        out[t][(idx[0], idx[1])] = -w;
    }
    out
}

/// Fits `β(z_t) = Σ_s B[s][t] J_s` over the injective part of `j`. Returns
/// the coefficient matrix (rows: injective z-frame indices, columns: all
/// z-frame indices) and the fit residual.
pub fn beta_coefficients(frame: &AdaptedFrame, alpha: &Form) -> (DMatrix<f64>, f64) {
    let betas = beta_maps(frame, alpha);
    let r = frame.rank_j();
    let js = &frame.j_matrices[..r];
    let m = frame.dim_z;
    let mut coeffs = DMatrix::zeros(r, m);
    if r == 0 {
        let res = betas.iter().map(|b| b.norm()).fold(0.0, f64::max);
        return (coeffs, res);
    }
    let gram = DMatrix::from_fn(r, r, |s, t| js[s].dot(&js[t]));
    let chol = gram
        .cholesky()
        .expect("j is injective on its first rank_j vectors");
    let mut res: f64 = 0.0;
    for (t, bt) in betas.iter().enumerate() {
        let rhs = DVector::from_fn(r, |s, _| js[s].dot(bt));
        let c = chol.solve(&rhs);
        let fit = js
            .iter()
            .zip(c.iter())
            .fold(DMatrix::zeros(frame.dim_v, frame.dim_v), |acc, (j, w)| {
                acc + j * *w
            });
        res = res.max((bt - fit).norm());
        coeffs.set_column(t, &c);
    }
    (coeffs, res)
}

/// The 3-form `β + γ` with `β(x, y, z) = g(j(Bz)x, y)` on `v × v × z` and
/// `γ(z, z', z'') = g(γ(z, z'), z'')` given as a bracket-like table.
pub fn three_form_from_parts(
    frame: &AdaptedFrame,
    b: &DMatrix<f64>,
    gamma: &CompactBracket,
    gamma_scale: f64,
) -> Form {
    let n = frame.dim();
    let nv = frame.dim_v;
    let mut out = Form::zero(n, 3);
    for t in 0..frame.dim_z {
        let jb = frame.j_of(&b.column(t).into_owned());
        let mut beta_t = DMatrix::zeros(n, n);
        beta_t.view_mut((0, 0), (nv, nv)).copy_from(&jb);
        let two = two_form_from_endo(&beta_t);
        out = out.add(
            &two.wedge(&Form::basis(n, &[nv + t]))
                .expect("degree 3 fits"),
        );
    }
    let m = frame.dim_z;
    for s in 0..m {
        for t in (s + 1)..m {
            for u in (t + 1)..m {
                let c = gamma.c(s, t, u);
                if c != 0.0 {
                    out =
                        out.add(&Form::basis(n, &[nv + s, nv + t, nv + u]).scale(gamma_scale * c));
                }
            }
        }
    }
    out
}

/// `γ(z_s, z_t)` read back from a 3-form, as `m` column vectors per pair.
pub fn gamma_map(frame: &AdaptedFrame, alpha: &Form, s: usize, t: usize) -> DVector<f64> {
    let nv = frame.dim_v;
    DVector::from_fn(frame.dim_z, |u, _| {
        if u == s || u == t || s == t {
            0.0
        } else {
            alpha.get(&sorted3(nv + s, nv + t, nv + u)) * perm_sign3(s, t, u)
        }
    })
}

fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut v = [a, b, c];
    v.sort_unstable();
    v
}

fn perm_sign3(a: usize, b: usize, c: usize) -> f64 {
    let inv = (a > b) as u32 + (a > c) as u32 + (b > c) as u32;
    if inv.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Data of one irreducible factor's Killing 2-form `α = α₂ + α₀`.
#[derive(Debug, Clone)]
pub struct Killing2Data {
    pub factor: usize,
    /// `J|_v` in the factor frame.
    pub alpha2: DMatrix<f64>,
    /// `3 J|_z` in the factor frame.
    pub alpha0: DMatrix<f64>,
    /// The form in ambient frame coordinates.
    pub form: Form,
}

/// Data of one naturally reductive factor's Killing 3-form `j ∘ B + γ`.
#[derive(Debug, Clone)]
pub struct Killing3Data {
    pub factor: usize,
    /// `B = Id` on the factor's center.
    pub b: DMatrix<f64>,
    /// `γ₀` as a 3-form in the factor frame.
    pub gamma: Form,
    pub compact_bracket: CompactBracket,
    /// The form in ambient frame coordinates.
    pub form: Form,
}

#[derive(Debug, Clone)]
pub struct Killing2Solution {
    pub decomposition: Decomposition,
    pub space: KillingSpace,
    pub factors: Vec<Killing2Data>,
    /// `Λ² a*` in ambient frame coordinates.
    pub abelian: Vec<Form>,
}

#[derive(Debug, Clone)]
pub struct Killing3Solution {
    pub decomposition: Decomposition,
    pub space: KillingSpace,
    pub factors: Vec<Killing3Data>,
    /// `Λ³ a*` in ambient frame coordinates.
    pub abelian: Vec<Form>,
}

fn abelian_forms(dec: &Decomposition, k: usize) -> Vec<Form> {
    let n = dec.frame.dim();
    let a = &dec.frame.a_indices;
    combos(a.len(), k)
        .masks
        .iter()
        .map(|&m| {
            let idx: Vec<usize> = mask_indices(m).into_iter().map(|i| a[i]).collect();
            Form::basis(n, &idx)
        })
        .collect()
}

/// Killing 2-forms from the decomposition: `Λ² a*` plus one form per factor
/// carrying a bi-invariant orthogonal complex structure.
pub fn solve_killing2(l: &MetricLieAlgebra, tol: f64) -> Result<Killing2Solution> {
    let dec = decompose(l, tol)?;
    let n = dec.frame.dim();
    let abelian = if n >= 2 {
        abelian_forms(&dec, 2)
    } else {
        vec![]
    };
    let mut factors = Vec::new();
    for (i, f) in dec.factors.iter().enumerate() {
        let Some(j) = &f.complex_structure else {
            continue;
        };
        let (nv, nz) = f.dims_vz();
        let mut a = DMatrix::zeros(nv + nz, nv + nz);
        let alpha2 = j.view((0, 0), (nv, nv)).into_owned();
        let alpha0 = j.view((nv, nv), (nz, nz)).into_owned() * 3.0;
        a.view_mut((0, 0), (nv, nv)).copy_from(&alpha2);
        a.view_mut((nv, nv), (nz, nz)).copy_from(&alpha0);
        let local = two_form_from_endo(&a);
        let form = local.pullback(&f.restriction());
        factors.push(Killing2Data {
            factor: i,
            alpha2,
            alpha0,
            form,
        });
    }
    let mut all = abelian.clone();
    all.extend(factors.iter().map(|d| d.form.clone()));
    let space = space_from_forms(n, 2, &all, Method::Structured, &l.name);
    Ok(Killing2Solution {
        decomposition: dec,
        space,
        factors,
        abelian,
    })
}

/// Killing 3-forms from the decomposition: `Λ³ a*` plus `j + γ₀` on each
/// naturally reductive factor, `γ₀(z, z') = 2 [[z, z']]`.
pub fn solve_killing3(l: &MetricLieAlgebra, tol: f64) -> Result<Killing3Solution> {
    let dec = decompose(l, tol)?;
    let n = dec.frame.dim();
    let abelian = if n >= 3 {
        abelian_forms(&dec, 3)
    } else {
        vec![]
    };
    let mut factors = Vec::new();
    for (i, f) in dec.factors.iter().enumerate() {
        let Some(bracket) = &f.compact_bracket else {
            continue;
        };
        let nz = f.frame.dim_z;
        let b = DMatrix::identity(nz, nz);
        let local = three_form_from_parts(&f.frame, &b, bracket, 2.0);
        let gamma = bigrade(&f.frame, &local, 0);
        let form = local.pullback(&f.restriction());
        factors.push(Killing3Data {
            factor: i,
            b,
            gamma,
            compact_bracket: bracket.clone(),
            form,
        });
    }
    let mut all = abelian.clone();
    all.extend(factors.iter().map(|d| d.form.clone()));
    let space = space_from_forms(n, 3, &all, Method::Structured, &l.name);
    Ok(Killing3Solution {
        decomposition: dec,
        space,
        factors,
        abelian,
    })
}

/// Structured solver for degrees 2 and 3, brute force otherwise.
pub fn solve(l: &MetricLieAlgebra, k: usize, method: Method, tol: f64) -> Result<KillingSpace> {
    match (method, k) {
        (Method::Structured, 2) => Ok(solve_killing2(l, tol)?.space),
        (Method::Structured, 3) => Ok(solve_killing3(l, tol)?.space),
        _ => {
            let frame = AdaptedFrame::new(l, tol)?;
            killing_nullspace_brute(l, &frame, k, tol)
        }
    }
}
