//! Exterior algebra over an orthonormal frame.
//!
//! A [`Form`] of degree `k` on `R^n` stores one coefficient per strictly
//! increasing index tuple, in lexicographic order. Since the frame is
//! orthonormal, vectors and 1-forms share coordinates and the Euclidean inner
//! product of coefficient vectors is the induced inner product on `Λ^k`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::AdaptedFrame;
use crate::error::{Error, Result};
use crate::linalg;

/// Lexicographically ordered `k`-subsets of `0..n`, as bitmasks.
#[derive(Debug)]
pub struct Combos {
    pub masks: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl Combos {
    fn build(n: usize, k: usize) -> Self {
        let mut masks = Vec::new();
        let mut stack = Vec::with_capacity(k);
        fn rec(start: usize, n: usize, k: usize, stack: &mut Vec<usize>, out: &mut Vec<u32>) {
            if stack.len() == k {
                out.push(stack.iter().fold(0u32, |m, &i| m | (1 << i)));
                return;
            }
            for i in start..n {
                if n - i < k - stack.len() {
                    break;
                }
                stack.push(i);
                rec(i + 1, n, k, stack, out);
                stack.pop();
            }
        }
        rec(0, n, k, &mut stack, &mut masks);
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Self { masks, index }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    #[inline]
    pub fn position(&self, mask: u32) -> usize {
        self.index[&mask]
    }
}

type ComboCache = RwLock<HashMap<(usize, usize), Arc<Combos>>>;

pub fn combos(n: usize, k: usize) -> Arc<Combos> {
    static CACHE: OnceLock<ComboCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(c) = cache.read().expect("combo cache poisoned").get(&(n, k)) {
        return c.clone();
    }
    let built = Arc::new(Combos::build(n, k));
    cache
        .write()
        .expect("combo cache poisoned")
        .entry((n, k))
        .or_insert(built)
        .clone()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[inline]
fn bits_below(mask: u32, i: usize) -> u32 {
    (mask & ((1u32 << i) - 1)).count_ones()
}

#[inline]
fn sign(parity: u32) -> f64 {
    if parity & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// An alternating `k`-form on `R^n` in frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    n: usize,
    degree: usize,
    coeffs: DVector<f64>,
}

impl Form {
    pub fn zero(n: usize, degree: usize) -> Self {
        assert!(n <= 31, "frame dimension {n} too large");
        assert!(degree <= n, "degree {degree} exceeds dimension {n}");
        Self {
            n,
            degree,
            coeffs: DVector::zeros(binomial(n, degree)),
        }
    }

    /// The constant function `c`.
    pub fn scalar(n: usize, c: f64) -> Self {
        let mut f = Self::zero(n, 0);
        f.coeffs[0] = c;
        f
    }

    /// `e^{i_1} ∧ … ∧ e^{i_k}`; indices need not be sorted.
    pub fn basis(n: usize, indices: &[usize]) -> Self {
        let mut f = Self::zero(n, indices.len());
        let mut sorted = indices.to_vec();
        let mut parity = 0;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    parity += 1;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return f;
        }
        let mask = sorted.iter().fold(0u32, |m, &i| m | (1 << i));
        let pos = combos(n, indices.len()).position(mask);
        f.coeffs[pos] = sign(parity);
        f
    }

    /// The 1-form metrically dual to `x`.
    pub fn one_form(x: &DVector<f64>) -> Self {
        Self {
            n: x.len(),
            degree: 1,
            coeffs: x.clone(),
        }
    }

    pub fn from_coeffs(n: usize, degree: usize, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != binomial(n, degree) {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a {degree}-form on R^{n}",
                coeffs.len()
            )));
        }
        Ok(Self { n, degree, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// Coefficient on the increasing tuple `indices`.
    pub fn get(&self, indices: &[usize]) -> f64 {
        let b = Form::basis(self.n, indices);
        b.coeffs.dot(&self.coeffs) * b.coeffs.iter().sum::<f64>()
    }

    /// Iterator over `(mask, coefficient)` for non-zero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        let c = combos(self.n, self.degree);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(move |(i, &w)| (c.masks[i], w))
            .collect::<Vec<_>>()
            .into_iter()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn dot(&self, other: &Form) -> f64 {
        self.check_same(other);
        self.coeffs.dot(&other.coeffs)
    }

    pub fn scale(&self, c: f64) -> Form {
        Form {
            n: self.n,
            degree: self.degree,
            coeffs: &self.coeffs * c,
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        self.check_same(other);
        Form {
            n: self.n,
            degree: self.degree,
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.check_same(other);
        Form {
            n: self.n,
            degree: self.degree,
            coeffs: &self.coeffs - &other.coeffs,
        }
    }

    fn check_same(&self, other: &Form) {
        assert_eq!(
            (self.n, self.degree),
            (other.n, other.degree),
            "forms live in different spaces"
        );
    }

    /// Drops coefficients below `tol * max|coeff|`.
    pub fn chop(&self, tol: f64) -> Form {
        let scale = self.coeffs.amax();
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            if c.abs() <= tol * scale {
                *c = 0.0;
            }
        }
        out
    }

    /// Unit norm with first non-zero coefficient positive.
    pub fn normalized(&self) -> Form {
        let norm = self.norm();
        if norm == 0.0 {
            return self.clone();
        }
        Form {
            n: self.n,
            degree: self.degree,
            coeffs: linalg::normalize_sign(&self.coeffs / norm),
        }
    }

    /// Exterior product with shuffle signs.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        assert_eq!(self.n, other.n, "forms live on different spaces");
        let k = self.degree + other.degree;
        if k > self.n {
            return Err(Error::DegreeOverflow {
                left: self.degree,
                right: other.degree,
                dim: self.n,
            });
        }
        let mut out = Form::zero(self.n, k);
        let target = combos(self.n, k);
        for (ma, wa) in self.terms() {
            for (mb, wb) in other.terms() {
                if ma & mb != 0 {
                    continue;
                }
                // Inversions: pairs (i in a, j in b) with i > j.
                let parity: u32 = mask_indices(mb)
                    .into_iter()
                    .map(|j| (ma >> j).count_ones() - ((ma >> j) & 1))
                    .sum();
                out.coeffs[target.position(ma | mb)] += sign(parity) * wa * wb;
            }
        }
        Ok(out)
    }

    /// Interior product `x ⌟ self`. Degree-0 input gives the zero form.
    pub fn contract(&self, x: &DVector<f64>) -> Form {
        assert_eq!(x.len(), self.n);
        if self.degree == 0 {
            return Form::zero(self.n, 0);
        }
        let mut out = Form::zero(self.n, self.degree - 1);
        let target = combos(self.n, self.degree - 1);
        for (mask, w) in self.terms() {
            for (p, i) in mask_indices(mask).into_iter().enumerate() {
                if x[i] == 0.0 {
                    continue;
                }
                out.coeffs[target.position(mask & !(1 << i))] += sign(p as u32) * x[i] * w;
            }
        }
        out
    }

    /// Derivation action `Σ_i f(u_i) ∧ (u_i ⌟ ω)` of an endomorphism, with
    /// no skewness check.
    pub fn derivation(&self, f: &DMatrix<f64>) -> Form {
        let mut out = Form::zero(self.n, self.degree);
        if self.degree == 0 {
            return out;
        }
        let target = combos(self.n, self.degree);
        for (mask, w) in self.terms() {
            for (p, i) in mask_indices(mask).into_iter().enumerate() {
                let rest = mask & !(1 << i);
                let s_contract = sign(p as u32);
                for l in 0..self.n {
                    let fli = f[(l, i)];
                    if fli == 0.0 || rest & (1 << l) != 0 {
                        continue;
                    }
                    let s_wedge = sign(bits_below(rest, l));
                    out.coeffs[target.position(rest | (1 << l))] += s_contract * s_wedge * fli * w;
                }
            }
        }
        out
    }

    /// Pull back along the linear map `m: R^N → R^n` (an `n × N` matrix),
    /// giving a form on `R^N`.
    pub fn pullback(&self, m: &DMatrix<f64>) -> Form {
        assert_eq!(m.nrows(), self.n);
        let big = m.ncols();
        let rows: Vec<Form> = (0..self.n)
            .map(|i| Form::one_form(&m.row(i).transpose()))
            .collect();
        let mut out = Form::zero(big, self.degree);
        for (mask, w) in self.terms() {
            let mut acc = Form::scalar(big, w);
            for i in mask_indices(mask) {
                acc = acc.wedge(&rows[i]).expect("degree bounded by source");
            }
            out = out.add(&acc);
        }
        if self.degree == 0 {
            out.coeffs[0] = self.coeffs[0];
        }
        out
    }
}

/// Derivation extension of a skew endomorphism `f` to forms.
pub fn skew_extend(f: &DMatrix<f64>, omega: &Form, tol: f64) -> Result<Form> {
    let defect = linalg::skew_defect(f);
    if defect > tol * f.norm().max(1.0) {
        return Err(Error::NotSkew(defect));
    }
    Ok(omega.derivation(f))
}

/// Chevalley-Eilenberg differential in frame coordinates.
pub fn lie_diff(frame: &AdaptedFrame, omega: &Form) -> Form {
    let n = omega.dim();
    let k = omega.degree();
    assert_eq!(n, frame.dim());
    if k >= n {
        return Form::zero(n, (k + 1).min(n));
    }
    let mut out = Form::zero(n, k + 1);
    let src = combos(n, k);
    let target = combos(n, k + 1);
    let nv = frame.dim_v;
    for (pos, &mask) in target.masks.iter().enumerate() {
        let idx = mask_indices(mask);
        let mut total = 0.0;
        for p in 0..idx.len() {
            let (a, pa) = (idx[p], p);
            if a >= nv {
                break;
            }
            for (q, &b) in idx.iter().enumerate().skip(p + 1) {
                if b >= nv {
                    break;
                }
                let rest = mask & !(1 << a) & !(1 << b);
                let s_pq = sign((pa + q) as u32);
                for c in frame.z_indices() {
                    let cab = frame.c(a, b, c);
                    if cab == 0.0 || rest & (1 << c) != 0 {
                        continue;
                    }
                    // ω(u_c, rest...) = (-1)^{#rest below c} ω_{rest ∪ c}
                    let w = omega.coeffs[src.position(rest | (1 << c))];
                    total += s_pq * cab * sign(bits_below(rest, c)) * w;
                }
            }
        }
        out.coeffs[pos] = total;
    }
    out
}

/// `∇_y ω` for a left-invariant form.
pub fn nabla_form(frame: &AdaptedFrame, y: &DVector<f64>, omega: &Form) -> Form {
    omega.derivation(&frame.nabla_matrix(y))
}

/// Projection of `ω` onto `Λ^l v* ⊗ Λ^{k-l} z*`.
pub fn bigrade(frame: &AdaptedFrame, omega: &Form, l: usize) -> Form {
    let vmask: u32 = (1u32 << frame.dim_v) - 1;
    let c = combos(omega.dim(), omega.degree());
    let mut out = omega.clone();
    for (i, m) in c.masks.iter().enumerate() {
        if (m & vmask).count_ones() as usize != l {
            out.coeffs[i] = 0.0;
        }
    }
    out
}

/// Form JSON: `{"degree": k, "terms": [{"indices": [...], "coeff": c}]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FormJson {
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub indices: Vec<usize>,
    pub coeff: f64,
}

impl Form {
    pub fn to_json(&self) -> FormJson {
        FormJson {
            degree: self.degree,
            terms: self
                .terms()
                .map(|(mask, coeff)| TermJson {
                    indices: mask_indices(mask),
                    coeff,
                })
                .collect(),
        }
    }

    pub fn from_json(n: usize, json: &FormJson) -> Result<Form> {
        if json.degree > n {
            return Err(Error::Parse(format!(
                "degree {} exceeds dimension {n}",
                json.degree
            )));
        }
        let mut out = Form::zero(n, json.degree);
        for t in &json.terms {
            if t.indices.len() != json.degree || t.indices.iter().any(|&i| i >= n) {
                return Err(Error::Parse(format!("bad index tuple {:?}", t.indices)));
            }
            if t.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!(
                    "index tuple {:?} is not strictly increasing",
                    t.indices
                )));
            }
            out = out.add(&Form::basis(n, &t.indices).scale(t.coeff));
        }
        Ok(out)
    }
}
