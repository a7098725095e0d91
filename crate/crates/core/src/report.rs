//! Analysis records shared by the command line and the C interface. Every
//! JSON record carries `"schema": 1`.

use std::fmt::Write as _;

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::algebra::MetricLieAlgebra;
use crate::error::Result;
use crate::exterior::{binomial, FormJson};
use crate::killing::{self, KillingSpace, Method};
use crate::structure::{decompose, dimensions_of, Decomposition};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorSummary {
    pub dim: usize,
    pub dims_vz: (usize, usize),
    pub complex: bool,
    pub nat_reductive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub schema: u32,
    pub name: String,
    pub d: usize,
    pub factors: Vec<FactorSummary>,
    #[serde(rename = "dimK2")]
    pub dim_k2: usize,
    #[serde(rename = "dimK3")]
    pub dim_k3: usize,
}

impl DecompositionReport {
    pub fn new(name: &str, dec: &Decomposition) -> Self {
        let dims = dimensions_of(dec);
        Self {
            schema: SCHEMA,
            name: name.to_string(),
            d: dims.d,
            factors: dec
                .factors
                .iter()
                .map(|f| FactorSummary {
                    dim: f.dim(),
                    dims_vz: f.dims_vz(),
                    complex: f.has_complex_structure,
                    nat_reductive: f.naturally_reductive,
                })
                .collect(),
            dim_k2: dims.dim_k2,
            dim_k3: dims.dim_k3,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("algebra {}\nd = {}\n", self.name, self.d);
        write_factors(&mut s, &self.factors);
        let _ = writeln!(s, "dimK2 = {}\ndimK3 = {}", self.dim_k2, self.dim_k3);
        s
    }
}

fn write_factors(s: &mut String, factors: &[FactorSummary]) {
    let _ = writeln!(s, "factors = {}", factors.len());
    for (i, f) in factors.iter().enumerate() {
        let _ = writeln!(
            s,
            "  factor {i}: dim {} (v {}, z {}) complex={} nat_reductive={}",
            f.dim, f.dims_vz.0, f.dims_vz.1, f.complex, f.nat_reductive
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub name: String,
    pub n: usize,
    pub dim_v: usize,
    pub dim_z: usize,
    pub d: usize,
    pub r2: usize,
    pub r3: usize,
    pub factors: Vec<FactorSummary>,
    #[serde(rename = "dimK2")]
    pub dim_k2: usize,
    #[serde(rename = "dimK3")]
    pub dim_k3: usize,
    /// Eigenvalues of `[tr(J_s J_t)]`, ascending.
    pub j_trace_eigenvalues: Vec<f64>,
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "algebra {}\nn = {}\ndim v = {}\ndim z = {}\nd = {}\nr2 = {}\nr3 = {}\n",
            self.name, self.n, self.dim_v, self.dim_z, self.d, self.r2, self.r3
        );
        write_factors(&mut s, &self.factors);
        let _ = writeln!(s, "dimK2 = {}\ndimK3 = {}", self.dim_k2, self.dim_k3);
        let eig: Vec<String> = self
            .j_trace_eigenvalues
            .iter()
            .map(|x| format!("{x}"))
            .collect();
        let _ = writeln!(s, "j trace form eigenvalues = [{}]", eig.join(", "));
        s
    }
}

pub fn analyze(l: &MetricLieAlgebra, tol: f64) -> Result<AnalysisReport> {
    l.ensure_valid(tol)?;
    let dec = decompose(l, tol)?;
    let dims = dimensions_of(&dec);
    let base = DecompositionReport::new(&l.name, &dec);
    let mut eig: Vec<f64> = SymmetricEigen::new(dec.frame.j_trace_form())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(f64::total_cmp);
    Ok(AnalysisReport {
        schema: SCHEMA,
        name: l.name.clone(),
        n: l.dim(),
        dim_v: dec.frame.dim_v,
        dim_z: dec.frame.dim_z,
        d: dims.d,
        r2: dims.r2,
        r3: dims.r3,
        factors: base.factors,
        dim_k2: dims.dim_k2,
        dim_k3: dims.dim_k3,
        j_trace_eigenvalues: eig,
    })
}

pub fn decomposition(l: &MetricLieAlgebra, tol: f64) -> Result<DecompositionReport> {
    l.ensure_valid(tol)?;
    Ok(DecompositionReport::new(&l.name, &decompose(l, tol)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartDim {
    pub part: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KillingSummary {
    pub degree: usize,
    pub dim: usize,
    pub method: Method,
    pub per_factor: Vec<PartDim>,
    /// Basis forms in the adapted frame of the whole algebra.
    pub forms: Vec<FormJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KillingReport {
    pub schema: u32,
    pub name: String,
    pub degree: usize,
    /// Adapted frame vectors in user coordinates, one row per vector.
    pub frame: Vec<Vec<f64>>,
    pub runs: Vec<KillingSummary>,
    /// Mutual projection residual when both methods ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

impl KillingReport {
    pub fn to_text(&self) -> String {
        let mut s = format!("algebra {}\ndegree = {}\n", self.name, self.degree);
        for run in &self.runs {
            let _ = writeln!(s, "{} dim = {}", run.method, run.dim);
            for p in &run.per_factor {
                let _ = writeln!(s, "  {}: {}", p.part, p.dim);
            }
            for (i, f) in run.forms.iter().enumerate() {
                let terms: Vec<String> = f
                    .terms
                    .iter()
                    .map(|t| {
                        let idx: Vec<String> = t.indices.iter().map(|i| i.to_string()).collect();
                        format!("{} e^({})", t.coeff, idx.join(","))
                    })
                    .collect();
                let _ = writeln!(s, "  form {i}: {}", terms.join(" + "));
            }
        }
        if let Some(r) = self.span_residual {
            let _ = writeln!(s, "span residual = {r:e}");
        }
        if let Some(a) = self.agree {
            let _ = writeln!(s, "agree = {a}");
        }
        s
    }
}

fn summary(space: &KillingSpace, per_factor: Vec<PartDim>) -> KillingSummary {
    KillingSummary {
        degree: space.degree,
        dim: space.dim(),
        method: space.method,
        per_factor,
        forms: space
            .basis
            .iter()
            .map(|f| f.chop(1e-12).to_json())
            .collect(),
    }
}

fn brute_run(
    l: &MetricLieAlgebra,
    dec: &Decomposition,
    k: usize,
    tol: f64,
) -> Result<(KillingSummary, KillingSpace)> {
    let space = killing::killing_nullspace_brute(l, &dec.frame, k, tol)?;
    let mut parts = vec![PartDim {
        part: "abelian".into(),
        dim: binomial(dec.d(), k),
    }];
    for (i, f) in dec.factors.iter().enumerate() {
        let dim = if k <= f.dim() {
            killing::killing_nullspace_brute(&f.sub_algebra, &f.frame, k, tol)?.dim()
        } else {
            0
        };
        parts.push(PartDim {
            part: format!("factor {i}"),
            dim,
        });
    }
    Ok((summary(&space, parts), space))
}

fn structured_run(
    l: &MetricLieAlgebra,
    dec: &Decomposition,
    k: usize,
    tol: f64,
) -> Result<(KillingSummary, KillingSpace)> {
    let space = killing::solve(l, k, Method::Structured, tol)?;
    let mut parts = vec![PartDim {
        part: "abelian".into(),
        dim: binomial(dec.d(), k),
    }];
    for (i, f) in dec.factors.iter().enumerate() {
        let dim = match k {
            2 => f.has_complex_structure as usize,
            3 => f.naturally_reductive as usize,
            _ => 0,
        };
        parts.push(PartDim {
            part: format!("factor {i}"),
            dim,
        });
    }
    Ok((summary(&space, parts), space))
}

/// Runs the requested solvers. `methods` holds one or both methods; the
/// structured path exists for degrees 2 and 3 only.
pub fn killing_report(
    l: &MetricLieAlgebra,
    k: usize,
    methods: &[Method],
    tol: f64,
) -> Result<KillingReport> {
    l.ensure_valid(tol)?;
    let dec = decompose(l, tol)?;
    let mut runs = Vec::new();
    let mut spaces = Vec::new();
    for &m in methods {
        let (run, space) = match m {
            Method::Structured if k == 2 || k == 3 => structured_run(l, &dec, k, tol)?,
            Method::Structured => {
                return Err(crate::Error::Parse(format!(
                    "no structured solver for degree {k}; use --method brute"
                )))
            }
            Method::Brute => brute_run(l, &dec, k, tol)?,
        };
        spaces.push(space);
        runs.push(run);
    }
    let (span_residual, agree) = match spaces.as_slice() {
        [a, b] => {
            let r = a.span_residual(b);
            (
                r.is_finite().then_some(r),
                Some(a.dim() == b.dim() && r <= 1e-8),
            )
        }
        _ => (None, None),
    };
    Ok(KillingReport {
        schema: SCHEMA,
        name: l.name.clone(),
        degree: k,
        frame: dec
            .frame
            .frame
            .column_iter()
            .map(|c| {
                c.iter()
                    .map(|&x| if x.abs() < 1e-14 { 0.0 } else { x })
                    .collect()
            })
            .collect(),
        runs,
        span_residual,
        agree,
    })
}
