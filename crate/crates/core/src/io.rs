//! Algebra JSON file format.
//!
//! ```json
//! {"name": "h3", "dim": 3, "basis": ["e1", "e2", "z"],
//!  "brackets": [[0, 1, 2, 1.0]], "metric": {"identity": true}}
//! ```
//!
//! Indices are 0-based. Each bracket `[i, j, k, c]` means `[b_i, b_j] = c b_k`
//! plus the antisymmetric partner. A pair listed in both orders is read
//! literally, so inconsistent signs surface in validation. Omitted entries
//! are zero. The metric is either
//! `{"identity": true}` or `{"gram": [[...], ...]}`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::MetricLieAlgebra;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricJson {
    Identity { identity: bool },
    Gram { gram: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub name: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, f64)>,
    pub metric: MetricJson,
}

impl AlgebraJson {
    /// Normalized record of `l`: brackets with `i < j`, nonzero, in index
    /// order; identity metric written as `{"identity": true}`.
    pub fn from_algebra(l: &MetricLieAlgebra) -> Self {
        let n = l.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let c = l.c(i, j, k);
                    if c != 0.0 {
                        brackets.push((i, j, k, c));
                    }
                }
            }
        }
        let metric = if l.gram == DMatrix::identity(n, n) {
            MetricJson::Identity { identity: true }
        } else {
            MetricJson::Gram {
                gram: l
                    .gram
                    .row_iter()
                    .map(|r| r.iter().copied().collect())
                    .collect(),
            }
        };
        Self {
            name: l.name.clone(),
            dim: n,
            basis: Some(l.basis_names.clone()),
            brackets,
            metric,
        }
    }

    /// Builds the algebra without validating it.
    pub fn to_algebra(&self) -> Result<MetricLieAlgebra> {
        let n = self.dim;
        let names = match &self.basis {
            Some(b) if b.len() != n => {
                return Err(Error::Parse(format!(
                    "basis lists {} names for dimension {n}",
                    b.len()
                )))
            }
            Some(b) => b.clone(),
            None => MetricLieAlgebra::default_names(n),
        };
        let gram = match &self.metric {
            MetricJson::Identity { identity: true } => DMatrix::identity(n, n),
            MetricJson::Identity { identity: false } => {
                return Err(Error::Parse(
                    "metric {\"identity\": false} is not a metric; give a gram matrix".into(),
                ))
            }
            MetricJson::Gram { gram } => {
                if gram.len() != n || gram.iter().any(|r| r.len() != n) {
                    return Err(Error::Parse(format!("gram must be {n}x{n}")));
                }
                DMatrix::from_fn(n, n, |i, j| gram[i][j])
            }
        };
        let mut structure = vec![0.0; n * n * n];
        let mut seen = std::collections::HashSet::new();
        for &(i, j, k, c) in &self.brackets {
            if i >= n || j >= n || k >= n {
                return Err(Error::Parse(format!(
                    "bracket [{i}, {j}, {k}, {c}] has an index outside 0..{n}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::Parse(format!(
                    "bracket [{i}, {j}, {k}] has coefficient {c}"
                )));
            }
            if !seen.insert((i, j, k)) {
                return Err(Error::Parse(format!(
                    "bracket [{i}, {j}, {k}] is listed twice"
                )));
            }
        }
        // A pair listed in both orders is taken literally so that validation
        // can report inconsistent signs; otherwise the partner is implied.
        for &(i, j, k, c) in &self.brackets {
            structure[(i * n + j) * n + k] = c;
            if !seen.contains(&(j, i, k)) {
                structure[(j * n + i) * n + k] = -c;
            }
        }
        MetricLieAlgebra::new(self.name.clone(), names, structure, gram)
    }
}

pub fn to_json_string(l: &MetricLieAlgebra) -> String {
    serde_json::to_string_pretty(&AlgebraJson::from_algebra(l)).expect("plain data serializes")
}

/// Parses an algebra; does not validate it.
pub fn parse_algebra(text: &str) -> Result<MetricLieAlgebra> {
    let json: AlgebraJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    json.to_algebra()
}

pub fn read_algebra(path: impl AsRef<Path>) -> Result<MetricLieAlgebra> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_algebra(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn heisenberg_round_trip() {
        let h = catalog::heisenberg(1).unwrap();
        let text = to_json_string(&h);
        assert!(text.contains("\"identity\": true"));
        assert_eq!(parse_algebra(&text).unwrap(), h);
    }

    #[test]
    fn reversed_bracket_is_flipped() {
        let text = r#"{"name":"h3","dim":3,"brackets":[[1,0,2,-1.0]],"metric":{"identity":true}}"#;
        let l = parse_algebra(text).unwrap();
        assert_eq!(l.c(0, 1, 2), 1.0);
        assert_eq!(l.basis_names, vec!["e1", "e2", "e3"]);
    }

    #[test]
    fn both_orders_are_read_literally() {
        let text = r#"{"name":"bad","dim":3,"brackets":[[0,1,2,1.0],[1,0,2,1.0]],"metric":{"identity":true}}"#;
        let l = parse_algebra(text).unwrap();
        assert!(l.validate(1e-9).has("antisymmetry"));
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        for text in [
            "{",
            r#"{"name":"x","dim":2,"brackets":[[0,5,1,1.0]],"metric":{"identity":true}}"#,
            r#"{"name":"x","dim":2,"metric":{"gram":[[1.0]]}}"#,
            r#"{"name":"x","dim":2,"brackets":[[0,1,1,1.0],[0,1,1,2.0]],"metric":{"identity":true}}"#,
        ] {
            assert!(
                matches!(
                    parse_algebra(text),
                    Err(Error::Parse(_)) | Err(Error::DimensionMismatch(_))
                ),
                "{text}"
            );
        }
    }
}
