//! The state-spec document: either an explicit matrix or a family reference.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;
use sideinfo_core::qstate::{state_family, CMatrix, C64};
use sideinfo_core::{DensityOperator, Error as CoreError, StateFamily, SystemLayout};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    dims: Vec<usize>,
    matrix: Vec<Vec<Entry>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

/// Where a state comes from, before it is built.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Explicit(DensityOperator),
    Family { name: String, params: BTreeMap<String, f64> },
}

impl StateSource {
    /// Total Hilbert-space dimension, computed without building the state.
    pub fn dim(&self) -> Result<usize, CliError> {
        match self {
            StateSource::Explicit(rho) => Ok(rho.dim()),
            StateSource::Family { name, params } => Ok(family_dim(&family(name, params)?)),
        }
    }

    pub fn build(&self) -> Result<DensityOperator, CliError> {
        match self {
            StateSource::Explicit(rho) => Ok(rho.clone()),
            StateSource::Family { name, params } => Ok(state_family(&family(name, params)?).map_err(usage)?),
        }
    }
}

fn usage(e: CoreError) -> CliError {
    CliError::Usage(e.to_string())
}

fn family(name: &str, params: &BTreeMap<String, f64>) -> Result<StateFamily, CliError> {
    StateFamily::from_params(name, params).map_err(usage)
}

pub fn family_dim(f: &StateFamily) -> usize {
    match *f {
        StateFamily::Bell(_) | StateFamily::Werner { .. } => 4,
        StateFamily::ClassicallyCorrelated { d } | StateFamily::Isotropic { d, .. } => d * d,
        StateFamily::Random { d_a, d_b, .. } => d_a * d_b,
    }
}

fn default_labels(n: usize) -> Vec<String> {
    match n {
        2 => vec!["A".into(), "B".into()],
        _ => (1..=n).map(|i| format!("S{i}")).collect(),
    }
}

/// Parses a state-spec document without building family states.
pub fn parse_state_source(document: &str) -> Result<StateSource, CliError> {
    let value: Value = serde_json::from_str(document).map_err(|e| CliError::Parse(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| CliError::Parse("state spec must be an object".into()))?;
    if obj.contains_key("family") {
        let doc: FamilyDoc = serde_json::from_value(value).map_err(|e| CliError::Parse(e.to_string()))?;
        return Ok(StateSource::Family { name: doc.family, params: doc.params });
    }
    let doc: MatrixDoc = serde_json::from_value(value).map_err(|e| CliError::Parse(e.to_string()))?;
    let n: usize = doc.dims.iter().product();
    if doc.dims.is_empty() || doc.matrix.len() != n || doc.matrix.iter().any(|row| row.len() != n) {
        return Err(CliError::Validation {
            invariant: "dimension".into(),
            detail: format!("matrix must be {n}×{n} for dims {:?}", doc.dims),
        });
    }
    let labels = doc.labels.unwrap_or_else(|| default_labels(doc.dims.len()));
    if labels.len() != doc.dims.len() {
        return Err(CliError::Validation { invariant: "dimension".into(), detail: "one label per subsystem".into() });
    }
    let layout = SystemLayout::new(labels.iter().map(String::as_str).zip(doc.dims.iter().copied()))
        .map_err(|e| CliError::Validation { invariant: "dimension".into(), detail: e.to_string() })?;
    let m = CMatrix::from_fn(n, n, |i, j| C64::new(doc.matrix[i][j].re, doc.matrix[i][j].im));
    let rho = DensityOperator::new(m, layout).map_err(validation)?;
    Ok(StateSource::Explicit(rho))
}

/// Parses and builds the state described by `document`.
pub fn parse_state_spec(document: &str) -> Result<DensityOperator, CliError> {
    parse_state_source(document)?.build()
}

fn validation(e: CoreError) -> CliError {
    match e {
        CoreError::InvalidState { invariant, detail } => CliError::Validation { invariant: invariant.into(), detail },
        CoreError::Positivity { min_eigenvalue } => {
            CliError::Validation { invariant: "positivity".into(), detail: format!("eigenvalue {min_eigenvalue:e}") }
        }
        other => CliError::Validation { invariant: "dimension".into(), detail: other.to_string() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_doc(diag: [f64; 4]) -> String {
        let rows: Vec<String> = (0..4)
            .map(|i| {
                let entries: Vec<String> = (0..4)
                    .map(|j| format!("{{\"re\": {}, \"im\": 0}}", if i == j { diag[i] } else { 0.0 }))
                    .collect();
                format!("[{}]", entries.join(","))
            })
            .collect();
        format!("{{\"dims\": [2, 2], \"matrix\": [{}]}}", rows.join(","))
    }

    #[test]
    fn maximally_mixed_document() {
        let rho = parse_state_spec(&matrix_doc([0.25; 4])).unwrap();
        assert_eq!(rho.layout().dims(), vec![2, 2]);
        assert!((rho.matrix()[(3, 3)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn werner_family_document() {
        let rho = parse_state_spec(r#"{"family": "werner", "params": {"p": 1.0}}"#).unwrap();
        // singlet: ⟨01|ρ|10⟩ = -1/2
        assert!((rho.matrix()[(1, 2)].re + 0.5).abs() < 1e-12);
    }

    #[test]
    fn invariant_violations_are_named() {
        let err = parse_state_spec(&matrix_doc([0.3, 0.2, 0.2, 0.2])).unwrap_err();
        assert!(matches!(err, CliError::Validation { ref invariant, .. } if invariant == "trace"), "{err:?}");
        let err = parse_state_spec(&matrix_doc([0.6, 0.6, -0.1, -0.1])).unwrap_err();
        assert!(matches!(err, CliError::Validation { ref invariant, .. } if invariant == "positivity"), "{err:?}");
    }

    #[test]
    fn malformed_documents_are_parse_errors() {
        for doc in ["not json", "[1, 2]", r#"{"dims": [2]}"#, r#"{"family": "werner", "extra": 1}"#] {
            assert!(matches!(parse_state_spec(doc), Err(CliError::Parse(_))), "{doc}");
        }
    }

    #[test]
    fn family_dim_avoids_construction() {
        let mut params = BTreeMap::new();
        params.insert("d".to_string(), 100.0);
        let src = StateSource::Family { name: "random".into(), params };
        assert_eq!(src.dim().unwrap(), 10_000);
    }
}
