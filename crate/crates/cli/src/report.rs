//! Report documents and their serialization.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};
use sideinfo_core::{Bound, DensityOperator, MeasureReport};

use crate::error::CliError;

pub const TOOL_NAME: &str = "sideinfo";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to 12 significant digits and maps `-0` to `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    r + 0.0
}

fn ser_round<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round12(*x))
}

fn ser_round_opt<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round12(*v)),
        None => s.serialize_none(),
    }
}

/// SHA-256 over the dimensions and the row-major `(re, im)` pairs of the
/// matrix, each entry rounded to 12 significant digits first.
pub fn fingerprint(rho: &DensityOperator) -> String {
    let mut h = Sha256::new();
    for d in rho.layout().dims() {
        h.update((d as u64).to_le_bytes());
    }
    let m = rho.matrix();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            h.update(round12(m[(i, j)].re).to_le_bytes());
            h.update(round12(m[(i, j)].im).to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Fingerprint of an ordered collection of states.
pub fn corpus_fingerprint<'a>(states: impl IntoIterator<Item = &'a DensityOperator>) -> String {
    let mut h = Sha256::new();
    for rho in states {
        h.update(fingerprint(rho).as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// One result line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub fingerprint: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub point: BTreeMap<String, Rounded>,
    pub measure: String,
    #[serde(serialize_with = "ser_round")]
    pub value: f64,
    pub bound: Bound,
    #[serde(serialize_with = "ser_round")]
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts_within_tolerance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_round_opt")]
    pub entanglement_at_optimum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_a_prime: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cases: Option<usize>,
}

/// A float that serializes rounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rounded(#[serde(serialize_with = "ser_round")] pub f64);

impl Record {
    pub fn new(fingerprint: &str, measure: &str, value: f64, bound: Bound, tolerance: f64) -> Self {
        Self {
            fingerprint: fingerprint.to_string(),
            point: BTreeMap::new(),
            measure: measure.to_string(),
            value,
            bound,
            tolerance,
            passed: None,
            converged: None,
            degenerate: None,
            restarts_within_tolerance: None,
            candidates: None,
            entanglement_at_optimum: None,
            d_a_prime: None,
            d_c: None,
            k: None,
            cases: None,
        }
    }

    pub fn from_measure(fingerprint: &str, measure: &str, r: &MeasureReport, tolerance: f64) -> Self {
        Self {
            converged: Some(r.converged),
            degenerate: Some(r.degenerate),
            restarts_within_tolerance: Some(r.restarts_within_tolerance),
            candidates: Some(r.candidates),
            entanglement_at_optimum: Some(r.entanglement_at_optimum),
            ..Self::new(fingerprint, measure, r.value, r.bound, tolerance)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerSummary {
    pub restarts: usize,
    pub max_iterations: usize,
    #[serde(serialize_with = "ser_round")]
    pub tolerance: f64,
    pub window: usize,
    pub mode: sideinfo_core::Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub timestamp: String,
    pub state: String,
    pub optimizer: OptimizerSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Usage(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<String, CliError> {
        let point_keys: Vec<String> = {
            let mut keys: Vec<String> = self.records.iter().flat_map(|r| r.point.keys().cloned()).collect();
            keys.sort();
            keys.dedup();
            keys
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> =
            ["tool", "version", "command", "seed", "timestamp", "state", "fingerprint"].map(String::from).to_vec();
        header.extend(point_keys.iter().cloned());
        header.extend(
            [
                "measure",
                "value",
                "bound",
                "tolerance",
                "passed",
                "converged",
                "degenerate",
                "restarts_within_tolerance",
                "candidates",
                "entanglement_at_optimum",
                "d_a_prime",
                "d_c",
                "k",
                "cases",
            ]
            .map(String::from),
        );
        let csv_err = |e: csv::Error| CliError::Usage(e.to_string());
        w.write_record(&header).map_err(csv_err)?;
        let opt = |x: Option<String>| x.unwrap_or_default();
        for r in &self.records {
            let mut row = vec![
                self.tool.to_string(),
                self.version.to_string(),
                self.command.clone(),
                self.seed.to_string(),
                self.timestamp.clone(),
                self.state.clone(),
                r.fingerprint.clone(),
            ];
            for key in &point_keys {
                row.push(opt(r.point.get(key).map(|v| num(v.0))));
            }
            let bound = match r.bound {
                Bound::Upper => "upper",
                Bound::Lower => "lower",
                Bound::Exact => "exact",
            };
            row.extend([
                r.measure.clone(),
                num(r.value),
                bound.to_string(),
                num(r.tolerance),
                opt(r.passed.map(|b| b.to_string())),
                opt(r.converged.map(|b| b.to_string())),
                opt(r.degenerate.map(|b| b.to_string())),
                opt(r.restarts_within_tolerance.map(|n| n.to_string())),
                opt(r.candidates.map(|n| n.to_string())),
                opt(r.entanglement_at_optimum.map(num)),
                opt(r.d_a_prime.map(|n| n.to_string())),
                opt(r.d_c.map(|n| n.to_string())),
                opt(r.k.map(|n| n.to_string())),
                opt(r.cases.map(|n| n.to_string())),
            ]);
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Same text serde_json would produce for the rounded value.
fn num(x: f64) -> String {
    serde_json::to_string(&round12(x)).expect("float serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.1234567890123456), 0.123456789012);
        assert_eq!(round12(1.0 - 1e-15), 1.0);
        assert_eq!(round12(-0.0).to_bits(), 0.0f64.to_bits());
        assert_eq!(round12(-1e-20), -1e-20);
    }

    #[test]
    fn fingerprint_ignores_sub_rounding_noise() {
        use sideinfo_core::qstate::C64;
        let layout = sideinfo_core::SystemLayout::bipartite(2, 2).unwrap();
        let rho = DensityOperator::maximally_mixed(layout.clone());
        let mut m = rho.matrix().clone();
        m[(0, 0)] += C64::new(1e-17, 0.0);
        let noisy = DensityOperator::from_noisy(m, layout).unwrap();
        assert_eq!(fingerprint(&rho), fingerprint(&noisy));
        assert_eq!(fingerprint(&rho).len(), 64);
    }
}
