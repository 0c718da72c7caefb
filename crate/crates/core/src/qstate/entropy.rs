//! Von Neumann entropy and the mutual-information family, all in bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::linalg::entropy_of_spectrum;
use super::state::{DensityOperator, PureState, STATE_TOL};
use crate::error::{Error, Result};

/// Entropy in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EntropyValue(f64);

impl EntropyValue {
    pub fn bits(self) -> f64 {
        self.0
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

impl From<EntropyValue> for f64 {
    fn from(v: EntropyValue) -> f64 {
        v.0
    }
}

/// Eigenvalues in `[-1e-10, 0)` are roundoff and clipped; anything lower is an error.
fn clipped_spectrum(values: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(&min) = values.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -STATE_TOL {
            return Err(Error::Positivity { min_eigenvalue: min });
        }
    }
    Ok(values.into_iter().map(|v| v.max(0.0)).collect())
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<EntropyValue> {
    let spectrum = clipped_spectrum(rho.eigenvalues())?;
    Ok(EntropyValue(entropy_of_spectrum(&spectrum)))
}

/// Entropy of the marginal of `rho` on `labels`.
pub fn marginal_entropy<S: AsRef<str>>(rho: &DensityOperator, labels: &[S]) -> Result<f64> {
    Ok(von_neumann_entropy(&rho.partial_trace(labels)?)?.bits())
}

/// Checks that the label groups are nonempty, pairwise disjoint and cover the layout.
fn check_partition(rho: &DensityOperator, parts: &[&[&str]]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for part in parts {
        if part.is_empty() {
            return Err(Error::Layout("empty party in partition".into()));
        }
        for &l in *part {
            if rho.layout().position(l).is_none() {
                return Err(Error::Layout(format!("unknown label '{l}'")));
            }
            if seen.contains(&l) {
                return Err(Error::Layout(format!("label '{l}' appears in two parties")));
            }
            seen.push(l);
        }
    }
    if seen.len() != rho.layout().len() {
        return Err(Error::Layout("partition does not cover the layout".into()));
    }
    Ok(())
}

/// `I(A:B) = S(A) + S(B) - S(AB)`.
pub fn mutual_information(rho: &DensityOperator, part_a: &[&str], part_b: &[&str]) -> Result<f64> {
    check_partition(rho, &[part_a, part_b])?;
    let s_a = marginal_entropy(rho, part_a)?;
    let s_b = marginal_entropy(rho, part_b)?;
    let s_ab = von_neumann_entropy(rho)?.bits();
    Ok(s_a + s_b - s_ab)
}

/// `I(A:B|C) = S(AC) + S(BC) - S(ABC) - S(C)`.
pub fn conditional_mutual_information(
    rho: &DensityOperator,
    part_a: &[&str],
    part_b: &[&str],
    part_c: &[&str],
) -> Result<f64> {
    check_partition(rho, &[part_a, part_b, part_c])?;
    let ac: Vec<&str> = part_a.iter().chain(part_c).copied().collect();
    let bc: Vec<&str> = part_b.iter().chain(part_c).copied().collect();
    let s_ac = marginal_entropy(rho, &ac)?;
    let s_bc = marginal_entropy(rho, &bc)?;
    let s_c = marginal_entropy(rho, part_c)?;
    let s_abc = von_neumann_entropy(rho)?.bits();
    Ok(s_ac + s_bc - s_abc - s_c)
}

impl PureState {
    /// Entropy of the marginal on `labels`, computed from the smaller side of
    /// the Schmidt bipartition. An empty list or the full layout gives 0.
    pub fn entropy_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<f64> {
        let kept = self.layout().positions(labels)?;
        if kept.is_empty() || kept.len() == self.layout().len() {
            return Ok(0.0);
        }
        Ok(super::linalg::gram_entropy(&self.bipartition_matrix(&kept)))
    }

    pub fn mutual_information(&self, part_a: &[&str], part_b: &[&str]) -> Result<f64> {
        let ab: Vec<&str> = part_a.iter().chain(part_b).copied().collect();
        Ok(self.entropy_of(part_a)? + self.entropy_of(part_b)? - self.entropy_of(&ab)?)
    }

    /// `I(A:B|C)` of the marginal of this pure state on `A ∪ B ∪ C`.
    pub fn conditional_mutual_information(&self, part_a: &[&str], part_b: &[&str], part_c: &[&str]) -> Result<f64> {
        let ac: Vec<&str> = part_a.iter().chain(part_c).copied().collect();
        let bc: Vec<&str> = part_b.iter().chain(part_c).copied().collect();
        let abc: Vec<&str> = part_a.iter().chain(part_b).chain(part_c).copied().collect();
        Ok(self.entropy_of(&ac)? + self.entropy_of(&bc)? - self.entropy_of(&abc)? - self.entropy_of(part_c)?)
    }
}
