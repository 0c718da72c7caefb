//! Correlation measures obtained by optimizing redistribution costs over
//! splittings of the purifying system and over pure-state decompositions.

mod decomposition;
mod flag;
mod formation;
mod puffed;
mod splitting;
mod wootters;

use serde::{Deserialize, Serialize};

pub use decomposition::Decomposition;
pub use flag::{flag_extension, flag_splitting, SeparablePart, FLAG_LABEL};
pub use formation::{default_k, eoa_asymptotic, eoa_single, eof};
pub(crate) use formation::{check_k as formation_check_k, decomposition_start as formation_start};
pub use puffed::{puffed_superadditivity_gap, puffed_superadditivity_witness};
pub use splitting::{optimize_rate, puffed_lower, squashed_upper, squashed_upper_seeded, squashed_upper_with_formation};
pub use wootters::{concurrence, wootters_eof};

use crate::error::{Error, Result};
use crate::optim::{best_index, LocalResult, Mode, SearchSettings};
use crate::redistribution::SplittingIsometry;

/// Settings shared by every optimizing measure. Measures with a fixed
/// direction (minimizing or maximizing) ignore `mode`; only
/// [`optimize_rate`] honours it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub mode: Mode,
    /// Iterations over which an improvement below `tolerance` counts as stagnation.
    pub window: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 4, max_iterations: 3000, tolerance: 1e-7, seed: 0, mode: Mode::Minimize, window: 25 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Param("restarts must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Param(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    pub(crate) fn settings(&self) -> SearchSettings {
        SearchSettings { max_iterations: self.max_iterations, tolerance: self.tolerance, window: self.window }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Upper,
    Lower,
    Exact,
}

impl Bound {
    /// Minimizing an infimum quantity gives an upper bound, maximizing a
    /// supremum quantity a lower bound.
    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Minimize => Bound::Upper,
            Mode::Maximize => Bound::Lower,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Splitting(SplittingIsometry),
    Decomposition(Decomposition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub value: f64,
    pub bound: Bound,
    pub certificate: Certificate,
    /// `S(A|C) − Q` at the reported optimum.
    pub entanglement_at_optimum: f64,
    pub converged: bool,
    /// Candidates whose final value lies within `10·tolerance` of the optimum.
    pub restarts_within_tolerance: usize,
    /// Set when at least two candidates tie within `10·tolerance`.
    pub degenerate: bool,
    pub candidates: usize,
    /// Index of the winning candidate in the candidate order.
    pub best_candidate: usize,
}

/// Picks the extremal local result and collects the tie statistics.
pub(crate) struct Selection {
    pub best: usize,
    pub within: usize,
}

pub(crate) fn select(results: &[LocalResult], mode: Mode, tolerance: f64) -> Selection {
    let values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let best = best_index(&values, mode).expect("at least one candidate");
    let within = values.iter().filter(|&&v| (v - values[best]).abs() <= 10.0 * tolerance).count();
    Selection { best, within }
}
