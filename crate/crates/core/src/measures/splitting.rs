//! Optimization of `½ I(A:B|C)` over splittings `E → A' ⊗ C`.

use rayon::prelude::*;

use super::formation::DecompositionObjective;
use super::{select, Bound, Certificate, MeasureReport, OptimizerConfig};
use crate::error::{Error, Result};
use crate::mcs::{embed_mcs_isometry, splitting_from_decomposition};
use crate::optim::{local_search, LocalResult, Mode, StiefelObjective};
use crate::qstate::linalg::CMatrix;
use crate::qstate::{derive_seed, haar_isometry, DensityOperator};
use crate::redistribution::{cost_pair, split_purification, SplittingIsometry, SplittingObjective};

impl StiefelObjective for SplittingObjective {
    fn value(&self, v: &CMatrix) -> f64 {
        SplittingObjective::value(self, v)
    }

    fn value_and_gradient(&self, v: &CMatrix) -> (f64, CMatrix) {
        SplittingObjective::value_and_gradient(self, v)
    }
}

/// How a candidate's starting isometry is produced.
#[derive(Debug, Clone)]
enum Start {
    Given(CMatrix),
    Haar(u64),
    /// Optimize an MCS splitting with pointer dimension `k` first, then embed it.
    Mcs { k: usize, seed: u64 },
}

struct Problem<'a> {
    rho: &'a DensityOperator,
    d_a_prime: usize,
    d_c: usize,
    objective: SplittingObjective,
}

impl Problem<'_> {
    fn start(&self, start: &Start, cfg: &OptimizerConfig) -> Result<CMatrix> {
        let d_e = self.objective.d_e();
        match start {
            Start::Given(m) => Ok(m.clone()),
            Start::Haar(seed) => haar_isometry(self.objective.rows(), d_e, *seed),
            Start::Mcs { k, seed } => {
                let dec = DecompositionObjective::new(self.rho)?;
                let u0 = haar_isometry(*k, d_e, *seed)?;
                let u = local_search(&dec, &u0, Mode::Minimize, &cfg.settings()).point;
                embed_mcs_isometry(&u, self.d_a_prime, self.d_c).map(|v| v.matrix().clone())
            }
        }
    }

    fn run(&self, starts: Vec<Start>, mode: Mode, cfg: &OptimizerConfig) -> Result<MeasureReport> {
        let settings = cfg.settings();
        let results: Vec<LocalResult> = starts
            .par_iter()
            .map(|s| self.start(s, cfg).map(|x| local_search(&self.objective, &x, mode, &settings)))
            .collect::<Result<_>>()?;
        let sel = select(&results, mode, cfg.tolerance);
        let best = &results[sel.best];
        let splitting = SplittingIsometry::from_approximate(best.point.clone(), self.d_a_prime, self.d_c)?;
        let balance = cost_pair(&split_purification(self.rho, &splitting)?).e;
        Ok(MeasureReport {
            value: best.value,
            bound: Bound::for_mode(mode),
            certificate: Certificate::Splitting(splitting),
            entanglement_at_optimum: balance,
            converged: best.converged,
            restarts_within_tolerance: sel.within,
            degenerate: sel.within >= 2,
            candidates: results.len(),
            best_candidate: sel.best,
        })
    }
}

fn problem<'a>(rho: &'a DensityOperator, d_a_prime: usize, d_c: usize, cfg: &OptimizerConfig) -> Result<Problem<'a>> {
    cfg.validate()?;
    let objective = SplittingObjective::new(rho, d_a_prime, d_c)?;
    Ok(Problem { rho, d_a_prime, d_c, objective })
}

/// The all-at-receiver and all-at-sender splittings, when they fit.
fn degenerate_starts(d_e: usize, d_a_prime: usize, d_c: usize) -> Vec<Start> {
    let mut out = Vec::new();
    if let Ok(v) = SplittingIsometry::all_at_receiver(d_e, d_a_prime, d_c) {
        out.push(Start::Given(v.matrix().clone()));
    }
    if let Ok(v) = SplittingIsometry::all_at_sender(d_e, d_a_prime, d_c) {
        out.push(Start::Given(v.matrix().clone()));
    }
    out
}

/// Upper bound on the squashed entanglement: the smallest `½ I(A:B|C)` found
/// over splittings into `A'` (dimension `d_a_prime`) and `C` (dimension `d_c`).
pub fn squashed_upper(rho: &DensityOperator, d_a_prime: usize, d_c: usize, cfg: &OptimizerConfig) -> Result<MeasureReport> {
    squashed_upper_seeded(rho, d_a_prime, d_c, cfg, &[])
}

/// [`squashed_upper`] with caller-provided starting splittings, which are
/// tried before the built-in candidates.
///
/// Candidates, in order: `seeds`, the all-at-receiver splitting, then for each
/// restart a Haar splitting and an optimized MCS splitting with pointer
/// dimension `min(d_a_prime, d_c)` (when that is at least the rank).
pub fn squashed_upper_seeded(
    rho: &DensityOperator,
    d_a_prime: usize,
    d_c: usize,
    cfg: &OptimizerConfig,
    seeds: &[SplittingIsometry],
) -> Result<MeasureReport> {
    let p = problem(rho, d_a_prime, d_c, cfg)?;
    let d_e = p.objective.d_e();
    let mut starts: Vec<Start> = Vec::new();
    for s in seeds {
        if s.d_a_prime() != d_a_prime || s.d_c() != d_c || s.d_e() != d_e {
            return Err(Error::Shape("seed splitting does not match the search dimensions".into()));
        }
        starts.push(Start::Given(s.matrix().clone()));
    }
    if let Ok(v) = SplittingIsometry::all_at_receiver(d_e, d_a_prime, d_c) {
        starts.push(Start::Given(v.matrix().clone()));
    }
    let k_mcs = d_a_prime.min(d_c);
    for j in 0..cfg.restarts as u64 {
        starts.push(Start::Haar(derive_seed(cfg.seed, 2 * j)));
        if k_mcs >= d_e {
            starts.push(Start::Mcs { k: k_mcs, seed: derive_seed(cfg.seed, 2 * j + 1) });
        }
    }
    p.run(starts, Mode::Minimize, cfg)
}

/// [`squashed_upper`] with the MCS splitting of a formation optimum added as
/// one more candidate, so the result never exceeds that formation value.
///
/// `formation` must carry a decomposition certificate (as returned by
/// [`eof`](super::eof)). Its MCS splitting needs `A'` and `C` as large as the
/// decomposition, which can exceed `(d_a_prime, d_c)`; it is evaluated in its
/// own dimensions and not refined further. The winning certificate records
/// the dimensions it lives in. The extra candidate comes last in candidate
/// order.
pub fn squashed_upper_with_formation(
    rho: &DensityOperator,
    d_a_prime: usize,
    d_c: usize,
    formation: &MeasureReport,
    cfg: &OptimizerConfig,
) -> Result<MeasureReport> {
    let Certificate::Decomposition(dec) = &formation.certificate else {
        return Err(Error::Param("formation report has no decomposition certificate".into()));
    };
    let dec = dec.compacted();
    dec.check_realizes(rho)?;
    let mut report = squashed_upper(rho, d_a_prime, d_c, cfg)?;
    let m = dec.len().max(rho.rank());
    let injected = splitting_from_decomposition(rho, &dec, m, m)?;
    let cp = cost_pair(&split_purification(rho, &injected)?);
    let within = (cp.q - report.value).abs() <= 10.0 * cfg.tolerance;
    if within {
        report.restarts_within_tolerance += 1;
        report.degenerate = report.restarts_within_tolerance >= 2;
    }
    if cp.q < report.value {
        if !within {
            report.restarts_within_tolerance = 1;
            report.degenerate = false;
        }
        report.value = cp.q;
        report.entanglement_at_optimum = cp.e;
        report.certificate = Certificate::Splitting(injected);
        report.converged = formation.converged;
        report.best_candidate = report.candidates;
    }
    report.candidates += 1;
    Ok(report)
}

/// Lower bound on the puffed entanglement: the largest `½ I(A:B|C)` found over
/// splittings.
pub fn puffed_lower(rho: &DensityOperator, d_a_prime: usize, d_c: usize, cfg: &OptimizerConfig) -> Result<MeasureReport> {
    let p = problem(rho, d_a_prime, d_c, cfg)?;
    let mut starts = degenerate_starts(p.objective.d_e(), d_a_prime, d_c);
    starts.extend((0..cfg.restarts as u64).map(|j| Start::Haar(derive_seed(cfg.seed, 2 * j))));
    p.run(starts, Mode::Maximize, cfg)
}

/// Minimal (`cfg.mode = Minimize`) or maximal (`Maximize`) qubit rate over
/// unrestricted splittings of the given dimensions.
pub fn optimize_rate(rho: &DensityOperator, d_a_prime: usize, d_c: usize, cfg: &OptimizerConfig) -> Result<MeasureReport> {
    let p = problem(rho, d_a_prime, d_c, cfg)?;
    let mut starts = degenerate_starts(p.objective.d_e(), d_a_prime, d_c);
    starts.extend((0..cfg.restarts as u64).map(|j| Start::Haar(derive_seed(cfg.seed, 2 * j))));
    p.run(starts, cfg.mode, cfg)
}
