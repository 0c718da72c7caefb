//! Average entanglement over pure-state decompositions: formation (minimum)
//! and assistance (maximum).

use rayon::prelude::*;

use super::{select, Bound, Certificate, Decomposition, MeasureReport, OptimizerConfig};
use crate::error::{Error, Result};
use crate::mcs::mcs_cost_pair;
use crate::optim::{local_search, Mode, StiefelObjective};
use crate::qstate::linalg::{c, gram_entropy, gram_entropy_with_grad, CMatrix, ZERO};
use crate::qstate::{derive_seed, haar_isometry, marginal_entropy, DensityOperator};
use crate::redistribution::bipartite_dims;

/// Default ensemble size: the square of the rank.
pub fn default_k(rho: &DensityOperator) -> usize {
    let r = rho.rank().max(1);
    r * r
}

/// `Σ_i p_i S(Tr_B ψ_i)` for the ensemble induced by an isometry `U`
/// (`k × rank`) on the purifying system.
pub(crate) struct DecompositionObjective {
    phi: CMatrix,
    d_a: usize,
    d_b: usize,
}

impl DecompositionObjective {
    pub fn new(rho: &DensityOperator) -> Result<Self> {
        let (d_a, d_b) = bipartite_dims(rho)?;
        Ok(Self { phi: rho.purification_matrix(), d_a, d_b })
    }

    pub fn rank(&self) -> usize {
        self.phi.ncols()
    }

    fn member(&self, psi: &CMatrix, i: usize) -> CMatrix {
        CMatrix::from_fn(self.d_a, self.d_b, |a, b| psi[(a * self.d_b + b, i)])
    }
}

impl StiefelObjective for DecompositionObjective {
    fn value(&self, u: &CMatrix) -> f64 {
        let psi = &self.phi * u.transpose();
        (0..psi.ncols())
            .map(|i| {
                let p = psi.column(i).norm_squared();
                if p > 0.0 {
                    gram_entropy(&self.member(&psi, i)) + p * p.log2()
                } else {
                    0.0
                }
            })
            .sum()
    }

    fn value_and_gradient(&self, u: &CMatrix) -> (f64, CMatrix) {
        let psi = &self.phi * u.transpose();
        let mut g_psi = CMatrix::from_element(psi.nrows(), psi.ncols(), ZERO);
        let mut total = 0.0;
        for i in 0..psi.ncols() {
            let p = psi.column(i).norm_squared();
            if p <= 0.0 {
                continue;
            }
            let (s, z) = gram_entropy_with_grad(&self.member(&psi, i), -p.log2());
            total += s + p * p.log2();
            for a in 0..self.d_a {
                for b in 0..self.d_b {
                    g_psi[(a * self.d_b + b, i)] = z[(a, b)] * c(2.0, 0.0);
                }
            }
        }
        (total, g_psi.transpose() * self.phi.conjugate())
    }
}

/// Starting isometry for candidate `index`: the spectral decomposition first,
/// then Haar draws from independent sub-seeds.
pub(crate) fn decomposition_start(k: usize, rank: usize, seed: u64, index: usize) -> Result<CMatrix> {
    if index == 0 {
        let mut u = CMatrix::from_element(k, rank, ZERO);
        for j in 0..rank {
            u[(j, j)] = c(1.0, 0.0);
        }
        Ok(u)
    } else {
        haar_isometry(k, rank, derive_seed(seed, index as u64))
    }
}

pub(crate) fn check_k(rank: usize, k: usize) -> Result<()> {
    if k < rank {
        return Err(Error::Shape(format!("ensemble size k = {k} is below rank(ρ_AB) = {rank}")));
    }
    Ok(())
}

pub(crate) fn optimize_decompositions(
    rho: &DensityOperator,
    k: usize,
    cfg: &OptimizerConfig,
    mode: Mode,
) -> Result<MeasureReport> {
    cfg.validate()?;
    let objective = DecompositionObjective::new(rho)?;
    let rank = objective.rank();
    check_k(rank, k)?;
    let settings = cfg.settings();
    let results: Vec<_> = (0..=cfg.restarts)
        .into_par_iter()
        .map(|i| decomposition_start(k, rank, cfg.seed, i).map(|s| local_search(&objective, &s, mode, &settings)))
        .collect::<Result<_>>()?;
    let sel = select(&results, mode, cfg.tolerance);
    let best = &results[sel.best];
    let dec = Decomposition::from_isometry(rho, &best.point)?;
    let balance = mcs_cost_pair(&dec)?.e;
    Ok(MeasureReport {
        value: best.value,
        bound: Bound::for_mode(mode),
        certificate: Certificate::Decomposition(dec),
        entanglement_at_optimum: balance,
        converged: best.converged,
        restarts_within_tolerance: sel.within,
        degenerate: sel.within >= 2,
        candidates: results.len(),
        best_candidate: sel.best,
    })
}

/// Entanglement of formation over `k`-element decompositions (upper bound).
pub fn eof(rho: &DensityOperator, k: usize, cfg: &OptimizerConfig) -> Result<MeasureReport> {
    optimize_decompositions(rho, k, cfg, Mode::Minimize)
}

/// Single-copy entanglement of assistance over `k`-element decompositions (lower bound).
pub fn eoa_single(rho: &DensityOperator, k: usize, cfg: &OptimizerConfig) -> Result<MeasureReport> {
    optimize_decompositions(rho, k, cfg, Mode::Maximize)
}

/// `min{S(A), S(B)}`.
pub fn eoa_asymptotic(rho: &DensityOperator) -> Result<f64> {
    bipartite_dims(rho)?;
    let labels: Vec<String> = rho.layout().labels().map(str::to_string).collect();
    let s_a = marginal_entropy(rho, &labels[..1])?;
    let s_b = marginal_entropy(rho, &labels[1..])?;
    Ok(s_a.min(s_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{random_density_on, SystemLayout};

    #[test]
    fn objective_equals_ensemble_average() {
        let rho = random_density_on(SystemLayout::bipartite(2, 3).unwrap(), 4, 13).unwrap();
        let obj = DecompositionObjective::new(&rho).unwrap();
        let u = haar_isometry(6, 4, 1).unwrap();
        let dec = Decomposition::from_isometry(&rho, &u).unwrap();
        assert!((obj.value(&u) - dec.average_entanglement()).abs() < 1e-12);
        assert!((obj.value_and_gradient(&u).0 - obj.value(&u)).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let rho = random_density_on(SystemLayout::bipartite(3, 2).unwrap(), 3, 17).unwrap();
        let obj = DecompositionObjective::new(&rho).unwrap();
        let u = haar_isometry(5, 3, 2).unwrap();
        let (_, g) = obj.value_and_gradient(&u);
        let h = 1e-6;
        for idx in 0..u.len() {
            for (dir, im) in [(c(h, 0.0), false), (c(0.0, h), true)] {
                let mut p = u.clone();
                p[idx] += dir;
                let mut m = u.clone();
                m[idx] -= dir;
                let fd = (obj.value(&p) - obj.value(&m)) / (2.0 * h);
                let an = if im { g[idx].im } else { g[idx].re };
                assert!((fd - an).abs() < 1e-6, "entry {idx}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn k_below_rank_is_rejected() {
        let rho = random_density_on(SystemLayout::bipartite(2, 2).unwrap(), 3, 1).unwrap();
        assert!(matches!(eof(&rho, 2, &OptimizerConfig::default()), Err(Error::Shape(_))));
    }
}
