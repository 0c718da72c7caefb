//! Maximally correlated side information, `ρ_{A'C} = Σ_ij σ_ij |ii⟩⟨jj|`.
//!
//! A decomposition `{p_i, ψ_i}` of `ρ_AB` yields the purification
//! `Σ_i √p_i |ψ_i⟩_AB |ii⟩_{A'C}`, whose `A'C` marginal is maximally correlated
//! and for which `½ I(A:B|C) = Σ_i p_i S(Tr_B ψ_i)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{Bound, Certificate, Decomposition, MeasureReport, OptimizerConfig};
use crate::optim::{local_search, Mode, StiefelObjective};
use crate::qstate::linalg::{c, eigvalsh, hermiticity_defect, polar, CMatrix, CVector, ZERO};
use crate::qstate::{DensityOperator, PureState, SystemLayout};
use crate::redistribution::{
    cost_pair, CostPair, FourPartyState, SplittingIsometry, SplittingObjective, LABEL_A, LABEL_A_PRIME, LABEL_B,
    LABEL_C,
};

/// Hermitian, positive, unit-trace `k × k` matrix `σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MCSMatrix {
    sigma: CMatrix,
}

impl MCSMatrix {
    pub fn new(sigma: CMatrix) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() || sigma.nrows() == 0 {
            return Err(Error::Mcs(format!("σ must be square and nonempty, got {}x{}", sigma.nrows(), sigma.ncols())));
        }
        let herm = hermiticity_defect(&sigma);
        if herm > 1e-10 {
            return Err(Error::Mcs(format!("σ is not Hermitian (defect {herm:e})")));
        }
        let tr = sigma.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Mcs(format!("tr σ = {} + {}i", tr.re, tr.im)));
        }
        let min = eigvalsh(&sigma).last().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::Mcs(format!("σ has eigenvalue {min:e}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> &CMatrix {
        &self.sigma
    }

    pub fn k(&self) -> usize {
        self.sigma.nrows()
    }
}

/// `Σ_ij σ_ij |ii⟩⟨jj|` on `A' ⊗ C`, both of dimension `k`.
pub fn mcs_state(sigma: &MCSMatrix) -> Result<DensityOperator> {
    let k = sigma.k();
    let mut m = CMatrix::zeros(k * k, k * k);
    for i in 0..k {
        for j in 0..k {
            m[(i * k + i, j * k + j)] = sigma.sigma[(i, j)];
        }
    }
    DensityOperator::new(m, SystemLayout::new([(LABEL_A_PRIME, k), (LABEL_C, k)])?)
}

/// Builds `Σ_i √p_i |ψ_i⟩|ii⟩` and its `σ`. Entries with weight below 1e-12
/// are dropped first.
///
/// `σ_ij = √(p_i p_j) ⟨ψ_j|ψ_i⟩`, the index order for which `Tr_AB` of the
/// four-party state is exactly `mcs_state(σ)`.
pub fn mcs_from_decomposition(dec: &Decomposition) -> Result<(MCSMatrix, FourPartyState)> {
    let dec = dec.compacted();
    if dec.is_empty() {
        return Err(Error::Decomposition("decomposition has no weight above the floor".into()));
    }
    let dims = dec.entries()[0].1.layout().dims();
    let (d_a, d_b) = (dims[0], dims[1]);
    let k = dec.len();
    let mut sigma = CMatrix::zeros(k, k);
    for (i, (p, psi)) in dec.entries().iter().enumerate() {
        for (j, (q, phi)) in dec.entries().iter().enumerate() {
            sigma[(i, j)] = phi.inner(psi) * c((p * q).sqrt(), 0.0);
        }
    }
    let kk = k * k;
    let mut v = CVector::from_element(d_a * d_b * kk, ZERO);
    for (i, (p, psi)) in dec.entries().iter().enumerate() {
        let w = c(p.sqrt(), 0.0);
        for ab in 0..d_a * d_b {
            v[ab * kk + i * k + i] = psi.vector()[ab] * w;
        }
    }
    let layout = SystemLayout::new([(LABEL_A, d_a), (LABEL_B, d_b), (LABEL_A_PRIME, k), (LABEL_C, k)])?;
    let state = FourPartyState::new(PureState::normalized(v, layout)?)?;
    let sigma = (&sigma + sigma.adjoint()) * c(0.5, 0.0);
    Ok((MCSMatrix::new(sigma)?, state))
}

/// `(½ I(A:B|C), Σ_i p_i S(Tr_B ψ_i))` for the MCS purification of `dec`.
pub fn mcs_cmi_identity(dec: &Decomposition) -> Result<(f64, f64)> {
    let (_, state) = mcs_from_decomposition(dec)?;
    Ok((cost_pair(&state).q, dec.average_entanglement()))
}

/// Cost pair at the MCS splitting of `dec`.
pub fn mcs_cost_pair(dec: &Decomposition) -> Result<CostPair> {
    let (_, state) = mcs_from_decomposition(dec)?;
    Ok(cost_pair(&state))
}

/// The splitting `|j⟩_E ↦ Σ_i U_ij |i⟩_{A'} |i⟩_C` for a `k × rank` isometry `U`.
pub fn embed_mcs_isometry(u: &CMatrix, d_a_prime: usize, d_c: usize) -> Result<SplittingIsometry> {
    let k = u.nrows();
    if k > d_a_prime || k > d_c {
        return Err(Error::Shape(format!("MCS pointer dimension {k} exceeds dA' = {d_a_prime} or dC = {d_c}")));
    }
    let mut v = CMatrix::zeros(d_a_prime * d_c, u.ncols());
    for i in 0..k {
        for j in 0..u.ncols() {
            v[(i * d_c + i, j)] = u[(i, j)];
        }
    }
    SplittingIsometry::new(v, d_a_prime, d_c)
}

/// MCS splitting of the minimal purification of `rho` realizing `dec`.
pub fn splitting_from_decomposition(
    rho: &DensityOperator,
    dec: &Decomposition,
    d_a_prime: usize,
    d_c: usize,
) -> Result<SplittingIsometry> {
    let dec = dec.compacted();
    let u = dec.coefficients(rho)?;
    let u = polar(&u).ok_or_else(|| Error::Decomposition("coefficients are rank deficient".into()))?;
    embed_mcs_isometry(&u, d_a_prime, d_c)
}

/// `½ I(A:B|C)` restricted to MCS splittings, as a function of `U`.
struct McsObjective {
    inner: SplittingObjective,
    k: usize,
}

impl McsObjective {
    fn embed(&self, u: &CMatrix) -> CMatrix {
        let k = self.k;
        let mut v = CMatrix::zeros(k * k, u.ncols());
        for i in 0..k {
            for j in 0..u.ncols() {
                v[(i * k + i, j)] = u[(i, j)];
            }
        }
        v
    }
}

impl StiefelObjective for McsObjective {
    fn value(&self, u: &CMatrix) -> f64 {
        self.inner.value(&self.embed(u))
    }

    fn value_and_gradient(&self, u: &CMatrix) -> (f64, CMatrix) {
        let (f, g) = self.inner.value_and_gradient(&self.embed(u));
        let k = self.k;
        (f, CMatrix::from_fn(k, u.ncols(), |i, j| g[(i * k + i, j)]))
    }
}

/// Entanglement of formation computed as the smallest `½ I(A:B|C)` over MCS
/// side information with pointer dimension `k`.
pub fn eof_via_mcs(rho: &DensityOperator, k: usize, cfg: &OptimizerConfig) -> Result<MeasureReport> {
    cfg.validate()?;
    let inner = SplittingObjective::new(rho, k, k)?;
    let rank = inner.d_e();
    crate::measures::formation_check_k(rank, k)?;
    let objective = McsObjective { inner, k };
    let settings = cfg.settings();
    let results: Vec<_> = (0..=cfg.restarts)
        .into_par_iter()
        .map(|i| {
            crate::measures::formation_start(k, rank, cfg.seed, i)
                .map(|s| local_search(&objective, &s, Mode::Minimize, &settings))
        })
        .collect::<Result<_>>()?;
    let sel = crate::measures::select(&results, Mode::Minimize, cfg.tolerance);
    let best = &results[sel.best];
    let dec = Decomposition::from_isometry(rho, &best.point)?;
    let balance = mcs_cost_pair(&dec)?.e;
    Ok(MeasureReport {
        value: best.value,
        bound: Bound::Upper,
        certificate: Certificate::Decomposition(dec),
        entanglement_at_optimum: balance,
        converged: best.converged,
        restarts_within_tolerance: sel.within,
        degenerate: sel.within >= 2,
        candidates: results.len(),
        best_candidate: sel.best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::linalg::max_abs_diff;
    use crate::qstate::{basis_vector, state_family, BellKind, StateFamily};

    fn pure(v: CVector) -> PureState {
        PureState::normalized(v, SystemLayout::bipartite(2, 2).unwrap()).unwrap()
    }

    fn ket(a: usize, b: usize) -> CVector {
        basis_vector(&[2, 2], &[a, b])
    }

    #[test]
    fn mcs_state_examples() {
        let trivial = mcs_state(&MCSMatrix::new(CMatrix::identity(1, 1)).unwrap()).unwrap();
        assert_eq!(trivial.dim(), 1);
        let diag = MCSMatrix::new(CMatrix::identity(2, 2) * c(0.5, 0.0)).unwrap();
        let cc = state_family(&StateFamily::ClassicallyCorrelated { d: 2 }).unwrap();
        assert!(max_abs_diff(mcs_state(&diag).unwrap().matrix(), cc.matrix()) < 1e-15);
        let rank_one = MCSMatrix::new(CMatrix::from_element(2, 2, c(0.5, 0.0))).unwrap();
        let bell = state_family(&StateFamily::Bell(BellKind::PhiPlus)).unwrap();
        assert!(max_abs_diff(mcs_state(&rank_one).unwrap().matrix(), bell.matrix()) < 1e-15);
        assert!(matches!(MCSMatrix::new(CMatrix::identity(2, 2)), Err(Error::Mcs(_))));
    }

    #[test]
    fn sigma_of_overlapping_pair() {
        let plus = (ket(0, 0) + ket(0, 1) + ket(1, 0) + ket(1, 1)) * c(0.5, 0.0);
        let dec = Decomposition::new(vec![(0.5, pure(ket(0, 0))), (0.5, pure(plus))]).unwrap();
        let (sigma, state) = mcs_from_decomposition(&dec).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(0.5, 0.0)]);
        assert!(max_abs_diff(sigma.sigma(), &expected) < 1e-15);
        let side = state.pure().reduced(&[LABEL_A_PRIME, LABEL_C]).unwrap();
        assert!(max_abs_diff(side.matrix(), mcs_state(&sigma).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn complex_overlaps_keep_the_marginal_contract() {
        let a = pure(ket(0, 0) + ket(1, 1) * c(0.0, 1.0));
        let b = pure(ket(0, 0) * c(0.3, 0.2) + ket(0, 1) * c(-0.1, 0.7) + ket(1, 1));
        let dec = Decomposition::new(vec![(0.4, a), (0.6, b)]).unwrap();
        let (sigma, state) = mcs_from_decomposition(&dec).unwrap();
        let side = state.pure().reduced(&[LABEL_A_PRIME, LABEL_C]).unwrap();
        assert!(max_abs_diff(side.matrix(), mcs_state(&sigma).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn identity_on_small_ensembles() {
        let phi = pure(ket(0, 0) + ket(1, 1));
        let (lhs, rhs) = mcs_cmi_identity(&Decomposition::new(vec![(1.0, phi.clone())]).unwrap()).unwrap();
        assert!((lhs - 1.0).abs() < 1e-12 && (rhs - 1.0).abs() < 1e-12);
        let psi_plus = pure(ket(0, 1) + ket(1, 0));
        let dec = Decomposition::new(vec![(0.5, pure(ket(0, 0))), (0.5, psi_plus)]).unwrap();
        let (lhs, rhs) = mcs_cmi_identity(&dec).unwrap();
        assert!((lhs - 0.5).abs() < 1e-12 && (rhs - 0.5).abs() < 1e-12);
        let cp = mcs_cost_pair(&Decomposition::new(vec![(1.0, phi)]).unwrap()).unwrap();
        assert!((cp.q - 1.0).abs() < 1e-12 && cp.e.abs() < 1e-12);
        let flags = Decomposition::new(vec![(0.5, pure(ket(0, 0))), (0.5, pure(ket(1, 1)))]).unwrap();
        let cp = mcs_cost_pair(&flags).unwrap();
        assert!(cp.q.abs() < 1e-12 && cp.e.abs() < 1e-12);
    }

    #[test]
    fn zero_weights_are_compacted() {
        let dec = Decomposition::new(vec![(1.0, pure(ket(0, 0))), (0.0, pure(ket(1, 1)))]).unwrap();
        let (sigma, _) = mcs_from_decomposition(&dec).unwrap();
        assert_eq!(sigma.k(), 1);
    }
}
