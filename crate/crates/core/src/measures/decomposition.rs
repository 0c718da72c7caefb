use crate::error::{Error, Result};
use crate::qstate::linalg::{c, max_abs_diff, CMatrix, CVector};
use crate::qstate::{DensityOperator, PureState};
use crate::redistribution::bipartite_dims;

/// Entries with weight below this are dropped when compacting.
pub(crate) const WEIGHT_FLOOR: f64 = 1e-12;

/// Pure-state ensemble `{(p_i, |ψ_i⟩_AB)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    entries: Vec<(f64, PureState)>,
}

impl Decomposition {
    /// Checks normalization (1e-10), non-negativity and a common two-party layout.
    pub fn new(entries: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = entries.first() else {
            return Err(Error::Decomposition("empty decomposition".into()));
        };
        let layout = first.layout().clone();
        if layout.len() != 2 {
            return Err(Error::Decomposition(format!("states must live on two parties, got {layout}")));
        }
        let mut total = 0.0;
        for (p, psi) in &entries {
            if p.is_nan() || *p < 0.0 {
                return Err(Error::Decomposition(format!("negative weight {p}")));
            }
            if psi.layout() != &layout {
                return Err(Error::Decomposition("states have different layouts".into()));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Decomposition(format!("weights sum to {total}")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, PureState)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn density(&self) -> DensityOperator {
        let layout = self.entries[0].1.layout().clone();
        let d = layout.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, psi) in &self.entries {
            let v = psi.vector();
            m += v * v.adjoint() * c(*p, 0.0);
        }
        DensityOperator::from_parts_unchecked(m, layout)
    }

    /// Fails unless the ensemble averages to `rho` within 1e-9.
    pub fn check_realizes(&self, rho: &DensityOperator) -> Result<()> {
        if rho.layout().dims() != self.entries[0].1.layout().dims() {
            return Err(Error::Decomposition("decomposition and state have different dimensions".into()));
        }
        let dev = max_abs_diff(self.density().matrix(), rho.matrix());
        if dev > 1e-9 {
            return Err(Error::Decomposition(format!("ensemble deviates from ρ_AB by {dev:e}")));
        }
        Ok(())
    }

    /// Drops entries with weight below 1e-12 and renormalizes.
    pub fn compacted(&self) -> Self {
        let kept: Vec<(f64, PureState)> = self.entries.iter().filter(|(p, _)| *p > WEIGHT_FLOOR).cloned().collect();
        let total: f64 = kept.iter().map(|(p, _)| p).sum();
        Self { entries: kept.into_iter().map(|(p, s)| (p / total, s)).collect() }
    }

    /// `Σ p_i S(Tr_B ψ_i)`.
    pub fn average_entanglement(&self) -> f64 {
        let first = self.entries[0].1.layout().subsystems()[0].label.clone();
        self.entries
            .iter()
            .filter(|(p, _)| *p > 0.0)
            .map(|(p, psi)| p * psi.entropy_of(&[first.as_str()]).expect("own label"))
            .sum()
    }

    /// Ensemble induced by the isometry `U` (`k × rank`) acting on the
    /// purifying system: `√p_i |ψ_i⟩ = Σ_j U_ij √λ_j |j⟩`.
    pub fn from_isometry(rho: &DensityOperator, u: &CMatrix) -> Result<Self> {
        bipartite_dims(rho)?;
        let phi = rho.purification_matrix();
        if u.ncols() != phi.ncols() {
            return Err(Error::Shape(format!("isometry acts on {} columns, rank is {}", u.ncols(), phi.ncols())));
        }
        let psi = &phi * u.transpose();
        let mut entries = Vec::new();
        for i in 0..psi.ncols() {
            let col: CVector = psi.column(i).into_owned();
            let p = col.norm_squared();
            if p > WEIGHT_FLOOR {
                entries.push((p, PureState::normalized(col, rho.layout().clone())?));
            }
        }
        let total: f64 = entries.iter().map(|(p, _)| p).sum();
        Self::new(entries.into_iter().map(|(p, s)| (p / total, s)).collect())
    }

    /// The `k × rank` matrix `U` with `√p_i |ψ_i⟩ = Σ_j U_ij √λ_j |j⟩` in the
    /// eigenbasis used by the purification of `rho`.
    pub fn coefficients(&self, rho: &DensityOperator) -> Result<CMatrix> {
        self.check_realizes(rho)?;
        let phi = rho.purification_matrix();
        let norms: Vec<f64> = (0..phi.ncols()).map(|j| phi.column(j).norm_squared()).collect();
        let mut u = CMatrix::zeros(self.entries.len(), phi.ncols());
        for (i, (p, psi)) in self.entries.iter().enumerate() {
            let scaled = psi.vector() * c(p.sqrt(), 0.0);
            for j in 0..phi.ncols() {
                u[(i, j)] = phi.column(j).dotc(&scaled) / c(norms[j], 0.0);
            }
        }
        Ok(u)
    }
}
