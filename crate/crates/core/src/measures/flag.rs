//! Classical-flag extensions of separable states.

use super::decomposition::WEIGHT_FLOOR;
use super::Decomposition;
use crate::error::{Error, Result};
use crate::mcs::splitting_from_decomposition;
use crate::qstate::linalg::{c, eigh, max_abs_diff, CMatrix, CVector};
use crate::qstate::{DensityOperator, PureState, SystemLayout};
use crate::redistribution::{bipartite_dims, SplittingIsometry};

/// Label of the flag system appended by [`flag_extension`].
pub const FLAG_LABEL: &str = "E~";

/// One product term `p · ρ_A ⊗ ρ_B` of a separable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparablePart {
    pub weight: f64,
    pub rho_a: DensityOperator,
    pub rho_b: DensityOperator,
}

fn check_parts(rho_ab: &DensityOperator, parts: &[SeparablePart]) -> Result<()> {
    let (d_a, d_b) = bipartite_dims(rho_ab)?;
    if parts.is_empty() {
        return Err(Error::Decomposition("no separable parts given".into()));
    }
    let mut sum = CMatrix::zeros(d_a * d_b, d_a * d_b);
    for part in parts {
        if part.weight < 0.0 {
            return Err(Error::Decomposition(format!("negative weight {}", part.weight)));
        }
        if part.rho_a.dim() != d_a || part.rho_b.dim() != d_b {
            return Err(Error::Decomposition("part dimensions do not match ρ_AB".into()));
        }
        sum += part.rho_a.matrix().kronecker(part.rho_b.matrix()) * c(part.weight, 0.0);
    }
    let dev = max_abs_diff(&sum, rho_ab.matrix());
    if dev > 1e-9 {
        return Err(Error::Decomposition(format!("parts reconstruct ρ_AB only to {dev:e}")));
    }
    Ok(())
}

/// `Σ_i p_i ρ_A^i ⊗ ρ_B^i ⊗ |i⟩⟨i|`, an extension with `I(A:B|Ẽ) = 0`.
pub fn flag_extension(rho_ab: &DensityOperator, parts: &[SeparablePart]) -> Result<DensityOperator> {
    check_parts(rho_ab, parts)?;
    let n = parts.len();
    let d = rho_ab.dim();
    let mut m = CMatrix::zeros(d * n, d * n);
    for (i, part) in parts.iter().enumerate() {
        let mut flag = CMatrix::zeros(n, n);
        flag[(i, i)] = c(1.0, 0.0);
        m += part.rho_a.matrix().kronecker(part.rho_b.matrix()).kronecker(&flag) * c(part.weight, 0.0);
    }
    let layout = rho_ab.layout().concat(&SystemLayout::new([(FLAG_LABEL, n)])?)?;
    DensityOperator::from_noisy(m, layout)
}

/// Refines the parts into pure product states `p α_a β_b |a⟩|b⟩`.
fn pure_product_decomposition(rho_ab: &DensityOperator, parts: &[SeparablePart]) -> Result<Decomposition> {
    check_parts(rho_ab, parts)?;
    let mut entries = Vec::new();
    for part in parts {
        let (va, ua) = eigh(part.rho_a.matrix());
        let (vb, ub) = eigh(part.rho_b.matrix());
        for (ia, &alpha) in va.iter().enumerate() {
            for (ib, &beta) in vb.iter().enumerate() {
                let w = part.weight * alpha * beta;
                if w <= WEIGHT_FLOOR {
                    continue;
                }
                let a: CVector = ua.column(ia).into_owned();
                let b: CVector = ub.column(ib).into_owned();
                let v = a.kronecker(&b);
                entries.push((w, PureState::normalized(v, rho_ab.layout().clone())?));
            }
        }
    }
    let total: f64 = entries.iter().map(|(w, _)| w).sum();
    Decomposition::new(entries.into_iter().map(|(w, s)| (w / total, s)).collect())
}

/// The splitting that copies the pure-product label to both `A'` and `C`,
/// realizing a flag extension inside the purification. Needs
/// `d_a_prime, d_c ≥` the number of pure product terms.
pub fn flag_splitting(
    rho_ab: &DensityOperator,
    parts: &[SeparablePart],
    d_a_prime: usize,
    d_c: usize,
) -> Result<SplittingIsometry> {
    let dec = pure_product_decomposition(rho_ab, parts)?;
    splitting_from_decomposition(rho_ab, &dec, d_a_prime, d_c)
}
