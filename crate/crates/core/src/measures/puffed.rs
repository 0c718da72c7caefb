use super::eoa_asymptotic;
use crate::error::Result;
use crate::qstate::{marginal_entropy, DensityOperator};
use crate::redistribution::bipartite_dims;

/// Gap `min{S(A₁A₂), S(B₁B₂)} − min{S(A₁),S(B₁)} − min{S(A₂),S(B₂)}` of the
/// closed form `min{S(A), S(B)}` between `ρ¹ ⊗ ρ²` (split as `A₁A₂ | B₁B₂`) and
/// the two factors.
pub fn puffed_superadditivity_gap(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<f64> {
    bipartite_dims(rho1)?;
    bipartite_dims(rho2)?;
    let r1 = rho1.relabel(&["A1", "B1"])?;
    let r2 = rho2.relabel(&["A2", "B2"])?;
    // Marginals of a product are products of marginals, which avoids forming ρ¹⊗ρ².
    let joint_a = r1.partial_trace(&["A1"])?.tensor_product(&r2.partial_trace(&["A2"])?)?;
    let joint_b = r1.partial_trace(&["B1"])?.tensor_product(&r2.partial_trace(&["B2"])?)?;
    let s_a12 = marginal_entropy(&joint_a, &["A1", "A2"])?;
    let s_b12 = marginal_entropy(&joint_b, &["B1", "B2"])?;
    Ok(s_a12.min(s_b12) - eoa_asymptotic(rho1)? - eoa_asymptotic(rho2)?)
}

/// Whether the closed form is strictly superadditive on this pair (gap > 1e-9).
pub fn puffed_superadditivity_witness(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<bool> {
    Ok(puffed_superadditivity_gap(rho1, rho2)? > 1e-9)
}
