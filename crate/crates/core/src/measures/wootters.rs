use crate::error::{Error, Result};
use crate::qstate::linalg::{binary_entropy, c, eigh, eigvalsh, CMatrix, ZERO};
use crate::qstate::DensityOperator;

fn sigma_y_sigma_y() -> CMatrix {
    let sy = CMatrix::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]);
    sy.kronecker(&sy)
}

/// Two-qubit concurrence `max{0, λ₁ − λ₂ − λ₃ − λ₄}`, where `λ_i` are the
/// decreasing square roots of the eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`.
///
/// Those eigenvalues coincide with the spectrum of the Hermitian
/// `√ρ ρ̃ √ρ`, which is what gets diagonalized.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    if rho.layout().dims() != [2, 2] {
        return Err(Error::Shape(format!("concurrence needs two qubits, got {}", rho.layout())));
    }
    let yy = sigma_y_sigma_y();
    let tilde = &yy * rho.matrix().conjugate() * &yy;
    let (vals, vecs) = eigh(rho.matrix());
    let sqrt_diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(4, vals.iter().map(|&v| c(v.max(0.0).sqrt(), 0.0))));
    let sqrt_rho = &vecs * sqrt_diag * vecs.adjoint();
    let r = &sqrt_rho * tilde * &sqrt_rho;
    let lambdas: Vec<f64> = eigvalsh(&r).iter().map(|&m| m.max(0.0).sqrt()).collect();
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Closed-form two-qubit entanglement of formation, `h((1 + √(1 − C²))/2)`.
pub fn wootters_eof(rho: &DensityOperator) -> Result<f64> {
    let conc = concurrence(rho)?.min(1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - conc * conc).sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{state_family, BellKind, StateFamily};

    #[test]
    fn closed_form_examples() {
        let bell = state_family(&StateFamily::Bell(BellKind::PhiPlus)).unwrap();
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-7);
        assert!((wootters_eof(&bell).unwrap() - 1.0).abs() < 1e-9);
        let cc = state_family(&StateFamily::ClassicallyCorrelated { d: 2 }).unwrap();
        assert!(concurrence(&cc).unwrap() < 1e-12);
        assert!(wootters_eof(&cc).unwrap() < 1e-12);
    }

    #[test]
    fn werner_concurrence_is_linear_above_one_third() {
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let w = state_family(&StateFamily::Werner { p }).unwrap();
            let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert!((concurrence(&w).unwrap() - expected).abs() < 1e-7, "p = {p}");
            if p <= 1.0 / 3.0 {
                assert!(wootters_eof(&w).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_qubit_pairs() {
        let s = state_family(&StateFamily::ClassicallyCorrelated { d: 3 }).unwrap();
        assert!(matches!(wootters_eof(&s), Err(Error::Shape(_))));
    }
}
