//! Cost pairs of state redistribution for a given splitting of the purifying system.
//!
//! The purification `|ψ⟩_ABE` of `ρ_AB` is mapped by an isometry `V: E → A'⊗C`
//! into a four-party pure state. The sender holds `A'`, the receiver holds `C`,
//! and the qubit/ebit costs of moving `A` to the receiver are
//! `Q = ½ I(A:B|C)` and `E = ½ I(A:A') − ½ I(A:C)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::layout::offsets;
use crate::qstate::linalg::{c, gram_entropy, gram_entropy_with_grad, isometry_defect, polar, CMatrix, CVector, ZERO};
use crate::qstate::{haar_isometry, DensityOperator, PureState, SystemLayout};

pub const LABEL_A: &str = "A";
pub const LABEL_B: &str = "B";
pub const LABEL_A_PRIME: &str = "A'";
pub const LABEL_C: &str = "C";

/// Isometry from the purifying system `E` into `A' ⊗ C`. Rows are indexed by
/// `a' · d_C + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingIsometry {
    matrix: CMatrix,
    d_a_prime: usize,
    d_c: usize,
}

impl SplittingIsometry {
    pub fn new(matrix: CMatrix, d_a_prime: usize, d_c: usize) -> Result<Self> {
        if d_a_prime == 0 || d_c == 0 {
            return Err(Error::Shape("side-information dimensions must be at least 1".into()));
        }
        if matrix.nrows() != d_a_prime * d_c {
            return Err(Error::Shape(format!(
                "splitting matrix has {} rows, expected dA'·dC = {}",
                matrix.nrows(),
                d_a_prime * d_c
            )));
        }
        if matrix.ncols() == 0 || matrix.ncols() > matrix.nrows() {
            return Err(Error::Shape(format!(
                "cannot embed dE = {} into dA'·dC = {}",
                matrix.ncols(),
                matrix.nrows()
            )));
        }
        let defect = isometry_defect(&matrix);
        if defect > 1e-10 {
            return Err(Error::Shape(format!("V†V deviates from the identity by {defect:e}")));
        }
        Ok(Self { matrix, d_a_prime, d_c })
    }

    /// Re-orthonormalizes (polar factor) before validating.
    pub fn from_approximate(matrix: CMatrix, d_a_prime: usize, d_c: usize) -> Result<Self> {
        let q = polar(&matrix).ok_or_else(|| Error::Shape("splitting matrix is rank deficient".into()))?;
        Self::new(q, d_a_prime, d_c)
    }

    pub fn haar(d_e: usize, d_a_prime: usize, d_c: usize, seed: u64) -> Result<Self> {
        check_room(d_e, d_a_prime, d_c)?;
        Self::new(haar_isometry(d_a_prime * d_c, d_e, seed)?, d_a_prime, d_c)
    }

    /// All of `E` goes to the receiver: `|e⟩ ↦ |0⟩_{A'} |e⟩_C`.
    pub fn all_at_receiver(d_e: usize, d_a_prime: usize, d_c: usize) -> Result<Self> {
        if d_c < d_e {
            return Err(Error::Shape(format!("dC = {d_c} cannot hold dE = {d_e}")));
        }
        let mut m = CMatrix::zeros(d_a_prime * d_c, d_e);
        for e in 0..d_e {
            m[(e, e)] = c(1.0, 0.0);
        }
        Self::new(m, d_a_prime, d_c)
    }

    /// All of `E` stays with the sender: `|e⟩ ↦ |e⟩_{A'} |0⟩_C`.
    pub fn all_at_sender(d_e: usize, d_a_prime: usize, d_c: usize) -> Result<Self> {
        if d_a_prime < d_e {
            return Err(Error::Shape(format!("dA' = {d_a_prime} cannot hold dE = {d_e}")));
        }
        let mut m = CMatrix::zeros(d_a_prime * d_c, d_e);
        for e in 0..d_e {
            m[(e * d_c, e)] = c(1.0, 0.0);
        }
        Self::new(m, d_a_prime, d_c)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn d_e(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn d_a_prime(&self) -> usize {
        self.d_a_prime
    }

    pub fn d_c(&self) -> usize {
        self.d_c
    }

    /// The same map with the roles of `A'` and `C` exchanged.
    pub fn swapped(&self) -> Self {
        let (da, dc) = (self.d_a_prime, self.d_c);
        let m = CMatrix::from_fn(da * dc, self.d_e(), |row, e| {
            let (c_idx, a_idx) = (row / da, row % da);
            self.matrix[(a_idx * dc + c_idx, e)]
        });
        Self { matrix: m, d_a_prime: dc, d_c: da }
    }

    /// `(U_{A'} ⊗ U_C) V`.
    pub fn with_local_unitaries(&self, u_a_prime: &CMatrix, u_c: &CMatrix) -> Result<Self> {
        if u_a_prime.shape() != (self.d_a_prime, self.d_a_prime) || u_c.shape() != (self.d_c, self.d_c) {
            return Err(Error::Shape("local unitaries do not match the side-information dimensions".into()));
        }
        Self::new(u_a_prime.kronecker(u_c) * &self.matrix, self.d_a_prime, self.d_c)
    }
}

pub(crate) fn check_room(d_e: usize, d_a_prime: usize, d_c: usize) -> Result<()> {
    if d_a_prime == 0 || d_c == 0 {
        return Err(Error::Shape("side-information dimensions must be at least 1".into()));
    }
    if d_a_prime * d_c < d_e {
        return Err(Error::Shape(format!("dA'·dC = {} is smaller than rank(ρ_AB) = {d_e}", d_a_prime * d_c)));
    }
    Ok(())
}

/// Qubit rate `q` and signed ebit balance `e` (negative means entanglement is gained).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostPair {
    pub q: f64,
    pub e: f64,
}

/// Pure state on `A ⊗ B ⊗ A' ⊗ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourPartyState {
    pure: PureState,
}

impl FourPartyState {
    pub fn new(pure: PureState) -> Result<Self> {
        let labels: Vec<&str> = pure.layout().labels().collect();
        if labels != [LABEL_A, LABEL_B, LABEL_A_PRIME, LABEL_C] {
            return Err(Error::Layout(format!("expected layout A, B, A', C; got {}", pure.layout())));
        }
        Ok(Self { pure })
    }

    pub fn pure(&self) -> &PureState {
        &self.pure
    }

    pub fn entropy(&self, labels: &[&str]) -> f64 {
        self.pure.entropy_of(labels).expect("canonical labels")
    }

    /// Marginal on `A ⊗ B`.
    pub fn source(&self) -> DensityOperator {
        self.pure.reduced(&[LABEL_A, LABEL_B]).expect("canonical labels")
    }
}

/// Checks that `rho` is a two-party state and returns its dimensions.
pub(crate) fn bipartite_dims(rho: &DensityOperator) -> Result<(usize, usize)> {
    match rho.layout().dims()[..] {
        [a, b] => Ok((a, b)),
        _ => Err(Error::Layout(format!("expected a two-party state, got layout {}", rho.layout()))),
    }
}

/// `(1_AB ⊗ V)|ψ⟩_ABE` for the minimal purification of `rho_ab`.
pub fn split_purification(rho_ab: &DensityOperator, splitting: &SplittingIsometry) -> Result<FourPartyState> {
    let (d_a, d_b) = bipartite_dims(rho_ab)?;
    let phi = rho_ab.purification_matrix();
    if phi.ncols() != splitting.d_e() {
        return Err(Error::Shape(format!(
            "splitting acts on dE = {}, but rank(ρ_AB) = {}",
            splitting.d_e(),
            phi.ncols()
        )));
    }
    let psi = &phi * splitting.matrix().transpose();
    let layout = SystemLayout::new([
        (LABEL_A, d_a),
        (LABEL_B, d_b),
        (LABEL_A_PRIME, splitting.d_a_prime()),
        (LABEL_C, splitting.d_c()),
    ])?;
    // Row-major flattening of Φ Vᵀ is the A, B, A', C amplitude order.
    let flat = CVector::from_column_slice(psi.transpose().as_slice());
    FourPartyState::new(PureState::normalized(flat, layout)?)
}

/// `Q = ½ I(A:B|C)`, `E = ½ I(A:A') − ½ I(A:C)`.
pub fn cost_pair(state: &FourPartyState) -> CostPair {
    let s = |l: &[&str]| state.entropy(l);
    let s_a = s(&[LABEL_A]);
    let s_ap = s(&[LABEL_A_PRIME]);
    let s_c = s(&[LABEL_C]);
    let s_ac = s(&[LABEL_A, LABEL_C]);
    let s_bc = s(&[LABEL_B, LABEL_C]);
    let s_aap = s(&[LABEL_A, LABEL_A_PRIME]);
    // S(ABC) = S(A') on a pure four-party state.
    let q = 0.5 * (s_ac + s_bc - s_ap - s_c);
    let i_a_ap = s_a + s_ap - s_aap;
    let i_a_c = s_a + s_c - s_ac;
    CostPair { q, e: 0.5 * i_a_ap - 0.5 * i_a_c }
}

/// `S(A|C) − Q`, which equals the ebit cost by purity.
pub fn entanglement_balance(state: &FourPartyState) -> f64 {
    let s_ac = state.entropy(&[LABEL_A, LABEL_C]);
    let s_c = state.entropy(&[LABEL_C]);
    s_ac - s_c - cost_pair(state).q
}

/// Exchanges the roles of `A'` and `C`, keeping the canonical label order.
pub fn swap_sides(state: &FourPartyState) -> FourPartyState {
    let swapped = state
        .pure
        .permute(&[LABEL_A, LABEL_B, LABEL_C, LABEL_A_PRIME])
        .and_then(|p| p.relabel(&[LABEL_A, LABEL_B, LABEL_A_PRIME, LABEL_C]))
        .expect("canonical labels");
    FourPartyState { pure: swapped }
}

/// `½ I(A:B|C)` as a function of the splitting isometry, with analytic gradient.
/// Amplitudes are `Φ Vᵀ` where `Φ` holds the purification columns `√λ_k |k⟩`.
pub(crate) struct SplittingObjective {
    phi: CMatrix,
    n_ac: usize,
    ac: (Vec<usize>, Vec<usize>),
    bc: (Vec<usize>, Vec<usize>),
    ap: (Vec<usize>, Vec<usize>),
    cc: (Vec<usize>, Vec<usize>),
}

impl SplittingObjective {
    pub fn new(rho_ab: &DensityOperator, d_a_prime: usize, d_c: usize) -> Result<Self> {
        let (d_a, d_b) = bipartite_dims(rho_ab)?;
        let phi = rho_ab.purification_matrix();
        check_room(phi.ncols(), d_a_prime, d_c)?;
        let dims = [d_a, d_b, d_a_prime, d_c];
        let split = |keep: &[usize]| {
            let rest: Vec<usize> = (0..4).filter(|p| !keep.contains(p)).collect();
            (offsets(&dims, keep), offsets(&dims, &rest))
        };
        Ok(Self {
            phi,
            n_ac: d_a_prime * d_c,
            ac: split(&[0, 3]),
            bc: split(&[1, 3]),
            ap: split(&[2]),
            cc: split(&[3]),
        })
    }

    pub fn d_e(&self) -> usize {
        self.phi.ncols()
    }

    pub fn rows(&self) -> usize {
        self.n_ac
    }

    fn amplitudes(&self, v: &CMatrix) -> CMatrix {
        &self.phi * v.transpose()
    }

    fn block(&self, psi: &CMatrix, idx: &(Vec<usize>, Vec<usize>)) -> CMatrix {
        let n = self.n_ac;
        CMatrix::from_fn(idx.0.len(), idx.1.len(), |i, j| {
            let f = idx.0[i] + idx.1[j];
            psi[(f / n, f % n)]
        })
    }

    pub fn value(&self, v: &CMatrix) -> f64 {
        let psi = self.amplitudes(v);
        let s = |idx| gram_entropy(&self.block(&psi, idx));
        0.5 * (s(&self.ac) + s(&self.bc) - s(&self.ap) - s(&self.cc))
    }

    pub fn value_and_gradient(&self, v: &CMatrix) -> (f64, CMatrix) {
        const INV_LN2: f64 = std::f64::consts::LOG2_E;
        let psi = self.amplitudes(v);
        let n = self.n_ac;
        let mut g_psi = CMatrix::from_element(psi.nrows(), n, ZERO);
        let mut total = 0.0;
        for (idx, sign) in [(&self.ac, 0.5), (&self.bc, 0.5), (&self.ap, -0.5), (&self.cc, -0.5)] {
            let (s, z) = gram_entropy_with_grad(&self.block(&psi, idx), INV_LN2);
            total += sign * s;
            for i in 0..idx.0.len() {
                for j in 0..idx.1.len() {
                    let f = idx.0[i] + idx.1[j];
                    g_psi[(f / n, f % n)] += z[(i, j)] * c(2.0 * sign, 0.0);
                }
            }
        }
        (total, g_psi.transpose() * self.phi.conjugate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{random_density_on, state_family, StateFamily};

    fn cc_state() -> DensityOperator {
        state_family(&StateFamily::ClassicallyCorrelated { d: 2 }).unwrap()
    }

    #[test]
    fn pure_source_has_trivial_environment() {
        let bell = state_family(&StateFamily::Bell(crate::qstate::BellKind::PhiPlus)).unwrap();
        let v = SplittingIsometry::new(CMatrix::identity(1, 1), 1, 1).unwrap();
        let st = split_purification(&bell, &v).unwrap();
        let back = st.source();
        assert!(crate::qstate::linalg::max_abs_diff(back.matrix(), bell.matrix()) < 1e-12);
        let cp = cost_pair(&st);
        assert!((cp.q - 1.0).abs() < 1e-12 && cp.e.abs() < 1e-12);
        assert!(entanglement_balance(&st).abs() < 1e-12);
    }

    #[test]
    fn classical_source_routed_to_receiver_is_ghz() {
        let v = SplittingIsometry::all_at_receiver(2, 1, 2).unwrap();
        let st = split_purification(&cc_state(), &v).unwrap();
        let amp = st.pure().vector();
        // |000⟩ and |111⟩ on A, B, C with A' trivial.
        assert!((amp[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((amp[7].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((cost_pair(&st).q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn copying_the_flag_to_both_sides_costs_nothing() {
        // |e⟩ ↦ |e⟩_{A'}|e⟩_C decoheres C into a classical flag.
        let mut m = CMatrix::zeros(4, 2);
        m[(0, 0)] = c(1.0, 0.0);
        m[(3, 1)] = c(1.0, 0.0);
        let st = split_purification(&cc_state(), &SplittingIsometry::new(m, 2, 2).unwrap()).unwrap();
        let cp = cost_pair(&st);
        assert!(cp.q.abs() < 1e-12 && cp.e.abs() < 1e-12);
        let s_a_given_c = st.entropy(&["A", "C"]) - st.entropy(&["C"]);
        assert!(s_a_given_c.abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_a_shape_error() {
        let v = SplittingIsometry::haar(3, 2, 2, 1).unwrap();
        assert!(matches!(split_purification(&cc_state(), &v), Err(Error::Shape(_))));
        assert!(SplittingIsometry::haar(5, 2, 2, 1).is_err());
        assert!(SplittingIsometry::new(CMatrix::zeros(4, 2), 2, 2).is_err());
    }

    #[test]
    fn swapped_matrix_matches_swapped_state() {
        let rho = random_density_on(SystemLayout::bipartite(2, 2).unwrap(), 3, 5).unwrap();
        let v = SplittingIsometry::haar(3, 2, 3, 9).unwrap();
        let a = swap_sides(&split_purification(&rho, &v).unwrap());
        let b = split_purification(&rho, &v.swapped()).unwrap();
        let d = (a.pure().vector() - b.pure().vector()).norm();
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn objective_matches_cost_pair_and_finite_differences() {
        let rho = random_density_on(SystemLayout::bipartite(2, 3).unwrap(), 3, 21).unwrap();
        let v = SplittingIsometry::haar(3, 2, 2, 4).unwrap();
        let obj = SplittingObjective::new(&rho, 2, 2).unwrap();
        let q = cost_pair(&split_purification(&rho, &v).unwrap()).q;
        let (f, g) = obj.value_and_gradient(v.matrix());
        assert!((f - q).abs() < 1e-12 && (obj.value(v.matrix()) - q).abs() < 1e-12);
        let h = 1e-6;
        for idx in [0, 3, 7, 11] {
            for (dir, im) in [(c(h, 0.0), false), (c(0.0, h), true)] {
                let mut p = v.matrix().clone();
                p[idx] += dir;
                let mut m = v.matrix().clone();
                m[idx] -= dir;
                let fd = (obj.value(&p) - obj.value(&m)) / (2.0 * h);
                let an = if im { g[idx].im } else { g[idx].re };
                assert!((fd - an).abs() < 1e-6, "{fd} vs {an}");
            }
        }
    }
}
