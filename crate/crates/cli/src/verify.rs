//! Identity suites run by `sideinfo verify`.

use sideinfo_core::mcs::{mcs_cmi_identity, mcs_cost_pair};
use sideinfo_core::qstate::{derive_seed, haar_isometry, haar_unitary, mutual_information, random_density};
use sideinfo_core::redistribution::{
    cost_pair, entanglement_balance, split_purification, swap_sides, FourPartyState, LABEL_A, LABEL_A_PRIME,
    LABEL_B, LABEL_C,
};
use sideinfo_core::{Decomposition, DensityOperator, SplittingIsometry, SystemLayout};

use crate::error::CliError;

/// Deviation above which an identity counts as violated.
pub const IDENTITY_TOL: f64 = 1e-8;

pub const CHECKS: [&str; 9] = [
    "mcs_cmi_identity",
    "mcs_zero_ebits",
    "swap_invariance",
    "balance_equivalence",
    "cmi_bound",
    "strong_subadditivity",
    "receiver_side_equivalence",
    "degenerate_splittings",
    "local_unitary_invariance",
];

/// Largest deviation seen for each entry of [`CHECKS`].
#[derive(Debug, Clone, PartialEq)]
pub struct Deviations(pub [f64; 9]);

impl Deviations {
    fn merge(&mut self, other: &Deviations) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a = a.max(b);
        }
    }

    pub fn passed(&self, check: usize) -> bool {
        self.0[check] <= IDENTITY_TOL
    }
}

const DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];

/// The state for case `i`: the given one, or a seeded random state whose
/// dimensions and rank cycle through small shapes.
pub fn case_state(given: Option<&DensityOperator>, seed: u64, i: usize) -> Result<DensityOperator, CliError> {
    if let Some(rho) = given {
        return Ok(rho.clone());
    }
    let (d_a, d_b) = DIMS[i % DIMS.len()];
    let rank = 1 + (i / DIMS.len()) % (d_a * d_b);
    let rho = random_density("AB", d_a * d_b, rank, derive_seed(seed, 3 * i as u64))?;
    Ok(DensityOperator::new(rho.matrix().clone(), SystemLayout::bipartite(d_a, d_b)?)?)
}

fn i_cond(st: &FourPartyState, x: &str, y: &str, z: &str) -> f64 {
    let s = |l: &[&str]| st.entropy(l);
    s(&[x, z]) + s(&[y, z]) - s(&[z]) - s(&[x, y, z])
}

/// Runs every identity on one state with seeded random splittings and
/// decompositions.
pub fn check_case(rho: &DensityOperator, seed: u64, i: usize) -> Result<Deviations, CliError> {
    let r = rho.rank();
    let s1 = derive_seed(seed, 3 * i as u64 + 1);
    let s2 = derive_seed(seed, 3 * i as u64 + 2);
    let mut dev = [0.0f64; 9];

    let k = r + i % 3;
    let dec = Decomposition::from_isometry(rho, &haar_isometry(k, r, s1)?)?;
    let (lhs, rhs) = mcs_cmi_identity(&dec)?;
    dev[0] = (lhs - rhs).abs();
    dev[1] = mcs_cost_pair(&dec)?.e.abs();

    let d_a_prime = 1 + i % 3;
    let d_c = r.div_ceil(d_a_prime) + (i / 3) % 2;
    let v = SplittingIsometry::haar(r, d_a_prime, d_c, s2)?;
    let st = split_purification(rho, &v)?;
    let cp = cost_pair(&st);
    dev[2] = (cost_pair(&swap_sides(&st)).q - cp.q).abs();
    dev[3] = (entanglement_balance(&st) - cp.e).abs();

    let s_a = st.entropy(&[LABEL_A]);
    let s_b = st.entropy(&[LABEL_B]);
    dev[4] = (cp.q - s_a.min(s_b)).max(0.0);

    let parties = [LABEL_A, LABEL_B, LABEL_A_PRIME, LABEL_C];
    for x in 0..4 {
        for y in (x + 1)..4 {
            for z in (0..4).filter(|&z| z != x && z != y) {
                dev[5] = dev[5].max(-i_cond(&st, parties[x], parties[y], parties[z]));
            }
        }
    }

    let via_c = i_cond(&st, LABEL_A, LABEL_B, LABEL_C);
    let via_ap = i_cond(&st, LABEL_A, LABEL_B, LABEL_A_PRIME);
    dev[6] = (via_c - via_ap).abs();

    let half_i = 0.5 * mutual_information(rho, &[LABEL_A], &[LABEL_B])?;
    for (da, dc) in [(1, r), (r, 1)] {
        let v = SplittingIsometry::haar(r, da, dc, s2)?;
        let q = cost_pair(&split_purification(rho, &v)?).q;
        dev[7] = dev[7].max((q - half_i).abs());
    }

    let u_ap = haar_unitary(d_a_prime, s1 ^ 1)?;
    let u_c = haar_unitary(d_c, s1 ^ 2)?;
    let moved = split_purification(rho, &v.with_local_unitaries(&u_ap, &u_c)?)?;
    dev[8] = (cost_pair(&moved).q - cp.q).abs();

    Ok(Deviations(dev))
}

/// Runs `cases` cases and returns the per-check maximum deviations together
/// with the states used.
pub fn run_suite(
    given: Option<&DensityOperator>,
    seed: u64,
    cases: usize,
) -> Result<(Deviations, Vec<DensityOperator>), CliError> {
    let mut total = Deviations([0.0; 9]);
    let mut states = Vec::with_capacity(cases);
    for i in 0..cases {
        let rho = case_state(given, seed, i)?;
        total.merge(&check_case(&rho, seed, i)?);
        states.push(rho);
    }
    Ok((total, states))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let (dev, states) = run_suite(None, 7, 12).unwrap();
        assert_eq!(states.len(), 12);
        for (i, name) in CHECKS.iter().enumerate() {
            assert!(dev.passed(i), "{name}: {:e}", dev.0[i]);
        }
    }
}
