//! Dense linear algebra over labeled multipartite systems.

pub mod entropy;
pub mod family;
pub mod layout;
pub mod linalg;
pub mod state;

pub use entropy::{conditional_mutual_information, marginal_entropy, mutual_information, von_neumann_entropy, EntropyValue};
pub use family::{derive_seed, haar_isometry, haar_unitary, random_density, random_density_on, random_pure, state_family, BellKind, StateFamily};
pub use layout::{Subsystem, SystemLayout};
pub use linalg::{CMatrix, CVector, C64};
pub use state::{basis_vector, DensityOperator, PureState};

use crate::error::Result;

/// `a ⊗ b`; labels must be disjoint.
pub fn tensor_product(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    a.tensor_product(b)
}

/// Reduced operator on `keep`.
pub fn partial_trace<S: AsRef<str>>(rho: &DensityOperator, keep: &[S]) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}

/// Minimal purification with the environment appended as `env_label`.
pub fn purify(rho: &DensityOperator, env_label: &str) -> Result<PureState> {
    rho.purify(env_label)
}
