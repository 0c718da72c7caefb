//! Side-information correlation measures for finite-dimensional bipartite
//! quantum states.
//!
//! A state `ρ_AB` is purified to `|ψ⟩_ABE` and the purifying system is split
//! between a sender (`A'`) and a receiver (`C`). The qubit cost of moving `A`
//! to the receiver, `½ I(A:B|C)`, is then optimized over splittings:
//!
//! * minimized over all splittings: an upper bound on squashed entanglement;
//! * minimized over maximally correlated splittings: entanglement of formation;
//! * maximized over maximally correlated splittings: entanglement of assistance;
//! * maximized over all splittings: a lower bound on puffed entanglement.
//!
//! All entropies are in bits.

pub mod error;
pub mod mcs;
pub mod measures;
pub mod optim;
pub mod qstate;
pub mod redistribution;

pub use error::{Error, Result};
pub use measures::{Bound, Certificate, Decomposition, MeasureReport, OptimizerConfig};
pub use optim::Mode;
pub use qstate::{DensityOperator, PureState, StateFamily, SystemLayout};
pub use redistribution::{CostPair, FourPartyState, SplittingIsometry};
