//! Lattice models: staggered fermions, truncated links, rishon dressed sites.

pub mod dressed;
pub mod fermion;
pub mod lattice;
pub mod link;
pub mod observables;
pub mod qed;
pub mod spin;
pub mod susskind;

pub use dressed::{build_dressed_basis, verify_defermionization, DressedSiteBasis, DressedState};
pub use lattice::{Axis, Bond, Direction, LatticeSpec, Plaquette};
pub use link::{electric_from_rishons, rishon_ops, truncated_link_ops, LinkSpace, RishonOps};
pub use observables::{observables_suite, Observables, StateAccessor};
pub use qed::{build_compact_qed, ChargeConfig, LinkLaw, PinnedCharge, QedCoefficients, QedOptions};
pub use susskind::build_susskind;

use crate::HamiltonianTerms;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Susskind,
    CompactQed {
        link: LinkSpace,
        bases: alloc::vec::Vec<DressedSiteBasis>,
        charges: ChargeConfig,
        coefficients: QedCoefficients,
    },
}

/// A Hamiltonian together with the lattice data needed for observables.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeModel {
    pub lattice: LatticeSpec,
    pub kind: ModelKind,
    pub terms: HamiltonianTerms,
    pub pin_strength: Option<f64>,
    pub link_penalty: Option<f64>,
}
