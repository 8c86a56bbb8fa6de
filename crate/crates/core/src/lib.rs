//! Tensor-network engine for Hamiltonian lattice gauge theories in the
//! truncated-rishon formulation.
//!
//! The crate is `no_std` and needs only `alloc`. It contains
//!
//! * [`tensor`], [`decomp`], [`lanczos`]: dense complex tensors with named
//!   indices, SVD/QR splits and a restarted Lanczos eigensolver;
//! * [`mps`]: matrix product states, transfer matrices and two-site DMRG;
//! * [`ttn`]: binary tree tensor networks with cached environments;
//! * [`models`]: staggered fermions, truncated link algebra, rishon dressed
//!   sites and the compact-QED Hamiltonian;
//! * [`oracle`]: sector enumeration and exact ground states for small lattices.
#![no_std]

extern crate alloc;

pub mod decomp;
pub mod effective;
pub mod error;
pub mod hamiltonian;
pub mod lanczos;
pub mod models;
pub mod mps;
pub mod oracle;
pub mod random;
pub mod tensor;
pub mod ttn;

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for local operators and environments.
pub type Mat = nalgebra::DMatrix<C64>;

pub use decomp::{isometrize, svd_split, DecompositionResult, TruncationSpec};
pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianTerms, LocalSpace, OpId, Term};
pub use lanczos::{lanczos_lowest, Eigenpair, LinearMap};
pub use tensor::{contract, DenseTensor};

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
