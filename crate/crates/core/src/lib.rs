//! Exact-diagonalization and Krylov simulator for quench dynamics of tilted
//! spin-S chains with next-nearest-neighbour exchange and single-ion
//! anisotropy, together with the localization diagnostics used to tell
//! thermalizing from localized dynamics.

pub mod basis;
pub mod dynamics;
pub mod error;
pub mod hpboson;
pub mod model;
pub mod observables;
pub mod runner;
mod product;

pub use basis::{apply_raise_lower, apply_sz, Ladder, SpinBasis};
pub use dynamics::{evolve_dense, evolve_krylov, expectation_energy, EvolutionConfig, Method, StateVector};
pub use error::{Error, Result};
pub use hpboson::{build_hp_hamiltonian, one_magnon_crosscheck, BosonBasis, HpForm};
pub use model::{build_hamiltonian, couplings_from_theta, field_profile, full_spectrum, ModelParams, SparseOperator, Spectrum};
pub use observables::{
    entanglement_entropy, imbalance, participation_entropy, thermal_imbalance, time_average, ObservableSeries,
    SpectralDecomposition,
};
pub use product::{BasisTag, DEFAULT_ENUMERATION_GUARD};
