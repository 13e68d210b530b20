//! Input-output model of N coupled hybrid modes (one or more field-tunable
//! modes plus static resonators) sharing a single feedline.
//!
//! The crate computes forward transmission `S21` over field/frequency grids,
//! tracks the complex eigenvalue branches of the effective coupling matrix,
//! labels every tunable/static crossing as level attraction, repulsion or an
//! intermediate "just crossing" state, and bisects coupling strengths for the
//! point where a crossing changes character.

pub mod cli;
pub mod config;
pub mod eigen_analysis;
pub mod error;
pub mod export;
pub mod linalg;
pub mod model;
pub mod presets;
pub mod spectra;
pub mod transition;

pub use error::{Error, Result};
pub use model::{
    effective_hamiltonian, mode_frequency, port_vector, response_matrix, CouplingSpec,
    EffectiveHamiltonian, FrequencyLaw, ModeSpec, Sweep, SystemConfig,
};
