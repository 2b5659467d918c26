//! Pseudospectral simulation of a thermodynamically consistent model for
//! thermally conducting two-phase incompressible flow on the unit torus:
//! Navier-Stokes momentum with Korteweg stress, a Cahn-Hilliard phase
//! equation coupled to the absolute temperature, and an internal-energy
//! equation with power-law heat conductivity.
//!
//! The point of the crate is not just to step the system but to watch its
//! structure: conservation of mass, momentum and total energy, entropy
//! production, dissipation integrals, negative temperature moments,
//! convergence to spatially constant steady structure and Galilean
//! covariance are all runtime-checkable observables.

pub mod config;
pub mod error;
pub mod experiments;
pub mod frames;
pub mod inequalities;
pub mod init;
pub mod integrator;
pub mod material;
pub mod observables;
pub mod random;
pub mod series;
pub mod snapshot;
pub mod spectral;
pub mod state;

#[cfg(test)]
mod testutil;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use integrator::{RunOptions, RunOutcome, Simulation, StepperConfig};
pub use material::{chemical_potential, Conductivity, MaterialLaws, Potential};
pub use observables::{ObservableRecord, OmegaLimitVerdict};
pub use spectral::{Representation, ScalarField, TorusGrid, VectorField};
pub use state::FlowState;
