//! The solution triple z = (u, φ, θ) at one time instant, with the derived
//! chemical potential cached alongside.

use crate::error::{Error, Result};
use crate::material::{chemical_potential, MaterialLaws};
use crate::spectral::{ScalarField, TorusGrid, VectorField};

/// Relative divergence tolerance accepted by the validating constructor.
const DIV_TOL: f64 = 1e-10;

/// Velocity, order parameter and absolute temperature at time `t`, stored
/// spectrally, dealiased, with u divergence-free and θ > 0 pointwise.
/// States are immutable; stepping produces new values.
#[derive(Debug, Clone)]
pub struct FlowState {
    t: f64,
    u: VectorField,
    phi: ScalarField,
    theta: ScalarField,
    mu: ScalarField,
}

impl FlowState {
    /// Validate and normalize raw fields into a state: everything is
    /// transformed to spectral form and dealiased, the velocity must be
    /// divergence-free to within `1e-10` relative (a final projection then
    /// zeroes the remainder), and θ must be strictly positive on the grid.
    pub fn new(
        t: f64,
        u: VectorField,
        phi: ScalarField,
        theta: ScalarField,
        material: &MaterialLaws,
    ) -> Result<Self> {
        let grid = phi.grid().clone();
        if !grid.is_compatible(theta.grid()) || !grid.is_compatible(u.grid()) {
            return Err(Error::GridMismatch(grid.n(), theta.grid().n()));
        }
        let to_spec = |f: &ScalarField| -> Result<ScalarField> {
            ScalarField::from_spectral(grid.clone(), f.spectral_data().into_owned())?.dealias()
        };
        let u = VectorField::new(to_spec(&u.x)?, to_spec(&u.y)?)?;
        let unorm = u.l2_norm();
        let div = u.divergence().l2_norm();
        if div > DIV_TOL * unorm.max(1.0) {
            return Err(Error::InvalidState(format!(
                "velocity divergence {div:.3e} exceeds {DIV_TOL:.0e} relative"
            )));
        }
        let u = u.leray_project()?;
        let phi = to_spec(&phi)?;
        let theta = to_spec(&theta)?;
        let min_theta = theta.min_value();
        if min_theta <= 0.0 {
            return Err(Error::Positivity { min: min_theta });
        }
        let mu = chemical_potential(&material.potential, &phi, &theta)?;
        Ok(FlowState { t, u, phi, theta, mu })
    }

    /// Assemble from fields whose invariants were already established by the
    /// caller (used by the stepping loop, which checks positivity itself).
    pub(crate) fn from_parts_unchecked(
        t: f64,
        u: VectorField,
        phi: ScalarField,
        theta: ScalarField,
        mu: ScalarField,
    ) -> Self {
        FlowState { t, u, phi, theta, mu }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn grid(&self) -> &TorusGrid {
        self.phi.grid()
    }

    pub fn velocity(&self) -> &VectorField {
        &self.u
    }

    pub fn order_parameter(&self) -> &ScalarField {
        &self.phi
    }

    pub fn temperature(&self) -> &ScalarField {
        &self.theta
    }

    /// Cached μ = -Δφ + F'(φ) - θ.
    pub fn chemical_potential(&self) -> &ScalarField {
        &self.mu
    }

    pub fn min_theta(&self) -> f64 {
        self.theta.min_value()
    }

    /// Same fields, relabelled time (used by frame changes, which act at a
    /// fixed instant).
    pub(crate) fn with_fields(
        &self,
        u: VectorField,
        phi: ScalarField,
        theta: ScalarField,
        mu: ScalarField,
    ) -> Self {
        FlowState { t: self.t, u, phi, theta, mu }
    }
}
