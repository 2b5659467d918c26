//! Exact spectral translation on the torus and the Galilean change of
//! variables that removes a nonzero mean velocity: fields are shifted by
//! t·m (reduced modulo the period) and the mean velocity is subtracted, so
//! the transformed trajectory is again a solution with zero-mean velocity.

use num_complex::Complex64;

use crate::error::Result;
use crate::material::MaterialLaws;
use crate::spectral::{ScalarField, VectorField};
use crate::state::FlowState;

/// Translate f by `d`: mode k picks up the phase e^{2πi k·d}. Exact (no
/// interpolation) and 1-periodic in each displacement component. Requires
/// spectral representation.
pub fn shift_field(f: &ScalarField, d: [f64; 2]) -> Result<ScalarField> {
    let spec = f.spectral()?;
    let grid = f.grid().clone();
    // Reduce first: the phase angle stays O(1) regardless of how far the
    // frame has drifted.
    let d = [d[0].rem_euclid(1.0), d[1].rem_euclid(1.0)];
    let n = grid.n();
    let mut out = spec.clone();
    for i in 0..n {
        let p1 = grid.freq(i) as f64 * d[0];
        for j in 0..n {
            let p2 = grid.freq(j) as f64 * d[1];
            let angle = std::f64::consts::TAU * (p1 + p2);
            out[[i, j]] *= Complex64::new(angle.cos(), angle.sin());
        }
    }
    ScalarField::from_spectral(grid, out)
}

pub fn shift_vector(v: &VectorField, d: [f64; 2]) -> Result<VectorField> {
    VectorField::new(shift_field(&v.x, d)?, shift_field(&v.y, d)?)
}

/// Change to the frame moving with velocity `m`: every field is shifted by
/// t·m and the velocity is reduced by m, so the result has zero-mean
/// velocity when m matches the conserved mean. The chemical potential is
/// recomputed from the shifted fields.
pub fn to_moving_frame(state: &FlowState, m: [f64; 2], material: &MaterialLaws) -> Result<FlowState> {
    let d = [state.t() * m[0], state.t() * m[1]];
    let u = shift_vector(state.velocity(), d)?;
    let u = VectorField::new(u.x.shift(-m[0]), u.y.shift(-m[1]))?;
    let phi = shift_field(state.order_parameter(), d)?;
    let theta = shift_field(state.temperature(), d)?;
    let mu = crate::material::chemical_potential(&material.potential, &phi, &theta)?;
    Ok(state.with_fields(u, phi, theta, mu))
}
