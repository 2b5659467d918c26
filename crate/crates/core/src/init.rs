//! Initial-condition builders. Random velocities come from a streamfunction,
//! u = (∂₂ψ, -∂₁ψ), so they are divergence-free by construction; the mean
//! velocity is added afterwards.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{InitialConfig, InitialKind};
use crate::error::{Error, Result};
use crate::material::MaterialLaws;
use crate::random::spectral_noise_with_amplitude;
use crate::snapshot;
use crate::spectral::{ScalarField, TorusGrid, VectorField};
use crate::state::FlowState;

/// Spectral falloff of the random initial fields.
const INITIAL_GAMMA: f64 = 1.5;

pub fn build_initial_state(
    cfg: &InitialConfig,
    grid: &TorusGrid,
    material: &MaterialLaws,
) -> Result<FlowState> {
    match cfg.kind {
        InitialKind::Constant => {
            let u = VectorField::new(
                ScalarField::constant(grid.clone(), cfg.velocity_mean[0]),
                ScalarField::constant(grid.clone(), cfg.velocity_mean[1]),
            )?;
            FlowState::new(
                0.0,
                u,
                ScalarField::constant(grid.clone(), cfg.phi_mean),
                ScalarField::constant(grid.clone(), cfg.theta_mean),
                material,
            )
        }
        InitialKind::SingleMode => {
            let a = cfg.amplitude;
            let u = VectorField::new(
                ScalarField::from_fn(grid.clone(), |_, x2| {
                    cfg.velocity_mean[0] + a * (std::f64::consts::TAU * x2).sin()
                }),
                ScalarField::constant(grid.clone(), cfg.velocity_mean[1]),
            )?;
            let phi = ScalarField::from_fn(grid.clone(), |x1, _| {
                cfg.phi_mean + a * (std::f64::consts::TAU * x1).cos()
            });
            let theta = ScalarField::from_fn(grid.clone(), |x1, _| {
                cfg.theta_mean + a * (std::f64::consts::TAU * x1).cos()
            });
            FlowState::new(0.0, u, phi, theta, material)
        }
        InitialKind::RandomBandlimited => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let kmax = Some(cfg.kmax);
            let psi = spectral_noise_with_amplitude(grid, &mut rng, INITIAL_GAMMA, kmax, 1.0);
            let mut u = VectorField::new(psi.derivative(0, 1), psi.derivative(1, 0).scale(-1.0))?;
            let umax = u.x.linf_norm().max(u.y.linf_norm());
            if umax > 0.0 && cfg.amplitude > 0.0 {
                u = VectorField::new(
                    u.x.scale(cfg.amplitude / umax),
                    u.y.scale(cfg.amplitude / umax),
                )?;
            } else if cfg.amplitude == 0.0 {
                u = VectorField::zero(grid.clone());
                u = u.to_spectral()?;
            }
            let u = VectorField::new(
                u.x.shift(cfg.velocity_mean[0]),
                u.y.shift(cfg.velocity_mean[1]),
            )?;
            let phi = spectral_noise_with_amplitude(grid, &mut rng, INITIAL_GAMMA, kmax, cfg.amplitude)
                .shift(cfg.phi_mean);
            let theta = spectral_noise_with_amplitude(grid, &mut rng, INITIAL_GAMMA, kmax, cfg.amplitude)
                .shift(cfg.theta_mean);
            FlowState::new(0.0, u, phi, theta, material)
        }
        InitialKind::FromSnapshot => {
            let path = cfg.snapshot.as_ref().ok_or_else(|| Error::Config {
                key: "initial.snapshot".into(),
                message: "required when initial.kind = from_snapshot".into(),
            })?;
            let snap = snapshot::read_snapshot(path)?;
            snapshot::state_from_snapshot(&snap, material)
        }
    }
}

/// The conserved triple fixed by the initial state: mean velocity, mean
/// order parameter, total energy.
pub fn conserved_triple(state: &FlowState, material: &MaterialLaws) -> ([f64; 2], f64, f64) {
    (
        state.velocity().mean(),
        state.order_parameter().mean(),
        crate::observables::total_energy(state, material),
    )
}
