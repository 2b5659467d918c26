//! Rough per-operation timing at n = 64; run with --release for real numbers.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tflow_core::integrator::{Simulation, StepperConfig};
use tflow_core::material::MaterialLaws;
use tflow_core::random::spectral_noise_with_amplitude;
use tflow_core::spectral::{TorusGrid, VectorField};
use tflow_core::state::FlowState;

fn main() {
    let grid = TorusGrid::new(64).unwrap();
    let laws = MaterialLaws::default_laws();
    let sim = Simulation::new(grid.clone(), laws.clone(), StepperConfig::new(1e-3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = spectral_noise_with_amplitude(&grid, &mut rng, 1.5, Some(4), 1.0);
    let u = VectorField::new(psi.derivative(0, 1), psi.derivative(1, 0).scale(-1.0)).unwrap();
    let phi = spectral_noise_with_amplitude(&grid, &mut rng, 1.5, Some(4), 0.2).shift(0.2);
    let theta = spectral_noise_with_amplitude(&grid, &mut rng, 1.5, Some(4), 0.25).shift(1.0);
    let state = FlowState::new(0.0, u, phi, theta, &laws).unwrap();

    let phys = state.temperature().physical_data().into_owned();
    let t0 = Instant::now();
    let reps = 2000;
    let mut sink = 0.0;
    for _ in 0..reps {
        let s = grid.forward(&phys);
        sink += s[[1, 1]].re;
    }
    println!("forward fft2: {:.1} us (sink {sink:e})", t0.elapsed().as_secs_f64() * 1e6 / reps as f64);

    let spec = state.temperature().spectral().unwrap().clone();
    let t0 = Instant::now();
    for _ in 0..reps {
        let p = grid.inverse(&spec);
        sink += p[[1, 1]];
    }
    println!("inverse fft2: {:.1} us", t0.elapsed().as_secs_f64() * 1e6 / reps as f64);

    let t0 = Instant::now();
    for _ in 0..200 {
        let r = sim.explicit_rhs(&state).unwrap();
        sink += r.kappa_ref;
    }
    println!("explicit_rhs: {:.1} us", t0.elapsed().as_secs_f64() * 1e6 / 200.0);

    let t0 = Instant::now();
    let mut s = state.clone();
    for _ in 0..500 {
        s = sim.step(&s).unwrap().state;
    }
    println!("step: {:.1} us (sink {sink:e})", t0.elapsed().as_secs_f64() * 1e6 / 500.0);
}
