//! Benchmark-only crate; see `benches/kernels.rs`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tflow_core::material::MaterialLaws;
use tflow_core::random::spectral_noise_with_amplitude;
use tflow_core::spectral::{TorusGrid, VectorField};
use tflow_core::state::FlowState;

/// A smooth random state used by every benchmark.
pub fn bench_state(n: usize, seed: u64) -> (TorusGrid, MaterialLaws, FlowState) {
    let grid = TorusGrid::new(n).expect("valid benchmark grid");
    let laws = MaterialLaws::default_laws();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = spectral_noise_with_amplitude(&grid, &mut rng, 1.5, Some(4), 1.0);
    let u = VectorField::new(psi.derivative(0, 1), psi.derivative(1, 0).scale(-1.0))
        .expect("streamfunction components share the grid");
    let phi = spectral_noise_with_amplitude(&grid, &mut rng, 1.5, Some(4), 0.2).shift(0.2);
    let theta = spectral_noise_with_amplitude(&grid, &mut rng, 1.5, Some(4), 0.25).shift(1.0);
    let state = FlowState::new(0.0, u, phi, theta, &laws).expect("valid benchmark state");
    (grid, laws, state)
}
