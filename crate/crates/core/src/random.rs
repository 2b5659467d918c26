//! Deterministic random field generation. Streams are ChaCha-based, so a
//! fixed seed reproduces the same fields bit-for-bit on every run.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

use crate::spectral::{ScalarField, TorusGrid};

/// Box-Muller standard normal.
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Zero-mean field with independent complex Gaussian modes damped by
/// (1 + |k|²)^{-gamma}, restricted to the dealias mask and optionally to
/// |k_i| <= kmax. Hermitian-symmetrized, so the field is real.
pub fn spectral_noise(
    grid: &TorusGrid,
    rng: &mut impl Rng,
    gamma: f64,
    kmax: Option<i64>,
) -> ScalarField {
    let n = grid.n();
    let mut spec: Array2<Complex64> = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if (i, j) == (0, 0) || !grid.dealias_mask()[[i, j]] {
                continue;
            }
            let (k1, k2) = (grid.freq(i), grid.freq(j));
            if let Some(km) = kmax {
                if k1.abs() > km || k2.abs() > km {
                    continue;
                }
            }
            let decay = (1.0 + (k1 * k1 + k2 * k2) as f64).powf(-gamma);
            spec[[i, j]] = Complex64::new(standard_normal(rng), standard_normal(rng)) * decay;
        }
    }
    grid.hermitian_symmetrize(&mut spec);
    ScalarField::from_spectral(grid.clone(), spec).expect("shape matches grid")
}

/// `spectral_noise` rescaled to a prescribed max-norm.
pub fn spectral_noise_with_amplitude(
    grid: &TorusGrid,
    rng: &mut impl Rng,
    gamma: f64,
    kmax: Option<i64>,
    amplitude: f64,
) -> ScalarField {
    let f = spectral_noise(grid, rng, gamma, kmax);
    let max = f.linf_norm();
    if max == 0.0 {
        f
    } else {
        f.scale(amplitude / max)
    }
}
