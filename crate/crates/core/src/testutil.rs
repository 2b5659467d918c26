//! Shared test helpers: slow, direct mode-sum evaluation used as an
//! independent oracle for the FFT-based operators, plus deterministic random
//! fields. Everything here is O(n⁴) on purpose — no code path is shared with
//! the production transforms.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::material::Potential;
use crate::spectral::{ScalarField, TorusGrid};

/// Random Hermitian spectrum confined to |k_i| <= kmax, scaled so the
/// physical max-norm equals `amplitude`. Zero mean.
pub fn random_bandlimited_field(g: &TorusGrid, kmax: i64, amplitude: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut spec: Array2<Complex64> = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if (i, j) != (0, 0) && g.freq(i).abs() <= kmax && g.freq(j).abs() <= kmax {
                spec[[i, j]] = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
    }
    g.hermitian_symmetrize(&mut spec);
    let f = ScalarField::from_spectral(g.clone(), spec).unwrap();
    let max = f.linf_norm();
    if max == 0.0 {
        f
    } else {
        f.scale(amplitude / max)
    }
}

/// Evaluate Σ_k c_k (2πi k₁)^a1 (2πi k₂)^a2 e^{2πi k·x} at every collocation
/// point by direct summation.
pub fn dense_derivative_values(g: &TorusGrid, spec: &Array2<Complex64>, a1: u32, a2: u32) -> Array2<f64> {
    let n = g.n();
    let mut out = Array2::zeros((n, n));
    for pi in 0..n {
        for pj in 0..n {
            let mut acc = Complex64::ZERO;
            for i in 0..n {
                let k1 = g.freq(i) as f64;
                for j in 0..n {
                    let c = spec[[i, j]];
                    if c == Complex64::ZERO {
                        continue;
                    }
                    let k2 = g.freq(j) as f64;
                    let mult = Complex64::new(0.0, 2.0 * PI * k1).powu(a1)
                        * Complex64::new(0.0, 2.0 * PI * k2).powu(a2);
                    let phase = 2.0 * PI * (k1 * pi as f64 + k2 * pj as f64) / n as f64;
                    acc += c * mult * Complex64::new(phase.cos(), phase.sin());
                }
            }
            out[[pi, pj]] = acc.re;
        }
    }
    out
}

/// Point values of a spectrum by direct summation.
pub fn dense_values(g: &TorusGrid, spec: &Array2<Complex64>) -> Array2<f64> {
    dense_derivative_values(g, spec, 0, 0)
}

/// Direct (quadrature) DFT of collocation values.
pub fn dense_forward(g: &TorusGrid, phys: &Array2<f64>) -> Array2<Complex64> {
    let n = g.n();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        let k1 = g.freq(i) as f64;
        for j in 0..n {
            let k2 = g.freq(j) as f64;
            let mut acc = Complex64::ZERO;
            for pi in 0..n {
                for pj in 0..n {
                    let phase = -2.0 * PI * (k1 * pi as f64 + k2 * pj as f64) / n as f64;
                    acc += phys[[pi, pj]] * Complex64::new(phase.cos(), phase.sin());
                }
            }
            out[[i, j]] = acc / (n * n) as f64;
        }
    }
    out
}

/// Dense-path chemical potential: -Δφ + F'(φ) - θ evaluated pointwise with
/// mode-sum derivatives, then transformed by the quadrature DFT.
pub fn dense_chemical_potential(pot: &Potential, phi: &ScalarField, theta: &ScalarField) -> Array2<Complex64> {
    let g = phi.grid().clone();
    let phi_spec = phi.spectral_data().into_owned();
    let theta_vals = dense_values(&g, &theta.spectral_data());
    let phi_vals = dense_values(&g, &phi_spec);
    let lap20 = dense_derivative_values(&g, &phi_spec, 2, 0);
    let lap02 = dense_derivative_values(&g, &phi_spec, 0, 2);
    let n = g.n();
    let mut mu = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            mu[[i, j]] = -(lap20[[i, j]] + lap02[[i, j]]) + pot.eval_prime(phi_vals[[i, j]])
                - theta_vals[[i, j]];
        }
    }
    dense_forward(&g, &mu)
}

/// Max coefficient difference, optionally restricted to the dealias mask.
pub fn max_spec_diff(g: &TorusGrid, a: &Array2<Complex64>, b: &Array2<Complex64>, mask_only: bool) -> f64 {
    let mut err = 0.0f64;
    for ((i, j), &va) in a.indexed_iter() {
        if mask_only && !g.dealias_mask()[[i, j]] {
            continue;
        }
        err = err.max((va - b[[i, j]]).norm());
    }
    err
}
