//! Constitutive laws: the configuration potential F, the heat conductivity
//! κ(r) = 1 + r^q with its primitive K, and the chemical potential
//! μ = -Δφ + F'(φ) - θ derived from them.

use ndarray::Zip;

use crate::error::{Error, Result};
use crate::spectral::ScalarField;

/// Number of sample points used by the validation sweeps.
const VALIDATION_SAMPLES: usize = 10_000;
/// Interval on which the potential assumptions are spot-checked.
const VALIDATION_RANGE: (f64, f64) = (-10.0, 10.0);

/// A polynomial configuration potential with its structural constants:
/// `lambda` bounds F'' from below (semiconvexity), `growth_exponent` bounds
/// |F'''| by c(1 + |r|^{p-1}), and `lower_bound` gives F >= -lower_bound.
#[derive(Debug, Clone)]
pub struct Potential {
    /// Coefficients in ascending order: F(r) = Σ coeffs[i] r^i.
    coeffs: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
    lambda: f64,
    growth_exponent: f64,
    lower_bound: f64,
    /// Sampled bound constant for |F'''| <= c(1 + |r|^{p-1}).
    third_derivative_constant: f64,
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect()
}

fn horner(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

impl Potential {
    /// The canonical double well F(r) = ¼(r² - 1)², with lambda = 1,
    /// growth exponent 2 and lower bound 0.
    pub fn quartic() -> Self {
        Potential::polynomial(vec![0.25, 0.0, -0.5, 0.0, 0.25], 1.0)
            .expect("quartic double well is a valid potential")
    }

    /// A user polynomial with a declared semiconvexity constant. The
    /// growth exponent and lower bound are derived; the structural
    /// assumptions are verified by dense sampling on [-10, 10].
    pub fn polynomial(coeffs: Vec<f64>, lambda: f64) -> Result<Self> {
        let degree = coeffs
            .iter()
            .rposition(|c| *c != 0.0)
            .ok_or_else(|| Error::Material("potential has no nonzero coefficients".into()))?;
        if lambda < 0.0 {
            return Err(Error::Material(format!(
                "semiconvexity constant must be >= 0, got {lambda}"
            )));
        }
        if degree < 2 || degree % 2 != 0 || coeffs[degree] <= 0.0 {
            return Err(Error::Material(
                "potential must have even degree >= 2 with positive leading coefficient \
                 to be coercive"
                    .into(),
            ));
        }
        let d1 = poly_derivative(&coeffs);
        let d2 = poly_derivative(&d1);
        let d3 = poly_derivative(&d2);
        // |F'''| grows like degree-3, so p - 1 = max(1, degree - 3) works.
        let growth_exponent = ((degree as f64) - 2.0).max(2.0);

        let (lo, hi) = VALIDATION_RANGE;
        let step = (hi - lo) / (VALIDATION_SAMPLES - 1) as f64;
        let mut min_f = f64::INFINITY;
        let mut min_f2 = f64::INFINITY;
        let mut c3 = 0.0f64;
        for i in 0..VALIDATION_SAMPLES {
            let r = lo + i as f64 * step;
            min_f = min_f.min(horner(&coeffs, r));
            min_f2 = min_f2.min(horner(&d2, r));
            c3 = c3.max(horner(&d3, r).abs() / (1.0 + r.abs().powf(growth_exponent - 1.0)));
        }
        if min_f2 < -lambda - 1e-12 {
            return Err(Error::Material(format!(
                "F'' dips to {min_f2:.6} on [{lo}, {hi}], below the declared -lambda = {}",
                -lambda
            )));
        }
        let lower_bound = (-min_f).max(0.0);
        Ok(Potential {
            coeffs,
            d1,
            d2,
            d3,
            lambda,
            growth_exponent,
            lower_bound,
            third_derivative_constant: c3,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        horner(&self.coeffs, r)
    }

    pub fn eval_prime(&self, r: f64) -> f64 {
        horner(&self.d1, r)
    }

    pub fn eval_second(&self, r: f64) -> f64 {
        horner(&self.d2, r)
    }

    pub fn eval_third(&self, r: f64) -> f64 {
        horner(&self.d3, r)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn growth_exponent(&self) -> f64 {
        self.growth_exponent
    }

    /// c₀ with F >= -c₀ on the sampled range.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    pub fn third_derivative_constant(&self) -> f64 {
        self.third_derivative_constant
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Heat conductivity κ(r) = 1 + r^q, q >= 2, defined for r >= 0, together
/// with its primitive K(r) = r + r^{q+1}/(q+1).
#[derive(Debug, Clone)]
pub struct Conductivity {
    q: f64,
    q_int: Option<i32>,
}

impl Conductivity {
    pub fn new(q: f64) -> Result<Self> {
        if !(q >= 2.0) {
            return Err(Error::Material(format!(
                "conductivity exponent must satisfy q >= 2 (kappa(r) = 1 + r^q with q in [2, inf)), got {q}"
            )));
        }
        let q_int = if q.fract() == 0.0 && q <= i32::MAX as f64 {
            Some(q as i32)
        } else {
            None
        };
        Ok(Conductivity { q, q_int })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    fn pow_q(&self, r: f64) -> f64 {
        match self.q_int {
            Some(k) => r.powi(k),
            None => r.powf(self.q),
        }
    }

    /// κ(r); negative arguments signal a positivity loss upstream.
    pub fn kappa(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::NegativeTemperature(r));
        }
        Ok(self.kappa_pos(r))
    }

    /// K(r) = ∫₀^r κ; same domain restriction as `kappa`.
    pub fn big_k(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::NegativeTemperature(r));
        }
        Ok(self.big_k_pos(r))
    }

    /// κ on the verified-nonnegative fast path.
    #[inline]
    pub(crate) fn kappa_pos(&self, r: f64) -> f64 {
        1.0 + self.pow_q(r)
    }

    #[inline]
    pub(crate) fn big_k_pos(&self, r: f64) -> f64 {
        r + self.pow_q(r) * r / (self.q + 1.0)
    }
}

/// The potential/conductivity pair a simulation runs with.
#[derive(Debug, Clone)]
pub struct MaterialLaws {
    pub potential: Potential,
    pub conductivity: Conductivity,
}

impl MaterialLaws {
    pub fn new(potential: Potential, conductivity: Conductivity) -> Self {
        MaterialLaws { potential, conductivity }
    }

    /// Quartic double well with q = 2.
    pub fn default_laws() -> Self {
        MaterialLaws {
            potential: Potential::quartic(),
            conductivity: Conductivity::new(2.0).expect("q = 2 is admissible"),
        }
    }
}

/// μ = -Δφ + F'(φ) - θ. F'(φ) is evaluated pointwise in physical space and
/// dealiased; the output is spectral. Requires θ > 0 everywhere.
pub fn chemical_potential(
    potential: &Potential,
    phi: &ScalarField,
    theta: &ScalarField,
) -> Result<ScalarField> {
    if !phi.grid().is_compatible(theta.grid()) {
        return Err(Error::GridMismatch(phi.grid().n(), theta.grid().n()));
    }
    let min_theta = theta.min_value();
    if min_theta <= 0.0 {
        return Err(Error::Positivity { min: min_theta });
    }
    let grid = phi.grid().clone();
    let phi_phys = phi.physical_data();
    let fprime = phi_phys.mapv(|v| potential.eval_prime(v));
    let mut mu = grid.forward(&fprime);
    grid.apply_mask(&mut mu);
    let phi_spec = phi.spectral_data();
    let theta_spec = theta.spectral_data();
    Zip::from(&mut mu)
        .and(&*phi_spec)
        .and(&*theta_spec)
        .and(grid.minus_laplacian_symbol())
        .for_each(|m, &p, &t, &k2| {
            *m += p * k2 - t;
        });
    ScalarField::from_spectral(grid, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::testutil::{dense_chemical_potential, max_spec_diff, random_bandlimited_field};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quartic_values() {
        let f = Potential::quartic();
        assert_abs_diff_eq!(f.eval(0.0), 0.25);
        assert_abs_diff_eq!(f.eval_prime(0.0), 0.0);
        assert_abs_diff_eq!(f.eval_second(0.0), -1.0);
        assert_abs_diff_eq!(f.eval_prime(1.0), 0.0);
        assert_abs_diff_eq!(f.eval_prime(-1.0), 0.0);
        assert_abs_diff_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.lambda(), 1.0);
        assert_eq!(f.growth_exponent(), 2.0);
        assert_eq!(f.lower_bound(), 0.0);
    }

    /// Central-difference oracle for F'.
    #[test]
    fn derivative_matches_finite_differences() {
        let f = Potential::quartic();
        let h = 1e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let r = rng.random::<f64>() * 6.0 - 3.0;
            let fd = (f.eval(r + h) - f.eval(r - h)) / (2.0 * h);
            assert!(
                (f.eval_prime(r) - fd).abs() <= 10.0 * h * h,
                "finite-difference mismatch at r = {r}"
            );
        }
    }

    #[test]
    fn semiconvexity_is_checked() {
        // Quartic F'' reaches -1, so lambda = 0.5 must be rejected.
        let err = Potential::polynomial(vec![0.25, 0.0, -0.5, 0.0, 0.25], 0.5);
        assert!(err.is_err());
        // Odd degree (non-coercive) rejected.
        assert!(Potential::polynomial(vec![0.0, 0.0, 0.0, 1.0], 10.0).is_err());
    }

    #[test]
    fn conductivity_values() {
        let k = Conductivity::new(2.0).unwrap();
        assert_abs_diff_eq!(k.kappa(1.0).unwrap(), 2.0);
        assert_abs_diff_eq!(k.big_k(1.0).unwrap(), 4.0 / 3.0);
        assert_abs_diff_eq!(k.kappa(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(k.big_k(0.0).unwrap(), 0.0);
        assert!(k.kappa(-0.1).is_err());
        assert!(Conductivity::new(1.5).is_err());
    }

    /// K' = κ via the central-difference oracle.
    #[test]
    fn big_k_primitive_of_kappa() {
        let h = 1e-5;
        for q in [2.0, 2.5, 4.0] {
            let k = Conductivity::new(q).unwrap();
            for r in [0.5, 1.0, 2.0] {
                let fd = (k.big_k(r + h).unwrap() - k.big_k(r - h).unwrap()) / (2.0 * h);
                assert!(
                    (k.kappa(r).unwrap() - fd).abs() <= 10.0 * h * h,
                    "K' != kappa at q = {q}, r = {r}"
                );
            }
        }
    }

    #[test]
    fn chemical_potential_constant_states() {
        let g = TorusGrid::new(8).unwrap();
        let pot = Potential::quartic();
        let phi = ScalarField::constant(g.clone(), 0.0);
        let theta = ScalarField::constant(g.clone(), 1.0);
        let mu = chemical_potential(&pot, &phi, &theta).unwrap();
        assert_abs_diff_eq!(mu.mean(), -1.0, epsilon = 1e-13);
        assert!(mu.try_sub(&ScalarField::constant(g.clone(), 0.0).to_spectral().unwrap())
            .unwrap()
            .shift(1.0)
            .l2_norm()
            < 1e-12);

        let phi = ScalarField::constant(g.clone(), 2.0);
        let mu = chemical_potential(&pot, &phi, &theta).unwrap();
        // F'(2) = 8 - 2 = 6, so mu = 6 - 1 = 5.
        assert_abs_diff_eq!(mu.mean(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn chemical_potential_requires_positive_theta() {
        let g = TorusGrid::new(8).unwrap();
        let pot = Potential::quartic();
        let phi = ScalarField::constant(g.clone(), 0.0);
        let theta = ScalarField::constant(g, -0.5);
        assert!(matches!(
            chemical_potential(&pot, &phi, &theta),
            Err(Error::Positivity { .. })
        ));
    }

    /// Dense mode-sum oracle on n=8. Inputs are confined to |k_i| <= 1 so the
    /// cubic F'(φ) stays alias-free inside the retained band and the two
    /// evaluation paths must agree to round-off there.
    #[test]
    fn chemical_potential_matches_dense_oracle() {
        let g = TorusGrid::new(8).unwrap();
        let pot = Potential::quartic();
        let phi = random_bandlimited_field(&g, 1, 0.3, 101);
        let theta = random_bandlimited_field(&g, 1, 0.2, 102).shift(1.0);
        let mu = chemical_potential(&pot, &phi, &theta).unwrap();
        let dense = dense_chemical_potential(&pot, &phi, &theta);
        let err = max_spec_diff(&g, mu.spectral().unwrap(), &dense, true);
        assert!(err < 1e-10, "dense oracle mismatch {err}");
    }

    /// μ_Ω = (F'(φ))_Ω - θ_Ω holds exactly because (Δφ)_Ω = 0 by
    /// construction of the spectral Laplacian.
    #[test]
    fn mu_mean_identity() {
        let g = TorusGrid::new(16).unwrap();
        let pot = Potential::quartic();
        let phi = random_bandlimited_field(&g, 4, 0.7, 7);
        let theta = random_bandlimited_field(&g, 4, 0.3, 8).shift(2.0);
        let mu = chemical_potential(&pot, &phi, &theta).unwrap();
        let fprime_mean = phi
            .physical_data()
            .mapv(|v| pot.eval_prime(v))
            .mean()
            .unwrap();
        assert_abs_diff_eq!(mu.mean(), fprime_mean - theta.mean(), epsilon = 1e-13);
    }
}
