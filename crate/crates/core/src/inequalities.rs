//! Empirical validation of the functional inequalities the analysis leans
//! on, on random band-limited fields: Ladyzhenskaya and Agmon interpolation,
//! the nonlinear Poincaré inequality, fractional Sobolev interpolation (an
//! exact Hölder identity for these norms, asserted as such) and the sharp
//! Friedrichs constant 1/2π of the unit torus.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::random::spectral_noise;
use crate::spectral::{ScalarField, TorusGrid};

/// Outcome of one inequality sweep.
#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub name: String,
    pub sample_count: usize,
    pub max_ratio: f64,
    /// Exponents and shape parameters the sweep ran with.
    pub parameters: Vec<(String, f64)>,
}

/// Sweeps share the random-field model: Gaussian modes with power-law decay
/// (1 + |k|²)^{-gamma}, spanning rough to smooth as gamma shrinks or grows.
#[derive(Debug, Clone)]
pub struct InequalityLab {
    grid: TorusGrid,
    gamma: f64,
}

/// ‖v‖_{L⁴} / (‖v‖_V^{1/2} ‖v‖^{1/2}).
pub fn ladyzhenskaya_ratio(v: &ScalarField) -> f64 {
    v.lp_norm(4.0) / (v.sobolev_norm(1.0).sqrt() * v.l2_norm().sqrt())
}

/// ‖v‖_{L∞} / (‖v‖_{H²}^{1/2} ‖v‖^{1/2}).
pub fn agmon_ratio(v: &ScalarField) -> f64 {
    v.linf_norm() / (v.sobolev_norm(2.0).sqrt() * v.l2_norm().sqrt())
}

/// ‖v^{p/2}‖_V² / (‖v‖_{L¹}^p + ‖∇v^{p/2}‖²) for nonnegative v.
pub fn nonlinear_poincare_ratio(v: &ScalarField, p: f64) -> Result<f64> {
    if v.min_value() < 0.0 {
        return Err(Error::InvalidArgument(
            "nonlinear Poincaré ratio needs a nonnegative field".into(),
        ));
    }
    let root = v.map_physical(|x| x.powf(p / 2.0)).to_spectral()?;
    let lhs = root.sobolev_norm(1.0).powi(2);
    let rhs = v.l1_norm().powf(p) + root.grad_norm_sqr();
    Ok(lhs / rhs)
}

/// ‖v‖_{H^s} / (‖v‖_{H^{s1}}^{1-t} ‖v‖_{H^{s2}}^t), t = (s-s1)/(s2-s1).
/// Hölder applied to the mode sums makes this <= 1 exactly.
pub fn interpolation_ratio(v: &ScalarField, s: f64, s1: f64, s2: f64) -> Result<f64> {
    if !(s1 < s && s < s2) {
        return Err(Error::InvalidArgument(format!(
            "interpolation exponents must satisfy s1 < s < s2, got {s1}, {s}, {s2}"
        )));
    }
    let t = (s - s1) / (s2 - s1);
    Ok(v.sobolev_norm(s) / (v.sobolev_norm(s1).powf(1.0 - t) * v.sobolev_norm(s2).powf(t)))
}

/// 2π ‖v‖ / ‖∇v‖ for mean-free v; at most 1, with equality on |k| = 1.
pub fn friedrichs_ratio(v: &ScalarField) -> f64 {
    2.0 * std::f64::consts::PI * v.l2_norm() / v.grad_norm_sqr().sqrt()
}

impl InequalityLab {
    pub fn new(grid: TorusGrid, gamma: f64) -> Self {
        InequalityLab { grid, gamma }
    }

    pub fn default_lab() -> Result<Self> {
        Ok(InequalityLab::new(TorusGrid::new(64)?, 1.5))
    }

    fn sweep(
        &self,
        name: &str,
        samples: usize,
        seed: u64,
        parameters: Vec<(String, f64)>,
        ratio: impl Fn(&ScalarField) -> Result<f64>,
    ) -> Result<InequalityReport> {
        if samples == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_ratio = 0.0f64;
        for _ in 0..samples {
            let v = spectral_noise(&self.grid, &mut rng, self.gamma, None);
            max_ratio = max_ratio.max(ratio(&v)?);
        }
        Ok(InequalityReport {
            name: name.to_string(),
            sample_count: samples,
            max_ratio,
            parameters,
        })
    }

    pub fn check_ladyzhenskaya(&self, samples: usize, seed: u64) -> Result<InequalityReport> {
        self.sweep(
            "ladyzhenskaya",
            samples,
            seed,
            vec![("gamma".into(), self.gamma)],
            |v| Ok(ladyzhenskaya_ratio(&v.shift(1.0))),
        )
    }

    pub fn check_agmon(&self, samples: usize, seed: u64) -> Result<InequalityReport> {
        self.sweep("agmon", samples, seed, vec![("gamma".into(), self.gamma)], |v| {
            Ok(agmon_ratio(&v.shift(1.0)))
        })
    }

    /// Fields are squared pointwise to enforce v >= 0.
    pub fn check_nonlinear_poincare(&self, samples: usize, seed: u64, p: f64) -> Result<InequalityReport> {
        if p < 2.0 {
            return Err(Error::InvalidArgument(format!(
                "nonlinear Poincaré exponent must satisfy p >= 2, got {p}"
            )));
        }
        self.sweep(
            "nonlinear_poincare",
            samples,
            seed,
            vec![("p".into(), p), ("gamma".into(), self.gamma)],
            |v| nonlinear_poincare_ratio(&v.map_physical(|x| x * x), p),
        )
    }

    pub fn check_interpolation_hs(
        &self,
        samples: usize,
        seed: u64,
        s: f64,
        s1: f64,
        s2: f64,
    ) -> Result<InequalityReport> {
        self.sweep(
            "interpolation_hs",
            samples,
            seed,
            vec![("s".into(), s), ("s1".into(), s1), ("s2".into(), s2)],
            |v| interpolation_ratio(v, s, s1, s2),
        )
    }

    pub fn check_friedrichs(&self, samples: usize, seed: u64) -> Result<InequalityReport> {
        self.sweep("friedrichs", samples, seed, vec![], |v| Ok(friedrichs_ratio(v)))
    }
}

/// CSV dump of a batch of reports: name, samples, max_ratio, then
/// `key=value` parameter pairs.
pub fn write_reports_csv(reports: &[InequalityReport], path: &Path) -> Result<()> {
    let mut out = String::from("name,samples,max_ratio,parameters\n");
    for r in reports {
        let params = r
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v:e}"))
            .collect::<Vec<_>>()
            .join(";");
        writeln!(out, "{},{},{:e},{}", r.name, r.sample_count, r.max_ratio, params)
            .expect("string write cannot fail");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::{PI, TAU};

    fn grid() -> TorusGrid {
        TorusGrid::new(16).unwrap()
    }

    #[test]
    fn constant_field_ratios_are_one() {
        let v = ScalarField::constant(grid(), 1.0);
        assert_abs_diff_eq!(ladyzhenskaya_ratio(&v), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(agmon_ratio(&v), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            nonlinear_poincare_ratio(&v, 3.0).unwrap(),
            1.0,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(interpolation_ratio(&v, 1.0, 0.0, 2.0).unwrap(), 1.0, epsilon = 1e-13);
    }

    /// Closed-form oracle for v = sin(2πx₁): ∫ sin⁴ = 3/8 per period, so
    /// ‖v‖_{L⁴} = (3/8)^{1/4}, ‖v‖ = 2^{-1/2}, ‖v‖_V = ((1+4π²)/2)^{1/2}.
    #[test]
    fn sine_ratios_match_exact_integrals() {
        let v = ScalarField::from_fn(grid(), |x1, _| (TAU * x1).sin());
        let expect = (3.0f64 / 8.0).powf(0.25)
            / ((1.0 + 4.0 * PI * PI) / 2.0f64).powf(0.25)
            / (0.5f64).powf(0.25);
        assert_abs_diff_eq!(ladyzhenskaya_ratio(&v), expect, epsilon = 1e-12);

        let expect_agmon = 1.0
            / ((1.0 + 4.0 * PI * PI) / 2.0f64.sqrt()).sqrt()
            / (1.0 / 2.0f64.sqrt()).sqrt();
        assert_abs_diff_eq!(agmon_ratio(&v), expect_agmon, epsilon = 1e-12);
    }

    /// p = 2, v = sin²(2πx₁): ‖v‖² = 3/8, ‖∇v‖² = 2π², ‖v‖_{L¹} = 1/2.
    #[test]
    fn poincare_ratio_matches_exact_integrals() {
        let v = ScalarField::from_fn(grid(), |x1, _| (TAU * x1).sin().powi(2));
        let expect = (3.0 / 8.0 + 2.0 * PI * PI) / (0.25 + 2.0 * PI * PI);
        assert_abs_diff_eq!(
            nonlinear_poincare_ratio(&v, 2.0).unwrap(),
            expect,
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_mode_interpolation_is_exactly_one() {
        let g = grid();
        let mut spec = ndarray::Array2::zeros((16, 16));
        spec[[2, 1]] = Complex64::new(0.4, -0.2);
        spec[[14, 15]] = Complex64::new(0.4, 0.2);
        let v = ScalarField::from_spectral(g, spec).unwrap();
        assert_abs_diff_eq!(interpolation_ratio(&v, 1.0, 0.0, 2.0).unwrap(), 1.0, epsilon = 1e-14);
        assert!(interpolation_ratio(&v, 2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn interpolation_is_a_hard_invariant_on_random_fields() {
        let lab = InequalityLab::new(grid(), 1.0);
        let report = lab.check_interpolation_hs(200, 77, 1.0, 0.0, 2.0).unwrap();
        assert!(report.max_ratio <= 1.0 + 1e-12, "ratio {}", report.max_ratio);
    }

    #[test]
    fn friedrichs_constant_is_sharp_and_never_beaten() {
        let g = grid();
        // Sharpness at |k| = 1.
        let v = ScalarField::from_fn(g.clone(), |x1, _| (TAU * x1).sin());
        assert_abs_diff_eq!(friedrichs_ratio(&v.to_spectral().unwrap()), 1.0, epsilon = 1e-13);
        let lab = InequalityLab::new(g, 1.5);
        let report = lab.check_friedrichs(200, 3).unwrap();
        assert!(report.max_ratio <= 1.0 + 1e-12, "ratio {}", report.max_ratio);
    }

    #[test]
    fn frozen_seed_sweeps_reproduce_bitwise() {
        let lab = InequalityLab::new(grid(), 1.5);
        let a = lab.check_ladyzhenskaya(100, 42).unwrap();
        let b = lab.check_ladyzhenskaya(100, 42).unwrap();
        assert_eq!(a.max_ratio.to_bits(), b.max_ratio.to_bits());
        assert!(a.max_ratio.is_finite());
        for p in [2.0, 3.0, 4.0] {
            let r = lab.check_nonlinear_poincare(50, 7, p).unwrap();
            assert!(r.max_ratio.is_finite());
        }
    }
}
