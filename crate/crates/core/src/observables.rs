//! Diagnostics: conserved quantities, entropy and its production rate,
//! Sobolev norms and metric distances, dissipation accumulators, negative
//! temperature moments, stationary residuals and steady-state detection.
//!
//! L^p quantities use collocation-grid averages; Sobolev quantities use the
//! exact spectral multipliers. Gradients of pointwise-derived fields (the
//! reciprocal temperature in particular) are taken spectrally after
//! dealiasing the derived field.

use crate::error::{Error, Result};
use crate::material::MaterialLaws;
use crate::spectral::ScalarField;
use crate::state::FlowState;

/// Tunables for the recorded norms.
#[derive(Debug, Clone)]
pub struct DiagnosticsConfig {
    /// Fractional velocity regularity r in (0, 1/2]; the tracked velocity
    /// norm is H^{1+r}.
    pub velocity_regularity: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig { velocity_regularity: 0.5 }
    }
}

/// One time-stamped row of every diagnostic. The `grad_*` and
/// `reduced_residual` fields feed steady-state detection and are not part
/// of the CSV schema.
#[derive(Debug, Clone)]
pub struct ObservableRecord {
    pub t: f64,
    pub energy: f64,
    pub phi_mean: f64,
    pub u_mean: [f64; 2],
    pub theta_mean: f64,
    /// ∫ log θ.
    pub entropy: f64,
    pub entropy_production_rate: f64,
    /// Running ∫₀ᵗ ‖∇u‖² ds.
    pub diss_u: f64,
    /// Running ∫₀ᵗ ‖∇θ‖² ds.
    pub diss_theta: f64,
    /// Running ∫₀ᵗ ‖∇μ‖² ds.
    pub diss_mu: f64,
    /// ∫ θ^{1-α} with α = 2.
    pub neg_moment_2: f64,
    pub norm_u_h1r: f64,
    pub norm_phi_h3: f64,
    pub norm_theta_v: f64,
    pub norm_k_theta_v: f64,
    pub norm_inv_theta_l1: f64,
    pub stationary_residual: f64,
    pub mu_mean: f64,
    pub grad_u_norm: f64,
    pub grad_theta_norm: f64,
    pub grad_mu_norm: f64,
    pub reduced_residual: f64,
}

/// Total energy ∫ ( ½|u|² + ½|∇φ|² + F(φ) + θ ); |Ω| = 1 so integrals are
/// grid averages, gradients spectral.
pub fn total_energy(state: &FlowState, material: &MaterialLaws) -> f64 {
    let kinetic = 0.5
        * (state.velocity().x.l2_norm().powi(2) + state.velocity().y.l2_norm().powi(2));
    let interfacial = 0.5 * state.order_parameter().grad_norm_sqr();
    let phi = state.order_parameter().physical_data();
    let configuration =
        phi.iter().map(|&v| material.potential.eval(v)).sum::<f64>() / phi.len() as f64;
    let thermal = state.temperature().mean();
    kinetic + interfacial + configuration + thermal
}

/// ∫ log θ. Errors when θ is not strictly positive on the grid.
pub fn entropy(state: &FlowState) -> Result<f64> {
    let theta = state.temperature().physical_data();
    let min = theta.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Positivity { min });
    }
    Ok(theta.iter().map(|v| v.ln()).sum::<f64>() / theta.len() as f64)
}

/// Entropy production ∫ [ (|∇u|² + |∇μ|²)/θ + κ(θ)|∇θ|²/θ² ] ≥ 0.
pub fn entropy_production_rate(state: &FlowState, material: &MaterialLaws) -> Result<f64> {
    let grid = state.grid().clone();
    let theta = state.temperature().physical_data();
    let min = theta.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Positivity { min });
    }
    let u = state.velocity();
    let (u1x, u1y) = grid.inverse_pair(
        &grid.derivative_spec(u.x.spectral()?, 1, 0),
        &grid.derivative_spec(u.x.spectral()?, 0, 1),
    );
    let (u2x, u2y) = grid.inverse_pair(
        &grid.derivative_spec(u.y.spectral()?, 1, 0),
        &grid.derivative_spec(u.y.spectral()?, 0, 1),
    );
    let mu = state.chemical_potential().spectral()?;
    let (mux, muy) = grid.inverse_pair(
        &grid.derivative_spec(mu, 1, 0),
        &grid.derivative_spec(mu, 0, 1),
    );
    let th = state.temperature().spectral()?;
    let (thx, thy) = grid.inverse_pair(
        &grid.derivative_spec(th, 1, 0),
        &grid.derivative_spec(th, 0, 1),
    );
    let cond = &material.conductivity;
    let n2 = grid.points() as f64;
    let mut acc = 0.0;
    for ((i, j), &t) in theta.indexed_iter() {
        let grad_u_sq = u1x[[i, j]].powi(2)
            + u1y[[i, j]].powi(2)
            + u2x[[i, j]].powi(2)
            + u2y[[i, j]].powi(2);
        let grad_mu_sq = mux[[i, j]].powi(2) + muy[[i, j]].powi(2);
        let grad_th_sq = thx[[i, j]].powi(2) + thy[[i, j]].powi(2);
        acc += (grad_u_sq + grad_mu_sq) / t + cond.kappa_pos(t) * grad_th_sq / (t * t);
    }
    Ok(acc / n2)
}

/// ∫ θ^{1-α}, α > 1.
pub fn negative_moment(state: &FlowState, alpha: f64) -> Result<f64> {
    if alpha <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "negative moment exponent must exceed 1, got {alpha}"
        )));
    }
    let theta = state.temperature().physical_data();
    let min = theta.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Positivity { min });
    }
    Ok(theta.iter().map(|v| v.powf(1.0 - alpha)).sum::<f64>() / theta.len() as f64)
}

/// Metric of the energy-entropy class:
/// ‖u₁-u₂‖ + ‖φ₁-φ₂‖_V + ‖θ₁-θ₂‖_{L¹} + ‖log θ₁ - log θ₂‖_{L¹}.
pub fn dist_h(a: &FlowState, b: &FlowState) -> Result<f64> {
    check_positive(a)?;
    check_positive(b)?;
    let du = a.velocity().try_sub(b.velocity())?.l2_norm();
    let dphi = a
        .order_parameter()
        .try_sub(b.order_parameter())?
        .sobolev_norm(1.0);
    let ta = a.temperature().physical_data();
    let tb = b.temperature().physical_data();
    let n2 = ta.len() as f64;
    let mut l1 = 0.0;
    let mut log_l1 = 0.0;
    for (&x, &y) in ta.iter().zip(tb.iter()) {
        l1 += (x - y).abs();
        log_l1 += (x.ln() - y.ln()).abs();
    }
    Ok(du + dphi + l1 / n2 + log_l1 / n2)
}

/// Metric of the stable-solution class:
/// ‖u₁-u₂‖_{H^{1+r}} + ‖φ₁-φ₂‖_{H³} + ‖K(θ₁)-K(θ₂)‖_V + ‖1/θ₁-1/θ₂‖_{L¹}.
pub fn dist_vr(a: &FlowState, b: &FlowState, r: f64, material: &MaterialLaws) -> Result<f64> {
    check_positive(a)?;
    check_positive(b)?;
    let du = a.velocity().try_sub(b.velocity())?.sobolev_norm(1.0 + r);
    let dphi = a
        .order_parameter()
        .try_sub(b.order_parameter())?
        .sobolev_norm(3.0);
    let ka = k_of_theta(a, material)?;
    let kb = k_of_theta(b, material)?;
    let dk = ka.try_sub(&kb)?.sobolev_norm(1.0);
    let ta = a.temperature().physical_data();
    let tb = b.temperature().physical_data();
    let inv_l1 = ta
        .iter()
        .zip(tb.iter())
        .map(|(&x, &y)| (1.0 / x - 1.0 / y).abs())
        .sum::<f64>()
        / ta.len() as f64;
    Ok(du + dphi + dk + inv_l1)
}

/// Magnitude in the compact class:
/// ‖u‖_{H²} + ‖φ‖_{H⁴} + ‖θ‖_{H²} + ‖1/θ‖_{L⁴} + ‖∇(1/θ)‖_{L¹}.
pub fn magnitude_w(state: &FlowState) -> Result<f64> {
    check_positive(state)?;
    let u = state.velocity().sobolev_norm(2.0);
    let phi = state.order_parameter().sobolev_norm(4.0);
    let theta = state.temperature().sobolev_norm(2.0);
    let inv = state.temperature().map_physical(|v| 1.0 / v);
    let inv_l4 = inv.lp_norm(4.0);
    let grad_inv_l1 = grad_l1_of_pointwise(&inv)?;
    Ok(u + phi + theta + inv_l4 + grad_inv_l1)
}

/// ‖∇f‖_{L¹} with the gradient taken spectrally on the dealiased transform
/// of a pointwise-derived field.
fn grad_l1_of_pointwise(f: &ScalarField) -> Result<f64> {
    let spec = f.to_spectral()?.dealias()?;
    let grid = spec.grid().clone();
    let (gx, gy) = grid.inverse_pair(
        &grid.derivative_spec(spec.spectral()?, 1, 0),
        &grid.derivative_spec(spec.spectral()?, 0, 1),
    );
    let n2 = gx.len() as f64;
    Ok(gx
        .iter()
        .zip(gy.iter())
        .map(|(&a, &b)| (a * a + b * b).sqrt())
        .sum::<f64>()
        / n2)
}

fn k_of_theta(state: &FlowState, material: &MaterialLaws) -> Result<ScalarField> {
    check_positive(state)?;
    Ok(state
        .temperature()
        .map_physical(|v| material.conductivity.big_k_pos(v))
        .to_spectral()?)
}

fn check_positive(state: &FlowState) -> Result<()> {
    let min = state.temperature().min_value();
    if min <= 0.0 {
        Err(Error::Positivity { min })
    } else {
        Ok(())
    }
}

/// The pieces of the stationary residual. `total` is what lands in the CSV.
#[derive(Debug, Clone, Copy)]
pub struct StationaryResidual {
    pub grad_u: f64,
    pub grad_theta: f64,
    pub grad_mu: f64,
    /// ‖-Δφ + F'(φ) - (F'(φ))_Ω - (θ-θ_Ω) - (μ-μ_Ω)‖; identically zero by
    /// construction of μ and kept as a consistency probe.
    pub probe: f64,
    /// ‖-Δφ + F'(φ) - (F'(φ))_Ω‖ against the constant-(μ,θ) ansatz.
    pub reduced: f64,
}

impl StationaryResidual {
    pub fn total(&self) -> f64 {
        self.grad_u + self.grad_theta + self.grad_mu + self.probe + self.reduced
    }
}

/// Residual of the stationary system evaluated at the current state.
pub fn stationary_residual(state: &FlowState) -> Result<StationaryResidual> {
    let grad_u = state.velocity().grad_norm_sqr().sqrt();
    let grad_theta = state.temperature().grad_norm_sqr().sqrt();
    let grad_mu = state.chemical_potential().grad_norm_sqr().sqrt();
    // μ + θ = -Δφ + F'(φ) with the dealiased F', so the reduced field is
    // (μ̂ + θ̂) with the zero mode removed.
    let mu = state.chemical_potential().spectral()?;
    let theta = state.temperature().spectral()?;
    let mut reduced_sq = 0.0;
    let mut probe_sq = 0.0;
    for ((i, j), &m) in mu.indexed_iter() {
        let s = m + theta[[i, j]];
        if (i, j) != (0, 0) {
            reduced_sq += s.norm_sqr();
            // probe field = (reduced field) - (θ - θ_Ω) - (μ - μ_Ω)
            probe_sq += (s - theta[[i, j]] - m).norm_sqr();
        }
    }
    Ok(StationaryResidual {
        grad_u,
        grad_theta,
        grad_mu,
        probe: probe_sq.sqrt(),
        reduced: reduced_sq.sqrt(),
    })
}

/// Verdict of the steady-state detector.
#[derive(Debug, Clone, Copy)]
pub struct OmegaLimitVerdict {
    pub converged: bool,
    /// Spatial mean of θ at the final record.
    pub theta_inf: f64,
    /// Spatial mean of μ at the final record.
    pub mu_inf: f64,
    pub grad_u: f64,
    pub grad_theta: f64,
    pub grad_mu: f64,
    pub reduced_residual: f64,
    /// R = (-log θ)_Ω at t = 0.
    pub jensen_r: f64,
    /// exp(-R): the entropy class forces θ_∞ at or above this.
    pub jensen_bound: f64,
    /// θ_∞ >= exp(-R)(1 - 1e-6); slack covers quadrature.
    pub jensen_satisfied: bool,
}

/// Declare convergence when the last `window` records all have
/// ‖∇u‖, ‖∇θ‖, ‖∇μ‖ <= tol and reduced residual <= 10·tol. The Jensen
/// lower bound on the limit temperature is evaluated unconditionally.
pub fn omega_limit_detect(records: &[ObservableRecord], tol: f64, window: usize) -> OmegaLimitVerdict {
    assert!(!records.is_empty(), "steady-state detection needs at least one record");
    let converged = records.len() >= window
        && records[records.len() - window..].iter().all(|r| {
            r.grad_u_norm <= tol
                && r.grad_theta_norm <= tol
                && r.grad_mu_norm <= tol
                && r.reduced_residual <= 10.0 * tol
        });
    let last = records.last().unwrap();
    let jensen_r = -records[0].entropy;
    let jensen_bound = (-jensen_r).exp();
    OmegaLimitVerdict {
        converged,
        theta_inf: last.theta_mean,
        mu_inf: last.mu_mean,
        grad_u: last.grad_u_norm,
        grad_theta: last.grad_theta_norm,
        grad_mu: last.grad_mu_norm,
        reduced_residual: last.reduced_residual,
        jensen_r,
        jensen_bound,
        jensen_satisfied: last.theta_mean >= jensen_bound * (1.0 - 1e-6),
    }
}

/// Builds records along a run and integrates the dissipation accumulators
/// with the trapezoid rule at every accepted step.
#[derive(Debug, Clone)]
pub struct ObservableEngine {
    material: MaterialLaws,
    diag: DiagnosticsConfig,
    diss_u: f64,
    diss_theta: f64,
    diss_mu: f64,
    prev_gu: f64,
    prev_gt: f64,
    prev_gm: f64,
}

impl ObservableEngine {
    pub fn new(material: MaterialLaws, diag: DiagnosticsConfig, initial: &FlowState) -> Self {
        ObservableEngine {
            material,
            diag,
            diss_u: 0.0,
            diss_theta: 0.0,
            diss_mu: 0.0,
            prev_gu: initial.velocity().grad_norm_sqr(),
            prev_gt: initial.temperature().grad_norm_sqr(),
            prev_gm: initial.chemical_potential().grad_norm_sqr(),
        }
    }

    /// Advance the dissipation integrals over one accepted step of size `dt`.
    pub fn accumulate(&mut self, state: &FlowState, dt: f64) {
        let gu = state.velocity().grad_norm_sqr();
        let gt = state.temperature().grad_norm_sqr();
        let gm = state.chemical_potential().grad_norm_sqr();
        self.diss_u += 0.5 * dt * (self.prev_gu + gu);
        self.diss_theta += 0.5 * dt * (self.prev_gt + gt);
        self.diss_mu += 0.5 * dt * (self.prev_gm + gm);
        self.prev_gu = gu;
        self.prev_gt = gt;
        self.prev_gm = gm;
    }

    pub fn record(&self, state: &FlowState) -> Result<ObservableRecord> {
        let residual = stationary_residual(state)?;
        let k_theta = k_of_theta(state, &self.material)?;
        let inv_theta_l1 = state.temperature().map_physical(|v| 1.0 / v).l1_norm();
        Ok(ObservableRecord {
            t: state.t(),
            energy: total_energy(state, &self.material),
            phi_mean: state.order_parameter().mean(),
            u_mean: state.velocity().mean(),
            theta_mean: state.temperature().mean(),
            entropy: entropy(state)?,
            entropy_production_rate: entropy_production_rate(state, &self.material)?,
            diss_u: self.diss_u,
            diss_theta: self.diss_theta,
            diss_mu: self.diss_mu,
            neg_moment_2: negative_moment(state, 2.0)?,
            norm_u_h1r: state
                .velocity()
                .sobolev_norm(1.0 + self.diag.velocity_regularity),
            norm_phi_h3: state.order_parameter().sobolev_norm(3.0),
            norm_theta_v: state.temperature().sobolev_norm(1.0),
            norm_k_theta_v: k_theta.sobolev_norm(1.0),
            norm_inv_theta_l1: inv_theta_l1,
            stationary_residual: residual.total(),
            mu_mean: state.chemical_potential().mean(),
            grad_u_norm: residual.grad_u,
            grad_theta_norm: residual.grad_theta,
            grad_mu_norm: residual.grad_mu,
            reduced_residual: residual.reduced,
        })
    }
}
