//! Linearly implicit IMEX stepping for the coupled system
//!
//! ```text
//! u_t + div(u⊗u) + ∇p = Δu - div(∇φ⊗∇φ),          div u = 0,
//! φ_t + div(uφ)       = Δμ,        μ = -Δφ + F'(φ) - θ,
//! θ_t + div(uθ) + θΔμ - div(κ(θ)∇θ) = |∇u|² + |∇μ|².
//! ```
//!
//! Stiff constant-coefficient pieces are implicit per mode: the viscous
//! Laplacian for u, the bilaplacian plus the semiconvexity shift s·Δ for φ,
//! and a reference diffusion κ_ref·Δ for θ with κ_ref >= max κ(θ) refreshed
//! each step. Everything else — transport in divergence form, the Korteweg
//! stress, the potential, the conductivity defect div((κ(θ)-κ_ref)∇θ), the
//! quadratic heating — is explicit, evaluated pointwise and dealiased. The
//! heat equation uses θΔμ in place of θ(φ_t + u·∇φ), which is exact by the
//! phase equation and keeps the θ update free of time derivatives.
//!
//! Transport and the Korteweg stress are divergence-form products, so the
//! zero mode of every right-hand side except the θ heating vanishes exactly
//! and the discrete means of u and φ are conserved bit-for-bit.
//!
//! Temperature positivity is guarded, never forced: a step whose new minimum
//! falls at or below the floor is rejected and retried with half the step
//! size, and the run fails hard once the halving budget is exhausted.

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::material::MaterialLaws;
use crate::observables::{DiagnosticsConfig, ObservableEngine, ObservableRecord};
use crate::spectral::{ScalarField, TorusGrid, VectorField};
use crate::state::FlowState;

/// Step-size and splitting parameters.
#[derive(Debug, Clone)]
pub struct StepperConfig {
    pub dt: f64,
    /// Splitting constant s >= lambda for the potential term.
    pub stabilization: f64,
    /// Positivity floor for θ; a step is rejected if min θ falls to or
    /// below it.
    pub theta_floor: f64,
    pub max_halvings: u32,
    /// Fixed reference conductivity; `None` refreshes 1 + (max θ)^q each
    /// step.
    pub kappa_ref: Option<f64>,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Self {
        StepperConfig {
            dt,
            stabilization: 1.0,
            theta_floor: 1e-8,
            max_halvings: 20,
            kappa_ref: None,
        }
    }
}

/// Explicit (non-stiff) residuals of the three equations, spectral and
/// dealiased, plus the reference conductivity for the matching θ solve.
#[derive(Debug)]
pub struct ExplicitRhs {
    pub du: VectorField,
    pub dphi: ScalarField,
    pub dtheta: ScalarField,
    pub kappa_ref: f64,
}

/// One accepted step.
#[derive(Debug)]
pub struct StepResult {
    pub state: FlowState,
    pub dt_taken: f64,
    pub halvings: u32,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub horizon: f64,
    /// Record cadence in steps; 0 records only the endpoints.
    pub record_every: usize,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub final_state: FlowState,
    pub records: Vec<ObservableRecord>,
    pub steps: u64,
    pub total_halvings: u64,
}

/// Grid + material laws + stepper settings, ready to advance states.
#[derive(Debug, Clone)]
pub struct Simulation {
    grid: TorusGrid,
    material: MaterialLaws,
    cfg: StepperConfig,
    diag: DiagnosticsConfig,
}

impl Simulation {
    pub fn new(grid: TorusGrid, material: MaterialLaws, cfg: StepperConfig) -> Result<Self> {
        Simulation::with_diagnostics(grid, material, cfg, DiagnosticsConfig::default())
    }

    pub fn with_diagnostics(
        grid: TorusGrid,
        material: MaterialLaws,
        cfg: StepperConfig,
        diag: DiagnosticsConfig,
    ) -> Result<Self> {
        if !(cfg.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {}",
                cfg.dt
            )));
        }
        if cfg.stabilization < material.potential.lambda() {
            return Err(Error::InvalidArgument(format!(
                "stabilization {} is below the potential's semiconvexity constant {}",
                cfg.stabilization,
                material.potential.lambda()
            )));
        }
        if !(cfg.theta_floor > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "theta floor must be positive, got {}",
                cfg.theta_floor
            )));
        }
        Ok(Simulation { grid, material, cfg, diag })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn material(&self) -> &MaterialLaws {
        &self.material
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn diagnostics(&self) -> &DiagnosticsConfig {
        &self.diag
    }

    /// Assemble the explicit residuals at the given state.
    pub fn explicit_rhs(&self, state: &FlowState) -> Result<ExplicitRhs> {
        let g = &self.grid;
        let n = g.n();
        let ksq = g.minus_laplacian_symbol();
        let s = self.cfg.stabilization;

        let u1s = state.velocity().x.spectral()?;
        let u2s = state.velocity().y.spectral()?;
        let phis = state.order_parameter().spectral()?;
        let thetas = state.temperature().spectral()?;
        let mus = state.chemical_potential().spectral()?;

        // Physical-space ingredients, two real fields per FFT.
        let (u1, u2) = g.inverse_pair(u1s, u2s);
        let (u1x, u1y) = g.gradient_physical(u1s);
        let (u2x, u2y) = g.gradient_physical(u2s);
        let (phix, phiy) = g.gradient_physical(phis);
        let (thx, thy) = g.gradient_physical(thetas);
        let (mux, muy) = g.gradient_physical(mus);
        let (phi, theta) = g.inverse_pair(phis, thetas);
        let mut mulap_spec = mus.clone();
        Zip::from(&mut mulap_spec).and(ksq).for_each(|c, &k2| *c *= -k2);
        let mulap = g.inverse(&mulap_spec);

        let min_theta = theta.iter().copied().fold(f64::INFINITY, f64::min);
        if min_theta <= 0.0 {
            return Err(Error::Positivity { min: min_theta });
        }
        let max_theta = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cond = &self.material.conductivity;
        let kappa_ref = self.cfg.kappa_ref.unwrap_or_else(|| cond.kappa_pos(max_theta));

        // Pointwise products, built directly in packed form (one complex
        // buffer per pair of real fields).
        let mut prod = Array2::zeros((n, n));

        // (u1u1, u1u2)
        Zip::from(&mut prod).and(&u1).and(&u2).for_each(|o, &a, &b| *o = Complex64::new(a * a, a * b));
        let (a11, a12) = g.forward_pair_packed(prod.clone(), true);
        // (u2u2, φₓφₓ)
        Zip::from(&mut prod).and(&u2).and(&phix).for_each(|o, &a, &b| *o = Complex64::new(a * a, b * b));
        let (a22, t11) = g.forward_pair_packed(prod.clone(), true);
        // (φₓφᵧ, φᵧφᵧ)
        Zip::from(&mut prod).and(&phix).and(&phiy).for_each(|o, &a, &b| *o = Complex64::new(a * b, b * b));
        let (t12, t22) = g.forward_pair_packed(prod.clone(), true);
        // (u1φ, u2φ)
        Zip::from(&mut prod)
            .and(&u1)
            .and(&u2)
            .and(&phi)
            .for_each(|o, &a, &b, &p| *o = Complex64::new(a * p, b * p));
        let (q1, q2) = g.forward_pair_packed(prod.clone(), true);
        // (u1θ, u2θ)
        Zip::from(&mut prod)
            .and(&u1)
            .and(&u2)
            .and(&theta)
            .for_each(|o, &a, &b, &t| *o = Complex64::new(a * t, b * t));
        let (r1, r2) = g.forward_pair_packed(prod.clone(), true);
        // ((κ(θ)-κ_ref)θₓ, (κ(θ)-κ_ref)θᵧ)
        Zip::from(&mut prod)
            .and(&theta)
            .and(&thx)
            .and(&thy)
            .for_each(|o, &t, &a, &b| {
                let kdef = cond.kappa_pos(t) - kappa_ref;
                *o = Complex64::new(kdef * a, kdef * b);
            });
        let (f1, f2) = g.forward_pair_packed(prod.clone(), true);
        // (θΔμ, |∇u|² + |∇μ|²)
        {
            let o = prod.as_slice_mut().unwrap();
            let (t, ml) = (theta.as_slice().unwrap(), mulap.as_slice().unwrap());
            let (a, b) = (u1x.as_slice().unwrap(), u1y.as_slice().unwrap());
            let (c, d) = (u2x.as_slice().unwrap(), u2y.as_slice().unwrap());
            let (e, f) = (mux.as_slice().unwrap(), muy.as_slice().unwrap());
            for idx in 0..o.len() {
                let heat = a[idx] * a[idx]
                    + b[idx] * b[idx]
                    + c[idx] * c[idx]
                    + d[idx] * d[idx]
                    + e[idx] * e[idx]
                    + f[idx] * f[idx];
                o[idx] = Complex64::new(t[idx] * ml[idx], heat);
            }
        }
        let (w, h) = g.forward_pair_packed(prod, true);

        // Momentum residual -div(u⊗u + ∇φ⊗∇φ), then Leray projection.
        let stress1 = &a11 + &t11;
        let stress2 = &a12 + &t12;
        let stress3 = &a22 + &t22;
        let mut du1 = g.neg_divergence_spec(&stress1, &stress2);
        let mut du2 = g.neg_divergence_spec(&stress2, &stress3);
        g.leray_in_place(&mut du1, &mut du2);
        let du = VectorField::new(
            ScalarField::from_spectral(g.clone(), du1)?,
            ScalarField::from_spectral(g.clone(), du2)?,
        )?;

        // Phase residual -div(uφ) + Δ(F'(φ) - θ - sφ); the dealiased F'(φ)
        // is recovered from the cached μ, F' = μ + Δφ + θ, so
        // F' - θ - sφ = μ - (-Δ - s)φ in symbols.
        let mut dphi = g.neg_divergence_spec(&q1, &q2);
        Zip::from(&mut dphi)
            .and(mus)
            .and(phis)
            .and(ksq)
            .for_each(|x, &m, &p, &k2| {
                *x -= k2 * (m - (k2 + s) * p);
            });

        // Heat residual -div(uθ) - θΔμ + div((κ(θ)-κ_ref)∇θ) + heating.
        let mut dtheta = g.neg_divergence_spec(&r1, &r2);
        let defect = g.neg_divergence_spec(&f1, &f2);
        Zip::from(&mut dtheta)
            .and(&w)
            .and(&defect)
            .and(&h)
            .for_each(|x, &wv, &gv, &hv| {
                *x += -wv - gv + hv;
            });

        Ok(ExplicitRhs {
            du,
            dphi: ScalarField::from_spectral(g.clone(), dphi)?,
            dtheta: ScalarField::from_spectral(g.clone(), dtheta)?,
            kappa_ref,
        })
    }

    /// Advance one step of the configured size.
    pub fn step(&self, state: &FlowState) -> Result<StepResult> {
        self.step_dt(state, self.cfg.dt)
    }

    /// Advance one step of size `dt`, halving on positivity rejection. The
    /// explicit residuals are frozen at the current state, so retries only
    /// repeat the diagonal solves.
    pub fn step_dt(&self, state: &FlowState, dt: f64) -> Result<StepResult> {
        let rhs = self.explicit_rhs(state)?;
        let g = &self.grid;
        let ksq = g.minus_laplacian_symbol();
        let s = self.cfg.stabilization;

        let u1s = state.velocity().x.spectral()?;
        let u2s = state.velocity().y.spectral()?;
        let phis = state.order_parameter().spectral()?;
        let thetas = state.temperature().spectral()?;
        let du1 = rhs.du.x.spectral()?;
        let du2 = rhs.du.y.spectral()?;
        let dphi = rhs.dphi.spectral()?;
        let dtheta = rhs.dtheta.spectral()?;

        let mut dt_try = dt;
        let mut halvings = 0u32;
        loop {
            let solve = |z: &Array2<Complex64>, dz: &Array2<Complex64>, sym: &dyn Fn(f64) -> f64| {
                let mut out = z.clone();
                Zip::from(&mut out).and(dz).and(ksq).for_each(|o, &d, &k2| {
                    let denom = 1.0 + dt_try * sym(k2);
                    debug_assert!(denom >= 1.0);
                    *o = (*o + d * dt_try) / denom;
                });
                out
            };
            let nu1 = solve(u1s, du1, &|k2| k2);
            let nu2 = solve(u2s, du2, &|k2| k2);
            let nphi = solve(phis, dphi, &|k2| k2 * k2 + s * k2);
            let ntheta = solve(thetas, dtheta, &|k2| rhs.kappa_ref * k2);

            let (phi_p, theta_p) = g.inverse_pair(&nphi, &ntheta);
            let min_theta = theta_p.iter().copied().fold(f64::INFINITY, f64::min);
            let t_new = state.t() + dt_try;

            let assemble = |nu1: Array2<Complex64>, nu2: Array2<Complex64>| -> Result<(VectorField, ScalarField)> {
                let u = VectorField::new(
                    ScalarField::from_spectral(g.clone(), nu1)?,
                    ScalarField::from_spectral(g.clone(), nu2)?,
                )?
                .leray_project()?;
                let fprime = phi_p.mapv(|v| self.material.potential.eval_prime(v));
                let mut mu = g.forward(&fprime);
                g.apply_mask(&mut mu);
                Zip::from(&mut mu)
                    .and(&nphi)
                    .and(&ntheta)
                    .and(ksq)
                    .for_each(|m, &p, &t, &k2| *m += p * k2 - t);
                Ok((u, ScalarField::from_spectral(g.clone(), mu)?))
            };

            if min_theta > self.cfg.theta_floor {
                let (u, mu) = assemble(nu1, nu2)?;
                let new_state = FlowState::from_parts_unchecked(
                    t_new,
                    u,
                    ScalarField::from_spectral(g.clone(), nphi)?,
                    ScalarField::from_spectral(g.clone(), ntheta)?,
                    mu,
                );
                return Ok(StepResult { state: new_state, dt_taken: dt_try, halvings });
            }

            halvings += 1;
            if halvings > self.cfg.max_halvings {
                let (u, mu) = assemble(nu1, nu2)?;
                let offending = FlowState::from_parts_unchecked(
                    t_new,
                    u,
                    ScalarField::from_spectral(g.clone(), nphi)?,
                    ScalarField::from_spectral(g.clone(), ntheta)?,
                    mu,
                );
                return Err(Error::StepFailed {
                    t: state.t(),
                    min_theta,
                    halvings: halvings - 1,
                    state: Box::new(offending),
                });
            }
            dt_try *= 0.5;
        }
    }

    /// Iterate steps to the horizon, recording diagnostics every
    /// `record_every` steps (endpoints always included).
    pub fn run(&self, initial: &FlowState, opts: &RunOptions) -> Result<RunOutcome> {
        self.run_with(initial, opts, |_, _, _| Ok(()))
    }

    /// `run` with an observer invoked at every recorded row, receiving the
    /// step count alongside the state.
    pub fn run_with(
        &self,
        initial: &FlowState,
        opts: &RunOptions,
        mut observer: impl FnMut(u64, &FlowState, &ObservableRecord) -> Result<()>,
    ) -> Result<RunOutcome> {
        if opts.horizon < initial.t() {
            return Err(Error::InvalidArgument(format!(
                "horizon {} precedes the initial time {}",
                opts.horizon,
                initial.t()
            )));
        }
        let mut engine = ObservableEngine::new(self.material.clone(), self.diag.clone(), initial);
        let first = engine.record(initial)?;
        observer(0, initial, &first)?;
        let mut records = vec![first];
        let mut state = initial.clone();
        let mut steps = 0u64;
        let mut total_halvings = 0u64;
        let eps = 1e-12 * opts.horizon.abs().max(1.0);
        while state.t() < opts.horizon - eps {
            let dt = self.cfg.dt.min(opts.horizon - state.t());
            let result = self.step_dt(&state, dt)?;
            state = result.state;
            steps += 1;
            total_halvings += u64::from(result.halvings);
            engine.accumulate(&state, result.dt_taken);
            if opts.record_every > 0 && steps % opts.record_every as u64 == 0 {
                let row = engine.record(&state)?;
                observer(steps, &state, &row)?;
                records.push(row);
            }
        }
        if records.last().map(|r| r.t) != Some(state.t()) {
            let row = engine.record(&state)?;
            observer(steps, &state, &row)?;
            records.push(row);
        }
        Ok(RunOutcome { final_state: state, records, steps, total_halvings })
    }
}
