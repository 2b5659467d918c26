//! Flat `key = value` run configuration: one assignment per line, `#`
//! comments, dotted key names. Every violated constraint is reported with
//! the offending key.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::integrator::{Simulation, StepperConfig};
use crate::material::{Conductivity, MaterialLaws, Potential};
use crate::observables::DiagnosticsConfig;
use crate::spectral::TorusGrid;

/// How the starting fields are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialKind {
    Constant,
    SingleMode,
    RandomBandlimited,
    FromSnapshot,
}

#[derive(Debug, Clone)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub seed: u64,
    pub amplitude: f64,
    /// Largest excited |k_i| for the random kind.
    pub kmax: i64,
    pub phi_mean: f64,
    pub theta_mean: f64,
    pub velocity_mean: [f64; 2],
    pub snapshot: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum PotentialKind {
    Quartic,
    Polynomial { coefficients: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub series: PathBuf,
    pub snapshot: Option<PathBuf>,
    /// Snapshot cadence in steps; 0 writes only the final snapshot.
    pub snapshot_every: usize,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid_n: usize,
    pub potential_kind: PotentialKind,
    pub potential_lambda: f64,
    pub conductivity_q: f64,
    pub dt: f64,
    pub stabilization: f64,
    pub theta_floor: f64,
    pub max_halvings: u32,
    pub kappa_ref: Option<f64>,
    pub horizon: f64,
    pub record_every: usize,
    pub initial: InitialConfig,
    pub omega_tol: f64,
    pub omega_window: usize,
    pub velocity_regularity: f64,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_n: 32,
            potential_kind: PotentialKind::Quartic,
            potential_lambda: 1.0,
            conductivity_q: 2.0,
            dt: 1e-3,
            stabilization: 1.0,
            theta_floor: 1e-8,
            max_halvings: 20,
            kappa_ref: None,
            horizon: 1.0,
            record_every: 10,
            initial: InitialConfig {
                kind: InitialKind::Constant,
                seed: 0,
                amplitude: 0.1,
                kmax: 4,
                phi_mean: 0.0,
                theta_mean: 1.0,
                velocity_mean: [0.0, 0.0],
                snapshot: None,
            },
            omega_tol: 1e-6,
            omega_window: 50,
            velocity_regularity: 0.5,
            output: OutputConfig {
                series: PathBuf::from("series.csv"),
                snapshot: None,
                snapshot_every: 0,
            },
        }
    }
}

fn cfg_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), message: message.into() }
}

struct Raw {
    values: HashMap<String, String>,
}

impl Raw {
    fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| cfg_err(key, format!("expected a number, got `{s}`"))),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|_| cfg_err(key, format!("expected a nonnegative integer, got `{s}`"))),
        }
    }

    fn take_u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<u64>()
                .map(Some)
                .map_err(|_| cfg_err(key, format!("expected a nonnegative integer, got `{s}`"))),
        }
    }

    fn take_i64(&mut self, key: &str) -> Result<Option<i64>> {
        match self.take(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<i64>()
                .map(Some)
                .map_err(|_| cfg_err(key, format!("expected an integer, got `{s}`"))),
        }
    }
}

impl RunConfig {
    /// Parse and validate the text form. Unknown keys, malformed values and
    /// violated constraints are all reported by key.
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut values = HashMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(cfg_err(
                    &format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(cfg_err(&key, "duplicate key"));
            }
        }
        let mut raw = Raw { values };
        let mut cfg = RunConfig::default();

        if let Some(n) = raw.take_usize("grid.n")? {
            if n < 8 || n % 2 != 0 {
                return Err(cfg_err("grid.n", format!("must be an even integer >= 8, got {n}")));
            }
            cfg.grid_n = n;
        }

        if let Some(kind) = raw.take("potential.kind") {
            cfg.potential_kind = match kind.as_str() {
                "quartic" => PotentialKind::Quartic,
                "polynomial" => PotentialKind::Polynomial { coefficients: Vec::new() },
                other => {
                    return Err(cfg_err(
                        "potential.kind",
                        format!("expected `quartic` or `polynomial`, got `{other}`"),
                    ))
                }
            };
        }
        if let Some(list) = raw.take("potential.coefficients") {
            let coefficients = list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| {
                    cfg_err("potential.coefficients", format!("expected comma-separated numbers, got `{list}`"))
                })?;
            match &mut cfg.potential_kind {
                PotentialKind::Polynomial { coefficients: c } => *c = coefficients,
                PotentialKind::Quartic => {
                    return Err(cfg_err(
                        "potential.coefficients",
                        "only meaningful with potential.kind = polynomial",
                    ))
                }
            }
        }
        if let Some(l) = raw.take_f64("potential.lambda")? {
            if l < 0.0 {
                return Err(cfg_err("potential.lambda", format!("must be >= 0, got {l}")));
            }
            cfg.potential_lambda = l;
        }

        if let Some(q) = raw.take_f64("conductivity.q")? {
            if !(q >= 2.0) {
                return Err(cfg_err(
                    "conductivity.q",
                    format!("must lie in [2, inf) for kappa(r) = 1 + r^q, got {q}"),
                ));
            }
            cfg.conductivity_q = q;
        }

        if let Some(dt) = raw.take_f64("stepper.dt")? {
            if !(dt > 0.0) {
                return Err(cfg_err("stepper.dt", format!("must be positive, got {dt}")));
            }
            cfg.dt = dt;
        }
        if let Some(s) = raw.take_f64("stepper.stabilization_s")? {
            cfg.stabilization = s;
        }
        if cfg.stabilization < cfg.potential_lambda {
            return Err(cfg_err(
                "stepper.stabilization_s",
                format!(
                    "must be >= potential.lambda = {}, got {}",
                    cfg.potential_lambda, cfg.stabilization
                ),
            ));
        }
        if let Some(f) = raw.take_f64("stepper.theta_floor")? {
            if !(f > 0.0) {
                return Err(cfg_err("stepper.theta_floor", format!("must be positive, got {f}")));
            }
            cfg.theta_floor = f;
        }
        if let Some(h) = raw.take_usize("stepper.max_halvings")? {
            cfg.max_halvings = h as u32;
        }
        if let Some(k) = raw.take("stepper.kappa_ref") {
            cfg.kappa_ref = if k == "auto" {
                None
            } else {
                let v = k
                    .parse::<f64>()
                    .map_err(|_| cfg_err("stepper.kappa_ref", format!("expected `auto` or a number, got `{k}`")))?;
                if !(v >= 1.0) {
                    return Err(cfg_err("stepper.kappa_ref", format!("must be >= 1 (kappa >= 1), got {v}")));
                }
                Some(v)
            };
        }

        if let Some(h) = raw.take_f64("horizon")? {
            if !(h >= 0.0) {
                return Err(cfg_err("horizon", format!("must be >= 0, got {h}")));
            }
            cfg.horizon = h;
        }
        if let Some(r) = raw.take_usize("record_every")? {
            if r == 0 {
                return Err(cfg_err("record_every", "must be >= 1"));
            }
            cfg.record_every = r;
        }

        if let Some(kind) = raw.take("initial.kind") {
            cfg.initial.kind = match kind.as_str() {
                "constant" => InitialKind::Constant,
                "single_mode" => InitialKind::SingleMode,
                "random_bandlimited" => InitialKind::RandomBandlimited,
                "from_snapshot" => InitialKind::FromSnapshot,
                other => {
                    return Err(cfg_err(
                        "initial.kind",
                        format!(
                            "expected constant | single_mode | random_bandlimited | from_snapshot, got `{other}`"
                        ),
                    ))
                }
            };
        }
        if let Some(s) = raw.take_u64("initial.seed")? {
            cfg.initial.seed = s;
        }
        if let Some(a) = raw.take_f64("initial.amplitude")? {
            if a < 0.0 {
                return Err(cfg_err("initial.amplitude", format!("must be >= 0, got {a}")));
            }
            cfg.initial.amplitude = a;
        }
        if let Some(k) = raw.take_i64("initial.kmax")? {
            if k < 1 {
                return Err(cfg_err("initial.kmax", format!("must be >= 1, got {k}")));
            }
            cfg.initial.kmax = k;
        }
        if let Some(m) = raw.take_f64("initial.phi_mean")? {
            cfg.initial.phi_mean = m;
        }
        if let Some(t) = raw.take_f64("initial.theta_mean")? {
            if !(t > 0.0) {
                return Err(cfg_err("initial.theta_mean", format!("must be positive, got {t}")));
            }
            cfg.initial.theta_mean = t;
        }
        if let Some(v) = raw.take("initial.velocity_mean") {
            let parts: Vec<&str> = v.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(cfg_err(
                    "initial.velocity_mean",
                    format!("expected two comma-separated numbers, got `{v}`"),
                ));
            }
            let mx = parts[0]
                .parse::<f64>()
                .map_err(|_| cfg_err("initial.velocity_mean", format!("bad number `{}`", parts[0])))?;
            let my = parts[1]
                .parse::<f64>()
                .map_err(|_| cfg_err("initial.velocity_mean", format!("bad number `{}`", parts[1])))?;
            cfg.initial.velocity_mean = [mx, my];
        }
        if let Some(p) = raw.take("initial.snapshot") {
            if !p.is_empty() {
                cfg.initial.snapshot = Some(PathBuf::from(p));
            }
        }
        if cfg.initial.kind == InitialKind::FromSnapshot && cfg.initial.snapshot.is_none() {
            return Err(cfg_err("initial.snapshot", "required when initial.kind = from_snapshot"));
        }

        if let Some(t) = raw.take_f64("omega.tol")? {
            if !(t > 0.0) {
                return Err(cfg_err("omega.tol", format!("must be positive, got {t}")));
            }
            cfg.omega_tol = t;
        }
        if let Some(w) = raw.take_usize("omega.window")? {
            if w == 0 {
                return Err(cfg_err("omega.window", "must be >= 1"));
            }
            cfg.omega_window = w;
        }

        if let Some(r) = raw.take_f64("diagnostics.r")? {
            if !(r > 0.0 && r <= 0.5) {
                return Err(cfg_err("diagnostics.r", format!("must lie in (0, 1/2], got {r}")));
            }
            cfg.velocity_regularity = r;
        }

        if let Some(p) = raw.take("output.series") {
            cfg.output.series = PathBuf::from(p);
        }
        if let Some(p) = raw.take("output.snapshot") {
            if !p.is_empty() {
                cfg.output.snapshot = Some(PathBuf::from(p));
            }
        }
        if let Some(e) = raw.take_usize("output.snapshot_every")? {
            cfg.output.snapshot_every = e;
        }

        if let Some(key) = raw.values.keys().next() {
            return Err(cfg_err(key, "unknown key"));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text)
    }

    pub fn build_grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.grid_n)
    }

    pub fn build_material(&self) -> Result<MaterialLaws> {
        let potential = match &self.potential_kind {
            PotentialKind::Quartic => Potential::quartic(),
            PotentialKind::Polynomial { coefficients } => {
                Potential::polynomial(coefficients.clone(), self.potential_lambda)?
            }
        };
        Ok(MaterialLaws::new(potential, Conductivity::new(self.conductivity_q)?))
    }

    pub fn stepper_config(&self) -> StepperConfig {
        StepperConfig {
            dt: self.dt,
            stabilization: self.stabilization,
            theta_floor: self.theta_floor,
            max_halvings: self.max_halvings,
            kappa_ref: self.kappa_ref,
        }
    }

    pub fn build_simulation(&self) -> Result<Simulation> {
        Simulation::with_diagnostics(
            self.build_grid()?,
            self.build_material()?,
            self.stepper_config(),
            DiagnosticsConfig { velocity_regularity: self.velocity_regularity },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let cfg = RunConfig::parse("grid.n = 32\n").unwrap();
        assert_eq!(cfg.grid_n, 32);
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.conductivity_q, 2.0);
        assert_eq!(cfg.record_every, 10);
        assert_eq!(cfg.omega_window, 50);
        assert_eq!(cfg.initial.kind, InitialKind::Constant);
        assert!(cfg.build_simulation().is_ok());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# full line comment\ngrid.n = 16  # trailing comment\n\nstepper.dt = 5e-4\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.grid_n, 16);
        assert_eq!(cfg.dt, 5e-4);
    }

    #[test]
    fn conductivity_exponent_below_two_is_rejected_by_key() {
        let err = RunConfig::parse("conductivity.q = 1.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("conductivity.q"), "{msg}");
        assert!(msg.contains("[2, inf)"), "{msg}");
    }

    #[test]
    fn negative_dt_is_rejected() {
        let err = RunConfig::parse("stepper.dt = -1\n").unwrap_err();
        assert!(err.to_string().contains("stepper.dt"));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::parse("grid.m = 32\n").unwrap_err();
        assert!(err.to_string().contains("grid.m"));
    }

    #[test]
    fn type_mismatch_is_named() {
        let err = RunConfig::parse("grid.n = banana\n").unwrap_err();
        assert!(err.to_string().contains("grid.n"));
        let err = RunConfig::parse("initial.velocity_mean = 1\n").unwrap_err();
        assert!(err.to_string().contains("initial.velocity_mean"));
    }

    #[test]
    fn stabilization_below_lambda_is_rejected() {
        let err = RunConfig::parse("potential.lambda = 2\nstepper.stabilization_s = 1\n").unwrap_err();
        assert!(err.to_string().contains("stabilization"));
    }

    #[test]
    fn snapshot_kind_requires_a_path() {
        let err = RunConfig::parse("initial.kind = from_snapshot\n").unwrap_err();
        assert!(err.to_string().contains("initial.snapshot"));
    }

    #[test]
    fn odd_grid_rejected() {
        let err = RunConfig::parse("grid.n = 7\n").unwrap_err();
        assert!(err.to_string().contains("grid.n"));
    }
}
