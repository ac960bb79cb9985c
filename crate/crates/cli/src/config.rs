//! Scenario configuration: a TOML file with sections `system`, `params`,
//! `initial`, `run`, `gamma`, `control` and `tolerances`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Built-in system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// Rigid body with three rotors on `so(3)* x R^3 x R^3`.
    RigidBodyRotors,
    /// Heavy top with two rotors on `se(3)* x R^2 x R^2`.
    HeavyTopRotors,
    /// Heavy top without rotors on `se(3)*`.
    HeavyTopFree,
}

impl SystemKind {
    /// Config spelling.
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::RigidBodyRotors => "rigid_body_rotors",
            SystemKind::HeavyTopRotors => "heavy_top_rotors",
            SystemKind::HeavyTopFree => "heavy_top_free",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `[system]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    /// Which system.
    pub kind: SystemKind,
}

/// `[params]` and `[control.target_params]`. Which fields are required depends on the system:
/// `ibar, j` (rigid body), `ibar, j, m, g, h, chi` (heavy top with rotors), `i, m, g, h, chi` (free top).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Augmented inertias.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ibar: Option<[f64; 3]>,
    /// Rotor axial inertias.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<f64>>,
    /// Principal inertias of the free top.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<[f64; 3]>,
    /// Mass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Gravitational acceleration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// Distance from the fixed point to the center of mass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Unit body vector towards the center of mass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<[f64; 3]>,
}

/// `[initial]`: reduced initial state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    /// `Pi` (3) or `(Pi, Gamma)` (6).
    pub nu: Vec<f64>,
    /// Rotor angles; zeros when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    /// Rotor momenta; zeros when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<f64>>,
}

/// `[run]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    /// Step size.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Horizon.
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Seed used when `--seed` is not given.
    #[serde(default)]
    pub seed: u64,
    /// Sample count for `hj-check`, instance count for `bracket-verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_t_end() -> f64 {
    10.0
}

impl Default for Run {
    fn default() -> Self {
        Self { dt: default_dt(), t_end: default_t_end(), seed: 0, samples: None }
    }
}

/// Section family requested in `[gamma]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaKind {
    /// The zero section (`d` of a constant; on SE(3), `d(a . v)` with `a` default `e3`).
    #[serde(rename = "zero")]
    Zero,
    /// Differential of built-in potentials named in `name`.
    #[serde(rename = "exact_dW")]
    ExactDw,
    /// Constant `(nu0, l0)`.
    #[serde(rename = "constant_body")]
    ConstantBody,
    /// `(nu0, l0 + l_theta theta)`.
    #[serde(rename = "explicit")]
    Explicit,
}

/// `[gamma]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gamma {
    /// Family.
    pub kind: GammaKind,
    /// Potentials for `exact_dW`, joined by `+`: `attitude_linear`, `translation_linear`, `rotor_quadratic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// `attitude_linear` spatial vector; `translation_linear` and the SE(3) zero section use it too.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 3]>,
    /// `attitude_linear` body vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 3]>,
    /// `rotor_quadratic` weights.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    /// Body covector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu0: Option<Vec<f64>>,
    /// Rotor momenta.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<Vec<f64>>,
    /// Row-major `k x k` rotor-angle coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_theta: Option<Vec<Vec<f64>>>,
    /// Momentum level; when present, residuals are taken on the reduced space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
}

/// Control law requested in `[control]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    /// No control.
    #[default]
    None,
    /// Constant vertical components `(nu, l)`.
    Constant,
    /// Matching control towards `target`.
    Matching,
}

/// `[control]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Control {
    /// Law.
    #[serde(default)]
    pub kind: ControlKind,
    /// Vertical components for `constant`: `nu` then `l`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<f64>>,
    /// When false the control is built but not applied.
    #[serde(default = "yes")]
    pub enabled: bool,
    /// Target system for `matching`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<SystemKind>,
    /// Target parameters; defaults to `[params]` when the target is the same system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_params: Option<Params>,
}

fn yes() -> bool {
    true
}

impl Default for Control {
    fn default() -> Self {
        Self { kind: ControlKind::None, components: None, enabled: true, target: None, target_params: None }
    }
}

/// `[tolerances]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Drift bound for `simulate`.
    #[serde(default = "tol_drift")]
    pub drift: f64,
    /// Deviation bound for `equivalence-demo`.
    #[serde(default = "tol_deviation")]
    pub deviation: f64,
    /// Closedness gate for `hj-check`.
    #[serde(default = "tol_closedness")]
    pub closedness: f64,
    /// Upper bound of the PASS band.
    #[serde(default = "tol_pass")]
    pub pass: f64,
    /// Lower bound of the FAIL band.
    #[serde(default = "tol_fail")]
    pub fail: f64,
}

fn tol_drift() -> f64 {
    1e-8
}
fn tol_deviation() -> f64 {
    1e-6
}
fn tol_closedness() -> f64 {
    1e-5
}
fn tol_pass() -> f64 {
    1e-6
}
fn tol_fail() -> f64 {
    1e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            drift: tol_drift(),
            deviation: tol_deviation(),
            closedness: tol_closedness(),
            pass: tol_pass(),
            fail: tol_fail(),
        }
    }
}

/// Whole scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// `[system]`.
    pub system: SystemSection,
    /// `[params]`.
    pub params: Params,
    /// `[initial]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Initial>,
    /// `[run]`.
    #[serde(default)]
    pub run: Run,
    /// `[gamma]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Gamma>,
    /// `[control]`.
    #[serde(default)]
    pub control: Control,
    /// `[tolerances]`.
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ScenarioConfig {
    /// Parse and validate.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read, parse and validate a file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::parse(&text)
    }

    /// Canonical TOML form.
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Range checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (field, v) in [
            ("tolerances.drift", t.drift),
            ("tolerances.deviation", t.deviation),
            ("tolerances.closedness", t.closedness),
            ("tolerances.pass", t.pass),
            ("tolerances.fail", t.fail),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::field(field, format!("must be positive, got {v}")));
            }
        }
        if t.pass >= t.fail {
            return Err(CliError::field("tolerances.pass", "must be below tolerances.fail"));
        }
        if !(self.run.dt > 0.0 && self.run.dt.is_finite()) {
            return Err(CliError::field("run.dt", format!("must be positive, got {}", self.run.dt)));
        }
        if !(self.run.t_end >= 0.0 && self.run.t_end.is_finite()) {
            return Err(CliError::field("run.t_end", format!("must be non-negative, got {}", self.run.t_end)));
        }
        if self.run.samples == Some(0) {
            return Err(CliError::field("run.samples", "must be positive"));
        }
        Ok(())
    }
}
