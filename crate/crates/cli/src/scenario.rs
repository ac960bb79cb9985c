//! Turns a [`ScenarioConfig`] into kernel objects.

use std::sync::Arc;

use nalgebra::Vector3;
use rch_core::hj::{
    AffineRotorSection, AttitudeLinear, ConstantBodySection, ExactSection, Mode, OneFormSection, Potential,
    PotentialSum, RotorQuadratic, TranslationLinear, ZeroSection,
};
use rch_core::rch::{self, Actuation, IdentityTransport, RchSystem, ReducedTransport, VerticalVector};
use rch_core::systems::{self, FreeTopParams, HeavyTopRotorParams, RigidBodyRotorParams, RotorTopTransport};
use rch_core::{AlgebraKind, CoalgebraVector, ReducedPoint};

use crate::config::{ControlKind, GammaKind, Params, ScenarioConfig, SystemKind};
use crate::error::CliError;

/// Algebra and rotor count of a system.
pub fn shape(kind: SystemKind) -> (AlgebraKind, usize) {
    match kind {
        SystemKind::RigidBodyRotors => (AlgebraKind::So3, 3),
        SystemKind::HeavyTopRotors => (AlgebraKind::Se3, 2),
        SystemKind::HeavyTopFree => (AlgebraKind::Se3, 0),
    }
}

/// CSV names of the state components.
pub fn state_columns(kind: SystemKind) -> Vec<String> {
    let (alg, k) = shape(kind);
    let mut cols: Vec<String> = (1..=3).map(|i| format!("pi{i}")).collect();
    if alg == AlgebraKind::Se3 {
        cols.extend((1..=3).map(|i| format!("gamma{i}")));
    }
    let angle = if kind == SystemKind::RigidBodyRotors { "alpha" } else { "theta" };
    cols.extend((1..=k).map(|i| format!("{angle}{i}")));
    cols.extend((1..=k).map(|i| format!("l{i}")));
    cols
}

fn need<T: Clone>(v: &Option<T>, field: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| CliError::field(field, "required for this system"))
}

fn len_exact(v: &[f64], n: usize, field: &str) -> Result<(), CliError> {
    if v.len() == n {
        Ok(())
    } else {
        Err(CliError::field(field, format!("expected {n} components, found {}", v.len())))
    }
}

fn param_err(prefix: &str) -> impl Fn(rch_core::Error) -> CliError + '_ {
    move |e| CliError::field(prefix, e.to_string())
}

/// Concrete parameter record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemParams {
    /// Rigid body with rotors.
    RigidBody(RigidBodyRotorParams),
    /// Heavy top with rotors.
    HeavyTop(HeavyTopRotorParams),
    /// Free heavy top.
    FreeTop(FreeTopParams),
}

impl SystemParams {
    /// Validate the fields `kind` needs; `prefix` names the section in errors.
    pub fn from_config(kind: SystemKind, p: &Params, prefix: &str) -> Result<Self, CliError> {
        let f = |name: &str| format!("{prefix}.{name}");
        Ok(match kind {
            SystemKind::RigidBodyRotors => {
                let j = need(&p.j, &f("j"))?;
                len_exact(&j, 3, &f("j"))?;
                let params = RigidBodyRotorParams::new(need(&p.ibar, &f("ibar"))?, [j[0], j[1], j[2]]);
                SystemParams::RigidBody(params.map_err(param_err(prefix))?)
            }
            SystemKind::HeavyTopRotors => {
                let j = need(&p.j, &f("j"))?;
                len_exact(&j, 2, &f("j"))?;
                let params = HeavyTopRotorParams::new(
                    need(&p.ibar, &f("ibar"))?,
                    [j[0], j[1]],
                    need(&p.m, &f("m"))?,
                    need(&p.g, &f("g"))?,
                    need(&p.h, &f("h"))?,
                    Vector3::from(need(&p.chi, &f("chi"))?),
                );
                SystemParams::HeavyTop(params.map_err(param_err(prefix))?)
            }
            SystemKind::HeavyTopFree => {
                let params = FreeTopParams::new(
                    need(&p.i, &f("i"))?,
                    need(&p.m, &f("m"))?,
                    need(&p.g, &f("g"))?,
                    need(&p.h, &f("h"))?,
                    Vector3::from(need(&p.chi, &f("chi"))?),
                );
                SystemParams::FreeTop(params.map_err(param_err(prefix))?)
            }
        })
    }

    /// Uncontrolled system.
    pub fn system(&self) -> RchSystem {
        match *self {
            SystemParams::RigidBody(p) => systems::rigid_body_system(p),
            SystemParams::HeavyTop(p) => systems::heavy_top_system(p),
            SystemParams::FreeTop(p) => systems::free_top_system(p),
        }
    }
}

/// Reduced point from flat components, with errors naming `field`.
pub fn reduced_point(
    kind: SystemKind,
    nu: &[f64],
    theta: &[f64],
    l: &[f64],
    field: &str,
) -> Result<ReducedPoint, CliError> {
    let (alg, k) = shape(kind);
    len_exact(nu, alg.dim(), &format!("{field}.nu"))?;
    len_exact(theta, k, &format!("{field}.theta"))?;
    len_exact(l, k, &format!("{field}.l"))?;
    let nu = CoalgebraVector::from_slice(alg, nu)?;
    Ok(ReducedPoint::new(nu, theta.to_vec(), l.to_vec())?)
}

/// Initial state from `[initial]`; omitted angles and momenta are zero.
pub fn initial_state(cfg: &ScenarioConfig) -> Result<ReducedPoint, CliError> {
    let init = cfg.initial.as_ref().ok_or_else(|| CliError::field("initial", "section required"))?;
    let k = shape(cfg.system.kind).1;
    let theta = init.theta.clone().unwrap_or_else(|| vec![0.0; k]);
    let l = init.l.clone().unwrap_or_else(|| vec![0.0; k]);
    reduced_point(cfg.system.kind, &init.nu, &theta, &l, "initial")
}

/// Everything needed to run the matching demo.
pub struct Matching {
    /// Target system.
    pub target: Arc<RchSystem>,
    /// Target parameters.
    pub target_params: SystemParams,
    /// Target kind.
    pub target_kind: SystemKind,
    /// Transport from target to source.
    pub transport: Arc<dyn ReducedTransport>,
}

/// Target and transport from `[control]`.
pub fn matching(cfg: &ScenarioConfig, own: &SystemParams) -> Result<Matching, CliError> {
    let kind = cfg.control.target.ok_or_else(|| CliError::field("control.target", "required for matching control"))?;
    let params = match &cfg.control.target_params {
        Some(p) => SystemParams::from_config(kind, p, "control.target_params")?,
        None if kind == cfg.system.kind => *own,
        None => {
            return Err(CliError::field("control.target_params", "required when the target differs from the system"))
        }
    };
    let transport: Arc<dyn ReducedTransport> = match (cfg.system.kind, kind) {
        (a, b) if a == b => Arc::new(IdentityTransport),
        (SystemKind::RigidBodyRotors, SystemKind::HeavyTopFree) => Arc::new(RotorTopTransport),
        (a, b) => {
            return Err(CliError::field("control.target", format!("no transport from {b} to {a}")));
        }
    };
    Ok(Matching { target: Arc::new(params.system()), target_params: params, target_kind: kind, transport })
}

/// The configured system, with its control applied when enabled.
pub fn controlled_system(cfg: &ScenarioConfig) -> Result<(SystemParams, RchSystem), CliError> {
    let params = SystemParams::from_config(cfg.system.kind, &cfg.params, "params")?;
    let sys = params.system();
    let (alg, k) = shape(cfg.system.kind);
    let control = match cfg.control.kind {
        ControlKind::None => None,
        ControlKind::Constant => {
            let c = need(&cfg.control.components, "control.components")?;
            len_exact(&c, alg.dim() + k, "control.components")?;
            let v =
                VerticalVector { nu: CoalgebraVector::from_slice(alg, &c[..alg.dim()])?, l: c[alg.dim()..].to_vec() };
            Some(Actuation::constant(v))
        }
        ControlKind::Matching => {
            let m = matching(cfg, &params)?;
            Some(rch::matching_control(&sys, m.target, m.transport))
        }
    };
    let sys = match control {
        Some(u) if cfg.control.enabled => sys.with_control(u),
        _ => sys,
    };
    Ok((params, sys))
}

fn potential(name: &str, cfg: &crate::config::Gamma, k: usize) -> Result<Box<dyn Potential>, CliError> {
    Ok(match name {
        "attitude_linear" => Box::new(AttitudeLinear {
            a: Vector3::from(need(&cfg.a, "gamma.a")?),
            b: Vector3::from(need(&cfg.b, "gamma.b")?),
        }),
        "translation_linear" => Box::new(TranslationLinear { c: Vector3::from(need(&cfg.a, "gamma.a")?) }),
        "rotor_quadratic" => {
            let w = need(&cfg.w, "gamma.w")?;
            len_exact(&w, k, "gamma.w")?;
            Box::new(RotorQuadratic { w })
        }
        other => return Err(CliError::field("gamma.name", format!("unknown potential `{other}`"))),
    })
}

/// Section and its config label.
pub fn section(cfg: &ScenarioConfig) -> Result<(Box<dyn OneFormSection>, String), CliError> {
    let g = cfg.gamma.as_ref().ok_or_else(|| CliError::field("gamma", "section required"))?;
    let (alg, k) = shape(cfg.system.kind);
    let body = || -> Result<(CoalgebraVector, Vec<f64>), CliError> {
        let nu = need(&g.nu0, "gamma.nu0")?;
        len_exact(&nu, alg.dim(), "gamma.nu0")?;
        let l = g.l0.clone().unwrap_or_else(|| vec![0.0; k]);
        len_exact(&l, k, "gamma.l0")?;
        Ok((CoalgebraVector::from_slice(alg, &nu)?, l))
    };
    Ok(match g.kind {
        GammaKind::Zero => match alg {
            AlgebraKind::So3 => (Box::new(ZeroSection { kind: alg, rotors: k }), "zero".into()),
            AlgebraKind::Se3 => {
                let a = Vector3::from(g.a.unwrap_or([0.0, 0.0, 1.0]));
                (Box::new(ExactSection { w: TranslationLinear { c: a }, kind: alg, rotors: k }), "zero".into())
            }
        },
        GammaKind::ExactDw => {
            let name = need(&g.name, "gamma.name")?;
            let parts = name.split('+').map(|n| potential(n.trim(), g, k)).collect::<Result<Vec<_>, _>>()?;
            if alg == AlgebraKind::So3 && name.contains("translation_linear") {
                return Err(CliError::field("gamma.name", "translation_linear needs an SE(3) system"));
            }
            (Box::new(ExactSection { w: PotentialSum(parts), kind: alg, rotors: k }), format!("exact_dW({name})"))
        }
        GammaKind::ConstantBody => {
            let (nu0, l0) = body()?;
            (Box::new(ConstantBodySection { nu0, l0 }), "constant_body".into())
        }
        GammaKind::Explicit => {
            let (nu0, l0) = body()?;
            let l_theta = g.l_theta.clone().unwrap_or_else(|| vec![vec![0.0; k]; k]);
            if l_theta.len() != k || l_theta.iter().any(|r| r.len() != k) {
                return Err(CliError::field("gamma.l_theta", format!("expected a {k} x {k} matrix")));
            }
            (Box::new(AffineRotorSection { nu0, l0, l_theta }), "explicit".into())
        }
    })
}

/// Full mode unless `gamma.mu` is given.
pub fn mode(cfg: &ScenarioConfig) -> Result<Mode, CliError> {
    let alg = shape(cfg.system.kind).0;
    match cfg.gamma.as_ref().and_then(|g| g.mu.clone()) {
        None => Ok(Mode::Full),
        Some(mu) => {
            len_exact(&mu, alg.dim(), "gamma.mu")?;
            Ok(Mode::Reduced { mu: Some(CoalgebraVector::from_slice(alg, &mu)?) })
        }
    }
}
