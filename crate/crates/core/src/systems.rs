//! The rigid body with three internal rotors, the heavy top with two
//! internal rotors and the free heavy top: Hamiltonians, closed-form
//! fields, the explicit Hamilton-Jacobi row assemblies, and the transport
//! that relates the rotor body to the top.

use alloc::format;
use alloc::vec::Vec;
use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::lie::{AlgebraKind, AlgebraVector, CoalgebraVector};
use crate::poisson::{Gradient, ReducedPoint, ReducedTangent, ScalarField};
use crate::rch::{RchSystem, ReducedTransport};
use crate::reduction::PhasePoint;

fn positive(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite() && *x > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be strictly positive, got {v:?}")))
    }
}

fn unit(chi: &Vector3<f64>) -> Result<()> {
    if (chi.norm() - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("chi must be a unit vector, |chi| = {}", chi.norm())))
    }
}

fn expect_shape(p: &ReducedPoint, kind: AlgebraKind, k: usize) -> Result<()> {
    if p.kind() != kind {
        return Err(Error::KindMismatch { expected: kind, found: p.kind() });
    }
    if p.rotors() != k || p.l.len() != k {
        return Err(Error::CountMismatch { what: "rotor coordinates", expected: k, found: p.rotors() });
    }
    Ok(())
}

fn count(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::CountMismatch { what, expected, found })
    }
}

/// Rigid body with three rotors: augmented inertias and rotor axial inertias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyRotorParams {
    /// Augmented inertias.
    pub ibar: [f64; 3],
    /// Rotor axial inertias.
    pub j: [f64; 3],
}

impl RigidBodyRotorParams {
    /// Checked constructor.
    pub fn new(ibar: [f64; 3], j: [f64; 3]) -> Result<Self> {
        positive("Ibar", &ibar)?;
        positive("J", &j)?;
        Ok(Self { ibar, j })
    }

    /// From body inertias `i` and rotor inertia tensors `jr[k][i]` (rotor `k`, axis `i`):
    /// `Ibar_i = I_i + sum_k jr[k][i] - jr[i][i]`, `J_i = jr[i][i]`.
    pub fn from_raw(i: [f64; 3], jr: [[f64; 3]; 3]) -> Result<Self> {
        let ibar = core::array::from_fn(|a| i[a] + jr[0][a] + jr[1][a] + jr[2][a] - jr[a][a]);
        Self::new(ibar, core::array::from_fn(|a| jr[a][a]))
    }

    /// Body angular velocity `(Pi_i - l_i) / Ibar_i`.
    pub fn omega(&self, pi: &Vector3<f64>, l: &[f64]) -> Vector3<f64> {
        Vector3::from_fn(|i, _| (pi[i] - l[i]) / self.ibar[i])
    }
}

/// Heavy top with two rotors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeavyTopRotorParams {
    /// Augmented inertias.
    pub ibar: [f64; 3],
    /// Rotor axial inertias.
    pub j: [f64; 2],
    /// Mass.
    pub m: f64,
    /// Gravity.
    pub g: f64,
    /// Distance from the fixed point to the center of mass.
    pub h: f64,
    /// Unit body vector toward the center of mass.
    pub chi: Vector3<f64>,
}

impl HeavyTopRotorParams {
    /// Checked constructor.
    pub fn new(ibar: [f64; 3], j: [f64; 2], m: f64, g: f64, h: f64, chi: Vector3<f64>) -> Result<Self> {
        positive("Ibar", &ibar)?;
        positive("J", &j)?;
        if !(m.is_finite() && g.is_finite() && h.is_finite()) {
            return Err(Error::InvalidParameter("m, g, h must be finite".into()));
        }
        unit(&chi)?;
        Ok(Self { ibar, j, m, g, h, chi })
    }

    /// From body inertias and rotor inertia tensors `jr[k][i]` (rotor `k` = 0, 1):
    /// `Ibar_i = I_i + jr[0][i] + jr[1][i] - jr[i][i]` for `i < 2`, `Ibar_3 = I_3 + jr[0][2] + jr[1][2]`.
    pub fn from_raw(i: [f64; 3], jr: [[f64; 3]; 2], m: f64, g: f64, h: f64, chi: Vector3<f64>) -> Result<Self> {
        let ibar =
            [i[0] + jr[0][0] + jr[1][0] - jr[0][0], i[1] + jr[0][1] + jr[1][1] - jr[1][1], i[2] + jr[0][2] + jr[1][2]];
        Self::new(ibar, [jr[0][0], jr[1][1]], m, g, h, chi)
    }

    /// `m g h`.
    pub fn mgh(&self) -> f64 {
        self.m * self.g * self.h
    }

    /// Body angular velocity.
    pub fn omega(&self, pi: &Vector3<f64>, l: &[f64]) -> Vector3<f64> {
        Vector3::new((pi[0] - l[0]) / self.ibar[0], (pi[1] - l[1]) / self.ibar[1], pi[2] / self.ibar[2])
    }
}

/// Heavy top without rotors, raw inertias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeTopParams {
    /// Principal inertias.
    pub i: [f64; 3],
    /// Mass.
    pub m: f64,
    /// Gravity.
    pub g: f64,
    /// Distance from the fixed point to the center of mass.
    pub h: f64,
    /// Unit body vector toward the center of mass.
    pub chi: Vector3<f64>,
}

impl FreeTopParams {
    /// Checked constructor.
    pub fn new(i: [f64; 3], m: f64, g: f64, h: f64, chi: Vector3<f64>) -> Result<Self> {
        positive("I", &i)?;
        if !(m.is_finite() && g.is_finite() && h.is_finite()) {
            return Err(Error::InvalidParameter("m, g, h must be finite".into()));
        }
        unit(&chi)?;
        Ok(Self { i, m, g, h, chi })
    }

    /// `m g h`.
    pub fn mgh(&self) -> f64 {
        self.m * self.g * self.h
    }
}

/// `1/2 [sum (Pi_i - l_i)^2 / Ibar_i + sum l_i^2 / J_i]`.
pub fn rigid_body_reduced_h(params: &RigidBodyRotorParams, p: &ReducedPoint) -> f64 {
    let pi = p.nu.pi();
    (0..3)
        .map(|i| {
            let d = pi[i] - p.l[i];
            0.5 * (d * d / params.ibar[i] + p.l[i] * p.l[i] / params.j[i])
        })
        .sum()
}

fn rigid_body_gradient(params: &RigidBodyRotorParams, p: &ReducedPoint) -> Gradient {
    let w = params.omega(&p.nu.pi(), &p.l);
    Gradient {
        nu: AlgebraVector::So3(w),
        theta: alloc::vec![0.0; 3],
        l: (0..3).map(|i| -w[i] + p.l[i] / params.j[i]).collect(),
    }
}

/// Closed-form field: `Pi' = Pi x omega`, `alpha'_i = -(Pi_i - l_i)/Ibar_i + l_i/J_i`, `l' = 0`.
pub fn rigid_body_field(params: &RigidBodyRotorParams, p: &ReducedPoint) -> Result<ReducedTangent> {
    expect_shape(p, AlgebraKind::So3, 3)?;
    let pi = p.nu.pi();
    let w = params.omega(&pi, &p.l);
    Ok(ReducedTangent {
        nu: CoalgebraVector::So3(pi.cross(&w)),
        theta: (0..3).map(|i| -w[i] + p.l[i] / params.j[i]).collect(),
        l: alloc::vec![0.0; 3],
    })
}

/// Reduced rigid-body Hamiltonian as a field with analytic gradient.
#[derive(Debug, Clone, Copy)]
pub struct RigidBodyHamiltonian(pub RigidBodyRotorParams);

impl ScalarField for RigidBodyHamiltonian {
    fn value(&self, p: &ReducedPoint) -> f64 {
        rigid_body_reduced_h(&self.0, p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        Some(rigid_body_gradient(&self.0, p))
    }
}

/// The rigid-body Hamiltonian.
pub fn rigid_body_hamiltonian(params: RigidBodyRotorParams) -> RigidBodyHamiltonian {
    RigidBodyHamiltonian(params)
}

/// Rigid body with rotors as an uncontrolled system.
pub fn rigid_body_system(params: RigidBodyRotorParams) -> RchSystem {
    RchSystem::new(RigidBodyHamiltonian(params), AlgebraKind::So3, 3)
}

/// `1/2 [(Pi_1-l_1)^2/Ibar_1 + (Pi_2-l_2)^2/Ibar_2 + Pi_3^2/Ibar_3 + l_1^2/J_1 + l_2^2/J_2] + mgh Gamma.chi`.
pub fn heavy_top_reduced_h(params: &HeavyTopRotorParams, p: &ReducedPoint) -> f64 {
    let pi = p.nu.pi();
    let gamma = p.nu.gamma().unwrap_or_else(Vector3::zeros);
    let a = pi[0] - p.l[0];
    let b = pi[1] - p.l[1];
    0.5 * (a * a / params.ibar[0]
        + b * b / params.ibar[1]
        + pi[2] * pi[2] / params.ibar[2]
        + p.l[0] * p.l[0] / params.j[0]
        + p.l[1] * p.l[1] / params.j[1])
        + params.mgh() * gamma.dot(&params.chi)
}

fn heavy_top_gradient(params: &HeavyTopRotorParams, p: &ReducedPoint) -> Gradient {
    let w = params.omega(&p.nu.pi(), &p.l);
    Gradient {
        nu: AlgebraVector::Se3 { omega: w, vel: params.chi * params.mgh() },
        theta: alloc::vec![0.0; 2],
        l: (0..2).map(|i| -w[i] + p.l[i] / params.j[i]).collect(),
    }
}

/// Closed-form field: `Pi' = Pi x omega + mgh Gamma x chi`, `Gamma' = Gamma x omega`,
/// `theta'_i = -(Pi_i - l_i)/Ibar_i + l_i/J_i`, `l' = 0`.
pub fn heavy_top_field(params: &HeavyTopRotorParams, p: &ReducedPoint) -> Result<ReducedTangent> {
    expect_shape(p, AlgebraKind::Se3, 2)?;
    let pi = p.nu.pi();
    let gamma = p.nu.gamma().expect("se3");
    let w = params.omega(&pi, &p.l);
    Ok(ReducedTangent {
        nu: CoalgebraVector::Se3 { pi: pi.cross(&w) + gamma.cross(&params.chi) * params.mgh(), gamma: gamma.cross(&w) },
        theta: (0..2).map(|i| -w[i] + p.l[i] / params.j[i]).collect(),
        l: alloc::vec![0.0; 2],
    })
}

/// Reduced heavy-top Hamiltonian with analytic gradient.
#[derive(Debug, Clone, Copy)]
pub struct HeavyTopHamiltonian(pub HeavyTopRotorParams);

impl ScalarField for HeavyTopHamiltonian {
    fn value(&self, p: &ReducedPoint) -> f64 {
        heavy_top_reduced_h(&self.0, p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        Some(heavy_top_gradient(&self.0, p))
    }
}

/// Heavy top with rotors as an uncontrolled system.
pub fn heavy_top_system(params: HeavyTopRotorParams) -> RchSystem {
    RchSystem::new(HeavyTopHamiltonian(params), AlgebraKind::Se3, 2)
}

/// `1/2 sum Pi_i^2 / I_i + mgh Gamma.chi`.
pub fn free_top_h(params: &FreeTopParams, p: &ReducedPoint) -> f64 {
    let pi = p.nu.pi();
    let gamma = p.nu.gamma().unwrap_or_else(Vector3::zeros);
    (0..3).map(|i| 0.5 * pi[i] * pi[i] / params.i[i]).sum::<f64>() + params.mgh() * gamma.dot(&params.chi)
}

/// Closed-form free-top field.
pub fn free_top_field(params: &FreeTopParams, p: &ReducedPoint) -> Result<ReducedTangent> {
    expect_shape(p, AlgebraKind::Se3, 0)?;
    let pi = p.nu.pi();
    let gamma = p.nu.gamma().expect("se3");
    let w = Vector3::from_fn(|i, _| pi[i] / params.i[i]);
    Ok(ReducedTangent {
        nu: CoalgebraVector::Se3 { pi: pi.cross(&w) + gamma.cross(&params.chi) * params.mgh(), gamma: gamma.cross(&w) },
        theta: Vec::new(),
        l: Vec::new(),
    })
}

/// Free-top Hamiltonian with analytic gradient.
#[derive(Debug, Clone, Copy)]
pub struct FreeTopHamiltonian(pub FreeTopParams);

impl ScalarField for FreeTopHamiltonian {
    fn value(&self, p: &ReducedPoint) -> f64 {
        free_top_h(&self.0, p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        let pi = p.nu.pi();
        Some(Gradient {
            nu: AlgebraVector::Se3 {
                omega: Vector3::from_fn(|i, _| pi[i] / self.0.i[i]),
                vel: self.0.chi * self.0.mgh(),
            },
            theta: Vec::new(),
            l: Vec::new(),
        })
    }
}

/// Free heavy top as an uncontrolled system.
pub fn free_top_system(params: FreeTopParams) -> RchSystem {
    RchSystem::new(FreeTopHamiltonian(params), AlgebraKind::Se3, 0)
}

/// Full rigid-body Hamiltonian on `T*(SO(3) x R^3)`, computed through the
/// Lagrangian `L = 1/2 sum Ibar_i Omega_i^2 + 1/2 sum J_i (Omega_i + alpha'_i)^2`
/// and the energy `Omega.Pi + alpha'.l - L`.
pub fn rigid_body_full_h(params: &RigidBodyRotorParams, pt: &PhasePoint) -> f64 {
    let pi = pt.p.pi();
    let omega = params.omega(&pi, &pt.l);
    let alpha_dot: Vec<f64> = (0..3).map(|i| pt.l[i] / params.j[i] - omega[i]).collect();
    let lagrangian: f64 = (0..3)
        .map(|i| {
            let s = omega[i] + alpha_dot[i];
            0.5 * params.ibar[i] * omega[i] * omega[i] + 0.5 * params.j[i] * s * s
        })
        .sum();
    omega.dot(&pi) + (0..3).map(|i| alpha_dot[i] * pt.l[i]).sum::<f64>() - lagrangian
}

/// Full heavy-top Hamiltonian on `T*(SE(3) x R^2)`, kinetic part through the
/// Legendre transform, potential `mgh Gamma.chi`.
pub fn heavy_top_full_h(params: &HeavyTopRotorParams, pt: &PhasePoint) -> f64 {
    let pi = pt.p.pi();
    let gamma = pt.p.gamma().unwrap_or_else(Vector3::zeros);
    let omega = params.omega(&pi, &pt.l);
    let theta_dot: Vec<f64> = (0..2).map(|i| pt.l[i] / params.j[i] - omega[i]).collect();
    let lagrangian: f64 = (0..2)
        .map(|i| {
            let s = omega[i] + theta_dot[i];
            0.5 * params.ibar[i] * omega[i] * omega[i] + 0.5 * params.j[i] * s * s
        })
        .sum::<f64>()
        + 0.5 * params.ibar[2] * omega[2] * omega[2];
    omega.dot(&pi) + (0..2).map(|i| theta_dot[i] * pt.l[i]).sum::<f64>() - lagrangian
        + params.mgh() * gamma.dot(&params.chi)
}

/// Candidate reduced section values and lifted control components.
#[derive(Debug, Clone, PartialEq)]
pub struct HjCandidate {
    /// Section components.
    pub gamma_bar: Vec<f64>,
    /// Lifted control components.
    pub u: Vec<f64>,
}

impl HjCandidate {
    /// Error unless the Casimirs of the orbit part (first 3 or 6 components) match `mu`'s within 1e-8.
    pub fn check_orbit(&self, mu: &CoalgebraVector) -> Result<()> {
        let d = mu.kind().dim();
        count("candidate", d, self.gamma_bar.len().min(d))?;
        let nu = match mu.kind() {
            AlgebraKind::So3 => CoalgebraVector::from_slice(AlgebraKind::So3, &self.gamma_bar[..3])?,
            AlgebraKind::Se3 => CoalgebraVector::Se3 {
                pi: Vector3::from_column_slice(&self.gamma_bar[..3]),
                gamma: Vector3::from_column_slice(&self.gamma_bar[3..6]),
            },
        };
        let defect = crate::reduction::orbit_defect(&nu, mu)?;
        if defect <= 1e-8 {
            Ok(())
        } else {
            Err(Error::Membership { defect })
        }
    }
}

/// Configuration space of the rigid-body assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigidBodyVariant {
    /// `SO(3) x R^3` with rotor angles: nine rows.
    So3,
    /// The group `SO(3) x R^3`: rotor angles are cyclic, six rows.
    So3xR3,
}

/// Left-hand sides of the rigid-body Hamilton-Jacobi system at body momentum `pi`.
///
/// `So3`: `gamma_bar = (Pi-part, alpha-part, l-part)` and nine `u`; rows
/// `Ibar_j Ibar_k (Pi x omega)_i + Ibar_j Ibar_k U_i`,
/// `-J_i (g_i - g_{i+6}) + Ibar_i g_{i+6} + Ibar_i J_i U_{i+3}`, `U_7..U_9`.
/// `So3xR3`: `gamma_bar = (Pi-part, l-part)` and six `u`; the first three rows as above, then `U_4..U_6`.
pub fn rigid_body_hj_lhs(
    params: &RigidBodyRotorParams,
    pi: &Vector3<f64>,
    cand: &HjCandidate,
    variant: RigidBodyVariant,
) -> Result<Vec<f64>> {
    let n = match variant {
        RigidBodyVariant::So3 => 9,
        RigidBodyVariant::So3xR3 => 6,
    };
    count("gamma_bar", n, cand.gamma_bar.len())?;
    count("U", n, cand.u.len())?;
    let g = &cand.gamma_bar;
    let u = &cand.u;
    let lo = n - 3;
    let [i1, i2, i3] = params.ibar;
    let d = |i: usize| g[i] - g[lo + i];
    let mut rows = alloc::vec![
        i2 * pi[1] * d(2) - i3 * pi[2] * d(1) + i2 * i3 * u[0],
        i3 * pi[2] * d(0) - i1 * pi[0] * d(2) + i3 * i1 * u[1],
        i1 * pi[0] * d(1) - i2 * pi[1] * d(0) + i1 * i2 * u[2],
    ];
    if variant == RigidBodyVariant::So3 {
        for i in 0..3 {
            let (ib, j) = (params.ibar[i], params.j[i]);
            rows.push(-j * d(i) + ib * g[6 + i] + ib * j * u[3 + i]);
        }
    }
    rows.extend_from_slice(&u[n - 3..]);
    Ok(rows)
}

/// Row scales that turn the generic reduced Hamilton-Jacobi vector into the rigid-body rows.
pub fn rigid_body_row_scales(params: &RigidBodyRotorParams, variant: RigidBodyVariant) -> Vec<f64> {
    let [i1, i2, i3] = params.ibar;
    let mut s = alloc::vec![i2 * i3, i3 * i1, i1 * i2];
    if variant == RigidBodyVariant::So3 {
        s.extend((0..3).map(|i| params.ibar[i] * params.j[i]));
    }
    s.extend([1.0; 3]);
    s
}

/// Left-hand sides of the heavy-top Hamilton-Jacobi system at body momentum `pi`.
///
/// `gamma_bar = (g1, g2, g3, Gamma1, Gamma2, Gamma3, g4, g5, g6, g7)` with
/// `g4, g5` the rotor angles and `g6, g7` the rotor momenta; ten `u`.
pub fn heavy_top_hj_lhs(params: &HeavyTopRotorParams, pi: &Vector3<f64>, cand: &HjCandidate) -> Result<Vec<f64>> {
    count("gamma_bar", 10, cand.gamma_bar.len())?;
    count("U", 10, cand.u.len())?;
    let g = &cand.gamma_bar;
    let u = &cand.u;
    let gamma = Vector3::new(g[3], g[4], g[5]);
    let (a1, a2, a3) = (g[0] - g[8], g[1] - g[9], g[2]);
    let [i1, i2, i3] = params.ibar;
    let chi = params.chi;
    let mgh = params.mgh();
    let gc = gamma.cross(&chi);
    let mut rows = alloc::vec![
        i2 * pi[1] * a3 - i3 * pi[2] * a2 + mgh * i2 * i3 * gc[0] + i2 * i3 * u[0],
        i3 * pi[2] * a1 - i1 * pi[0] * a3 + mgh * i3 * i1 * gc[1] + i3 * i1 * u[1],
        i1 * pi[0] * a2 - i2 * pi[1] * a1 + mgh * i1 * i2 * gc[2] + i1 * i2 * u[2],
        i2 * gamma[1] * a3 - i3 * gamma[2] * a2 + i2 * i3 * u[3],
        i3 * gamma[2] * a1 - i1 * gamma[0] * a3 + i3 * i1 * u[4],
        i1 * gamma[0] * a2 - i2 * gamma[1] * a1 + i1 * i2 * u[5],
    ];
    for i in 0..2 {
        let (ib, j) = (params.ibar[i], params.j[i]);
        rows.push(-j * (g[i] - g[8 + i]) + ib * g[8 + i] + ib * j * u[6 + i]);
    }
    rows.extend_from_slice(&u[8..]);
    Ok(rows)
}

/// Row scales for the heavy-top rows.
pub fn heavy_top_row_scales(params: &HeavyTopRotorParams) -> Vec<f64> {
    let [i1, i2, i3] = params.ibar;
    let mut s = alloc::vec![i2 * i3, i3 * i1, i1 * i2, i2 * i3, i3 * i1, i1 * i2];
    s.extend((0..2).map(|i| params.ibar[i] * params.j[i]));
    s.extend([1.0; 2]);
    s
}

/// Left-hand sides of the free-top Lie-Poisson Hamilton-Jacobi system at body momentum `pi`.
///
/// `gamma_bar = (g1, g2, g3, Gamma1, Gamma2, Gamma3)`; `u` must be empty.
pub fn heavy_top_lp_hj_lhs(params: &FreeTopParams, pi: &Vector3<f64>, cand: &HjCandidate) -> Result<Vec<f64>> {
    count("gamma_bar", 6, cand.gamma_bar.len())?;
    count("U", 0, cand.u.len())?;
    let g = &cand.gamma_bar;
    let gamma = Vector3::new(g[3], g[4], g[5]);
    let [i1, i2, i3] = params.i;
    let gc = gamma.cross(&params.chi) * params.mgh();
    Ok(alloc::vec![
        i2 * pi[1] * g[2] - i3 * pi[2] * g[1] + i2 * i3 * gc[0],
        i3 * pi[2] * g[0] - i1 * pi[0] * g[2] + i3 * i1 * gc[1],
        i1 * pi[0] * g[1] - i2 * pi[1] * g[0] + i1 * i2 * gc[2],
        i2 * gamma[1] * g[2] - i3 * gamma[2] * g[1],
        i3 * gamma[2] * g[0] - i1 * gamma[0] * g[2],
        i1 * gamma[0] * g[1] - i2 * gamma[1] * g[0],
    ])
}

/// Row scales for the free-top rows.
pub fn free_top_row_scales(params: &FreeTopParams) -> Vec<f64> {
    let [i1, i2, i3] = params.i;
    alloc::vec![i2 * i3, i3 * i1, i1 * i2, i2 * i3, i3 * i1, i1 * i2]
}

/// Transport from the free heavy top (B) to the rigid body with rotors (A):
/// `(Pi, Gamma) -> (Pi, alpha = 0, l = Gamma)`, tangents `(dPi, dGamma) -> (dPi, 0, dGamma)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RotorTopTransport;

impl ReducedTransport for RotorTopTransport {
    fn pullback(&self, b: &ReducedPoint) -> Result<ReducedPoint> {
        expect_shape(b, AlgebraKind::Se3, 0)?;
        let gamma = b.nu.gamma().expect("se3");
        ReducedPoint::new(CoalgebraVector::So3(b.nu.pi()), alloc::vec![0.0; 3], gamma.iter().copied().collect())
    }

    fn pullback_inverse(&self, a: &ReducedPoint) -> Result<ReducedPoint> {
        if a.kind() != AlgebraKind::So3 || a.rotors() != 3 || a.l.len() != 3 {
            return Err(Error::NotInvertible(format!(
                "expected an so(3)* point with 3 rotors, got {:?} with {}",
                a.kind(),
                a.rotors()
            )));
        }
        ReducedPoint::new(
            CoalgebraVector::Se3 { pi: a.nu.pi(), gamma: Vector3::from_column_slice(&a.l) },
            Vec::new(),
            Vec::new(),
        )
    }

    fn push_tangent(&self, b: &ReducedPoint, v: &ReducedTangent) -> Result<ReducedTangent> {
        expect_shape(b, AlgebraKind::Se3, 0)?;
        let dg = v.nu.gamma().ok_or(Error::KindMismatch { expected: AlgebraKind::Se3, found: v.kind() })?;
        Ok(ReducedTangent {
            nu: CoalgebraVector::So3(v.nu.pi()),
            theta: alloc::vec![0.0; 3],
            l: dg.iter().copied().collect(),
        })
    }
}
