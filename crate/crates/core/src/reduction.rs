//! Cotangent-lifted left translation on `G x R^k`: momentum map, projection
//! to body-momentum coordinates, reduced-Hamiltonian and commutation checks,
//! and attitude reconstruction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::{self, AlgebraVector, CoalgebraVector, GroupElement};
use crate::poisson::{self, ReducedPoint, ReducedTangent, ScalarField};
use crate::rch::{self, RchSystem};

/// Point of `T*Q` in left trivialization.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    /// Group element.
    pub g: GroupElement,
    /// Body momentum.
    pub p: CoalgebraVector,
    /// Rotor angles.
    pub theta: Vec<f64>,
    /// Rotor momenta.
    pub l: Vec<f64>,
}

impl PhasePoint {
    /// Lift of a reduced point to the fiber over `g`.
    pub fn lift(g: GroupElement, p: &ReducedPoint) -> Result<Self> {
        if g.kind() != p.kind() {
            return Err(Error::KindMismatch { expected: p.kind(), found: g.kind() });
        }
        Ok(Self { g, p: p.nu, theta: p.theta.clone(), l: p.l.clone() })
    }

    /// Body-coordinate part `(p, theta, l)`.
    pub fn body(&self) -> ReducedPoint {
        ReducedPoint { nu: self.p, theta: self.theta.clone(), l: self.l.clone() }
    }

    /// Whether every component is finite.
    pub fn is_finite(&self) -> bool {
        self.g.to_homogeneous().iter().all(|x| x.is_finite()) && self.body().is_finite()
    }
}

/// Spatial momentum `Ad*_{g^-1} p`.
pub fn momentum_map(pt: &PhasePoint) -> Result<CoalgebraVector> {
    lie::ad_star_group(&pt.g.inverse(), &pt.p)
}

/// Largest Casimir difference between `nu` and `mu`; zero iff they share a coadjoint orbit
/// (generically).
pub fn orbit_defect(nu: &CoalgebraVector, mu: &CoalgebraVector) -> Result<f64> {
    if nu.kind() != mu.kind() {
        return Err(Error::KindMismatch { expected: mu.kind(), found: nu.kind() });
    }
    let a = poisson::casimirs_of(nu);
    let b = poisson::casimirs_of(mu);
    Ok(a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x.1 - y.1).abs())))
}

/// Body coordinates of a point of `J^-1(mu)`; errors with `|J - mu|` off the level.
pub fn project_reduced(pt: &PhasePoint, mu: &CoalgebraVector) -> Result<ReducedPoint> {
    let defect = momentum_map(pt)?.sub(mu)?.norm();
    if defect.is_nan() || defect > 1e-8 {
        return Err(Error::Membership { defect });
    }
    Ok(pt.body())
}

/// Largest `|H(pt) - h(project(pt))|` over `samples`, each projected onto its own level.
pub fn reduced_hamiltonian_check<H, F>(h_full: H, h_red: &F, samples: &[PhasePoint]) -> Result<f64>
where
    H: Fn(&PhasePoint) -> f64,
    F: ScalarField + ?Sized,
{
    let mut worst = 0.0f64;
    for pt in samples {
        let reduced = project_reduced(pt, &momentum_map(pt)?)?;
        worst = worst.max((h_full(pt) - h_red.value(&reduced)).abs());
    }
    Ok(worst)
}

/// Tangent to `T*Q` in left trivialization: `g' = g xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullTangent {
    /// Body velocity.
    pub xi: AlgebraVector,
    /// Body-momentum rate.
    pub p: CoalgebraVector,
    /// Angle rates.
    pub theta: Vec<f64>,
    /// Rotor-momentum rates.
    pub l: Vec<f64>,
}

impl FullTangent {
    /// Fiber part seen in body coordinates.
    pub fn project(&self) -> ReducedTangent {
        ReducedTangent { nu: self.p, theta: self.theta.clone(), l: self.l.clone() }
    }
}

/// Full dynamical field: reduced dynamics in the fibers, reconstruction velocity on `G`.
pub fn full_field(sys: &RchSystem, pt: &PhasePoint) -> Result<FullTangent> {
    let body = pt.body();
    let v = rch::dynamical_field(sys, &body)?;
    let grad = poisson::gradient(sys.hamiltonian.as_ref(), &body)?;
    Ok(FullTangent { xi: grad.nu, p: v.nu, theta: v.theta, l: v.l })
}

/// `|X_mu(pi(pt)) - T pi . X(pt)|` for `pt` in `J^-1(mu)`.
pub fn commutation_residual(sys: &RchSystem, pt: &PhasePoint, mu: &CoalgebraVector) -> Result<f64> {
    commutation_residual_with(sys, pt, mu, |p| rch::dynamical_field(sys, p))
}

/// [`commutation_residual`] against an explicitly supplied reduced field.
pub fn commutation_residual_with<F>(sys: &RchSystem, pt: &PhasePoint, mu: &CoalgebraVector, reduced: F) -> Result<f64>
where
    F: Fn(&ReducedPoint) -> Result<ReducedTangent>,
{
    let r = project_reduced(pt, mu)?;
    let projected = full_field(sys, pt)?.project();
    Ok(reduced(&r)?.axpy(-1.0, &projected)?.norm())
}

fn lagrange(nodes: &[f64], values: &[AlgebraVector], t: f64) -> Result<AlgebraVector> {
    let mut acc = AlgebraVector::zero(values[0].kind());
    for (i, (ti, vi)) in nodes.iter().zip(values).enumerate() {
        let w = nodes.iter().enumerate().filter(|(j, _)| *j != i).fold(1.0, |w, (_, tj)| w * (t - tj) / (ti - tj));
        acc = acc.add(&vi.scale(w))?;
    }
    Ok(acc)
}

/// Attitude history for a reduced trajectory sampled at uniform `dt`, solving
/// `g' = g xi(t)` with `xi = dh/dnu`. Each step uses the fourth-order Magnus
/// update `g exp(dt/2 (xi_1 + xi_2) + sqrt(3)/12 dt^2 [xi_1, xi_2])`, with
/// `xi` interpolated at the Gauss nodes from the four nearest samples (linearly
/// when fewer than four are available).
pub fn reconstruct<H: ScalarField + ?Sized>(
    h: &H,
    traj: &[ReducedPoint],
    g0: GroupElement,
    dt: f64,
) -> Result<Vec<GroupElement>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(alloc::format!("dt must be positive, got {dt}")));
    }
    let xis: Vec<AlgebraVector> = traj.iter().map(|p| poisson::gradient(h, p).map(|g| g.nu)).collect::<Result<_>>()?;
    if let Some(x) = xis.first() {
        if x.kind() != g0.kind() {
            return Err(Error::KindMismatch { expected: g0.kind(), found: x.kind() });
        }
    }
    let n = xis.len();
    let c = libm::sqrt(3.0) / 6.0;
    let mut out = Vec::with_capacity(n);
    let mut g = g0;
    for i in 0..n {
        out.push(g);
        if i + 1 == n {
            break;
        }
        let (a, b) = if n >= 4 {
            let start = i.saturating_sub(1).min(n - 4);
            let nodes: Vec<f64> = (start..start + 4).map(|j| j as f64 - i as f64).collect();
            let vals = &xis[start..start + 4];
            (lagrange(&nodes, vals, 0.5 - c)?, lagrange(&nodes, vals, 0.5 + c)?)
        } else {
            let (x0, x1) = (&xis[i], &xis[i + 1]);
            (x0.scale(0.5 + c).add(&x1.scale(0.5 - c))?, x0.scale(0.5 - c).add(&x1.scale(0.5 + c))?)
        };
        let omega = a.add(&b)?.scale(0.5 * dt).add(&lie::bracket(&a, &b)?.scale(libm::sqrt(3.0) / 12.0 * dt * dt))?;
        g = g.compose(&lie::exp_group(&omega))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::AlgebraKind;
    use crate::poisson::{Analytic, Gradient};
    use crate::sampling;
    use crate::systems::{self, HeavyTopRotorParams, RigidBodyRotorParams};
    use core::f64::consts::FRAC_PI_2;
    use nalgebra::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rb() -> RigidBodyRotorParams {
        RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.3, 0.4, 0.5]).unwrap()
    }

    fn random_phase(rng: &mut ChaCha8Rng, kind: AlgebraKind, k: usize) -> PhasePoint {
        PhasePoint::lift(sampling::group(rng, kind), &sampling::reduced_point(rng, kind, k, 1.0)).unwrap()
    }

    #[test]
    fn momentum_map_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let pt = PhasePoint::lift(
            GroupElement::identity(AlgebraKind::Se3),
            &sampling::reduced_point(&mut rng, AlgebraKind::Se3, 2, 1.0),
        )
        .unwrap();
        assert_eq!(momentum_map(&pt).unwrap(), pt.p);
        let g = lie::exp_group(&AlgebraVector::So3(Vector3::z() * FRAC_PI_2));
        let pt = PhasePoint { g, p: CoalgebraVector::So3(Vector3::x()), theta: vec![], l: vec![] };
        assert!((momentum_map(&pt).unwrap().pi() - Vector3::y()).norm() < 1e-15);
    }

    #[test]
    fn projection_on_and_off_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for kind in [AlgebraKind::So3, AlgebraKind::Se3] {
            let mu = sampling::coalgebra(&mut rng, kind, 1.0);
            let g = sampling::group(&mut rng, kind);
            let p = lie::ad_star_group(&g, &mu).unwrap();
            let pt = PhasePoint { g, p, theta: vec![0.1], l: vec![0.2] };
            let r = project_reduced(&pt, &mu).unwrap();
            assert_eq!(r.nu, p);
            assert!(orbit_defect(&r.nu, &mu).unwrap() <= 1e-12);
            let bad = PhasePoint { p: p.scale(1.1), ..pt };
            match project_reduced(&bad, &mu) {
                Err(Error::Membership { defect }) => {
                    assert!((defect - momentum_map(&bad).unwrap().sub(&mu).unwrap().norm()).abs() < 1e-15)
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn lift_then_project_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..20 {
            let pt = random_phase(&mut rng, AlgebraKind::Se3, 2);
            let mu = momentum_map(&pt).unwrap();
            assert_eq!(project_reduced(&pt, &mu).unwrap(), pt.body());
        }
    }

    #[test]
    fn reduced_hamiltonians_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let p = rb();
        let samples: Vec<PhasePoint> = (0..50).map(|_| random_phase(&mut rng, AlgebraKind::So3, 3)).collect();
        let h = systems::rigid_body_hamiltonian(p);
        let d = reduced_hamiltonian_check(|pt| systems::rigid_body_full_h(&p, pt), &h, &samples).unwrap();
        assert!(d <= 1e-10, "{d}");
        let ht = HeavyTopRotorParams::new([1.5, 2.0, 2.5], [0.2, 0.3], 1.0, 9.81, 0.1, Vector3::z()).unwrap();
        let samples: Vec<PhasePoint> = (0..50).map(|_| random_phase(&mut rng, AlgebraKind::Se3, 2)).collect();
        let d = reduced_hamiltonian_check(
            |pt| systems::heavy_top_full_h(&ht, pt),
            &systems::HeavyTopHamiltonian(ht),
            &samples,
        )
        .unwrap();
        assert!(d <= 1e-12, "{d}");
        let shifted = Analytic {
            value: |x: &ReducedPoint| systems::rigid_body_reduced_h(&p, x) + 1e-3,
            gradient: |x: &ReducedPoint| Gradient::zero(x.kind(), x.rotors()),
        };
        let samples: Vec<PhasePoint> = (0..5).map(|_| random_phase(&mut rng, AlgebraKind::So3, 3)).collect();
        let d = reduced_hamiltonian_check(|pt| systems::rigid_body_full_h(&p, pt), &shifted, &samples).unwrap();
        assert!((d - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn commutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let sys = systems::rigid_body_system(rb());
        for _ in 0..20 {
            let pt = random_phase(&mut rng, AlgebraKind::So3, 3);
            let mu = momentum_map(&pt).unwrap();
            assert!(commutation_residual(&sys, &pt, &mu).unwrap() <= 1e-8);
        }
        let pt = random_phase(&mut rng, AlgebraKind::So3, 3);
        let mu = momentum_map(&pt).unwrap();
        let eps = 1e-4;
        let r = commutation_residual_with(&sys, &pt, &mu, |p| {
            let mut v = rch::dynamical_field(&sys, p)?;
            v.nu = v.nu.add(&CoalgebraVector::So3(Vector3::x() * eps))?;
            Ok(v)
        })
        .unwrap();
        assert!((r - eps).abs() < 1e-12);
        let zero = CoalgebraVector::zero(AlgebraKind::So3);
        assert!(matches!(commutation_residual(&sys, &pt, &zero), Err(Error::Membership { .. })));
    }

    #[test]
    fn constant_velocity_reconstruction() {
        let w = 0.7;
        let h = Analytic {
            value: move |p: &ReducedPoint| w * p.nu.pi()[2],
            gradient: move |p: &ReducedPoint| Gradient {
                nu: AlgebraVector::So3(Vector3::z() * w),
                ..Gradient::zero(p.kind(), p.rotors())
            },
        };
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        let g0 = sampling::group(&mut rng, AlgebraKind::So3);
        let dt = 1e-2;
        let traj = vec![ReducedPoint::new(CoalgebraVector::zero(AlgebraKind::So3), vec![], vec![]).unwrap(); 301];
        let gs = reconstruct(&h, &traj, g0, dt).unwrap();
        let expect = g0.compose(&lie::exp_group(&AlgebraVector::So3(Vector3::z() * (w * 3.0)))).unwrap();
        assert!((gs[300].rot() - expect.rot()).norm() < 1e-12);
        for g in &gs {
            assert!(g.orthonormality_defect() < 1e-12);
        }
        let zero = Analytic {
            value: |_: &ReducedPoint| 0.0,
            gradient: |p: &ReducedPoint| Gradient::zero(p.kind(), p.rotors()),
        };
        assert!(reconstruct(&zero, &traj[..3], g0, dt).unwrap().iter().all(|g| *g == g0));
    }
}
