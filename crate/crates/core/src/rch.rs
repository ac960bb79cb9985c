//! Controlled Hamiltonian systems on the reduced space: Hamiltonian plus
//! vertically lifted force and control, and the matching control that makes
//! one system reproduce another through a transport map.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::{AlgebraKind, CoalgebraVector};
use crate::poisson::{self, ReducedPoint, ReducedTangent, ScalarField};

/// Tangent vector along the fibers `(d nu, d l)`; the base (`theta`) part is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalVector {
    /// Orbit component.
    pub nu: CoalgebraVector,
    /// Rotor-momentum component.
    pub l: Vec<f64>,
}

impl VerticalVector {
    /// Zero vector.
    pub fn zero(kind: AlgebraKind, k: usize) -> Self {
        Self { nu: CoalgebraVector::zero(kind), l: alloc::vec![0.0; k] }
    }

    /// As a full tangent vector with zero base part.
    pub fn to_tangent(&self) -> ReducedTangent {
        ReducedTangent { nu: self.nu, theta: alloc::vec![0.0; self.l.len()], l: self.l.clone() }
    }

    /// Vertical part of a tangent vector.
    pub fn of(t: &ReducedTangent) -> Self {
        Self { nu: t.nu, l: t.l.clone() }
    }
}

/// Fiber-preserving map of the reduced space.
pub type FiberMap = dyn Fn(&ReducedPoint) -> ReducedPoint + Send + Sync;
/// Directly specified vertical vector field.
pub type VerticalField = dyn Fn(&ReducedPoint) -> Result<VerticalVector> + Send + Sync;

/// A force or control: either a fiber map lifted along the Hamiltonian
/// field, or a vertical field given directly.
#[derive(Clone)]
pub enum Actuation {
    /// Fiber map, lifted by the straight-line rule.
    FiberMap(Arc<FiberMap>),
    /// Vertical field.
    Vertical(Arc<VerticalField>),
}

impl Actuation {
    /// Wrap a fiber map.
    pub fn fiber_map<F>(f: F) -> Self
    where
        F: Fn(&ReducedPoint) -> ReducedPoint + Send + Sync + 'static,
    {
        Actuation::FiberMap(Arc::new(f))
    }

    /// Wrap a vertical field.
    pub fn vertical<F>(f: F) -> Self
    where
        F: Fn(&ReducedPoint) -> Result<VerticalVector> + Send + Sync + 'static,
    {
        Actuation::Vertical(Arc::new(f))
    }

    /// Constant vertical field.
    pub fn constant(v: VerticalVector) -> Self {
        Actuation::vertical(move |_| Ok(v.clone()))
    }

    /// Vertical contribution at `p`, given the Hamiltonian field `x` there.
    pub fn lift(&self, x: &ReducedTangent, p: &ReducedPoint) -> Result<VerticalVector> {
        match self {
            Actuation::FiberMap(f) => vlift_fiber_map(f.as_ref(), x, p),
            Actuation::Vertical(v) => {
                let out = v(p)?;
                if out.l.len() != p.rotors() || out.nu.kind() != p.kind() {
                    return Err(Error::CountMismatch {
                        what: "vertical vector",
                        expected: p.dim(),
                        found: out.nu.kind().dim() + 2 * out.l.len(),
                    });
                }
                Ok(out)
            }
        }
    }
}

/// Reduced controlled Hamiltonian system. Absent force or control contributes nothing.
#[derive(Clone)]
pub struct RchSystem {
    /// Reduced Hamiltonian.
    pub hamiltonian: Arc<dyn ScalarField + Send + Sync>,
    /// External force.
    pub force: Option<Actuation>,
    /// Control.
    pub control: Option<Actuation>,
    /// Algebra of the orbit coordinate.
    pub kind: AlgebraKind,
    /// Rotor count.
    pub rotors: usize,
}

impl RchSystem {
    /// Uncontrolled, force-free system.
    pub fn new<H: ScalarField + Send + Sync + 'static>(h: H, kind: AlgebraKind, rotors: usize) -> Self {
        Self { hamiltonian: Arc::new(h), force: None, control: None, kind, rotors }
    }

    /// Replace the force.
    pub fn with_force(mut self, f: Actuation) -> Self {
        self.force = Some(f);
        self
    }

    /// Replace the control.
    pub fn with_control(mut self, u: Actuation) -> Self {
        self.control = Some(u);
        self
    }

    /// Same system with the control removed.
    pub fn uncontrolled(&self) -> Self {
        Self { control: None, ..self.clone() }
    }

    /// Error unless `p` has this system's shape.
    pub fn check_point(&self, p: &ReducedPoint) -> Result<()> {
        if p.kind() != self.kind {
            return Err(Error::KindMismatch { expected: self.kind, found: p.kind() });
        }
        if p.rotors() != self.rotors || p.l.len() != self.rotors {
            return Err(Error::CountMismatch { what: "rotor coordinates", expected: self.rotors, found: p.rotors() });
        }
        Ok(())
    }

    /// Hamiltonian field of the reduced Hamiltonian.
    pub fn hamiltonian_field(&self, p: &ReducedPoint) -> Result<ReducedTangent> {
        self.check_point(p)?;
        poisson::hamiltonian_field(self.hamiltonian.as_ref(), p)
    }
}

/// Vertical part of the pushforward of `x` (a tangent at `p`) through `fmap`,
/// carried back from `fmap(p)` to `p` along the straight line in the fiber.
pub fn vlift_fiber_map(fmap: &FiberMap, x: &ReducedTangent, p: &ReducedPoint) -> Result<VerticalVector> {
    let image = fmap(p);
    if image.dim() != p.dim() {
        return Err(Error::CountMismatch { what: "fiber map image", expected: p.dim(), found: image.dim() });
    }
    let moved = image.theta.iter().zip(&p.theta).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if moved > 1e-12 * (1.0 + p.norm()) {
        return Err(Error::NotFiberPreserving(moved));
    }
    let xn = x.norm();
    if xn == 0.0 {
        return Ok(VerticalVector::zero(p.kind(), p.rotors()));
    }
    let s = 1e-6 * p.norm().max(1.0) / xn;
    let plus = fmap(&p.displaced(s, x)?).to_vec();
    let minus = fmap(&p.displaced(-s, x)?).to_vec();
    let d: Vec<f64> = plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * s)).collect();
    Ok(VerticalVector::of(&ReducedTangent::from_slice(p.kind(), p.rotors(), &d)?))
}

/// `X_h + vlift(force) + vlift(control)` at `p`.
pub fn dynamical_field(sys: &RchSystem, p: &ReducedPoint) -> Result<ReducedTangent> {
    let xh = sys.hamiltonian_field(p)?;
    let mut out = xh.clone();
    for act in [&sys.force, &sys.control].into_iter().flatten() {
        out = out.axpy(1.0, &act.lift(&xh, p)?.to_tangent())?;
    }
    if !out.is_finite() {
        return Err(Error::NonFinite("dynamical field"));
    }
    Ok(out)
}

/// Map between the reduced spaces of two systems, B to A.
pub trait ReducedTransport: Send + Sync {
    /// Point of B to point of A.
    fn pullback(&self, b: &ReducedPoint) -> Result<ReducedPoint>;
    /// Point of A to point of B; errors where the map is not invertible.
    fn pullback_inverse(&self, a: &ReducedPoint) -> Result<ReducedPoint>;
    /// Tangent of B at `b` to the corresponding tangent of A.
    fn push_tangent(&self, b: &ReducedPoint, v: &ReducedTangent) -> Result<ReducedTangent>;
}

/// The identity transport between systems of the same shape.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTransport;

impl ReducedTransport for IdentityTransport {
    fn pullback(&self, b: &ReducedPoint) -> Result<ReducedPoint> {
        Ok(b.clone())
    }
    fn pullback_inverse(&self, a: &ReducedPoint) -> Result<ReducedPoint> {
        Ok(a.clone())
    }
    fn push_tangent(&self, _b: &ReducedPoint, v: &ReducedTangent) -> Result<ReducedTangent> {
        Ok(v.clone())
    }
}

/// Field of B at the point corresponding to `a`, pushed to A.
pub fn transported_field(b: &RchSystem, transport: &dyn ReducedTransport, a: &ReducedPoint) -> Result<ReducedTangent> {
    let pb = transport.pullback_inverse(a)?;
    transport.push_tangent(&pb, &dynamical_field(b, &pb)?)
}

/// Control for A that reproduces B through `transport`:
/// `v(p) = vertical part of (-X_A(p) + push(X_B(pullback^{-1}(p))))`,
/// where `X_A` excludes A's own control.
pub fn matching_control(a: &RchSystem, b: Arc<RchSystem>, transport: Arc<dyn ReducedTransport>) -> Actuation {
    let a = a.uncontrolled();
    Actuation::vertical(move |p| {
        let own = dynamical_field(&a, p)?;
        let target = transported_field(&b, transport.as_ref(), p)?;
        Ok(VerticalVector::of(&target.axpy(-1.0, &own)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{Analytic, FnField, Gradient};
    use crate::sampling;
    use crate::systems::{self, RigidBodyRotorParams};
    use nalgebra::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity() -> Arc<FiberMap> {
        Arc::new(|p: &ReducedPoint| p.clone())
    }

    #[test]
    fn identity_lift_keeps_vertical_part() {
        let p = ReducedPoint::new(CoalgebraVector::So3(Vector3::new(1.0, 2.0, 3.0)), vec![0.5], vec![0.1]).unwrap();
        let vert =
            ReducedTangent { nu: CoalgebraVector::So3(Vector3::new(0.2, -0.1, 0.4)), theta: vec![0.0], l: vec![0.7] };
        let lifted = vlift_fiber_map(identity().as_ref(), &vert, &p).unwrap();
        assert!(lifted.to_tangent().axpy(-1.0, &vert).unwrap().norm() < 1e-9);
        let horiz = ReducedTangent { nu: CoalgebraVector::zero(AlgebraKind::So3), theta: vec![1.0], l: vec![0.0] };
        let lifted = vlift_fiber_map(identity().as_ref(), &horiz, &p).unwrap();
        assert!(lifted.to_tangent().norm() < 1e-9);
    }

    #[test]
    fn constant_shift_force_matches_flow_transport() {
        let params = RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.5, 0.6, 0.7]).unwrap();
        let h = systems::rigid_body_hamiltonian(params);
        let c = [0.3, -0.2, 0.1];
        let shift = move |p: &ReducedPoint| {
            let mut q = p.clone();
            for (l, c) in q.l.iter_mut().zip(c) {
                *l += c;
            }
            q
        };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = sampling::reduced_point(&mut rng, AlgebraKind::So3, 3, 1.0);
        let xh = poisson::hamiltonian_field(&h, &p).unwrap();
        let lifted = vlift_fiber_map(&shift, &xh, &p).unwrap();
        // transport of the flow through the map, by finite differences along a short Euler step
        let s = 1e-6;
        let a = shift(&p.displaced(s, &xh).unwrap());
        let b = shift(&p.displaced(-s, &xh).unwrap());
        let d = a.difference(&b).unwrap().scale(0.5 / s);
        assert!(VerticalVector::of(&d).to_tangent().axpy(-1.0, &lifted.to_tangent()).unwrap().norm() < 1e-8);
    }

    #[test]
    fn non_fiber_preserving_map_is_rejected() {
        let bad = |p: &ReducedPoint| {
            let mut q = p.clone();
            q.theta[0] += 1.0;
            q
        };
        let p = ReducedPoint::zero(AlgebraKind::So3, 1);
        let x = ReducedTangent::zero(AlgebraKind::So3, 1);
        assert!(matches!(vlift_fiber_map(&bad, &x, &p), Err(Error::NotFiberPreserving(_))));
    }

    #[test]
    fn lifted_output_is_vertical() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let fmap = |p: &ReducedPoint| {
            let mut q = p.clone();
            q.nu = q.nu.scale(1.0 + q.theta[0].sin());
            q.l[1] *= q.l[0];
            q
        };
        for _ in 0..20 {
            let p = sampling::reduced_point(&mut rng, AlgebraKind::Se3, 2, 1.0);
            let x = ReducedTangent::from_slice(AlgebraKind::Se3, 2, &sampling::vector(&mut rng, 10, 1.0)).unwrap();
            let v = vlift_fiber_map(&fmap, &x, &p).unwrap().to_tangent();
            assert!(v.theta.iter().all(|t| *t == 0.0));
        }
    }

    #[test]
    fn absent_force_and_control_give_hamiltonian_field() {
        let params = RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.5, 0.6, 0.7]).unwrap();
        let sys = systems::rigid_body_system(params);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = sampling::reduced_point(&mut rng, AlgebraKind::So3, 3, 1.0);
        assert_eq!(dynamical_field(&sys, &p).unwrap(), sys.hamiltonian_field(&p).unwrap());
    }

    #[test]
    fn constant_rotor_torque_shifts_only_momentum_rates() {
        let params = RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.5, 0.6, 0.7]).unwrap();
        let dl = vec![0.1, -0.2, 0.3];
        let u = VerticalVector { nu: CoalgebraVector::zero(AlgebraKind::So3), l: dl.clone() };
        let sys = systems::rigid_body_system(params).with_control(Actuation::constant(u));
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let p = sampling::reduced_point(&mut rng, AlgebraKind::So3, 3, 1.0);
        let x = dynamical_field(&sys, &p).unwrap();
        let xh = sys.hamiltonian_field(&p).unwrap();
        assert_eq!(x.nu, xh.nu);
        assert_eq!(x.theta, xh.theta);
        for ((a, b), d) in x.l.iter().zip(&xh.l).zip(&dl) {
            assert!((a - b - d).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_hamiltonian_with_control_is_vertical() {
        let zero = Analytic {
            value: |_: &ReducedPoint| 0.0,
            gradient: |p: &ReducedPoint| Gradient::zero(p.kind(), p.rotors()),
        };
        let u = Actuation::vertical(|p: &ReducedPoint| Ok(VerticalVector { nu: p.nu.scale(2.0), l: p.l.clone() }));
        let sys = RchSystem::new(zero, AlgebraKind::Se3, 2).with_control(u);
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let p = sampling::reduced_point(&mut rng, AlgebraKind::Se3, 2, 1.0);
        let x = dynamical_field(&sys, &p).unwrap();
        assert!(x.theta.iter().all(|t| *t == 0.0));
        assert!(x.norm() > 0.1);
    }

    #[test]
    fn field_minus_hamiltonian_part_is_vertical() {
        let params = RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.5, 0.6, 0.7]).unwrap();
        let force = Actuation::fiber_map(|p: &ReducedPoint| {
            let mut q = p.clone();
            q.nu = q.nu.scale(0.5);
            q.l = q.l.iter().map(|x| x * x).collect();
            q
        });
        let sys = systems::rigid_body_system(params).with_force(force);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..20 {
            let p = sampling::reduced_point(&mut rng, AlgebraKind::So3, 3, 1.0);
            let d = dynamical_field(&sys, &p).unwrap().axpy(-1.0, &sys.hamiltonian_field(&p).unwrap()).unwrap();
            assert!(d.theta.iter().all(|t| *t == 0.0));
        }
    }

    #[test]
    fn matching_same_system_identity_transport_is_zero() {
        let params = RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.5, 0.6, 0.7]).unwrap();
        let a = systems::rigid_body_system(params);
        let u = matching_control(&a, Arc::new(a.clone()), Arc::new(IdentityTransport));
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..20 {
            let p = sampling::reduced_point(&mut rng, AlgebraKind::So3, 3, 1.0);
            let xh = a.hamiltonian_field(&p).unwrap();
            assert_eq!(u.lift(&xh, &p).unwrap().to_tangent().norm(), 0.0);
        }
    }

    #[test]
    fn matching_term_is_linear_in_target_hamiltonian() {
        let pa = RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.5, 0.6, 0.7]).unwrap();
        let pb = RigidBodyRotorParams::new([2.0, 1.5, 1.0], [0.4, 0.3, 0.2]).unwrap();
        let a = systems::rigid_body_system(pa);
        let hb = systems::rigid_body_hamiltonian(pb);
        let hb2 = FnField(move |p: &ReducedPoint| 2.0 * hb.value(p));
        let b1 = Arc::new(systems::rigid_body_system(pb));
        let b2 = Arc::new(RchSystem::new(hb2, AlgebraKind::So3, 3));
        let u1 = matching_control(&a, b1, Arc::new(IdentityTransport));
        let u2 = matching_control(&a, b2, Arc::new(IdentityTransport));
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let p = sampling::reduced_point(&mut rng, AlgebraKind::So3, 3, 1.0);
        let xa = VerticalVector::of(&a.hamiltonian_field(&p).unwrap()).to_tangent();
        let t1 = u1.lift(&xa, &p).unwrap().to_tangent().axpy(1.0, &xa).unwrap();
        let t2 = u2.lift(&xa, &p).unwrap().to_tangent().axpy(1.0, &xa).unwrap();
        assert!(t2.axpy(-2.0, &t1).unwrap().norm() < 1e-7);
    }
}
