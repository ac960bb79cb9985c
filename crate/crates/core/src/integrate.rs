//! Classical RK4 on reduced fields, with drift series for supplied invariants.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::poisson::{ReducedPoint, ReducedTangent, ScalarField};

/// One RK4 step of size `dt > 0`.
pub fn rk4_step<F>(field: &F, p: &ReducedPoint, dt: f64) -> Result<ReducedPoint>
where
    F: Fn(&ReducedPoint) -> Result<ReducedTangent> + ?Sized,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(format!("dt must be positive and finite, got {dt}")));
    }
    if !p.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    let k1 = field(p)?;
    let k2 = field(&p.displaced(0.5 * dt, &k1)?)?;
    let k3 = field(&p.displaced(0.5 * dt, &k2)?)?;
    let k4 = field(&p.displaced(dt, &k3)?)?;
    let incr = k1.axpy(2.0, &k2)?.axpy(2.0, &k3)?.axpy(1.0, &k4)?;
    let next = p.displaced(dt / 6.0, &incr)?;
    if !next.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    Ok(next)
}

/// Named scalar monitored along a run.
pub struct Invariant<'a> {
    /// Column name.
    pub name: &'a str,
    /// The scalar.
    pub f: &'a dyn ScalarField,
}

/// Values of one invariant along a trajectory and their drift from the initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSeries {
    /// Column name.
    pub name: String,
    /// Values at each sample.
    pub values: Vec<f64>,
    /// `|I(t) - I(0)| / |I(0)|`, or the absolute change when `|I(0)| < 1e-12`.
    pub drift: Vec<f64>,
}

impl DriftSeries {
    /// Largest drift.
    pub fn max(&self) -> f64 {
        self.drift.iter().fold(0.0, |m, d| m.max(*d))
    }

    /// Whether the drift was measured relative to the initial value.
    pub fn relative(&self) -> bool {
        self.values.first().is_some_and(|v| v.abs() >= 1e-12)
    }
}

/// Sampled solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Sample times `i dt`.
    pub times: Vec<f64>,
    /// States.
    pub states: Vec<ReducedPoint>,
    /// One series per supplied invariant.
    pub drift: Vec<DriftSeries>,
}

impl Trajectory {
    /// Final state.
    pub fn last(&self) -> &ReducedPoint {
        self.states.last().expect("non-empty trajectory")
    }
}

/// Number of steps for horizon `t_end`; errors unless `dt` divides it within rounding.
pub fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(format!("dt must be positive and finite, got {dt}")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidStep(format!("horizon must be non-negative and finite, got {t_end}")));
    }
    let n = libm::round(t_end / dt);
    if (n * dt - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::InvalidStep(format!("dt = {dt} does not divide T = {t_end}")));
    }
    Ok(n as usize)
}

/// Integrate from `p0` to `t_end` with fixed step `dt`, recording `invariants`.
/// A state with a component above `1e12` in magnitude, or a non-finite one,
/// aborts with [`Error::BlowUp`].
pub fn run<F>(field: &F, p0: &ReducedPoint, dt: f64, t_end: f64, invariants: &[Invariant<'_>]) -> Result<Trajectory>
where
    F: Fn(&ReducedPoint) -> Result<ReducedTangent> + ?Sized,
{
    let n = step_count(dt, t_end)?;
    if !p0.is_finite() {
        return Err(Error::NonFinite("initial state"));
    }
    let mut states = Vec::with_capacity(n + 1);
    states.push(p0.clone());
    for i in 0..n {
        let time = (i + 1) as f64 * dt;
        let next = match rk4_step(field, &states[i], dt) {
            Ok(s) => s,
            Err(Error::NonFinite(_)) => return Err(Error::BlowUp { time }),
            Err(e) => return Err(e),
        };
        if next.to_vec().iter().any(|c| c.abs() > 1e12) {
            return Err(Error::BlowUp { time });
        }
        states.push(next);
    }
    let drift = invariants
        .iter()
        .map(|inv| {
            let values: Vec<f64> = states.iter().map(|s| inv.f.value(s)).collect();
            let i0 = values[0];
            let scale = if i0.abs() < 1e-12 { 1.0 } else { i0.abs() };
            let drift = values.iter().map(|v| (v - i0).abs() / scale).collect();
            DriftSeries { name: inv.name.to_string(), values, drift }
        })
        .collect();
    Ok(Trajectory { times: (0..=n).map(|i| i as f64 * dt).collect(), states, drift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::CoalgebraVector;
    use crate::poisson::Casimir;
    use crate::rch;
    use crate::systems::{self, HeavyTopRotorParams, RigidBodyRotorParams};
    use nalgebra::Vector3;

    fn so3(pi: Vector3<f64>) -> ReducedPoint {
        ReducedPoint { nu: CoalgebraVector::So3(pi), theta: vec![], l: vec![] }
    }

    fn free_body() -> RigidBodyRotorParams {
        RigidBodyRotorParams::new([1.0, 2.0, 3.0], [1e-9, 1e-9, 1e-9]).unwrap()
    }

    fn identity_field(p: &ReducedPoint) -> Result<ReducedTangent> {
        ReducedTangent::from_slice(p.kind(), p.rotors(), &p.to_vec())
    }

    #[test]
    fn zero_field_is_stationary() {
        let p = so3(Vector3::new(1.0, 2.0, 3.0));
        let zero = |p: &ReducedPoint| Ok(ReducedTangent::zero(p.kind(), p.rotors()));
        assert_eq!(rk4_step(&zero, &p, 0.1).unwrap(), p);
    }

    #[test]
    fn exponential_step_is_quartic_taylor() {
        let p = so3(Vector3::new(1.0, 0.0, 0.0));
        let q = rk4_step(&identity_field, &p, 0.1).unwrap();
        let h: f64 = 0.1;
        let taylor = 1.0 + h + h * h / 2.0 + h * h * h / 6.0 + h * h * h * h / 24.0;
        assert!((q.nu.pi()[0] - taylor).abs() <= 1e-15);
        let err = libm::exp(0.1) - q.nu.pi()[0];
        assert!(err > 8.4e-8 && err < 8.6e-8, "{err}");
        assert!(rk4_step(&identity_field, &p, 0.0).is_err());
        assert!(rk4_step(&identity_field, &p, -0.1).is_err());
    }

    #[test]
    fn convergence_order_is_four() {
        let params = RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.3, 0.4, 0.5]).unwrap();
        let f = |p: &ReducedPoint| systems::rigid_body_field(&params, p);
        let p0 = ReducedPoint {
            nu: CoalgebraVector::So3(Vector3::new(0.5, 1.0, -0.7)),
            theta: vec![0.0; 3],
            l: vec![0.1, -0.2, 0.3],
        };
        let t = 1.0;
        let end = |dt: f64| run(&f, &p0, dt, t, &[]).unwrap().last().clone();
        let (a, b, c) = (end(0.1), end(0.05), end(0.025));
        let e1 = a.difference(&b).unwrap().norm();
        let e2 = b.difference(&c).unwrap().norm();
        let order = libm::log2(e1 / e2);
        assert!((order - 4.0).abs() <= 0.1, "order {order}");
    }

    #[test]
    fn time_reversal() {
        let params = free_body();
        let f = |p: &ReducedPoint| systems::rigid_body_field(&params, p);
        let back = |p: &ReducedPoint| Ok(systems::rigid_body_field(&params, p)?.scale(-1.0));
        let p0 = ReducedPoint {
            nu: CoalgebraVector::So3(Vector3::new(0.5, 1.0, -0.7)),
            theta: vec![0.0; 3],
            l: vec![0.0; 3],
        };
        let fwd = run(&f, &p0, 1e-3, 1.0, &[]).unwrap();
        let bwd = run(&back, fwd.last(), 1e-3, 1.0, &[]).unwrap();
        assert!(bwd.last().difference(&p0).unwrap().norm() <= 1e-6);
    }

    #[test]
    fn free_rigid_body_drift() {
        let params = free_body();
        let sys = systems::rigid_body_system(params);
        let f = |p: &ReducedPoint| rch::dynamical_field(&sys, p);
        let p0 = ReducedPoint {
            nu: CoalgebraVector::So3(Vector3::new(0.3, 1.0, 0.5)),
            theta: vec![0.0; 3],
            l: vec![0.0; 3],
        };
        let inv = [
            Invariant { name: "pi_sq", f: &Casimir::PiSquared },
            Invariant { name: "energy", f: sys.hamiltonian.as_ref() },
        ];
        let traj = run(&f, &p0, 1e-3, 10.0, &inv).unwrap();
        assert_eq!(traj.times.len(), 10_001);
        assert!(
            traj.drift.iter().all(|d| d.max() <= 1e-8),
            "{:?}",
            traj.drift.iter().map(DriftSeries::max).collect::<Vec<_>>()
        );
    }

    #[test]
    fn heavy_top_drift() {
        let params =
            HeavyTopRotorParams::new([1.5, 2.0, 2.5], [0.2, 0.3], 1.0, 9.81, 0.1, Vector3::new(0.0, 0.6, 0.8)).unwrap();
        let sys = systems::heavy_top_system(params);
        let f = |p: &ReducedPoint| rch::dynamical_field(&sys, p);
        let p0 = ReducedPoint {
            nu: CoalgebraVector::Se3 { pi: Vector3::new(0.3, 0.5, 1.0), gamma: Vector3::new(0.0, 0.6, 0.8) },
            theta: vec![0.0; 2],
            l: vec![0.05, -0.05],
        };
        let inv = [
            Invariant { name: "pi_dot_gamma", f: &Casimir::PiDotGamma },
            Invariant { name: "gamma_sq", f: &Casimir::GammaSquared },
            Invariant { name: "energy", f: sys.hamiltonian.as_ref() },
        ];
        let traj = run(&f, &p0, 1e-3, 10.0, &inv).unwrap();
        for d in &traj.drift {
            assert!(d.max() <= 1e-8, "{} {}", d.name, d.max());
        }
    }

    #[test]
    fn intermediate_axis_is_unstable() {
        let params = free_body();
        let f = |p: &ReducedPoint| systems::rigid_body_field(&params, p);
        let run_from = |pi: Vector3<f64>| {
            let p0 = ReducedPoint { nu: CoalgebraVector::So3(pi), theta: vec![0.0; 3], l: vec![0.0; 3] };
            let traj = run(&f, &p0, 1e-2, 30.0, &[]).unwrap();
            traj.states.iter().map(|s| (s.nu.pi().normalize() - pi.normalize()).norm()).fold(0.0, f64::max)
        };
        assert!(run_from(Vector3::new(1e-3, 1.0, 1e-3)) > 1.0);
        assert!(run_from(Vector3::new(1.0, 1e-3, 1e-3)) < 0.01);
        assert!(run_from(Vector3::new(1e-3, 1e-3, 1.0)) < 0.01);
    }

    #[test]
    fn blow_up_reports_time() {
        let square = |p: &ReducedPoint| {
            let x = p.nu.pi()[0];
            Ok(ReducedTangent { nu: CoalgebraVector::So3(Vector3::new(x * x, 0.0, 0.0)), theta: vec![], l: vec![] })
        };
        match run(&square, &so3(Vector3::x()), 1e-3, 2.0, &[]) {
            Err(Error::BlowUp { time }) => assert!(time > 0.9 && time < 1.01, "{time}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_must_divide_horizon() {
        assert!(matches!(step_count(0.3, 1.0), Err(Error::InvalidStep(_))));
        assert_eq!(step_count(1e-3, 10.0).unwrap(), 10_000);
        assert_eq!(step_count(0.1, 0.0).unwrap(), 0);
    }

    #[test]
    fn drift_of_vanishing_invariant_is_absolute() {
        let p0 = so3(Vector3::zeros());
        let drift_field =
            |_: &ReducedPoint| Ok(ReducedTangent { nu: CoalgebraVector::So3(Vector3::x()), theta: vec![], l: vec![] });
        let t = run(&drift_field, &p0, 0.1, 1.0, &[Invariant { name: "pi_sq", f: &Casimir::PiSquared }]).unwrap();
        assert!(!t.drift[0].relative());
        assert!((t.drift[0].max() - 1.0).abs() < 1e-12);
    }
}
