//! Seeded random samples of algebra, group and reduced-space elements.

use alloc::vec::Vec;
use nalgebra::Vector3;
use rand::Rng;

use crate::hj::Configuration;
use crate::lie::{exp_group, AlgebraKind, AlgebraVector, CoalgebraVector, GroupElement};
use crate::poisson::ReducedPoint;

/// Uniform sample in `[-scale, scale]`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    rng.gen_range(-1.0..=1.0) * scale
}

/// Vector with entries uniform in `[-scale, scale]`.
pub fn vector<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| uniform(rng, scale)).collect()
}

/// 3-vector with entries uniform in `[-scale, scale]`.
pub fn vec3<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Vector3<f64> {
    Vector3::new(uniform(rng, scale), uniform(rng, scale), uniform(rng, scale))
}

/// Unit 3-vector, uniform on the sphere.
pub fn unit3<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = vec3(rng, 1.0);
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Random algebra element.
pub fn algebra<R: Rng + ?Sized>(rng: &mut R, kind: AlgebraKind, scale: f64) -> AlgebraVector {
    match kind {
        AlgebraKind::So3 => AlgebraVector::So3(vec3(rng, scale)),
        AlgebraKind::Se3 => AlgebraVector::Se3 { omega: vec3(rng, scale), vel: vec3(rng, scale) },
    }
}

/// Random coalgebra element.
pub fn coalgebra<R: Rng + ?Sized>(rng: &mut R, kind: AlgebraKind, scale: f64) -> CoalgebraVector {
    match kind {
        AlgebraKind::So3 => CoalgebraVector::So3(vec3(rng, scale)),
        AlgebraKind::Se3 => CoalgebraVector::Se3 { pi: vec3(rng, scale), gamma: vec3(rng, scale) },
    }
}

/// Random group element: rotation angle up to pi, translation in the unit cube.
pub fn group<R: Rng + ?Sized>(rng: &mut R, kind: AlgebraKind) -> GroupElement {
    let angle = rng.gen_range(0.0..core::f64::consts::PI);
    let w = unit3(rng) * angle;
    match kind {
        AlgebraKind::So3 => exp_group(&AlgebraVector::So3(w)),
        AlgebraKind::Se3 => GroupElement::Se3 { rot: exp_group(&AlgebraVector::So3(w)).rot(), trans: vec3(rng, 1.0) },
    }
}

/// Random reduced point with `k` rotors.
pub fn reduced_point<R: Rng + ?Sized>(rng: &mut R, kind: AlgebraKind, k: usize, scale: f64) -> ReducedPoint {
    ReducedPoint { nu: coalgebra(rng, kind, scale), theta: vector(rng, k, scale), l: vector(rng, k, scale) }
}

/// Unit vector in `R^n`, uniform on the sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v = vector(rng, n, 1.0);
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Random configuration: group element from [`group`], angles in `[-pi, pi]`.
pub fn configuration<R: Rng + ?Sized>(rng: &mut R, kind: AlgebraKind, k: usize) -> Configuration {
    Configuration { g: group(rng, kind), theta: vector(rng, k, core::f64::consts::PI) }
}
