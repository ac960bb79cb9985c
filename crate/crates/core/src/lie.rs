//! SO(3) and SE(3): hat/vee, brackets, exponential, adjoint and coadjoint actions.
//!
//! Algebra elements and their duals are stored in body coordinates and
//! identified with R^3 (SO3) or R^3 x R^3 (SE3) through the dot product.
//! The coadjoint convention is `<ad*_xi mu, eta> = <mu, [xi, eta]>` and
//! `Ad*_g = (Ad_g)^T`, so `Ad*_{gh} = Ad*_h . Ad*_g`.

use alloc::vec::Vec;
use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};

/// Which group the value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    /// Rotations.
    So3,
    /// Rigid motions.
    Se3,
}

impl AlgebraKind {
    /// Dimension of the algebra.
    pub fn dim(self) -> usize {
        match self {
            AlgebraKind::So3 => 3,
            AlgebraKind::Se3 => 6,
        }
    }
}

fn check(expected: AlgebraKind, found: AlgebraKind) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::KindMismatch { expected, found })
    }
}

/// Skew matrix of a 3-vector: `skew(w) * u = w x u`.
pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Element of so(3) or se(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgebraVector {
    /// Angular velocity.
    So3(Vector3<f64>),
    /// Angular and translational velocity.
    Se3 {
        /// Angular part.
        omega: Vector3<f64>,
        /// Translational part.
        vel: Vector3<f64>,
    },
}

/// Matrix representation returned by [`AlgebraVector::hat`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgebraMatrix {
    /// 3x3 skew matrix.
    So3(Matrix3<f64>),
    /// 4x4 twist matrix `[[skew(omega), vel], [0, 0]]`.
    Se3(Matrix4<f64>),
}

impl AlgebraVector {
    /// Zero element of the given kind.
    pub fn zero(kind: AlgebraKind) -> Self {
        match kind {
            AlgebraKind::So3 => AlgebraVector::So3(Vector3::zeros()),
            AlgebraKind::Se3 => AlgebraVector::Se3 { omega: Vector3::zeros(), vel: Vector3::zeros() },
        }
    }

    /// Kind tag.
    pub fn kind(&self) -> AlgebraKind {
        match self {
            AlgebraVector::So3(_) => AlgebraKind::So3,
            AlgebraVector::Se3 { .. } => AlgebraKind::Se3,
        }
    }

    /// Angular part.
    pub fn omega(&self) -> Vector3<f64> {
        match self {
            AlgebraVector::So3(w) => *w,
            AlgebraVector::Se3 { omega, .. } => *omega,
        }
    }

    /// Translational part, `None` for SO3.
    pub fn vel(&self) -> Option<Vector3<f64>> {
        match self {
            AlgebraVector::So3(_) => None,
            AlgebraVector::Se3 { vel, .. } => Some(*vel),
        }
    }

    /// Components in order omega, vel.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.omega().iter().copied().collect();
        if let Some(v) = self.vel() {
            out.extend(v.iter().copied());
        }
        out
    }

    /// Inverse of [`to_vec`](Self::to_vec).
    pub fn from_slice(kind: AlgebraKind, c: &[f64]) -> Result<Self> {
        if c.len() != kind.dim() {
            return Err(Error::CountMismatch { what: "algebra vector", expected: kind.dim(), found: c.len() });
        }
        let w = Vector3::new(c[0], c[1], c[2]);
        Ok(match kind {
            AlgebraKind::So3 => AlgebraVector::So3(w),
            AlgebraKind::Se3 => AlgebraVector::Se3 { omega: w, vel: Vector3::new(c[3], c[4], c[5]) },
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> Self {
        match self {
            AlgebraVector::So3(w) => AlgebraVector::So3(w * s),
            AlgebraVector::Se3 { omega, vel } => AlgebraVector::Se3 { omega: omega * s, vel: vel * s },
        }
    }

    /// Sum of two elements of the same kind.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check(self.kind(), other.kind())?;
        Ok(match (self, other) {
            (AlgebraVector::So3(a), AlgebraVector::So3(b)) => AlgebraVector::So3(a + b),
            (AlgebraVector::Se3 { omega: a, vel: u }, AlgebraVector::Se3 { omega: b, vel: v }) => {
                AlgebraVector::Se3 { omega: a + b, vel: u + v }
            }
            _ => unreachable!(),
        })
    }

    /// Euclidean norm of all components.
    pub fn norm(&self) -> f64 {
        let v = self.vel().map_or(0.0, |v| v.norm_squared());
        libm::sqrt(self.omega().norm_squared() + v)
    }

    /// Matrix representation.
    pub fn hat(&self) -> AlgebraMatrix {
        match self {
            AlgebraVector::So3(w) => AlgebraMatrix::So3(skew(w)),
            AlgebraVector::Se3 { omega, vel } => {
                let mut m = Matrix4::zeros();
                m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(omega));
                m.fixed_view_mut::<3, 1>(0, 3).copy_from(vel);
                AlgebraMatrix::Se3(m)
            }
        }
    }

    /// Inverse of [`hat`](Self::hat). Reads the skew entries below the diagonal.
    pub fn vee(m: &AlgebraMatrix) -> Self {
        match m {
            AlgebraMatrix::So3(s) => AlgebraVector::So3(Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)])),
            AlgebraMatrix::Se3(t) => AlgebraVector::Se3 {
                omega: Vector3::new(t[(2, 1)], t[(0, 2)], t[(1, 0)]),
                vel: Vector3::new(t[(0, 3)], t[(1, 3)], t[(2, 3)]),
            },
        }
    }
}

/// Lie bracket; the matrix commutator under [`AlgebraVector::hat`].
pub fn bracket(x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
    check(x.kind(), y.kind())?;
    Ok(match (x, y) {
        (AlgebraVector::So3(a), AlgebraVector::So3(b)) => AlgebraVector::So3(a.cross(b)),
        (AlgebraVector::Se3 { omega: w1, vel: v1 }, AlgebraVector::Se3 { omega: w2, vel: v2 }) => {
            AlgebraVector::Se3 { omega: w1.cross(w2), vel: w1.cross(v2) - w2.cross(v1) }
        }
        _ => unreachable!(),
    })
}

/// Element of so(3)* or se(3)*.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoalgebraVector {
    /// Angular momentum.
    So3(Vector3<f64>),
    /// Angular momentum and advected vector.
    Se3 {
        /// Angular part.
        pi: Vector3<f64>,
        /// Advected part.
        gamma: Vector3<f64>,
    },
}

impl CoalgebraVector {
    /// Zero element of the given kind.
    pub fn zero(kind: AlgebraKind) -> Self {
        match kind {
            AlgebraKind::So3 => CoalgebraVector::So3(Vector3::zeros()),
            AlgebraKind::Se3 => CoalgebraVector::Se3 { pi: Vector3::zeros(), gamma: Vector3::zeros() },
        }
    }

    /// Kind tag.
    pub fn kind(&self) -> AlgebraKind {
        match self {
            CoalgebraVector::So3(_) => AlgebraKind::So3,
            CoalgebraVector::Se3 { .. } => AlgebraKind::Se3,
        }
    }

    /// Angular part.
    pub fn pi(&self) -> Vector3<f64> {
        match self {
            CoalgebraVector::So3(p) => *p,
            CoalgebraVector::Se3 { pi, .. } => *pi,
        }
    }

    /// Advected part, `None` for SO3.
    pub fn gamma(&self) -> Option<Vector3<f64>> {
        match self {
            CoalgebraVector::So3(_) => None,
            CoalgebraVector::Se3 { gamma, .. } => Some(*gamma),
        }
    }

    /// Components in order pi, gamma.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pi().iter().copied().collect();
        if let Some(g) = self.gamma() {
            out.extend(g.iter().copied());
        }
        out
    }

    /// Inverse of [`to_vec`](Self::to_vec).
    pub fn from_slice(kind: AlgebraKind, c: &[f64]) -> Result<Self> {
        if c.len() != kind.dim() {
            return Err(Error::CountMismatch { what: "coalgebra vector", expected: kind.dim(), found: c.len() });
        }
        let p = Vector3::new(c[0], c[1], c[2]);
        Ok(match kind {
            AlgebraKind::So3 => CoalgebraVector::So3(p),
            AlgebraKind::Se3 => CoalgebraVector::Se3 { pi: p, gamma: Vector3::new(c[3], c[4], c[5]) },
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> Self {
        match self {
            CoalgebraVector::So3(p) => CoalgebraVector::So3(p * s),
            CoalgebraVector::Se3 { pi, gamma } => CoalgebraVector::Se3 { pi: pi * s, gamma: gamma * s },
        }
    }

    /// Sum of two elements of the same kind.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check(self.kind(), other.kind())?;
        Ok(match (self, other) {
            (CoalgebraVector::So3(a), CoalgebraVector::So3(b)) => CoalgebraVector::So3(a + b),
            (CoalgebraVector::Se3 { pi: a, gamma: u }, CoalgebraVector::Se3 { pi: b, gamma: v }) => {
                CoalgebraVector::Se3 { pi: a + b, gamma: u + v }
            }
            _ => unreachable!(),
        })
    }

    /// Difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Euclidean norm of all components.
    pub fn norm(&self) -> f64 {
        let g = self.gamma().map_or(0.0, |g| g.norm_squared());
        libm::sqrt(self.pi().norm_squared() + g)
    }

    /// Dual pairing with an algebra element.
    pub fn pairing(&self, x: &AlgebraVector) -> Result<f64> {
        check(self.kind(), x.kind())?;
        let v = match (self.gamma(), x.vel()) {
            (Some(g), Some(v)) => g.dot(&v),
            _ => 0.0,
        };
        Ok(self.pi().dot(&x.omega()) + v)
    }

    /// The algebra element with the same components (Euclidean identification).
    pub fn to_algebra(&self) -> AlgebraVector {
        match self {
            CoalgebraVector::So3(p) => AlgebraVector::So3(*p),
            CoalgebraVector::Se3 { pi, gamma } => AlgebraVector::Se3 { omega: *pi, vel: *gamma },
        }
    }
}

/// Infinitesimal coadjoint action `ad*_xi mu`.
///
/// SO3: `Pi x omega`. SE3: `(Pi x omega + Gamma x v, Gamma x omega)`.
pub fn coadjoint_ad_star(xi: &AlgebraVector, mu: &CoalgebraVector) -> Result<CoalgebraVector> {
    check(mu.kind(), xi.kind())?;
    Ok(match (xi, mu) {
        (AlgebraVector::So3(w), CoalgebraVector::So3(p)) => CoalgebraVector::So3(p.cross(w)),
        (AlgebraVector::Se3 { omega, vel }, CoalgebraVector::Se3 { pi, gamma }) => {
            CoalgebraVector::Se3 { pi: pi.cross(omega) + gamma.cross(vel), gamma: gamma.cross(omega) }
        }
        _ => unreachable!(),
    })
}

/// Element of SO(3) or SE(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    /// Rotation matrix.
    So3(Matrix3<f64>),
    /// Rotation and translation, acting as `x -> rot x + trans`.
    Se3 {
        /// Rotation part.
        rot: Matrix3<f64>,
        /// Translation part.
        trans: Vector3<f64>,
    },
}

impl GroupElement {
    /// Identity of the given kind.
    pub fn identity(kind: AlgebraKind) -> Self {
        match kind {
            AlgebraKind::So3 => GroupElement::So3(Matrix3::identity()),
            AlgebraKind::Se3 => GroupElement::Se3 { rot: Matrix3::identity(), trans: Vector3::zeros() },
        }
    }

    /// Kind tag.
    pub fn kind(&self) -> AlgebraKind {
        match self {
            GroupElement::So3(_) => AlgebraKind::So3,
            GroupElement::Se3 { .. } => AlgebraKind::Se3,
        }
    }

    /// Rotation part.
    pub fn rot(&self) -> Matrix3<f64> {
        match self {
            GroupElement::So3(r) => *r,
            GroupElement::Se3 { rot, .. } => *rot,
        }
    }

    /// Translation part, zero for SO3.
    pub fn trans(&self) -> Vector3<f64> {
        match self {
            GroupElement::So3(_) => Vector3::zeros(),
            GroupElement::Se3 { trans, .. } => *trans,
        }
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check(self.kind(), other.kind())?;
        Ok(match (self, other) {
            (GroupElement::So3(a), GroupElement::So3(b)) => GroupElement::So3(a * b),
            (GroupElement::Se3 { rot: a, trans: u }, GroupElement::Se3 { rot: b, trans: v }) => {
                GroupElement::Se3 { rot: a * b, trans: a * v + u }
            }
            _ => unreachable!(),
        })
    }

    /// Group inverse.
    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::So3(r) => GroupElement::So3(r.transpose()),
            GroupElement::Se3 { rot, trans } => {
                GroupElement::Se3 { rot: rot.transpose(), trans: -(rot.transpose() * trans) }
            }
        }
    }

    /// Homogeneous 4x4 matrix (rotation block only for SO3).
    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rot());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.trans());
        m
    }

    /// Largest of `|R^T R - I|_max` and `|det R - 1|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let r = self.rot();
        let e = (r.transpose() * r - Matrix3::identity()).amax();
        let d = libm::fabs(r.determinant() - 1.0);
        if e > d {
            e
        } else {
            d
        }
    }

    /// Re-orthonormalize the rotation part via its polar factor.
    pub fn renormalized(&self) -> Self {
        let r = self.rot();
        let svd = r.svd(true, true);
        let fixed = match (svd.u, svd.v_t) {
            (Some(u), Some(vt)) => u * vt,
            _ => r,
        };
        match self {
            GroupElement::So3(_) => GroupElement::So3(fixed),
            GroupElement::Se3 { trans, .. } => GroupElement::Se3 { rot: fixed, trans: *trans },
        }
    }
}

/// Rodrigues coefficients `(sin t / t, (1 - cos t) / t^2, (t - sin t) / t^3)`.
fn exp_coefficients(t: f64) -> (f64, f64, f64) {
    if t < 1e-8 {
        let t2 = t * t;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0)
    } else {
        let s = libm::sin(t);
        let h = libm::sin(0.5 * t);
        (s / t, 2.0 * h * h / (t * t), (t - s) / (t * t * t))
    }
}

/// Group exponential.
pub fn exp_group(x: &AlgebraVector) -> GroupElement {
    let w = x.omega();
    let k = skew(&w);
    let k2 = k * k;
    let (a, b, c) = exp_coefficients(w.norm());
    let rot = Matrix3::identity() + k * a + k2 * b;
    match x.vel() {
        None => GroupElement::So3(rot),
        Some(v) => {
            let jac = Matrix3::identity() + k * b + k2 * c;
            GroupElement::Se3 { rot, trans: jac * v }
        }
    }
}

/// Adjoint action `Ad_g xi = g xi g^{-1}`.
pub fn adjoint(g: &GroupElement, xi: &AlgebraVector) -> Result<AlgebraVector> {
    check(g.kind(), xi.kind())?;
    let r = g.rot();
    let w = r * xi.omega();
    Ok(match xi.vel() {
        None => AlgebraVector::So3(w),
        Some(v) => AlgebraVector::Se3 { omega: w, vel: r * v + g.trans().cross(&w) },
    })
}

/// Coadjoint action `Ad*_g = (Ad_g)^T`.
///
/// SO3: `R^T Pi`. SE3 with `g = (A, v)`: `(A^T (Pi + Gamma x v), A^T Gamma)`.
pub fn ad_star_group(g: &GroupElement, mu: &CoalgebraVector) -> Result<CoalgebraVector> {
    check(g.kind(), mu.kind())?;
    let rt = g.rot().transpose();
    Ok(match mu {
        CoalgebraVector::So3(p) => CoalgebraVector::So3(rt * p),
        CoalgebraVector::Se3 { pi, gamma } => {
            CoalgebraVector::Se3 { pi: rt * (pi + gamma.cross(&g.trans())), gamma: rt * gamma }
        }
    })
}
