//! One-form sections of `T*Q`, `Q = G x R^k`, and the Hamilton-Jacobi
//! diagnostics built on them: closedness, the pullback identity for the
//! canonical form, gamma-relatedness and the Hamilton-Jacobi residual.
//!
//! A section is given in left trivialization: `gamma(g, theta) = (g, p, theta, l)`
//! with body covector `p` and rotor momenta `l`. Base tangents are
//! `(xi, a)` with `g' = g xi` and `theta' = a`; directional derivatives
//! are taken along `s -> (g exp(s xi), theta + s a)`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use nalgebra::{DMatrix, Matrix4, Vector3};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{self, AlgebraKind, AlgebraVector, CoalgebraVector, GroupElement};
use crate::poisson::{self, ReducedPoint, ReducedTangent};
use crate::rch::{self, RchSystem};
use crate::reduction::{self, PhasePoint};
use crate::sampling;

/// Point of the configuration space `G x R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    /// Group part.
    pub g: GroupElement,
    /// Rotor angles.
    pub theta: Vec<f64>,
}

impl Configuration {
    /// Identity with zero angles.
    pub fn identity(kind: AlgebraKind, k: usize) -> Self {
        Self { g: GroupElement::identity(kind), theta: alloc::vec![0.0; k] }
    }

    /// Point reached at time `s` along `x`.
    pub fn moved(&self, s: f64, x: &BaseTangent) -> Result<Self> {
        if x.theta.len() != self.theta.len() {
            return Err(Error::CountMismatch {
                what: "base tangent",
                expected: self.theta.len(),
                found: x.theta.len(),
            });
        }
        Ok(Self {
            g: self.g.compose(&lie::exp_group(&x.xi.scale(s)))?,
            theta: self.theta.iter().zip(&x.theta).map(|(t, a)| t + s * a).collect(),
        })
    }
}

/// Tangent vector to `G x R^k` in left trivialization.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseTangent {
    /// Body velocity.
    pub xi: AlgebraVector,
    /// Rotor-angle rates.
    pub theta: Vec<f64>,
}

impl BaseTangent {
    /// Flat components: xi, theta.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.xi.to_vec();
        v.extend_from_slice(&self.theta);
        v
    }

    /// Inverse of [`to_vec`](Self::to_vec).
    pub fn from_slice(kind: AlgebraKind, c: &[f64]) -> Result<Self> {
        let d = kind.dim();
        if c.len() < d {
            return Err(Error::CountMismatch { what: "base tangent", expected: d, found: c.len() });
        }
        Ok(Self { xi: AlgebraVector::from_slice(kind, &c[..d])?, theta: c[d..].to_vec() })
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.to_vec().iter().map(|x| x * x).sum())
    }

    /// Unit vector along flat coordinate `i`.
    pub fn basis(kind: AlgebraKind, k: usize, i: usize) -> Self {
        let mut c = alloc::vec![0.0; kind.dim() + k];
        c[i] = 1.0;
        Self::from_slice(kind, &c).expect("shape")
    }
}

/// Fiber value of a section: body covector and rotor momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    /// Body covector.
    pub p: CoalgebraVector,
    /// Rotor momenta.
    pub l: Vec<f64>,
}

impl Covector {
    /// Flat components: p, l.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.p.to_vec();
        v.extend_from_slice(&self.l);
        v
    }

    /// Inverse of [`to_vec`](Self::to_vec).
    pub fn from_slice(kind: AlgebraKind, c: &[f64]) -> Result<Self> {
        let d = kind.dim();
        if c.len() < d {
            return Err(Error::CountMismatch { what: "covector", expected: d, found: c.len() });
        }
        Ok(Self { p: CoalgebraVector::from_slice(kind, &c[..d])?, l: c[d..].to_vec() })
    }

    /// Pairing with a base tangent.
    pub fn pair(&self, x: &BaseTangent) -> Result<f64> {
        if self.l.len() != x.theta.len() {
            return Err(Error::CountMismatch { what: "base tangent", expected: self.l.len(), found: x.theta.len() });
        }
        Ok(self.p.pairing(&x.xi)? + self.l.iter().zip(&x.theta).map(|(a, b)| a * b).sum::<f64>())
    }
}

/// Section family, which fixes what is known about the symplectic-pullback hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionFamily {
    /// Differential of a potential.
    ExactDw,
    /// Constant body covector and rotor momenta.
    ConstantBody,
    /// Anything else.
    Custom,
}

impl SectionFamily {
    /// Status of the symplectic-pullback hypothesis, which is not checked numerically.
    pub fn symplectic_pullback(self) -> &'static str {
        match self {
            SectionFamily::ExactDw => "holds",
            _ => "unverified",
        }
    }

    /// Report label.
    pub fn name(self) -> &'static str {
        match self {
            SectionFamily::ExactDw => "exact_dW",
            SectionFamily::ConstantBody => "constant_body",
            SectionFamily::Custom => "custom",
        }
    }
}

/// One-form on `G x R^k`.
pub trait OneFormSection: Send + Sync {
    /// Algebra of the group factor.
    fn kind(&self) -> AlgebraKind;
    /// Rotor count.
    fn rotors(&self) -> usize;
    /// Fiber value at `q`.
    fn covector(&self, q: &Configuration) -> Covector;
    /// Family tag.
    fn family(&self) -> SectionFamily;
    /// Analytic directional derivative of the fiber value along `x`, if known.
    fn derivative(&self, _q: &Configuration, _x: &BaseTangent) -> Option<Covector> {
        None
    }
    /// Phase point `gamma(q)`; its base is `q` exactly.
    fn value(&self, q: &Configuration) -> PhasePoint {
        let c = self.covector(q);
        PhasePoint { g: q.g, p: c.p, theta: q.theta.clone(), l: c.l }
    }
}

/// Reduced image `(p, theta, l)` of `gamma(q)` in body coordinates.
pub fn reduced_image(gamma: &dyn OneFormSection, q: &Configuration) -> ReducedPoint {
    let c = gamma.covector(q);
    ReducedPoint { nu: c.p, theta: q.theta.clone(), l: c.l }
}

/// Directional derivative of the fiber value along `x`; analytic when supplied,
/// central differences otherwise.
pub fn directional_derivative(gamma: &dyn OneFormSection, q: &Configuration, x: &BaseTangent) -> Result<Covector> {
    if let Some(d) = gamma.derivative(q, x) {
        return Ok(d);
    }
    let h = 1e-6 / x.norm().max(1.0);
    let a = gamma.covector(&q.moved(h, x)?).to_vec();
    let b = gamma.covector(&q.moved(-h, x)?).to_vec();
    let d: Vec<f64> = a.iter().zip(&b).map(|(u, v)| (u - v) / (2.0 * h)).collect();
    Covector::from_slice(gamma.kind(), &d)
}

/// Exterior derivative by Cartan's formula on left-invariant extensions:
/// `d gamma(x, y) = D_x <gamma, y> - D_y <gamma, x> - <p, [xi, eta]>`.
pub fn d_gamma(gamma: &dyn OneFormSection, q: &Configuration, x: &BaseTangent, y: &BaseTangent) -> Result<f64> {
    let dx = directional_derivative(gamma, q, x)?;
    let dy = directional_derivative(gamma, q, y)?;
    let c = gamma.covector(q);
    Ok(dx.pair(y)? - dy.pair(x)? - c.p.pairing(&lie::bracket(&x.xi, &y.xi)?)?)
}

/// Potential with analytic left-trivialized differential.
pub trait Potential: Send + Sync {
    /// Value at `q`.
    fn value(&self, q: &Configuration) -> f64;
    /// Differential at `q`.
    fn differential(&self, q: &Configuration) -> Covector;
}

/// `W = a . R b`, differential `p = b x R^T a` (zero advected part on SE(3)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeLinear {
    /// Spatial vector.
    pub a: Vector3<f64>,
    /// Body vector.
    pub b: Vector3<f64>,
}

impl Potential for AttitudeLinear {
    fn value(&self, q: &Configuration) -> f64 {
        self.a.dot(&(q.g.rot() * self.b))
    }
    fn differential(&self, q: &Configuration) -> Covector {
        let pi = self.b.cross(&(q.g.rot().transpose() * self.a));
        let p = match q.g.kind() {
            AlgebraKind::So3 => CoalgebraVector::So3(pi),
            AlgebraKind::Se3 => CoalgebraVector::Se3 { pi, gamma: Vector3::zeros() },
        };
        Covector { p, l: alloc::vec![0.0; q.theta.len()] }
    }
}

/// `W = c . v` on SE(3); differential `(0, A^T c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationLinear {
    /// Spatial vector.
    pub c: Vector3<f64>,
}

impl Potential for TranslationLinear {
    fn value(&self, q: &Configuration) -> f64 {
        self.c.dot(&q.g.trans())
    }
    fn differential(&self, q: &Configuration) -> Covector {
        let p = CoalgebraVector::Se3 { pi: Vector3::zeros(), gamma: q.g.rot().transpose() * self.c };
        Covector { p, l: alloc::vec![0.0; q.theta.len()] }
    }
}

/// `W = 1/2 sum w_i theta_i^2`; differential `l = w theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorQuadratic {
    /// Weights.
    pub w: Vec<f64>,
}

impl Potential for RotorQuadratic {
    fn value(&self, q: &Configuration) -> f64 {
        q.theta.iter().zip(&self.w).map(|(t, w)| 0.5 * w * t * t).sum()
    }
    fn differential(&self, q: &Configuration) -> Covector {
        Covector { p: CoalgebraVector::zero(q.g.kind()), l: q.theta.iter().zip(&self.w).map(|(t, w)| w * t).collect() }
    }
}

/// Sum of potentials.
pub struct PotentialSum(pub Vec<Box<dyn Potential>>);

impl Potential for PotentialSum {
    fn value(&self, q: &Configuration) -> f64 {
        self.0.iter().map(|w| w.value(q)).sum()
    }
    fn differential(&self, q: &Configuration) -> Covector {
        let kind = q.g.kind();
        let mut acc = alloc::vec![0.0; kind.dim() + q.theta.len()];
        for w in &self.0 {
            for (a, b) in acc.iter_mut().zip(w.differential(q).to_vec()) {
                *a += b;
            }
        }
        Covector::from_slice(kind, &acc).expect("shape")
    }
}

/// The section `dW`.
pub struct ExactSection<W> {
    /// Potential.
    pub w: W,
    /// Group kind.
    pub kind: AlgebraKind,
    /// Rotor count.
    pub rotors: usize,
}

impl<W: Potential> OneFormSection for ExactSection<W> {
    fn kind(&self) -> AlgebraKind {
        self.kind
    }
    fn rotors(&self) -> usize {
        self.rotors
    }
    fn covector(&self, q: &Configuration) -> Covector {
        self.w.differential(q)
    }
    fn family(&self) -> SectionFamily {
        SectionFamily::ExactDw
    }
}

/// The zero one-form, `d` of a constant.
#[derive(Debug, Clone, Copy)]
pub struct ZeroSection {
    /// Group kind.
    pub kind: AlgebraKind,
    /// Rotor count.
    pub rotors: usize,
}

impl OneFormSection for ZeroSection {
    fn kind(&self) -> AlgebraKind {
        self.kind
    }
    fn rotors(&self) -> usize {
        self.rotors
    }
    fn covector(&self, _q: &Configuration) -> Covector {
        Covector { p: CoalgebraVector::zero(self.kind), l: alloc::vec![0.0; self.rotors] }
    }
    fn family(&self) -> SectionFamily {
        SectionFamily::ExactDw
    }
    fn derivative(&self, _q: &Configuration, _x: &BaseTangent) -> Option<Covector> {
        Some(self.covector(_q))
    }
}

/// Constant body covector `nu0` and rotor momenta `l0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantBodySection {
    /// Body covector.
    pub nu0: CoalgebraVector,
    /// Rotor momenta.
    pub l0: Vec<f64>,
}

impl OneFormSection for ConstantBodySection {
    fn kind(&self) -> AlgebraKind {
        self.nu0.kind()
    }
    fn rotors(&self) -> usize {
        self.l0.len()
    }
    fn covector(&self, _q: &Configuration) -> Covector {
        Covector { p: self.nu0, l: self.l0.clone() }
    }
    fn family(&self) -> SectionFamily {
        SectionFamily::ConstantBody
    }
}

/// Constant body covector with rotor momenta affine in the angles: `l = l0 + L theta`.
/// `l_theta = [[0, 0], [1, 0]]` gives the non-closed form `theta_1 d theta_2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineRotorSection {
    /// Body covector.
    pub nu0: CoalgebraVector,
    /// Constant rotor momenta.
    pub l0: Vec<f64>,
    /// Row-major `k x k` matrix.
    pub l_theta: Vec<Vec<f64>>,
}

impl OneFormSection for AffineRotorSection {
    fn kind(&self) -> AlgebraKind {
        self.nu0.kind()
    }
    fn rotors(&self) -> usize {
        self.l0.len()
    }
    fn covector(&self, q: &Configuration) -> Covector {
        let l = self
            .l0
            .iter()
            .enumerate()
            .map(|(i, l0)| l0 + self.l_theta[i].iter().zip(&q.theta).map(|(a, t)| a * t).sum::<f64>())
            .collect();
        Covector { p: self.nu0, l }
    }
    fn family(&self) -> SectionFamily {
        SectionFamily::Custom
    }
}

/// Largest `|d gamma(e_i, e_j)|` over an orthonormal base frame at each sampled configuration.
pub fn closedness_defect_at(gamma: &dyn OneFormSection, samples: &[Configuration]) -> Result<f64> {
    let (kind, k) = (gamma.kind(), gamma.rotors());
    let n = kind.dim() + k;
    let mut worst = 0.0f64;
    for q in samples {
        for i in 0..n {
            for j in i + 1..n {
                let v = d_gamma(gamma, q, &BaseTangent::basis(kind, k, i), &BaseTangent::basis(kind, k, j))?;
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// [`closedness_defect_at`] over `n_samples` random configurations.
pub fn closedness_defect<R: Rng + ?Sized>(gamma: &dyn OneFormSection, n_samples: usize, rng: &mut R) -> Result<f64> {
    let samples: Vec<Configuration> =
        (0..n_samples).map(|_| sampling::configuration(rng, gamma.kind(), gamma.rotors())).collect();
    closedness_defect_at(gamma, &samples)
}

/// Matrix embedding of a phase point into `T*GL(n) x T*R^k`: the group matrix
/// `G` and the covector matrix `M = G^{-T} K(p)` with `tr(K^T hat(xi)) = <p, xi>`.
fn ambient(pt: &PhasePoint) -> (DMatrix<f64>, DMatrix<f64>) {
    match pt.p {
        CoalgebraVector::So3(pi) => {
            let g = pt.g.rot();
            let k = lie::skew(&pi) * 0.5;
            let m = g.try_inverse().expect("rotation").transpose() * k;
            (DMatrix::from_column_slice(3, 3, g.as_slice()), DMatrix::from_column_slice(3, 3, m.as_slice()))
        }
        CoalgebraVector::Se3 { pi, gamma } => {
            let g = pt.g.to_homogeneous();
            let mut k = Matrix4::zeros();
            k.fixed_view_mut::<3, 3>(0, 0).copy_from(&(lie::skew(&pi) * 0.5));
            k.fixed_view_mut::<3, 1>(0, 3).copy_from(&gamma);
            let m = g.try_inverse().expect("rigid motion").transpose() * k;
            (DMatrix::from_column_slice(4, 4, g.as_slice()), DMatrix::from_column_slice(4, 4, m.as_slice()))
        }
    }
}

/// Pushed-forward tangent in ambient coordinates: group, momentum, angles, rotor momenta.
type AmbientTangent = (DMatrix<f64>, DMatrix<f64>, Vec<f64>, Vec<f64>);

/// Canonical two-form `omega = sum dq ^ dp` of the matrix embedding evaluated on
/// `T gamma . x` and `T gamma . y`, both pushed forward by central differences.
pub fn canonical_pullback(
    gamma: &dyn OneFormSection,
    q: &Configuration,
    x: &BaseTangent,
    y: &BaseTangent,
) -> Result<f64> {
    let push = |v: &BaseTangent| -> Result<AmbientTangent> {
        let h = 1e-6 / v.norm().max(1.0);
        let a = gamma.value(&q.moved(h, v)?);
        let b = gamma.value(&q.moved(-h, v)?);
        let (ga, ma) = ambient(&a);
        let (gb, mb) = ambient(&b);
        let s = 0.5 / h;
        let dth = a.theta.iter().zip(&b.theta).map(|(u, w)| (u - w) * s).collect();
        let dl = a.l.iter().zip(&b.l).map(|(u, w)| (u - w) * s).collect();
        Ok(((ga - gb) * s, (ma - mb) * s, dth, dl))
    };
    let (g1, m1, t1, l1) = push(x)?;
    let (g2, m2, t2, l2) = push(y)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    Ok(g1.dot(&m2) - g2.dot(&m1) + dot(&t1, &l2) - dot(&t2, &l1))
}

/// Result of the pullback-identity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PullbackReport {
    /// Largest `|gamma* omega(x, y) + d gamma(x, y)|`.
    pub defect: f64,
    /// Largest `|gamma* omega(x, y)|`.
    pub lhs_max: f64,
    /// Largest `|d gamma(x, y)|`.
    pub rhs_max: f64,
}

/// Checks `gamma* omega(x, y) = -d gamma(x, y)` on `n_samples` random unit tangent pairs.
pub fn pullback_identity_defect<R: Rng + ?Sized>(
    gamma: &dyn OneFormSection,
    n_samples: usize,
    rng: &mut R,
) -> Result<PullbackReport> {
    let (kind, k) = (gamma.kind(), gamma.rotors());
    let n = kind.dim() + k;
    let mut r = PullbackReport { defect: 0.0, lhs_max: 0.0, rhs_max: 0.0 };
    for _ in 0..n_samples {
        let q = sampling::configuration(rng, kind, k);
        let x = BaseTangent::from_slice(kind, &sampling::unit_vector(rng, n))?;
        let y = BaseTangent::from_slice(kind, &sampling::unit_vector(rng, n))?;
        let lhs = canonical_pullback(gamma, &q, &x, &y)?;
        let rhs = d_gamma(gamma, &q, &x, &y)?;
        r.defect = r.defect.max((lhs + rhs).abs());
        r.lhs_max = r.lhs_max.max(lhs.abs());
        r.rhs_max = r.rhs_max.max(rhs.abs());
    }
    Ok(r)
}

/// Whether residuals are taken on the full bundle or on the reduced space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Full cotangent bundle.
    Full,
    /// Reduced space; the image of the section must lie on the orbit of `mu`
    /// (or, when `mu` is absent, on the orbit of the first sample).
    Reduced {
        /// Momentum level.
        mu: Option<CoalgebraVector>,
    },
}

fn check_membership(gamma: &dyn OneFormSection, q: &Configuration, mode: Mode) -> Result<()> {
    if let Mode::Reduced { mu: Some(mu) } = mode {
        let j = reduction::momentum_map(&gamma.value(q))?;
        let defect = reduction::orbit_defect(&j, &mu)?;
        if defect > 1e-8 {
            return Err(Error::Membership { defect });
        }
    }
    Ok(())
}

/// Base projection of the system's field at `gamma(q)`: `(dh/dnu, theta')` at the reduced image.
pub fn x_gamma(sys: &RchSystem, gamma: &dyn OneFormSection, q: &Configuration) -> Result<BaseTangent> {
    let gbar = reduced_image(gamma, q);
    let grad = poisson::gradient(sys.hamiltonian.as_ref(), &gbar)?;
    let field = rch::dynamical_field(sys, &gbar)?;
    Ok(BaseTangent { xi: grad.nu, theta: field.theta })
}

/// `|T gamma . X^gamma(q) - X(gamma(q))|`; the base parts agree by construction,
/// so this is the norm of the fiber mismatch `(D p - p', D l - l')`.
pub fn relatedness_residual(sys: &RchSystem, gamma: &dyn OneFormSection, q: &Configuration, mode: Mode) -> Result<f64> {
    check_membership(gamma, q, mode)?;
    let x = x_gamma(sys, gamma, q)?;
    let d = directional_derivative(gamma, q, &x)?;
    let field = rch::dynamical_field(sys, &reduced_image(gamma, q))?;
    let dp = d.p.sub(&field.nu)?.norm();
    let dl: f64 = d.l.iter().zip(&field.l).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(libm::sqrt(dp * dp + dl))
}

/// Generic reduced Hamilton-Jacobi vector: the Poisson tensor at `state`
/// applied to the gradient of `h` at `gamma_bar`, plus the lifted control `u`.
pub fn reduced_hj_vector(
    sys: &RchSystem,
    state: &ReducedPoint,
    gamma_bar: &ReducedPoint,
    u: &ReducedTangent,
) -> Result<ReducedTangent> {
    sys.check_point(state)?;
    sys.check_point(gamma_bar)?;
    let grad = poisson::gradient(sys.hamiltonian.as_ref(), gamma_bar)?;
    poisson::poisson_tensor(state, &grad)?.axpy(1.0, u)
}

/// `X_h + vlift(force) + vlift(control)` at the reduced image of `gamma(q)`.
pub fn hj_vector(sys: &RchSystem, gamma: &dyn OneFormSection, q: &Configuration) -> Result<ReducedTangent> {
    rch::dynamical_field(sys, &reduced_image(gamma, q))
}

/// Norm of [`hj_vector`].
pub fn hj_residual(sys: &RchSystem, gamma: &dyn OneFormSection, q: &Configuration, mode: Mode) -> Result<f64> {
    check_membership(gamma, q, mode)?;
    Ok(hj_vector(sys, gamma, q)?.norm())
}

/// Norm of `hj_vector - X^gamma` (the base part of the Hamilton-Jacobi vector
/// minus the base field, together with its fiber part).
pub fn branch_residual(sys: &RchSystem, gamma: &dyn OneFormSection, q: &Configuration) -> Result<f64> {
    let v = hj_vector(sys, gamma, q)?;
    let x = x_gamma(sys, gamma, q)?;
    let mut t = v.clone();
    for (a, b) in t.theta.iter_mut().zip(&x.theta) {
        *a -= b;
    }
    Ok(t.norm())
}

/// Classification of one probe sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// Both residuals small.
    Pass,
    /// Both residuals large.
    Fail,
    /// Residuals disagree.
    Inconsistent,
}

impl Classification {
    /// Classify with the default band `(1e-6, 1e-3)`.
    pub fn of(relatedness: f64, hj: f64) -> Self {
        Self::with(relatedness, hj, 1e-6, 1e-3)
    }

    /// Classify: `Pass` when both are at most `pass`, `Fail` when both are at least `fail`.
    pub fn with(relatedness: f64, hj: f64, pass: f64, fail: f64) -> Self {
        if relatedness <= pass && hj <= pass {
            Classification::Pass
        } else if relatedness >= fail && hj >= fail {
            Classification::Fail
        } else {
            Classification::Inconsistent
        }
    }

    /// Report label.
    pub fn name(self) -> &'static str {
        match self {
            Classification::Pass => "PASS",
            Classification::Fail => "FAIL",
            Classification::Inconsistent => "INCONSISTENT",
        }
    }
}

/// One row of the probe table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    /// Relatedness residual.
    pub relatedness: f64,
    /// Hamilton-Jacobi residual.
    pub hj: f64,
    /// Residual of the alternative branch `hj_vector = X^gamma`.
    pub branch: f64,
    /// `|X^gamma|`.
    pub x_gamma_norm: f64,
    /// Classification.
    pub class: Classification,
}

/// Thresholds of the probe classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    /// Upper bound for `Pass`.
    pub pass: f64,
    /// Lower bound for `Fail`.
    pub fail: f64,
}

impl Default for Band {
    fn default() -> Self {
        Self { pass: 1e-6, fail: 1e-3 }
    }
}

/// Paired residual table over `samples`. When the mode is reduced without a
/// level, the orbit of the first sample's momentum is used.
pub fn theorem_equivalence_probe(
    sys: &RchSystem,
    gamma: &dyn OneFormSection,
    samples: &[Configuration],
    mode: Mode,
    band: Band,
) -> Result<Vec<ProbeRow>> {
    let mode = resolve_mode(gamma, samples, mode)?;
    samples
        .iter()
        .map(|q| {
            let relatedness = relatedness_residual(sys, gamma, q, mode)?;
            let hj = hj_residual(sys, gamma, q, mode)?;
            Ok(ProbeRow {
                relatedness,
                hj,
                branch: branch_residual(sys, gamma, q)?,
                x_gamma_norm: x_gamma(sys, gamma, q)?.norm(),
                class: Classification::with(relatedness, hj, band.pass, band.fail),
            })
        })
        .collect()
}

fn resolve_mode(gamma: &dyn OneFormSection, samples: &[Configuration], mode: Mode) -> Result<Mode> {
    Ok(match (mode, samples.first()) {
        (Mode::Reduced { mu: None }, Some(q)) => Mode::Reduced { mu: Some(reduction::momentum_map(&gamma.value(q))?) },
        (m, _) => m,
    })
}

/// Worst sample entry of a residual report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstSample {
    /// Sample index.
    pub index: usize,
    /// Relatedness residual.
    pub relatedness: f64,
    /// Hamilton-Jacobi residual.
    pub hj: f64,
}

/// Summary of a Hamilton-Jacobi check.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// Closedness defect.
    pub closedness_defect: f64,
    /// Largest relatedness residual.
    pub relatedness_residual: f64,
    /// Largest Hamilton-Jacobi residual.
    pub hj_residual: f64,
    /// Number of samples.
    pub sample_count: usize,
    /// Samples with the largest residuals, worst first (at most three).
    pub worst: Vec<WorstSample>,
    /// Probe rows.
    pub rows: Vec<ProbeRow>,
}

/// Closedness defect, probe table and maxima over `samples`.
pub fn residual_report(
    sys: &RchSystem,
    gamma: &dyn OneFormSection,
    samples: &[Configuration],
    mode: Mode,
    band: Band,
) -> Result<ResidualReport> {
    let closedness = closedness_defect_at(gamma, samples)?;
    let rows = theorem_equivalence_probe(sys, gamma, samples, mode, band)?;
    Ok(summarize(closedness, rows))
}

/// Collect maxima and worst offenders from probe rows.
pub fn summarize(closedness_defect: f64, rows: Vec<ProbeRow>) -> ResidualReport {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let key = |r: &ProbeRow| r.relatedness.max(r.hj);
    order.sort_by(|a, b| key(&rows[*b]).total_cmp(&key(&rows[*a])).then(a.cmp(b)));
    let worst = order
        .iter()
        .take(3)
        .map(|&i| WorstSample { index: i, relatedness: rows[i].relatedness, hj: rows[i].hj })
        .collect();
    ResidualReport {
        closedness_defect,
        relatedness_residual: rows.iter().fold(0.0, |m, r| m.max(r.relatedness)),
        hj_residual: rows.iter().fold(0.0, |m, r| m.max(r.hj)),
        sample_count: rows.len(),
        worst,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{Analytic, Gradient};
    use crate::rch::{Actuation, VerticalVector};
    use crate::systems::{self, HeavyTopRotorParams, RigidBodyRotorParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rb_sys() -> RchSystem {
        systems::rigid_body_system(RigidBodyRotorParams::new([1.0, 2.0, 3.0], [0.3, 0.4, 0.5]).unwrap())
    }

    fn ht_params() -> HeavyTopRotorParams {
        HeavyTopRotorParams::new([1.5, 2.0, 2.5], [0.2, 0.3], 1.0, 9.81, 0.1, Vector3::new(0.0, 0.6, 0.8)).unwrap()
    }

    fn heavy_zero(a: Vector3<f64>) -> ExactSection<TranslationLinear> {
        ExactSection { w: TranslationLinear { c: a }, kind: AlgebraKind::Se3, rotors: 2 }
    }

    fn samples(kind: AlgebraKind, k: usize, n: usize, seed: u64) -> Vec<Configuration> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| sampling::configuration(&mut rng, kind, k)).collect()
    }

    #[test]
    fn exact_sections_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let so3 = ExactSection {
            w: PotentialSum(vec![
                Box::new(AttitudeLinear { a: Vector3::new(0.3, -1.0, 0.5), b: Vector3::new(1.0, 0.2, 0.0) }),
                Box::new(RotorQuadratic { w: vec![1.0, 2.0, 0.5] }),
            ]),
            kind: AlgebraKind::So3,
            rotors: 3,
        };
        assert!(closedness_defect(&so3, 20, &mut rng).unwrap() <= 1e-6);
        let se3 = ExactSection {
            w: PotentialSum(vec![
                Box::new(AttitudeLinear { a: Vector3::new(0.3, -1.0, 0.5), b: Vector3::new(1.0, 0.2, 0.0) }),
                Box::new(TranslationLinear { c: Vector3::new(0.0, 1.0, 2.0) }),
            ]),
            kind: AlgebraKind::Se3,
            rotors: 2,
        };
        assert!(closedness_defect(&se3, 20, &mut rng).unwrap() <= 1e-6);
        let zero = ZeroSection { kind: AlgebraKind::Se3, rotors: 2 };
        assert_eq!(closedness_defect(&zero, 5, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn differentials_match_potential_derivatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let w = PotentialSum(vec![
            Box::new(AttitudeLinear { a: Vector3::new(0.3, -1.0, 0.5), b: Vector3::new(1.0, 0.2, 0.0) }),
            Box::new(TranslationLinear { c: Vector3::new(0.0, 1.0, 2.0) }),
            Box::new(RotorQuadratic { w: vec![1.0, 2.0] }),
        ]);
        for _ in 0..20 {
            let q = sampling::configuration(&mut rng, AlgebraKind::Se3, 2);
            let x = BaseTangent::from_slice(AlgebraKind::Se3, &sampling::unit_vector(&mut rng, 8)).unwrap();
            let h = 1e-6;
            let fd = (w.value(&q.moved(h, &x).unwrap()) - w.value(&q.moved(-h, &x).unwrap())) / (2.0 * h);
            assert!((fd - w.differential(&q).pair(&x).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn planted_form_has_unit_coefficient() {
        let planted = AffineRotorSection {
            nu0: CoalgebraVector::zero(AlgebraKind::So3),
            l0: vec![0.0, 0.0, 0.0],
            l_theta: vec![vec![0.0; 3], vec![1.0, 0.0, 0.0], vec![0.0; 3]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let d = closedness_defect(&planted, 10, &mut rng).unwrap();
        assert!((d - 1.0).abs() <= 0.1);
    }

    #[test]
    fn constant_body_defect_is_the_orbit_form() {
        let nu0 = CoalgebraVector::So3(Vector3::new(0.0, 0.0, 2.0));
        let s = ConstantBodySection { nu0, l0: vec![0.1, 0.2, 0.3] };
        let q = Configuration::identity(AlgebraKind::So3, 3);
        let x = BaseTangent::basis(AlgebraKind::So3, 3, 0);
        let y = BaseTangent::basis(AlgebraKind::So3, 3, 1);
        assert!((d_gamma(&s, &q, &x, &y).unwrap() + 2.0).abs() < 1e-9);
    }

    #[test]
    fn pullback_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let exact = heavy_zero(Vector3::new(0.2, 0.4, 1.0));
        let r = pullback_identity_defect(&exact, 50, &mut rng).unwrap();
        assert!(r.defect <= 1e-5 && r.lhs_max <= 1e-6 && r.rhs_max <= 1e-6);
        let cb = ConstantBodySection { nu0: CoalgebraVector::So3(Vector3::new(0.3, -0.5, 1.0)), l0: vec![0.2; 3] };
        let r = pullback_identity_defect(&cb, 50, &mut rng).unwrap();
        assert!(r.defect <= 1e-5);
        assert!(r.rhs_max > 0.1);
        let planted = AffineRotorSection {
            nu0: CoalgebraVector::zero(AlgebraKind::Se3),
            l0: vec![0.0, 0.0],
            l_theta: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
        };
        let r = pullback_identity_defect(&planted, 50, &mut rng).unwrap();
        assert!(r.defect <= 1e-5 && r.lhs_max > 0.05);
    }

    #[test]
    fn trivial_solution_passes() {
        let sys = rb_sys();
        let zero = ZeroSection { kind: AlgebraKind::So3, rotors: 3 };
        let qs = samples(AlgebraKind::So3, 3, 20, 45);
        let mode = Mode::Reduced { mu: Some(CoalgebraVector::zero(AlgebraKind::So3)) };
        for q in &qs {
            assert!(relatedness_residual(&sys, &zero, q, mode).unwrap() <= 1e-10);
            assert_eq!(hj_residual(&sys, &zero, q, mode).unwrap(), 0.0);
            assert_eq!(x_gamma(&sys, &zero, q).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn constant_body_base_velocity() {
        let sys = rb_sys();
        let nu0 = CoalgebraVector::So3(Vector3::new(1.0, -2.0, 0.5));
        let s = ConstantBodySection { nu0, l0: vec![0.0; 3] };
        let q = samples(AlgebraKind::So3, 3, 1, 46).remove(0);
        let x = x_gamma(&sys, &s, &q).unwrap();
        assert!((x.xi.omega() - Vector3::new(1.0, -1.0, 0.5 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn control_only_system_projects_to_zero() {
        let zero_h = Analytic {
            value: |_: &ReducedPoint| 0.0,
            gradient: |p: &ReducedPoint| Gradient::zero(p.kind(), p.rotors()),
        };
        let sys = RchSystem::new(zero_h, AlgebraKind::So3, 3).with_control(Actuation::constant(VerticalVector {
            nu: CoalgebraVector::So3(Vector3::x()),
            l: vec![1.0; 3],
        }));
        let s = ConstantBodySection { nu0: CoalgebraVector::So3(Vector3::y()), l0: vec![0.5; 3] };
        let q = samples(AlgebraKind::So3, 3, 1, 47).remove(0);
        assert_eq!(x_gamma(&sys, &s, &q).unwrap().norm(), 0.0);
    }

    #[test]
    fn heavy_top_zero_section_fails_consistently() {
        let sys = systems::heavy_top_system(ht_params());
        let s = heavy_zero(Vector3::z());
        let qs = samples(AlgebraKind::Se3, 2, 30, 48);
        let rows = theorem_equivalence_probe(&sys, &s, &qs, Mode::Reduced { mu: None }, Band::default()).unwrap();
        for (q, r) in qs.iter().zip(&rows) {
            assert_eq!(r.class, Classification::Fail);
            let gamma = q.g.rot().transpose() * Vector3::z();
            let expect = ht_params().mgh() * gamma.cross(&ht_params().chi).norm();
            assert!((r.hj - expect).abs() < 1e-12);
            assert!((r.relatedness - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn epsilon_sweep_moves_both_residuals_together() {
        let p = ht_params();
        let sys = systems::heavy_top_system(p);
        let perp = Vector3::new(1.0, 0.0, 0.0);
        let q = Configuration::identity(AlgebraKind::Se3, 2);
        for e in [1e-9, 1e-7, 1e-5, 1e-3, 1e-1] {
            let s = heavy_zero(p.chi + perp * e);
            let rel = relatedness_residual(&sys, &s, &q, Mode::Full).unwrap();
            let hj = hj_residual(&sys, &s, &q, Mode::Full).unwrap();
            let expect = p.mgh() * e;
            assert!((hj - expect).abs() <= 1e-12 * (1.0 + expect));
            assert!((rel - expect).abs() <= 1e-9);
            assert!((rel - hj).abs() <= 1e-9 + 1e-6 * expect);
            if expect <= 1e-6 || expect >= 1e-3 {
                assert_ne!(Classification::of(rel, hj), Classification::Inconsistent);
            }
        }
    }

    #[test]
    fn fiber_perturbation_scales_linearly() {
        let sys = rb_sys();
        let q = samples(AlgebraKind::So3, 3, 1, 49).remove(0);
        let r = |e: f64| {
            let s = ConstantBodySection { nu0: CoalgebraVector::So3(Vector3::z()), l0: vec![e, 0.0, 0.0] };
            relatedness_residual(&sys, &s, &q, Mode::Full).unwrap()
        };
        assert!(r(0.0) <= 1e-12);
        let (a, b) = (r(1e-4), r(2e-4));
        assert!((a - 1e-4).abs() < 1e-12, "{a}");
        assert!((b / a - 2.0).abs() < 1e-6);
    }

    #[test]
    fn membership_violation_is_reported() {
        let sys = rb_sys();
        let s = ConstantBodySection { nu0: CoalgebraVector::So3(Vector3::new(1.0, 0.0, 0.0)), l0: vec![0.0; 3] };
        let q = Configuration::identity(AlgebraKind::So3, 3);
        let mode = Mode::Reduced { mu: Some(CoalgebraVector::zero(AlgebraKind::So3)) };
        assert!(matches!(hj_residual(&sys, &s, &q, mode), Err(Error::Membership { .. })));
        assert!(matches!(relatedness_residual(&sys, &s, &q, mode), Err(Error::Membership { .. })));
    }

    #[test]
    fn report_orders_worst_samples() {
        let sys = systems::heavy_top_system(ht_params());
        let s = heavy_zero(Vector3::z());
        let qs = samples(AlgebraKind::Se3, 2, 10, 50);
        let rep = residual_report(&sys, &s, &qs, Mode::Full, Band::default()).unwrap();
        assert_eq!(rep.sample_count, 10);
        assert_eq!(rep.worst.len(), 3);
        assert!(rep.worst[0].hj >= rep.worst[1].hj);
        assert_eq!(rep.hj_residual, rep.worst[0].hj.max(rep.hj_residual));
        assert!(rep.closedness_defect <= 1e-6);
    }
}
