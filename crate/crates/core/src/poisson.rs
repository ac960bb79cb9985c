//! Brackets on g*, on T*V and on the product g* x V x V*, Hamiltonian
//! fields, Casimirs and the orbit (KKS) form.
//!
//! Flat coordinate order everywhere is `nu` (Pi then Gamma), `theta`, `l`.

use alloc::vec::Vec;
use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::lie::{self, AlgebraKind, AlgebraVector, CoalgebraVector};

/// Sign of a Lie-Poisson structure or orbit form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    /// The (+) structure.
    Plus,
    /// The (-) structure, used for all reduced dynamics.
    #[default]
    Minus,
}

impl Sign {
    /// +1 or -1.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::CountMismatch { what, expected, found })
    }
}

macro_rules! flat_impl {
    ($ty:ident, $nu:ty, $what:literal) => {
        impl $ty {
            /// Algebra kind of the orbit part.
            pub fn kind(&self) -> AlgebraKind {
                self.nu.kind()
            }

            /// Number of rotor coordinates.
            pub fn rotors(&self) -> usize {
                self.theta.len()
            }

            /// Total number of flat components.
            pub fn dim(&self) -> usize {
                self.kind().dim() + 2 * self.rotors()
            }

            /// Flat components: nu, theta, l.
            pub fn to_vec(&self) -> Vec<f64> {
                let mut out = self.nu.to_vec();
                out.extend_from_slice(&self.theta);
                out.extend_from_slice(&self.l);
                out
            }

            /// Inverse of `to_vec`.
            pub fn from_slice(kind: AlgebraKind, k: usize, c: &[f64]) -> Result<Self> {
                let d = kind.dim();
                check_len($what, d + 2 * k, c.len())?;
                Ok(Self {
                    nu: <$nu>::from_slice(kind, &c[..d])?,
                    theta: c[d..d + k].to_vec(),
                    l: c[d + k..].to_vec(),
                })
            }

            /// Zero of the given shape.
            pub fn zero(kind: AlgebraKind, k: usize) -> Self {
                Self {
                    nu: <$nu>::zero(kind),
                    theta: alloc::vec![0.0; k],
                    l: alloc::vec![0.0; k],
                }
            }

            /// Euclidean norm of all components.
            pub fn norm(&self) -> f64 {
                libm::sqrt(self.to_vec().iter().map(|x| x * x).sum())
            }

            /// True when every component is finite.
            pub fn is_finite(&self) -> bool {
                self.to_vec().iter().all(|x| x.is_finite())
            }

            /// `self + s * other`, shapes must agree.
            pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
                check_len($what, self.dim(), other.dim())?;
                if self.kind() != other.kind() {
                    return Err(Error::KindMismatch {
                        expected: self.kind(),
                        found: other.kind(),
                    });
                }
                let a = self.to_vec();
                let b = other.to_vec();
                let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
                Self::from_slice(self.kind(), self.rotors(), &c)
            }

            /// Scalar multiple.
            pub fn scale(&self, s: f64) -> Self {
                let c: Vec<f64> = self.to_vec().iter().map(|x| s * x).collect();
                Self::from_slice(self.kind(), self.rotors(), &c).expect("same shape")
            }
        }
    };
}

/// Point `(nu, theta, l)` of `O_mu x V x V*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPoint {
    /// Orbit coordinate.
    pub nu: CoalgebraVector,
    /// Rotor angles.
    pub theta: Vec<f64>,
    /// Rotor momenta.
    pub l: Vec<f64>,
}

/// Tangent vector `(d nu, d theta, d l)` at a reduced point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTangent {
    /// Orbit component.
    pub nu: CoalgebraVector,
    /// Rotor-angle component.
    pub theta: Vec<f64>,
    /// Rotor-momentum component.
    pub l: Vec<f64>,
}

/// Gradient `(dF/dnu, dF/dtheta, dF/dl)`; the first part lives in the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    /// Functional derivative with respect to the orbit coordinate.
    pub nu: AlgebraVector,
    /// Partials in the rotor angles.
    pub theta: Vec<f64>,
    /// Partials in the rotor momenta.
    pub l: Vec<f64>,
}

flat_impl!(ReducedPoint, CoalgebraVector, "reduced point");
flat_impl!(ReducedTangent, CoalgebraVector, "reduced tangent");
flat_impl!(Gradient, AlgebraVector, "gradient");

impl ReducedPoint {
    /// Checked constructor: rotor angle and momentum counts must agree.
    pub fn new(nu: CoalgebraVector, theta: Vec<f64>, l: Vec<f64>) -> Result<Self> {
        check_len("rotor momenta", theta.len(), l.len())?;
        Ok(Self { nu, theta, l })
    }

    /// Point moved along a tangent vector: `self + s * t`.
    pub fn displaced(&self, s: f64, t: &ReducedTangent) -> Result<Self> {
        let c: Vec<f64> = t.to_vec();
        check_len("reduced tangent", self.dim(), c.len())?;
        let p: Vec<f64> = self.to_vec().iter().zip(&c).map(|(x, y)| x + s * y).collect();
        Self::from_slice(self.kind(), self.rotors(), &p)
    }

    /// Componentwise difference as a tangent vector.
    pub fn difference(&self, other: &Self) -> Result<ReducedTangent> {
        check_len("reduced point", self.dim(), other.dim())?;
        let c: Vec<f64> = self.to_vec().iter().zip(other.to_vec()).map(|(a, b)| a - b).collect();
        ReducedTangent::from_slice(self.kind(), self.rotors(), &c)
    }
}

impl Gradient {
    /// Euclidean pairing with a tangent vector.
    pub fn apply(&self, t: &ReducedTangent) -> Result<f64> {
        check_len("tangent", self.dim(), t.dim())?;
        Ok(self.to_vec().iter().zip(t.to_vec()).map(|(a, b)| a * b).sum())
    }
}

/// Smooth function on the reduced space.
///
/// Fields without an analytic gradient are differentiated by central
/// differences.
pub trait ScalarField {
    /// Value at `p`.
    fn value(&self, p: &ReducedPoint) -> f64;

    /// Analytic gradient, if available.
    fn gradient(&self, _p: &ReducedPoint) -> Option<Gradient> {
        None
    }
}

/// Closure-backed field without an analytic gradient.
#[derive(Clone, Copy)]
pub struct FnField<F>(pub F);

impl<F> ScalarField for FnField<F>
where
    F: Fn(&ReducedPoint) -> f64,
{
    fn value(&self, p: &ReducedPoint) -> f64 {
        (self.0)(p)
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn value(&self, p: &ReducedPoint) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        (**self).gradient(p)
    }
}

impl<T: ScalarField + ?Sized> ScalarField for alloc::boxed::Box<T> {
    fn value(&self, p: &ReducedPoint) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        (**self).gradient(p)
    }
}

impl<T: ScalarField + ?Sized> ScalarField for alloc::sync::Arc<T> {
    fn value(&self, p: &ReducedPoint) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        (**self).gradient(p)
    }
}

/// Field with a value closure and an analytic gradient closure.
#[derive(Clone)]
pub struct Analytic<F, G> {
    /// Value.
    pub value: F,
    /// Gradient.
    pub gradient: G,
}

impl<F, G> ScalarField for Analytic<F, G>
where
    F: Fn(&ReducedPoint) -> f64,
    G: Fn(&ReducedPoint) -> Gradient,
{
    fn value(&self, p: &ReducedPoint) -> f64 {
        (self.value)(p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        Some((self.gradient)(p))
    }
}

/// Field that hides the gradient of another, forcing finite differences.
pub struct Numeric<T>(pub T);

impl<T: ScalarField> ScalarField for Numeric<T> {
    fn value(&self, p: &ReducedPoint) -> f64 {
        self.0.value(p)
    }
}

/// Flat coordinate function `p -> p.to_vec()[index]`.
#[derive(Debug, Clone, Copy)]
pub struct Coordinate(pub usize);

impl ScalarField for Coordinate {
    fn value(&self, p: &ReducedPoint) -> f64 {
        p.to_vec()[self.0]
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        let mut e = alloc::vec![0.0; p.dim()];
        e[self.0] = 1.0;
        Gradient::from_slice(p.kind(), p.rotors(), &e).ok()
    }
}

/// Pointwise product; analytic gradient by the product rule when both factors have one.
pub struct Product<A, B>(pub A, pub B);

impl<A: ScalarField, B: ScalarField> ScalarField for Product<A, B> {
    fn value(&self, p: &ReducedPoint) -> f64 {
        self.0.value(p) * self.1.value(p)
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        let ga = self.0.gradient(p)?;
        let gb = self.1.gradient(p)?;
        ga.scale(self.1.value(p)).axpy(self.0.value(p), &gb).ok()
    }
}

/// The function `p -> {F, K}(p)` under the product bracket.
pub struct BracketField<A, B> {
    /// Left argument.
    pub f: A,
    /// Right argument.
    pub k: B,
    /// Sign of the Lie-Poisson part.
    pub sign: Sign,
}

impl<A: ScalarField, B: ScalarField> ScalarField for BracketField<A, B> {
    fn value(&self, p: &ReducedPoint) -> f64 {
        product_bracket(&self.f, &self.k, p, self.sign).unwrap_or(f64::NAN)
    }
}

fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Central finite-difference gradient.
pub fn fd_gradient<F: ScalarField + ?Sized>(f: &F, p: &ReducedPoint) -> Gradient {
    let x = p.to_vec();
    let (kind, k) = (p.kind(), p.rotors());
    let mut g = alloc::vec![0.0; x.len()];
    let mut y = x.clone();
    for i in 0..x.len() {
        let h = fd_step(x[i]);
        y[i] = x[i] + h;
        let fp = f.value(&ReducedPoint::from_slice(kind, k, &y).expect("same shape"));
        y[i] = x[i] - h;
        let fm = f.value(&ReducedPoint::from_slice(kind, k, &y).expect("same shape"));
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    Gradient::from_slice(kind, k, &g).expect("same shape")
}

/// Analytic gradient when supplied, finite differences otherwise.
pub fn gradient<F: ScalarField + ?Sized>(f: &F, p: &ReducedPoint) -> Result<Gradient> {
    let g = f.gradient(p).unwrap_or_else(|| fd_gradient(f, p));
    if g.dim() != p.dim() {
        return Err(Error::CountMismatch { what: "gradient", expected: p.dim(), found: g.dim() });
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("gradient"));
    }
    Ok(g)
}

/// Relative max-norm gap between the supplied gradient and finite differences,
/// or `None` when no gradient is supplied.
pub fn gradient_discrepancy<F: ScalarField + ?Sized>(f: &F, p: &ReducedPoint) -> Option<f64> {
    let a = f.gradient(p)?.to_vec();
    let n = fd_gradient(f, p).to_vec();
    let scale = n.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let gap = a.iter().zip(&n).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Some(gap / scale)
}

/// True when the supplied gradient (if any) matches finite differences within 1e-5 relative.
pub fn validate_gradient<F: ScalarField + ?Sized>(f: &F, p: &ReducedPoint) -> bool {
    gradient_discrepancy(f, p).map_or(true, |d| d <= 1e-5)
}

/// Signature of an algebra bracket, so that alternative brackets can be plugged in.
pub type AlgebraBracket = fn(&AlgebraVector, &AlgebraVector) -> Result<AlgebraVector>;

/// Product bracket of two gradients at `nu`, with a pluggable algebra bracket.
pub fn bracket_of_gradients_with(
    nu: &CoalgebraVector,
    df: &Gradient,
    dk: &Gradient,
    sign: Sign,
    algebra_bracket: AlgebraBracket,
) -> Result<f64> {
    check_len("rotor gradient", df.rotors(), dk.rotors())?;
    let lp = sign.factor() * nu.pairing(&algebra_bracket(&df.nu, &dk.nu)?)?;
    let v: f64 = (0..df.rotors()).map(|i| df.theta[i] * dk.l[i] - dk.theta[i] * df.l[i]).sum();
    Ok(lp + v)
}

/// Product bracket of two gradients at `nu`.
pub fn bracket_of_gradients(nu: &CoalgebraVector, df: &Gradient, dk: &Gradient, sign: Sign) -> Result<f64> {
    bracket_of_gradients_with(nu, df, dk, sign, lie::bracket)
}

/// Lie-Poisson bracket `+-<nu, [dF/dnu, dK/dnu]>` of fields on g*.
pub fn lie_poisson_bracket<F, K>(f: &F, k: &K, nu: &CoalgebraVector, sign: Sign) -> Result<f64>
where
    F: ScalarField + ?Sized,
    K: ScalarField + ?Sized,
{
    let p = ReducedPoint::zero(nu.kind(), 0);
    let p = ReducedPoint { nu: *nu, ..p };
    let (gf, gk) = (gradient(f, &p)?, gradient(k, &p)?);
    Ok(sign.factor() * nu.pairing(&lie::bracket(&gf.nu, &gk.nu)?)?)
}

/// Bracket on g* x V x V*: Lie-Poisson part plus the canonical part in (theta, l).
pub fn product_bracket<F, K>(f: &F, k: &K, p: &ReducedPoint, sign: Sign) -> Result<f64>
where
    F: ScalarField + ?Sized,
    K: ScalarField + ?Sized,
{
    bracket_of_gradients(&p.nu, &gradient(f, p)?, &gradient(k, p)?, sign)
}

/// Poisson tensor of the (-) product structure applied to a gradient:
/// `(ad*_{dh/dnu} nu, dh/dl, -dh/dtheta)`.
pub fn poisson_tensor(p: &ReducedPoint, dh: &Gradient) -> Result<ReducedTangent> {
    check_len("gradient", p.dim(), dh.dim())?;
    Ok(ReducedTangent {
        nu: lie::coadjoint_ad_star(&dh.nu, &p.nu)?,
        theta: dh.l.clone(),
        l: dh.theta.iter().map(|x| -x).collect(),
    })
}

/// Hamiltonian vector field of `h` under the (-) structure.
pub fn hamiltonian_field<H: ScalarField + ?Sized>(h: &H, p: &ReducedPoint) -> Result<ReducedTangent> {
    poisson_tensor(p, &gradient(h, p)?)
}

/// Hamiltonian field assembled one coordinate at a time as `{c, h}_-`.
pub fn hamiltonian_field_from_brackets<H: ScalarField + ?Sized>(h: &H, p: &ReducedPoint) -> Result<ReducedTangent> {
    let dh = gradient(h, p)?;
    let comps = (0..p.dim())
        .map(|i| {
            let dc = Coordinate(i).gradient(p).expect("coordinate gradient");
            bracket_of_gradients(&p.nu, &dc, &dh, Sign::Minus)
        })
        .collect::<Result<Vec<f64>>>()?;
    ReducedTangent::from_slice(p.kind(), p.rotors(), &comps)
}

/// Orbit form `+-<nu, [xi, eta]>` on the tangent pair `(ad*_xi nu, ad*_eta nu)`.
pub fn kks_form(nu: &CoalgebraVector, xi: &AlgebraVector, eta: &AlgebraVector, sign: Sign) -> Result<f64> {
    Ok(sign.factor() * nu.pairing(&lie::bracket(xi, eta)?)?)
}

/// Named Casimir values: `|Pi|^2` on so(3)*; `Pi.Gamma` and `|Gamma|^2` on se(3)*.
pub fn casimirs(p: &ReducedPoint) -> Vec<(&'static str, f64)> {
    casimirs_of(&p.nu)
}

/// Casimir values of a coalgebra element.
pub fn casimirs_of(nu: &CoalgebraVector) -> Vec<(&'static str, f64)> {
    match nu {
        CoalgebraVector::So3(pi) => alloc::vec![("pi_sq", pi.norm_squared())],
        CoalgebraVector::Se3 { pi, gamma } => {
            alloc::vec![("pi_dot_gamma", pi.dot(gamma)), ("gamma_sq", gamma.norm_squared())]
        }
    }
}

/// Casimir functions with analytic gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Casimir {
    /// `|Pi|^2` on so(3)*.
    PiSquared,
    /// `Pi.Gamma` on se(3)*.
    PiDotGamma,
    /// `|Gamma|^2` on se(3)*.
    GammaSquared,
}

impl Casimir {
    /// Casimirs of the given algebra, in the order of [`casimirs`].
    pub fn all(kind: AlgebraKind) -> Vec<Casimir> {
        match kind {
            AlgebraKind::So3 => alloc::vec![Casimir::PiSquared],
            AlgebraKind::Se3 => alloc::vec![Casimir::PiDotGamma, Casimir::GammaSquared],
        }
    }

    /// Column name.
    pub fn name(self) -> &'static str {
        match self {
            Casimir::PiSquared => "pi_sq",
            Casimir::PiDotGamma => "pi_dot_gamma",
            Casimir::GammaSquared => "gamma_sq",
        }
    }
}

impl ScalarField for Casimir {
    fn value(&self, p: &ReducedPoint) -> f64 {
        let pi = p.nu.pi();
        let gamma = p.nu.gamma().unwrap_or_else(Vector3::zeros);
        match self {
            Casimir::PiSquared => pi.norm_squared(),
            Casimir::PiDotGamma => pi.dot(&gamma),
            Casimir::GammaSquared => gamma.norm_squared(),
        }
    }
    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        let pi = p.nu.pi();
        let gamma = p.nu.gamma().unwrap_or_else(Vector3::zeros);
        let nu = match (self, p.kind()) {
            (Casimir::PiSquared, AlgebraKind::So3) => AlgebraVector::So3(pi * 2.0),
            (Casimir::PiDotGamma, AlgebraKind::Se3) => AlgebraVector::Se3 { omega: gamma, vel: pi },
            (Casimir::GammaSquared, AlgebraKind::Se3) => {
                AlgebraVector::Se3 { omega: Vector3::zeros(), vel: gamma * 2.0 }
            }
            _ => return None,
        };
        let k = p.rotors();
        Some(Gradient { nu, theta: alloc::vec![0.0; k], l: alloc::vec![0.0; k] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn so3(pi: [f64; 3]) -> ReducedPoint {
        ReducedPoint::new(CoalgebraVector::So3(Vector3::from(pi)), vec![], vec![]).unwrap()
    }

    /// Random quadratic with analytic gradient.
    fn quadratic(rng: &mut ChaCha8Rng, n: usize) -> impl ScalarField + Clone {
        let b = sampling::vector(rng, n, 1.0);
        let a: Vec<Vec<f64>> = (0..n).map(|_| sampling::vector(rng, n, 1.0 / n as f64)).collect();
        let b2 = b.clone();
        let a2 = a.clone();
        Analytic {
            value: move |p: &ReducedPoint| {
                let x = p.to_vec();
                (0..n).map(|i| b[i] * x[i] + 0.5 * (0..n).map(|j| a[i][j] * x[i] * x[j]).sum::<f64>()).sum()
            },
            gradient: move |p: &ReducedPoint| {
                let x = p.to_vec();
                let g: Vec<f64> =
                    (0..n).map(|i| b2[i] + 0.5 * (0..n).map(|j| (a2[i][j] + a2[j][i]) * x[j]).sum::<f64>()).collect();
                Gradient::from_slice(p.kind(), p.rotors(), &g).unwrap()
            },
        }
    }

    #[test]
    fn lie_poisson_examples() {
        let e3 = CoalgebraVector::So3(Vector3::z());
        let pi1 = Coordinate(0);
        let pi2 = Coordinate(1);
        assert_eq!(lie_poisson_bracket(&pi1, &pi1, &e3, Sign::Minus).unwrap(), 0.0);
        assert_eq!(lie_poisson_bracket(&pi1, &pi2, &e3, Sign::Minus).unwrap(), -1.0);
        assert_eq!(lie_poisson_bracket(&pi1, &pi2, &e3, Sign::Plus).unwrap(), 1.0);
    }

    #[test]
    fn norm_squared_is_casimir_against_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = FnField(|p: &ReducedPoint| 0.5 * p.nu.pi().norm_squared());
        for _ in 0..100 {
            let k = quadratic(&mut rng, 3);
            let nu = sampling::coalgebra(&mut rng, AlgebraKind::So3, 1.0);
            assert!(lie_poisson_bracket(&c, &k, &nu, Sign::Minus).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn product_bracket_canonical_pairs() {
        let p = ReducedPoint::new(CoalgebraVector::So3(Vector3::new(0.3, 0.1, -0.4)), vec![0.1, 0.2], vec![1.0, 2.0])
            .unwrap();
        // flat order: Pi(3), theta(2), l(2)
        let theta1 = Coordinate(3);
        let theta2 = Coordinate(4);
        let l1 = Coordinate(5);
        assert_eq!(product_bracket(&theta1, &l1, &p, Sign::Minus).unwrap(), 1.0);
        assert_eq!(product_bracket(&theta1, &theta2, &p, Sign::Minus).unwrap(), 0.0);
    }

    #[test]
    fn mixed_bracket_matches_finite_difference_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = sampling::reduced_point(&mut rng, AlgebraKind::So3, 2, 1.0);
        let f = Product(Coordinate(0), Coordinate(6));
        let k = Coordinate(4);
        let analytic = product_bracket(&f, &k, &p, Sign::Minus).unwrap();
        let numeric = product_bracket(&Numeric(&f), &Numeric(k), &p, Sign::Minus).unwrap();
        assert!((analytic + p.nu.pi()[0]).abs() < 1e-14);
        assert!((numeric - analytic).abs() < 1e-8);
    }

    #[test]
    fn reduces_to_lie_poisson_when_rotors_ignored() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let f = quadratic(&mut rng, 6);
            let k = quadratic(&mut rng, 6);
            let nu = sampling::coalgebra(&mut rng, AlgebraKind::Se3, 1.0);
            let lp = lie_poisson_bracket(&f, &k, &nu, Sign::Minus).unwrap();
            let p = ReducedPoint { nu, ..ReducedPoint::zero(AlgebraKind::Se3, 0) };
            let pb = product_bracket(&f, &k, &p, Sign::Minus).unwrap();
            assert!((lp - pb).abs() < 1e-15);
        }
    }

    #[test]
    fn antisymmetry_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let p = sampling::reduced_point(&mut rng, AlgebraKind::Se3, 2, 1.0);
            let f = quadratic(&mut rng, 10);
            let k = quadratic(&mut rng, 10);
            let a = product_bracket(&f, &k, &p, Sign::Minus).unwrap();
            let b = product_bracket(&k, &f, &p, Sign::Minus).unwrap();
            assert!((a + b).abs() <= 1e-12);
        }
    }

    #[test]
    fn hamiltonian_field_examples() {
        let h = FnField(|p: &ReducedPoint| 0.5 * p.nu.pi().norm_squared());
        let x = hamiltonian_field(&h, &so3([0.3, -1.2, 0.8])).unwrap();
        assert!(x.norm() < 1e-9);
    }

    #[test]
    fn hamiltonian_field_agrees_with_coordinate_brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for (kind, k) in [(AlgebraKind::So3, 3), (AlgebraKind::Se3, 2), (AlgebraKind::Se3, 0)] {
            for _ in 0..100 {
                let n = kind.dim() + 2 * k;
                let h = quadratic(&mut rng, n);
                let p = sampling::reduced_point(&mut rng, kind, k, 1.0);
                let a = hamiltonian_field(&h, &p).unwrap();
                let b = hamiltonian_field_from_brackets(&h, &p).unwrap();
                assert!(a.axpy(-1.0, &b).unwrap().norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn kks_examples() {
        let nu = CoalgebraVector::So3(Vector3::z());
        let (x, y) = (AlgebraVector::So3(Vector3::x()), AlgebraVector::So3(Vector3::y()));
        assert_eq!(kks_form(&nu, &x, &y, Sign::Minus).unwrap(), -1.0);
        assert_eq!(kks_form(&nu, &x, &x, Sign::Minus).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for kind in [AlgebraKind::So3, AlgebraKind::Se3] {
            for _ in 0..100 {
                let nu = sampling::coalgebra(&mut rng, kind, 1.0);
                let xi = sampling::algebra(&mut rng, kind, 1.0);
                let eta = sampling::algebra(&mut rng, kind, 1.0);
                let m = kks_form(&nu, &xi, &eta, Sign::Minus).unwrap();
                assert_eq!(kks_form(&nu, &xi, &eta, Sign::Plus).unwrap(), -m);
                assert_eq!(kks_form(&nu, &eta, &xi, Sign::Minus).unwrap(), -m);
            }
        }
    }

    #[test]
    fn casimir_values_and_commutation() {
        assert_eq!(casimirs(&so3([3.0, 4.0, 0.0])), vec![("pi_sq", 25.0)]);
        let p =
            ReducedPoint::new(CoalgebraVector::Se3 { pi: Vector3::x(), gamma: Vector3::y() }, vec![], vec![]).unwrap();
        assert_eq!(casimirs(&p), vec![("pi_dot_gamma", 0.0), ("gamma_sq", 1.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (kind, k) in [(AlgebraKind::So3, 3), (AlgebraKind::Se3, 2)] {
            for _ in 0..100 {
                let p = sampling::reduced_point(&mut rng, kind, k, 1.0);
                let f = quadratic(&mut rng, kind.dim() + 2 * k);
                for c in Casimir::all(kind) {
                    assert!(validate_gradient(&c, &p));
                    assert!(product_bracket(&c, &f, &p, Sign::Minus).unwrap().abs() <= 1e-8);
                    assert!(product_bracket(&Numeric(c), &f, &p, Sign::Minus).unwrap().abs() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn gradient_validation_flags_wrong_gradients() {
        let wrong = Analytic {
            value: |p: &ReducedPoint| p.nu.pi()[0] * p.nu.pi()[0],
            gradient: |p: &ReducedPoint| Gradient { nu: AlgebraVector::So3(p.nu.pi()), theta: vec![], l: vec![] },
        };
        let p = so3([1.0, 0.5, 0.0]);
        assert!(!validate_gradient(&wrong, &p));
        assert!(validate_gradient(&Casimir::PiSquared, &p));
    }

    #[test]
    fn non_finite_gradient_is_an_error() {
        let bad = FnField(|p: &ReducedPoint| libm::sqrt(-1.0 - p.nu.pi()[0].abs()));
        let p = so3([1.0, 0.0, 0.0]);
        assert_eq!(lie_poisson_bracket(&bad, &Coordinate(0), &p.nu, Sign::Minus), Err(Error::NonFinite("gradient")));
    }
}
