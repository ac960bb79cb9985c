//! Seeded property suite for the brackets: antisymmetry, Leibniz, Jacobi and
//! Casimir vanishing on random quadratic test fields.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::lie::{self, AlgebraKind, AlgebraVector};
use crate::poisson::{self, AlgebraBracket, Casimir, Gradient, Numeric, Product, ReducedPoint, ScalarField, Sign};
use crate::sampling;

/// Bracket under test: algebra and rotor count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketSpec {
    /// Report name.
    pub name: &'static str,
    /// Algebra.
    pub kind: AlgebraKind,
    /// Rotor count.
    pub rotors: usize,
}

/// Lie-Poisson on so(3)*, product on so(3)* x R^3 x R^3, product on se(3)* x R^2 x R^2.
pub const BRACKETS: [BracketSpec; 3] = [
    BracketSpec { name: "lie_poisson_so3", kind: AlgebraKind::So3, rotors: 0 },
    BracketSpec { name: "product_so3_r3", kind: AlgebraKind::So3, rotors: 3 },
    BracketSpec { name: "heavy_top_se3_r2", kind: AlgebraKind::Se3, rotors: 2 },
];

/// Tolerances of the suite.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;
/// Leibniz tolerance.
pub const LEIBNIZ_TOL: f64 = 1e-8;
/// Jacobi tolerance.
pub const JACOBI_TOL: f64 = 2e-5;
/// Casimir tolerance.
pub const CASIMIR_TOL: f64 = 1e-8;

/// se(3) bracket with the sign of the translational part flipped. It is
/// antisymmetric but violates Jacobi; used to check that the suite notices.
pub fn mutated_bracket(x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
    Ok(match lie::bracket(x, y)? {
        AlgebraVector::Se3 { omega, vel } => AlgebraVector::Se3 { omega, vel: -vel },
        other => other,
    })
}

/// `F(x) = b.x + 1/2 x^T A x` in flat coordinates, with analytic gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    /// Linear coefficients.
    pub b: Vec<f64>,
    /// Row-major `n x n` matrix.
    pub a: Vec<f64>,
}

impl Quadratic {
    /// `b ~ U(-1, 1)`, `A_ij ~ U(-1, 1) / n`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        Self { b: sampling::vector(rng, n, 1.0), a: sampling::vector(rng, n * n, 1.0 / n as f64) }
    }
}

impl ScalarField for Quadratic {
    fn value(&self, p: &ReducedPoint) -> f64 {
        let x = p.to_vec();
        let n = x.len();
        let mut v = 0.0;
        for i in 0..n {
            v += self.b[i] * x[i];
            for j in 0..n {
                v += 0.5 * x[i] * self.a[i * n + j] * x[j];
            }
        }
        v
    }

    fn gradient(&self, p: &ReducedPoint) -> Option<Gradient> {
        let x = p.to_vec();
        let n = x.len();
        let g: Vec<f64> = (0..n)
            .map(|i| self.b[i] + (0..n).map(|j| 0.5 * (self.a[i * n + j] + self.a[j * n + i]) * x[j]).sum::<f64>())
            .collect();
        Gradient::from_slice(p.kind(), p.rotors(), &g).ok()
    }
}

fn bracket<F: ScalarField + ?Sized, K: ScalarField + ?Sized>(
    f: &F,
    k: &K,
    p: &ReducedPoint,
    br: AlgebraBracket,
) -> Result<f64> {
    poisson::bracket_of_gradients_with(&p.nu, &poisson::gradient(f, p)?, &poisson::gradient(k, p)?, Sign::Minus, br)
}

struct Inner<'a> {
    g: &'a Quadratic,
    k: &'a Quadratic,
    br: AlgebraBracket,
}

impl ScalarField for Inner<'_> {
    fn value(&self, p: &ReducedPoint) -> f64 {
        bracket(self.g, self.k, p, self.br).unwrap_or(f64::NAN)
    }
}

/// Worst case of one property over the instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyResult {
    /// Bracket name.
    pub bracket: &'static str,
    /// Property name.
    pub property: &'static str,
    /// Largest violation.
    pub worst: f64,
    /// Tolerance.
    pub tolerance: f64,
    /// Index of the worst instance.
    pub worst_index: usize,
    /// Number of instances.
    pub instances: usize,
}

impl PropertyResult {
    /// Whether the worst case is within tolerance.
    pub fn passed(&self) -> bool {
        self.worst.is_finite() && self.worst <= self.tolerance
    }
}

#[derive(Clone, Copy)]
struct Worst {
    value: f64,
    index: usize,
}

impl Worst {
    fn new() -> Self {
        Self { value: 0.0, index: 0 }
    }
    fn update(&mut self, v: f64, i: usize) {
        let v = if v.is_finite() { v.abs() } else { f64::INFINITY };
        if v > self.value {
            self.value = v;
            self.index = i;
        }
    }
}

/// Run the four properties on one bracket.
pub fn check_bracket(
    spec: BracketSpec,
    seed: u64,
    instances: usize,
    br: AlgebraBracket,
) -> Result<Vec<PropertyResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.kind.dim() + 2 * spec.rotors;
    let (mut anti, mut leib, mut jac, mut cas) = (Worst::new(), Worst::new(), Worst::new(), Worst::new());
    let casimirs = Casimir::all(spec.kind);
    for i in 0..instances {
        let f = Quadratic::random(&mut rng, n);
        let g = Quadratic::random(&mut rng, n);
        let k = Quadratic::random(&mut rng, n);
        let p = sampling::reduced_point(&mut rng, spec.kind, spec.rotors, 1.0);

        anti.update(bracket(&f, &k, &p, br)? + bracket(&k, &f, &p, br)?, i);

        let fg = Numeric(Product(&f, &g));
        let lhs = bracket(&fg, &Numeric(&k), &p, br)?;
        let rhs = f.value(&p) * bracket(&Numeric(&g), &Numeric(&k), &p, br)?
            + g.value(&p) * bracket(&Numeric(&f), &Numeric(&k), &p, br)?;
        leib.update(lhs - rhs, i);

        let j = bracket(&f, &Inner { g: &g, k: &k, br }, &p, br)?
            + bracket(&g, &Inner { g: &k, k: &f, br }, &p, br)?
            + bracket(&k, &Inner { g: &f, k: &g, br }, &p, br)?;
        jac.update(j, i);

        for c in &casimirs {
            cas.update(bracket(c, &k, &p, br)?, i);
        }
    }
    let result = |property, w: Worst, tolerance| PropertyResult {
        bracket: spec.name,
        property,
        worst: w.value,
        tolerance,
        worst_index: w.index,
        instances,
    };
    Ok(alloc::vec![
        result("antisymmetry", anti, ANTISYMMETRY_TOL),
        result("leibniz", leib, LEIBNIZ_TOL),
        result("jacobi", jac, JACOBI_TOL),
        result("casimir", cas, CASIMIR_TOL),
    ])
}

/// Run every property on every bracket in [`BRACKETS`]; bracket `i` uses seed `seed + i`.
pub fn run_suite(seed: u64, instances: usize, mutated: bool) -> Result<Vec<PropertyResult>> {
    let br: AlgebraBracket = if mutated { mutated_bracket } else { lie::bracket };
    let mut out = Vec::new();
    for (i, spec) in BRACKETS.iter().enumerate() {
        out.extend(check_bracket(*spec, seed.wrapping_add(i as u64), instances, br)?);
    }
    Ok(out)
}
