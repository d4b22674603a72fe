//! Complex pairs, the Hopf fibration S³ → S², and the su(2)/SU(2) primitives
//! used by the lifted integrators.
//!
//! A point of S³ is a pair φ = (z, u) with |z|² + |u|² = 1. The Hopf map sends
//! it to x = φ†σφ ∈ S², where σ = (σ₁, σ₂, σ₃) are the Pauli matrices. An
//! element of su(2) is stored through its vector representation a ∈ ℝ³,
//! A = Σ a_α (iσ_α).

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;

use crate::{Complex64, Result, Vec3, VortexError};

/// 2×2 complex matrix, used for SU(2) group elements.
pub type Su2Matrix = Matrix2<Complex64>;

const O: Complex64 = Complex64::new(0.0, 0.0);
const R1: Complex64 = Complex64::new(1.0, 0.0);
const I1: Complex64 = Complex64::new(0.0, 1.0);

/// The Pauli matrices σ₁, σ₂, σ₃, row-major.
pub const PAULI: [[[Complex64; 2]; 2]; 3] = [
    [[O, R1], [R1, O]],
    [[O, Complex64::new(0.0, -1.0)], [I1, O]],
    [[R1, O], [O, Complex64::new(-1.0, 0.0)]],
];

/// Pauli matrix `alpha` (0-based) as an nalgebra matrix.
pub fn pauli_matrix(alpha: usize) -> Su2Matrix {
    let p = PAULI[alpha];
    Su2Matrix::new(p[0][0], p[0][1], p[1][0], p[1][1])
}

/// A vector φ = (z, u) in ℂ².
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexPair {
    pub z: Complex64,
    pub u: Complex64,
}

impl ComplexPair {
    pub const ZERO: ComplexPair = ComplexPair { z: O, u: O };

    pub const fn new(z: Complex64, u: Complex64) -> Self {
        Self { z, u }
    }

    pub fn from_reals(z_re: f64, z_im: f64, u_re: f64, u_im: f64) -> Self {
        Self::new(Complex64::new(z_re, z_im), Complex64::new(u_re, u_im))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.u.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        *self * (1.0 / self.norm())
    }

    /// Multiply both components by a complex scalar.
    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.z * c, self.u * c)
    }

    /// Largest absolute real or imaginary component.
    pub fn max_abs(&self) -> f64 {
        self.z
            .re
            .abs()
            .max(self.z.im.abs())
            .max(self.u.re.abs())
            .max(self.u.im.abs())
    }

    /// Hopf map (2Re(z*u), 2Im(z*u), |z|² − |u|²), evaluated as written.
    pub fn project(&self) -> Vec3 {
        let w = self.z.conj() * self.u;
        Vec3::new(2.0 * w.re, 2.0 * w.im, self.z.norm_sqr() - self.u.norm_sqr())
    }

    /// Left multiplication by a 2×2 matrix.
    pub fn apply(&self, m: &Su2Matrix) -> Self {
        Self::new(
            m[(0, 0)] * self.z + m[(0, 1)] * self.u,
            m[(1, 0)] * self.z + m[(1, 1)] * self.u,
        )
    }
}

impl Add for ComplexPair {
    type Output = ComplexPair;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.z + rhs.z, self.u + rhs.u)
    }
}

impl Sub for ComplexPair {
    type Output = ComplexPair;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.z - rhs.z, self.u - rhs.u)
    }
}

impl Neg for ComplexPair {
    type Output = ComplexPair;
    fn neg(self) -> Self {
        Self::new(-self.z, -self.u)
    }
}

impl Mul<f64> for ComplexPair {
    type Output = ComplexPair;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.z * rhs, self.u * rhs)
    }
}

impl Mul<Complex64> for ComplexPair {
    type Output = ComplexPair;
    fn mul(self, rhs: Complex64) -> Self {
        self.scale(rhs)
    }
}

/// Hermitian inner product ⟨φ, ψ⟩ = z₁* z₂ + u₁* u₂.
pub fn hermitian_inner(phi: &ComplexPair, psi: &ComplexPair) -> Complex64 {
    phi.z.conj() * psi.z + phi.u.conj() * psi.u
}

/// φ†σ_α ψ for α = 0, 1, 2 (0-based).
pub fn pauli_sandwich(phi: &ComplexPair, alpha: usize, psi: &ComplexPair) -> Complex64 {
    let (z1, u1, z2, u2) = (phi.z.conj(), phi.u.conj(), psi.z, psi.u);
    match alpha {
        0 => z1 * u2 + u1 * z2,
        1 => (z1 * u2 - u1 * z2) * Complex64::new(0.0, -1.0),
        2 => z1 * z2 - u1 * u2,
        _ => panic!("Pauli index {alpha} out of range"),
    }
}

/// Hopf projection of a nonzero pair. The formula is applied as written, so
/// a non-unit input gives a vector of length ‖φ‖².
pub fn hopf_project(phi: &ComplexPair) -> Result<Vec3> {
    if phi.norm_sqr() == 0.0 || !phi.norm_sqr().is_finite() {
        return Err(VortexError::Domain(
            "Hopf projection of a zero or non-finite pair".into(),
        ));
    }
    Ok(phi.project())
}

/// A point on the fibre over `x`.
///
/// Uses the section with real `z` away from the south pole and switches to the
/// section with real `u` for x₃ < −1/2.
pub fn hopf_lift(x: &Vec3) -> Result<ComplexPair> {
    let n = x.norm();
    if !n.is_finite() || (n - 1.0).abs() > 1e-10 {
        return Err(VortexError::Domain(format!(
            "Hopf lift needs a unit vector, got norm {n}"
        )));
    }
    let w = Complex64::new(x[0], x[1]);
    if x[2] >= -0.5 {
        let z = ((1.0 + x[2]) / 2.0).sqrt();
        Ok(ComplexPair::new(Complex64::new(z, 0.0), w / (2.0 * z)))
    } else {
        let u = ((1.0 - x[2]) / 2.0).sqrt();
        Ok(ComplexPair::new(w.conj() / (2.0 * u), Complex64::new(u, 0.0)))
    }
}

/// Vector representation a of A = Σ a_α (iσ_α) ∈ su(2).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgebraVector(pub Vec3);

impl AlgebraVector {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self(Vec3::new(a1, a2, a3))
    }

    pub fn zero() -> Self {
        Self(Vec3::zeros())
    }

    /// The anti-Hermitian traceless matrix A.
    ///
    /// A = [[i a₃, a₂ + i a₁], [−a₂ + i a₁, −i a₃]].
    pub fn matrix(&self) -> Su2Matrix {
        let a = &self.0;
        Su2Matrix::new(
            Complex64::new(0.0, a[2]),
            Complex64::new(a[1], a[0]),
            Complex64::new(-a[1], a[0]),
            Complex64::new(0.0, -a[2]),
        )
    }

    /// A φ, expanded in closed form.
    pub fn apply(&self, phi: &ComplexPair) -> ComplexPair {
        algebra_apply(self, phi)
    }
}

/// (i a·σ) φ.
pub fn algebra_apply(a: &AlgebraVector, phi: &ComplexPair) -> ComplexPair {
    let a = &a.0;
    let upper = Complex64::new(0.0, a[2]) * phi.z + Complex64::new(a[1], a[0]) * phi.u;
    let lower = Complex64::new(-a[1], a[0]) * phi.z + Complex64::new(0.0, -a[2]) * phi.u;
    ComplexPair::new(upper, lower)
}

/// Cayley transform (I + A)(I − A)⁻¹ in the closed form
/// ((1 − ‖a‖²) I + 2A) / (1 + ‖a‖²).
pub fn cayley(a: &AlgebraVector) -> Su2Matrix {
    let n2 = a.0.norm_squared();
    let s = 1.0 / (1.0 + n2);
    let diag = Complex64::new((1.0 - n2) * s, 0.0);
    let mut m = a.matrix() * Complex64::new(2.0 * s, 0.0);
    m[(0, 0)] += diag;
    m[(1, 1)] += diag;
    m
}

/// Cay(a) φ without forming the matrix.
pub fn cayley_apply(a: &AlgebraVector, phi: &ComplexPair) -> ComplexPair {
    let n2 = a.0.norm_squared();
    let s = 1.0 / (1.0 + n2);
    *phi * ((1.0 - n2) * s) + algebra_apply(a, phi) * (2.0 * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_unit_pair(rng: &mut StdRng) -> ComplexPair {
        loop {
            let p = ComplexPair::from_reals(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if p.norm() > 1e-3 {
                return p.normalized();
            }
        }
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    // Brute-force 2×2 inverse through the adjugate.
    fn inverse2(m: &Su2Matrix) -> Su2Matrix {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        Su2Matrix::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det
    }

    fn cayley_oracle(a: &AlgebraVector) -> Su2Matrix {
        let mut amat = Su2Matrix::zeros();
        for alpha in 0..3 {
            amat += pauli_matrix(alpha) * c(0.0, a.0[alpha]);
        }
        let id = Su2Matrix::identity();
        (id + amat) * inverse2(&(id - amat))
    }

    #[test]
    fn projection_of_poles_and_equator() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cases = [
            (ComplexPair::from_reals(1.0, 0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)),
            (ComplexPair::from_reals(0.0, 0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, -1.0)),
            (ComplexPair::from_reals(s, 0.0, s, 0.0), Vec3::new(1.0, 0.0, 0.0)),
        ];
        for (phi, x) in cases {
            assert!((hopf_project(&phi).unwrap() - x).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_rejects_zero() {
        assert!(matches!(
            hopf_project(&ComplexPair::ZERO),
            Err(VortexError::Domain(_))
        ));
    }

    #[test]
    fn projection_matches_pauli_quadratic_form() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let phi = random_unit_pair(&mut rng);
            let x = phi.project();
            for alpha in 0..3 {
                let q = pauli_sandwich(&phi, alpha, &phi);
                assert!(q.im.abs() < 1e-15);
                assert!((q.re - x[alpha]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lift_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let north = hopf_lift(&Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(north, ComplexPair::from_reals(1.0, 0.0, 0.0, 0.0));
        let east = hopf_lift(&Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((east - ComplexPair::from_reals(s, 0.0, s, 0.0)).max_abs() < 1e-15);
        assert!((east.project() - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        let south = hopf_lift(&Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(south, ComplexPair::from_reals(0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn lift_rejects_non_unit() {
        assert!(hopf_lift(&Vec3::new(0.0, 0.0, 1.1)).is_err());
        assert!(hopf_lift(&Vec3::new(f64::NAN, 0.0, 1.0)).is_err());
    }

    #[test]
    fn pauli_multiplication_identity() {
        let eps = |a: usize, b: usize, g: usize| -> f64 {
            match (a, b, g) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                _ => 0.0,
            }
        };
        for a in 0..3 {
            for b in 0..3 {
                let lhs = pauli_matrix(a) * pauli_matrix(b);
                let mut rhs = if a == b {
                    Su2Matrix::identity()
                } else {
                    Su2Matrix::zeros()
                };
                for g in 0..3 {
                    rhs += pauli_matrix(g) * c(0.0, eps(a, b, g));
                }
                assert_eq!(lhs, rhs, "σ{a}σ{b}");
            }
        }
    }

    #[test]
    fn pauli_completeness() {
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    for d in 0..2 {
                        let sum: Complex64 = (0..3).map(|al| PAULI[al][a][b] * PAULI[al][cc][d]).sum();
                        let expected = 2.0 * delta(a, d) * delta(b, cc) - delta(a, b) * delta(cc, d);
                        assert_eq!(sum, c(expected, 0.0), "({a},{b},{cc},{d})");
                    }
                }
            }
        }
    }

    #[test]
    fn algebra_matrix_is_antihermitian_traceless() {
        let a = AlgebraVector::new(0.3, -1.2, 0.7);
        let m = a.matrix();
        assert_eq!(m.trace(), c(0.0, 0.0));
        assert_eq!(m.adjoint(), -m);
        let mut expanded = Su2Matrix::zeros();
        for alpha in 0..3 {
            expanded += pauli_matrix(alpha) * c(0.0, a.0[alpha]);
        }
        assert_eq!(m, expanded);
    }

    #[test]
    fn algebra_apply_examples() {
        let phi = ComplexPair::from_reals(0.6, -0.1, 0.2, 0.77);
        assert_eq!(algebra_apply(&AlgebraVector::zero(), &phi), ComplexPair::ZERO);
        let e1 = ComplexPair::from_reals(1.0, 0.0, 0.0, 0.0);
        let e2 = ComplexPair::from_reals(0.0, 0.0, 1.0, 0.0);
        let i_pair = ComplexPair::from_reals(0.0, 1.0, 0.0, 0.0);
        assert_eq!(algebra_apply(&AlgebraVector::new(0.0, 0.0, 1.0), &e1), i_pair);
        assert_eq!(algebra_apply(&AlgebraVector::new(1.0, 0.0, 0.0), &e2), i_pair);
        // explicit matrix product oracle
        let a = AlgebraVector::new(-0.4, 0.9, 0.25);
        let via_matrix = phi.apply(&a.matrix());
        assert!((via_matrix - a.apply(&phi)).max_abs() < 1e-15);
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(cayley(&AlgebraVector::zero()), Su2Matrix::identity());
        let u = cayley(&AlgebraVector::new(0.0, 0.0, 1.0));
        let expected = Su2Matrix::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
        assert!((u - expected).norm() < 1e-15);
        assert!((cayley_oracle(&AlgebraVector::new(0.0, 0.0, 1.0)) - expected).norm() < 1e-15);
    }

    #[test]
    fn cayley_matches_inverse_oracle_and_is_special_unitary() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let dir = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let a = AlgebraVector(dir.normalize() * rng.random_range(0.0..10.0));
            let u = cayley(&a);
            let oracle = cayley_oracle(&a);
            for k in 0..4 {
                assert!(close(u[k], oracle[k], 1e-12));
            }
            let utu = u.adjoint() * u;
            assert!((utu - Su2Matrix::identity()).norm() < 1e-12);
            assert!(close(u.determinant(), c(1.0, 0.0), 1e-12));
            let phi = random_unit_pair(&mut rng);
            assert!((cayley_apply(&a, &phi) - phi.apply(&u)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn inner_product_examples() {
        let e1 = ComplexPair::from_reals(1.0, 0.0, 0.0, 0.0);
        let e2 = ComplexPair::from_reals(0.0, 0.0, 1.0, 0.0);
        assert_eq!(hermitian_inner(&e1, &e1), c(1.0, 0.0));
        assert_eq!(hermitian_inner(&e1, &e2), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_identity_on_random_pairs() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..1000 {
            let phi = random_unit_pair(&mut rng);
            let psi = random_unit_pair(&mut rng);
            let lhs = phi.project().dot(&psi.project());
            let rhs = 2.0 * hermitian_inner(&phi, &psi).norm_sqr() - 1.0;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_round_trip_near_poles() {
        for k in 0..200 {
            let eps = 10f64.powi(-(k % 16));
            for sign in [1.0, -1.0] {
                let x3 = sign * (1.0 - eps);
                let r = (1.0 - x3 * x3).max(0.0).sqrt();
                let th = 0.37 * k as f64;
                let x = Vec3::new(r * th.cos(), r * th.sin(), x3).normalize();
                let phi = hopf_lift(&x).unwrap();
                assert!((phi.norm() - 1.0).abs() < 1e-14);
                assert!((phi.project() - x).norm() < 1e-12);
            }
        }
    }

    fn unit_vec() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(x3, th)| {
            let r = (1.0 - x3 * x3).sqrt();
            Vec3::new(r * th.cos(), r * th.sin(), x3)
        })
    }

    fn unit_pair() -> impl Strategy<Value = ComplexPair> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-4)
            .prop_map(|(a, b, c, d)| ComplexPair::from_reals(a, b, c, d).normalized())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn lift_then_project_is_identity(x in unit_vec()) {
            let phi = hopf_lift(&x).unwrap();
            prop_assert!((phi.project() - x).norm() < 1e-12);
            prop_assert!((phi.norm() - 1.0).abs() < 1e-13);
        }

        #[test]
        fn projection_is_gauge_invariant(phi in unit_pair(), theta in 0.0f64..std::f64::consts::TAU) {
            let rotated = phi.scale(Complex64::from_polar(1.0, theta));
            prop_assert!((rotated.project() - phi.project()).norm() < 1e-12);
        }

        #[test]
        fn algebra_action_is_tangent(phi in unit_pair(), a1 in -5.0f64..5.0, a2 in -5.0f64..5.0, a3 in -5.0f64..5.0) {
            let out = algebra_apply(&AlgebraVector::new(a1, a2, a3), &phi);
            prop_assert!(hermitian_inner(&out, &phi).re.abs() < 1e-12);
        }
    }
}
