//! Time steppers for the sphere problem.
//!
//! | stepper                      | lives on | kind                   |
//! |------------------------------|----------|------------------------|
//! | [`step_hopf`]                | (S³)ᴺ    | implicit midpoint      |
//! | [`step_midpoint_s2`]         | (S²)ᴺ    | implicit midpoint      |
//! | [`step_rk4_projected`]       | (S²)ᴺ    | explicit + projection  |
//! | [`step_rk2_projected`]       | (S²)ᴺ    | explicit + projection  |
//! | [`step_lie_poisson`]         | (S²)ᴺ    | implicit, rotations    |
//! | [`step_trapezoid_twostep`]   | (S³)ᴺ    | explicit two-step      |
//!
//! Implicit equations are solved by [`solve_implicit`]: fixed-point iteration
//! from the current state, with a damped Newton iteration as fallback when
//! the map stops contracting (close vortex encounters at large h).

use crate::su2::{hermitian_inner, ComplexPair};
use crate::vortex::{
    grad_energy_at, grad_energy_lifted_at, vector_field_at, LiftedState, Regularization,
    SphereState,
};
use crate::{Complex64, Result, Vec3, VortexError};

/// Stopping rule for the implicit solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Bound on the max-norm of the last iterate update.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-13,
            max_iterations: 200,
        }
    }
}

impl SolverConfig {
    pub fn new(tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(tolerance > 0.0) || max_iterations == 0 {
            return Err(VortexError::Config(format!(
                "solver needs tolerance > 0 and max_iterations >= 1 (got {tolerance}, {max_iterations})"
            )));
        }
        Ok(Self {
            tolerance,
            max_iterations,
        })
    }
}

/// Accepted solution of an implicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<S> {
    pub state: S,
    pub iterations: usize,
    pub residual: f64,
}

/// `f64::max` that returns NaN if either argument is NaN.
pub(crate) fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Max-norm distance used as the fixed-point stopping criterion. NaN
/// anywhere gives NaN.
pub trait MaxNormDistance {
    fn max_norm_distance(&self, other: &Self) -> f64;
}

impl MaxNormDistance for f64 {
    fn max_norm_distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

impl MaxNormDistance for Vec3 {
    fn max_norm_distance(&self, other: &Self) -> f64 {
        (self - other).iter().fold(0.0, |m, d| nan_max(m, d.abs()))
    }
}

impl MaxNormDistance for ComplexPair {
    fn max_norm_distance(&self, other: &Self) -> f64 {
        let d = *self - *other;
        [d.z.re, d.z.im, d.u.re, d.u.im].iter().fold(0.0, |m, x| nan_max(m, x.abs()))
    }
}

impl MaxNormDistance for Complex64 {
    fn max_norm_distance(&self, other: &Self) -> f64 {
        let d = self - other;
        nan_max(d.re.abs(), d.im.abs())
    }
}

impl<T: MaxNormDistance> MaxNormDistance for Vec<T> {
    fn max_norm_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len());
        self.iter()
            .zip(other)
            .map(|(a, b)| a.max_norm_distance(b))
            .fold(0.0, nan_max)
    }
}

/// Iterate `x ← map(x)` from `guess` until the update is below tolerance
/// and so is the contraction estimate r·q/(1 − q) of the remaining error.
/// q is taken over two iterations, q² = r_k / r_{k−2}, because the updates of
/// the midpoint maps rotate. When the updates stop shrinking (q ≥ 1) the
/// iteration has reached rounding level and the update bound alone is used.
pub fn solve_fixed_point<S, F>(mut map: F, guess: S, cfg: &SolverConfig) -> Result<StepRecord<S>>
where
    S: MaxNormDistance,
    F: FnMut(&S) -> Result<S>,
{
    let mut current = guess;
    let mut residual = f64::INFINITY;
    let mut earlier = [f64::INFINITY; 2];
    for iteration in 1..=cfg.max_iterations {
        let next = map(&current)?;
        earlier = [earlier[1], residual];
        residual = next.max_norm_distance(&current);
        current = next;
        if !residual.is_finite() {
            break;
        }
        let q = (residual / earlier[0]).sqrt();
        let remaining = if q < 1.0 { residual * q / (1.0 - q) } else { 0.0 };
        if residual <= cfg.tolerance && remaining <= cfg.tolerance {
            return Ok(StepRecord {
                state: current,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(VortexError::Convergence {
        iterations: cfg.max_iterations,
        residual,
    })
}

/// Flat real coordinates of an iterate, for the Newton fallback.
pub trait Flatten: Sized {
    fn flatten(&self) -> Vec<f64>;
    /// Rebuild from coordinates laid out like `self.flatten()`.
    fn unflatten(&self, flat: &[f64]) -> Self;
}

impl Flatten for f64 {
    fn flatten(&self) -> Vec<f64> {
        vec![*self]
    }

    fn unflatten(&self, flat: &[f64]) -> Self {
        flat[0]
    }
}

impl Flatten for Vec<Vec3> {
    fn flatten(&self) -> Vec<f64> {
        self.iter().flat_map(|v| [v[0], v[1], v[2]]).collect()
    }

    fn unflatten(&self, flat: &[f64]) -> Self {
        flat.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect()
    }
}

impl Flatten for Vec<ComplexPair> {
    fn flatten(&self) -> Vec<f64> {
        self.iter().flat_map(|p| [p.z.re, p.z.im, p.u.re, p.u.im]).collect()
    }

    fn unflatten(&self, flat: &[f64]) -> Self {
        flat.chunks_exact(4)
            .map(|c| ComplexPair::from_reals(c[0], c[1], c[2], c[3]))
            .collect()
    }
}

impl Flatten for Vec<Complex64> {
    fn flatten(&self) -> Vec<f64> {
        self.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    fn unflatten(&self, flat: &[f64]) -> Self {
        flat.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| nan_max(m, x.abs()))
}

/// Newton's method on F(x) = map(x) − x with a central-difference Jacobian
/// and step halving on max|F|. Stops when the Newton update or, after the
/// first update, max|F| is below tolerance.
pub fn solve_newton<S, F>(mut map: F, guess: S, cfg: &SolverConfig) -> Result<StepRecord<S>>
where
    S: Flatten,
    F: FnMut(&S) -> Result<S>,
{
    use nalgebra::{DMatrix, DVector};

    let mut residual_of = |x: &[f64], shape: &S| -> Result<Vec<f64>> {
        let image = map(&shape.unflatten(x))?.flatten();
        Ok(image.iter().zip(x).map(|(a, b)| a - b).collect())
    };
    let mut x = guess.flatten();
    let dim = x.len();
    let mut fx = residual_of(&x, &guess)?;
    let mut last = f64::INFINITY;
    for iteration in 1..=cfg.max_iterations {
        let mut jac = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let eps = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += eps;
            xm[j] -= eps;
            let (fp, fm) = (residual_of(&xp, &guess)?, residual_of(&xm, &guess)?);
            for i in 0..dim {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * eps);
            }
        }
        let rhs = -DVector::from_column_slice(&fx);
        let delta = jac.lu().solve(&rhs).ok_or(VortexError::Convergence {
            iterations: iteration,
            residual: max_abs(&fx),
        })?;
        let start = max_abs(&fx);
        if start <= cfg.tolerance && iteration > 1 {
            return Ok(StepRecord {
                state: guess.unflatten(&x),
                iterations: iteration,
                residual: start,
            });
        }
        let mut lambda = 1.0;
        let (x_new, f_new) = loop {
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Ok(f) = residual_of(&trial, &guess) {
                if max_abs(&f) < start || start == 0.0 {
                    break (trial, f);
                }
            }
            lambda *= 0.5;
            if lambda < 1e-3 {
                return Err(VortexError::Convergence {
                    iterations: iteration,
                    residual: start,
                });
            }
        };
        last = lambda * max_abs(delta.as_slice());
        x = x_new;
        fx = f_new;
        if !last.is_finite() {
            break;
        }
        if last <= cfg.tolerance {
            return Ok(StepRecord {
                state: guess.unflatten(&x),
                iterations: iteration,
                residual: last,
            });
        }
    }
    Err(VortexError::Convergence {
        iterations: cfg.max_iterations,
        residual: last,
    })
}

/// Fixed-point iteration, falling back to [`solve_newton`] from the same
/// guess if it fails. Iteration counts of both phases are added.
pub fn solve_implicit<S, F>(mut map: F, guess: S, cfg: &SolverConfig) -> Result<StepRecord<S>>
where
    S: MaxNormDistance + Flatten + Clone,
    F: FnMut(&S) -> Result<S>,
{
    let mut calls = 0;
    let mut counted = |x: &S| {
        calls += 1;
        map(x)
    };
    match solve_fixed_point(&mut counted, guess.clone(), cfg) {
        Ok(rec) => Ok(rec),
        Err(VortexError::Convergence { .. } | VortexError::Singularity { .. }) if cfg.max_iterations > 1 => {
            let spent = calls;
            let rec = solve_newton(map, guess, cfg)?;
            Ok(StepRecord {
                iterations: rec.iterations + spent,
                ..rec
            })
        }
        Err(e) => Err(e),
    }
}

fn require_nonzero_strengths(strengths: &[f64]) -> Result<()> {
    match strengths.iter().position(|g| *g == 0.0) {
        Some(k) => Err(VortexError::Domain(format!(
            "vortex {k} has zero strength; this stepper divides by Γ"
        ))),
        None => Ok(()),
    }
}

fn midpoints<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    a.iter().zip(b).map(|(x, y)| (*x + *y) * 0.5).collect()
}

/// Hopf variational integrator: solves
/// −iΓ_k(φ_k⁺ − φ_k) + (h/2) ∂H/∂φ_k†(φ^{n+1/2}) = 0 with φ^{n+1/2} the
/// arithmetic midpoint. No re-normalization is applied.
pub fn step_hopf(
    s: &LiftedState,
    h: f64,
    reg: Regularization,
    cfg: &SolverConfig,
) -> Result<StepRecord<LiftedState>> {
    require_nonzero_strengths(&s.strengths)?;
    // φ⁺ = φ − i h/(2Γ) G(mid)
    let coeffs: Vec<Complex64> = s
        .strengths
        .iter()
        .map(|g| Complex64::new(0.0, -h / (2.0 * g)))
        .collect();
    let record = solve_implicit(
        |next: &Vec<ComplexPair>| {
            let mid = midpoints(&s.pairs, next);
            let grad = grad_energy_lifted_at(&s.strengths, &mid, reg)?;
            Ok(s.pairs
                .iter()
                .zip(&grad)
                .zip(&coeffs)
                .map(|((p, g), c)| *p + g.scale(*c))
                .collect())
        },
        s.pairs.clone(),
        cfg,
    )?;
    Ok(StepRecord {
        state: LiftedState::from_parts(s.strengths.clone(), record.state),
        iterations: record.iterations,
        residual: record.residual,
    })
}

/// Implicit midpoint rule applied to the vortex equations in ℝ³.
pub fn step_midpoint_s2(
    s: &SphereState,
    h: f64,
    reg: Regularization,
    cfg: &SolverConfig,
) -> Result<StepRecord<SphereState>> {
    let record = solve_implicit(
        |next: &Vec<Vec3>| {
            let mid = midpoints(&s.positions, next);
            let vel = vector_field_at(&s.strengths, &mid, reg)?;
            Ok(s.positions.iter().zip(&vel).map(|(x, v)| x + v * h).collect())
        },
        s.positions.clone(),
        cfg,
    )?;
    Ok(StepRecord {
        state: SphereState::from_parts(s.strengths.clone(), record.state),
        iterations: record.iterations,
        residual: record.residual,
    })
}

fn axpy(base: &[Vec3], dir: &[Vec3], scale: f64) -> Vec<Vec3> {
    base.iter().zip(dir).map(|(x, v)| x + v * scale).collect()
}

fn normalized(strengths: &[f64], positions: Vec<Vec3>) -> SphereState {
    SphereState::from_parts(
        strengths.to_vec(),
        positions.into_iter().map(|x| x.normalize()).collect(),
    )
}

/// Classical RK4 in ℝ³, then each position is normalized once.
pub fn step_rk4_projected(s: &SphereState, h: f64, reg: Regularization) -> Result<SphereState> {
    let g = &s.strengths;
    let x = &s.positions;
    let k1 = vector_field_at(g, x, reg)?;
    let k2 = vector_field_at(g, &axpy(x, &k1, h / 2.0), reg)?;
    let k3 = vector_field_at(g, &axpy(x, &k2, h / 2.0), reg)?;
    let k4 = vector_field_at(g, &axpy(x, &k3, h), reg)?;
    let out = (0..x.len())
        .map(|k| x[k] + (k1[k] + k2[k] * 2.0 + k3[k] * 2.0 + k4[k]) * (h / 6.0))
        .collect();
    Ok(normalized(g, out))
}

/// Heun's method in ℝ³, then each position is normalized once.
pub fn step_rk2_projected(s: &SphereState, h: f64, reg: Regularization) -> Result<SphereState> {
    let g = &s.strengths;
    let x = &s.positions;
    let k1 = vector_field_at(g, x, reg)?;
    let k2 = vector_field_at(g, &axpy(x, &k1, h), reg)?;
    let out = (0..x.len())
        .map(|k| x[k] + (k1[k] + k2[k]) * (h / 2.0))
        .collect();
    Ok(normalized(g, out))
}

/// Rotate `x` by the rotation vector `xi` (Rodrigues form).
pub fn rotate(xi: &Vec3, x: &Vec3) -> Vec3 {
    let theta2 = xi.norm_squared();
    let kx = xi.cross(x);
    let (a, b) = if theta2 < 1e-8 {
        // series of sin θ/θ and (1 − cos θ)/θ²
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    x + kx * a + xi.cross(&kx) * b
}

/// Symmetric Lie–Poisson step: x_k⁺ = R(ξ_k) x_k with
/// ξ_k = h/(2Γ_k) (∇_k H(x) + ∇_k H(x⁺)), solved self-consistently.
pub fn step_lie_poisson(
    s: &SphereState,
    h: f64,
    reg: Regularization,
    cfg: &SolverConfig,
) -> Result<StepRecord<SphereState>> {
    require_nonzero_strengths(&s.strengths)?;
    let g0 = grad_energy_at(&s.strengths, &s.positions, reg)?;
    let record = solve_implicit(
        |next: &Vec<Vec3>| {
            let g1 = grad_energy_at(&s.strengths, next, reg)?;
            Ok((0..next.len())
                .map(|k| {
                    let xi = (g0[k] + g1[k]) * (h / (2.0 * s.strengths[k]));
                    rotate(&xi, &s.positions[k])
                })
                .collect())
        },
        s.positions.clone(),
        cfg,
    )?;
    Ok(StepRecord {
        state: SphereState::from_parts(s.strengths.clone(), record.state),
        iterations: record.iterations,
        residual: record.residual,
    })
}

/// Two-step scheme from the trapezoid discrete Lagrangian:
/// −iΓ_k(φ_k⁺ − φ_k⁻) + h ∂H/∂φ_k†(φ) = h λ_k φ_k, with the real multiplier
/// λ_k chosen as the smallest-magnitude root that makes ‖φ_k⁺‖ = 1.
pub fn step_trapezoid_twostep(
    prev: &LiftedState,
    curr: &LiftedState,
    h: f64,
    reg: Regularization,
) -> Result<LiftedState> {
    if prev.len() != curr.len() {
        return Err(VortexError::InvalidState("consecutive states differ in size".into()));
    }
    require_nonzero_strengths(&curr.strengths)?;
    let grad = grad_energy_lifted_at(&curr.strengths, &curr.pairs, reg)?;
    let mut out = Vec::with_capacity(curr.len());
    for k in 0..curr.len() {
        let gamma = curr.strengths[k];
        // φ⁺ = w + λ v with w = φ⁻ − i(h/Γ)G, v = i(h/Γ)φ
        let c = Complex64::new(0.0, h / gamma);
        let w = prev.pairs[k] - grad[k].scale(c);
        let v = curr.pairs[k].scale(c);
        let qa = v.norm_sqr();
        let qb = 2.0 * hermitian_inner(&w, &v).re;
        let qc = w.norm_sqr() - 1.0;
        let lambda = if qa == 0.0 {
            0.0
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return Err(VortexError::StepFailure(format!(
                    "no real multiplier keeps vortex {k} on S³ (discriminant {disc:e})"
                )));
            }
            // stable form of the smaller root
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            if q == 0.0 {
                0.0
            } else {
                let r1 = q / qa;
                let r2 = qc / q;
                if r1.abs() < r2.abs() {
                    r1
                } else {
                    r2
                }
            }
        };
        out.push(w + v * lambda);
    }
    Ok(LiftedState::from_parts(curr.strengths.clone(), out))
}
