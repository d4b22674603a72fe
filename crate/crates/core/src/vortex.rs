//! Vortex states, Hamiltonians on S² and on the lifted space (S³)ᴺ, their
//! gradients, and the point-vortex vector field.
//!
//! All pair sums run over i < j in lexicographic order so that repeated
//! evaluations are bit-identical.

use std::f64::consts::PI;

use crate::su2::{hermitian_inner, hopf_lift, ComplexPair};
use crate::{Result, Vec3, VortexError};

/// Denominators and log arguments below this are reported as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-14;

const UNIT_TOLERANCE: f64 = 1e-10;

/// Cutoff σ ≥ 0 added to pairwise distances.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Regularization(f64);

impl Regularization {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(VortexError::Domain(format!(
                "regularization must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(Self(sigma))
    }

    pub const fn none() -> Self {
        Self(0.0)
    }

    pub fn sigma(&self) -> f64 {
        self.0
    }

    pub fn sigma_sqr(&self) -> f64 {
        self.0 * self.0
    }
}

/// N vortices on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereState {
    pub strengths: Vec<f64>,
    pub positions: Vec<Vec3>,
}

impl SphereState {
    pub fn new(strengths: Vec<f64>, positions: Vec<Vec3>) -> Result<Self> {
        check_lengths(strengths.len(), positions.len())?;
        for (k, x) in positions.iter().enumerate() {
            let n = x.norm();
            if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
                return Err(VortexError::InvalidState(format!(
                    "vortex {k} is off the unit sphere (norm {n})"
                )));
            }
        }
        Ok(Self {
            strengths,
            positions,
        })
    }

    /// Build a state without the unit-length check; integrators that do not
    /// project use this for their outputs.
    pub(crate) fn from_parts(strengths: Vec<f64>, positions: Vec<Vec3>) -> Self {
        Self {
            strengths,
            positions,
        }
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    /// Lift every vortex to S³ through the local Hopf section.
    pub fn lift(&self) -> Result<LiftedState> {
        let pairs = self
            .positions
            .iter()
            .map(hopf_lift)
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftedState::from_parts(self.strengths.clone(), pairs))
    }
}

/// N vortices lifted to S³.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedState {
    pub strengths: Vec<f64>,
    pub pairs: Vec<ComplexPair>,
}

impl LiftedState {
    pub fn new(strengths: Vec<f64>, pairs: Vec<ComplexPair>) -> Result<Self> {
        check_lengths(strengths.len(), pairs.len())?;
        for (k, p) in pairs.iter().enumerate() {
            let n = p.norm();
            if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
                return Err(VortexError::InvalidState(format!(
                    "pair {k} is off S³ (norm {n})"
                )));
            }
        }
        Ok(Self { strengths, pairs })
    }

    pub(crate) fn from_parts(strengths: Vec<f64>, pairs: Vec<ComplexPair>) -> Self {
        Self { strengths, pairs }
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    /// Hopf projection of every pair (formula as written, no normalization).
    pub fn project(&self) -> SphereState {
        SphereState::from_parts(
            self.strengths.clone(),
            self.pairs.iter().map(ComplexPair::project).collect(),
        )
    }
}

fn check_lengths(strengths: usize, points: usize) -> Result<()> {
    if strengths == 0 {
        return Err(VortexError::InvalidState("a state needs at least one vortex".into()));
    }
    if strengths != points {
        return Err(VortexError::InvalidState(format!(
            "{strengths} strengths but {points} positions"
        )));
    }
    Ok(())
}

fn log_argument(i: usize, j: usize, value: f64) -> Result<f64> {
    if !(value >= SINGULAR_THRESHOLD) {
        return Err(VortexError::Singularity { i, j, value });
    }
    Ok(value)
}

/// H = −(1/4π) Σ_{i<j} Γ_i Γ_j log(2σ² + l_ij²), l_ij the chord distance.
pub fn energy_sphere(s: &SphereState, reg: Regularization) -> Result<f64> {
    energy_at(&s.strengths, &s.positions, reg)
}

/// [`energy_sphere`] on raw positions, which need not be unit length.
pub fn energy_at(strengths: &[f64], positions: &[Vec3], reg: Regularization) -> Result<f64> {
    let two_s2 = 2.0 * reg.sigma_sqr();
    let mut sum = 0.0;
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let arg = log_argument(i, j, two_s2 + (positions[i] - positions[j]).norm_squared())?;
            sum += strengths[i] * strengths[j] * arg.ln();
        }
    }
    Ok(-sum / (4.0 * PI))
}

/// Ambient gradient ∇_{x_i} H of [`energy_sphere`].
pub fn grad_energy_sphere(s: &SphereState, reg: Regularization) -> Result<Vec<Vec3>> {
    grad_energy_at(&s.strengths, &s.positions, reg)
}

pub fn grad_energy_at(strengths: &[f64], positions: &[Vec3], reg: Regularization) -> Result<Vec<Vec3>> {
    let two_s2 = 2.0 * reg.sigma_sqr();
    let n = positions.len();
    let mut grad = vec![Vec3::zeros(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = positions[i] - positions[j];
            let arg = log_argument(i, j, two_s2 + d.norm_squared())?;
            let term = d * (-strengths[i] * strengths[j] / (2.0 * PI * arg));
            grad[i] += term;
            grad[j] -= term;
        }
    }
    Ok(grad)
}

/// ẋ_k = (1/4π) Σ_{j≠k} Γ_j (x_j × x_k) / (1 + σ² − x_k·x_j).
pub fn vector_field(s: &SphereState, reg: Regularization) -> Result<Vec<Vec3>> {
    vector_field_at(&s.strengths, &s.positions, reg)
}

/// [`vector_field`] on raw positions; the midpoint method evaluates it off
/// the sphere.
pub fn vector_field_at(strengths: &[f64], positions: &[Vec3], reg: Regularization) -> Result<Vec<Vec3>> {
    let one_s2 = 1.0 + reg.sigma_sqr();
    let n = positions.len();
    let mut vel = vec![Vec3::zeros(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let denom = one_s2 - positions[i].dot(&positions[j]);
            if !(denom >= SINGULAR_THRESHOLD) {
                return Err(VortexError::Singularity { i, j, value: denom });
            }
            // x_j × x_i drives i; x_i × x_j drives j.
            let c = positions[j].cross(&positions[i]) / (4.0 * PI * denom);
            vel[i] += c * strengths[j];
            vel[j] -= c * strengths[i];
        }
    }
    Ok(vel)
}

/// H on (S³)ᴺ: −(1/4π) Σ_{i<j} Γ_i Γ_j log[2σ² + 4(1 − |⟨φ_i, φ_j⟩|²)].
pub fn energy_lifted(s: &LiftedState, reg: Regularization) -> Result<f64> {
    energy_lifted_at(&s.strengths, &s.pairs, reg)
}

pub fn energy_lifted_at(strengths: &[f64], pairs: &[ComplexPair], reg: Regularization) -> Result<f64> {
    let two_s2 = 2.0 * reg.sigma_sqr();
    let mut sum = 0.0;
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let c2 = hermitian_inner(&pairs[i], &pairs[j]).norm_sqr().clamp(0.0, 1.0);
            let arg = log_argument(i, j, two_s2 + 4.0 * (1.0 - c2))?;
            sum += strengths[i] * strengths[j] * arg.ln();
        }
    }
    Ok(-sum / (4.0 * PI))
}

/// Wirtinger derivative ∂H/∂φ_i† of [`energy_lifted`], with φ and φ† treated
/// as independent. The directional derivative along δφ is 2 Re[δφ† · G].
///
/// Pair (i, j) contributes (Γ_i Γ_j / π) φ_j ⟨φ_j, φ_i⟩ / arg_ij to G_i.
pub fn grad_energy_lifted(s: &LiftedState, reg: Regularization) -> Result<Vec<ComplexPair>> {
    grad_energy_lifted_at(&s.strengths, &s.pairs, reg)
}

pub fn grad_energy_lifted_at(
    strengths: &[f64],
    pairs: &[ComplexPair],
    reg: Regularization,
) -> Result<Vec<ComplexPair>> {
    let two_s2 = 2.0 * reg.sigma_sqr();
    let n = pairs.len();
    let mut grad = vec![ComplexPair::ZERO; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let cij = hermitian_inner(&pairs[i], &pairs[j]);
            let c2 = cij.norm_sqr().clamp(0.0, 1.0);
            let arg = log_argument(i, j, two_s2 + 4.0 * (1.0 - c2))?;
            let w = strengths[i] * strengths[j] / (PI * arg);
            // ⟨φ_j, φ_i⟩ = conj(⟨φ_i, φ_j⟩)
            grad[i] = grad[i] + pairs[j].scale(cij.conj() * w);
            grad[j] = grad[j] + pairs[i].scale(cij * w);
        }
    }
    Ok(grad)
}

/// Vortex moment M = Σ Γ_i x_i.
pub fn vortex_moment(s: &SphereState) -> Vec3 {
    s.strengths
        .iter()
        .zip(&s.positions)
        .fold(Vec3::zeros(), |acc, (g, x)| acc + x * *g)
}
