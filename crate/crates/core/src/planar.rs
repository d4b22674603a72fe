//! Point vortices in the plane and the α-family of two-step variational
//! integrators.
//!
//! The velocity used throughout is ż_α = −(2i/Γ_α) ∂H/∂z_α*, the usual
//! Biot–Savart velocity (i/2π) Σ_β Γ_β / conj(z_α − z_β).

use std::f64::consts::PI;

use crate::integrators::{solve_implicit, SolverConfig, StepRecord};
use crate::vortex::SINGULAR_THRESHOLD;
use crate::{Complex64, Result, VortexError};

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarState {
    pub strengths: Vec<f64>,
    pub positions: Vec<Complex64>,
}

impl PlanarState {
    pub fn new(strengths: Vec<f64>, positions: Vec<Complex64>) -> Result<Self> {
        if strengths.is_empty() || strengths.len() != positions.len() {
            return Err(VortexError::InvalidState(format!(
                "{} strengths and {} positions",
                strengths.len(),
                positions.len()
            )));
        }
        if positions.iter().any(|z| !z.is_finite()) {
            return Err(VortexError::InvalidState("non-finite position".into()));
        }
        Ok(Self {
            strengths,
            positions,
        })
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    fn with_positions(&self, positions: Vec<Complex64>) -> Self {
        Self {
            strengths: self.strengths.clone(),
            positions,
        }
    }
}

fn squared_distance(z: &[Complex64], i: usize, j: usize) -> Result<f64> {
    let d2 = (z[i] - z[j]).norm_sqr();
    if !(d2 >= SINGULAR_THRESHOLD) {
        return Err(VortexError::Singularity { i, j, value: d2 });
    }
    Ok(d2)
}

/// H = −(1/4π) Σ_{α<β} Γ_α Γ_β log|z_α − z_β|².
pub fn planar_energy(s: &PlanarState) -> Result<f64> {
    let z = &s.positions;
    let mut acc = 0.0;
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            acc += s.strengths[i] * s.strengths[j] * squared_distance(z, i, j)?.ln();
        }
    }
    Ok(-acc / (4.0 * PI))
}

fn rhs_at(strengths: &[f64], z: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = z.len();
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in (i + 1)..n {
            squared_distance(z, i, j)?;
            let w = Complex64::new(0.0, 1.0 / (2.0 * PI)) / (z[i] - z[j]).conj();
            v[i] += w * strengths[j];
            v[j] -= w * strengths[i];
        }
    }
    Ok(v)
}

/// Vortex velocities ż_α.
pub fn planar_rhs(s: &PlanarState) -> Result<Vec<Complex64>> {
    rhs_at(&s.strengths, &s.positions)
}

/// Linear impulse Σ Γ z and angular impulse Σ Γ |z|².
pub fn planar_impulse(s: &PlanarState) -> (Complex64, f64) {
    s.strengths
        .iter()
        .zip(&s.positions)
        .fold((Complex64::new(0.0, 0.0), 0.0), |(lin, ang), (g, z)| {
            (lin + z * *g, ang + g * z.norm_sqr())
        })
}

fn blend(a: &[Complex64], b: &[Complex64], wa: f64, wb: f64) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * wa + y * wb).collect()
}

/// z^{n+2} from (z^n, z^{n+1}) by
/// (z^{n+2} − z^n)/(2h) = α f(z^{n+α}) + (1−α) f(z^{n+1+α}),
/// z^{n+α} = (1−α)z^n + αz^{n+1}. Explicit for α ∈ {0, 1}.
pub fn step_alpha(
    prev: &PlanarState,
    curr: &PlanarState,
    alpha: f64,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StepRecord<PlanarState>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(VortexError::Domain(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if prev.len() != curr.len() || prev.strengths != curr.strengths {
        return Err(VortexError::InvalidState(
            "consecutive states must carry the same vortices".into(),
        ));
    }
    let g = &curr.strengths;
    let (z0, z1) = (&prev.positions, &curr.positions);
    if alpha == 0.0 || alpha == 1.0 {
        let f = rhs_at(g, z1)?;
        let next = z0.iter().zip(&f).map(|(a, v)| a + v * (2.0 * h)).collect();
        return Ok(StepRecord {
            state: curr.with_positions(next),
            iterations: 0,
            residual: 0.0,
        });
    }
    let f_first = rhs_at(g, &blend(z0, z1, 1.0 - alpha, alpha))?;
    let record = solve_implicit(
        |z2: &Vec<Complex64>| {
            let f_second = rhs_at(g, &blend(z1, z2, 1.0 - alpha, alpha))?;
            Ok((0..z0.len())
                .map(|k| z0[k] + (f_first[k] * alpha + f_second[k] * (1.0 - alpha)) * (2.0 * h))
                .collect())
        },
        z1.clone(),
        cfg,
    )?;
    Ok(StepRecord {
        state: curr.with_positions(record.state),
        iterations: record.iterations,
        residual: record.residual,
    })
}

/// Implicit midpoint rule (z^{n+1} − z^n)/h = f((z^n + z^{n+1})/2).
pub fn step_midpoint_plane(s: &PlanarState, h: f64, cfg: &SolverConfig) -> Result<StepRecord<PlanarState>> {
    let z0 = &s.positions;
    let record = solve_implicit(
        |z1: &Vec<Complex64>| {
            let f = rhs_at(&s.strengths, &blend(z0, z1, 0.5, 0.5))?;
            Ok(z0.iter().zip(&f).map(|(a, v)| a + v * h).collect())
        },
        z0.clone(),
        cfg,
    )?;
    Ok(StepRecord {
        state: s.with_positions(record.state),
        iterations: record.iterations,
        residual: record.residual,
    })
}
