//! Benchmark initial conditions.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::planar::PlanarState;
use crate::vortex::{vector_field, Regularization, SphereState};
use crate::{Complex64, Result, Vec3, VortexError};

/// Names accepted by [`ScenarioSpec::new`].
pub const SCENARIO_NAMES: [&str; 5] = ["pd-ring", "karman-street", "collapse3", "vortex-sheet", "planar-four"];

fn ring_point(colatitude: f64, azimuth: f64) -> Vec3 {
    let (st, ct) = colatitude.sin_cos();
    Vec3::new(st * azimuth.cos(), st * azimuth.sin(), ct)
}

/// A ring of identical vortices at fixed colatitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdRing {
    pub n: usize,
    pub gamma: f64,
    pub theta0: f64,
}

impl Default for PdRing {
    fn default() -> Self {
        Self {
            n: 6,
            gamma: 1.0 / 6.0,
            theta0: 0.40,
        }
    }
}

impl PdRing {
    pub fn new(n: usize, gamma: f64, theta0: f64) -> Result<Self> {
        if n < 2 || !(theta0 > 0.0 && theta0 < PI) {
            return Err(VortexError::Domain(format!(
                "ring needs n >= 2 and 0 < theta0 < pi (got n = {n}, theta0 = {theta0})"
            )));
        }
        Ok(Self { n, gamma, theta0 })
    }

    pub fn state(&self) -> SphereState {
        let positions = (0..self.n)
            .map(|k| ring_point(self.theta0, 2.0 * PI * k as f64 / self.n as f64))
            .collect();
        SphereState::new(vec![self.gamma; self.n], positions)
            .expect("ring points are unit vectors")
    }

    /// Ω = (N − 1)(Γ/4π) z₀/(1 − z₀²), z₀ = cos θ₀.
    pub fn omega(&self) -> f64 {
        let z0 = self.theta0.cos();
        (self.n as f64 - 1.0) * self.gamma / (4.0 * PI) * z0 / (1.0 - z0 * z0)
    }

    /// Rotation rate read off the vector field, valid for any cutoff.
    pub fn omega_regularized(&self, reg: Regularization) -> Result<f64> {
        let v = vector_field(&self.state(), reg)?;
        // vortex 0 sits at azimuth 0, so its velocity points along +y
        Ok(v[0][1] / self.theta0.sin())
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega()
    }

    /// Position of vortex k at time t for the given rotation rate.
    pub fn exact_position_with_rate(&self, k: usize, t: f64, omega: f64) -> Vec3 {
        ring_point(
            self.theta0,
            2.0 * PI * k as f64 / self.n as f64 + omega * t,
        )
    }

    /// Initial position of vortex k rotated about the z axis by Ω t.
    pub fn exact_position(&self, k: usize, t: f64) -> Vec3 {
        self.exact_position_with_rate(k, t, self.omega())
    }
}

pub fn make_pd_ring(n: usize, gamma: f64, theta0: f64) -> Result<SphereState> {
    Ok(PdRing::new(n, gamma, theta0)?.state())
}

pub fn pd_exact_position(ring: &PdRing, k: usize, t: f64) -> Vec3 {
    ring.exact_position(k, t)
}

/// Parameters of the two-ring street with polar vortices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KarmanStreet {
    pub n: usize,
    pub gamma: f64,
    pub colatitude: f64,
    pub north: f64,
    pub south: f64,
}

impl Default for KarmanStreet {
    fn default() -> Self {
        Self {
            n: 5,
            gamma: 1.0,
            colatitude: PI / 3.0,
            north: 0.5,
            south: -0.5,
        }
    }
}

impl KarmanStreet {
    pub fn state(&self) -> SphereState {
        let n = self.n;
        let spacing = 2.0 * PI / n as f64;
        let mut strengths = Vec::with_capacity(2 * n + 2);
        let mut positions = Vec::with_capacity(2 * n + 2);
        for k in 0..n {
            strengths.push(self.gamma);
            positions.push(ring_point(self.colatitude, spacing * k as f64));
        }
        for k in 0..n {
            strengths.push(self.gamma);
            positions.push(ring_point(PI - self.colatitude, spacing * (k as f64 + 0.5)));
        }
        strengths.push(self.north);
        positions.push(Vec3::z());
        strengths.push(self.south);
        positions.push(-Vec3::z());
        SphereState::new(strengths, positions).expect("street points are unit vectors")
    }
}

pub fn make_karman_street() -> SphereState {
    KarmanStreet::default().state()
}

/// Unit vectors with the given pairwise chords: the first at the north pole,
/// the second in the x–z plane with x > 0, the third with y > 0.
pub fn embed_triangle(l12: f64, l23: f64, l31: f64) -> Result<[Vec3; 3]> {
    // chord l ⇔ dot product 1 − l²/2
    let c12 = 1.0 - l12 * l12 / 2.0;
    let c23 = 1.0 - l23 * l23 / 2.0;
    let c13 = 1.0 - l31 * l31 / 2.0;
    let s12 = (1.0 - c12 * c12).sqrt();
    let v2 = Vec3::new(s12, 0.0, c12);
    if !(s12 > 0.0) {
        return Err(VortexError::Domain("first two vertices coincide or are antipodal".into()));
    }
    let x3 = (c23 - c12 * c13) / s12;
    let y2 = 1.0 - c13 * c13 - x3 * x3;
    if !(y2 >= 0.0) {
        return Err(VortexError::Domain(format!(
            "chords ({l12}, {l23}, {l31}) do not fit on the unit sphere"
        )));
    }
    Ok([Vec3::z(), v2, Vec3::new(x3, y2.sqrt(), c13)])
}

/// Strengths (1, 1, −1/2) with chords √3/2, √2/2, 1.
pub fn make_collapse3() -> SphereState {
    let v = embed_triangle(3.0_f64.sqrt() / 2.0, 2.0_f64.sqrt() / 2.0, 1.0)
        .expect("collapse triangle fits on the sphere");
    SphereState::new(vec![1.0, 1.0, -0.5], v.to_vec()).expect("unit vertices")
}

/// Collapse time 4π(√23 − √17) of the self-similar solution.
pub fn collapse3_time() -> f64 {
    4.0 * PI * (23.0_f64.sqrt() - 17.0_f64.sqrt())
}

pub fn make_vortex_sheet_with(n: usize, gamma: f64, z0: f64) -> Result<SphereState> {
    if n == 0 || !(z0 > -1.0 && z0 < 1.0) {
        return Err(VortexError::Domain(format!("sheet needs n >= 1 and |z0| < 1 (got {n}, {z0})")));
    }
    let theta = z0.acos();
    let positions = (0..n)
        .map(|k| ring_point(theta, 2.0 * PI * k as f64 / n as f64))
        .collect();
    SphereState::new(vec![gamma; n], positions)
}

/// 40 vortices of strength 1/8 on the circle z = 0.9.
pub fn make_vortex_sheet() -> SphereState {
    make_vortex_sheet_with(40, 1.0 / 8.0, 0.9).expect("fixed parameters are valid")
}

pub fn make_planar_four() -> PlanarState {
    PlanarState::new(
        vec![0.1, 0.3, -0.2, -0.4],
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.7, 0.6),
        ],
    )
    .expect("fixed configuration is valid")
}

/// Initial state produced by a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Sphere(SphereState),
    Planar(PlanarState),
}

/// A named scenario with numeric parameter overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
}

fn allowed_parameters(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "pd-ring" => &["n", "gamma", "theta0"],
        "karman-street" => &["n", "gamma", "colatitude", "north", "south"],
        "collapse3" => &[],
        "vortex-sheet" => &["n", "gamma", "z0"],
        "planar-four" => &[],
        _ => return None,
    })
}

fn as_count(key: &str, value: f64) -> Result<usize> {
    if value < 1.0 || value.fract() != 0.0 || !value.is_finite() {
        return Err(VortexError::Config(format!("{key} must be a positive integer, got {value}")));
    }
    Ok(value as usize)
}

impl ScenarioSpec {
    pub fn new(name: &str) -> Result<Self> {
        if allowed_parameters(name).is_none() {
            return Err(VortexError::Config(format!(
                "unknown scenario '{name}' (expected one of {})",
                SCENARIO_NAMES.join(", ")
            )));
        }
        Ok(Self {
            name: name.to_string(),
            parameters: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let allowed = allowed_parameters(&self.name).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(VortexError::Config(format!(
                "scenario '{}' has no parameter '{key}'",
                self.name
            )));
        }
        self.parameters.insert(key.to_string(), value);
        Ok(())
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.parameters.get(key).copied().unwrap_or(default)
    }

    pub fn is_planar(&self) -> bool {
        self.name == "planar-four"
    }

    /// The ring parameters when this is the pd-ring scenario.
    pub fn pd_ring(&self) -> Result<Option<PdRing>> {
        if self.name != "pd-ring" {
            return Ok(None);
        }
        let d = PdRing::default();
        let n = as_count("n", self.get("n", d.n as f64))?;
        PdRing::new(n, self.get("gamma", d.gamma), self.get("theta0", d.theta0)).map(Some)
    }

    pub fn build(&self) -> Result<Scenario> {
        match self.name.as_str() {
            "pd-ring" => Ok(Scenario::Sphere(self.pd_ring()?.expect("pd-ring").state())),
            "karman-street" => {
                let d = KarmanStreet::default();
                let street = KarmanStreet {
                    n: as_count("n", self.get("n", d.n as f64))?,
                    gamma: self.get("gamma", d.gamma),
                    colatitude: self.get("colatitude", d.colatitude),
                    north: self.get("north", d.north),
                    south: self.get("south", d.south),
                };
                if !(street.colatitude > 0.0 && street.colatitude < PI / 2.0) {
                    return Err(VortexError::Config(format!(
                        "street colatitude must lie in (0, pi/2), got {}",
                        street.colatitude
                    )));
                }
                Ok(Scenario::Sphere(street.state()))
            }
            "collapse3" => Ok(Scenario::Sphere(make_collapse3())),
            "vortex-sheet" => Ok(Scenario::Sphere(make_vortex_sheet_with(
                as_count("n", self.get("n", 40.0))?,
                self.get("gamma", 1.0 / 8.0),
                self.get("z0", 0.9),
            )?)),
            "planar-four" => Ok(Scenario::Planar(make_planar_four())),
            other => Err(VortexError::Config(format!("unknown scenario '{other}'"))),
        }
    }
}
