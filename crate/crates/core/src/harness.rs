//! Simulation driver: configuration, time stepping with diagnostics, CSV and
//! JSON output, and convergence studies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::integrators::{
    step_hopf, step_lie_poisson, step_midpoint_s2, step_rk2_projected, step_rk4_projected,
    step_trapezoid_twostep, SolverConfig,
};
use crate::lifted_general::{step_general, VortexHamiltonian};
use crate::planar::{planar_energy, planar_impulse, step_alpha, step_midpoint_plane, PlanarState};
use crate::scenarios::{Scenario, ScenarioSpec};
use crate::vortex::{energy_sphere, vortex_moment, LiftedState, Regularization, SphereState};
use crate::{Result, Vec3, VortexError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegratorKind {
    Hopf,
    MidpointS2,
    Rk4,
    Rk2,
    LiePoisson,
    HopfTrapezoid,
    HopfGeneral,
    PlanarAlpha,
    PlanarMidpoint,
}

impl IntegratorKind {
    pub const ALL: [IntegratorKind; 9] = [
        Self::Hopf,
        Self::MidpointS2,
        Self::Rk4,
        Self::Rk2,
        Self::LiePoisson,
        Self::HopfTrapezoid,
        Self::HopfGeneral,
        Self::PlanarAlpha,
        Self::PlanarMidpoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Hopf => "hopf",
            Self::MidpointS2 => "midpoint-s2",
            Self::Rk4 => "rk4",
            Self::Rk2 => "rk2",
            Self::LiePoisson => "lie-poisson",
            Self::HopfTrapezoid => "hopf-trapezoid",
            Self::HopfGeneral => "hopf-general",
            Self::PlanarAlpha => "planar-alpha",
            Self::PlanarMidpoint => "planar-midpoint",
        }
    }

    pub fn is_planar(self) -> bool {
        matches!(self, Self::PlanarAlpha | Self::PlanarMidpoint)
    }

    /// Whether the integrator advances states on (S³)ᴺ.
    pub fn is_lifted(self) -> bool {
        matches!(self, Self::Hopf | Self::HopfTrapezoid | Self::HopfGeneral)
    }
}

impl FromStr for IntegratorKind {
    type Err = VortexError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                VortexError::Config(format!("unknown integrator '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

impl std::fmt::Display for IntegratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scenario: ScenarioSpec,
    pub integrator: IntegratorKind,
    pub h: f64,
    pub sigma: f64,
    pub t_max: f64,
    pub output_every: usize,
    pub solver: SolverConfig,
    pub output: Option<PathBuf>,
    /// Interpolation parameter of the planar two-step family.
    pub alpha: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSpec::new("pd-ring").expect("known scenario"),
            integrator: IntegratorKind::Hopf,
            h: 0.1,
            sigma: 0.0,
            t_max: 100.0,
            output_every: 10,
            solver: SolverConfig::default(),
            output: None,
            alpha: 0.9,
            seed: 0,
        }
    }
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| VortexError::Config(format!("cannot parse '{value}' for key '{key}'")))
}

impl SimConfig {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                VortexError::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
            })?;
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }
        let mut cfg = Self::default();
        // the scenario resets its parameters, so apply it first
        if let Some((_, name)) = entries.iter().rev().find(|(k, _)| k == "scenario") {
            cfg.set("scenario", name)?;
        }
        for (key, value) in entries.iter().filter(|(k, _)| k != "scenario") {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| VortexError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = ScenarioSpec::new(value)?,
            "integrator" => self.integrator = value.parse()?,
            "h" => self.h = parse_number(key, value)?,
            "sigma" => self.sigma = parse_number(key, value)?,
            "t_max" => self.t_max = parse_number(key, value)?,
            "output_every" => self.output_every = parse_number(key, value)?,
            "tolerance" => self.solver.tolerance = parse_number(key, value)?,
            "max_iterations" => self.solver.max_iterations = parse_number(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "alpha" => self.alpha = parse_number(key, value)?,
            "seed" => self.seed = parse_number(key, value)?,
            _ => match key.strip_prefix("scenario.") {
                Some(param) => self.scenario.set(param, parse_number(key, value)?)?,
                None => return Err(VortexError::Config(format!("unknown key '{key}'"))),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(VortexError::Config(msg));
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("h must be positive, got {}", self.h));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be non-negative, got {}", self.sigma));
        }
        if self.output_every == 0 {
            return bad("output_every must be at least 1".into());
        }
        SolverConfig::new(self.solver.tolerance, self.solver.max_iterations)?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if self.integrator.is_planar() != self.scenario.is_planar() {
            return bad(format!(
                "integrator '{}' cannot run scenario '{}'",
                self.integrator, self.scenario.name
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.h).round() as usize
    }

    pub fn regularization(&self) -> Result<Regularization> {
        Regularization::new(self.sigma)
    }
}

/// Diagnostics at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    pub energy_error: f64,
    pub moment: [f64; 3],
    pub moment_error: f64,
    /// x, y, z per vortex, or re, im per vortex for planar runs.
    pub positions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub integrator: String,
    pub scenario: String,
    pub steps: usize,
    pub final_time: f64,
    pub max_abs_energy_error: f64,
    pub max_moment_error: f64,
    pub wall_time_seconds: f64,
    pub total_solver_iterations: usize,
}

/// Internal integrator state.
enum Stepper {
    Sphere(SphereState),
    Lifted {
        prev: Option<LiftedState>,
        curr: LiftedState,
    },
    Planar {
        prev: Option<PlanarState>,
        curr: PlanarState,
    },
}

/// A running simulation, advanced one step at a time.
pub struct Simulation {
    cfg: SimConfig,
    reg: Regularization,
    stepper: Stepper,
    step: usize,
    energy0: f64,
    moment0: Vec3,
    iterations: usize,
    general: Option<VortexHamiltonian>,
}

impl Simulation {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let reg = cfg.regularization()?;
        let stepper = match cfg.scenario.build()? {
            Scenario::Sphere(s) if cfg.integrator.is_lifted() => Stepper::Lifted {
                prev: None,
                curr: s.lift()?,
            },
            Scenario::Sphere(s) => Stepper::Sphere(s),
            Scenario::Planar(p) => Stepper::Planar { prev: None, curr: p },
        };
        let general = match (&stepper, cfg.integrator) {
            (Stepper::Lifted { curr, .. }, IntegratorKind::HopfGeneral) => Some(VortexHamiltonian {
                strengths: curr.strengths.clone(),
                reg,
            }),
            _ => None,
        };
        let mut sim = Self {
            cfg: cfg.clone(),
            reg,
            stepper,
            step: 0,
            energy0: 0.0,
            moment0: Vec3::zeros(),
            iterations: 0,
            general,
        };
        let (e, m) = sim.invariants()?;
        sim.energy0 = e;
        sim.moment0 = m;
        Ok(sim)
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.cfg.h
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations
    }

    /// Current positions on S² (projected for lifted integrators).
    pub fn sphere_state(&self) -> Option<SphereState> {
        match &self.stepper {
            Stepper::Sphere(s) => Some(s.clone()),
            Stepper::Lifted { curr, .. } => Some(curr.project()),
            Stepper::Planar { .. } => None,
        }
    }

    pub fn lifted_state(&self) -> Option<&LiftedState> {
        match &self.stepper {
            Stepper::Lifted { curr, .. } => Some(curr),
            _ => None,
        }
    }

    pub fn planar_state(&self) -> Option<&PlanarState> {
        match &self.stepper {
            Stepper::Planar { curr, .. } => Some(curr),
            _ => None,
        }
    }

    /// Position of the first vortex as a 3-vector (planar: (re, im, 0)).
    pub fn first_position(&self) -> Vec3 {
        match &self.stepper {
            Stepper::Sphere(s) => s.positions[0],
            Stepper::Lifted { curr, .. } => curr.pairs[0].project(),
            Stepper::Planar { curr, .. } => Vec3::new(curr.positions[0].re, curr.positions[0].im, 0.0),
        }
    }

    /// Energy and moment. For planar runs the moment is
    /// (Re ΣΓz, Im ΣΓz, ΣΓ|z|²).
    fn invariants(&self) -> Result<(f64, Vec3)> {
        match &self.stepper {
            Stepper::Planar { curr, .. } => {
                let (lin, ang) = planar_impulse(curr);
                Ok((planar_energy(curr)?, Vec3::new(lin.re, lin.im, ang)))
            }
            _ => {
                let s = self.sphere_state().expect("sphere state");
                Ok((energy_sphere(&s, self.reg)?, vortex_moment(&s)))
            }
        }
    }

    pub fn diagnostics(&self) -> Result<DiagnosticsRecord> {
        let (energy, moment) = self.invariants()?;
        let positions = match &self.stepper {
            Stepper::Planar { curr, .. } => curr.positions.iter().flat_map(|z| [z.re, z.im]).collect(),
            _ => self
                .sphere_state()
                .expect("sphere state")
                .positions
                .iter()
                .flat_map(|x| [x[0], x[1], x[2]])
                .collect(),
        };
        Ok(DiagnosticsRecord {
            t: self.time(),
            energy,
            energy_error: energy - self.energy0,
            moment: [moment[0], moment[1], moment[2]],
            moment_error: (moment - self.moment0).norm(),
            positions,
        })
    }

    /// Advance one step; failures carry the index of the step attempted.
    pub fn advance(&mut self) -> Result<()> {
        let index = self.step + 1;
        self.advance_inner().map_err(|e| VortexError::StepFailed {
            step: index,
            source: Box::new(e),
        })?;
        self.step = index;
        Ok(())
    }

    fn advance_inner(&mut self) -> Result<()> {
        let (h, reg, solver) = (self.cfg.h, self.reg, self.cfg.solver);
        let kind = self.cfg.integrator;
        match &mut self.stepper {
            Stepper::Sphere(s) => {
                let next = match kind {
                    IntegratorKind::MidpointS2 => {
                        let rec = step_midpoint_s2(s, h, reg, &solver)?;
                        self.iterations += rec.iterations;
                        rec.state
                    }
                    IntegratorKind::LiePoisson => {
                        let rec = step_lie_poisson(s, h, reg, &solver)?;
                        self.iterations += rec.iterations;
                        rec.state
                    }
                    IntegratorKind::Rk4 => step_rk4_projected(s, h, reg)?,
                    IntegratorKind::Rk2 => step_rk2_projected(s, h, reg)?,
                    other => unreachable!("{other} is not a sphere integrator"),
                };
                *s = next;
            }
            Stepper::Lifted { prev, curr } => {
                let next = match (kind, prev.as_ref()) {
                    (IntegratorKind::Hopf, _) | (_, None) => {
                        let rec = step_hopf(curr, h, reg, &solver)?;
                        self.iterations += rec.iterations;
                        rec.state
                    }
                    (IntegratorKind::HopfTrapezoid, Some(p)) => step_trapezoid_twostep(p, curr, h, reg)?,
                    (IntegratorKind::HopfGeneral, Some(p)) => {
                        let ham = self.general.as_ref().expect("general Hamiltonian");
                        let rec = step_general(p, curr, h, ham, &solver)?;
                        self.iterations += rec.iterations;
                        rec.state
                    }
                    (other, _) => unreachable!("{other} is not a lifted integrator"),
                };
                if kind != IntegratorKind::Hopf {
                    *prev = Some(curr.clone());
                }
                *curr = next;
            }
            Stepper::Planar { prev, curr } => {
                let rec = match (kind, prev.as_ref()) {
                    (IntegratorKind::PlanarAlpha, Some(p)) => step_alpha(p, curr, self.cfg.alpha, h, &solver)?,
                    _ => step_midpoint_plane(curr, h, &solver)?,
                };
                self.iterations += rec.iterations;
                if kind == IntegratorKind::PlanarAlpha {
                    *prev = Some(curr.clone());
                }
                *curr = rec.state;
            }
        }
        Ok(())
    }
}

fn csv_header(cfg: &SimConfig, n: usize) -> String {
    let mut header = String::from("t,E,dE,Mx,My,Mz,dM");
    for i in 0..n {
        if cfg.scenario.is_planar() {
            let _ = write!(header, ",re_{i},im_{i}");
        } else {
            let _ = write!(header, ",x_{i},y_{i},z_{i}");
        }
    }
    header
}

fn csv_row(r: &DiagnosticsRecord) -> String {
    let mut row = String::new();
    let fixed = [r.t, r.energy, r.energy_error, r.moment[0], r.moment[1], r.moment[2], r.moment_error];
    for (i, v) in fixed.iter().chain(&r.positions).enumerate() {
        if i > 0 {
            row.push(',');
        }
        let _ = write!(row, "{v:.16e}");
    }
    row
}

/// Path of the JSON summary written beside a CSV file.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> VortexError + '_ {
    move |source| VortexError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Run a simulation and pass every kept record to `on_record`.
///
/// Records are kept every `record_every` steps and at the final step. Summary
/// statistics use every step.
pub fn simulate<F>(cfg: &SimConfig, record_every: usize, mut on_record: F) -> Result<RunSummary>
where
    F: FnMut(&DiagnosticsRecord) -> Result<()>,
{
    let started = Instant::now();
    let mut sim = Simulation::new(cfg)?;
    let steps = cfg.steps();
    let first = sim.diagnostics()?;
    on_record(&first)?;
    let mut max_de: f64 = 0.0;
    let mut max_dm: f64 = 0.0;
    for n in 1..=steps {
        sim.advance()?;
        let rec = sim.diagnostics().map_err(|e| VortexError::StepFailed {
            step: n,
            source: Box::new(e),
        })?;
        max_de = max_de.max(rec.energy_error.abs());
        max_dm = max_dm.max(rec.moment_error);
        if n % record_every.max(1) == 0 || n == steps {
            on_record(&rec)?;
        }
    }
    Ok(RunSummary {
        integrator: cfg.integrator.name().to_string(),
        scenario: cfg.scenario.name.clone(),
        steps,
        final_time: sim.time(),
        max_abs_energy_error: max_de,
        max_moment_error: max_dm,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        total_solver_iterations: sim.total_iterations(),
    })
}

/// Run to completion and keep the records in memory.
pub fn run_collect(cfg: &SimConfig, record_every: usize) -> Result<(Vec<DiagnosticsRecord>, RunSummary)> {
    let mut records = Vec::new();
    let summary = simulate(cfg, record_every, |r| {
        records.push(r.clone());
        Ok(())
    })?;
    Ok((records, summary))
}

/// Run the configured simulation, writing the CSV and the JSON summary when
/// an output path is set.
pub fn run_simulation(cfg: &SimConfig) -> Result<RunSummary> {
    let Some(path) = cfg.output.clone() else {
        return simulate(cfg, cfg.output_every, |_| Ok(()));
    };
    cfg.validate()?;
    let file = File::create(&path).map_err(io_error(&path))?;
    let mut out = BufWriter::new(file);
    let mut header_written = false;
    let summary = simulate(cfg, cfg.output_every, |r| {
        if !header_written {
            let n = r.positions.len() / if cfg.scenario.is_planar() { 2 } else { 3 };
            writeln!(out, "{}", csv_header(cfg, n)).map_err(io_error(&path))?;
            header_written = true;
        }
        writeln!(out, "{}", csv_row(r)).map_err(io_error(&path))
    })?;
    out.flush().map_err(io_error(&path))?;
    let json_path = summary_path(&path);
    // wall time is left out so that repeated runs write identical files
    let mut value = serde_json::to_value(&summary).expect("summary serializes");
    if let Some(map) = value.as_object_mut() {
        map.remove("wall_time_seconds");
    }
    let json = serde_json::to_string_pretty(&value).expect("summary serializes");
    std::fs::write(&json_path, json + "\n").map_err(io_error(&json_path))?;
    Ok(summary)
}

/// Source of the reference trajectory in a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// Rigid rotation of the ring (pd-ring only).
    Exact,
    /// The same integrator at step h_min / factor.
    FineStep { factor: usize },
}

impl FromStr for Reference {
    type Err = VortexError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "fine-step" => Ok(Self::FineStep { factor: 10 }),
            other => Err(VortexError::Config(format!(
                "unknown reference '{other}' (expected exact or fine-step)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub error: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub integrator: String,
    pub rows: Vec<ConvergenceRow>,
    /// Runs that failed, with the error line.
    pub failures: Vec<(f64, String)>,
    /// Least-squares slope of log error against log h over the rows whose
    /// error is at least [`ROUNDOFF_FLOOR`].
    pub slope: f64,
}

/// Errors below this are dominated by rounding and left out of the fit.
pub const ROUNDOFF_FLOOR: f64 = 1e-11;

/// Trajectory of the first vortex at every step.
fn first_vortex_track(cfg: &SimConfig) -> Result<(Vec<Vec3>, usize)> {
    let mut sim = Simulation::new(cfg)?;
    let mut track = Vec::with_capacity(cfg.steps() + 1);
    track.push(sim.first_position());
    for _ in 0..cfg.steps() {
        sim.advance()?;
        track.push(sim.first_position());
    }
    Ok((track, sim.total_iterations()))
}

/// For each h, the largest distance of the first vortex from the reference
/// over all steps, then the fitted order.
pub fn convergence_study(base: &SimConfig, h_list: &[f64], reference: Reference) -> Result<ConvergenceTable> {
    if h_list.len() < 2 {
        return Err(VortexError::Config("a convergence study needs at least two step sizes".into()));
    }
    for &h in h_list {
        let mut c = base.clone();
        c.h = h;
        c.validate()?;
    }
    let exact: Box<dyn Fn(f64) -> Option<Vec3> + Sync> = match reference {
        Reference::Exact => {
            let ring = base.scenario.pd_ring()?.ok_or_else(|| {
                VortexError::Config(format!(
                    "scenario '{}' has no exact solution; use the fine-step reference",
                    base.scenario.name
                ))
            })?;
            let omega = ring.omega_regularized(base.regularization()?)?;
            Box::new(move |t| Some(ring.exact_position_with_rate(0, t, omega)))
        }
        Reference::FineStep { factor } => {
            let h_min = h_list.iter().copied().fold(f64::INFINITY, f64::min);
            let mut fine = base.clone();
            fine.h = h_min / factor.max(1) as f64;
            let h_ref = fine.h;
            let (track, _) = first_vortex_track(&fine)?;
            Box::new(move |t| {
                let idx = (t / h_ref).round();
                let aligned = (idx * h_ref - t).abs() <= 1e-9 * t.max(1.0);
                track.get(idx as usize).copied().filter(|_| aligned)
            })
        }
    };
    let results: Vec<(f64, Result<(f64, usize)>)> = h_list
        .par_iter()
        .map(|&h| {
            let mut cfg = base.clone();
            cfg.h = h;
            let outcome = first_vortex_track(&cfg).and_then(|(track, iterations)| {
                let mut worst: f64 = 0.0;
                for (n, x) in track.iter().enumerate() {
                    let t = n as f64 * h;
                    let reference = exact(t).ok_or_else(|| {
                        VortexError::Config(format!("reference has no sample at t = {t} for h = {h}"))
                    })?;
                    worst = worst.max((x - reference).norm());
                }
                Ok((worst, iterations))
            });
            (h, outcome)
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (h, outcome) in results {
        match outcome {
            Ok((error, iterations)) => rows.push(ConvergenceRow { h, error, iterations }),
            Err(e) => failures.push((h, error_line(&e))),
        }
    }
    let usable: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.error >= ROUNDOFF_FLOOR).collect();
    let slope = if usable.len() >= 2 {
        let lx: Vec<f64> = usable.iter().map(|r| r.h.ln()).collect();
        let ly: Vec<f64> = usable.iter().map(|r| r.error.ln()).collect();
        least_squares_slope(&lx, &ly)
    } else {
        f64::NAN
    };
    Ok(ConvergenceTable {
        integrator: base.integrator.name().to_string(),
        rows,
        failures,
        slope,
    })
}

/// Least-squares slope of y against x.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Projection from the north pole onto the equatorial plane.
pub fn stereographic(x: &Vec3) -> Result<[f64; 2]> {
    if !(x[2] < 1.0 - 1e-12) {
        return Err(VortexError::Domain(format!(
            "stereographic projection undefined near the north pole (x3 = {})",
            x[2]
        )));
    }
    let d = 1.0 - x[2];
    Ok([x[0] / d, x[1] / d])
}

/// One-line machine-readable description of an error.
pub fn error_line(e: &VortexError) -> String {
    let mut fields = BTreeMap::new();
    fields.insert("kind", e.kind().to_string());
    if let VortexError::StepFailed { step, source } = e {
        fields.insert("step", step.to_string());
        fields.insert("cause", source.kind().to_string());
    }
    fields.insert("message", e.to_string());
    serde_json::to_string(&fields).expect("string map serializes")
}
