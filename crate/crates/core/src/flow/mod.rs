//! Curvature-driven flows of discrete surfaces.
//!
//! Vertices move along their outward normals with speed `C`:
//!
//! * `mcf`: `C = μσH`;
//! * `vpmcf`: `C = μ(σH − P_t)` with `P_t` the volume-gradient-weighted mean
//!   of `σH`, so the discrete volume is stationary to first order;
//! * `yl`: the same relaxation with `P_t = ∮σH dS / Area`.
//!
//! With the outward normal and `H = −n/R` on spheres, `mcf` shrinks spheres.
//! Stationary states of the relaxation laws are discrete constant-mean-curvature
//! surfaces, where `P_t = σH` (Young–Laplace balance).

mod certificate;
mod diagnostics;
mod intersect;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{CmsError, Result};
use crate::geometry::discrete::{
    fundamental_forms_mesh, signed_volume, surface_area, VertexGeometry,
};
use crate::geometry::mesh::{DiscreteSurface, Point};
pub use certificate::{
    best_fit_sphere, lagrangian_energy, lagrangian_energy_family, young_laplace_residual,
    young_laplace_residual_family, young_laplace_residual_mesh, BestFitSphere, EnergyBreakdown,
    EquilibriumCertificate, YoungLaplaceResidual,
};
pub use diagnostics::{DiagnosticsRecord, FlowDiagnostics, DIAGNOSTICS_HEADER};
pub use intersect::has_self_intersection;

/// Steps shorter than this abort the run.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowLaw {
    Mcf,
    #[default]
    VolumePreserving,
    YoungLaplace,
}

impl FlowLaw {
    pub fn name(self) -> &'static str {
        match self {
            FlowLaw::Mcf => "mcf",
            FlowLaw::VolumePreserving => "vpmcf",
            FlowLaw::YoungLaplace => "yl",
        }
    }
}

impl fmt::Display for FlowLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowLaw {
    type Err = CmsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mcf" => Ok(FlowLaw::Mcf),
            "vpmcf" | "volume-preserving-mcf" => Ok(FlowLaw::VolumePreserving),
            "yl" | "young-laplace-relaxation" => Ok(FlowLaw::YoungLaplace),
            other => Err(CmsError::Config(format!(
                "unknown flow law '{other}' (expected mcf, vpmcf or yl)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub law: FlowLaw,
    /// Surface tension σ.
    pub sigma: f64,
    /// Mobility μ.
    pub mobility: f64,
    /// Fraction of the parabolic stability limit used per step.
    pub safety: f64,
    pub max_step: f64,
    /// Use this step instead of the controller (still clipped to `max_time`).
    pub fixed_step: Option<f64>,
    pub max_time: f64,
    pub max_steps: usize,
    /// Relative standard deviation of `H` below which a run has converged.
    pub tau_h: f64,
    /// Weight of the tangential Laplacian redistribution per step; 0 disables it.
    pub tangential_smoothing: f64,
    /// Run the quadratic self-intersection test after every step.
    pub check_self_intersection: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            law: FlowLaw::VolumePreserving,
            sigma: 1.0,
            mobility: 1.0,
            safety: 0.5,
            max_step: 1e-2,
            fixed_step: None,
            max_time: f64::INFINITY,
            max_steps: 100_000,
            tau_h: 1e-3,
            tangential_smoothing: 0.0,
            check_self_intersection: false,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(CmsError::Config(format!(
                "{what} must be positive, got {v}"
            )))
        };
        if !(self.sigma > 0.0) {
            return bad("sigma", self.sigma);
        }
        if !(self.mobility > 0.0) {
            return bad("mobility", self.mobility);
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(CmsError::Config(format!(
                "safety must lie in (0, 1], got {}",
                self.safety
            )));
        }
        if !(self.max_step > 0.0) {
            return bad("max_step", self.max_step);
        }
        if let Some(dt) = self.fixed_step {
            if !(dt > 0.0) {
                return bad("fixed_step", dt);
            }
        }
        if !(self.max_time > 0.0) {
            return bad("max_time", self.max_time);
        }
        if !(self.tau_h > 0.0) {
            return bad("tau_h", self.tau_h);
        }
        if !(0.0..=1.0).contains(&self.tangential_smoothing) {
            return Err(CmsError::Config(format!(
                "tangential_smoothing must lie in [0, 1], got {}",
                self.tangential_smoothing
            )));
        }
        Ok(())
    }
}

/// Per-vertex velocity: normal speed `C_v` along the outward normal plus an
/// ambient tangential part.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexVelocity {
    pub normal_speed: Vec<f64>,
    pub tangential: Vec<Point>,
    /// Multiplier `P_t` (zero for `mcf`).
    pub pressure: f64,
}

impl VertexVelocity {
    pub fn max_normal_speed(&self) -> f64 {
        self.normal_speed.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn ambient(&self, geometry: &VertexGeometry) -> Vec<Point> {
        self.normal_speed
            .iter()
            .zip(&geometry.normals)
            .zip(&self.tangential)
            .map(|((c, n), t)| n * *c + t)
            .collect()
    }
}

fn weighted_mean(values: &[f64], weights: impl Iterator<Item = f64>) -> f64 {
    let (sum, total) = values
        .iter()
        .zip(weights)
        .fold((0.0, 0.0), |(s, w), (v, wt)| (s + v * wt, w + wt));
    sum / total
}

/// Normal speeds of the configured law. Tangential components are zero; the
/// redistribution is applied as a separate displacement in [`FlowState::advance`].
pub fn velocity_law(geometry: &VertexGeometry, config: &FlowConfig) -> VertexVelocity {
    let sigma = config.sigma;
    let tension: Vec<f64> = geometry.mean_curvature.iter().map(|h| sigma * h).collect();
    let pressure = match config.law {
        FlowLaw::Mcf => 0.0,
        FlowLaw::VolumePreserving => {
            weighted_mean(&tension, geometry.volume_gradients.iter().map(|g| g.norm()))
        }
        FlowLaw::YoungLaplace => weighted_mean(&tension, geometry.areas.iter().copied()),
    };
    VertexVelocity {
        normal_speed: tension
            .iter()
            .map(|s| config.mobility * (s - pressure))
            .collect(),
        tangential: vec![Point::zeros(); geometry.len()],
        pressure,
    }
}

/// Parabolic step limit `safety · h_min² / (2n μσ)`, further limited so that no
/// vertex travels more than `safety · h_min`.
pub fn stable_step(
    surface: &DiscreteSurface,
    velocity: &VertexVelocity,
    config: &FlowConfig,
) -> f64 {
    controlled_step(surface.min_edge_length(), surface.dim(), velocity, config)
}

fn controlled_step(h: f64, dim: usize, velocity: &VertexVelocity, config: &FlowConfig) -> f64 {
    let diffusion = config.mobility * config.sigma * 2.0 * dim as f64;
    let mut dt = config.safety * h * h / diffusion;
    let c = velocity.max_normal_speed();
    if c > 0.0 {
        dt = dt.min(config.safety * h / c);
    }
    dt.min(config.max_step)
}

fn edge_list(surface: &DiscreteSurface) -> Vec<(usize, usize)> {
    match surface {
        DiscreteSurface::Mesh(m) => m.edges(),
        DiscreteSurface::Curve(c) => (0..c.len()).map(|i| (i, c.next(i))).collect(),
    }
}

fn neighbours(count: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); count];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

fn min_edge_length(vertices: &[Point], edges: &[(usize, usize)]) -> f64 {
    edges
        .iter()
        .map(|&(a, b)| (vertices[a] - vertices[b]).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `V − E + F`, with the edge count of the fixed connectivity.
fn chi_of(surface: &DiscreteSurface, edges: usize) -> i64 {
    match surface {
        DiscreteSurface::Mesh(m) => m.vertices.len() as i64 - edges as i64 + m.faces.len() as i64,
        DiscreteSurface::Curve(c) => c.len() as i64 - edges as i64,
    }
}

fn face_normals(surface: &DiscreteSurface) -> Vec<Point> {
    match surface {
        DiscreteSurface::Mesh(m) => m
            .faces
            .iter()
            .map(|f| {
                (m.vertices[f[1]] - m.vertices[f[0]]).cross(&(m.vertices[f[2]] - m.vertices[f[0]]))
            })
            .collect(),
        DiscreteSurface::Curve(c) => (0..c.len())
            .map(|i| c.vertices[c.next(i)] - c.vertices[i])
            .collect(),
    }
}

/// Result of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub max_displacement: f64,
    pub pressure: f64,
}

/// Evolving surface with cached geometry and fixed connectivity.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub surface: DiscreteSurface,
    pub geometry: VertexGeometry,
    pub time: f64,
    pub step: usize,
    pub chi: i64,
    pub initial_volume: f64,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
    last_displacement: f64,
}

impl FlowState {
    pub fn new(surface: DiscreteSurface) -> Result<Self> {
        surface.validate()?;
        let geometry = fundamental_forms_mesh(&surface)?;
        let initial_volume = signed_volume(&surface);
        if initial_volume <= 0.0 {
            return Err(CmsError::Orientation(format!(
                "enclosed volume {initial_volume:e} is not positive; the surface is wound inward"
            )));
        }
        let edges = edge_list(&surface);
        Ok(Self {
            chi: chi_of(&surface, edges.len()),
            neighbours: neighbours(surface.vertex_count(), &edges),
            edges,
            surface,
            geometry,
            time: 0.0,
            step: 0,
            initial_volume,
            last_displacement: 0.0,
        })
    }

    pub fn velocity(&self, config: &FlowConfig) -> VertexVelocity {
        velocity_law(&self.geometry, config)
    }

    /// Diagnostics of the current state.
    pub fn record(&self, config: &FlowConfig) -> DiagnosticsRecord {
        let velocity = self.velocity(config);
        let area = surface_area(&self.surface);
        let volume = signed_volume(&self.surface);
        let gauss_bonnet_residual = match &self.surface {
            DiscreteSurface::Mesh(_) => (self.geometry.total_gauss_curvature()
                - 2.0 * std::f64::consts::PI * self.chi as f64)
                .abs(),
            DiscreteSurface::Curve(_) => 0.0,
        };
        DiagnosticsRecord {
            step: self.step,
            time: self.time,
            area,
            volume,
            chi: chi_of(&self.surface, self.edges.len()),
            h_mean: self.geometry.mean_curvature_mean(),
            h_relstd: self.geometry.mean_curvature_relstd(),
            energy: config.sigma * area,
            sphericity: sphericity(&self.surface, area, volume),
            max_c: velocity.max_normal_speed(),
            max_displacement: self.last_displacement,
            gauss_bonnet_residual,
            mass_total: None,
        }
    }

    /// Advance by one controlled step, never past `config.max_time`.
    pub fn advance(&mut self, config: &FlowConfig) -> Result<StepReport> {
        let velocity = self.velocity(config);
        let mut dt = config.fixed_step.unwrap_or_else(|| {
            let h = min_edge_length(self.surface.vertices(), &self.edges);
            controlled_step(h, self.surface.dim(), &velocity, config)
        });
        // a rounding sliver left before max_time is folded into this step
        let remaining = config.max_time - self.time;
        if remaining < dt * (1.0 + 1e-9) {
            dt = remaining;
        }
        if !(dt >= MIN_STEP) {
            return Err(CmsError::StepCollapse {
                dt,
                floor: MIN_STEP,
            });
        }

        let old_faces = face_normals(&self.surface);
        let vertices = self.surface.vertices();
        let normals = &self.geometry.normals;
        let smoothing = config.tangential_smoothing;
        let displacement: Vec<Point> = (0..vertices.len())
            .into_par_iter()
            .map(|v| {
                let mut d = normals[v] * (velocity.normal_speed[v] * dt);
                if smoothing > 0.0 {
                    let nb = &self.neighbours[v];
                    let centre = nb.iter().map(|&u| vertices[u]).sum::<Point>() / nb.len() as f64;
                    let offset = centre - vertices[v];
                    d += (offset - normals[v] * offset.dot(&normals[v])) * smoothing;
                }
                d
            })
            .collect();
        let mut next = self.surface.clone();
        for (x, d) in next.vertices_mut().iter_mut().zip(&displacement) {
            *x += d;
        }

        for (f, (a, b)) in old_faces.iter().zip(face_normals(&next)).enumerate() {
            if a.dot(&b) <= 0.0 {
                return Err(CmsError::MeshQuality(format!(
                    "element {f} inverted at step {}",
                    self.step + 1
                )));
            }
        }
        let chi = chi_of(&next, self.edges.len());
        if chi != self.chi {
            return Err(CmsError::TopologyViolation {
                before: self.chi,
                after: chi,
            });
        }
        if config.check_self_intersection && has_self_intersection(&next) {
            return Err(CmsError::Topology(format!(
                "self-intersection detected at step {}",
                self.step + 1
            )));
        }
        self.geometry = fundamental_forms_mesh(&next)?;
        self.surface = next;
        self.time += dt;
        self.step += 1;
        self.last_displacement = displacement.iter().fold(0.0, |m, d| m.max(d.norm()));
        Ok(StepReport {
            dt,
            max_displacement: self.last_displacement,
            pressure: velocity.pressure,
        })
    }
}

/// Area of the equal-volume sphere (circle) over the current area.
pub fn sphericity(surface: &DiscreteSurface, area: f64, volume: f64) -> f64 {
    let pi = std::f64::consts::PI;
    match surface {
        DiscreteSurface::Mesh(_) => (36.0 * pi * volume * volume).cbrt() / area,
        DiscreteSurface::Curve(_) => 2.0 * (pi * volume).sqrt() / area,
    }
}

/// One step from `surface`, returning the new surface and its diagnostics.
pub fn step(
    surface: &DiscreteSurface,
    config: &FlowConfig,
) -> Result<(DiscreteSurface, DiagnosticsRecord)> {
    config.validate()?;
    let mut state = FlowState::new(surface.clone())?;
    state.advance(config)?;
    let record = state.record(config);
    Ok((state.surface, record))
}

/// Integrate up to time `until` regardless of convergence.
pub fn evolve(
    surface: DiscreteSurface,
    config: &FlowConfig,
    until: f64,
) -> Result<(DiscreteSurface, FlowDiagnostics)> {
    let config = FlowConfig {
        max_time: until,
        ..config.clone()
    };
    config.validate()?;
    let mut state = FlowState::new(surface)?;
    let mut diagnostics = FlowDiagnostics::default();
    diagnostics.push(state.record(&config));
    while state.time < until {
        if state.step >= config.max_steps {
            return Err(CmsError::Config(format!(
                "step budget {} exhausted at t = {} before reaching {until}",
                config.max_steps, state.time
            )));
        }
        state.advance(&config)?;
        diagnostics.push(state.record(&config));
    }
    Ok((state.surface, diagnostics))
}

/// Why a relaxation run stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Converged,
    StepBudget,
    TimeLimit,
    Failed(CmsError),
}

#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub surface: DiscreteSurface,
    pub diagnostics: FlowDiagnostics,
    pub certificate: Option<EquilibriumCertificate>,
    pub termination: Termination,
}

/// Step until `rel-std(H) < τ_H` or the budget runs out. `observer` sees every
/// recorded state, including the initial one.
pub fn run_with<F>(
    surface: DiscreteSurface,
    config: &FlowConfig,
    mut observer: F,
) -> Result<FlowOutcome>
where
    F: FnMut(&FlowState, &DiagnosticsRecord) -> Result<()>,
{
    config.validate()?;
    let mut state = FlowState::new(surface)?;
    let mut diagnostics = FlowDiagnostics::default();
    let termination = loop {
        let record = state.record(config);
        observer(&state, &record)?;
        let relstd = record.h_relstd;
        diagnostics.push(record);
        if relstd < config.tau_h {
            break Termination::Converged;
        }
        if state.step >= config.max_steps {
            break Termination::StepBudget;
        }
        if state.time >= config.max_time {
            break Termination::TimeLimit;
        }
        if let Err(e) = state.advance(config) {
            break Termination::Failed(e);
        }
    };
    let certificate = match termination {
        Termination::Converged => Some(EquilibriumCertificate::from_state(&state, config)),
        _ => None,
    };
    Ok(FlowOutcome {
        surface: state.surface,
        diagnostics,
        certificate,
        termination,
    })
}

pub fn run_to_equilibrium(surface: DiscreteSurface, config: &FlowConfig) -> Result<FlowOutcome> {
    run_with(surface, config, |_, _| Ok(()))
}

#[cfg(test)]
mod tests;
