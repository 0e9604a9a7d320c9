use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{CmsError, Result};
use crate::flow::{FlowConfig, FlowState};
use crate::geometry::discrete::{
    fundamental_forms_mesh, signed_volume, surface_area, VertexGeometry,
};
use crate::geometry::mesh::{DiscreteSurface, Point};
use crate::geometry::param::ParamFamily;
use crate::geometry::quadrature::{family_area, family_volume, ChartQuadrature};

/// Least-squares sphere (circle for planar curves).
#[derive(Debug, Clone, PartialEq)]
pub struct BestFitSphere {
    pub center: Point,
    pub radius: f64,
    /// `max_v | |x_v − c| − r | / r`.
    pub radial_deviation: f64,
}

/// Fit `|x|² = 2 c·x + k` by linear least squares; `r² = k + |c|²`.
pub fn best_fit_sphere(points: &[Point], dim: usize) -> Result<BestFitSphere> {
    if !(2..=3).contains(&dim) {
        return Err(CmsError::Domain(format!(
            "sphere fit needs ambient dimension 2 or 3, got {dim}"
        )));
    }
    if points.len() <= dim {
        return Err(CmsError::Domain(format!(
            "sphere fit needs more than {dim} points"
        )));
    }
    let a = DMatrix::from_fn(points.len(), dim + 1, |r, c| {
        if c < dim {
            2.0 * points[r][c]
        } else {
            1.0
        }
    });
    let b = DVector::from_fn(points.len(), |r, _| {
        points[r].fixed_rows::<3>(0).norm_squared()
    });
    let solution = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| CmsError::Domain(format!("sphere fit failed: {e}")))?;
    let mut center = Point::zeros();
    for i in 0..dim {
        center[i] = solution[i];
    }
    let r2 = solution[dim] + center.norm_squared();
    if !(r2 > 0.0) {
        return Err(CmsError::Domain(
            "sphere fit produced a non-positive radius".into(),
        ));
    }
    let radius = r2.sqrt();
    let radial_deviation = points.iter().fold(0.0f64, |m, x| {
        m.max(((x - center).norm() - radius).abs() / radius)
    });
    Ok(BestFitSphere {
        center,
        radius,
        radial_deviation,
    })
}

/// Per-sample `P − σH` with weighted summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungLaplaceResidual {
    pub values: Vec<f64>,
    pub max: f64,
    pub rms: f64,
}

pub fn young_laplace_residual(
    mean_curvature: &[f64],
    weights: &[f64],
    pressure: f64,
    sigma: f64,
) -> YoungLaplaceResidual {
    let values: Vec<f64> = mean_curvature
        .iter()
        .map(|h| pressure - sigma * h)
        .collect();
    let max = values.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let total: f64 = weights.iter().sum();
    let rms = (values
        .iter()
        .zip(weights)
        .map(|(r, w)| r * r * w)
        .sum::<f64>()
        / total)
        .sqrt();
    YoungLaplaceResidual { values, max, rms }
}

pub fn young_laplace_residual_mesh(
    surface: &DiscreteSurface,
    pressure: f64,
    sigma: f64,
) -> Result<YoungLaplaceResidual> {
    let g = fundamental_forms_mesh(surface)?;
    Ok(young_laplace_residual(
        &g.mean_curvature,
        &g.mixed_areas,
        pressure,
        sigma,
    ))
}

/// Residual on the sample grid of an analytic family, weighted by `√|S|`.
pub fn young_laplace_residual_family(
    family: &ParamFamily,
    t: f64,
    pressure: f64,
    sigma: f64,
) -> Result<YoungLaplaceResidual> {
    let mut h = Vec::new();
    let mut w = Vec::new();
    for s in family.domain().identity_grid() {
        let forms = family.forms(&s, t)?;
        h.push(forms.mean_curvature);
        w.push(forms.area_element);
    }
    Ok(young_laplace_residual(&h, &w, pressure, sigma))
}

/// Kinetic energy, potential energy and `L = T − U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub lagrangian: f64,
}

impl EnergyBreakdown {
    fn new(kinetic: f64, potential: f64) -> Self {
        Self {
            kinetic,
            potential,
            lagrangian: kinetic - potential,
        }
    }
}

/// `T = ½ Σ ρ_v |V_v|² A_v`, `U = P · Volume + σ · Area` on a discrete surface.
pub fn lagrangian_energy(
    surface: &DiscreteSurface,
    geometry: &VertexGeometry,
    density: &[f64],
    velocity: &[Point],
    pressure: f64,
    sigma: f64,
) -> Result<EnergyBreakdown> {
    let n = surface.vertex_count();
    if density.len() != n || velocity.len() != n || geometry.len() != n {
        return Err(CmsError::Domain(format!(
            "field sizes {} / {} / {} do not match {n} vertices",
            density.len(),
            velocity.len(),
            geometry.len()
        )));
    }
    let kinetic = 0.5
        * density
            .iter()
            .zip(velocity)
            .zip(&geometry.areas)
            .map(|((rho, v), a)| rho * v.norm_squared() * a)
            .sum::<f64>();
    let potential = pressure * signed_volume(surface) + sigma * surface_area(surface);
    Ok(EnergyBreakdown::new(kinetic, potential))
}

/// Quadrature version on an analytic family at time `t`.
pub fn lagrangian_energy_family<F>(
    family: &ParamFamily,
    quad: &ChartQuadrature,
    t: f64,
    density: F,
    pressure: f64,
    sigma: f64,
) -> Result<EnergyBreakdown>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let kinetic = quad.integrate_surface(family, t, |s| {
        Ok(0.5 * density(s) * family.jet(s, t).velocity.norm_squared())
    })?;
    let potential =
        pressure * family_volume(family, quad, t)? + sigma * family_area(family, quad, t)?;
    Ok(EnergyBreakdown::new(kinetic, potential))
}

/// Evidence that a relaxation reached a constant-mean-curvature state.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumCertificate {
    pub steps: usize,
    pub time: f64,
    pub chi: i64,
    pub h_mean: f64,
    pub h_relstd: f64,
    /// `P = σ H̄`.
    pub pressure: f64,
    pub young_laplace_max: f64,
    pub young_laplace_rms: f64,
    pub fit: BestFitSphere,
    /// Radius of the sphere with the same enclosed volume.
    pub equivalent_radius: f64,
    pub volume: f64,
    pub volume_drift: f64,
    /// Whether the surface lies in the simply connected class, so that the
    /// constant-mean-curvature state is a round sphere.
    pub sphere: bool,
}

impl EquilibriumCertificate {
    pub fn from_state(state: &FlowState, config: &FlowConfig) -> Self {
        let g = &state.geometry;
        let h_mean = g.mean_curvature_mean();
        let pressure = config.sigma * h_mean;
        let yl = young_laplace_residual(&g.mean_curvature, &g.mixed_areas, pressure, config.sigma);
        let dim = state.surface.dim() + 1;
        let fit = best_fit_sphere(state.surface.vertices(), dim).unwrap_or(BestFitSphere {
            center: Point::zeros(),
            radius: f64::NAN,
            radial_deviation: f64::NAN,
        });
        let volume = signed_volume(&state.surface);
        let equivalent_radius = match dim {
            3 => (3.0 * volume / (4.0 * std::f64::consts::PI)).cbrt(),
            _ => (volume / std::f64::consts::PI).sqrt(),
        };
        let sphere = match &state.surface {
            DiscreteSurface::Mesh(_) => state.chi == 2,
            DiscreteSurface::Curve(_) => true,
        };
        Self {
            steps: state.step,
            time: state.time,
            chi: state.chi,
            h_mean,
            h_relstd: g.mean_curvature_relstd(),
            pressure,
            young_laplace_max: yl.max,
            young_laplace_rms: yl.rms,
            fit,
            equivalent_radius,
            volume,
            volume_drift: (volume - state.initial_volume).abs() / state.initial_volume,
            sphere,
        }
    }
}

impl fmt::Display for EquilibriumCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "equilibrium certificate")?;
        writeln!(f, "steps                {}", self.steps)?;
        writeln!(f, "time                 {:.9e}", self.time)?;
        writeln!(f, "euler_characteristic {}", self.chi)?;
        writeln!(f, "H_mean               {:.12e}", self.h_mean)?;
        writeln!(f, "H_relstd             {:.6e}", self.h_relstd)?;
        writeln!(f, "pressure             {:.12e}", self.pressure)?;
        writeln!(f, "young_laplace_max    {:.6e}", self.young_laplace_max)?;
        writeln!(f, "young_laplace_rms    {:.6e}", self.young_laplace_rms)?;
        writeln!(
            f,
            "best_fit_center      {:.9e} {:.9e} {:.9e}",
            self.fit.center.x, self.fit.center.y, self.fit.center.z
        )?;
        writeln!(f, "best_fit_radius      {:.12e}", self.fit.radius)?;
        writeln!(f, "radial_deviation     {:.6e}", self.fit.radial_deviation)?;
        writeln!(f, "equivalent_radius    {:.12e}", self.equivalent_radius)?;
        writeln!(f, "volume               {:.12e}", self.volume)?;
        writeln!(f, "volume_drift         {:.6e}", self.volume_drift)?;
        writeln!(
            f,
            "round_sphere         {}",
            if self.sphere {
                "yes"
            } else {
                "no (not simply connected)"
            }
        )
    }
}
