//! Scalar transport on moving surfaces and momentum-balance residuals.
//!
//! Density obeys the local continuity law `∇̇ρ + ∇_i(ρV^i) = ρ C H`. Three
//! discretizations are provided:
//!
//! * lumped: vertices carry the mass `m_v = ρ_v A_v`, which never changes, and
//!   the density is read back as `m_v / A_v` (exactly conservative);
//! * local: explicit Euler of the law at the vertices, with the dual-area
//!   divergence for the tangential flux;
//! * chart: explicit Euler at fixed chart points of an analytic family, where
//!   the convective terms cancel and `∂_t ρ = ρ (C H − ∇_i V^i)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{CmsError, Result};
use crate::flow::VertexVelocity;
use crate::geometry::discrete::{mesh_divergence, VertexGeometry};
use crate::geometry::mesh::{DiscreteSurface, Point};
use crate::geometry::param::ParamFamily;
use crate::geometry::quadrature::ChartQuadrature;
use crate::verify::stencil::chart_derivative;

/// Per-sample values with the area weights of the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceField {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SurfaceField {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(CmsError::Domain(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CmsError::Domain(format!("non-finite value at sample {i}")));
        }
        Ok(Self { values, weights })
    }

    /// A density: finite and non-negative.
    pub fn density(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_nonnegative(&values)?;
        Self::new(values, weights)
    }

    /// `Σ w_v f_v`.
    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(*v >= 0.0)) {
        Some(index) => Err(CmsError::NegativeDensity {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

/// `∮ ρ dS` with barycentric vertex areas.
pub fn total_mass(density: &[f64], geometry: &VertexGeometry) -> f64 {
    density
        .iter()
        .zip(&geometry.areas)
        .map(|(r, a)| r * a)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdvectionScheme {
    #[default]
    Lumped,
    Local,
}

/// Density after the vertices moved from `before` to `after` by `velocity`
/// over `dt`. The lumped scheme ignores `velocity` and `dt`.
pub fn advect_density(
    scheme: AdvectionScheme,
    surface: &DiscreteSurface,
    density: &[f64],
    before: &VertexGeometry,
    after: &VertexGeometry,
    velocity: &VertexVelocity,
    dt: f64,
) -> Result<Vec<f64>> {
    if density.len() != before.len() || before.len() != after.len() {
        return Err(CmsError::Domain("density and geometry sizes differ".into()));
    }
    let next = match scheme {
        AdvectionScheme::Lumped => density
            .iter()
            .zip(before.areas.iter().zip(&after.areas))
            .map(|(r, (a0, a1))| r * a0 / a1)
            .collect(),
        AdvectionScheme::Local => advect_local(surface, density, before, velocity, dt),
    };
    check_nonnegative(&next)?;
    Ok(next)
}

/// `ρ + Δt (ρ C H − div(ρ V_t))` at each vertex.
fn advect_local(
    surface: &DiscreteSurface,
    density: &[f64],
    geometry: &VertexGeometry,
    velocity: &VertexVelocity,
    dt: f64,
) -> Vec<f64> {
    let divergence = match surface {
        DiscreteSurface::Mesh(mesh)
            if velocity.tangential.iter().any(|t| t.norm_squared() > 0.0) =>
        {
            let flux: Vec<Point> = velocity
                .tangential
                .iter()
                .zip(density)
                .map(|(t, r)| t * *r)
                .collect();
            mesh_divergence(mesh, geometry, &flux)
        }
        _ => vec![0.0; density.len()],
    };
    density
        .iter()
        .enumerate()
        .map(|(v, r)| {
            r + dt * (r * velocity.normal_speed[v] * geometry.mean_curvature[v] - divergence[v])
        })
        .collect()
}

/// Density sampled at the quadrature nodes of an analytic family.
#[derive(Debug, Clone)]
pub struct ChartDensity {
    pub quadrature: ChartQuadrature,
    pub values: Vec<f64>,
    pub time: f64,
}

impl ChartDensity {
    pub fn new<F>(quadrature: ChartQuadrature, t: f64, density: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let values: Vec<f64> = quadrature.nodes.iter().map(|s| density(s)).collect();
        check_nonnegative(&values)?;
        Ok(Self {
            quadrature,
            values,
            time: t,
        })
    }

    pub fn uniform(family: &ParamFamily, t: f64, rho: f64) -> Result<Self> {
        Self::new(ChartQuadrature::standard(&family.domain()), t, |_| rho)
    }

    /// `∫ ρ dS` at the density's own time.
    pub fn total_mass(&self, family: &ParamFamily) -> Result<f64> {
        let t = self.time;
        let terms: Result<Vec<f64>> = self
            .quadrature
            .nodes
            .par_iter()
            .zip(self.quadrature.weights.par_iter())
            .zip(self.values.par_iter())
            .map(|((s, w), r)| Ok(w * r * family.forms(s, t)?.area_element))
            .collect();
        Ok(crate::geometry::quadrature::accurate_sum(&terms?))
    }

    /// One explicit Euler step of `∂_t ρ = ρ (C H − ∇_i V^i)`.
    pub fn advance(&mut self, family: &ParamFamily, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(CmsError::Domain(format!("time step {dt} must be positive")));
        }
        let t = self.time;
        let rates: Result<Vec<f64>> = self
            .quadrature
            .nodes
            .par_iter()
            .map(|s| {
                let k = family.kinematics(s, t)?;
                Ok(k.normal_speed * k.forms.mean_curvature - k.tangential_divergence())
            })
            .collect();
        let next: Vec<f64> = self
            .values
            .iter()
            .zip(rates?)
            .map(|(r, g)| r * (1.0 + dt * g))
            .collect();
        check_nonnegative(&next)?;
        self.values = next;
        self.time += dt;
        Ok(())
    }
}

/// Time levels available for assembling `∇̇`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeStencil {
    pub levels: Vec<f64>,
}

impl TimeStencil {
    /// Levels `t − h, t, t + h`.
    pub fn centered(t: f64, h: f64) -> Self {
        Self {
            levels: vec![t - h, t, t + h],
        }
    }

    /// Levels `t, t + h`.
    pub fn forward(t: f64, h: f64) -> Self {
        Self {
            levels: vec![t, t + h],
        }
    }

    /// Derivative at `t` of a quantity sampled at the levels.
    pub fn derivative<F>(&self, t: f64, f: F) -> Result<DMatrix<f64>>
    where
        F: Fn(f64) -> Result<DMatrix<f64>>,
    {
        let has = |x: f64| {
            self.levels
                .iter()
                .any(|l| (l - x).abs() <= 1e-14 * (1.0 + x.abs()))
        };
        if !has(t) {
            return Err(CmsError::Stencil(format!(
                "evaluation time {t} is not a stencil level"
            )));
        }
        let before = self
            .levels
            .iter()
            .copied()
            .filter(|l| *l < t)
            .fold(f64::NEG_INFINITY, f64::max);
        let after = self
            .levels
            .iter()
            .copied()
            .filter(|l| *l > t)
            .fold(f64::INFINITY, f64::min);
        match (before.is_finite(), after.is_finite()) {
            (true, true) => Ok((f(after)? - f(before)?) / (after - before)),
            (false, true) => Ok((f(after)? - f(t)?) / (after - t)),
            (true, false) => Ok((f(t)? - f(before)?) / (t - before)),
            (false, false) => Err(CmsError::Stencil(
                "at least two time levels are required".into(),
            )),
        }
    }
}

/// Scalar field of chart point, ambient position and time.
pub type FieldFn<'a> = &'a (dyn Fn(&[f64], &DVector<f64>, f64) -> f64 + Sync);

/// Material fields entering the momentum balance.
pub struct MomentumFields<'a> {
    pub density: FieldFn<'a>,
    pub tension: FieldFn<'a>,
    pub pressure: FieldFn<'a>,
}

/// Pointwise residuals of the momentum balance at one chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSample {
    pub point: Vec<f64>,
    /// `ρ(∇̇V_i + V^j∇_jV_i − C∇_iC − CV^jB_ij) + ∇_iσ` (covariant components).
    pub tangential: DVector<f64>,
    /// `ρ(∇̇C + 2V^i∇_iC + V^iV^jB_ij) − ∂_tσ − P + σH`.
    pub normal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumResiduals {
    pub samples: Vec<MomentumSample>,
    pub max_tangential: f64,
    pub max_normal: f64,
}

fn field_at(family: &ParamFamily, f: FieldFn<'_>, s: &[f64], t: f64) -> f64 {
    f(s, &family.position(s, t), t)
}

/// Residuals of the tangential and normal momentum equations on the given
/// chart points at the middle level `t` of `stencil`. Time derivatives come
/// from the stencil, surface gradients of `σ` from five-point chart
/// differences with step `spatial_step`.
pub fn momentum_residuals(
    family: &ParamFamily,
    points: &[Vec<f64>],
    fields: &MomentumFields<'_>,
    stencil: &TimeStencil,
    t: f64,
    spatial_step: f64,
) -> Result<MomentumResiduals> {
    let samples: Result<Vec<MomentumSample>> = points
        .par_iter()
        .map(|s| momentum_sample(family, s, fields, stencil, t, spatial_step))
        .collect();
    let samples = samples?;
    let max_tangential = samples
        .iter()
        .fold(0.0f64, |m, r| m.max(r.tangential.amax()));
    let max_normal = samples.iter().fold(0.0f64, |m, r| m.max(r.normal.abs()));
    Ok(MomentumResiduals {
        samples,
        max_tangential,
        max_normal,
    })
}

fn momentum_sample(
    family: &ParamFamily,
    s: &[f64],
    fields: &MomentumFields<'_>,
    stencil: &TimeStencil,
    t: f64,
    spatial_step: f64,
) -> Result<MomentumSample> {
    let k = family.kinematics(s, t)?;
    let n = k.dim();
    let forms = &k.forms;
    let c = k.normal_speed;
    let v = &k.tangential;
    let rho = field_at(family, fields.density, s, t);
    let sigma = field_at(family, fields.tension, s, t);
    let p = field_at(family, fields.pressure, s, t);

    // ∇̇V^j = ∂_t V^j − V^k ∇_k V^j + Γ̇^j_k V^k, then lowered with the metric
    let dv_dt = stencil
        .derivative(t, |tau| {
            Ok(DMatrix::from_column_slice(
                n,
                1,
                family.kinematics(s, tau)?.tangential.as_slice(),
            ))
        })?
        .column(0)
        .into_owned();
    let dot_v = &dv_dt - &k.cov_tangential * v + k.time_connection() * v;
    let convective = &k.cov_tangential * v;
    let inertia_up =
        dot_v + convective - k.grad_normal_speed_up() * c - (forms.curvature_mixed() * v) * c;
    let inertia = forms.lower(&inertia_up);

    let mut grad_sigma = DVector::zeros(n);
    for i in 0..n {
        grad_sigma[i] = chart_derivative(
            |q| {
                Ok(DMatrix::from_element(
                    1,
                    1,
                    field_at(family, fields.tension, q, t),
                ))
            },
            s,
            i,
            spatial_step,
        )?[(0, 0)];
    }
    let tangential = inertia * rho + grad_sigma;

    let dc_dt = stencil.derivative(t, |tau| {
        Ok(DMatrix::from_element(
            1,
            1,
            family.kinematics(s, tau)?.normal_speed,
        ))
    })?[(0, 0)];
    let dsigma_dt = stencil.derivative(t, |tau| {
        Ok(DMatrix::from_element(
            1,
            1,
            field_at(family, fields.tension, s, tau),
        ))
    })?[(0, 0)];
    let dot_c = dc_dt - v.dot(&k.grad_normal_speed);
    let normal_inertia = dot_c + 2.0 * v.dot(&k.grad_normal_speed) + v.dot(&(&forms.curvature * v));
    let normal = rho * normal_inertia - dsigma_dt - p + sigma * forms.mean_curvature;
    Ok(MomentumSample {
        point: s.to_vec(),
        tangential,
        normal,
    })
}
