//! Transport theorems for surface and volume integrals and the energy
//! variations built on them. Each function returns `|LHS − RHS|` where the
//! left side is a finite difference in time of a quadrature.

use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{CmsError, Result};
use crate::geometry::param::ParamFamily;
use crate::geometry::quadrature::{interior_integral, ChartQuadrature};
use crate::verify::stencil::{chart_derivative, derivative, scalar_derivative};
use crate::verify::VerifyOptions;

/// Scalar field on the surface, given the chart point, its position and time.
pub type SurfaceField = Arc<dyn Fn(&[f64], &DVector<f64>, f64) -> f64 + Send + Sync>;
/// Scalar field on ambient space.
pub type AmbientField = Arc<dyn Fn(&DVector<f64>, f64) -> f64 + Send + Sync>;

/// Fields used by the integral and energy checks.
#[derive(Clone)]
pub struct TestFields {
    /// Integrand of the surface-integral theorem.
    pub surface: SurfaceField,
    /// Integrand of the volume-integral theorem.
    pub ambient: AmbientField,
    /// Density at the reference time; later densities follow the continuity law.
    pub density: SurfaceField,
    /// Volumetric energy density `P(x, t)`.
    pub pressure: AmbientField,
    /// Surface tension `σ(s, t)`.
    pub tension: SurfaceField,
}

impl std::fmt::Debug for TestFields {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("TestFields { .. }")
    }
}

impl Default for TestFields {
    fn default() -> Self {
        Self {
            surface: Arc::new(|_s, x, t| {
                let z = x[x.len() - 1];
                (1.0 + 0.3 * t) * (1.0 + 0.5 * x[0] * z) + x[1]
            }),
            ambient: Arc::new(|x, t| {
                x[0] * x[0] + 0.5 * x[1] * x[x.len() - 1] + t * x[x.len() - 1] + 1.0
            }),
            density: Arc::new(|s, _x, _t| {
                let last = s[s.len() - 1];
                let polar = if s.len() > 1 { s[0].sin() } else { 1.0 };
                1.0 + 0.25 * polar * last.cos()
            }),
            pressure: Arc::new(|x, t| 0.5 + 0.3 * x[0] + 0.2 * t * x[1]),
            tension: Arc::new(|s, _x, t| 1.0 + 0.2 * s[0].cos() * (1.0 + t)),
        }
    }
}

impl TestFields {
    /// Constant fields: `F = 1`, `ρ = 1`, `P = p`, `σ = sigma`.
    pub fn constant(p: f64, sigma: f64) -> Self {
        Self {
            surface: Arc::new(|_, _, _| 1.0),
            ambient: Arc::new(|_, _| 1.0),
            density: Arc::new(|_, _, _| 1.0),
            pressure: Arc::new(move |_, _| p),
            tension: Arc::new(move |_, _, _| sigma),
        }
    }
}

fn quadrature(family: &ParamFamily, options: &VerifyOptions) -> ChartQuadrature {
    match &options.quadrature_counts {
        Some(counts) => ChartQuadrature::new(&family.domain(), counts),
        None => ChartQuadrature::standard(&family.domain()),
    }
}

fn field_at(family: &ParamFamily, field: &SurfaceField, s: &[f64], t: f64) -> f64 {
    field(s, &family.position(s, t), t)
}

/// `∫ F dS`.
fn surface_integral(
    family: &ParamFamily,
    quad: &ChartQuadrature,
    field: &SurfaceField,
    t: f64,
) -> Result<f64> {
    quad.integrate_surface(family, t, |s| Ok(field_at(family, field, s, t)))
}

/// `∇̇F = ∂_t F − V^k ∂_k F` for a chart field.
fn invariant_time_derivative(
    family: &ParamFamily,
    field: &SurfaceField,
    s: &[f64],
    t: f64,
    h: f64,
    tangential: &DVector<f64>,
    options: &VerifyOptions,
) -> Result<f64> {
    let dt = scalar_derivative(|t| Ok(field_at(family, field, s, t)), t, h, options.scheme)?;
    let mut convection = 0.0;
    for k in 0..tangential.len() {
        if tangential[k] == 0.0 {
            continue;
        }
        let dk = chart_derivative(
            |q| {
                Ok(nalgebra::DMatrix::from_element(
                    1,
                    1,
                    field_at(family, field, q, t),
                ))
            },
            s,
            k,
            options.spatial_step,
        )?[(0, 0)];
        convection += tangential[k] * dk;
    }
    Ok(dt - convection)
}

fn sum_weighted<F>(quad: &ChartQuadrature, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let values: Result<Vec<f64>> = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(s, w)| Ok(w * f(s)?))
        .collect();
    Ok(crate::geometry::quadrature::accurate_sum(&values?))
}

/// `d/dt ∫F dS = ∫(∇̇F − C H F) dS` on a closed surface.
pub fn surface_theorem(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    let quad = quadrature(family, options);
    let field = &options.fields.surface;
    let lhs = scalar_derivative(
        |t| surface_integral(family, &quad, field, t),
        t,
        h,
        options.scheme,
    )?;
    let rhs = sum_weighted(&quad, |s| {
        let k = family.kinematics(s, t)?;
        let f = field_at(family, field, s, t);
        let dot = invariant_time_derivative(family, field, s, t, h, &k.tangential, options)?;
        Ok(k.forms.area_element * (dot - k.normal_speed * k.forms.mean_curvature * f))
    })?;
    Ok((lhs - rhs).abs())
}

fn require_star(family: &ParamFamily, t: f64) -> Result<()> {
    if family.star_center(t).is_none() {
        return Err(CmsError::Domain(format!(
            "family {} has no star center; interior integrals are unavailable",
            family.name()
        )));
    }
    Ok(())
}

/// `d/dt ∫_Ω F dΩ = ∫_Ω ∂_t F dΩ + ∫ C F dS`.
pub fn volume_theorem(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    require_star(family, t)?;
    let quad = quadrature(family, options);
    let field = &options.fields.ambient;
    let lhs = scalar_derivative(
        |t| interior_integral(family, &quad, t, |x| field(x, t)),
        t,
        h,
        options.scheme,
    )?;
    let bulk = interior_integral(family, &quad, t, |x| {
        scalar_derivative(|t| Ok(field(x, t)), t, h, options.scheme).unwrap_or(f64::NAN)
    })?;
    let flux = sum_weighted(&quad, |s| {
        let k = family.kinematics(s, t)?;
        Ok(k.forms.area_element * k.normal_speed * field(&k.forms.position, t))
    })?;
    Ok((lhs - bulk - flux).abs())
}

/// Kinetic energy `T(τ) = ∫ ρ/2 |V|² dS` with `ρ √|S|` frozen at its
/// value at time `t` (the exact continuity-law solution on a fixed chart).
fn kinetic_energy(
    family: &ParamFamily,
    quad: &ChartQuadrature,
    density: &SurfaceField,
    t: f64,
    tau: f64,
) -> Result<f64> {
    sum_weighted(quad, |s| {
        let mass = field_at(family, density, s, t) * family.forms(s, t)?.area_element;
        let v = family.jet(s, tau).velocity;
        Ok(0.5 * mass * v.norm_squared())
    })
}

/// `dT/dt = ∫ ρ [C (∇̇C + 2V^i∇_iC + V^iV^jB_ij)
///            + V_j (∇̇V^j + V^i∇_iV^j − C∇^jC − C V^i B^j_i)] dS`.
pub fn kinetic_energy_theorem(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    let quad = quadrature(family, options);
    let density = &options.fields.density;
    let lhs = scalar_derivative(
        |tau| kinetic_energy(family, &quad, density, t, tau),
        t,
        h,
        options.scheme,
    )?;
    let rhs = sum_weighted(&quad, |s| {
        let k = family.kinematics(s, t)?;
        let n = k.dim();
        let forms = &k.forms;
        let rho = field_at(family, density, s, t);
        let c = k.normal_speed;
        let v = &k.tangential;

        let dc_dt = scalar_derivative(
            |t| Ok(family.kinematics(s, t)?.normal_speed),
            t,
            h,
            options.scheme,
        )?;
        let dot_c = dc_dt - v.dot(&k.grad_normal_speed);
        let dv_dt = derivative(
            |t| {
                let tang = family.kinematics(s, t)?.tangential;
                Ok(nalgebra::DMatrix::from_column_slice(n, 1, tang.as_slice()))
            },
            t,
            h,
            options.scheme,
        )?
        .column(0)
        .into_owned();
        // ∇̇V^j = ∂_t V^j − V^k ∇_k V^j + Γ̇^j_k V^k
        let gdot = k.time_connection();
        let dot_v = &dv_dt - &k.cov_tangential * v + &gdot * v;

        let vbv = v.dot(&(&forms.curvature * v));
        let normal_part = dot_c + 2.0 * v.dot(&k.grad_normal_speed) + vbv;
        let mixed = forms.curvature_mixed();
        let tangential_part =
            &dot_v + &k.cov_tangential * v - k.grad_normal_speed_up() * c - (&mixed * v) * c;
        let v_lower = k.tangential_lower();
        Ok(forms.area_element * rho * (c * normal_part + v_lower.dot(&tangential_part)))
    })?;
    Ok((lhs - rhs).abs())
}

/// `d/dt [∫_Ω P dΩ + ∫σ dS] = ∫_Ω ∂_t P dΩ + ∫ ∇̇σ dS + ∫ C (P − σH) dS`.
pub fn potential_energy_theorem(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    require_star(family, t)?;
    let quad = quadrature(family, options);
    let pressure = &options.fields.pressure;
    let tension = &options.fields.tension;
    let energy = |tau: f64| -> Result<f64> {
        Ok(interior_integral(family, &quad, tau, |x| pressure(x, tau))?
            + surface_integral(family, &quad, tension, tau)?)
    };
    let lhs = scalar_derivative(energy, t, h, options.scheme)?;
    let bulk = interior_integral(family, &quad, t, |x| {
        scalar_derivative(|t| Ok(pressure(x, t)), t, h, options.scheme).unwrap_or(f64::NAN)
    })?;
    let surface = sum_weighted(&quad, |s| {
        let k = family.kinematics(s, t)?;
        let sigma = field_at(family, tension, s, t);
        let dot_sigma =
            invariant_time_derivative(family, tension, s, t, h, &k.tangential, options)?;
        let p = pressure(&k.forms.position, t);
        Ok(k.forms.area_element
            * (dot_sigma + k.normal_speed * (p - sigma * k.forms.mean_curvature)))
    })?;
    Ok((lhs - bulk - surface).abs())
}
