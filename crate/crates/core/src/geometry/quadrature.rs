//! Quadrature over charts of closed parametric surfaces and their interiors.
//!
//! Periodic chart axes use the trapezoid rule, bounded axes Gauss–Legendre.
//! Bounded axes of the supported charts end at poles where `√|S|` vanishes, so
//! Gauss–Legendre nodes (which avoid the endpoints) integrate them cleanly.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{CmsError, Result};
use crate::geometry::param::{tensor_product, ChartDomain, ParamFamily};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let m = count.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(count, x);
            derivative = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(count, x);
        if dp != 0.0 {
            derivative = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule mapped to `[lo, hi]`.
pub fn gauss_legendre_on(count: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(count);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        x.iter().map(|xi| mid + half * xi).collect(),
        w.iter().map(|wi| wi * half).collect(),
    )
}

/// Tensor-product quadrature nodes on a chart.
#[derive(Debug, Clone)]
pub struct ChartQuadrature {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl ChartQuadrature {
    pub fn new(domain: &ChartDomain, counts: &[usize]) -> Self {
        assert_eq!(counts.len(), domain.dim(), "one count per chart axis");
        let mut per_axis_nodes = Vec::new();
        let mut per_axis_weights = Vec::new();
        for (axis, &count) in domain.axes.iter().zip(counts) {
            if axis.periodic {
                let h = axis.span() / count as f64;
                per_axis_nodes.push(
                    (0..count)
                        .map(|k| axis.lo + h * k as f64)
                        .collect::<Vec<_>>(),
                );
                per_axis_weights.push(vec![h; count]);
            } else {
                let (x, w) = gauss_legendre_on(count, axis.lo, axis.hi);
                per_axis_nodes.push(x);
                per_axis_weights.push(w);
            }
        }
        let nodes = tensor_product(&per_axis_nodes);
        let weights = tensor_product(&per_axis_weights)
            .into_iter()
            .map(|ws| ws.iter().product())
            .collect();
        Self { nodes, weights }
    }

    /// 64 nodes per axis on 2-surfaces, 256 on curves, 24×24×48 on 3-manifolds.
    pub fn standard(domain: &ChartDomain) -> Self {
        let counts: Vec<usize> = match domain.dim() {
            1 => vec![256],
            2 => vec![64, 64],
            3 => vec![24, 24, 48],
            n => vec![16; n],
        };
        Self::new(domain, &counts)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w f(s)` with the chart measure only (no area element).
    pub fn integrate_chart<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let values: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(s, w)| w * f(s))
            .collect();
        accurate_sum(&values)
    }

    /// `∫ f dS` over the family at time `t`; `f` receives the chart point.
    pub fn integrate_surface<F>(&self, family: &ParamFamily, t: f64, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        let values: Result<Vec<f64>> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(s, w)| {
                let forms = family.forms(s, t)?;
                Ok(w * forms.area_element * f(s)?)
            })
            .collect();
        Ok(accurate_sum(&values?))
    }
}

/// Total area (length, hypervolume) of the family at time `t`.
pub fn family_area(family: &ParamFamily, quad: &ChartQuadrature, t: f64) -> Result<f64> {
    quad.integrate_surface(family, t, |_| Ok(1.0))
}

/// Enclosed volume `(1/(n+1)) ∮ R·N dS`.
pub fn family_volume(family: &ParamFamily, quad: &ChartQuadrature, t: f64) -> Result<f64> {
    let n = family.dim() as f64;
    let values: Result<Vec<f64>> = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(s, w)| {
            let forms = family.forms(s, t)?;
            Ok(w * forms.area_element * forms.position.dot(&forms.normal))
        })
        .collect();
    let volume = accurate_sum(&values?) / (n + 1.0);
    if volume < 0.0 {
        return Err(CmsError::Orientation(format!(
            "enclosed volume {volume:e} is negative; normals point inward"
        )));
    }
    Ok(volume)
}

/// Neumaier-compensated sum.
pub fn accurate_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &v in values {
        let next = sum + v;
        carry += if sum.abs() >= v.abs() {
            (sum - next) + v
        } else {
            (v - next) + sum
        };
        sum = next;
    }
    sum + carry
}

/// Number of radial Gauss–Legendre nodes in interior integrals.
pub const RADIAL_NODES: usize = 24;

/// `∫_Ω F dΩ` for a region star-shaped about the family's star center, using
/// the map `(s, λ) ↦ c + λ (R(s,t) − c)` with Jacobian
/// `λ^n |det[R − c, S_1, …, S_n]|`.
pub fn interior_integral<F>(
    family: &ParamFamily,
    quad: &ChartQuadrature,
    t: f64,
    field: F,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    let center = family
        .star_center(t)
        .ok_or_else(|| CmsError::Domain(format!("family {} is not star-shaped", family.name())))?;
    let n = family.dim();
    let (lambdas, lambda_weights) = gauss_legendre_on(RADIAL_NODES, 0.0, 1.0);
    let values: Vec<f64> = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(s, w)| {
            let jet = family.jet(s, t);
            let radial = &jet.position - &center;
            let mut cols = vec![radial.clone()];
            cols.extend(jet.tangents.iter().cloned());
            let jac = nalgebra::DMatrix::from_columns(&cols).determinant().abs();
            let line: Vec<f64> = lambdas
                .iter()
                .zip(&lambda_weights)
                .map(|(l, lw)| lw * l.powi(n as i32) * field(&(&center + &radial * *l)))
                .collect();
            let line = accurate_sum(&line);
            w * jac * line
        })
        .collect();
    Ok(accurate_sum(&values))
}
