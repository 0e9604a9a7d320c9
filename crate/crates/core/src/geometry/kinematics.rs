//! Velocity decomposition `V = C N + V^i S_i` and its first surface derivatives.

use nalgebra::{DMatrix, DVector};

use crate::geometry::forms::FundamentalForms;
use crate::geometry::param::Jet;

/// Per-point normal speed `C` and tangential components `V^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointVelocity {
    pub normal_speed: f64,
    pub tangential: DVector<f64>,
}

impl PointVelocity {
    pub fn from_ambient(forms: &FundamentalForms, velocity: &DVector<f64>) -> Self {
        Self {
            normal_speed: velocity.dot(&forms.normal),
            tangential: &forms.dual_shift * velocity,
        }
    }

    /// `C N + V^i S_i`.
    pub fn ambient(&self, forms: &FundamentalForms) -> DVector<f64> {
        &forms.normal * self.normal_speed + &forms.shift * &self.tangential
    }
}

/// Geometry and motion at one chart point, with exact first surface
/// derivatives assembled from the jet.
#[derive(Debug, Clone)]
pub struct PointKinematics {
    pub forms: FundamentalForms,
    /// Ambient velocity `V = ∂_t R`.
    pub velocity: DVector<f64>,
    /// `C = V · N`.
    pub normal_speed: f64,
    /// `V^i = X_α^i V^α`.
    pub tangential: DVector<f64>,
    /// `∂_i V` (ambient components).
    pub velocity_gradient: Vec<DVector<f64>>,
    /// `∇_i C = ∂_i C`.
    pub grad_normal_speed: DVector<f64>,
    /// `∇_j V^i` stored at `(i, j)`.
    pub cov_tangential: DMatrix<f64>,
}

impl PointKinematics {
    pub fn new(forms: FundamentalForms, jet: &Jet) -> Self {
        let n = forms.dim();
        let velocity = jet.velocity.clone();
        let normal_speed = velocity.dot(&forms.normal);
        let tangential = &forms.dual_shift * &velocity;

        let grad_normal_speed = DVector::from_fn(n, |i, _| {
            jet.velocity_gradient[i].dot(&forms.normal) + velocity.dot(&forms.normal_derivatives[i])
        });

        // V^i = S^ik (S_k · V); differentiate each factor.
        let projections = DVector::from_fn(n, |k, _| jet.tangents[k].dot(&velocity));
        let mut partial = DMatrix::zeros(n, n);
        for j in 0..n {
            let d_inv = -(&forms.metric_inv * &forms.metric_derivatives[j] * &forms.metric_inv);
            let d_proj = DVector::from_fn(n, |k, _| {
                jet.second[j][k].dot(&velocity) + jet.tangents[k].dot(&jet.velocity_gradient[j])
            });
            let column = d_inv * &projections + &forms.metric_inv * d_proj;
            partial.set_column(j, &column);
        }
        let cov_tangential = DMatrix::from_fn(n, n, |i, j| {
            partial[(i, j)]
                + (0..n)
                    .map(|k| forms.christoffel[i][(j, k)] * tangential[k])
                    .sum::<f64>()
        });

        Self {
            forms,
            velocity,
            normal_speed,
            tangential,
            velocity_gradient: jet.velocity_gradient.clone(),
            grad_normal_speed,
            cov_tangential,
        }
    }

    pub fn dim(&self) -> usize {
        self.forms.dim()
    }

    pub fn point_velocity(&self) -> PointVelocity {
        PointVelocity {
            normal_speed: self.normal_speed,
            tangential: self.tangential.clone(),
        }
    }

    /// Time connection `Γ̇^i_j = ∇_j V^i − C B^i_j`, stored at `(i, j)`.
    pub fn time_connection(&self) -> DMatrix<f64> {
        &self.cov_tangential - self.forms.curvature_mixed() * self.normal_speed
    }

    /// `V_i = S_ij V^j`.
    pub fn tangential_lower(&self) -> DVector<f64> {
        self.forms.lower(&self.tangential)
    }

    /// `∇_i V_j` stored at `(i, j)`.
    pub fn cov_tangential_lower(&self) -> DMatrix<f64> {
        // ∇_i V_j = S_jk ∇_i V^k
        (&self.forms.metric * &self.cov_tangential).transpose()
    }

    /// Surface divergence `∇_i V^i`.
    pub fn tangential_divergence(&self) -> f64 {
        self.cov_tangential.trace()
    }

    /// `∇^i C = S^ij ∇_j C`.
    pub fn grad_normal_speed_up(&self) -> DVector<f64> {
        self.forms.raise(&self.grad_normal_speed)
    }
}
