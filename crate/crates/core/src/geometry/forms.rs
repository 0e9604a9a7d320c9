//! Pointwise first and second fundamental forms of a parametrized hypersurface.
//!
//! Sign conventions: `∇_i S_j = N B_ij` and `∇_i N = -B_i^j S_j` with the
//! outward normal, so a round sphere of radius `R` has `B_ij = -S_ij / R` and
//! mean curvature `H = B_i^i = -n / R`.

use nalgebra::{DMatrix, DVector};

use crate::error::{CmsError, Result};
use crate::geometry::param::{Jet, ParamFamily};

/// Floor on the metric determinant below which an embedding is singular.
pub const DET_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalForms {
    pub position: DVector<f64>,
    /// Shift tensor `X^α_i`: column `i` is the tangent vector `S_i`.
    pub shift: DMatrix<f64>,
    /// Dual shift `X_α^i = S^ij δ_αβ X^β_j`, an `n × (n+1)` matrix.
    pub dual_shift: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    /// `√|S|`.
    pub area_element: f64,
    pub normal: DVector<f64>,
    /// `B_ij`.
    pub curvature: DMatrix<f64>,
    /// `H = S^ij B_ij`.
    pub mean_curvature: f64,
    /// `christoffel[k][(i, j)] = Γ^k_ij`.
    pub christoffel: Vec<DMatrix<f64>>,
    /// `metric_derivatives[k][(i, j)] = ∂_k S_ij`.
    pub metric_derivatives: Vec<DMatrix<f64>>,
    /// `normal_derivatives[i] = ∂_i N`.
    pub normal_derivatives: Vec<DVector<f64>>,
    /// `hessian[i][j] = ∂_i ∂_j R`.
    pub hessian: Vec<Vec<DVector<f64>>>,
}

impl FundamentalForms {
    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn tangent(&self, i: usize) -> DVector<f64> {
        self.shift.column(i).into_owned()
    }

    /// Mixed curvature `B^i_j = S^ik B_kj` (row `i`, column `j`).
    pub fn curvature_mixed(&self) -> DMatrix<f64> {
        &self.metric_inv * &self.curvature
    }

    /// Principal curvatures in ascending order (eigenvalues of `B^i_j`).
    pub fn principal_curvatures(&self) -> Vec<f64> {
        // B^i_j is self-adjoint w.r.t. S; symmetrize with the Cholesky factor.
        let chol = self
            .metric
            .clone()
            .cholesky()
            .expect("metric of a regular embedding is positive definite");
        let l_inv = chol
            .l()
            .try_inverse()
            .expect("Cholesky factor is invertible");
        let sym = &l_inv * &self.curvature * l_inv.transpose();
        let sym = (&sym + sym.transpose()) * 0.5;
        let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values
    }

    /// Gaussian (Gauss–Kronecker) curvature `det(B^i_j)`.
    pub fn gauss_curvature(&self) -> f64 {
        self.curvature_mixed().determinant()
    }

    /// Raise a covector: `v^i = S^ij v_j`.
    pub fn raise(&self, lower: &DVector<f64>) -> DVector<f64> {
        &self.metric_inv * lower
    }

    /// Lower a vector: `v_i = S_ij v^j`.
    pub fn lower(&self, upper: &DVector<f64>) -> DVector<f64> {
        &self.metric * upper
    }

    /// Ambient image `A^i S_i` of surface components.
    pub fn push_forward(&self, upper: &DVector<f64>) -> DVector<f64> {
        &self.shift * upper
    }

    /// Worst violation of the metric-inverse, normal and mixed-shift identities.
    pub fn identity_defect(&self) -> f64 {
        let n = self.dim();
        let eye = DMatrix::<f64>::identity(n, n);
        let inverse = (&self.metric_inv * &self.metric - &eye).amax();
        let unit = (self.normal.norm() - 1.0).abs();
        let orthogonal = (self.shift.transpose() * &self.normal).amax();
        let mixed = (&self.dual_shift * &self.shift - &eye).amax();
        let symmetric = (&self.curvature - self.curvature.transpose()).amax();
        inverse.max(unit).max(orthogonal).max(mixed).max(symmetric)
    }
}

/// Vector `n` with `n · v = det[v, S_1, …, S_n]` for every `v`; orthogonal to
/// all `S_i`, with length equal to the parallelotope volume `√|S|`.
pub fn generalized_cross(columns: &[DVector<f64>]) -> DVector<f64> {
    let dim = columns.len() + 1;
    let mut out = DVector::zeros(dim);
    for alpha in 0..dim {
        let minor = DMatrix::from_fn(columns.len(), columns.len(), |row, col| {
            let r = if row < alpha { row } else { row + 1 };
            columns[col][r]
        });
        let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
        out[alpha] = sign * minor.determinant();
    }
    out
}

/// Assemble every pointwise quantity from a jet. `inside` is a point on the
/// inner side used to orient the normal outward.
pub fn fundamental_forms_from_jet(jet: &Jet, inside: &DVector<f64>) -> Result<FundamentalForms> {
    let n = jet.dim();
    let shift = DMatrix::from_columns(&jet.tangents);
    let metric = shift.transpose() * &shift;
    let det = metric.determinant();
    if !(det > DET_FLOOR) {
        return Err(CmsError::SingularEmbedding {
            det,
            floor: DET_FLOOR,
        });
    }
    let metric_inv = metric
        .clone()
        .try_inverse()
        .ok_or(CmsError::SingularEmbedding {
            det,
            floor: DET_FLOOR,
        })?;
    let dual_shift = &metric_inv * shift.transpose();

    let raw = generalized_cross(&jet.tangents);
    let raw_norm = raw.norm();
    let orientation = if raw.dot(&(&jet.position - inside)) >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let normal = &raw * (orientation / raw_norm);

    // ∂_i of the raw cross product is multilinear in the tangents.
    let normal_derivatives: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let mut d_raw = DVector::zeros(n + 1);
            for k in 0..n {
                let mut cols = jet.tangents.clone();
                cols[k] = jet.second[i][k].clone();
                d_raw += generalized_cross(&cols);
            }
            let d_raw = d_raw * orientation;
            (&d_raw - &normal * normal.dot(&d_raw)) / raw_norm
        })
        .collect();

    let curvature = DMatrix::from_fn(n, n, |i, j| {
        0.5 * (normal.dot(&jet.second[i][j]) + normal.dot(&jet.second[j][i]))
    });
    let mean_curvature = (&metric_inv * &curvature).trace();

    let metric_derivatives: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                jet.second[k][i].dot(&jet.tangents[j]) + jet.tangents[i].dot(&jet.second[k][j])
            })
        })
        .collect();
    // Γ^k_ij = ½ S^kl (∂_i S_jl + ∂_j S_il − ∂_l S_ij)
    let christoffel: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                (0..n)
                    .map(|l| {
                        0.5 * metric_inv[(k, l)]
                            * (metric_derivatives[i][(j, l)] + metric_derivatives[j][(i, l)]
                                - metric_derivatives[l][(i, j)])
                    })
                    .sum()
            })
        })
        .collect();

    Ok(FundamentalForms {
        position: jet.position.clone(),
        shift,
        dual_shift,
        metric,
        metric_inv,
        area_element: det.sqrt(),
        normal,
        curvature,
        mean_curvature,
        christoffel,
        metric_derivatives,
        normal_derivatives,
        hessian: jet.second.clone(),
    })
}

/// Fundamental forms of a parametric family at chart point `s` and time `t`.
pub fn fundamental_forms_param(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
) -> Result<FundamentalForms> {
    family.forms(s, t)
}

/// Split an ambient vector into its normal component `A·N` and surface
/// components `A^i = X_α^i A^α`.
pub fn decompose_ambient_vector(
    forms: &FundamentalForms,
    ambient: &DVector<f64>,
) -> (f64, DVector<f64>) {
    (ambient.dot(&forms.normal), &forms.dual_shift * ambient)
}

/// Inverse of [`decompose_ambient_vector`]: `a N + A^i S_i`.
pub fn compose_ambient_vector(
    forms: &FundamentalForms,
    normal_part: f64,
    tangential: &DVector<f64>,
) -> DVector<f64> {
    &forms.normal * normal_part + &forms.shift * tangential
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{AnalyticFamily, FamilySpec, Schedule};
    use crate::geometry::param::{ChartAxis, ChartDomain, FnEmbedding};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn unit_sphere() -> ParamFamily {
        AnalyticFamily::new(FamilySpec::sphere(2, Schedule::constant(1.0)))
            .unwrap()
            .into_family()
    }

    #[test]
    fn equator_of_unit_sphere() {
        let forms = fundamental_forms_param(&unit_sphere(), &[PI / 2.0, 0.3], 0.0).unwrap();
        assert_abs_diff_eq!(forms.metric, DMatrix::identity(2, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(forms.curvature, -DMatrix::identity(2, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(forms.mean_curvature, -2.0, epsilon = 1e-14);
        // outward
        assert!(forms.normal.dot(&forms.position) > 0.99);
    }

    #[test]
    fn flat_patch_has_no_curvature() {
        let plane = FnEmbedding {
            name: "plane".into(),
            dim: 2,
            domain: ChartDomain::new(vec![
                ChartAxis::bounded(-1.0, 1.0),
                ChartAxis::bounded(-1.0, 1.0),
            ]),
            map: |s: &[f64], _t: f64| DVector::from_vec(vec![s[0], s[1], 0.0]),
            center: DVector::from_vec(vec![0.0, 0.0, -1.0]),
        };
        let family = ParamFamily::from_embedding(plane);
        let forms = family.forms(&[0.2, -0.4], 0.0).unwrap();
        assert_abs_diff_eq!(forms.curvature, DMatrix::zeros(2, 2), epsilon = 1e-8);
        assert_abs_diff_eq!(forms.mean_curvature, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(forms.normal[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let squashed = FnEmbedding {
            name: "line".into(),
            dim: 2,
            domain: ChartDomain::new(vec![
                ChartAxis::bounded(-1.0, 1.0),
                ChartAxis::bounded(-1.0, 1.0),
            ]),
            map: |s: &[f64], _t: f64| {
                DVector::from_vec(vec![s[0] + s[1], 2.0 * (s[0] + s[1]), 0.0])
            },
            center: DVector::zeros(3),
        };
        let err = ParamFamily::from_embedding(squashed)
            .forms(&[0.1, 0.1], 0.0)
            .unwrap_err();
        assert!(matches!(err, CmsError::SingularEmbedding { .. }));
    }

    #[test]
    fn decomposition_of_normal_and_tangent() {
        let forms = fundamental_forms_param(&unit_sphere(), &[PI / 2.0, 0.0], 0.0).unwrap();
        let (a, tang) = decompose_ambient_vector(&forms, &forms.normal.clone());
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tang.amax(), 0.0, epsilon = 1e-15);
        let (a, tang) = decompose_ambient_vector(&forms, &forms.tangent(0));
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tang, DVector::from_vec(vec![1.0, 0.0]), epsilon = 1e-15);
    }

    #[test]
    fn generalized_cross_in_the_plane_and_space() {
        let n = generalized_cross(&[DVector::from_vec(vec![1.0, 0.0])]);
        assert_abs_diff_eq!(n, DVector::from_vec(vec![0.0, -1.0]), epsilon = 0.0);
        let n = generalized_cross(&[
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
        ]);
        assert_abs_diff_eq!(n, DVector::from_vec(vec![0.0, 0.0, 1.0]), epsilon = 0.0);
    }
}
