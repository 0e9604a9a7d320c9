//! Pointwise transport identities. Each function returns the largest absolute
//! component of `LHS − RHS` at one chart point; left-hand sides use finite
//! differences in time, right-hand sides exact first jets.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::geometry::param::ParamFamily;
use crate::verify::stencil::{chart_derivative, derivative};
use crate::verify::{Mutation, VerifyOptions};

fn column(v: DVector<f64>) -> DMatrix<f64> {
    let n = v.len();
    DMatrix::from_column_slice(n, 1, v.as_slice())
}

/// `∂_t S_ij = ∇_i V_j + ∇_j V_i − 2 C B_ij`.
pub fn metric(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    let k = family.kinematics(s, t)?;
    let lhs = derivative(|t| Ok(family.forms(s, t)?.metric), t, h, options.scheme)?;
    let bending = match options.mutation {
        Some(Mutation::FlipMetricBending) => 2.0,
        _ => -2.0,
    };
    let cov = k.cov_tangential_lower();
    let rhs = &cov + cov.transpose() + &k.forms.curvature * (bending * k.normal_speed);
    Ok((lhs - rhs).amax())
}

/// `∂_t √|S| = √|S| (∇_i V^i − C H)`.
pub fn area(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    let k = family.kinematics(s, t)?;
    let lhs = derivative(
        |t| {
            Ok(DMatrix::from_element(
                1,
                1,
                family.forms(s, t)?.area_element,
            ))
        },
        t,
        h,
        options.scheme,
    )?[(0, 0)];
    let rhs = k.forms.area_element
        * (k.tangential_divergence() - k.normal_speed * k.forms.mean_curvature);
    Ok((lhs - rhs).abs())
}

/// `∇̇S_ij = ∂_t S_ij − Γ̇^k_i S_kj − Γ̇^k_j S_ik = 0` (`∇_k S_ij` vanishes).
pub fn metrilinic(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    let k = family.kinematics(s, t)?;
    let dt = derivative(|t| Ok(family.forms(s, t)?.metric), t, h, options.scheme)?;
    let gdot = k.time_connection();
    let metric = &k.forms.metric;
    let lhs = dt - gdot.transpose() * metric - metric * &gdot;
    Ok(lhs.amax())
}

/// `∇̇N = ∂_t N − V^k ∂_k N`, ambient components.
fn normal_time_derivative(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
    h: f64,
    options: &VerifyOptions,
    k: &crate::geometry::kinematics::PointKinematics,
) -> Result<DVector<f64>> {
    let dt = derivative(
        |t| Ok(column(family.forms(s, t)?.normal)),
        t,
        h,
        options.scheme,
    )?;
    let mut lhs = dt.column(0).into_owned();
    for (kk, dn) in k.forms.normal_derivatives.iter().enumerate() {
        lhs -= dn * k.tangential[kk];
    }
    Ok(lhs)
}

/// `∇̇N = −(∇^i C) S_i`.
pub fn normal(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    let k = family.kinematics(s, t)?;
    let lhs = normal_time_derivative(family, s, t, h, options, &k)?;
    let rhs = -(&k.forms.shift * k.grad_normal_speed_up());
    Ok((lhs - rhs).amax())
}

/// `∇̇B_ij = ∇_i∇_j C + C B_ik B^k_j`, with `∇_k B_ij` and `∂_i∂_j C` from
/// five-point chart differences of exact first-jet quantities.
pub fn curvature(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<f64> {
    let k = family.kinematics(s, t)?;
    let n = k.dim();
    let hs = options.spatial_step;
    let forms = &k.forms;
    let b = &forms.curvature;
    let gamma = &forms.christoffel;

    let dt = derivative(|t| Ok(family.forms(s, t)?.curvature), t, h, options.scheme)?;
    let mut convection = DMatrix::zeros(n, n);
    for kk in 0..n {
        if k.tangential[kk] == 0.0 {
            continue;
        }
        let db = chart_derivative(|q| Ok(family.forms(q, t)?.curvature), s, kk, hs)?;
        // ∇_k B_ij = ∂_k B_ij − Γ^m_ki B_mj − Γ^m_kj B_im
        let cov = DMatrix::from_fn(n, n, |i, j| {
            db[(i, j)]
                - (0..n)
                    .map(|m| gamma[m][(kk, i)] * b[(m, j)] + gamma[m][(kk, j)] * b[(i, m)])
                    .sum::<f64>()
        });
        convection += cov * k.tangential[kk];
    }
    let gdot = k.time_connection();
    let lhs = dt - convection - gdot.transpose() * b - b * &gdot;

    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let d = chart_derivative(
            |q| Ok(column(family.kinematics(q, t)?.grad_normal_speed)),
            s,
            i,
            hs,
        )?;
        for j in 0..n {
            hess[(i, j)] = d[(j, 0)];
        }
    }
    let hess = (&hess + hess.transpose()) * 0.5;
    let cov_hess = DMatrix::from_fn(n, n, |i, j| {
        hess[(i, j)]
            - (0..n)
                .map(|m| gamma[m][(i, j)] * k.grad_normal_speed[m])
                .sum::<f64>()
    });
    let quadratic = b * &forms.metric_inv * b;
    let rhs = cov_hess * options.curvature_hessian_sign + quadratic * k.normal_speed;
    Ok((lhs - rhs).amax())
}

/// The three Thomas residuals `[∇̇N, N·∇_i V, N·∇̇S_i]`.
///
/// `N·∇_i V = ∇_i C + V^j B_ij` holds in general; the `V^j B_ij` term
/// disappears only when the tangential velocity does. `∇̇S_i` is assembled
/// from its definition, `∂_t S_i − V^k ∇_k S_i − Γ̇^m_i S_m`, and `∇_i C` in
/// the second identity comes from chart differences of `C`, independent of
/// the jet-based gradient.
pub fn thomas(
    family: &ParamFamily,
    s: &[f64],
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<[f64; 3]> {
    let k = family.kinematics(s, t)?;
    let n = k.dim();
    let forms = &k.forms;
    let literal = options.literal_thomas;

    let normal_res = {
        let lhs = normal_time_derivative(family, s, t, h, options, &k)?;
        let rhs = -(&forms.shift * k.grad_normal_speed_up());
        (lhs - rhs).amax()
    };

    let bv = &forms.curvature * &k.tangential;
    let mut grad_v_res: f64 = 0.0;
    for i in 0..n {
        let dc = chart_derivative(
            |q| {
                Ok(DMatrix::from_element(
                    1,
                    1,
                    family.kinematics(q, t)?.normal_speed,
                ))
            },
            s,
            i,
            options.spatial_step,
        )?[(0, 0)];
        let lhs = forms.normal.dot(&k.velocity_gradient[i]);
        let rhs = if literal { dc } else { dc + bv[i] };
        grad_v_res = grad_v_res.max((lhs - rhs).abs());
    }

    let gdot = k.time_connection();
    let mut basis_res: f64 = 0.0;
    for i in 0..n {
        let dot_s = if literal {
            // ∇̇S_i = ∇_i V − C B_i^k S_k
            let mixed = forms.curvature_mixed();
            let mut v = k.velocity_gradient[i].clone();
            for kk in 0..n {
                v -= forms.shift.column(kk) * (k.normal_speed * mixed[(kk, i)]);
            }
            v
        } else {
            let dt = derivative(
                |t| Ok(column(family.forms(s, t)?.tangent(i))),
                t,
                h,
                options.scheme,
            )?;
            let mut v = dt.column(0).into_owned();
            for kk in 0..n {
                // ∇_k S_i = ∂_k S_i − Γ^m_ki S_m
                let mut cov = forms.hessian[kk][i].clone();
                for m in 0..n {
                    cov -= forms.shift.column(m) * forms.christoffel[m][(kk, i)];
                }
                v -= cov * k.tangential[kk];
            }
            for m in 0..n {
                v -= forms.shift.column(m) * gdot[(m, i)];
            }
            v
        };
        basis_res = basis_res.max((forms.normal.dot(&dot_s) - k.grad_normal_speed[i]).abs());
    }
    Ok([normal_res, grad_v_res, basis_res])
}
