//! Finite-difference stencils in time and along chart axes.

use nalgebra::DMatrix;

use crate::error::{CmsError, Result};

/// Time-differencing scheme used for the left-hand sides of identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeScheme {
    /// `(f(t+h) − f(t−h)) / 2h`.
    #[default]
    Centered,
    /// Five-point fourth-order centered difference.
    FivePoint,
}

impl TimeScheme {
    pub fn nominal_order(self) -> f64 {
        match self {
            TimeScheme::Centered => 2.0,
            TimeScheme::FivePoint => 4.0,
        }
    }
}

/// Derivative at `x` of a matrix-valued function by a centered rule.
pub fn derivative<F>(f: F, x: f64, h: f64, scheme: TimeScheme) -> Result<DMatrix<f64>>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
{
    if !(h > 0.0) {
        return Err(CmsError::Stencil(format!("step {h} must be positive")));
    }
    match scheme {
        TimeScheme::Centered => Ok((f(x + h)? - f(x - h)?) / (2.0 * h)),
        TimeScheme::FivePoint => {
            let (p1, m1, p2, m2) = (f(x + h)?, f(x - h)?, f(x + 2.0 * h)?, f(x - 2.0 * h)?);
            Ok(((p1 - m1) * 8.0 - (p2 - m2)) / (12.0 * h))
        }
    }
}

/// Scalar convenience wrapper around [`derivative`].
pub fn scalar_derivative<F>(f: F, x: f64, h: f64, scheme: TimeScheme) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(derivative(|y| Ok(DMatrix::from_element(1, 1, f(y)?)), x, h, scheme)?[(0, 0)])
}

/// `∂_k` of a chart function at `s` with the five-point rule.
pub fn chart_derivative<F>(f: F, s: &[f64], k: usize, h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<DMatrix<f64>>,
{
    derivative(
        |x| {
            let mut q = s.to_vec();
            q[k] = x;
            f(&q)
        },
        s[k],
        h,
        TimeScheme::FivePoint,
    )
}

/// `log₂(r(h) / r(h/2))`; NaN when either residual is zero.
pub fn order_estimate(coarse: f64, fine: f64) -> f64 {
    if coarse > 0.0 && fine > 0.0 {
        (coarse / fine).log2()
    } else {
        f64::NAN
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sine(x: f64) -> Result<DMatrix<f64>> {
        Ok(DMatrix::from_element(1, 1, x.sin()))
    }

    #[test]
    fn centered_is_second_order() {
        let e = |h: f64| {
            (derivative(sine, 0.7, h, TimeScheme::Centered).unwrap()[(0, 0)] - 0.7f64.cos()).abs()
        };
        assert_abs_diff_eq!(order_estimate(e(1e-2), e(5e-3)), 2.0, epsilon = 0.01);
    }

    #[test]
    fn five_point_is_fourth_order() {
        let e = |h: f64| {
            (derivative(sine, 0.7, h, TimeScheme::FivePoint).unwrap()[(0, 0)] - 0.7f64.cos()).abs()
        };
        assert_abs_diff_eq!(order_estimate(e(4e-2), e(2e-2)), 4.0, epsilon = 0.02);
    }

    #[test]
    fn chart_derivative_picks_the_axis() {
        let f = |s: &[f64]| Ok(DMatrix::from_element(1, 1, s[0] * s[1].powi(2)));
        let d = chart_derivative(f, &[2.0, 3.0], 1, 1e-2).unwrap();
        assert_abs_diff_eq!(d[(0, 0)], 12.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_step_is_rejected() {
        assert!(matches!(
            derivative(sine, 0.0, 0.0, TimeScheme::Centered),
            Err(CmsError::Stencil(_))
        ));
    }
}
