//! Real spherical harmonics with Schmidt semi-normalization, so that
//! `|Y_l^m| ≤ 1` on the sphere. Generic over dual numbers.

use num_dual::DualNum;

fn factorial_ratio(l: usize, m: usize) -> f64 {
    // (l − m)! / (l + m)!
    ((l - m + 1)..=(l + m)).fold(1.0, |acc, k| acc / k as f64)
}

/// Associated Legendre function `P_l^m(cos θ)` without the Condon–Shortley
/// phase, given `cos θ` and `sin θ`.
pub fn associated_legendre<D>(l: usize, m: usize, cos_theta: D, sin_theta: D) -> D
where
    D: DualNum<Primitive = f64> + Copy,
{
    assert!(m <= l, "order {m} exceeds degree {l}");
    let mut pmm = D::from(1.0);
    for k in 0..m {
        pmm *= sin_theta * (2 * k + 1) as f64;
    }
    if l == m {
        return pmm;
    }
    let mut prev = pmm;
    let mut curr = cos_theta * pmm * (2 * m + 1) as f64;
    for ll in (m + 2)..=l {
        let next =
            (cos_theta * curr * (2 * ll - 1) as f64 - prev * (ll + m - 1) as f64) / (ll - m) as f64;
        prev = curr;
        curr = next;
    }
    curr
}

/// Real harmonic `Y_l^m(θ, φ)`: `cos(mφ)` for `m ≥ 0`, `sin(|m|φ)` for `m < 0`.
pub fn real_harmonic<D>(l: usize, m: i64, theta: D, phi: D) -> D
where
    D: DualNum<Primitive = f64> + Copy,
{
    let order = m.unsigned_abs() as usize;
    let legendre = associated_legendre(l, order, theta.cos(), theta.sin());
    if order == 0 {
        return legendre;
    }
    let norm = (2.0 * factorial_ratio(l, order)).sqrt();
    let angular = if m > 0 {
        (phi * order as f64).cos()
    } else {
        (phi * order as f64).sin()
    };
    legendre * angular * norm
}

/// `Y_l^m` evaluated at the direction of a nonzero ambient 3-vector.
pub fn real_harmonic_at(l: usize, m: i64, direction: &nalgebra::Vector3<f64>) -> f64 {
    let u = direction.normalize();
    let theta = u.z.clamp(-1.0, 1.0).acos();
    let phi = u.y.atan2(u.x);
    real_harmonic(l, m, theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_degree_closed_forms() {
        let (theta, phi) = (0.7_f64, 1.9_f64);
        let (c, s) = (theta.cos(), theta.sin());
        assert_abs_diff_eq!(real_harmonic(0, 0, theta, phi), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(real_harmonic(1, 0, theta, phi), c, epsilon = 1e-15);
        assert_abs_diff_eq!(
            real_harmonic(2, 0, theta, phi),
            0.5 * (3.0 * c * c - 1.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            real_harmonic(1, 1, theta, phi),
            s * phi.cos(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            real_harmonic(1, -1, theta, phi),
            s * phi.sin(),
            epsilon = 1e-15
        );
        // Schmidt: sqrt(2·0!/4!)·3 s² = (√3/2) s²
        assert_abs_diff_eq!(
            real_harmonic(2, 2, theta, phi),
            3f64.sqrt() / 2.0 * s * s * (2.0 * phi).cos(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn bounded_by_one() {
        for l in 0..7 {
            for m in -(l as i64)..=(l as i64) {
                for i in 0..40 {
                    for j in 0..40 {
                        let theta = std::f64::consts::PI * i as f64 / 39.0;
                        let phi = 2.0 * std::f64::consts::PI * j as f64 / 40.0;
                        assert!(real_harmonic(l, m, theta, phi).abs() <= 1.0 + 1e-12);
                    }
                }
            }
        }
    }
}
