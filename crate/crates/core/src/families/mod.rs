//! Exact time-dependent embeddings used as verification oracles.
//!
//! Every family is evaluated through one generic map over dual numbers, so the
//! jet (position, tangents, second derivatives, velocity and its chart
//! gradient) is exact to rounding.

pub mod harmonics;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector, U1, U4};
use num_dual::{Dual2SVec64, DualNum};

use crate::error::{CmsError, Result};
use crate::geometry::kinematics::PointVelocity;
use crate::geometry::param::{ChartAxis, ChartDomain, Embedding, Jet, ParamFamily};

pub use harmonics::{real_harmonic, real_harmonic_at};

/// Polynomial schedule `c₀ + c₁ t + c₂ t² + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub coefficients: Vec<f64>,
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Self {
            coefficients: vec![value],
        }
    }

    pub fn linear(value: f64, rate: f64) -> Self {
        Self {
            coefficients: vec![value, rate],
        }
    }

    /// `value + rate·t + ½·acceleration·t²`.
    pub fn quadratic(value: f64, rate: f64, acceleration: f64) -> Self {
        Self {
            coefficients: vec![value, rate, 0.5 * acceleration],
        }
    }

    pub fn eval<D: DualNum<Primitive = f64> + Copy>(&self, t: D) -> D {
        self.coefficients
            .iter()
            .rev()
            .fold(D::from(0.0), |acc, &c| acc * t + c)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t)
    }

    pub fn rate(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * t + k as f64 * c)
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.iter().skip(1).all(|&c| c == 0.0)
    }
}

/// Base shape of a family before rigid motion and chart warping.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Round `n`-sphere centered at the origin.
    Sphere { dim: usize, radius: Schedule },
    /// Axis-aligned ellipsoid; `axes[α]` is the semi-axis along ambient axis
    /// `α`. The chart's polar axis is `polar_axis`.
    Ellipsoid {
        axes: Vec<Schedule>,
        polar_axis: usize,
    },
    /// Torus of revolution about the z-axis.
    Torus { major: Schedule, minor: Schedule },
    /// `r = R(t) (1 + a(t) Y_l^m(θ, φ))`.
    PerturbedSphere {
        radius: Schedule,
        degree: usize,
        order: i64,
        amplitude: Schedule,
    },
}

/// A shape plus optional rigid motion and a fixed smooth chart reparametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub label: String,
    pub shape: Shape,
    /// Constant translation velocity `u`: `R ↦ R + t u`.
    pub translation: Option<Vec<f64>>,
    /// Angular speed of a rotation in the `x₀x₁` plane about the origin.
    pub rotation: Option<f64>,
    /// Strength `ε ∈ (−1, 1)` of the chart warp
    /// `s ↦ s + ε (L / 2π) sin(2π (s − lo) / L)` on every axis.
    pub warp: Option<f64>,
    /// Time window on which the family must stay regular.
    pub window: (f64, f64),
}

/// Names accepted by [`FamilySpec::named`].
pub const FAMILY_NAMES: &[&str] = &[
    "static",
    "sphere",
    "accelerating-sphere",
    "circle",
    "sphere3",
    "ellipsoid",
    "translate",
    "perturbed",
    "rotating",
    "spin",
    "torus",
    "warped-sphere",
];

impl FamilySpec {
    fn from_shape(label: &str, shape: Shape) -> Self {
        Self {
            label: label.to_string(),
            shape,
            translation: None,
            rotation: None,
            warp: None,
            window: (-0.25, 0.25),
        }
    }

    pub fn sphere(dim: usize, radius: Schedule) -> Self {
        Self::from_shape("sphere", Shape::Sphere { dim, radius })
    }

    pub fn ellipsoid(axes: Vec<Schedule>, polar_axis: usize) -> Self {
        Self::from_shape("ellipsoid", Shape::Ellipsoid { axes, polar_axis })
    }

    pub fn torus(major: Schedule, minor: Schedule) -> Self {
        Self::from_shape("torus", Shape::Torus { major, minor })
    }

    pub fn perturbed_sphere(
        radius: Schedule,
        degree: usize,
        order: i64,
        amplitude: Schedule,
    ) -> Self {
        Self::from_shape(
            "perturbed",
            Shape::PerturbedSphere {
                radius,
                degree,
                order,
                amplitude,
            },
        )
    }

    pub fn translating(mut self, velocity: Vec<f64>) -> Self {
        self.translation = Some(velocity);
        self
    }

    pub fn rotating(mut self, angular_speed: f64) -> Self {
        self.rotation = Some(angular_speed);
        self
    }

    pub fn warped(mut self, strength: f64) -> Self {
        self.warp = Some(strength);
        self
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = (lo, hi);
        self
    }

    /// Predefined families used by the verifier and the CLI.
    pub fn named(name: &str) -> Result<Self> {
        let spec = match name {
            "static" => {
                Self::perturbed_sphere(Schedule::constant(1.0), 3, 2, Schedule::constant(0.2))
            }
            "sphere" => Self::sphere(2, Schedule::linear(1.0, 0.5)),
            "accelerating-sphere" => Self::sphere(2, Schedule::quadratic(1.0, 0.5, 0.8)),
            "circle" => Self::sphere(1, Schedule::linear(1.0, 0.5)),
            "sphere3" => Self::sphere(3, Schedule::linear(1.0, 0.5)),
            "ellipsoid" => Self::ellipsoid(
                vec![
                    Schedule::linear(1.5, 0.3),
                    Schedule::quadratic(1.0, -0.2, 0.2),
                    Schedule::linear(0.8, 0.25),
                ],
                2,
            ),
            "translate" => Self::ellipsoid(
                vec![
                    Schedule::constant(1.3),
                    Schedule::constant(1.0),
                    Schedule::constant(0.8),
                ],
                2,
            )
            .translating(vec![0.3, -0.2, 0.5]),
            "perturbed" => {
                Self::perturbed_sphere(Schedule::linear(1.0, 0.1), 3, 2, Schedule::linear(0.1, 0.2))
            }
            "rotating" => {
                Self::perturbed_sphere(Schedule::constant(1.0), 3, 2, Schedule::constant(0.2))
                    .rotating(0.7)
            }
            "spin" => Self::sphere(2, Schedule::constant(1.0)).rotating(0.9),
            "torus" => Self::torus(Schedule::constant(2.0), Schedule::linear(0.6, 0.2)),
            "warped-sphere" => Self::sphere(2, Schedule::linear(1.0, 0.5)).warped(0.3),
            other => {
                return Err(CmsError::Config(format!(
                    "unknown family '{other}' (expected one of {})",
                    FAMILY_NAMES.join(", ")
                )))
            }
        };
        Ok(spec.labeled(name))
    }

    /// Surface dimension `n`.
    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Sphere { dim, .. } => *dim,
            Shape::Ellipsoid { axes, .. } => axes.len() - 1,
            Shape::Torus { .. } | Shape::PerturbedSphere { .. } => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(CmsError::Domain(
                "surface dimension must be at least 1".into(),
            ));
        }
        let (lo, hi) = self.window;
        if !(hi >= lo) {
            return Err(CmsError::Domain(format!("empty time window [{lo}, {hi}]")));
        }
        let times: Vec<f64> = (0..=64).map(|k| lo + (hi - lo) * k as f64 / 64.0).collect();
        let positive = |what: &str, schedule: &Schedule| -> Result<()> {
            for &t in &times {
                let v = schedule.value(t);
                if !(v > 0.0) {
                    return Err(CmsError::Domain(format!(
                        "{what} is {v} at t = {t}; must stay positive"
                    )));
                }
            }
            Ok(())
        };
        match &self.shape {
            Shape::Sphere { radius, .. } => positive("radius", radius)?,
            Shape::Ellipsoid { axes, polar_axis } => {
                if axes.len() < 2 {
                    return Err(CmsError::Domain("ellipsoid needs at least two axes".into()));
                }
                if *polar_axis >= axes.len() {
                    return Err(CmsError::Domain(format!(
                        "polar axis {polar_axis} out of range"
                    )));
                }
                for a in axes {
                    positive("semi-axis", a)?;
                }
            }
            Shape::Torus { major, minor } => {
                positive("minor radius", minor)?;
                for &t in &times {
                    if !(major.value(t) > minor.value(t)) {
                        return Err(CmsError::Domain(format!(
                            "torus self-intersects at t = {t}: major radius must exceed minor radius"
                        )));
                    }
                }
            }
            Shape::PerturbedSphere {
                radius,
                degree,
                order,
                amplitude,
            } => {
                positive("radius", radius)?;
                if order.unsigned_abs() as usize > *degree {
                    return Err(CmsError::Domain(format!(
                        "order {order} exceeds degree {degree}"
                    )));
                }
                // star-shaped and regular while |a| · max|Y| stays well below 1
                for &t in &times {
                    let a = amplitude.value(t).abs();
                    if !(a < 0.5) {
                        return Err(CmsError::Domain(format!(
                            "perturbation amplitude {a} at t = {t} would break the embedding"
                        )));
                    }
                }
            }
        }
        if let Some(u) = &self.translation {
            if u.len() != n + 1 {
                return Err(CmsError::Domain(format!(
                    "translation has {} components, need {}",
                    u.len(),
                    n + 1
                )));
            }
        }
        if let Some(eps) = self.warp {
            if !(eps.abs() < 1.0) {
                return Err(CmsError::Domain(format!(
                    "warp strength {eps} must lie in (-1, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// Unit `n`-sphere in hyperspherical coordinates `(θ₁, …, θ_{n−1}, φ)`; the
/// last output component is `cos θ₁`.
fn unit_sphere<D: DualNum<Primitive = f64> + Copy>(s: &[D]) -> Vec<D> {
    let n = s.len();
    let mut out = vec![D::from(0.0); n + 1];
    let mut prod = D::from(1.0);
    for k in 0..n - 1 {
        out[n - k] = prod * s[k].cos();
        prod *= s[k].sin();
    }
    out[0] = prod * s[n - 1].cos();
    out[1] = prod * s[n - 1].sin();
    out
}

fn sphere_domain(n: usize) -> ChartDomain {
    let mut axes = vec![ChartAxis::bounded(0.0, PI); n - 1];
    axes.push(ChartAxis::periodic(0.0, 2.0 * PI));
    ChartDomain::new(axes)
}

/// A validated family with exact derivatives.
#[derive(Debug, Clone)]
pub struct AnalyticFamily {
    spec: FamilySpec,
}

impl fmt::Display for AnalyticFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec.label)
    }
}

impl AnalyticFamily {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec })
    }

    pub fn named(name: &str) -> Result<Self> {
        Self::new(FamilySpec::named(name)?)
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn into_family(self) -> ParamFamily {
        ParamFamily::from_embedding(self)
    }

    fn warp<D: DualNum<Primitive = f64> + Copy>(&self, s: &[D]) -> Vec<D> {
        let Some(eps) = self.spec.warp else {
            return s.to_vec();
        };
        let domain = self.domain();
        s.iter()
            .zip(&domain.axes)
            .map(|(&x, axis)| {
                let span = axis.span();
                x + ((x - axis.lo) * (2.0 * PI / span)).sin() * (eps * span / (2.0 * PI))
            })
            .collect()
    }

    /// Position of the undeformed, unmoved shape.
    fn shape_point<D: DualNum<Primitive = f64> + Copy>(&self, s: &[D], t: D) -> Vec<D> {
        match &self.spec.shape {
            Shape::Sphere { radius, .. } => {
                let r = radius.eval(t);
                unit_sphere(s).into_iter().map(|u| u * r).collect()
            }
            Shape::Ellipsoid { axes, polar_axis } => {
                let n = axes.len() - 1;
                let u = unit_sphere(s);
                (0..=n)
                    .map(|alpha| u[(alpha + n - polar_axis) % (n + 1)] * axes[alpha].eval(t))
                    .collect()
            }
            Shape::Torus { major, minor } => {
                let (u, v) = (s[0], s[1]);
                let ring = major.eval(t) + minor.eval(t) * v.cos();
                vec![ring * u.cos(), ring * u.sin(), minor.eval(t) * v.sin()]
            }
            Shape::PerturbedSphere {
                radius,
                degree,
                order,
                amplitude,
            } => {
                let y = harmonics::real_harmonic(*degree, *order, s[0], s[1]);
                let r = radius.eval(t) * (amplitude.eval(t) * y + 1.0);
                unit_sphere(s).into_iter().map(|u| u * r).collect()
            }
        }
    }

    fn rigid_motion<D: DualNum<Primitive = f64> + Copy>(&self, mut x: Vec<D>, t: D) -> Vec<D> {
        if let Some(omega) = self.spec.rotation {
            let angle = t * omega;
            let (c, s) = (angle.cos(), angle.sin());
            let (x0, x1) = (x[0], x[1]);
            x[0] = c * x0 - s * x1;
            x[1] = s * x0 + c * x1;
        }
        if let Some(u) = &self.spec.translation {
            for (xa, &ua) in x.iter_mut().zip(u) {
                *xa += t * ua;
            }
        }
        x
    }

    /// The embedding `R(s, t)` over any dual-number type.
    pub fn eval<D: DualNum<Primitive = f64> + Copy>(&self, s: &[D], t: D) -> Vec<D> {
        let warped = self.warp(s);
        let x = self.shape_point(&warped, t);
        self.rigid_motion(x, t)
    }

    /// Exact ambient velocity `∂_t R`.
    pub fn ambient_velocity(&self, s: &[f64], t: f64) -> DVector<f64> {
        self.exact_jet(s, t)
            .map(|jet| jet.velocity)
            .unwrap_or_else(|| {
                ParamFamily::from_embedding(self.clone())
                    .fd_jet(s, t)
                    .velocity
            })
    }

    /// Exact decomposition `(C, V^i)` of the velocity at `(s, t)`.
    pub fn velocity(&self, s: &[f64], t: f64) -> Result<PointVelocity> {
        let family = ParamFamily::from_embedding(self.clone());
        let forms = family.forms(s, t)?;
        Ok(PointVelocity::from_ambient(
            &forms,
            &self.ambient_velocity(s, t),
        ))
    }

    fn center(&self, t: f64) -> DVector<f64> {
        let origin = vec![0.0; self.spec.dim() + 1];
        DVector::from_vec(self.rigid_motion(origin, t))
    }
}

impl Embedding for AnalyticFamily {
    fn name(&self) -> String {
        self.spec.label.clone()
    }

    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn domain(&self) -> ChartDomain {
        match &self.spec.shape {
            Shape::Torus { .. } => ChartDomain::new(vec![
                ChartAxis::periodic(0.0, 2.0 * PI),
                ChartAxis::periodic(0.0, 2.0 * PI),
            ]),
            _ => sphere_domain(self.spec.dim()),
        }
    }

    fn position(&self, s: &[f64], t: f64) -> DVector<f64> {
        DVector::from_vec(self.eval(s, t))
    }

    fn exact_jet(&self, s: &[f64], t: f64) -> Option<Jet> {
        let n = self.spec.dim();
        if n + 1 > 4 {
            return None;
        }
        type D = Dual2SVec64<4>;
        let vars: Vec<D> = s
            .iter()
            .enumerate()
            .map(|(i, &x)| D::from_re(x).derivative(i))
            .collect();
        let time = D::from_re(t).derivative(n);
        let values = self.eval(&vars, time);
        let grads: Vec<_> = values.iter().map(|v| v.v1.unwrap_generic(U1, U4)).collect();
        let hessians: Vec<_> = values.iter().map(|v| v.v2.unwrap_generic(U4, U4)).collect();
        let component = |f: &dyn Fn(usize) -> f64| DVector::from_fn(n + 1, |a, _| f(a));
        Some(Jet {
            position: component(&|a| values[a].re),
            tangents: (0..n).map(|i| component(&|a| grads[a][i])).collect(),
            second: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| component(&|a| hessians[a][(i, j)]))
                        .collect()
                })
                .collect(),
            velocity: component(&|a| grads[a][n]),
            velocity_gradient: (0..n)
                .map(|i| component(&|a| hessians[a][(i, n)]))
                .collect(),
        })
    }

    fn interior_point(&self, s: &[f64], t: f64) -> DVector<f64> {
        match &self.spec.shape {
            Shape::Torus { major, .. } => {
                let u = self.warp(s)[0];
                let core = vec![major.value(t) * u.cos(), major.value(t) * u.sin(), 0.0];
                DVector::from_vec(self.rigid_motion(core, t))
            }
            _ => self.center(t),
        }
    }

    fn star_center(&self, t: f64) -> Option<DVector<f64>> {
        match &self.spec.shape {
            Shape::Torus { .. } => None,
            _ => Some(self.center(t)),
        }
    }
}

/// Build a family with exact derivatives from its spec.
pub fn make_family(spec: FamilySpec) -> Result<ParamFamily> {
    Ok(AnalyticFamily::new(spec)?.into_family())
}

/// Closed-form curvature of the round `n`-sphere of radius `R`:
/// `B_ij = −S_ij / R` and `H = −n / R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmcSphereOracle {
    pub radius: f64,
    pub dim: usize,
    pub mean_curvature: f64,
}

impl CmcSphereOracle {
    /// `B_ij` for the given metric.
    pub fn curvature(&self, metric: &DMatrix<f64>) -> DMatrix<f64> {
        metric * (-1.0 / self.radius)
    }
}

pub fn cmc_sphere_oracle(radius: f64, dim: usize) -> Result<CmcSphereOracle> {
    if !(radius > 0.0) {
        return Err(CmsError::Domain(format!(
            "sphere radius must be positive, got {radius}"
        )));
    }
    Ok(CmcSphereOracle {
        radius,
        dim,
        mean_curvature: -(dim as f64) / radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, SVD};

    fn family(name: &str) -> ParamFamily {
        AnalyticFamily::named(name).unwrap().into_family()
    }

    #[test]
    fn every_named_family_builds() {
        for name in FAMILY_NAMES {
            let f = family(name);
            assert_eq!(f.name(), *name);
            assert!(f.has_exact_jet());
        }
    }

    #[test]
    fn exact_jet_matches_finite_differences() {
        for name in FAMILY_NAMES {
            let f = family(name).with_fd_step(1e-4);
            let grid = f.domain().sample_grid(&vec![3; f.dim()]);
            for s in grid {
                let exact = f.jet(&s, 0.05);
                let fd = f.fd_jet(&s, 0.05);
                let diff = exact.max_difference(&fd);
                assert!(diff < 1e-6, "{name} at {s:?}: {diff:e}");
            }
        }
    }

    #[test]
    fn expanding_sphere_moves_normally() {
        let af = AnalyticFamily::named("sphere").unwrap();
        for s in af.domain().identity_grid().iter().step_by(37) {
            let v = af.velocity(s, 0.1).unwrap();
            assert_abs_diff_eq!(v.normal_speed, 0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(v.tangential.amax(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn translation_decomposes_constant_vector() {
        let af = AnalyticFamily::named("translate").unwrap();
        let f = af.clone().into_family();
        let u = DVector::from_vec(vec![0.3, -0.2, 0.5]);
        for s in f.domain().identity_grid().iter().step_by(29) {
            let forms = f.forms(s, 0.2).unwrap();
            let v = af.velocity(s, 0.2).unwrap();
            assert_abs_diff_eq!(v.normal_speed, u.dot(&forms.normal), epsilon = 1e-14);
            assert_abs_diff_eq!(v.tangential, &forms.dual_shift * &u, epsilon = 1e-14);
            assert_abs_diff_eq!(v.ambient(&forms), u, epsilon = 1e-13);
        }
    }

    #[test]
    fn perturbed_normal_speed_matches_fd() {
        let af = AnalyticFamily::named("perturbed").unwrap();
        let f = af.clone().into_family();
        let s = [1.1, 0.4];
        let t = 0.05;
        let forms = f.forms(&s, t).unwrap();
        let errs: Vec<f64> = [1e-2, 5e-3]
            .iter()
            .map(|&h| {
                let fd = (f.position(&s, t + h) - f.position(&s, t - h)) / (2.0 * h);
                (fd.dot(&forms.normal) - af.velocity(&s, t).unwrap().normal_speed).abs()
            })
            .collect();
        // the radius is linear in t and the mode amplitude is linear, so r is
        // quadratic in t and centered differences are exact
        assert!(errs[0] < 1e-11, "{errs:?}");
    }

    #[test]
    fn decomposition_reconstructs_velocity() {
        for name in FAMILY_NAMES {
            let af = AnalyticFamily::named(name).unwrap();
            let f = af.clone().into_family();
            for s in f.domain().identity_grid().iter().step_by(41) {
                let forms = f.forms(s, 0.1).unwrap();
                let v = af.velocity(s, 0.1).unwrap();
                let err = (v.ambient(&forms) - af.ambient_velocity(s, 0.1)).amax();
                assert!(err < 1e-12, "{name}: {err:e}");
            }
        }
    }

    #[test]
    fn spheres_satisfy_the_cmc_oracle() {
        for &r in &[0.5, 1.0, 2.0] {
            for n in 1..=3 {
                let f = make_family(FamilySpec::sphere(n, Schedule::constant(r))).unwrap();
                let oracle = cmc_sphere_oracle(r, n).unwrap();
                for s in f.domain().identity_grid().iter().step_by(13) {
                    let forms = f.forms(s, 0.0).unwrap();
                    assert!((forms.mean_curvature - oracle.mean_curvature).abs() < 1e-9);
                    let err = (&forms.curvature - oracle.curvature(&forms.metric)).amax();
                    assert!(err < 1e-10, "R={r} n={n}: {err:e}");
                }
            }
        }
        assert_eq!(cmc_sphere_oracle(1.0, 2).unwrap().mean_curvature, -2.0);
        assert_eq!(cmc_sphere_oracle(2.0, 1).unwrap().mean_curvature, -0.5);
        assert!(cmc_sphere_oracle(0.0, 2).is_err());
    }

    #[test]
    fn three_sphere_mean_curvature() {
        let f = make_family(FamilySpec::sphere(3, Schedule::constant(1.0))).unwrap();
        let forms = f.forms(&[0.9, 1.3, 2.0], 0.0).unwrap();
        assert_abs_diff_eq!(forms.mean_curvature, -3.0, epsilon = 1e-12);
        assert_eq!(forms.normal.len(), 4);
    }

    /// Principal curvatures at (0, 0, 1) on x²/4 + y² + z² = 1 from a
    /// least-squares quadric fit of the graph z(x, y) through nearby points.
    fn quadric_fit_curvatures() -> (f64, f64) {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let h = 2e-3;
        for i in -4..=4 {
            for j in -4..=4 {
                let (x, y) = (i as f64 * h, j as f64 * h);
                let z = (1.0 - x * x / 4.0 - y * y).sqrt();
                let mut row = vec![1.0];
                for degree in 1..=4 {
                    for k in 0..=degree {
                        row.push(x.powi(degree - k) * y.powi(k));
                    }
                }
                rows.extend_from_slice(&row);
                rhs.push(z);
            }
        }
        let a = DMatrix::from_row_slice(rhs.len(), 15, &rows);
        let b = DVector::from_vec(rhs);
        let coef = SVD::new(a, true, true).solve(&b, 1e-14).unwrap();
        let hess = DMatrix::from_row_slice(2, 2, &[2.0 * coef[3], coef[4], coef[4], 2.0 * coef[5]]);
        let mut ev: Vec<f64> = hess.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (ev[0], ev[1])
    }

    #[test]
    fn ellipsoid_principal_curvatures_at_pole() {
        let spec = FamilySpec::ellipsoid(
            vec![
                Schedule::constant(2.0),
                Schedule::constant(1.0),
                Schedule::constant(1.0),
            ],
            0,
        );
        let f = make_family(spec).unwrap();
        let s = [PI / 2.0, PI / 2.0];
        let forms = f.forms(&s, 0.0).unwrap();
        assert_abs_diff_eq!(
            forms.position,
            DVector::from_vec(vec![0.0, 0.0, 1.0]),
            epsilon = 1e-15
        );
        let k = forms.principal_curvatures();
        let (fit0, fit1) = quadric_fit_curvatures();
        assert!((k[0] - fit0).abs() < 1e-5, "{k:?} vs {fit0}");
        assert!((k[1] - fit1).abs() < 1e-5, "{k:?} vs {fit1}");
        assert_abs_diff_eq!(k[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k[1], -0.25, epsilon = 1e-12);
    }

    #[test]
    fn irregular_schedules_are_rejected() {
        let bad = FamilySpec::sphere(2, Schedule::linear(0.1, 1.0));
        assert!(matches!(AnalyticFamily::new(bad), Err(CmsError::Domain(_))));
        let fat = FamilySpec::torus(Schedule::constant(1.0), Schedule::constant(1.5));
        assert!(AnalyticFamily::new(fat).is_err());
        let wild =
            FamilySpec::perturbed_sphere(Schedule::constant(1.0), 2, 0, Schedule::constant(0.9));
        assert!(AnalyticFamily::new(wild).is_err());
        assert!(FamilySpec::named("klein-bottle").is_err());
    }

    #[test]
    fn schedule_rates() {
        let s = Schedule::quadratic(1.0, 0.5, 0.8);
        assert_abs_diff_eq!(s.value(0.5), 1.0 + 0.25 + 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rate(0.5), 0.5 + 0.4, epsilon = 1e-15);
        assert!(Schedule::constant(3.0).is_constant());
    }
}
