//! Numerical checks of the moving-surface transport identities.
//!
//! Every check evaluates both sides of an identity on an analytic family at a
//! fixed time, at time step `h` and `h/2`, and reports the worst residual with
//! a two-step order estimate. A check passes when its residual is below
//! [`EXACT_TOLERANCE`] (both sides agree in closed form) or when the measured
//! order reaches [`MIN_ORDER`].

pub mod integral;
pub mod pointwise;
pub mod stencil;

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{CmsError, Result};
use crate::geometry::param::ParamFamily;
pub use integral::{AmbientField, SurfaceField, TestFields};
pub use stencil::{order_estimate, TimeScheme};

/// Residual below which a check counts as exact.
pub const EXACT_TOLERANCE: f64 = 1e-10;
/// Smallest accepted convergence order for finite-difference checks.
pub const MIN_ORDER: f64 = 1.7;
/// Default time at which identities are sampled.
pub const DEFAULT_TIME: f64 = 0.1;
/// Default chart step for spatial differences of exact first-jet quantities.
pub const DEFAULT_SPATIAL_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    MetricEvolution,
    AreaEvolution,
    Metrilinic,
    NormalTransport,
    CurvatureTransport,
    Thomas,
    SurfaceIntegral,
    VolumeIntegral,
    KineticEnergy,
    PotentialEnergy,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::MetricEvolution,
        Identity::AreaEvolution,
        Identity::Metrilinic,
        Identity::NormalTransport,
        Identity::CurvatureTransport,
        Identity::Thomas,
        Identity::SurfaceIntegral,
        Identity::VolumeIntegral,
        Identity::KineticEnergy,
        Identity::PotentialEnergy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::MetricEvolution => "metric_evolution",
            Identity::AreaEvolution => "area_evolution",
            Identity::Metrilinic => "metrilinic",
            Identity::NormalTransport => "normal_transport",
            Identity::CurvatureTransport => "curvature_transport",
            Identity::Thomas => "thomas",
            Identity::SurfaceIntegral => "surface_integral",
            Identity::VolumeIntegral => "volume_integral",
            Identity::KineticEnergy => "kinetic_energy",
            Identity::PotentialEnergy => "potential_energy",
        }
    }

    /// Whether the check can run on this family (interior integrals need a
    /// star-shaped region).
    pub fn applies_to(self, family: &ParamFamily) -> bool {
        match self {
            Identity::VolumeIntegral | Identity::PotentialEnergy => {
                family.star_center(0.0).is_some()
            }
            _ => true,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = CmsError;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .iter()
            .copied()
            .find(|i| i.name() == s)
            .ok_or_else(|| CmsError::Config(format!("unknown identity '{s}'")))
    }
}

/// Deliberate corruptions used to show the checks are not vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Replace `−2 C B_ij` by `+2 C B_ij` in the metric evolution law.
    FlipMetricBending,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub time: f64,
    pub scheme: TimeScheme,
    pub spatial_step: f64,
    /// Override of the per-axis sample counts of the residual grid.
    pub grid_counts: Option<Vec<usize>>,
    /// Override of the per-axis quadrature counts.
    pub quadrature_counts: Option<Vec<usize>>,
    pub fields: TestFields,
    pub mutation: Option<Mutation>,
    /// Sign in front of `∇_i∇_j C` in the curvature law.
    pub curvature_hessian_sign: f64,
    /// Use `N·∇_i V = ∇_i C` and `∇̇S_i = ∇_i V − C B_i^k S_k` verbatim.
    pub literal_thomas: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            time: DEFAULT_TIME,
            scheme: TimeScheme::Centered,
            spatial_step: DEFAULT_SPATIAL_STEP,
            grid_counts: None,
            quadrature_counts: None,
            fields: TestFields::default(),
            mutation: None,
            curvature_hessian_sign: 1.0,
            literal_thomas: false,
        }
    }
}

/// Result of one identity on one family at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub identity: Identity,
    pub family: String,
    pub time: f64,
    pub h: f64,
    /// Worst residual at step `h`.
    pub max_residual: f64,
    /// Worst residual at step `h/2`.
    pub half_step_residual: f64,
    /// `log₂(max_residual / half_step_residual)`; NaN when undefined.
    pub order_estimate: f64,
    /// Number of sample points or quadrature nodes.
    pub samples: usize,
    /// Named sub-residuals at step `h` (the Thomas identities).
    pub components: Vec<(String, f64)>,
}

impl IdentityReport {
    pub fn is_exact(&self) -> bool {
        self.max_residual < EXACT_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.max_residual.is_finite() && (self.is_exact() || self.order_estimate >= MIN_ORDER)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:.6e},{:.4}",
            self.identity, self.family, self.h, self.max_residual, self.order_estimate
        )
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<20} {:<20} h={:<8e} residual={:.3e} order={:>6.2} {}",
            self.identity.name(),
            self.family,
            self.h,
            self.max_residual,
            self.order_estimate,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

pub const CSV_HEADER: &str = "identity,family,h,max_residual,order_estimate";

pub fn reports_to_csv(reports: &[IdentityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

fn grid(family: &ParamFamily, options: &VerifyOptions) -> Vec<Vec<f64>> {
    let domain = family.domain();
    match &options.grid_counts {
        Some(counts) => domain.sample_grid(counts),
        None => domain.identity_grid(),
    }
}

fn max_over_grid<F>(family: &ParamFamily, options: &VerifyOptions, f: F) -> Result<(f64, usize)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let points = grid(family, options);
    let values: Result<Vec<f64>> = points.par_iter().map(|s| f(s)).collect();
    Ok((values?.into_iter().fold(0.0, f64::max), points.len()))
}

/// Worst residual, sample count and named components.
type Residual = (f64, usize, Vec<(String, f64)>);

/// Worst residual (and named components) of `identity` at step `h`.
fn residual(
    identity: Identity,
    family: &ParamFamily,
    h: f64,
    options: &VerifyOptions,
) -> Result<Residual> {
    let t = options.time;
    let quad_len = || match &options.quadrature_counts {
        Some(c) => c.iter().product(),
        None => crate::geometry::quadrature::ChartQuadrature::standard(&family.domain()).len(),
    };
    let pointwise = |f: fn(&ParamFamily, &[f64], f64, f64, &VerifyOptions) -> Result<f64>| {
        max_over_grid(family, options, |s| f(family, s, t, h, options))
            .map(|(r, n)| (r, n, Vec::new()))
    };
    match identity {
        Identity::MetricEvolution => pointwise(pointwise::metric),
        Identity::AreaEvolution => pointwise(pointwise::area),
        Identity::Metrilinic => pointwise(pointwise::metrilinic),
        Identity::NormalTransport => pointwise(pointwise::normal),
        Identity::CurvatureTransport => pointwise(pointwise::curvature),
        Identity::Thomas => {
            let points = grid(family, options);
            let values: Result<Vec<[f64; 3]>> = points
                .par_iter()
                .map(|s| pointwise::thomas(family, s, t, h, options))
                .collect();
            let mut worst = [0.0f64; 3];
            for v in values? {
                for k in 0..3 {
                    worst[k] = worst[k].max(v[k]);
                }
            }
            let components = vec![
                ("thomas_normal".to_string(), worst[0]),
                ("normal_grad_velocity".to_string(), worst[1]),
                ("normal_dot_basis".to_string(), worst[2]),
            ];
            Ok((
                worst.iter().copied().fold(0.0, f64::max),
                points.len(),
                components,
            ))
        }
        Identity::SurfaceIntegral => Ok((
            integral::surface_theorem(family, t, h, options)?,
            quad_len(),
            Vec::new(),
        )),
        Identity::VolumeIntegral => Ok((
            integral::volume_theorem(family, t, h, options)?,
            quad_len(),
            Vec::new(),
        )),
        Identity::KineticEnergy => Ok((
            integral::kinetic_energy_theorem(family, t, h, options)?,
            quad_len(),
            Vec::new(),
        )),
        Identity::PotentialEnergy => Ok((
            integral::potential_energy_theorem(family, t, h, options)?,
            quad_len(),
            Vec::new(),
        )),
    }
}

/// Run one identity on one family at steps `h` and `h/2`.
pub fn check_identity(
    identity: Identity,
    family: &ParamFamily,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    let (coarse, samples, components) = residual(identity, family, h, options)?;
    let (fine, _, _) = residual(identity, family, 0.5 * h, options)?;
    Ok(IdentityReport {
        identity,
        family: family.name(),
        time: options.time,
        h,
        max_residual: coarse,
        half_step_residual: fine,
        order_estimate: order_estimate(coarse, fine),
        samples,
        components,
    })
}

fn at_time(options: &VerifyOptions, t: f64) -> VerifyOptions {
    VerifyOptions {
        time: t,
        ..options.clone()
    }
}

pub fn check_metric_evolution(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    check_identity(Identity::MetricEvolution, family, h, &at_time(options, t))
}

pub fn check_area_evolution(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    check_identity(Identity::AreaEvolution, family, h, &at_time(options, t))
}

pub fn check_metrilinic(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    check_identity(Identity::Metrilinic, family, h, &at_time(options, t))
}

pub fn check_normal_transport(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    check_identity(Identity::NormalTransport, family, h, &at_time(options, t))
}

pub fn check_curvature_transport(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    check_identity(
        Identity::CurvatureTransport,
        family,
        h,
        &at_time(options, t),
    )
}

pub fn check_thomas(
    family: &ParamFamily,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    check_identity(Identity::Thomas, family, h, &at_time(options, t))
}

pub fn check_surface_integral_theorem(
    family: &ParamFamily,
    field: SurfaceField,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    let mut opts = at_time(options, t);
    opts.fields.surface = field;
    check_identity(Identity::SurfaceIntegral, family, h, &opts)
}

pub fn check_volume_integral_theorem(
    family: &ParamFamily,
    field: AmbientField,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    let mut opts = at_time(options, t);
    opts.fields.ambient = field;
    check_identity(Identity::VolumeIntegral, family, h, &opts)
}

pub fn check_kinetic_energy_variation(
    family: &ParamFamily,
    density: SurfaceField,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    let mut opts = at_time(options, t);
    opts.fields.density = density;
    check_identity(Identity::KineticEnergy, family, h, &opts)
}

pub fn check_potential_energy_variation(
    family: &ParamFamily,
    pressure: AmbientField,
    tension: SurfaceField,
    t: f64,
    h: f64,
    options: &VerifyOptions,
) -> Result<IdentityReport> {
    let mut opts = at_time(options, t);
    opts.fields.pressure = pressure;
    opts.fields.tension = tension;
    check_identity(Identity::PotentialEnergy, family, h, &opts)
}

/// Every applicable identity on every family at every step, in a fixed order
/// (identity-major, then family, then step).
pub fn run_suite(
    families: &[ParamFamily],
    steps: &[f64],
    options: &VerifyOptions,
) -> Result<Vec<IdentityReport>> {
    if families.is_empty() {
        return Err(CmsError::Config("no families to verify".into()));
    }
    if steps.is_empty() || steps.iter().any(|h| !(*h > 0.0)) {
        return Err(CmsError::Config(format!(
            "steps must be positive and non-empty, got {steps:?}"
        )));
    }
    let mut jobs = Vec::new();
    for identity in Identity::ALL {
        for family in families {
            if !identity.applies_to(family) {
                continue;
            }
            for &h in steps {
                jobs.push((identity, family, h));
            }
        }
    }
    jobs.par_iter()
        .map(|(identity, family, h)| check_identity(*identity, family, *h, options))
        .collect()
}

/// The default verification families: expanding sphere, ellipsoid with
/// independent axis schedules, translating ellipsoid, perturbed sphere with a
/// growing non-axisymmetric mode, rotating perturbed sphere.
pub const DEFAULT_FAMILIES: &[&str] =
    &["sphere", "ellipsoid", "translate", "perturbed", "rotating"];

pub fn named_families(names: &[&str]) -> Result<Vec<ParamFamily>> {
    names
        .iter()
        .map(|n| crate::families::make_family(crate::families::FamilySpec::named(n)?))
        .collect()
}
