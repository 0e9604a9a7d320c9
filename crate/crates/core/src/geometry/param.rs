//! Parametric, time-dependent embeddings `R(s, t)` of closed hypersurfaces.
//!
//! An [`Embedding`] supplies the position map and, optionally, an exact jet of
//! derivatives. [`ParamFamily`] wraps an embedding together with the
//! finite-difference step used for whatever the embedding does not provide.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::Result;
use crate::geometry::forms::{fundamental_forms_from_jet, FundamentalForms};
use crate::geometry::kinematics::PointKinematics;

/// One coordinate direction of a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartAxis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl ChartAxis {
    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: true,
        }
    }

    pub fn bounded(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Coordinate box covering a closed surface. Bounded axes end at coordinate
/// singularities (poles); identity sampling stays `pole_margin` away from them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartDomain {
    pub axes: Vec<ChartAxis>,
    pub pole_margin: f64,
}

/// Default distance kept from chart poles when sampling pointwise identities.
pub const POLE_MARGIN: f64 = 1e-2;

impl ChartDomain {
    pub fn new(axes: Vec<ChartAxis>) -> Self {
        Self {
            axes,
            pole_margin: POLE_MARGIN,
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Tensor-product sample grid. Periodic axes are sampled uniformly without
    /// repeating the endpoint; bounded axes are sampled uniformly inside
    /// `[lo + margin, hi - margin]`.
    pub fn sample_grid(&self, counts: &[usize]) -> Vec<Vec<f64>> {
        assert_eq!(counts.len(), self.axes.len(), "one count per chart axis");
        let per_axis: Vec<Vec<f64>> = self
            .axes
            .iter()
            .zip(counts)
            .map(|(axis, &count)| {
                if axis.periodic {
                    (0..count)
                        .map(|k| axis.lo + axis.span() * k as f64 / count as f64)
                        .collect()
                } else {
                    let lo = axis.lo + self.pole_margin;
                    let hi = axis.hi - self.pole_margin;
                    if count == 1 {
                        vec![0.5 * (lo + hi)]
                    } else {
                        (0..count)
                            .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                            .collect()
                    }
                }
            })
            .collect();
        tensor_product(&per_axis)
    }

    /// The fixed residual grid: 17×33 on 2-surfaces, 33 points on curves,
    /// 9×9×17 on 3-manifolds.
    pub fn identity_grid(&self) -> Vec<Vec<f64>> {
        let counts: Vec<usize> = match self.dim() {
            1 => vec![33],
            2 => vec![17, 33],
            3 => vec![9, 9, 17],
            n => vec![7; n],
        };
        self.sample_grid(&counts)
    }
}

pub(crate) fn tensor_product(per_axis: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for values in per_axis {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for &v in values {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

/// Position and derivatives of an embedding at one chart point and time.
///
/// `second[i][j]` is `∂_i ∂_j R`; `velocity_gradient[i]` is `∂_i ∂_t R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub position: DVector<f64>,
    pub tangents: Vec<DVector<f64>>,
    pub second: Vec<Vec<DVector<f64>>>,
    pub velocity: DVector<f64>,
    pub velocity_gradient: Vec<DVector<f64>>,
}

impl Jet {
    pub fn dim(&self) -> usize {
        self.tangents.len()
    }

    /// Largest absolute component difference between two jets.
    pub fn max_difference(&self, other: &Jet) -> f64 {
        let mut worst = (&self.position - &other.position).amax();
        worst = worst.max((&self.velocity - &other.velocity).amax());
        for i in 0..self.dim() {
            worst = worst.max((&self.tangents[i] - &other.tangents[i]).amax());
            worst = worst.max((&self.velocity_gradient[i] - &other.velocity_gradient[i]).amax());
            for j in 0..self.dim() {
                worst = worst.max((&self.second[i][j] - &other.second[i][j]).amax());
            }
        }
        worst
    }
}

/// A time-dependent embedding of an `n`-dimensional closed hypersurface in
/// `R^{n+1}` with a fixed Cartesian ambient frame.
pub trait Embedding: Send + Sync {
    fn name(&self) -> String;

    /// Surface dimension `n`.
    fn dim(&self) -> usize;

    fn domain(&self) -> ChartDomain;

    fn position(&self, s: &[f64], t: f64) -> DVector<f64>;

    /// Exact derivatives, when the embedding can supply them.
    fn exact_jet(&self, _s: &[f64], _t: f64) -> Option<Jet> {
        None
    }

    /// A point on the inner side of the surface near `R(s, t)`; outward normals
    /// point away from it.
    fn interior_point(&self, s: &[f64], t: f64) -> DVector<f64>;

    /// Center with respect to which the enclosed region is star-shaped.
    fn star_center(&self, _t: f64) -> Option<DVector<f64>> {
        None
    }
}

/// Default step for finite-difference jets.
pub const DEFAULT_JET_STEP: f64 = 1e-4;

/// An embedding plus the finite-difference step used for derivatives it does
/// not provide exactly.
#[derive(Clone)]
pub struct ParamFamily {
    embedding: Arc<dyn Embedding>,
    fd_step: f64,
}

impl fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamFamily")
            .field("name", &self.embedding.name())
            .field("dim", &self.embedding.dim())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl ParamFamily {
    pub fn new(embedding: Arc<dyn Embedding>) -> Self {
        Self {
            embedding,
            fd_step: DEFAULT_JET_STEP,
        }
    }

    pub fn from_embedding<E: Embedding + 'static>(embedding: E) -> Self {
        Self::new(Arc::new(embedding))
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn embedding(&self) -> &dyn Embedding {
        self.embedding.as_ref()
    }

    pub fn name(&self) -> String {
        self.embedding.name()
    }

    pub fn dim(&self) -> usize {
        self.embedding.dim()
    }

    pub fn domain(&self) -> ChartDomain {
        self.embedding.domain()
    }

    pub fn position(&self, s: &[f64], t: f64) -> DVector<f64> {
        self.embedding.position(s, t)
    }

    pub fn star_center(&self, t: f64) -> Option<DVector<f64>> {
        self.embedding.star_center(t)
    }

    pub fn has_exact_jet(&self) -> bool {
        let domain = self.domain();
        let s: Vec<f64> = domain.axes.iter().map(|a| 0.5 * (a.lo + a.hi)).collect();
        self.embedding.exact_jet(&s, 0.0).is_some()
    }

    /// Exact jet when available, centered differences otherwise.
    pub fn jet(&self, s: &[f64], t: f64) -> Jet {
        self.embedding
            .exact_jet(s, t)
            .unwrap_or_else(|| self.fd_jet(s, t))
    }

    /// Jet from second-order centered differences of the position map.
    pub fn fd_jet(&self, s: &[f64], t: f64) -> Jet {
        let h = self.fd_step;
        let n = self.dim();
        let pos = |s: &[f64], t: f64| self.embedding.position(s, t);
        let shifted = |i: usize, d: f64| {
            let mut q = s.to_vec();
            q[i] += d;
            q
        };

        let position = pos(s, t);
        let tangents: Vec<DVector<f64>> = (0..n)
            .map(|i| (pos(&shifted(i, h), t) - pos(&shifted(i, -h), t)) / (2.0 * h))
            .collect();
        let mut second = vec![vec![DVector::zeros(n + 1); n]; n];
        for i in 0..n {
            second[i][i] =
                (pos(&shifted(i, h), t) - &position * 2.0 + pos(&shifted(i, -h), t)) / (h * h);
            for j in (i + 1)..n {
                let corner = |a: f64, b: f64| {
                    let mut q = s.to_vec();
                    q[i] += a;
                    q[j] += b;
                    pos(&q, t)
                };
                let mixed =
                    (corner(h, h) - corner(h, -h) - corner(-h, h) + corner(-h, -h)) / (4.0 * h * h);
                second[i][j] = mixed.clone();
                second[j][i] = mixed;
            }
        }
        let velocity = (pos(s, t + h) - pos(s, t - h)) / (2.0 * h);
        let velocity_gradient = (0..n)
            .map(|i| {
                (pos(&shifted(i, h), t + h)
                    - pos(&shifted(i, h), t - h)
                    - pos(&shifted(i, -h), t + h)
                    + pos(&shifted(i, -h), t - h))
                    / (4.0 * h * h)
            })
            .collect();
        Jet {
            position,
            tangents,
            second,
            velocity,
            velocity_gradient,
        }
    }

    /// Geometry at `(s, t)`.
    pub fn forms(&self, s: &[f64], t: f64) -> Result<FundamentalForms> {
        let jet = self.jet(s, t);
        let inside = self.embedding.interior_point(s, t);
        fundamental_forms_from_jet(&jet, &inside)
    }

    /// Geometry plus velocity decomposition and its first surface derivatives.
    pub fn kinematics(&self, s: &[f64], t: f64) -> Result<PointKinematics> {
        let jet = self.jet(s, t);
        let inside = self.embedding.interior_point(s, t);
        let forms = fundamental_forms_from_jet(&jet, &inside)?;
        Ok(PointKinematics::new(forms, &jet))
    }
}

/// Embedding given by a bare position closure; every derivative comes from
/// finite differences.
pub struct FnEmbedding<F>
where
    F: Fn(&[f64], f64) -> DVector<f64> + Send + Sync,
{
    pub name: String,
    pub dim: usize,
    pub domain: ChartDomain,
    pub map: F,
    pub center: DVector<f64>,
}

impl<F> Embedding for FnEmbedding<F>
where
    F: Fn(&[f64], f64) -> DVector<f64> + Send + Sync,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> ChartDomain {
        self.domain.clone()
    }

    fn position(&self, s: &[f64], t: f64) -> DVector<f64> {
        (self.map)(s, t)
    }

    fn interior_point(&self, _s: &[f64], _t: f64) -> DVector<f64> {
        self.center.clone()
    }

    fn star_center(&self, _t: f64) -> Option<DVector<f64>> {
        Some(self.center.clone())
    }
}
