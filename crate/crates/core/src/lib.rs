//! Moving-surface calculus on closed hypersurfaces.
//!
//! * [`geometry`]: parametric and discrete surfaces, fundamental forms,
//!   quadrature, topology.
//! * [`families`]: exact time-dependent embeddings used as oracles.
//! * [`verify`]: numerical checks of the transport identities.
//! * [`flow`]: curvature-driven and volume-preserving flows with equilibrium
//!   certificates.
//! * [`pde`]: density transport and momentum-balance residuals.

pub mod error;
pub mod families;
pub mod flow;
pub mod geometry;
pub mod pde;
pub mod verify;

pub use error::{CmsError, Result};
pub use families::{cmc_sphere_oracle, make_family, AnalyticFamily, FamilySpec, Schedule, Shape};
pub use flow::{
    run_to_equilibrium, velocity_law, DiagnosticsRecord, EquilibriumCertificate, FlowConfig,
    FlowDiagnostics, FlowLaw, FlowOutcome, FlowState, Termination, VertexVelocity,
};
pub use geometry::discrete::{
    enclosed_volume, euler_characteristic, fundamental_forms_mesh, gauss_bonnet_check,
    surface_area, VertexGeometry,
};
pub use geometry::forms::{
    compose_ambient_vector, decompose_ambient_vector, fundamental_forms_param, FundamentalForms,
};
pub use geometry::kinematics::{PointKinematics, PointVelocity};
pub use geometry::mesh::{ClosedCurve, DiscreteSurface, Point, TriMesh};
pub use geometry::param::{ChartAxis, ChartDomain, Embedding, Jet, ParamFamily};
pub use pde::{
    advect_density, total_mass, AdvectionScheme, ChartDensity, SurfaceField, TimeStencil,
};
pub use verify::{run_suite, Identity, IdentityReport, Mutation, VerifyOptions};
