//! Parametric and discrete hypersurface geometry.

pub mod discrete;
pub mod forms;
pub mod generators;
pub mod io;
pub mod kinematics;
pub mod mesh;
pub mod param;
pub mod quadrature;
