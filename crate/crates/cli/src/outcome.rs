use std::fmt;
use std::path::Path;

use cmsflow_core::CmsError;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_TOPOLOGY: u8 = 3;
pub const EXIT_NONCONVERGENCE: u8 = 4;

/// A failed run: the process exit code and a message naming what broke.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self::usage(format!("cannot write {}: {err}", path.display()))
    }
}

pub fn exit_code(err: &CmsError) -> u8 {
    match err {
        CmsError::Config(_) | CmsError::Parse { .. } | CmsError::Io(_) => EXIT_USAGE,
        CmsError::MeshQuality(_)
        | CmsError::Topology(_)
        | CmsError::TopologyViolation { .. }
        | CmsError::Orientation(_)
        | CmsError::SingularEmbedding { .. } => EXIT_TOPOLOGY,
        CmsError::StepCollapse { .. } => EXIT_NONCONVERGENCE,
        CmsError::Domain(_) | CmsError::NegativeDensity { .. } | CmsError::Stencil(_) => {
            EXIT_FAILURE
        }
    }
}

impl From<CmsError> for Failure {
    fn from(err: CmsError) -> Self {
        Self::new(exit_code(&err), err.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CmdResult = Result<(), Failure>;
