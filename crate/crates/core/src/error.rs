use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module of the crate.
///
/// Each variant carries the name of the operation that raised it so that
/// errors surfacing through the CLI keep their provenance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: invalid parameter: {detail}")]
    InvalidParameter { op: &'static str, detail: String },

    #[error("{op}: argument {arg} is on or within 1e-12 of the branch cut of {branch}")]
    BranchCut {
        op: &'static str,
        branch: &'static str,
        arg: Complex64,
    },

    #[error("{op}: domain error: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: order {nu} is an integer; perturb it (e.g. by 1e-8) before calling")]
    IntegerOrder { op: &'static str, nu: Complex64 },

    #[error("{op}: precision loss: {detail}")]
    Precision { op: &'static str, detail: String },

    #[error("{op}: outside supported range: {detail}")]
    Capability { op: &'static str, detail: String },

    #[error("{op}: evaluation point {z} is at or near a pole (nearest root ~ {nearest})")]
    Pole {
        op: &'static str,
        z: Complex64,
        nearest: Complex64,
    },

    #[error("{op}: indeterminate at the arc endpoint {endpoint}")]
    Endpoint {
        op: &'static str,
        endpoint: Complex64,
    },

    #[error("{op}: eigensolver did not converge: {detail} ({} eigenvalues converged)", converged.len())]
    Solver {
        op: &'static str,
        detail: String,
        converged: Vec<Complex64>,
    },

    #[error("{op}: consistency check failed: {detail}")]
    Consistency { op: &'static str, detail: String },

    #[error("{op}: continuation failed: {detail} (last good point {last})")]
    Continuation {
        op: &'static str,
        detail: String,
        last: Complex64,
    },

    #[error("{op}: the measure is empty for this parameter")]
    EmptyMeasure { op: &'static str },
}

impl Error {
    /// Name of the operation that produced the error.
    pub fn op(&self) -> &'static str {
        match self {
            Error::InvalidParameter { op, .. }
            | Error::BranchCut { op, .. }
            | Error::Domain { op, .. }
            | Error::IntegerOrder { op, .. }
            | Error::Precision { op, .. }
            | Error::Capability { op, .. }
            | Error::Pole { op, .. }
            | Error::Endpoint { op, .. }
            | Error::Solver { op, .. }
            | Error::Consistency { op, .. }
            | Error::Continuation { op, .. }
            | Error::EmptyMeasure { op } => op,
        }
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::BranchCut { .. } => "branch_cut",
            Error::Domain { .. } => "domain",
            Error::IntegerOrder { .. } => "integer_order",
            Error::Precision { .. } => "precision",
            Error::Capability { .. } => "capability",
            Error::Pole { .. } => "pole",
            Error::Endpoint { .. } => "endpoint",
            Error::Solver { .. } => "solver",
            Error::Consistency { .. } => "consistency",
            Error::Continuation { .. } => "continuation",
            Error::EmptyMeasure { .. } => "empty_measure",
        }
    }
}
