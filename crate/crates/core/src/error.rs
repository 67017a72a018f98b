use thiserror::Error;

use crate::rootsys::Family;

#[derive(Debug, Error)]
pub enum HktError {
    #[error("unsupported family/rank {family}{rank}: {reason}")]
    UnsupportedFamilyRank {
        family: Family,
        rank: usize,
        reason: &'static str,
    },

    #[error("root system has a triple bond (exceptional type), not supported")]
    ExceptionalRootSystem,

    #[error("orthonormalization failed for generator pair ({first}, {second}): residual {residual:.3e}")]
    Orthonormalization {
        first: usize,
        second: usize,
        residual: f64,
    },

    #[error("degenerate joint eigenspace for root {root}: eigenvalues {smallest:.3e}, {next:.3e}")]
    DegenerateEigenspace {
        root: String,
        smallest: f64,
        next: f64,
    },

    #[error("could not fix Chevalley normalization of root vector for {root}: {reason}")]
    PhaseFixing { root: String, reason: String },

    #[error("representation is not faithful for the simply connected group: {0}")]
    NonFaithfulRepresentation(String),

    #[error("pairing dimension mismatch: {required} CSA pairs required, {given} supplied")]
    PairingMismatch { required: usize, given: usize },

    #[error("automorphism is not orthogonal: |Omega Omega^T - 1| = {residual:.3e}")]
    NonOrthogonalAutomorphism { residual: f64 },

    #[error("centralizer decomposition disagrees with Dynkin surgery: {0}")]
    CentralizerMismatch(String),

    #[error("basic-root chain did not terminate within depth {0}")]
    ChainDepth(usize),

    #[error("complex structure is not integrable: residual {0:.3e}")]
    NotIntegrable(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("quotient selection invalid: {0}")]
    InvalidQuotient(String),

    #[error("cannot parse space specification: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HktError>;
