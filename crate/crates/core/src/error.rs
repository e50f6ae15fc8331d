use thiserror::Error;

/// Failure modes shared across the crate.
///
/// `Config` covers malformed descriptors and parameters, `SizeGuard` covers
/// refusals to run an exact computation past its enumeration limit, `Guard`
/// covers dynamic per-step safety checks, and `SamplerFailure` covers a block
/// sampler that could not produce a sample. The CLI maps these onto distinct
/// process exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what} = {actual} exceeds exact-computation limit {limit}")]
    SizeGuard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("guard violated: {0}")]
    Guard(String),

    #[error("sampler failure: {0}")]
    SamplerFailure(String),

    #[error(
        "component is not erasable (no error produces exactly this violation set): \
         checks {component:?}"
    )]
    NotErasable { component: Vec<usize> },

    #[error("unsupported code for this operation: {0}")]
    UnsupportedCode(String),

    #[error("linear system has no solution")]
    NoSolution,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;
