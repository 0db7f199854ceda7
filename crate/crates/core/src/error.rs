use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` has no trust entry")]
    MissingTrust(String),

    #[error("endpoints are directly linked; no intermediate vertex cut exists")]
    DirectLink,

    #[error(
        "requested {requested} disjoint paths but the minimum vertex cut order is {cut_order}"
    )]
    Infeasible { requested: usize, cut_order: usize },

    #[error("{nodes} intermediate nodes exceeds the enumeration cap of {cap}; use Monte Carlo sampling instead")]
    SizeCap { nodes: usize, cap: usize },

    #[error("protocol failure: {0}")]
    ProtocolFailure(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
}

impl Error {
    /// True for errors caused by caller input rather than an internal fault.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Overflow(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!(
            "{name} = {p} is not a probability in [0, 1]"
        )))
    }
}
