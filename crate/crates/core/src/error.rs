use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes of the inputs do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The input is not a well-formed instance of the named type.
    #[error("structural error: {0}")]
    Structural(String),

    /// An operation needs a data view the data set does not carry.
    #[error("configuration error: {needed_by} requires the {view} view")]
    MissingView {
        view: &'static str,
        needed_by: &'static str,
    },

    /// The affinity map cannot be evaluated against this category model.
    #[error("configuration error: affinity map `{map}` is incompatible with a {model} model")]
    IncompatibleMap {
        map: &'static str,
        model: &'static str,
    },

    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A node of the adjacency view has zero degree.
    #[error("isolated node {node}: degree is zero")]
    IsolatedNode { node: usize },

    /// Invalid algorithm configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A step of an iterative algorithm failed.
    #[error("iteration {iteration}: {source}")]
    Step {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Error {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step {
                iteration,
                source: Box::new(e),
            },
        }
    }
}
