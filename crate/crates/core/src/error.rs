use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter record violates one of its invariants.
    #[error("invalid parameter `{name}`: {reason}")]
    Invalid { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// No closed form is available for this cone.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge{}: estimated error {achieved:e} > requested {requested:e}", fmt_layer(.layer))]
    Quadrature {
        achieved: f64,
        requested: f64,
        layer: Option<&'static str>,
    },

    /// Too few surviving paths to form the estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The Green function is infinite on the diagonal.
    #[error("singular value: {0}")]
    Singular(String),

    #[error("table initialization failed: {0}")]
    Table(String),
}

fn fmt_layer(layer: &Option<&'static str>) -> String {
    match layer {
        Some(l) => alloc::format!(" in {l}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            name,
            reason: reason.into(),
        }
    }

    /// Tag a quadrature failure with the name of the integration layer.
    pub fn in_layer(self, name: &'static str) -> Self {
        match self {
            Error::Quadrature {
                achieved,
                requested,
                layer: None,
            } => Error::Quadrature {
                achieved,
                requested,
                layer: Some(name),
            },
            other => other,
        }
    }
}
