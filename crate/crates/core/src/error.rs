use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants map one-to-one onto the failure classes of the public
/// operations so callers (and the CLI exit-code table) can dispatch on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The simplicial structure is malformed: a face with too many cofaces,
    /// a pinched vertex, a duplicated simplex, or unmatched boundary.
    #[error("structure error: {0}")]
    Structure(String),

    /// Valid input outside what this library handles (non-orientable
    /// surfaces, dimension above 2).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A Pachner move whose target does not exist or whose result would not
    /// be a simplicial manifold.
    #[error("move not applicable: {0}")]
    Move(String),

    /// Edge lengths that violate a triangle inequality or are not positive
    /// where a Euclidean metric is required.
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("cannot normalize the zero superposition")]
    ZeroState,

    /// Kets paired across different boundaries.
    #[error("boundary mismatch: {0}")]
    Boundary(String),

    /// A proposed Lorentzian cobordism whose Euler characteristic differs
    /// from that of its lower boundary.
    #[error("Euler characteristic constraint violated: chi(X) = {x}, chi(Y) = {y}")]
    EulerConstraint { x: i64, y: i64 },

    #[error("superposition forbidden: {0}")]
    SuperpositionForbidden(String),

    /// A non-manifold component met while the singular penalty is infinite.
    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    /// Parse failure with a 1-based line number (0 when not line oriented).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
