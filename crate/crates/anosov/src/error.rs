//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`].  Variants are
//! grouped by the domain that raises them; the payload is always a short
//! human-readable explanation naming the offending object.

use thiserror::Error;

/// Errors raised by the construction game.
#[derive(Debug, Error)]
pub enum Error {
    /// A sign word was empty or did not start with `+`.
    #[error("malformed sign word: {0}")]
    MalformedSignWord(String),

    /// Leaf positions were not strictly increasing inside `[0, 1)`.
    #[error("bad leaf positions: {0}")]
    BadLeafPositions(String),

    /// An operation needed equal leaf counts on the two sides.
    #[error("leaf count mismatch: {0}")]
    LeafCountMismatch(String),

    /// An operation required a coherently oriented lamination.
    #[error("lamination not coherent: {0}")]
    NotCoherent(String),

    /// An operation required filling laminations.
    #[error("lamination not filling: {0}")]
    NotFilling(String),

    /// A gluing map must be affine with a unimodular linear part.
    #[error("matrix not unimodular (det {0})")]
    NotUnimodular(i64),

    /// Transversality certification failed; the payload describes the witness.
    #[error("transversality failure: {0}")]
    NotTransverse(String),

    /// A catalog lookup or parameter was invalid.
    #[error("unknown plug or bad catalog parameter: {0}")]
    UnknownPlug(String),

    /// Gluing request referenced boundary tori inconsistently.
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),

    /// Strip/gap bookkeeping would be violated by the requested operation.
    #[error("gap bookkeeping violated: {0}")]
    GapMismatch(String),

    /// A surgery's preconditions were not met.
    #[error("surgery rejected: {0}")]
    Surgery(String),

    /// The exact piecewise-linear geometry hit a degenerate configuration
    /// (tangency, overlapping segments, or an inconsistent arrangement).
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    /// A numeric routine failed to converge or was asked for nonsense.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A train track was structurally malformed.
    #[error("malformed train track: {0}")]
    TrainTrack(String),

    /// A construction script failed to parse or referenced unknown objects.
    #[error("script error: {0}")]
    Script(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
