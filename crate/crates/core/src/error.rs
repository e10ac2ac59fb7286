use thiserror::Error;

/// Errors raised by graph construction, the forest engine, the oracle and
/// the analysis layers. Vertex ids in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a digraph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("arc ({0}, {0}) is a loop")]
    LoopArc(usize),
    #[error("arc ({tail}, {head}) has weight {weight}; weights must be finite and strictly positive")]
    NonpositiveWeight { tail: usize, head: usize, weight: f64 },
    #[error("vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("{count} vertex bases exceed the cap of {cap}")]
    BasisCountOverflow { count: u128, cap: u128 },
    #[error("cutpoint query needs three distinct vertices, got k={k}, i={i}, t={t}")]
    DegenerateTriple { k: usize, i: usize, t: usize },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("forest index {k} exceeds the maximum forest size {max}")]
    IndexBeyondMaxForest { k: usize, max: usize },
    #[error("forest coefficient sigma_{0} is zero")]
    ZeroSigma(usize),
    #[error("alpha = {alpha} is outside (0, {bound})")]
    AlphaOutOfBounds { alpha: f64, bound: f64 },
    #[error("the dense-forest bound is undefined: the digraph has no arcs")]
    UndefinedBound,
    #[error("enumeration needs {required} assignments, above the cap of {cap}")]
    EnumerationCapExceeded { required: u128, cap: u128 },
    #[error("the given vertex set is not a source knot")]
    NotASourceKnot,
    #[error("convexity search is limited to n <= {max}, got n = {n}")]
    GraphTooLargeForConvexity { n: usize, max: usize },
    #[error("the digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("alpha = {alpha} would make the chain substochastic; the maximum is {max}")]
    AlphaTooLarge { alpha: f64, max: f64 },
    #[error("arc ({tail}, {head}) has weight {weight} > 1 and cannot be a transmission probability")]
    WeightAboveOne { tail: usize, head: usize, weight: f64 },
    #[error("Cesaro iteration did not converge: residual {residual} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("missing \"n <count>\" header")]
    MissingHeader,
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for conditioning and convergence failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NumericalBreakdown(_) | Error::NotConverged { .. } => true,
            Error::AtLine { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// The underlying error with any line annotation removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
