use thiserror::Error;

/// Errors raised by the algebraic core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds the supported word size")]
    FieldTooLarge(u64),
    #[error("polynomials live in different contexts (GF({p1}) with {n1} variables vs GF({p2}) with {n2} variables)")]
    ContextMismatch {
        p1: u64,
        n1: usize,
        p2: u64,
        n2: usize,
    },
    #[error("at most {max} variables are supported, got {got}")]
    TooManyVariables { max: usize, got: usize },
    #[error("order undefined (infinite): every generator is zero")]
    InfiniteOrder,
    #[error("initial form of the zero polynomial")]
    ZeroPolynomial,
    #[error("generators are not homogeneous")]
    NotHomogeneous,
    #[error("invalid center: {0}")]
    InvalidCenter(String),
    #[error("controlled transform: exceptional power {c} does not divide the total transform (maximal power {max})")]
    ControlledTooLarge { c: u64, max: u64 },
    #[error("strict transform requires a principal ideal, got {0} generators")]
    NotPrincipal(usize),
    #[error("coefficient ideal undefined: {0}")]
    CoefficientIdeal(String),
    #[error("hypersurface is not admissible: {0}")]
    Inadmissible(String),
    #[error("no admissible pivot: {0}")]
    NoPivot(String),
    #[error("{0}")]
    Parse(#[from] ParseError),
}

/// A diagnostic produced by the polynomial/script lexer and parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}
