use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix order must be at least 2, got {0}")]
    MatrixTooSmall(usize),

    #[error("field `{field}` has length {found}, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("diagonal entries alpha[{first}] and alpha[{second}] are equal")]
    DuplicateDiagonal { first: usize, second: usize },

    #[error("branch index {k} is outside 1..={d}")]
    BadIndex { k: usize, d: usize },

    #[error("series cap {found} does not match requested degree {expected}")]
    DegreeMismatch { expected: u32, found: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("series has zero constant term")]
    ZeroConstantTerm,

    #[error("operation needs a power series, got negative exponents")]
    NotPowerSeries,

    #[error("multi-index has a negative component")]
    NegativeIndex,

    #[error("denominator vanishes in {0}")]
    DenominatorZero(&'static str),

    #[error("elimination hit a singular pivot")]
    SingularElimination,

    #[error("ratio {0} is undefined")]
    DivisionByZero(String),

    #[error("no convergence: {0}")]
    ConvergenceFailure(String),

    #[error("branch {k} is ambiguous: two eigenvalues are equidistant from alpha[{k}]")]
    BranchAmbiguity { k: usize },

    #[error("matrix has a non-real eigenvalue near {re} + {im}i")]
    ComplexSpectrum { re: f64, im: f64 },

    #[error("malformed series text: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
