use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Input-side problems (bad shapes, invalid specs, schema issues) and numeric
/// failures (rank ambiguity, convergence) are kept as distinct variants so the
/// command-line harness can map them onto its exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("anti-unitary operator is not a projective involution (deviation {deviation:e})")]
    NotInvolutive { deviation: f64 },
    #[error("gaussian width must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("group closure exceeds the maximal order {limit}")]
    GroupTooLarge { limit: usize },
    #[error("generator {index} is not unitary (deviation {deviation:e})")]
    NonUnitaryGenerator { index: usize, deviation: f64 },
    #[error("anti-unitary operator does not normalize the unitary group")]
    NotNormalizing,
    #[error("numeric rank is ambiguous (singular value gap ratio {ratio:e})")]
    RankAmbiguous { ratio: f64 },
    #[error("no generic central element found after {attempts} attempts")]
    DegenerateGenericElement { attempts: usize },
    #[error("intertwiner square is not scalar (deviation {deviation:e})")]
    NonScalarSquare { deviation: f64 },
    #[error("invariant Hermitian dimension {found} matches neither m(m+1)/2 nor m(m-1)/2 for m = {multiplicity}")]
    DimensionCountMismatch { found: usize, multiplicity: usize },
    #[error("epsilon sign {epsilon} contradicts the dimension-count class {class}")]
    EpsilonMismatch { epsilon: i8, class: String },
    #[error("inconsistent isotypic decomposition: {0}")]
    InconsistentDecomposition(String),
    #[error("invalid involution signature: {0}")]
    InvalidSignature(String),
    #[error("unsupported symmetry data: {0}")]
    Unsupported(String),
    #[error("invalid ensemble spec: {0}")]
    SpecInvalid(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("operator algebra violation: {0}")]
    AlgebraViolation(String),
    #[error("element is not in the symmetric space (deviation {deviation:e})")]
    NotInM { deviation: f64 },
    #[error("dimension {0} is not divisible by 4")]
    DimensionNotDivisible(usize),
    #[error("gauge field component {index} is not in su(N) (deviation {deviation:e})")]
    NotSuNc { index: usize, deviation: f64 },
    #[error("zero-mode count is ambiguous: eigenvalue {value:e} lies in (tol, 10 tol) with tol = {tol:e}")]
    ToleranceAmbiguous { value: f64, tol: f64 },
    #[error("index theorem violated: {found} zero modes but |nu| = {nu}")]
    IndexViolation { found: usize, nu: usize },
    #[error("too few levels: need at least {needed}, got {got}")]
    TooFewLevels { needed: usize, got: usize },
    #[error("too few spacings: need at least {needed}, got {got}")]
    TooFewSpacings { needed: usize, got: usize },
    #[error("polynomial degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("beta must be 1, 2 or 4, got {0}")]
    InvalidBeta(u32),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by malformed input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Schema(_)
                | Error::SpecInvalid(_)
                | Error::DimensionMismatch { .. }
                | Error::NonUnitaryGenerator { .. }
                | Error::NotNormalizing
                | Error::InvalidSignature(_)
                | Error::Unsupported(_)
                | Error::InvalidSigma(_)
                | Error::NotSuNc { .. }
                | Error::DimensionNotDivisible(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
