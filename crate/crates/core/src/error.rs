use thiserror::Error;

/// Every failure the engine can report. Variants are grouped by the exit
/// code the command-line front end maps them to.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    // malformed or inconsistent input
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cones {0:?} and {1:?} do not meet in a common face")]
    OverlappingCones(Vec<usize>, Vec<usize>),
    #[error("ray {0} lies in no maximal cone")]
    DanglingRay(usize),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("io error: {0}")]
    Io(String),

    // precondition failures
    #[error("vector {0:?} is outside the support of the fan")]
    VectorOutsideSupport(Vec<i64>),
    #[error("fan is not simplicial")]
    NotSimplicial,
    #[error("fan is not complete")]
    IncompleteFan,
    #[error("fan is not projective: the curve cone is not pointed")]
    NotProjective,
    #[error("divisor has no global sections")]
    NoSections,
    #[error("coefficient {0} is irrational")]
    IrrationalCoefficient(String),
    #[error("K+Delta+t0*H is not nef at t0 = {0}")]
    NotNefAtT0(String),
    #[error("wall {0} does not span an extremal ray")]
    NotExtremal(usize),
    #[error("ray of wall {0} is not (K+Delta)-negative")]
    NotNegative(usize),
    #[error("contraction is not a flipping contraction")]
    NotFlipping,
    #[error("no other simplicial chamber: {0}")]
    NoOtherChamber(String),
    #[error("pair is not plt along the given divisor")]
    NotPlt,
    #[error("not a pl flip")]
    NotPlFlip,
    #[error("K+Delta is not Q-Cartier at the given valuation")]
    NotQCartier,
    #[error("divisor S is not present in the model")]
    SNotInModel,
    #[error("stable base locus is everything")]
    AllBaseLocus,
    #[error("boundary is not big")]
    NotBig,
    #[error("K+Delta is not pseudo-effective")]
    NotPseudoEffective,
    #[error("K+Delta is already pseudo-effective")]
    AlreadyPseudoEffective,
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("perturbed boundary is not big in the cube")]
    NotBigInCube,
    #[error("perturbed boundary is not klt in the cube")]
    NotKltInCube,
    #[error("the limit is rational")]
    RationalD,
    #[error("precondition failed: {0}")]
    Precondition(String),

    // caps reached or undecided
    #[error("stable base locus did not stabilize up to multiplier {0}")]
    Unstable(u64),
    #[error("search bound {bound} exceeded ({state})")]
    BoundExceeded { bound: u64, state: String },
    #[error("sequence exceeds its upper bound at index {0}")]
    Unbounded(usize),
    #[error("step cap {0} reached")]
    StepCap(usize),

    // internal checks
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Parse(_) | Invalid(_) | OverlappingCones(..) | DanglingRay(_)
            | UnsupportedDimension(_) | Io(_) => 2,
            Unstable(_) | BoundExceeded { .. } | Unbounded(_) | StepCap(_) => 4,
            Invariant(_) => 5,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
