use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("Buchberger exceeded the total-degree bound {0}")]
    DegreeBoundExceeded(u32),
    #[error("coefficient ring is not a field: {0}")]
    NotAField(String),
    #[error("differentials do not compose to zero at degree {0}")]
    NonCommutingDifferentials(i64),
    #[error("free resolution could not be certified within the degree bound: {0}")]
    ResolutionBoundExceeded(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("element is not in the PD ideal: {0}")]
    NotInPDIdeal(String),
    #[error("element is not in I^[2]: {0}")]
    NotInPDSquare(String),
    #[error("algebra is not Artinian: {0}")]
    NotArtinian(String),
    #[error("gamma_p is not nilpotent on the maximal ideal")]
    NotNilpotent,
    #[error("descent stalled above zero")]
    NonTermination,
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("family is not flat: {0}")]
    NotFlat(String),
    #[error("fiber is not smooth: {0}")]
    NotSmooth(String),
    #[error("not a square-zero extension: {0}")]
    NotSquareZero(String),
    #[error("map is not termwise split: {0}")]
    NotSplit(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("truncation order exceeded: {0}")]
    TruncationOrderExceeded(String),
    #[error("no operator of order at most {0} found")]
    OrderBoundTooSmall(usize),
    #[error("class is not of the required Hodge type: {0}")]
    NotInFiltration(String),
    #[error("invalid Hodge diamond: {0}")]
    InvalidDiamond(String),
    #[error("algebra is not unital: {0}")]
    NotUnital(String),
    #[error("{0}! is not invertible in the coefficient ring")]
    FactorialNotInvertible(u32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("variety is not Calabi-Yau")]
    NotCalabiYau,
    #[error("grading mismatch: {0}")]
    GradingMismatch(String),
    #[error("pairing is degenerate: {0}")]
    DegeneratePairing(String),
    #[error("map has no left inverse: {0}")]
    NoLeftInverse(String),
    #[error("exterior power {0} exceeds the rank cap")]
    RankBoundExceeded(usize),
    #[error("unknown corpus {0}")]
    UnknownCorpus(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by a configured limit rather than bad input.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::DegreeBoundExceeded(_)
                | Error::ResolutionBoundExceeded(_)
                | Error::TruncationTooSmall(_)
                | Error::TruncationOrderExceeded(_)
                | Error::OrderBoundTooSmall(_)
                | Error::NonTermination
                | Error::RankBoundExceeded(_)
        )
    }
}
