use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { got: usize, expected: usize },

    #[error("denominator interval contains zero")]
    DivisionByZeroInterval,

    #[error("denominator is identically zero")]
    ZeroDenominator,

    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, col: usize, name: String },

    #[error("{line}:{col}: empty or inverted bounds for `{name}`")]
    BoundInversion { line: usize, col: usize, name: String },

    #[error("unsupported operator: {0}")]
    UnsupportedOperator(String),

    #[error("multi-degree {requested:?} is below the source degree {source_degree:?}")]
    DegreeTooLow { requested: Vec<u32>, source_degree: Vec<u32> },

    #[error("non-positive Bernstein coefficient in denominator")]
    NonPositiveDenominatorCoefficient,

    #[error("relaxation order {order} is below the required {required}")]
    OrderTooLow { order: u32, required: u32 },

    #[error("constraint {0} has an unbounded interval enclosure")]
    UnboundedConstraint(usize),

    #[error("rational program bodies are not supported by the Krivine-Stengle engine")]
    RationalBodyUnsupported,

    #[error("Bernstein engine requires a box domain; program has side constraints")]
    ConstraintsUnsupported,

    #[error("LP is infeasible at order {order}; try a higher order")]
    Infeasible { order: u32 },

    #[error("LP solver failed: {0}")]
    Solver(String),

    #[error("invalid LP file: {0}")]
    LpFormat(String),
}

impl Error {
    /// Parse-time failures (as opposed to analysis failures).
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::BoundInversion { .. }
        )
    }

    /// The requested engine cannot handle this program at all.
    pub fn is_inapplicable(&self) -> bool {
        matches!(
            self,
            Error::RationalBodyUnsupported | Error::ConstraintsUnsupported | Error::UnsupportedOperator(_)
        )
    }

    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::Solver(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
