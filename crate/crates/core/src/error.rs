use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation order must be at least 1, got {0}")]
    InvalidOrder(i64),

    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },

    #[error("exponent {exponent} lies outside the window [-{order}, {order}]")]
    WindowExceeded { exponent: i64, order: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("value is infinite; the standard part is undefined")]
    NotFinite,

    #[error("zero has no valuation")]
    ZeroValuation,

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("division by zero at node {node} (`{subexpr}`)")]
    Evaluation { node: usize, subexpr: String },

    #[error("pole at grid point i = {index}")]
    PoleOnGrid { index: usize },

    #[error("not differentiable: {reason}")]
    NotDifferentiable {
        reason: String,
        /// Per-witness shadows of the difference quotient; `None` marks an infinite quotient.
        values: Vec<(String, Option<String>)>,
    },

    #[error("expression is not a polynomial: {0}")]
    NotPolynomial(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("grid of {n} points is too coarse for C = {c}; need n >= {required}")]
    Resolution { n: usize, c: f64, required: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::WindowExceeded { .. } => "WindowExceeded",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotFinite => "NotFinite",
            Error::ZeroValuation => "ZeroValuation",
            Error::Syntax { .. } => "SyntaxError",
            Error::Evaluation { .. } | Error::PoleOnGrid { .. } => "EvaluationError",
            Error::NotDifferentiable { .. } => "NotDifferentiable",
            Error::NotPolynomial(_) => "NotPolynomial",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::Resolution { .. } => "ResolutionError",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Whether the error stems from malformed input text rather than the mathematics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. } | Error::InvalidOrder(_) | Error::InvalidInput(_)
        )
    }
}
