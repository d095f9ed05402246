use thiserror::Error;

/// Errors raised by the probability calculus and its representations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("conditioning context has zero probability")]
    ZeroConditioningContext,

    #[error("partition cell `{0}` has zero probability")]
    DegenerateCell(String),

    #[error("context is degenerate with respect to variable `{variable}` (value {value})")]
    DegenerateContext { variable: String, value: f64 },

    #[error("reference variable `{variable}` takes {arity} values; this operation needs {expected}")]
    NotDichotomous {
        variable: String,
        arity: usize,
        expected: usize,
    },

    #[error("context mixes trigonometric and hyperbolic coefficients")]
    MixedContext,

    #[error("context is hyperbolic; use the hyperbolic representation")]
    HyperbolicContext,

    #[error("context is trigonometric; use the complex representation")]
    TrigonometricContext,

    #[error("phase identity violated: {0}")]
    PhaseInconsistency(String),

    #[error("change-of-basis matrix is not unitary (residual {residual:.3e})")]
    NonUnitaryBasis { residual: f64 },

    #[error("operators are expressed in different bases")]
    BasisMismatch,

    #[error("hyperbolic number has non-positive squared norm {0}")]
    NotInPositiveCone(f64),

    #[error("rapidity {0} exceeds the representable range")]
    RapidityOverflow(f64),

    #[error("transformed probability {value} for outcome {index} lies outside [0, 1]")]
    OutOfRangeProbability { index: usize, value: f64 },

    #[error("split coefficient |mu| = {mu} exceeds 1 at level {level} for outcome {outcome}")]
    SplitOutOfRange { level: usize, outcome: f64, mu: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("q = {0} is outside (0, 1/2)")]
    QOutOfRange(f64),

    #[error("random model constraints could not be met after {0} attempts")]
    ConstraintUnsatisfiable(usize),

    #[error("invalid model: {0}")]
    Validation(String),

    #[error("unknown context `{0}`")]
    UnknownContext(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake_case identifier for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroConditioningContext => "zero_conditioning_context",
            Error::DegenerateCell(_) => "degenerate_cell",
            Error::DegenerateContext { .. } => "degenerate_context",
            Error::NotDichotomous { .. } => "not_dichotomous",
            Error::MixedContext => "mixed_context",
            Error::HyperbolicContext => "hyperbolic_context",
            Error::TrigonometricContext => "trigonometric_context",
            Error::PhaseInconsistency(_) => "phase_inconsistency",
            Error::NonUnitaryBasis { .. } => "non_unitary_basis",
            Error::BasisMismatch => "basis_mismatch",
            Error::NotInPositiveCone(_) => "not_in_positive_cone",
            Error::RapidityOverflow(_) => "rapidity_overflow",
            Error::OutOfRangeProbability { .. } => "out_of_range_probability",
            Error::SplitOutOfRange { .. } => "split_out_of_range",
            Error::Precondition(_) => "precondition",
            Error::QOutOfRange(_) => "q_out_of_range",
            Error::ConstraintUnsatisfiable(_) => "constraint_unsatisfiable",
            Error::Validation(_) => "validation",
            Error::UnknownContext(_) => "unknown_context",
        }
    }
}
