use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    Pole(f64),

    #[error("series did not converge within {terms} terms (|z| = {modulus})")]
    NonConvergence { terms: usize, modulus: f64 },

    #[error("floating-point overflow: {0}")]
    Overflow(String),

    #[error("oracle needs {required} bits, budget is {budget}")]
    PrecisionBudgetExceeded { required: u32, budget: u32 },

    #[error("quadrature did not converge: estimate {value:e}, error {error:e} after {intervals} intervals")]
    Quadrature { value: f64, error: f64, intervals: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported initial datum: {0}")]
    UnsupportedDatum(String),

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("divergent integral: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
