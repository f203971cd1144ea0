use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VarMismatch { left: Vec<String>, right: Vec<String> },

    #[error("field modes differ: {0} vs {1}")]
    FieldMismatch(&'static str, &'static str),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("no image given for variable `{0}`")]
    MissingImage(String),

    #[error("value with nonzero imaginary part in real mode")]
    NotReal,

    #[error("operation requires complex mode")]
    RequiresComplex,

    #[error("one-form is not closed: d{i}/d{j} mismatch")]
    NotClosed { i: String, j: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("(f, g) is not a solution: {0}")]
    NotASolution(String),

    #[error("invalid Jordan specification: {0}")]
    InvalidSpec(String),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("monomial mixes variables of distinct eigenvalues: {0}")]
    CrossEigenvalueMonomial(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used in the CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::VarMismatch { .. } => "var_mismatch",
            Error::FieldMismatch(..) => "field_mismatch",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::MissingImage(_) => "missing_image",
            Error::NotReal => "not_real",
            Error::RequiresComplex => "requires_complex",
            Error::NotClosed { .. } => "not_closed",
            Error::Dimension(_) => "dimension",
            Error::Singular => "singular",
            Error::NotNilpotent => "not_nilpotent",
            Error::NotASolution(_) => "not_a_solution",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::Arity(_) => "arity",
            Error::IndexOutOfRange(_) => "index_out_of_range",
            Error::CrossEigenvalueMonomial(_) => "cross_eigenvalue_monomial",
            Error::Verification(_) => "verification",
            Error::Parse(_) => "parse",
        }
    }
}
