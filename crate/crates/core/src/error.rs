use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library. The CLI prints [`Error::name`] on the
/// diagnostic stream, so the variant names are part of the external contract.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resolution {got} on axis {axis} is below the minimum of 4")]
    InvalidResolution { axis: usize, got: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable `{name}` is not a coordinate of {manifold}")]
    ForeignVariable { name: String, manifold: String },

    #[error("exterior derivative of a degree {degree} form on a {dim}-manifold")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("manifold mismatch: expected {expected}, found {found}")]
    ManifoldMismatch { expected: String, found: String },

    #[error("expected a top-degree form, found degree {degree}")]
    NotTopDegree { degree: usize },

    #[error("function depends on the azimuth (deviation {deviation:.3e})")]
    NotZonal { deviation: f64 },

    #[error("function is not basic: Reeb-orbit deviation {deviation:.3e}")]
    NotBasic { deviation: f64 },

    #[error("field is not exact: first Fourier mode c1 = ({re}, {im})")]
    NotExact { re: f64, im: f64 },

    #[error("singular frame solve at node {node}")]
    ChartDegeneracy { node: usize },

    #[error("primitive residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("{what}: {left} and {right} disagree beyond {tolerance:.1e}")]
    Inconsistent {
        what: String,
        left: f64,
        right: f64,
        tolerance: f64,
    },

    #[error("Hamiltonian does not vanish outside radius {radius} (max {deviation:.3e})")]
    NotCompactlySupported { radius: f64, deviation: f64 },

    #[error("signed points are not null-homologous: signs sum to {sum}")]
    NotNullHomologous { sum: i64 },

    #[error("resonant divisor at mode {mode}: |1 - exp(2 pi i n theta)| = {modulus:.3e}")]
    ResonantDivisor { mode: i64, modulus: f64 },

    #[error("strict Furstenberg frequencies exhaust precision beyond K = {max} (asked {asked})")]
    PrecisionExhausted { asked: usize, max: usize },

    #[error("function is not flat at the origin: |F({radius})| = {value:.3e}")]
    NotFlat { radius: f64, value: f64 },

    #[error("found {found} valid radius pairs, {wanted} requested")]
    InsufficientPairs { found: usize, wanted: usize },

    #[error("{0}")]
    Unsupported(String),

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidResolution { .. } => "InvalidResolution",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownIdentifier { .. } => "UnknownIdentifier",
            Error::ForeignVariable { .. } => "ForeignVariable",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::ManifoldMismatch { .. } => "ManifoldMismatch",
            Error::NotTopDegree { .. } => "NotTopDegree",
            Error::NotZonal { .. } => "NotZonal",
            Error::NotBasic { .. } => "NotBasic",
            Error::NotExact { .. } => "NotExact",
            Error::ChartDegeneracy { .. } => "ChartDegeneracy",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::Inconsistent { .. } => "Inconsistent",
            Error::NotCompactlySupported { .. } => "NotCompactlySupported",
            Error::NotNullHomologous { .. } => "NotNullHomologous",
            Error::ResonantDivisor { .. } => "ResonantDivisor",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::NotFlat { .. } => "NotFlat",
            Error::InsufficientPairs { .. } => "InsufficientPairs",
            Error::Unsupported(_) => "Unsupported",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
