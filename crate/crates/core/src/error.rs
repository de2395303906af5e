use thiserror::Error;

/// Failure modes shared by every module of the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("angular span singularity: 1 - x sin(theta) = 0 at x = {x}, theta = {theta}")]
    SpanSingularity { x: f64, theta: f64 },
    #[error("target coincides with an array element at position {position} m")]
    ElementCoincidence { position: f64 },
    #[error("invalid array layout: {0}")]
    InvalidLayout(String),
    #[error("singular normalized Fisher matrix (det = {det:e}, threshold {threshold:e})")]
    SingularFisher { det: f64, threshold: f64 },
    #[error("ill-conditioned Fisher inversion (residual {residual:e})")]
    IllConditioned { residual: f64 },
    #[error("closed form unavailable near broadside singularity: |theta| = {theta} > {limit}")]
    SingularityNearPi2 { theta: f64, limit: f64 },
    #[error("argument outside the validity strip: {0}")]
    DomainError(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Stable machine-readable code, emitted in the `error_code` CSV column.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateGeometry(_) => "degenerate_geometry",
            Error::SpanSingularity { .. } => "span_singularity",
            Error::ElementCoincidence { .. } => "element_coincidence",
            Error::InvalidLayout(_) => "invalid_layout",
            Error::SingularFisher { .. } => "singular_fisher",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::SingularityNearPi2 { .. } => "singularity_near_pi2",
            Error::DomainError(_) => "domain_error",
            Error::Precondition(_) => "precondition",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
