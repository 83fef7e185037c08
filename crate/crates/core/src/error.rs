use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate direct link: h11 and h22 must be nonzero")]
    DegenerateDirectLink,
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("covariance is not positive semidefinite")]
    NonPsd,
    #[error("singular conditioning: mutual information is unbounded")]
    SingularConditioning,
    #[error("empty input")]
    EmptyInput,
    #[error("cannot intersect inner and outer regions")]
    MixedKinds,
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("singular preset: {0}")]
    SingularPreset(String),
    #[error("degenerate denominator in lambda_costa")]
    DegenerateDenominator,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
