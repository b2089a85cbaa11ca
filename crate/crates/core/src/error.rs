use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("parity error: {0}")]
    Parity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("unsupported coordinate map: {0}")]
    UnsupportedMap(String),
    #[error("singular odd-odd block: {0}")]
    Singular(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("dependent delta forms: {0}")]
    Wavefront(String),
    #[error("composition undefined: {0}")]
    CompositionUndefined(String),
    #[error("relations not transversal: rank {rank}, need {expected}")]
    NotTransversal { rank: usize, expected: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that signal a mathematically ill-posed request
    /// (as opposed to malformed input or a failed verification).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Contract(_)
                | Error::Divergent(_)
                | Error::Wavefront(_)
                | Error::CompositionUndefined(_)
                | Error::NotTransversal { .. }
                | Error::UnsupportedMap(_)
                | Error::Singular(_)
        )
    }
}
