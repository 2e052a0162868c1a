use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid period {0}: must be finite and positive")]
    InvalidPeriod(f64),

    #[error("{map}: point {point:?} is outside the domain")]
    Domain { map: String, point: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{map}: point {point:?} lies on the singular set")]
    Singular { map: String, point: Vec<f64> },

    #[error("{map} has no inverse")]
    NotInvertible { map: String },

    #[error("domain sampler gave up after {attempts} attempts ({accepted} accepted)")]
    Sampling { attempts: usize, accepted: usize },

    #[error("hull is ambiguous: occupancy touches the raster margin")]
    AmbiguousHull,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain_error(map: &str, point: &[f64]) -> Error {
    Error::Domain {
        map: map.to_string(),
        point: point.to_vec(),
    }
}

pub(crate) fn singular_error(map: &str, point: &[f64]) -> Error {
    Error::Singular {
        map: map.to_string(),
        point: point.to_vec(),
    }
}
