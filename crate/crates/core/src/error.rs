use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radiance cannot be negative (got {0})")]
    NegativeRadiance(f64),

    #[error("shininess exponent must be non-negative (got {0})")]
    NegativeShininess(f64),

    #[error("shininess exponent {0} exceeds the 7-bit limit of 127")]
    ShininessExceeds7Bit(f64),

    #[error("shininess exponent must be positive for a highlight lobe (got {0})")]
    NoSpecularLobe(f64),

    #[error("material coefficient `{name}` must lie in [0, 1] (got {value})")]
    InvalidCoefficient { name: &'static str, value: f64 },

    #[error("invalid gamma {0}: must be finite and positive")]
    InvalidGamma(f64),

    #[error("degenerate camera: {0}")]
    DegenerateCamera(&'static str),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(&'static str),

    #[error("scene must contain at least one surface patch")]
    EmptyScene,

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("no specular highlight found in image")]
    NoHighlight,

    #[error("sphere not found in image")]
    SphereNotFound,

    #[error("{0}")]
    InvalidSetup(String),

    #[error("encoded value {0} overflows when doubled; use overflow statistics instead")]
    SuperpositionOverflow(f64),

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed image: {reason}")]
    MalformedImage { path: PathBuf, reason: String },

    #[error("scene line {line}: {reason}")]
    SceneParse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
