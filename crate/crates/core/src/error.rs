use std::path::PathBuf;

use crate::colorspace::ColorSpace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("expected a {expected:?} image, got {found:?}")]
    InvalidColorSpace { expected: ColorSpace, found: ColorSpace },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("{0} pixels fall outside the sRGB gamut")]
    OutOfGamut(usize),

    #[error("embedding has zero norm")]
    DegenerateEmbedding,

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("need at least 2 samples, got {0}")]
    InsufficientSamples(usize),

    #[error("matrix is not symmetric positive semi-definite: {0}")]
    NotPsd(String),

    #[error("invalid Gaussian statistics: {0}")]
    InvalidStats(String),

    #[error("chroma scale factor must be positive and finite, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid feature set: {0}")]
    InvalidFeatureSet(String),

    #[error("bad magic bytes in {0}")]
    BadMagic(PathBuf),

    #[error("unsupported CFS version {version} in {path}")]
    VersionUnsupported { path: PathBuf, version: u8 },

    #[error("corrupt CFS payload in {path}: {reason}")]
    CorruptPayload { path: PathBuf, reason: String },

    #[error("manifest mismatch for {path}: {reason}")]
    ManifestMismatch { path: PathBuf, reason: String },

    #[error("no filename pairs between {gt} and {pred}")]
    NoPairs { gt: PathBuf, pred: PathBuf },

    #[error("unpaired files with --strict: {0}")]
    UnpairedFiles(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
