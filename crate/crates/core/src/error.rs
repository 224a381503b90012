use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its valid domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("cannot extract mantissa bytes from non-finite value {0}")]
    NonFinite(f64),

    #[error("malformed key: {0}")]
    MalformedKey(String),

    #[error("unknown chaotic map tag 0x{0:02x}")]
    UnknownMapTag(u8),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("frame geometry: {0}")]
    Geometry(String),

    #[error("image format: {0}")]
    Format(String),

    #[error("frame source exhausted")]
    Exhausted,

    #[error("truncated input: {0}")]
    Truncated(String),

    #[error("bad container magic {0:02x?}")]
    BadMagic([u8; 4]),

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("container header disagrees with context: {field} is {found}, expected {expected}")]
    HeaderMismatch {
        field: &'static str,
        expected: String,
        found: String,
    },

    #[error("analysis: {0}")]
    Analysis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
