use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no signal: impulse response is empty or all zero")]
    NoSignal,

    #[error("inconsistent distances: {dist_s1} m and {dist_s2} m cannot span a {base} m baseline")]
    InconsistentDistances {
        dist_s1: f64,
        dist_s2: f64,
        base: f64,
    },

    #[error("degenerate triangle: side lengths ({0}, {1}) must be positive")]
    DegenerateTriangle(f64, f64),

    #[error("degenerate band: {name} spans {bins} bin(s), at least 3 are required")]
    DegenerateBand { name: &'static str, bins: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("frequency grids do not match ({expected} vs {found})")]
    GridMismatch { expected: String, found: String },

    #[error("sample rate mismatch: {expected} Hz vs {found} Hz")]
    SampleRateMismatch { expected: u32, found: u32 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("receiver lies within 1 mm of an image source ({distance} m)")]
    CoincidentImage { distance: f64 },

    #[error("invalid config at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by reading or writing files, as opposed to
    /// a failure of the computation itself.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Wav { .. } | Error::Csv { .. } | Error::Format { .. }
        )
    }
}
