//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building, transforming, fitting or
/// simulating channels.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("bandwidth must be positive: f_max {f_max} Hz <= f_min {f_min} Hz")]
    NonPositiveBandwidth { f_min: f64, f_max: f64 },

    #[error("a sweep needs at least 2 frequency points, got {0}")]
    TooFewPoints(usize),

    #[error("sweep geometries differ: {left} vs {right}")]
    GeometryMismatch { left: String, right: String },

    #[error("reference sweep is identically zero")]
    ZeroReference,

    #[error("sample count {samples} does not match geometry point count {points}")]
    SampleCountMismatch { samples: usize, points: usize },

    #[error("impulse response is empty or all-zero")]
    ZeroImpulseResponse,

    #[error("sample period must be positive, got {0} s")]
    NonPositiveSamplePeriod(f64),

    #[error("empty time gate: start {start} s >= stop {stop} s")]
    EmptyGate { start: f64, stop: f64 },

    #[error("threshold must be positive, got {0} dB")]
    NonPositiveThreshold(f64),

    #[error("multipath profile must be non-empty")]
    EmptyProfile,

    #[error("profile delays must be strictly increasing (violated at index {0})")]
    NonIncreasingDelays(usize),

    #[error("profile powers must be positive (violated at index {0})")]
    NonPositivePower(usize),

    #[error("need at least {need} {what}, got {got}")]
    TooFewSamples {
        what: &'static str,
        need: usize,
        got: usize,
    },

    #[error("all distances are equal ({0} m); the regression design is degenerate")]
    DegenerateDistances(f64),

    #[error("distances must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("profile does not decay (fitted slope {slope} >= 0); no positive decay constant exists")]
    NonDecayingProfile { slope: f64 },

    #[error("samples have zero variance; the fit is degenerate")]
    ZeroVariance,

    #[error("{family} requires strictly positive samples (violated at index {index})")]
    NonPositiveSamples { family: &'static str, index: usize },

    #[error("unknown preset {0:?}; known presets: sc1, sc2, sc3, cm1, cm4, cm9")]
    UnknownPreset(String),

    #[error("model parameter {name} = {value} is out of range ({constraint})")]
    InvalidModelParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("OFDM config invalid: {0}")]
    InvalidOfdmConfig(String),

    #[error("channel spans {channel} taps but the cyclic prefix admits at most {max} (N_cp + 1); the inter-symbol-interference model would be invalid")]
    ChannelExceedsCp { channel: usize, max: usize },

    #[error("Eb/N0 grid is empty")]
    EmptyGrid,

    #[error("{}: malformed CSV at line {line}: {message}", path.display())]
    MalformedCsv {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: line {line}: frequency grid is not uniformly ascending", path.display())]
    NonUniformGrid { path: PathBuf, line: u64 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: invalid JSON: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}
