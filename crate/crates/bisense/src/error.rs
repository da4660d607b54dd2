//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulation, processing, and I/O operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid gait or body-model parameters.
    #[error("invalid kinematics parameters: {0}")]
    Kinematics(String),

    /// Invalid environment geometry (node outside room, bad frequency, ...).
    #[error("invalid environment: {0}")]
    Environment(String),

    /// A scatterer lies outside the room box.
    #[error("scatterer at ({0:.3}, {1:.3}, {2:.3}) is outside the room")]
    ScattererOutsideRoom(f64, f64, f64),

    /// A propagation path degenerated to zero length.
    #[error("degenerate zero-length propagation path")]
    DegeneratePath,

    /// A ray delay does not fit the configured tap window.
    #[error("ray delay {delay_ns:.3} ns is outside the tap window [{t0_ns:.3}, {t1_ns:.3}] ns")]
    DelayOutsideWindow {
        delay_ns: f64,
        t0_ns: f64,
        t1_ns: f64,
    },

    /// Two CIRs do not share the same tap grid.
    #[error("mismatched tap grids: {0}")]
    TapGridMismatch(String),

    /// Operation needs more input samples than provided.
    #[error("not enough samples: {0}")]
    NotEnoughSamples(String),

    /// Slow-time axis is not uniformly sampled.
    #[error("non-uniform slow-time sampling: {0}")]
    NonUniformSampling(String),

    /// Unknown window function name.
    #[error("unknown window kind {0:?} (expected rect, hann, hamming, or blackman-harris)")]
    UnknownWindow(String),

    /// STFT/CPI slice does not fit the available slow-time extent.
    #[error("slice of length {wanted} exceeds the {available} available slow-time samples")]
    SliceTooLong { wanted: usize, available: usize },

    /// Zero-energy CIR where a normalized similarity is required.
    #[error("zero-energy CIR passed to {0}")]
    ZeroEnergyCir(&'static str),

    /// Empty packet stream or feedback log.
    #[error("empty {0}")]
    EmptyInput(&'static str),

    /// A cube carries no target power to locate.
    #[error("no target power in data cube (all-zero after clutter removal)")]
    NoTargetPower,

    /// Paired inputs have different lengths.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// Array weight vector dimensions are inconsistent.
    #[error("antenna weight vector dimension mismatch: {0}")]
    AwvDimension(String),

    /// Out-of-range or inconsistent argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Scenario configuration failed validation.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    /// No built-in preset with this name.
    #[error("unknown preset {0:?} (run `presets` to list)")]
    UnknownPreset(String),

    /// Missing or malformed stored artifact.
    #[error("artifact error: {0}")]
    Artifact(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("TOML parse error: {0}")]
    TomlParse(#[from] toml::de::Error),

    #[error("TOML serialize error: {0}")]
    TomlSer(#[from] toml::ser::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Machine-readable JSON rendering for CLI stderr output.
    pub fn to_json(&self) -> String {
        let kind = match self {
            Error::Kinematics(_) => "kinematics",
            Error::Environment(_) => "environment",
            Error::ScattererOutsideRoom(..) => "scatterer_outside_room",
            Error::DegeneratePath => "degenerate_path",
            Error::DelayOutsideWindow { .. } => "delay_outside_window",
            Error::TapGridMismatch(_) => "tap_grid_mismatch",
            Error::NotEnoughSamples(_) => "not_enough_samples",
            Error::NonUniformSampling(_) => "non_uniform_sampling",
            Error::UnknownWindow(_) => "unknown_window",
            Error::SliceTooLong { .. } => "slice_too_long",
            Error::ZeroEnergyCir(_) => "zero_energy_cir",
            Error::EmptyInput(_) => "empty_input",
            Error::NoTargetPower => "no_target_power",
            Error::LengthMismatch(_) => "length_mismatch",
            Error::AwvDimension(_) => "awv_dimension",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Config { .. } => "config",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::Artifact(_) => "artifact",
            Error::Io(_) => "io",
            Error::TomlParse(_) | Error::TomlSer(_) => "toml",
            Error::Json(_) => "json",
        };
        serde_json::json!({ "error": { "kind": kind, "message": self.to_string() } }).to_string()
    }
}
