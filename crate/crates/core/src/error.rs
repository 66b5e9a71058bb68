//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: field `{field}`: {message}")]
    InvalidConfig { field: &'static str, message: String },

    #[error("constants table: {0}")]
    ConstantsTable(String),

    #[error("unit parse error: {0}")]
    UnitParse(String),

    #[error("unstable configuration: thermal effective detuning is {detuning_rad_s} rad/s (must be negative)")]
    UnstableConfiguration { detuning_rad_s: f64 },

    #[error("timestep {dt} s too large; must be at most {max} s to resolve the trap oscillation")]
    TimestepTooLarge { dt: f64, max: f64 },

    #[error("beat frequency is not an exact bin of the demodulation window ({bins} bins)")]
    FrequencyBinMisaligned { bins: f64 },

    #[error("trace shorter than one window ({samples} samples, window needs {window})")]
    TraceTooShort { samples: usize, window: usize },

    #[error("degenerate point cloud: relative eigenvalue split {split} below {tolerance}")]
    DegenerateCloud { split: f64, tolerance: f64 },

    #[error("reference phase drift {drift} rad is not below pi; calibration is ambiguous")]
    DriftTooLarge { drift: f64 },

    #[error("sign ambiguous: extracted phase within {tolerance} rad of pi/2 from the interpolated reference")]
    AmbiguousSign { tolerance: f64 },

    #[error("frame sequence malformed: {0}")]
    BadFrameSequence(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("fit did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    #[error("no sign change in the quadratic coefficient over the scanned pump grid")]
    NoSignChange,

    #[error("zero variance at time slice {index}; coherence undefined")]
    ZeroVariance { index: usize },

    #[error("susceptibility grid insufficient: {0}")]
    InsufficientGrid(String),

    #[error("antinode reference consistent with zero; susceptibility undefined")]
    ReferenceZero,

    #[error("too many bootstrap resamples failed ({failed}/{total})")]
    BootstrapDegenerate { failed: usize, total: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("trace format: {0}")]
    TraceFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
