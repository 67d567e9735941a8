use alloc::string::String;
use core::fmt;

/// Errors surfaced by constructors and calculators. Contract violations on
/// hot paths (out-of-range timesteps, zero window sizes) panic instead.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Mean sequences are malformed: length mismatch, empty, non-finite or
    /// outside [0, 1].
    InvalidProfile(String),
    /// The profile moves faster than the declared drift limit allows.
    DriftLimitExceeded {
        limit: f64,
        violations: usize,
        first_arm: u8,
        first_t: usize,
        first_step: f64,
    },
    /// Generator parameters are inconsistent or out of range.
    InvalidGenerator(String),
    /// A calculator was asked for something outside its domain.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidProfile(msg) => write!(f, "invalid reward profile: {msg}"),
            Error::DriftLimitExceeded {
                limit,
                violations,
                first_arm,
                first_t,
                first_step,
            } => write!(
                f,
                "drift limit {limit} exceeded {violations} time(s); \
                 first at arm {first_arm}, step {first_t} -> {} (|change| = {first_step})",
                first_t + 1
            ),
            Error::InvalidGenerator(msg) => write!(f, "invalid generator spec: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
