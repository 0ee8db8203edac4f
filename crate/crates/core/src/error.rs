use thiserror::Error;

/// Errors raised by recognizers, builders and drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// An exhaustive search was asked to run above its configured cap.
    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The input violates a class precondition (not in the class, has a
    /// balanced skew-partition, not basic, not balanced, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A split, certificate or recipe failed validation.
    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    /// The input satisfies every checked precondition, yet is neither basic
    /// nor decomposable. Carries the recognizer transcript.
    #[error("contradiction witness: {}", .0.join("; "))]
    ContradictionWitness(Vec<String>),

    /// A produced object failed its own verification.
    #[error("verification failed: {0}")]
    Verification(String),

    /// A pluggable oracle broke its contract.
    #[error("oracle contract violated: {0}")]
    OracleContract(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &'static str, needed: usize, cap: usize) -> Result<()> {
    if needed > cap {
        Err(Error::CapExceeded { what, needed, cap })
    } else {
        Ok(())
    }
}
