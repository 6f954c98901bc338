//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by topology construction, circuit parsing, routing and
/// trace validation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A builder or generator was called with out-of-range arguments.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Circuit source text could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The circuit does not fit on the machine.
    #[error("insufficient capacity: {qubits} qubits exceed total machine capacity {capacity}")]
    Capacity { qubits: usize, capacity: usize },

    /// The router could not make progress (e.g. a completely full machine
    /// where no ion can move).
    #[error("routing stalled: {0}")]
    Routing(String),

    /// An emitted trace failed replay validation.
    #[error("trace validation failed in round {round}: {msg}")]
    Validation { round: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
