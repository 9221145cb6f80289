use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Shape or dimension mismatch between operands.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A caller-supplied value is outside its domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// A mesh program violates its structural invariants.
    #[error("invalid mesh program: {0}")]
    Program(String),

    /// Circuit depth outside the supported range.
    #[error("invalid depth {got}: expected {min}..={max}")]
    Depth { got: usize, min: usize, max: usize },

    /// The compiler needs a delay length the hardware does not provide.
    #[error("mesh needs delay length {needed} but hardware offers {available:?}")]
    MissingDelay { needed: usize, available: Vec<usize> },

    /// Inconsistent schedule or hardware state during simulation.
    #[error("simulation error: {0}")]
    Simulation(String),

    /// Problem size beyond the supported envelope.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Hardware parameters describe a device with no usable output.
    #[error("degenerate device: {0}")]
    DegenerateDevice(String),

    /// A probability distribution failed validation.
    #[error("invalid distribution: {0}")]
    Distribution(String),

    /// Requested target cannot be met by the model.
    #[error("infeasible target: {0}")]
    Infeasible(String),

    /// Numerical mesh programming failed to reach the requested residual.
    #[error("mesh programming did not converge: best residual {0:.3e}")]
    NoConvergence(f64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file, with context for diagnostics.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
