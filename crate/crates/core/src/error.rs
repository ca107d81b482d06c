use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian: entry ({row}, {col}) differs from its conjugate partner by {residual:e}")]
    NotHermitian { row: usize, col: usize, residual: f64 },

    #[error("operator is not unitary: max deviation of U^dagger U from I is {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("register of {qubits} qubits exceeds the cap of {cap}")]
    RegisterTooLarge { qubits: usize, cap: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("row {row} holds {found} entries, more than the declared sparsity {declared}")]
    SparsityExceeded { row: usize, found: usize, declared: usize },

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid one-sparse term: basis state {0} used more than once")]
    NotOneSparse(usize),

    #[error("malformed coupling graph: {0}")]
    MalformedGraph(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} at basis state {index} does not fit in {bits} bits")]
    TableOverflow { index: usize, value: u64, bits: u32 },

    #[error("ancilla register not restored to |0>: leaked population {leaked:e}")]
    AncillaLeakage { leaked: f64 },

    #[error("eigenvalue {eigenvalue} maps to phase {phase} outside [0, 1)")]
    EigenphaseOutOfRange { eigenvalue: f64, phase: f64 },

    #[error("phase register value {register} decodes to a zero eigenvalue with population {population:e}")]
    SingularRegister { register: usize, population: f64 },

    #[error("postselection success probability {probability:e} is degenerate")]
    DegeneratePostselection { probability: f64 },

    #[error("matrix is singular at pivot column {0}")]
    Singular(usize),

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("operation not supported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for errors raised because an input exceeds a size cap.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::DimensionTooLarge { .. } | Error::RegisterTooLarge { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
