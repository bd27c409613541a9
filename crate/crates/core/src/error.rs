use thiserror::Error;

/// Errors raised by graph, chain, walk and tree computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("walk undefined at sink: vertex {0} has out-degree 0")]
    Sink(usize),

    #[error("digraph is not strongly connected")]
    NotStronglyConnected,

    #[error("vertex {0} has no in-neighbours")]
    NoInNeighbours(usize),

    #[error("power iteration did not converge in {iters} iterations (last residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("mixing threshold {threshold:e} not reached within {cap} steps (last deviation {last:e})")]
    MixingCap {
        cap: usize,
        threshold: f64,
        last: f64,
        d_trace: Vec<f64>,
    },

    #[error("step cap {cap} exceeded with {visited} of {n} vertices visited")]
    StepCap { cap: u64, visited: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("n too small for eta: {0}")]
    DepthCollapse(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
