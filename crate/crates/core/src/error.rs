use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not chordal; chordless cycle {cycle:?}")]
    NotChordal { cycle: Vec<usize> },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("no resolving set of size at most {budget}")]
    ExceedsBudget { budget: usize },
    #[error("table size at node {node} predicted as {predicted:.3e}, ceiling is {ceiling:.3e}")]
    TableBudgetExceeded { node: usize, predicted: f64, ceiling: f64 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
