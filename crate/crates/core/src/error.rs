use std::path::PathBuf;

/// Errors produced while reading graphs, partitioning, or spilling queue runs.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header: {0}")]
    Header(String),

    #[error("unsupported METIS format code {0:?} (only unweighted graphs are supported)")]
    UnsupportedFormat(String),

    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("node {node}: neighbor id {neighbor} out of range [1, {n}]")]
    NeighborOutOfRange { node: u64, neighbor: u64, n: u64 },

    #[error("node {0} lists itself as a neighbor")]
    SelfLoop(u64),

    #[error("node {node} lists neighbor {neighbor} more than once")]
    DuplicateNeighbor { node: u64, neighbor: u64 },

    #[error("expected {expected} node lines, found {found}")]
    LineCount { expected: u64, found: u64 },

    #[error("degree sum {found} does not match 2m = {expected}")]
    DegreeSum { expected: u64, found: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("partition has {found} entries but the graph has {expected} nodes")]
    PartitionLength { expected: u64, found: u64 },

    #[error("block id {block} at node {node} is not below k = {k}")]
    BlockOutOfRange { node: u64, block: u32, k: u32 },

    #[error("node {found} streamed out of order (expected {expected})")]
    OutOfOrder { expected: u64, found: u64 },

    #[error("queue sequencing violated: {0}")]
    Sequencing(String),

    #[error("all {k} blocks are at the balance limit {l_max}")]
    Infeasible { k: u32, l_max: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
