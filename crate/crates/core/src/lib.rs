//! One-pass streaming graph partitioning with compressed assignment storage.
//!
//! Nodes arrive in id order with their full neighborhoods and are assigned
//! to one of `k` blocks by the Fennel objective under a hard balance limit.
//! Block assignments of already-streamed nodes can be held in a plain array,
//! a run-length compressed index backed by a PLA bit vector, a batch-wise
//! variant of it, or an external-memory priority queue.

pub mod bitvec;
pub mod cli;
pub mod cpi;
pub mod error;
pub mod extpq;
pub mod generator;
pub mod graph_io;
pub mod metrics;
pub mod partitioner;
pub mod sweep;

pub use error::{Error, Result};
pub use graph_io::{BlockId, GraphHeader, NodeId, NodeRecord, NodeStream};
pub use metrics::{PartitionResult, Report};
pub use partitioner::{run_partition, Backend, PartitionConfig, PartitionParams};
