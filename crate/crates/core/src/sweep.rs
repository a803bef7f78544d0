//! Independent partitioning runs over in-memory graphs.
//!
//! A single run is inherently sequential; parallelism comes from running
//! many (graph, parameter, backend) combinations at once.

use crate::error::Result;
use crate::graph_io::{BlockId, InMemoryGraph};
use crate::metrics::PartitionResult;
use crate::partitioner::{run_partition, Backend, PartitionConfig};

#[derive(Debug, Clone)]
pub struct SweepJob<'g> {
    pub graph: &'g InMemoryGraph,
    pub config: PartitionConfig,
    pub backend: Backend,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub result: PartitionResult,
    pub assignments: Vec<BlockId>,
}

fn run_job(job: &SweepJob<'_>) -> Result<SweepOutcome> {
    let mut assignments = Vec::with_capacity(job.graph.header().n as usize);
    let result = run_partition(
        job.graph.stream(),
        &job.config,
        &job.backend,
        &mut assignments,
    )?;
    Ok(SweepOutcome {
        result,
        assignments,
    })
}

/// Runs every job in order on the calling thread.
pub fn run_sweep_sequential(jobs: &[SweepJob<'_>]) -> Vec<Result<SweepOutcome>> {
    jobs.iter().map(run_job).collect()
}

/// Runs jobs on the rayon pool when `parallel` is enabled; output order
/// matches `jobs`.
pub fn run_sweep(jobs: &[SweepJob<'_>]) -> Vec<Result<SweepOutcome>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        jobs.par_iter().map(run_job).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sweep_sequential(jobs)
    }
}
