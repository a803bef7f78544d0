//! Command-line front end: `partition`, `generate`, and `evaluate`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bitvec::{PlaConfig, DEFAULT_CORRECTION_BITS, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::extpq::{ExtPqConfig, DEFAULT_BUFFER_BYTES};
use crate::generator::{generate_stream, rgg_radius_for_degree, GenConfig};
use crate::graph_io::{
    open_metis_stream, read_partition, write_metis, BlockId, NodeStream, PartitionWriter,
};
use crate::metrics::{block_weights, cut_from_stream, imbalance, Report};
use crate::partitioner::{
    max_block_weight, run_partition, Backend, PartitionConfig, DEFAULT_EPSILON, DEFAULT_GAMMA,
};

pub const SPILL_DIR_ENV: &str = "STREAMPART_SPILL_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "streampart",
    version,
    about = "One-pass streaming graph partitioner"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition a METIS graph in a single pass.
    Partition(PartitionCmd),
    /// Write a synthetic graph, or partition it on the fly.
    Generate(GenerateCmd),
    /// Recompute cut and balance of an existing partition.
    Evaluate(EvaluateCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Array,
    Cpi,
    CpiBatch,
    Extpq,
    Hashing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Ba,
    Rgg,
}

#[derive(Debug, Clone, Args)]
pub struct PartitionArgs {
    /// Number of blocks.
    #[arg(short = 'k', long = "blocks")]
    pub k: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// Score scale toward the previous node's block; 1 disables it.
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, value_enum, default_value_t = BackendKind::Cpi)]
    pub backend: BackendKind,
    /// Elements per sub-vector for `cpi-batch`.
    #[arg(long)]
    pub beta: Option<u64>,
    /// Run starts buffered before compression.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: usize,
    /// Bits per PLA correction.
    #[arg(long, default_value_t = DEFAULT_CORRECTION_BITS)]
    pub correction_bits: u32,
    /// In-memory budget of the external queue.
    #[arg(long, default_value_t = DEFAULT_BUFFER_BYTES)]
    pub extpq_buffer_bytes: usize,
    /// Transfer block of the external queue; defaults to 64 KiB, capped at
    /// half the buffer.
    #[arg(long)]
    pub extpq_block_bytes: Option<usize>,
    /// Directory for queue run files; defaults to the system temp dir.
    #[arg(long, env = SPILL_DIR_ENV)]
    pub spill_dir: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl PartitionArgs {
    pub fn config(&self) -> Result<PartitionConfig> {
        let k = self
            .k
            .ok_or_else(|| Error::Config("block count -k is required".into()))?;
        Ok(PartitionConfig {
            k,
            epsilon: self.epsilon,
            gamma: self.gamma,
            kappa: self.kappa,
        })
    }

    pub fn backend(&self) -> Result<Backend> {
        let pla = || {
            if !(2..=32).contains(&self.correction_bits) {
                return Err(Error::Config(format!(
                    "correction bits must be in 2..=32, got {}",
                    self.correction_bits
                )));
            }
            if self.delta == 0 {
                return Err(Error::Config("delta must be positive".into()));
            }
            Ok(PlaConfig::new(self.correction_bits, self.delta))
        };
        Ok(match self.backend {
            BackendKind::Array => Backend::Array,
            BackendKind::Cpi => Backend::Cpi(pla()?),
            BackendKind::CpiBatch => match self.beta {
                Some(beta) if beta > 0 => Backend::CpiBatch { beta, pla: pla()? },
                _ => return Err(Error::Config("cpi-batch requires --beta > 0".into())),
            },
            BackendKind::Extpq => {
                let mut cfg = ExtPqConfig::default().with_buffer_bytes(self.extpq_buffer_bytes);
                if let Some(b) = self.extpq_block_bytes {
                    cfg.block_bytes = b;
                }
                cfg.spill_dir = self.spill_dir.clone();
                cfg.validate()?;
                Backend::ExtPq(cfg)
            }
            BackendKind::Hashing => Backend::Hashing,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct PartitionCmd {
    /// METIS input graph.
    pub graph: PathBuf,
    /// Partition file to write.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub opts: PartitionArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateCmd {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(short = 'n', long = "nodes")]
    pub n: u64,
    /// Edges per new node (BA).
    #[arg(long)]
    pub degree: Option<u64>,
    /// Connection radius (RGG).
    #[arg(long, conflicts_with = "avg_degree")]
    pub radius: Option<f64>,
    /// Pick the RGG radius for this expected average degree.
    #[arg(long)]
    pub avg_degree: Option<f64>,
    #[arg(long)]
    pub chunks: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// METIS file to write.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Partition the generated stream directly.
    #[arg(long)]
    pub partition: bool,
    /// Partition file to write when `--partition` is set.
    #[arg(long, requires = "partition")]
    pub partition_output: Option<PathBuf>,
    #[command(flatten)]
    pub opts: PartitionArgs,
}

impl GenerateCmd {
    pub fn gen_config(&self) -> Result<GenConfig> {
        let mut cfg = match self.model {
            ModelKind::Ba => {
                let d = self
                    .degree
                    .ok_or_else(|| Error::Config("BA requires --degree".into()))?;
                GenConfig::ba(self.n, d, self.seed)
            }
            ModelKind::Rgg => {
                let r = match (self.radius, self.avg_degree) {
                    (Some(r), _) => r,
                    (None, Some(d)) => rgg_radius_for_degree(self.n, d),
                    (None, None) => {
                        return Err(Error::Config(
                            "RGG requires --radius or --avg-degree".into(),
                        ))
                    }
                };
                GenConfig::rgg(self.n, r, self.seed)
            }
        };
        if let Some(c) = self.chunks {
            cfg = cfg.with_chunks(c);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateCmd {
    pub graph: PathBuf,
    pub partition: PathBuf,
    /// Block count; inferred from the largest id when absent.
    #[arg(short = 'k', long = "blocks")]
    pub k: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

/// Peak resident set size from `/proc/self/status`, when available.
pub fn max_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::file(path, e))
}

fn partition_stream<S: NodeStream, W: Write>(
    stream: S,
    graph_name: &str,
    output: Option<&Path>,
    opts: &PartitionArgs,
    out: &mut W,
) -> Result<Report> {
    let config = opts.config()?;
    let backend = opts.backend()?;
    let result = match output {
        Some(path) => {
            let mut sink = PartitionWriter::create(path, config.k)?;
            let r = run_partition(stream, &config, &backend, &mut sink)?;
            sink.finish()?;
            r
        }
        None => run_partition(stream, &config, &backend, &mut crate::graph_io::Discard)?,
    };
    let report = Report::new(graph_name, &result);
    if let Some(path) = &opts.report {
        std::fs::write(path, report.to_json()).map_err(|e| Error::file(path, e))?;
    }
    write!(out, "{}", report.to_key_value())?;
    if let Some(rss) = max_rss_bytes() {
        writeln!(out, "max_rss_bytes={rss}")?;
    }
    Ok(report)
}

fn cmd_partition<W: Write>(cmd: &PartitionCmd, out: &mut W) -> Result<()> {
    let stream = open_metis_stream(&cmd.graph)?;
    partition_stream(
        stream,
        &cmd.graph.display().to_string(),
        cmd.output.as_deref(),
        &cmd.opts,
        out,
    )?;
    Ok(())
}

fn cmd_generate<W: Write>(cmd: &GenerateCmd, out: &mut W) -> Result<()> {
    let cfg = cmd.gen_config()?;
    if cmd.output.is_none() && !cmd.partition {
        return Err(Error::Config(
            "generate needs --output or --partition".into(),
        ));
    }
    if let Some(path) = &cmd.output {
        let mut w = create(path)?;
        write_metis(generate_stream(&cfg)?, &mut w)?;
        w.flush().map_err(|e| Error::file(path, e))?;
    }
    if cmd.partition {
        let name = match cmd.model {
            ModelKind::Ba => format!("ba(n={},d={},seed={})", cfg.n, cfg.ba_degree, cfg.seed),
            ModelKind::Rgg => format!("rgg(n={},r={},seed={})", cfg.n, cfg.rgg_radius, cfg.seed),
        };
        partition_stream(
            generate_stream(&cfg)?,
            &name,
            cmd.partition_output.as_deref(),
            &cmd.opts,
            out,
        )?;
    }
    Ok(())
}

fn cmd_evaluate<W: Write>(cmd: &EvaluateCmd, out: &mut W) -> Result<()> {
    let parts: Vec<BlockId> = read_partition(&cmd.partition)?;
    let k = match cmd.k {
        Some(k) => k,
        None => parts.iter().copied().max().map_or(1, |b| b + 1),
    };
    let weights = block_weights(&parts, k)?;
    let (cut, m) = cut_from_stream(open_metis_stream(&cmd.graph)?, &parts)?;
    let n = parts.len() as u64;
    let rel_cut = if m == 0 { 0.0 } else { cut as f64 / m as f64 };
    let l_max = max_block_weight(n, k, cmd.epsilon);
    let max_w = weights.iter().copied().max().unwrap_or(0);
    writeln!(out, "graph={}", cmd.graph.display())?;
    writeln!(out, "n={n}")?;
    writeln!(out, "m={m}")?;
    writeln!(out, "k={k}")?;
    writeln!(out, "edge_cut={cut}")?;
    writeln!(out, "rel_cut={rel_cut}")?;
    writeln!(out, "imbalance={}", imbalance(&weights, n, k))?;
    writeln!(out, "max_block_weight={max_w}")?;
    writeln!(out, "l_max={l_max}")?;
    writeln!(out, "balanced={}", max_w <= l_max)?;
    writeln!(
        out,
        "block_weights={}",
        weights
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    )?;
    Ok(())
}

/// Executes a parsed command, writing the text report to `out`.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    match &cli.command {
        Command::Partition(cmd) => cmd_partition(cmd, out),
        Command::Generate(cmd) => cmd_generate(cmd, out),
        Command::Evaluate(cmd) => cmd_evaluate(cmd, out),
    }
}
