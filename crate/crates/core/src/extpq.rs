//! External-memory priority queue for time-forward processing.
//!
//! After a node `v` is assigned block `b`, an entry `<target = w, block = b>`
//! is inserted for every neighbor `w > v`. When node `u` is streamed, all
//! entries with target `u` are extracted; together they are exactly the
//! blocks of `u`'s smaller-id neighbors.
//!
//! Entries are buffered in an in-memory heap bounded by the internal budget
//! `M`. When the heap fills, it is written out as a sorted run of fixed-width
//! records; extraction merges the heap with the heads of all runs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph_io::{BlockId, NodeId};

/// On-disk record width: target u64 LE followed by block u32 LE.
pub const RECORD_BYTES: usize = 12;

pub const DEFAULT_BUFFER_BYTES: usize = 3 << 20;
pub const DEFAULT_BLOCK_BYTES: usize = 64 << 10;

/// Runs merged into one once this many are open.
const MAX_OPEN_RUNS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PqEntry {
    pub target: NodeId,
    pub block: BlockId,
}

impl PqEntry {
    pub fn encode(&self) -> [u8; RECORD_BYTES] {
        let mut out = [0u8; RECORD_BYTES];
        out[..8].copy_from_slice(&self.target.to_le_bytes());
        out[8..].copy_from_slice(&self.block.to_le_bytes());
        out
    }

    pub fn decode(raw: &[u8; RECORD_BYTES]) -> Self {
        Self {
            target: u64::from_le_bytes(raw[..8].try_into().unwrap()),
            block: u32::from_le_bytes(raw[8..].try_into().unwrap()),
        }
    }
}

/// In-memory footprint of one buffered entry.
pub const ENTRY_BYTES: usize = std::mem::size_of::<PqEntry>();

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtPqConfig {
    /// Internal memory budget `M` for buffered entries.
    pub internal_buffer_bytes: usize,
    /// Transfer granularity `M_B`; also the read buffer of each run.
    pub block_bytes: usize,
    /// Parent directory for run files (system temp dir when `None`).
    pub spill_dir: Option<PathBuf>,
}

impl Default for ExtPqConfig {
    fn default() -> Self {
        Self {
            internal_buffer_bytes: DEFAULT_BUFFER_BYTES,
            block_bytes: DEFAULT_BLOCK_BYTES,
            spill_dir: None,
        }
    }
}

impl ExtPqConfig {
    pub fn with_buffer_bytes(mut self, bytes: usize) -> Self {
        self.internal_buffer_bytes = bytes;
        self.block_bytes = self.block_bytes.min(bytes / 2).max(RECORD_BYTES);
        self
    }

    pub fn with_spill_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.spill_dir = Some(dir.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_bytes < RECORD_BYTES {
            return Err(Error::Config(format!(
                "queue block size must be at least {RECORD_BYTES} bytes"
            )));
        }
        if self.internal_buffer_bytes < 2 * self.block_bytes {
            return Err(Error::Config(format!(
                "queue buffer ({} bytes) must be at least twice the block size ({} bytes)",
                self.internal_buffer_bytes, self.block_bytes
            )));
        }
        if self.internal_buffer_bytes / ENTRY_BYTES == 0 {
            return Err(Error::Config("queue buffer holds no entries".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PqStats {
    pub inserted: u64,
    pub extracted: u64,
    pub runs_written: u64,
    pub runs_merged: u64,
    pub peak_heap_entries: usize,
    pub peak_open_runs: usize,
    /// Peak of heap entry bytes plus one read buffer per open run.
    pub peak_memory_bytes: usize,
}

impl PqStats {
    pub fn peak_entry_bytes(&self) -> usize {
        self.peak_heap_entries * ENTRY_BYTES
    }
}

struct Run {
    reader: BufReader<File>,
    head: Option<PqEntry>,
    path: PathBuf,
}

impl Run {
    fn open(path: PathBuf, buffer: usize) -> Result<Self> {
        let file = File::open(&path).map_err(|e| Error::file(&path, e))?;
        let mut run = Self {
            reader: BufReader::with_capacity(buffer, file),
            head: None,
            path,
        };
        run.advance()?;
        Ok(run)
    }

    fn advance(&mut self) -> Result<()> {
        let mut raw = [0u8; RECORD_BYTES];
        self.head = match self.reader.read_exact(&mut raw) {
            Ok(()) => Some(PqEntry::decode(&raw)),
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => None,
            Err(e) => return Err(e.into()),
        };
        Ok(())
    }
}

pub struct ExtPq {
    config: ExtPqConfig,
    dir: tempfile::TempDir,
    heap: BinaryHeap<Reverse<PqEntry>>,
    heap_capacity: usize,
    runs: Vec<Option<Run>>,
    /// Heads of open runs keyed by (target, run slot).
    merge: BinaryHeap<Reverse<(NodeId, usize)>>,
    open_runs: usize,
    frontier: Option<NodeId>,
    next_file: u64,
    stats: PqStats,
}

impl ExtPq {
    pub fn new(config: ExtPqConfig) -> Result<Self> {
        config.validate()?;
        let parent = config.spill_dir.clone().unwrap_or_else(std::env::temp_dir);
        let dir = tempfile::Builder::new()
            .prefix("extpq-")
            .tempdir_in(&parent)
            .map_err(|e| Error::file(&parent, e))?;
        let heap_capacity = config.internal_buffer_bytes / ENTRY_BYTES;
        Ok(Self {
            config,
            dir,
            heap: BinaryHeap::new(),
            heap_capacity,
            runs: Vec::new(),
            merge: BinaryHeap::new(),
            open_runs: 0,
            frontier: None,
            next_file: 0,
            stats: PqStats::default(),
        })
    }

    pub fn stats(&self) -> PqStats {
        self.stats
    }

    pub fn config(&self) -> &ExtPqConfig {
        &self.config
    }

    /// Directory holding this queue's run files; removed when the queue drops.
    pub fn spill_path(&self) -> &Path {
        self.dir.path()
    }

    pub fn len(&self) -> u64 {
        self.stats.inserted - self.stats.extracted
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn open_runs(&self) -> usize {
        self.open_runs
    }

    /// Bytes currently held in memory: buffered entries plus run read buffers.
    pub fn memory_bytes(&self) -> usize {
        self.heap.len() * ENTRY_BYTES + self.open_runs * self.config.block_bytes
    }

    fn note_memory(&mut self) {
        self.stats.peak_heap_entries = self.stats.peak_heap_entries.max(self.heap.len());
        self.stats.peak_open_runs = self.stats.peak_open_runs.max(self.open_runs);
        self.stats.peak_memory_bytes = self.stats.peak_memory_bytes.max(self.memory_bytes());
    }

    pub fn insert(&mut self, entry: PqEntry) -> Result<()> {
        if let Some(f) = self.frontier {
            if entry.target <= f {
                return Err(Error::Sequencing(format!(
                    "insert for target {} at or behind frontier {f}",
                    entry.target
                )));
            }
        }
        if self.heap.len() == self.heap.capacity() {
            let grow = self
                .heap
                .len()
                .max(1024)
                .min(self.heap_capacity - self.heap.len());
            self.heap.reserve_exact(grow);
        }
        self.heap.push(Reverse(entry));
        self.stats.inserted += 1;
        self.note_memory();
        if self.heap.len() >= self.heap_capacity {
            self.spill()?;
        }
        Ok(())
    }

    fn new_run_path(&mut self) -> PathBuf {
        let path = self
            .dir
            .path()
            .join(format!("run-{:06}.bin", self.next_file));
        self.next_file += 1;
        path
    }

    fn spill(&mut self) -> Result<()> {
        let path = self.new_run_path();
        let file = File::create(&path).map_err(|e| Error::file(&path, e))?;
        let mut out = BufWriter::with_capacity(self.config.block_bytes, file);
        // into_sorted_vec on Reverse yields descending targets
        let entries = std::mem::take(&mut self.heap).into_sorted_vec();
        for Reverse(e) in entries.iter().rev() {
            out.write_all(&e.encode())?;
        }
        out.flush()?;
        drop(out);
        self.stats.runs_written += 1;
        self.add_run(path)?;
        if self.open_runs > MAX_OPEN_RUNS {
            self.merge_runs()?;
        }
        self.note_memory();
        Ok(())
    }

    fn add_run(&mut self, path: PathBuf) -> Result<()> {
        let run = Run::open(path, self.config.block_bytes)?;
        match run.head {
            Some(head) => {
                let slot = self.runs.len();
                self.merge.push(Reverse((head.target, slot)));
                self.runs.push(Some(run));
                self.open_runs += 1;
            }
            None => {
                std::fs::remove_file(&run.path).map_err(|e| Error::file(&run.path, e))?;
            }
        }
        Ok(())
    }

    fn close_run(&mut self, slot: usize) -> Result<()> {
        if let Some(run) = self.runs[slot].take() {
            drop(run.reader);
            std::fs::remove_file(&run.path).map_err(|e| Error::file(&run.path, e))?;
            self.open_runs -= 1;
        }
        Ok(())
    }

    /// Pops the next entry of run `slot`, reinserting its new head.
    fn take_from_run(&mut self, slot: usize) -> Result<PqEntry> {
        let run = self.runs[slot].as_mut().expect("open run");
        let entry = run.head.expect("run head");
        run.advance()?;
        match run.head {
            Some(next) => self.merge.push(Reverse((next.target, slot))),
            None => self.close_run(slot)?,
        }
        Ok(entry)
    }

    /// Collapses all open runs into a single sorted run.
    fn merge_runs(&mut self) -> Result<()> {
        let path = self.new_run_path();
        let file = File::create(&path).map_err(|e| Error::file(&path, e))?;
        let mut out = BufWriter::with_capacity(self.config.block_bytes, file);
        while let Some(Reverse((_, slot))) = self.merge.pop() {
            let e = self.take_from_run(slot)?;
            out.write_all(&e.encode())?;
        }
        out.flush()?;
        drop(out);
        self.runs.clear();
        self.stats.runs_merged += 1;
        self.add_run(path)
    }

    /// Removes every entry targeting `v` and appends its block to `out`.
    ///
    /// Calls must use strictly increasing `v`.
    pub fn extract_min_for(&mut self, v: NodeId, out: &mut Vec<BlockId>) -> Result<()> {
        if let Some(f) = self.frontier {
            if v <= f {
                return Err(Error::Sequencing(format!("extraction for {v} after {f}")));
            }
        }
        self.frontier = Some(v);
        while let Some(&Reverse(top)) = self.heap.peek() {
            if top.target > v {
                break;
            }
            if top.target < v {
                return Err(Error::Sequencing(format!(
                    "entry for {} left behind at {v}",
                    top.target
                )));
            }
            self.heap.pop();
            out.push(top.block);
            self.stats.extracted += 1;
        }
        while let Some(&Reverse((target, slot))) = self.merge.peek() {
            if target > v {
                break;
            }
            if target < v {
                return Err(Error::Sequencing(format!(
                    "run entry for {target} left behind at {v}"
                )));
            }
            self.merge.pop();
            let e = self.take_from_run(slot)?;
            out.push(e.block);
            self.stats.extracted += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_queue(dir: &Path, bytes: usize) -> ExtPq {
        let cfg = ExtPqConfig {
            internal_buffer_bytes: bytes,
            block_bytes: RECORD_BYTES,
            spill_dir: Some(dir.to_path_buf()),
        };
        ExtPq::new(cfg).unwrap()
    }

    #[test]
    fn record_layout_is_little_endian() {
        let e = PqEntry {
            target: 0x0102_0304_0506_0708,
            block: 0x0A0B_0C0D,
        };
        let raw = e.encode();
        assert_eq!(raw, [8, 7, 6, 5, 4, 3, 2, 1, 0x0D, 0x0C, 0x0B, 0x0A]);
        assert_eq!(PqEntry::decode(&raw), e);
    }

    #[test]
    fn insert_then_extract() {
        let dir = tempfile::tempdir().unwrap();
        let mut q = small_queue(dir.path(), 1024);
        q.insert(PqEntry {
            target: 7,
            block: 2,
        })
        .unwrap();
        let mut out = Vec::new();
        q.extract_min_for(3, &mut out).unwrap();
        assert!(out.is_empty());
        q.extract_min_for(7, &mut out).unwrap();
        assert_eq!(out, vec![2]);
    }

    #[test]
    fn duplicate_targets() {
        let dir = tempfile::tempdir().unwrap();
        let mut q = small_queue(dir.path(), 1024);
        q.insert(PqEntry {
            target: 7,
            block: 2,
        })
        .unwrap();
        q.insert(PqEntry {
            target: 7,
            block: 0,
        })
        .unwrap();
        let mut out = Vec::new();
        q.extract_min_for(7, &mut out).unwrap();
        out.sort();
        assert_eq!(out, vec![0, 2]);
    }

    #[test]
    fn spills_and_merges_many_runs() {
        let dir = tempfile::tempdir().unwrap();
        // two entries per run forces a run file every other insert
        let mut q = small_queue(dir.path(), 2 * ENTRY_BYTES.max(RECORD_BYTES));
        let mut expect = vec![Vec::new(); 400];
        for i in 0..1000u64 {
            let target = 1 + (i * 7919) % 399;
            let block = (i % 5) as u32;
            q.insert(PqEntry { target, block }).unwrap();
            expect[target as usize].push(block);
        }
        assert!(q.stats().runs_written > MAX_OPEN_RUNS as u64);
        assert!(q.stats().runs_merged > 0);
        assert!(q.open_runs() <= MAX_OPEN_RUNS + 1);
        let mut out = Vec::new();
        for v in 1..400u64 {
            out.clear();
            q.extract_min_for(v, &mut out).unwrap();
            out.sort();
            expect[v as usize].sort();
            assert_eq!(out, expect[v as usize], "target {v}");
        }
        assert!(q.is_empty());
        assert_eq!(q.open_runs(), 0);
        let spill = q.spill_path().to_path_buf();
        assert_eq!(std::fs::read_dir(&spill).unwrap().count(), 0);
        drop(q);
        assert!(!spill.exists());
    }

    #[test]
    fn sequencing_violations() {
        let dir = tempfile::tempdir().unwrap();
        let mut q = small_queue(dir.path(), 1024);
        let mut out = Vec::new();
        q.insert(PqEntry {
            target: 2,
            block: 0,
        })
        .unwrap();
        assert!(matches!(
            q.extract_min_for(3, &mut out),
            Err(Error::Sequencing(_))
        ));
        let mut q = small_queue(dir.path(), 1024);
        q.extract_min_for(5, &mut out).unwrap();
        assert!(q
            .insert(PqEntry {
                target: 5,
                block: 0
            })
            .is_err());
        assert!(q.extract_min_for(5, &mut out).is_err());
    }

    #[test]
    fn rejects_tiny_budget() {
        let cfg = ExtPqConfig {
            internal_buffer_bytes: 100,
            block_bytes: 64,
            spill_dir: None,
        };
        assert!(ExtPq::new(cfg).is_err());
    }
}
