//! METIS node-stream reading and partition-file writing.
//!
//! A [`NodeStream`] yields one [`NodeRecord`] per node in increasing id order.
//! The stream is strictly one-pass and validates each record as it is read;
//! the degree-sum check against the header runs when the stream is exhausted.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u64;
pub type BlockId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphHeader {
    pub n: u64,
    pub m: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub neighbors: Vec<NodeId>,
}

impl NodeRecord {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }
}

/// A one-pass source of node records.
pub trait NodeStream: Iterator<Item = Result<NodeRecord>> {
    fn header(&self) -> GraphHeader;
}

impl<S: NodeStream + ?Sized> NodeStream for Box<S> {
    fn header(&self) -> GraphHeader {
        (**self).header()
    }
}

pub struct MetisStream<R> {
    reader: R,
    header: GraphHeader,
    line_no: u64,
    next_id: u64,
    degree_sum: u64,
    buf: String,
    finished: bool,
}

/// Opens a METIS file for streaming.
pub fn open_metis_stream(path: impl AsRef<Path>) -> Result<MetisStream<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    MetisStream::new(BufReader::with_capacity(1 << 16, file))
}

impl<R: BufRead> MetisStream<R> {
    pub fn new(mut reader: R) -> Result<Self> {
        let mut buf = String::new();
        let mut line_no = 0;
        let header = loop {
            buf.clear();
            if reader.read_line(&mut buf)? == 0 {
                return Err(Error::Header("missing header line".into()));
            }
            line_no += 1;
            let line = buf.trim();
            if line.is_empty() || line.starts_with('%') {
                continue;
            }
            break parse_header(line)?;
        };
        Ok(Self {
            reader,
            header,
            line_no,
            next_id: 0,
            degree_sum: 0,
            buf,
            finished: false,
        })
    }

    /// Reads the next line that is not a comment. Returns `false` at EOF.
    fn next_data_line(&mut self) -> Result<bool> {
        loop {
            self.buf.clear();
            if self.reader.read_line(&mut self.buf)? == 0 {
                return Ok(false);
            }
            self.line_no += 1;
            if !self.buf.trim_start().starts_with('%') {
                return Ok(true);
            }
        }
    }

    fn parse_record(&self) -> Result<NodeRecord> {
        let id = self.next_id;
        let n = self.header.n;
        let mut neighbors = Vec::new();
        for tok in self.buf.split_ascii_whitespace() {
            let raw: u64 = tok.parse().map_err(|_| Error::Parse {
                line: self.line_no,
                msg: format!("invalid neighbor id {tok:?}"),
            })?;
            if raw == 0 || raw > n {
                return Err(Error::NeighborOutOfRange {
                    node: id,
                    neighbor: raw,
                    n,
                });
            }
            let w = raw - 1;
            if w == id {
                return Err(Error::SelfLoop(id));
            }
            neighbors.push(w);
        }
        if let Some(dup) = first_duplicate(&neighbors) {
            return Err(Error::DuplicateNeighbor {
                node: id,
                neighbor: dup,
            });
        }
        Ok(NodeRecord { id, neighbors })
    }

    fn finish(&mut self) -> Result<()> {
        while self.next_data_line()? {
            if !self.buf.trim().is_empty() {
                let mut found = self.header.n + 1;
                while self.next_data_line()? {
                    if !self.buf.trim().is_empty() {
                        found += 1;
                    }
                }
                return Err(Error::LineCount {
                    expected: self.header.n,
                    found,
                });
            }
        }
        if self.degree_sum != 2 * self.header.m {
            return Err(Error::DegreeSum {
                expected: 2 * self.header.m,
                found: self.degree_sum,
            });
        }
        Ok(())
    }
}

fn first_duplicate(neighbors: &[NodeId]) -> Option<NodeId> {
    if neighbors.windows(2).all(|w| w[0] < w[1]) {
        return None;
    }
    let mut sorted = neighbors.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

fn parse_header(line: &str) -> Result<GraphHeader> {
    let fields: Vec<&str> = line.split_ascii_whitespace().collect();
    if fields.len() < 2 {
        return Err(Error::Header(format!(
            "expected \"n m [fmt]\", got {line:?}"
        )));
    }
    let n: u64 = fields[0]
        .parse()
        .map_err(|_| Error::Header(format!("invalid node count {:?}", fields[0])))?;
    let m: u64 = fields[1]
        .parse()
        .map_err(|_| Error::Header(format!("invalid edge count {:?}", fields[1])))?;
    if n == 0 {
        return Err(Error::Header("node count must be at least 1".into()));
    }
    if let Some(fmt) = fields.get(2) {
        if !fmt.bytes().all(|b| b == b'0') {
            return Err(Error::UnsupportedFormat(fmt.to_string()));
        }
    }
    if fields.len() > 3 {
        return Err(Error::UnsupportedFormat(fields[2..].join(" ")));
    }
    Ok(GraphHeader { n, m })
}

impl<R: BufRead> Iterator for MetisStream<R> {
    type Item = Result<NodeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        if self.next_id == self.header.n {
            self.finished = true;
            return self.finish().err().map(Err);
        }
        let res = match self.next_data_line() {
            Ok(true) => self.parse_record(),
            Ok(false) => Err(Error::LineCount {
                expected: self.header.n,
                found: self.next_id,
            }),
            Err(e) => Err(e),
        };
        match res {
            Ok(rec) => {
                self.next_id += 1;
                self.degree_sum += rec.neighbors.len() as u64;
                Some(Ok(rec))
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}

impl<R: BufRead> NodeStream for MetisStream<R> {
    fn header(&self) -> GraphHeader {
        self.header
    }
}

/// A fully materialized graph, for tests, sweeps, and small inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InMemoryGraph {
    header: GraphHeader,
    adjacency: Vec<Vec<NodeId>>,
}

impl InMemoryGraph {
    pub fn from_stream<S: NodeStream>(stream: S) -> Result<Self> {
        let header = stream.header();
        let adjacency = stream
            .map(|r| r.map(|rec| rec.neighbors))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { header, adjacency })
    }

    /// Builds a simple undirected graph from an edge list. Self-loops and
    /// repeated edges are dropped.
    pub fn from_edges(n: u64, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut adjacency = vec![Vec::new(); n as usize];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if u != v {
                adjacency[u as usize].push(v);
                adjacency[v as usize].push(u);
            }
        }
        let mut degree_sum = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            degree_sum += list.len() as u64;
        }
        Self {
            header: GraphHeader {
                n,
                m: degree_sum / 2,
            },
            adjacency,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_stream(open_metis_stream(path)?)
    }

    pub fn header(&self) -> GraphHeader {
        self.header
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as NodeId;
            list.iter().filter(move |&&w| u < w).map(move |&w| (u, w))
        })
    }

    pub fn stream(&self) -> InMemoryStream<'_> {
        InMemoryStream {
            graph: self,
            next: 0,
        }
    }

    pub fn write_metis<W: Write>(&self, out: W) -> Result<()> {
        write_metis(self.stream(), out)
    }
}

pub struct InMemoryStream<'a> {
    graph: &'a InMemoryGraph,
    next: usize,
}

impl Iterator for InMemoryStream<'_> {
    type Item = Result<NodeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let neighbors = self.graph.adjacency.get(self.next)?.clone();
        let id = self.next as NodeId;
        self.next += 1;
        Some(Ok(NodeRecord { id, neighbors }))
    }
}

impl NodeStream for InMemoryStream<'_> {
    fn header(&self) -> GraphHeader {
        self.graph.header
    }
}

/// Writes any node stream as a METIS file with 1-based neighbor ids.
pub fn write_metis<S: NodeStream, W: Write>(stream: S, out: W) -> Result<()> {
    let header = stream.header();
    let mut out = BufWriter::new(out);
    writeln!(out, "{} {}", header.n, header.m)?;
    for rec in stream {
        let rec = rec?;
        let mut first = true;
        for w in rec.neighbors {
            if !first {
                out.write_all(b" ")?;
            }
            first = false;
            write!(out, "{}", w + 1)?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Destination for block assignments as they are decided.
pub trait AssignmentSink {
    fn push(&mut self, block: BlockId) -> Result<()>;
}

impl AssignmentSink for Vec<BlockId> {
    fn push(&mut self, block: BlockId) -> Result<()> {
        Vec::push(self, block);
        Ok(())
    }
}

/// Sink that drops assignments.
pub struct Discard;

impl AssignmentSink for Discard {
    fn push(&mut self, _block: BlockId) -> Result<()> {
        Ok(())
    }
}

/// Streams block ids into a partition file, one decimal id per line.
pub struct PartitionWriter<W: Write> {
    out: BufWriter<W>,
    k: u32,
    written: u64,
}

impl PartitionWriter<File> {
    pub fn create(path: impl AsRef<Path>, k: u32) -> Result<Self> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::file(path, e))?;
        Ok(Self::new(file, k))
    }
}

impl<W: Write> PartitionWriter<W> {
    pub fn new(out: W, k: u32) -> Self {
        Self {
            out: BufWriter::new(out),
            k,
            written: 0,
        }
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        self.out.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

impl<W: Write> AssignmentSink for PartitionWriter<W> {
    fn push(&mut self, block: BlockId) -> Result<()> {
        if block >= self.k {
            return Err(Error::BlockOutOfRange {
                node: self.written,
                block,
                k: self.k,
            });
        }
        writeln!(self.out, "{block}")?;
        self.written += 1;
        Ok(())
    }
}

pub fn write_partition(path: impl AsRef<Path>, assignments: &[BlockId], k: u32) -> Result<()> {
    let mut writer = PartitionWriter::create(path, k)?;
    for &b in assignments {
        writer.push(b)?;
    }
    writer.finish()?;
    Ok(())
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<Vec<BlockId>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let block = line.parse().map_err(|_| Error::Parse {
            line: i as u64 + 1,
            msg: format!("invalid block id {line:?}"),
        })?;
        out.push(block);
    }
    Ok(out)
}
