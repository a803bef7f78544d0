use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GenConfig;
use crate::error::Result;
use crate::graph_io::{GraphHeader, NodeId, NodeRecord, NodeStream};

const MAX_GRID: u64 = 4096;

/// Random geometric graph over the unit square.
///
/// The square is split into a `grid x grid` array of cells with side at
/// least the radius, and cells are grouped into horizontal strips, one per
/// chunk. Each strip draws its points from its own PRNG stream, so any strip
/// can be regenerated independently. Ids follow strip order and, inside a
/// strip, row-major cell order. Neighborhoods of strip `c` only involve
/// strips `c - 1..=c + 1`, so at most three strips of points are resident.
/// The header's edge count comes from an extra counting pass.
pub struct RggStream {
    layout: Layout,
    header: GraphHeader,
    window: VecDeque<Strip>,
    strip: u64,
    adjacency: Vec<Vec<NodeId>>,
    cursor: usize,
    lo: u64,
}

#[derive(Clone, Copy)]
struct Layout {
    n: u64,
    radius: f64,
    seed: u64,
    grid: u64,
    strips: u64,
}

struct Strip {
    index: u64,
    row_start: u64,
    rows: u64,
    id_offset: u64,
    /// Points sorted by (cell row, cell column).
    points: Vec<(f64, f64)>,
    /// `cell_start[r * grid + c]..cell_start[r * grid + c + 1]` indexes the
    /// points of local row `r`, column `c`.
    cell_start: Vec<u32>,
}

impl Layout {
    fn row_bounds(&self, s: u64) -> (u64, u64) {
        (
            self.grid * s / self.strips,
            self.grid * (s + 1) / self.strips,
        )
    }

    fn points_before_row(&self, row: u64) -> u64 {
        ((self.n as u128 * row as u128) / self.grid as u128) as u64
    }

    fn cell_of(&self, x: f64, y: f64) -> (u64, u64) {
        let g = self.grid as f64;
        let cx = ((x * g) as u64).min(self.grid - 1);
        let cy = ((y * g) as u64).min(self.grid - 1);
        (cy, cx)
    }

    fn build_strip(&self, s: u64) -> Strip {
        let (row_start, row_end) = self.row_bounds(s);
        let id_offset = self.points_before_row(row_start);
        let count = self.points_before_row(row_end) - id_offset;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(s);
        let y0 = row_start as f64 / self.grid as f64;
        let height = (row_end - row_start) as f64 / self.grid as f64;
        let mut keyed: Vec<(u64, (f64, f64))> = (0..count)
            .map(|_| {
                let x: f64 = rng.random();
                let y = (y0 + height * rng.random::<f64>()).min(f64::from_bits(1f64.to_bits() - 1));
                let (cy, cx) = self.cell_of(x, y);
                let cy = cy.clamp(row_start, row_end - 1);
                ((cy - row_start) * self.grid + cx, (x, y))
            })
            .collect();
        keyed.sort_by_key(|&(cell, _)| cell);
        let rows = row_end - row_start;
        let mut cell_start = vec![0u32; (rows * self.grid + 1) as usize];
        for &(cell, _) in &keyed {
            cell_start[cell as usize + 1] += 1;
        }
        for i in 1..cell_start.len() {
            cell_start[i] += cell_start[i - 1];
        }
        Strip {
            index: s,
            row_start,
            rows,
            id_offset,
            points: keyed.into_iter().map(|(_, p)| p).collect(),
            cell_start,
        }
    }
}

impl Strip {
    fn cell_range(&self, row: u64, col: u64, grid: u64) -> std::ops::Range<usize> {
        let cell = ((row - self.row_start) * grid + col) as usize;
        self.cell_start[cell] as usize..self.cell_start[cell + 1] as usize
    }

    fn contains_row(&self, row: u64) -> bool {
        row >= self.row_start && row < self.row_start + self.rows
    }
}

/// Adjacency lists of every point in `window[center]`, ids ascending.
fn strip_adjacency(layout: &Layout, window: &VecDeque<Strip>, center: usize) -> Vec<Vec<NodeId>> {
    let strip = &window[center];
    let r2 = layout.radius * layout.radius;
    let grid = layout.grid;
    let mut out = Vec::with_capacity(strip.points.len());
    for &(x, y) in &strip.points {
        let (row, col) = layout.cell_of(x, y);
        let row = row.clamp(strip.row_start, strip.row_start + strip.rows - 1);
        let mut list = Vec::new();
        for nr in row.saturating_sub(1)..=(row + 1).min(grid - 1) {
            let Some(owner) = window.iter().find(|s| s.contains_row(nr)) else {
                continue;
            };
            for nc in col.saturating_sub(1)..=(col + 1).min(grid - 1) {
                for j in owner.cell_range(nr, nc, grid) {
                    let (px, py) = owner.points[j];
                    let (dx, dy) = (px - x, py - y);
                    if dx * dx + dy * dy <= r2 {
                        list.push(owner.id_offset + j as u64);
                    }
                }
            }
        }
        out.push(list);
    }
    for (i, list) in out.iter_mut().enumerate() {
        let me = strip.id_offset + i as u64;
        list.retain(|&w| w != me);
        list.sort_unstable();
    }
    out
}

/// Keeps strips `s - 1..=s + 1` resident, evicting anything older.
fn slide_window(layout: &Layout, window: &mut VecDeque<Strip>, s: u64) -> usize {
    while window.front().is_some_and(|f| f.index + 1 < s) {
        window.pop_front();
    }
    let want_hi = (s + 1).min(layout.strips - 1);
    let mut next = window.back().map_or(s.saturating_sub(1), |b| b.index + 1);
    while next <= want_hi {
        window.push_back(layout.build_strip(next));
        next += 1;
    }
    window
        .iter()
        .position(|st| st.index == s)
        .expect("strip resident")
}

impl Layout {
    fn new(cfg: &GenConfig) -> Self {
        let grid = ((1.0 / cfg.rgg_radius).floor() as u64).clamp(1, MAX_GRID);
        Layout {
            n: cfg.n,
            radius: cfg.rgg_radius,
            seed: cfg.seed,
            grid,
            strips: cfg.chunks.min(grid),
        }
    }
}

/// Point coordinates of an RGG configuration, indexed by node id.
pub(super) fn points(cfg: &GenConfig) -> Vec<(f64, f64)> {
    let layout = Layout::new(cfg);
    (0..layout.strips)
        .flat_map(|s| layout.build_strip(s).points)
        .collect()
}

impl RggStream {
    pub(super) fn new(cfg: &GenConfig) -> Self {
        let layout = Layout::new(cfg);
        let mut degree_sum = 0u64;
        let mut window = VecDeque::new();
        for s in 0..layout.strips {
            let center = slide_window(&layout, &mut window, s);
            degree_sum += strip_adjacency(&layout, &window, center)
                .iter()
                .map(|l| l.len() as u64)
                .sum::<u64>();
        }
        Self {
            layout,
            header: GraphHeader {
                n: cfg.n,
                m: degree_sum / 2,
            },
            window: VecDeque::new(),
            strip: 0,
            adjacency: Vec::new(),
            cursor: 0,
            lo: 0,
        }
    }
}

impl Iterator for RggStream {
    type Item = Result<NodeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        while self.cursor == self.adjacency.len() {
            if self.strip == self.layout.strips {
                return None;
            }
            let s = self.strip;
            self.strip += 1;
            let center = slide_window(&self.layout, &mut self.window, s);
            self.adjacency = strip_adjacency(&self.layout, &self.window, center);
            self.lo = self.window[center].id_offset;
            self.cursor = 0;
        }
        let id = self.lo + self.cursor as u64;
        let neighbors = std::mem::take(&mut self.adjacency[self.cursor]);
        self.cursor += 1;
        Some(Ok(NodeRecord { id, neighbors }))
    }
}

impl NodeStream for RggStream {
    fn header(&self) -> GraphHeader {
        self.header
    }
}
