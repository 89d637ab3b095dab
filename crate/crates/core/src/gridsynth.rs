//! Depth-oriented synthesis on grids with ancillas.
//!
//! The primitives ([`copy_fanout`], [`parity_add_grid`]) work on grids of any
//! dimension. [`synthesize_grid_depth`] runs on 2-D layouts: inputs sit in
//! the first columns, outputs in the last ones and the columns in between are
//! work space that starts and ends at 0.

use std::collections::HashSet;

use crate::circuit::{CnotCircuit, CnotGate, GateSink};
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::steiner_ops::tree_parity_add;
use crate::topology::{RootedTree, TopologyGraph};

/// A d-dimensional grid. Cells are numbered row-major (last coordinate
/// fastest), matching [`TopologyGraph::grid`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    dims: Vec<usize>,
}

impl Grid {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Layout(format!("bad grid dimensions {dims:?}")));
        }
        Ok(Grid { dims: dims.to_vec() })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_cells(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, coord: &[usize]) -> bool {
        coord.len() == self.dims.len() && coord.iter().zip(&self.dims).all(|(&x, &m)| x < m)
    }

    pub fn index(&self, coord: &[usize]) -> Result<usize> {
        if !self.contains(coord) {
            return Err(Error::Region(format!("coordinate {coord:?} outside grid {:?}", self.dims)));
        }
        Ok(coord.iter().zip(&self.dims).fold(0, |acc, (&x, &m)| acc * m + x))
    }

    pub fn coord(&self, mut index: usize) -> Vec<usize> {
        let mut c = vec![0; self.dims.len()];
        for (slot, &m) in c.iter_mut().zip(&self.dims).rev() {
            *slot = index % m;
            index /= m;
        }
        c
    }

    pub fn graph(&self) -> Result<TopologyGraph> {
        TopologyGraph::grid(&self.dims)
    }

    /// Grid path from `a` to `b`, fixing coordinates in dimension order.
    pub fn path(&self, a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
        let mut cur = a.to_vec();
        let mut out = vec![self.index(&cur)?];
        self.index(b)?;
        for d in 0..self.dims.len() {
            while cur[d] != b[d] {
                if cur[d] < b[d] {
                    cur[d] += 1;
                } else {
                    cur[d] -= 1;
                }
                out.push(self.index(&cur)?);
            }
        }
        Ok(out)
    }

    /// Comb tree over the box `[lo, hi]` rooted at `root`: a line through the
    /// root along dimension 0, then lines along dimension 1 through each of
    /// those cells, and so on. Lines extend both ways from their base cell.
    fn comb_tree(&self, root: &[usize], lo: &[usize], hi: &[usize]) -> Result<RootedTree> {
        let mut base = vec![root.to_vec()];
        let mut order = Vec::new();
        for d in 0..self.dims.len() {
            let mut grown = Vec::new();
            for cell in &base {
                let mut prev = cell.clone();
                for x in cell[d] + 1..=hi[d] {
                    let mut next = prev.clone();
                    next[d] = x;
                    order.push((self.index(&next)?, self.index(&prev)?));
                    grown.push(next.clone());
                    prev = next;
                }
                let mut prev = cell.clone();
                for x in (lo[d]..cell[d]).rev() {
                    let mut next = prev.clone();
                    next[d] = x;
                    order.push((self.index(&next)?, self.index(&prev)?));
                    grown.push(next.clone());
                    prev = next;
                }
            }
            base.extend(grown);
        }
        Ok(RootedTree::from_ordered(self.index(root)?, &order))
    }

    /// Bounding box of a non-empty coordinate set and whether the set fills it.
    fn bounding_box(&self, cells: &[Vec<usize>]) -> Result<(Vec<usize>, Vec<usize>, bool)> {
        let d = self.dims.len();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0; d];
        let mut seen = HashSet::with_capacity(cells.len());
        for c in cells {
            let idx = self.index(c)?;
            if !seen.insert(idx) {
                return Err(Error::Region(format!("coordinate {c:?} listed twice")));
            }
            for k in 0..d {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        let volume: usize = (0..d).map(|k| hi[k] - lo[k] + 1).product();
        Ok((lo, hi, volume == cells.len()))
    }
}

/// `path[last] ^= path[0]` along a path of adjacent cells; every cell in
/// between ends as it started. Both endpoints are first walked inward so the
/// depth is about the path length instead of four times it. Returns the
/// number of gates.
pub fn path_parity_add<S: GateSink + ?Sized>(path: &[usize], sink: &mut S) -> usize {
    let len = path.len();
    assert!(len >= 2, "path needs two cells");
    let l = len - 1;
    if l == 1 {
        sink.cnot(path[0], path[1]);
        return 1;
    }
    let a = l / 2;
    let b = l - 1 - a;
    let mut walk = Vec::with_capacity(2 * (a + b));
    // Left end: afterwards path[a] holds the original path[0].
    for j in 0..a {
        walk.push(CnotGate::new(path[j + 1], path[j]));
    }
    for j in 0..a {
        walk.push(CnotGate::new(path[j], path[j + 1]));
    }
    // Right end (transpose-inverse of the same walk): the original
    // path[l] now only lives in path[l - b].
    for j in 0..b {
        walk.push(CnotGate::new(path[l - j], path[l - j - 1]));
    }
    for j in 0..b {
        walk.push(CnotGate::new(path[l - j - 1], path[l - j]));
    }
    for &g in &walk {
        sink.push_gate(g);
    }
    sink.cnot(path[a], path[a + 1]);
    for &g in walk.iter().rev() {
        sink.push_gate(g);
    }
    2 * walk.len() + 1
}

/// Moves the value at `path[0]` to `path[last]` through cells that hold 0,
/// leaving every other cell at 0. A copy chain chased by a clearing chain;
/// depth about the path length.
pub fn path_move<S: GateSink + ?Sized>(path: &[usize], sink: &mut S) -> usize {
    let l = path.len().saturating_sub(1);
    for j in 0..l {
        sink.cnot(path[j], path[j + 1]);
        if j >= 1 {
            sink.cnot(path[j], path[j - 1]);
        }
    }
    if l >= 1 {
        sink.cnot(path[l], path[l - 1]);
    }
    2 * l
}

/// Copies the value at `source` into every cell of `region` (which must hold
/// 0), leaving all other cells unchanged.
///
/// Either `region ∪ {source}` is a box, and the copy is a chain fanout along
/// the comb tree rooted at the source (depth at most the sum of the box side
/// lengths minus one each), or `region` is itself a box: the value is first
/// added into the box cell nearest the source along a grid path.
pub fn copy_fanout<S: GateSink + ?Sized>(
    grid: &Grid,
    source: &[usize],
    region: &[Vec<usize>],
    sink: &mut S,
) -> Result<usize> {
    let src = grid.index(source)?;
    if region.is_empty() {
        return Ok(0);
    }
    let idx: Vec<usize> = region.iter().map(|c| grid.index(c)).collect::<Result<_>>()?;
    if idx.contains(&src) {
        return Err(Error::Region(format!("region contains the source {source:?}")));
    }
    let mut with_src = region.to_vec();
    with_src.push(source.to_vec());
    let (lo, hi, full) = grid.bounding_box(&with_src)?;
    let mut count = 0;
    let (root, lo, hi) = if full {
        (source.to_vec(), lo, hi)
    } else {
        let (lo, hi, full) = grid.bounding_box(region)?;
        if !full {
            return Err(Error::Region("region is not a sub-box".into()));
        }
        let near: Vec<usize> = (0..source.len()).map(|k| source[k].clamp(lo[k], hi[k])).collect();
        count += path_parity_add(&grid.path(source, &near)?, sink);
        (near, lo, hi)
    };
    let tree = grid.comb_tree(&root, &lo, &hi)?;
    for (child, parent) in tree.edges() {
        sink.cnot(parent, child);
        count += 1;
    }
    Ok(count)
}

/// `y ^= XOR of the cells in s_set`; every other cell ends unchanged. Runs the
/// tree parity-add over the comb tree of the bounding box of `s_set ∪ {y}`
/// rooted at `y`.
pub fn parity_add_grid<S: GateSink + ?Sized>(
    grid: &Grid,
    s_set: &[Vec<usize>],
    y: &[usize],
    sink: &mut S,
) -> Result<usize> {
    let root = grid.index(y)?;
    let members: HashSet<usize> = s_set.iter().map(|c| grid.index(c)).collect::<Result<_>>()?;
    if members.contains(&root) {
        return Err(Error::Region(format!("accumulator {y:?} is also in the summed set")));
    }
    if members.is_empty() {
        return Ok(0);
    }
    let mut all = s_set.to_vec();
    all.push(y.to_vec());
    let (lo, hi, _) = grid.bounding_box(&all)?;
    let tree = grid.comb_tree(y, &lo, &hi)?;
    let gates = tree_parity_add(&tree, |v| members.contains(&v), true);
    for &g in &gates {
        sink.push_gate(g);
    }
    Ok(gates.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Input,
    Work,
    Output,
    /// Input or output column cell with no data qubit; stays 0.
    Idle,
}

/// `m1 × m2` grid holding `n` data qubits. Input `k` sits at
/// `(k mod m1, k div m1)`, output `t` at `(t mod m1, m2 - c + t div m1)` with
/// `c = ⌈n/m1⌉`; the `s = m2 - 2c` columns in between are work space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridLayout {
    m1: usize,
    m2: usize,
    n: usize,
}

impl GridLayout {
    /// Requires `3n ≤ m1·m2 ≤ n²` and at least one work column.
    pub fn new(m1: usize, m2: usize, n: usize) -> Result<Self> {
        if n == 0 || m1 == 0 || m2 == 0 {
            return Err(Error::Layout("empty layout".into()));
        }
        let cells = m1 * m2;
        if cells < 3 * n || cells > n * n {
            return Err(Error::Layout(format!("{m1}x{m2} grid must have between 3n={} and n^2={} cells", 3 * n, n * n)));
        }
        let c = n.div_ceil(m1);
        if m2 <= 2 * c {
            return Err(Error::Layout(format!("{m1}x{m2} grid leaves no work column for n={n}")));
        }
        Ok(GridLayout { m1, m2, n })
    }

    /// `n × n` grid for `n` data qubits, as used by the depth experiment.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn dims(&self) -> [usize; 2] {
        [self.m1, self.m2]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of input (and output) columns.
    pub fn io_columns(&self) -> usize {
        self.n.div_ceil(self.m1)
    }

    pub fn work_columns(&self) -> usize {
        self.m2 - 2 * self.io_columns()
    }

    pub fn num_wires(&self) -> usize {
        self.m1 * self.m2
    }

    pub fn num_ancillas(&self) -> usize {
        self.num_wires() - self.n
    }

    pub fn wire(&self, row: usize, col: usize) -> usize {
        row * self.m2 + col
    }

    pub fn coord(&self, wire: usize) -> (usize, usize) {
        (wire / self.m2, wire % self.m2)
    }

    pub fn input_cell(&self, k: usize) -> (usize, usize) {
        (k % self.m1, k / self.m1)
    }

    pub fn output_cell(&self, t: usize) -> (usize, usize) {
        (t % self.m1, self.m2 - self.io_columns() + t / self.m1)
    }

    /// Wires of the data qubits, in order. Inputs are read from and results
    /// are left on these wires.
    pub fn data_wires(&self) -> Vec<usize> {
        (0..self.n)
            .map(|k| {
                let (r, c) = self.input_cell(k);
                self.wire(r, c)
            })
            .collect()
    }

    pub fn region(&self, row: usize, col: usize) -> Region {
        let c = self.io_columns();
        if col < c {
            if col * self.m1 + row < self.n { Region::Input } else { Region::Idle }
        } else if col >= self.m2 - c {
            if (col - (self.m2 - c)) * self.m1 + row < self.n { Region::Output } else { Region::Idle }
        } else {
            Region::Work
        }
    }

    pub fn graph(&self) -> Result<TopologyGraph> {
        TopologyGraph::grid(&[self.m1, self.m2])
    }
}

impl std::str::FromStr for GridLayout {
    type Err = Error;

    /// `"m1xm2:n"`, or `"m1xm2"` with `n` left to the caller (set to `m1`).
    fn from_str(s: &str) -> Result<Self> {
        let (dims, n) = match s.split_once(':') {
            Some((d, n)) => (d, Some(n)),
            None => (s, None),
        };
        let bad = || Error::Layout(format!("expected m1xm2[:n], got '{s}'"));
        let (a, b) = dims.split_once('x').ok_or_else(bad)?;
        let m1: usize = a.trim().parse().map_err(|_| bad())?;
        let m2: usize = b.trim().parse().map_err(|_| bad())?;
        let n = match n {
            Some(n) => n.trim().parse().map_err(|_| bad())?,
            None => m1,
        };
        GridLayout::new(m1, m2, n)
    }
}

/// Column coordinates inside one stage. Stage 2 runs mirrored so sources are
/// always on the left and accumulators on the right.
#[derive(Clone, Copy)]
struct Frame {
    m1: usize,
    m2: usize,
    mirror: bool,
}

impl Frame {
    fn wire(&self, row: usize, col: usize) -> usize {
        row * self.m2 + if self.mirror { self.m2 - 1 - col } else { col }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cell {
    /// Holds the copied value and may be used to cancel a neighbour.
    Clean,
    /// Must be cleared for the job owning the column.
    Zero,
    /// Keeps its copy but cannot be relied on later (accumulator column).
    Keep,
}

struct Job {
    /// Accumulator row, also the row the column sum is collected in.
    root: usize,
    /// Accumulator column (frame coordinates).
    dcol: usize,
    bits: Vec<bool>,
    /// Depth of the column sum into `root`.
    reach: usize,
}

struct Batch {
    /// (column, job) pairs, excluding the accumulator-column job.
    cols: Vec<(usize, usize)>,
    /// Job summed directly in the accumulator column.
    dst: Option<usize>,
}

/// When the accumulator column may host a column sum: its other cells must
/// be 0 at that moment, which holds before the first transfer in the forward
/// stage and after the last one in the mirrored stage.
#[derive(Clone, Copy, PartialEq, Eq)]
enum DstTiming {
    BeforeTransfers,
    AfterTransfers,
}

struct StageCtx<'a> {
    f: Frame,
    c: usize,
    /// Source column (frame) for each source row in the current pass.
    a: &'a GF2Matrix,
    src_col: &'a dyn Fn(usize) -> usize,
    dst_col: &'a dyn Fn(usize) -> usize,
    timing: DstTiming,
}

/// Runs of `Zero` cells are cleared from an adjacent `Clean` cell; gates are
/// appended to `out`. Returns false when some run has no usable neighbour.
fn mask_line(wires: &[usize], state: &[Cell], out: &mut Vec<CnotGate>) -> bool {
    let len = state.len();
    let mut i = 0;
    while i < len {
        if state[i] != Cell::Zero {
            i += 1;
            continue;
        }
        let a = i;
        while i < len && state[i] == Cell::Zero {
            i += 1;
        }
        let b = i - 1;
        let left = a > 0 && state[a - 1] == Cell::Clean;
        let right = b + 1 < len && state[b + 1] == Cell::Clean;
        let split = match (left, right) {
            (true, true) => (a + b).div_ceil(2),
            (true, false) => b + 1,
            (false, true) => a,
            (false, false) => return false,
        };
        // [a, split) from the left, far end first; [split, b] from the right.
        for j in (a..split).rev() {
            out.push(CnotGate::new(wires[j - 1], wires[j]));
        }
        for j in split..=b {
            out.push(CnotGate::new(wires[j + 1], wires[j]));
        }
    }
    true
}

impl StageCtx<'_> {
    /// Emits one stage: every accumulator `t` receives `XOR_k a[t][k]·src_k`.
    fn run(&self, sources: &[(usize, usize)], gates: &mut Vec<CnotGate>) -> Result<()> {
        let (m1, m2, c) = (self.f.m1, self.f.m2, self.c);
        // Source k sits in frame column src_col(k), row k mod m1.
        for l in 0..c {
            let rows: Vec<Option<usize>> = (0..m1)
                .map(|r| sources.iter().find(|&&(k, _)| k % m1 == r && (self.src_col)(k) == l).map(|&(k, _)| k))
                .collect();
            if rows.iter().all(Option::is_none) {
                continue;
            }
            let n_out = self.a.n();
            let mut jobs = Vec::new();
            for t in 0..n_out {
                let bits: Vec<bool> = rows.iter().map(|k| k.is_some_and(|k| self.a.get(t, sources[k].1))).collect();
                if bits.iter().any(|&b| b) {
                    let root = t % m1;
                    jobs.push(Job { root, dcol: (self.dst_col)(t), bits, reach: root.max(m1 - 1 - root) });
                }
            }
            if jobs.is_empty() {
                continue;
            }
            let adjacent = l == c - 1;
            let work = c..m2 - c;
            let dst_extra = c == 1;
            let batches = self.plan(&jobs, &rows, adjacent, work.clone(), dst_extra)?;
            let uses_dst = batches.iter().any(|b| b.dst.is_some());
            let last_col = if uses_dst { m2 - 1 } else { m2 - c - 1 };
            let first_col = if adjacent { l } else { c };

            // Copy every source of this column along its row.
            let mut row_copy: Vec<Vec<CnotGate>> = vec![Vec::new(); m1];
            for (r, k) in rows.iter().enumerate() {
                if k.is_none() {
                    continue;
                }
                let g = &mut row_copy[r];
                if !adjacent {
                    let path: Vec<usize> = (l..=c).map(|col| self.f.wire(r, col)).collect();
                    path_parity_add(&path, g);
                }
                for col in first_col..last_col {
                    g.push(CnotGate::new(self.f.wire(r, col), self.f.wire(r, col + 1)));
                }
            }
            let copy: Vec<CnotGate> = row_copy.iter().flatten().copied().collect();
            gates.extend_from_slice(&copy);

            let mut dst_root = None;
            for batch in &batches {
                dst_root = dst_root.or(batch.dst.map(|j| self.f.wire(jobs[j].root, m2 - 1)));
                self.emit_batch(batch, &jobs, &rows, &row_copy, adjacent, first_col, last_col, gates)?;
            }
            // Undo the copy, keeping the accumulator-column root.
            gates.extend(copy.iter().rev().filter(|g| Some(g.target) != dst_root));
        }
        Ok(())
    }

    fn line_state(
        &self,
        batch: &Batch,
        jobs: &[Job],
        r: usize,
        first_col: usize,
        last_col: usize,
    ) -> Vec<Cell> {
        let mut state = vec![Cell::Clean; last_col - first_col + 1];
        for &(col, j) in &batch.cols {
            state[col - first_col] = if jobs[j].bits[r] { Cell::Clean } else { Cell::Zero };
        }
        if let Some(j) = batch.dst {
            state[last_col - first_col] = if jobs[j].bits[r] { Cell::Keep } else { Cell::Zero };
        }
        state
    }

    /// Mask gates for one row; `None` if the row cannot be masked.
    #[allow(clippy::too_many_arguments)]
    fn mask_row(
        &self,
        batch: &Batch,
        jobs: &[Job],
        r: usize,
        row_copy: &[CnotGate],
        adjacent: bool,
        first_col: usize,
        last_col: usize,
    ) -> Option<Vec<CnotGate>> {
        let state = self.line_state(batch, jobs, r, first_col, last_col);
        let mut out = Vec::new();
        if !adjacent && state.iter().all(|&s| s == Cell::Zero) {
            // Nothing in this row is wanted: undo its copy outright.
            out.extend(row_copy.iter().rev());
            return Some(out);
        }
        let wires: Vec<usize> = (first_col..=last_col).map(|col| self.f.wire(r, col)).collect();
        mask_line(&wires, &state, &mut out).then_some(out)
    }

    fn batch_ok(&self, batch: &Batch, jobs: &[Job], rows: &[Option<usize>], adjacent: bool, first: usize, last: usize) -> bool {
        rows.iter().enumerate().all(|(r, k)| {
            k.is_none() || self.mask_row(batch, jobs, r, &[], adjacent, first, last).is_some()
        })
    }

    /// Groups jobs into batches and assigns columns. Jobs with long column
    /// sums get the columns closest to the accumulators.
    fn plan(
        &self,
        jobs: &[Job],
        rows: &[Option<usize>],
        adjacent: bool,
        work: std::ops::Range<usize>,
        dst_extra: bool,
    ) -> Result<Vec<Batch>> {
        let m2 = self.f.m2;
        let src_extra = adjacent;
        let first_col = if adjacent { self.c - 1 } else { self.c };
        let mut slots: Vec<usize> = work.clone().collect();
        if src_extra {
            slots.insert(0, self.c - 1);
        }
        let assign = |members: &[usize], slots: &[usize]| -> Vec<(usize, usize)> {
            let mut members = members.to_vec();
            members.sort_by_key(|&j| (std::cmp::Reverse(jobs[j].reach), j));
            members.iter().zip(slots.iter().rev()).map(|(&j, &col)| (col, j)).collect()
        };

        // Everything in one batch, one job summed in the accumulator column.
        if dst_extra && jobs.len() <= slots.len() + 1 && jobs.len() > 1 {
            let mut candidates: Vec<usize> = (0..jobs.len()).collect();
            candidates.sort_by_key(|&j| (jobs[j].reach, j));
            for d in candidates {
                let rest: Vec<usize> = (0..jobs.len()).filter(|&j| j != d).collect();
                let batch = Batch { cols: assign(&rest, &slots), dst: Some(d) };
                if self.batch_ok(&batch, jobs, rows, adjacent, first_col, m2 - 1) {
                    return Ok(vec![batch]);
                }
            }
        }

        let last_col = work.end - 1;
        let mut queue: Vec<usize> = (0..jobs.len()).collect();
        let mut batches = Vec::new();
        while !queue.is_empty() {
            let mut cap = slots.len().min(self.f.m1);
            loop {
                let mut used_rows = HashSet::new();
                let mut members = Vec::new();
                for &j in &queue {
                    if members.len() == cap {
                        break;
                    }
                    if used_rows.insert(jobs[j].root) {
                        members.push(j);
                    }
                }
                let batch = Batch { cols: assign(&members, &slots), dst: None };
                if self.batch_ok(&batch, jobs, rows, adjacent, first_col, last_col) {
                    queue.retain(|j| !members.contains(j));
                    batches.push(batch);
                    break;
                }
                if cap == 1 {
                    return Err(Error::Invariant("no maskable batch".into()));
                }
                cap -= 1;
            }
        }
        Ok(batches)
    }

    /// Column sum of `col` into `root`, starting from the outermost rows that
    /// can be nonzero.
    fn column_sum(&self, col: usize, root: usize, bits: &[bool], out: &mut Vec<CnotGate>) {
        let w = |r: usize| self.f.wire(r, col);
        if let Some(top) = (0..root).find(|&r| bits[r]) {
            for r in top..root {
                out.push(CnotGate::new(w(r), w(r + 1)));
            }
        }
        if let Some(bottom) = (root + 1..self.f.m1).rev().find(|&r| bits[r]) {
            for r in (root + 1..=bottom).rev() {
                out.push(CnotGate::new(w(r), w(r - 1)));
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn emit_batch(
        &self,
        batch: &Batch,
        jobs: &[Job],
        rows: &[Option<usize>],
        row_copy: &[Vec<CnotGate>],
        adjacent: bool,
        first_col: usize,
        last_col: usize,
        gates: &mut Vec<CnotGate>,
    ) -> Result<()> {
        let m2 = self.f.m2;
        let last = if batch.dst.is_some() { m2 - 1 } else { last_col };
        let mut mask = Vec::new();
        for (r, k) in rows.iter().enumerate() {
            if k.is_some() {
                let g = self
                    .mask_row(batch, jobs, r, &row_copy[r], adjacent, first_col, last)
                    .ok_or_else(|| Error::Invariant(format!("row {r} cannot be masked")))?;
                mask.extend(g);
            }
        }
        gates.extend_from_slice(&mask);

        // Accumulator-column job: sum, then put the other cells back.
        let mut dst_gates = Vec::new();
        let mut dst_root = None;
        if let Some(j) = batch.dst {
            let job = &jobs[j];
            let root = self.f.wire(job.root, m2 - 1);
            dst_root = Some(root);
            self.column_sum(m2 - 1, job.root, &job.bits, &mut dst_gates);
            let restore: Vec<CnotGate> = dst_gates.iter().rev().filter(|g| g.target != root).copied().collect();
            dst_gates.extend(restore);
        }
        if self.timing == DstTiming::BeforeTransfers {
            gates.extend_from_slice(&dst_gates);
        }

        let mut sums = Vec::new();
        for &(col, j) in &batch.cols {
            self.column_sum(col, jobs[j].root, &jobs[j].bits, &mut sums);
        }
        gates.extend_from_slice(&sums);
        for &(col, j) in &batch.cols {
            let job = &jobs[j];
            let path: Vec<usize> = (col..=job.dcol).map(|x| self.f.wire(job.root, x)).collect();
            path_parity_add(&path, gates);
        }
        gates.extend(sums.iter().rev());

        if self.timing == DstTiming::AfterTransfers {
            gates.extend_from_slice(&dst_gates);
        }
        gates.extend(mask.iter().rev().filter(|g| Some(g.target) != dst_root));
        Ok(())
    }
}

/// Depth-optimized synthesis with ancillas on a 2-D grid.
///
/// Stage 1 adds `M·x` into the output cells, stage 2 adds `M⁻¹·y` into the
/// input cells (clearing them), and the outputs are finally moved into the
/// input cells. The returned circuit acts on `m1·m2` wires; the data qubits
/// are [`GridLayout::data_wires`] and every other wire starts and ends at 0.
pub fn synthesize_grid_depth(m: &GF2Matrix, layout: &GridLayout) -> Result<CnotCircuit> {
    let n = layout.n();
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    let inv = m.inverse()?;
    let [m1, m2] = layout.dims();
    let c = layout.io_columns();
    let mut gates = Vec::new();

    // Stage 1: sources are inputs, accumulators outputs.
    let sources: Vec<(usize, usize)> = (0..n).map(|k| (k, k)).collect();
    let src_col = |k: usize| k / m1;
    let dst_col = |t: usize| m2 - c + t / m1;
    StageCtx {
        f: Frame { m1, m2, mirror: false },
        c,
        a: m,
        src_col: &src_col,
        dst_col: &dst_col,
        timing: DstTiming::BeforeTransfers,
    }
    .run(&sources, &mut gates)?;

    // Stage 2, mirrored: outputs are the sources, inputs the accumulators.
    let src_col2 = |t: usize| c - 1 - t / m1;
    let dst_col2 = |k: usize| m2 - 1 - k / m1;
    StageCtx {
        f: Frame { m1, m2, mirror: true },
        c,
        a: &inv,
        src_col: &src_col2,
        dst_col: &dst_col2,
        timing: DstTiming::AfterTransfers,
    }
    .run(&sources, &mut gates)?;

    // Move y_t from its output cell into input cell t, leftmost first.
    for q in 0..c {
        for r in 0..m1 {
            if q * m1 + r < n {
                let path: Vec<usize> = (q..=m2 - c + q).rev().map(|col| layout.wire(r, col)).collect();
                path_move(&path, &mut gates);
            }
        }
    }
    CnotCircuit::from_gates(layout.num_wires(), gates)
}
