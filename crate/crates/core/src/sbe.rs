//! SBE: block elimination with Gray-code enumeration of row patterns.
//!
//! Columns are processed `s` at a time. The block's own rows are first
//! reduced to unit rows on the block. A helper row `l` is then walked through
//! every nonzero `s`-bit pattern in Gray order, and whenever its pattern
//! matches a bucket of other rows it is fanned out into up to `k` of them at
//! once, zeroing their block entries.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use crate::circuit::{CnotCircuit, GateSink};
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::rowcol::synthesize_rowcol;
use crate::steiner_ops::parity_fanout;
use crate::topology::TopologyGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SbeParams {
    /// Batch size for the fanouts from `l`.
    pub k: usize,
    /// Block width.
    pub s: usize,
}

impl SbeParams {
    /// `s = max(1, ⌊log₂(n/k)/2⌋)` for a given `k`.
    pub fn for_k(n: usize, k: usize) -> SbeParams {
        let k = k.clamp(1, n.max(1));
        SbeParams { k, s: raw_width(n, k).max(1) }
    }
}

fn raw_width(n: usize, k: usize) -> usize {
    let ratio = n as f64 / k as f64;
    (ratio.log2() / 2.0).floor().max(0.0) as usize
}

/// `k = ⌈n/δ⌉`, `s` from [`SbeParams::for_k`].
pub fn choose_params(g: &TopologyGraph) -> SbeParams {
    let n = g.num_vertices();
    let delta = g.min_degree().max(1);
    SbeParams::for_k(n, n.div_ceil(delta))
}

/// True when the unclamped width is 0, i.e. blocks give no advantage.
pub fn too_sparse(g: &TopologyGraph) -> bool {
    let n = g.num_vertices();
    raw_width(n, n.div_ceil(g.min_degree().max(1))) == 0
}

pub fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

fn check_input(m: &GF2Matrix, g: &TopologyGraph) -> Result<()> {
    if m.n() != g.num_vertices() {
        return Err(Error::DimensionMismatch { expected: g.num_vertices(), found: m.n() });
    }
    if !g.is_connected() {
        return Err(Error::InvalidGraph("coupling graph is not connected".into()));
    }
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    Ok(())
}

pub fn synthesize_sbe(m: &GF2Matrix, g: &TopologyGraph, params: SbeParams) -> Result<CnotCircuit> {
    check_input(m, g)?;
    let n = m.n();
    let s = params.s.max(1);
    let mut work = m.clone();
    let mut ops = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + s).min(n);
        eliminate_block(&mut work, g, start..end, params, &mut ops)?;
        start = end;
    }
    if !work.is_identity() {
        return Err(Error::Invariant("block elimination did not reach the identity".into()));
    }
    ops.reverse();
    CnotCircuit::from_gates(n, ops)
}

/// Picks parameters from the graph; sparse graphs go to ROWCOL instead.
/// Returns the circuit and the label of the engine that produced it.
pub fn synthesize_sbe_auto(m: &GF2Matrix, g: &TopologyGraph) -> Result<(CnotCircuit, &'static str)> {
    if too_sparse(g) {
        Ok((synthesize_rowcol(m, g)?, "sbe/rowcol-fallback"))
    } else {
        Ok((synthesize_sbe(m, g, choose_params(g))?, "sbe"))
    }
}

fn pattern(m: &GF2Matrix, r: usize, cols: &[usize]) -> usize {
    cols.iter().enumerate().fold(0, |acc, (b, &c)| acc | (usize::from(m.get(r, c)) << b))
}

/// Turns the columns in `block` into identity columns. Earlier columns must
/// already be identity columns. Returns the number of gates emitted.
pub fn eliminate_block<S: GateSink + ?Sized>(
    m: &mut GF2Matrix,
    g: &TopologyGraph,
    block: Range<usize>,
    params: SbeParams,
    sink: &mut S,
) -> Result<usize> {
    let n = m.n();
    let pivots: Vec<usize> = block.clone().collect();
    let width = pivots.len();
    let mut count = 0;

    // Pivot rows route over their own Steiner tree.
    let tree = g.steiner_tree_2approx(&pivots)?;
    let tree_graph = TopologyGraph::from_edges(n, &tree.tree.edges().collect::<Vec<_>>())?;

    for (j, &p) in pivots.iter().enumerate() {
        if !m.get(p, p) {
            if let Some(&r) = pivots[j + 1..].iter().find(|&&r| m.get(r, p)) {
                count += parity_fanout(m, &tree_graph, r, &[p], sink)?;
            } else {
                let reduced = |m: &GF2Matrix, r: usize| {
                    pivots[..j]
                        .iter()
                        .filter(|&&q| m.get(r, q))
                        .fold(m.get(r, p), |acc, &q| acc ^ m.get(q, p))
                };
                let donor = (block.end..n)
                    .find(|&r| reduced(m, r))
                    .ok_or(Error::SingularMatrix)?;
                count += parity_fanout(m, g, donor, &[p], sink)?;
                for &q in &pivots[..j] {
                    if m.get(p, q) {
                        count += parity_fanout(m, &tree_graph, q, &[p], sink)?;
                    }
                }
                if !m.get(p, p) {
                    return Err(Error::Invariant(format!("pivot {p} still zero")));
                }
            }
        }
        let targets: Vec<usize> = pivots.iter().copied().filter(|&q| q != p && m.get(q, p)).collect();
        count += parity_fanout(m, &tree_graph, p, &targets, sink)?;
    }

    let Some(l) = (block.end..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))) else {
        // Last block: no spare row, clear each column straight from its pivot.
        for &p in &pivots {
            let targets: Vec<usize> = (0..block.start).filter(|&r| m.get(r, p)).collect();
            count += parity_fanout(m, g, p, &targets, sink)?;
        }
        return Ok(count);
    };

    for (j, &p) in pivots.iter().enumerate() {
        if m.get(l, pivots[j]) {
            count += parity_fanout(m, g, p, &[l], sink)?;
        }
    }

    let mut buckets: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for r in (0..n).filter(|&r| !block.contains(&r) && r != l) {
        let pat = pattern(m, r, &pivots);
        if pat != 0 {
            buckets.entry(pat).or_default().insert(r);
        }
    }

    let k = params.k.max(1);
    let mut current = 0;
    for i in 1..(1usize << width) {
        if buckets.is_empty() {
            break;
        }
        let next = gray(i);
        let bit = (next ^ current).trailing_zeros() as usize;
        count += parity_fanout(m, g, pivots[bit], &[l], sink)?;
        current = next;
        debug_assert_eq!(pattern(m, l, &pivots), current);
        if let Some(rows) = buckets.remove(&current) {
            let rows: Vec<usize> = rows.into_iter().collect();
            for batch in rows.chunks(k) {
                count += parity_fanout(m, g, l, batch, sink)?;
            }
        }
    }
    for (bit, &p) in pivots.iter().enumerate() {
        if current >> bit & 1 == 1 {
            count += parity_fanout(m, g, p, &[l], sink)?;
        }
    }
    Ok(count)
}
