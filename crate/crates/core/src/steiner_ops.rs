//! Tree-guided row operations shared by ROWCOL and SBE.
//!
//! Every primitive emits `CNOT(c -> t)` for each row addition `row t ^= row c`
//! it performs, so the emitted list, read as row operations, is exactly what
//! was applied to the state.

use crate::circuit::{CnotGate, GateSink};
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::topology::{RootedTree, TopologyGraph};

/// Something a row addition can be applied to.
pub trait RowOps {
    fn apply(&mut self, control: usize, target: usize);
}

impl RowOps for GF2Matrix {
    fn apply(&mut self, control: usize, target: usize) {
        self.row_add_unchecked(control, target);
    }
}

/// A classical bit per wire.
impl RowOps for Vec<bool> {
    fn apply(&mut self, control: usize, target: usize) {
        let v = self[control];
        self[target] ^= v;
    }
}

/// A word of bits per wire; 64 basis states simulated at once.
impl RowOps for Vec<u64> {
    fn apply(&mut self, control: usize, target: usize) {
        let v = self[control];
        self[target] ^= v;
    }
}

/// Gate-only mode.
impl RowOps for () {
    fn apply(&mut self, _control: usize, _target: usize) {}
}

#[inline]
fn emit<R: RowOps + ?Sized, S: GateSink + ?Sized>(state: &mut R, sink: &mut S, c: usize, t: usize) {
    state.apply(c, t);
    sink.push_gate(CnotGate::new(c, t));
}

/// Gates that add the XOR of the tree nodes selected by `in_s` into the root.
///
/// Pass 1 (preorder) adds every unselected non-root node into its parent,
/// pass 2 (children before parents) adds every non-root node into its parent.
/// Unselected nodes are thereby counted twice and cancel. With `undo`, the
/// operations not aimed at the root are replayed backwards, restoring every
/// node except the root.
pub fn tree_parity_add(tree: &RootedTree, in_s: impl Fn(usize) -> bool, undo: bool) -> Vec<CnotGate> {
    let root = tree.root();
    let mut gates = Vec::with_capacity(4 * tree.len());
    for &v in &tree.preorder()[1..] {
        if !in_s(v) {
            gates.push(CnotGate::new(v, tree.parent(v).expect("non-root")));
        }
    }
    for &v in tree.preorder()[1..].iter().rev() {
        gates.push(CnotGate::new(v, tree.parent(v).expect("non-root")));
    }
    if undo {
        let replay: Vec<CnotGate> = gates.iter().rev().filter(|g| g.target != root).copied().collect();
        gates.extend(replay);
    }
    gates
}

/// Gates that XOR the root into every node selected by `in_s`, leaving all
/// other nodes as they were. Transpose of the restoring [`tree_parity_add`].
pub fn tree_parity_fanout(tree: &RootedTree, in_s: impl Fn(usize) -> bool) -> Vec<CnotGate> {
    tree_parity_add(tree, in_s, true).into_iter().rev().map(CnotGate::flipped).collect()
}

/// XOR row `source` into every row in `targets`, routed over a Steiner tree of
/// the active subgraph. Returns the number of gates emitted.
pub fn parity_fanout<R: RowOps + ?Sized, S: GateSink + ?Sized>(
    state: &mut R,
    g: &TopologyGraph,
    source: usize,
    targets: &[usize],
    sink: &mut S,
) -> Result<usize> {
    if targets.is_empty() {
        return Ok(0);
    }
    if targets.contains(&source) {
        return Err(Error::Region(format!("source {source} is also a target")));
    }
    let mut terminals = Vec::with_capacity(targets.len() + 1);
    terminals.push(source);
    terminals.extend_from_slice(targets);
    let tree = g.steiner_tree_2approx(&terminals)?;
    let mut flags = std::collections::HashSet::with_capacity(targets.len());
    flags.extend(targets.iter().copied());
    let gates = tree_parity_fanout(&tree.tree, |v| flags.contains(&v));
    for gate in &gates {
        emit(state, sink, gate.control, gate.target);
    }
    Ok(gates.len())
}

/// Clears column `i` to `e_i` over the active rows.
pub fn eliminate_column<S: GateSink + ?Sized>(
    m: &mut GF2Matrix,
    g: &TopologyGraph,
    i: usize,
    sink: &mut S,
) -> Result<usize> {
    let mut terminals = vec![i];
    terminals.extend(g.active_vertices().filter(|&j| j != i && m.get(j, i)));
    if terminals.len() == 1 && m.get(i, i) {
        return Ok(0);
    }
    let tree = g.steiner_tree_2approx(&terminals)?.tree;
    let post = tree.postorder();
    let mut count = 0;
    for &j in &post {
        if let Some(k) = tree.parent(j) {
            if m.get(j, i) && !m.get(k, i) {
                emit(m, sink, j, k);
                count += 1;
            }
        }
    }
    for &j in &post {
        for &c in tree.children(j) {
            emit(m, sink, j, c);
            count += 1;
        }
    }
    Ok(count)
}

/// Clears row `i` to `e_iᵀ`; column `i` must already be `e_i`.
pub fn eliminate_row<S: GateSink + ?Sized>(
    m: &mut GF2Matrix,
    g: &TopologyGraph,
    i: usize,
    sink: &mut S,
) -> Result<usize> {
    let s_prime = m.solve_row_combination(i)?;
    if s_prime.is_empty() {
        return Ok(0);
    }
    let mut terminals = vec![i];
    terminals.extend(s_prime.iter());
    let tree = g.steiner_tree_2approx(&terminals)?.tree;
    let gates = tree_parity_add(&tree, |v| s_prime.contains(v), false);
    for gate in &gates {
        emit(m, sink, gate.control, gate.target);
    }
    Ok(gates.len())
}

/// Column `i` equals `e_i` on the active rows.
pub fn column_is_unit(m: &GF2Matrix, g: &TopologyGraph, i: usize) -> bool {
    g.active_vertices().all(|j| m.get(j, i) == (j == i))
}

/// Row `i` equals `e_iᵀ`.
pub fn row_is_unit(m: &GF2Matrix, i: usize) -> bool {
    (0..m.n()).all(|j| m.get(i, j) == (j == i))
}
