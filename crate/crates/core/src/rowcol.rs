//! ROWCOL: peel a non-cut vertex, clear its column, then its row.

use crate::circuit::{CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::steiner_ops::{column_is_unit, eliminate_column, eliminate_row, row_is_unit};
use crate::topology::TopologyGraph;

/// Which vertex to peel next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Non-cut vertex of least remaining degree, lowest index on ties.
    #[default]
    MinDegree,
    /// Leaves of one BFS spanning tree, deepest first.
    BfsLeaf,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mindeg" => Ok(Strategy::MinDegree),
            "bfsleaf" => Ok(Strategy::BfsLeaf),
            other => Err(Error::InvalidGraph(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RowColOptions {
    pub strategy: Strategy,
    /// Assert the column/row post-states and connectivity after every step.
    pub check_invariants: bool,
}

/// One peeled vertex and the row operations spent on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub vertex: usize,
    pub column_ops: Vec<CnotGate>,
    pub row_ops: Vec<CnotGate>,
}

/// A ROWCOL run that can be advanced one vertex at a time.
#[derive(Clone, Debug)]
pub struct RowColRun {
    m: GF2Matrix,
    g: TopologyGraph,
    opts: RowColOptions,
    bfs_order: Vec<usize>,
    ops: Vec<CnotGate>,
}

impl RowColRun {
    pub fn new(m: &GF2Matrix, g: &TopologyGraph, opts: RowColOptions) -> Result<Self> {
        if m.n() != g.num_vertices() {
            return Err(Error::DimensionMismatch { expected: g.num_vertices(), found: m.n() });
        }
        if !m.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let mut g = g.clone();
        g.activate_all();
        if !g.is_connected() {
            return Err(Error::InvalidGraph("coupling graph is not connected".into()));
        }
        let bfs_order = match opts.strategy {
            Strategy::MinDegree => Vec::new(),
            Strategy::BfsLeaf => {
                let dist = g.distances_from(0);
                let mut order: Vec<usize> = (0..g.num_vertices()).collect();
                order.sort_by_key(|&v| (dist[v], v));
                order
            }
        };
        Ok(RowColRun { m: m.clone(), g, opts, bfs_order, ops: Vec::new() })
    }

    pub fn matrix(&self) -> &GF2Matrix {
        &self.m
    }

    pub fn graph(&self) -> &TopologyGraph {
        &self.g
    }

    fn pick(&mut self) -> Result<usize> {
        match self.opts.strategy {
            Strategy::MinDegree => {
                let cut = self.g.cut_vertices();
                self.g
                    .active_vertices()
                    .filter(|&v| !cut[v])
                    .min_by_key(|&v| (self.g.active_degree(v), v))
                    .ok_or(Error::EmptyGraph)
            }
            Strategy::BfsLeaf => self.bfs_order.pop().ok_or(Error::EmptyGraph),
        }
    }

    /// Peels one vertex; `None` once a single vertex remains.
    pub fn step(&mut self) -> Result<Option<Step>> {
        if self.g.num_active() <= 1 {
            return Ok(None);
        }
        let i = self.pick()?;
        let mut column_ops = Vec::new();
        eliminate_column(&mut self.m, &self.g, i, &mut column_ops)?;
        if self.opts.check_invariants && !column_is_unit(&self.m, &self.g, i) {
            return Err(Error::Invariant(format!("column {i} not cleared")));
        }
        let mut row_ops = Vec::new();
        eliminate_row(&mut self.m, &self.g, i, &mut row_ops)?;
        if self.opts.check_invariants {
            if !row_is_unit(&self.m, i) || !column_is_unit(&self.m, &self.g, i) {
                return Err(Error::Invariant(format!("row {i} not cleared")));
            }
            if !self.m.is_invertible() {
                return Err(Error::Invariant("matrix became singular".into()));
            }
        }
        self.g.deactivate(i);
        if self.opts.check_invariants && !self.g.is_connected() {
            return Err(Error::Invariant(format!("removing {i} disconnected the graph")));
        }
        self.ops.extend_from_slice(&column_ops);
        self.ops.extend_from_slice(&row_ops);
        Ok(Some(Step { vertex: i, column_ops, row_ops }))
    }

    /// Runs to completion and returns the circuit implementing the input matrix.
    pub fn finish(mut self) -> Result<CnotCircuit> {
        while self.step()?.is_some() {}
        if !self.m.is_identity() {
            return Err(Error::Invariant("elimination did not reach the identity".into()));
        }
        let n = self.m.n();
        let gates = self.ops.into_iter().rev().collect();
        CnotCircuit::from_gates(n, gates)
    }
}

pub fn synthesize_rowcol(m: &GF2Matrix, g: &TopologyGraph) -> Result<CnotCircuit> {
    synthesize_rowcol_with(m, g, RowColOptions::default())
}

pub fn synthesize_rowcol_with(m: &GF2Matrix, g: &TopologyGraph, opts: RowColOptions) -> Result<CnotCircuit> {
    RowColRun::new(m, g, opts)?.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_empty() {
        let g = TopologyGraph::preset("ibmq20").unwrap();
        assert_eq!(synthesize_rowcol(&GF2Matrix::identity(20), &g).unwrap().size(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        let g = TopologyGraph::path(3).unwrap();
        let singular = GF2Matrix::from_rows(&[[1, 1, 0], [1, 1, 0], [0, 0, 1]]);
        assert_eq!(synthesize_rowcol(&singular, &g), Err(Error::SingularMatrix));
        assert!(synthesize_rowcol(&GF2Matrix::identity(4), &g).is_err());
        let split = TopologyGraph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(synthesize_rowcol(&GF2Matrix::identity(3), &split).is_err());
    }

    #[test]
    fn strategy_parse() {
        assert_eq!("bfsleaf".parse::<Strategy>().unwrap(), Strategy::BfsLeaf);
        assert!("greedy".parse::<Strategy>().is_err());
    }
}
