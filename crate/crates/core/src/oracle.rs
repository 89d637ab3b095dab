//! Exact minimum CNOT counts for tiny `n` by breadth-first search over GL(n, 2).

use std::collections::HashMap;

use rand::Rng;

use crate::circuit::CnotCircuit;
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::topology::TopologyGraph;

/// Distance from the identity for every reachable matrix, keyed by
/// [`GF2Matrix::encode`].
#[derive(Clone, Debug)]
pub struct OptimalTable {
    n: usize,
    dist: HashMap<u64, u8>,
}

impl OptimalTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, m: &GF2Matrix) -> Option<usize> {
        if m.n() != self.n {
            return None;
        }
        self.dist.get(&m.encode()).map(|&d| d as usize)
    }

    pub fn max_distance(&self) -> usize {
        self.dist.values().copied().max().unwrap_or(0) as usize
    }

    /// `(key, distance)` sorted by key.
    pub fn entries(&self) -> Vec<(u64, usize)> {
        let mut v: Vec<(u64, usize)> = self.dist.iter().map(|(&k, &d)| (k, d as usize)).collect();
        v.sort_unstable();
        v
    }

    /// Number of matrices at each distance.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.max_distance() + 1];
        for &d in self.dist.values() {
            h[d as usize] += 1;
        }
        h
    }
}

/// BFS from the identity using every constrained row addition (both
/// directions of every edge).
pub fn optimal_size_table(g: &TopologyGraph) -> Result<OptimalTable> {
    let n = g.num_vertices();
    if n > 4 {
        return Err(Error::OracleTooLarge(n));
    }
    let moves: Vec<(usize, usize)> = g.edges().into_iter().flat_map(|(u, v)| [(u, v), (v, u)]).collect();
    // Row addition on the packed key: row t ^= row c.
    let row_mask = (1u64 << n) - 1;
    let apply = |key: u64, c: usize, t: usize| key ^ (((key >> (c * n)) & row_mask) << (t * n));
    let start = GF2Matrix::identity(n).encode();
    let mut dist = HashMap::new();
    dist.insert(start, 0u8);
    let mut frontier = vec![start];
    let mut d = 0u8;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &key in &frontier {
            for &(c, t) in &moves {
                let k2 = apply(key, c, t);
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(k2) {
                    e.insert(d);
                    next.push(k2);
                }
            }
        }
        frontier = next;
    }
    Ok(OptimalTable { n, dist })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapStats {
    pub samples: usize,
    pub mean: f64,
    pub max: usize,
    /// `histogram[g]` = number of samples with gap `g`.
    pub histogram: Vec<usize>,
}

impl GapStats {
    pub fn from_gaps(gaps: &[usize]) -> GapStats {
        let max = gaps.iter().copied().max().unwrap_or(0);
        let mut histogram = vec![0; max + 1];
        for &x in gaps {
            histogram[x] += 1;
        }
        let mean = if gaps.is_empty() { 0.0 } else { gaps.iter().sum::<usize>() as f64 / gaps.len() as f64 };
        GapStats { samples: gaps.len(), mean, max, histogram }
    }
}

/// Gap of `synth` against the table for one matrix. Errors if the synthesizer
/// ever beats the optimum (which would mean a broken table or circuit).
pub fn gap_for(
    table: &OptimalTable,
    m: &GF2Matrix,
    synth: &dyn Fn(&GF2Matrix) -> Result<CnotCircuit>,
) -> Result<usize> {
    let best = table.get(m).ok_or_else(|| Error::Invariant("matrix missing from table".into()))?;
    let size = synth(m)?.size();
    size.checked_sub(best)
        .ok_or_else(|| Error::Invariant(format!("synthesized {size} gates below optimum {best}")))
}

/// Gap statistics over `samples` random invertible matrices.
pub fn optimality_gap<R: Rng + ?Sized>(
    g: &TopologyGraph,
    synth: &dyn Fn(&GF2Matrix) -> Result<CnotCircuit>,
    samples: usize,
    rng: &mut R,
) -> Result<GapStats> {
    let table = optimal_size_table(g)?;
    let gaps = (0..samples)
        .map(|_| gap_for(&table, &GF2Matrix::random_invertible(g.num_vertices(), rng), synth))
        .collect::<Result<Vec<_>>>()?;
    Ok(GapStats::from_gaps(&gaps))
}

/// Gap statistics over every matrix in the table.
pub fn exhaustive_gap(g: &TopologyGraph, synth: &dyn Fn(&GF2Matrix) -> Result<CnotCircuit>) -> Result<GapStats> {
    let table = optimal_size_table(g)?;
    let gaps = table
        .entries()
        .into_iter()
        .map(|(key, _)| gap_for(&table, &GF2Matrix::decode(table.n, key), synth))
        .collect::<Result<Vec<_>>>()?;
    Ok(GapStats::from_gaps(&gaps))
}
