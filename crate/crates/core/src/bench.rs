//! Random-circuit experiments: gate counts against input size on a fixed
//! graph, and depth against input count on grids.
//!
//! Every sample gets its own RNG stream derived from `(seed, input size,
//! sample index)`, so runs are reproducible regardless of thread scheduling.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{implements_matrix, CnotCircuit, CnotGate};
use crate::error::{Error, Result};
use crate::gf2::GF2Matrix;
use crate::gridsynth::{synthesize_grid_depth, GridLayout};
use crate::rowcol::synthesize_rowcol;
use crate::sbe::synthesize_sbe_auto;
use crate::topology::TopologyGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algo {
    RowCol,
    Sbe,
    GridDepth,
}

impl Algo {
    pub fn label(self) -> &'static str {
        match self {
            Algo::RowCol => "rowcol",
            Algo::Sbe => "sbe",
            Algo::GridDepth => "grid-depth",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rowcol" => Ok(Algo::RowCol),
            "sbe" => Ok(Algo::Sbe),
            "grid-depth" | "grid" | "depanc" => Ok(Algo::GridDepth),
            other => Err(Error::InvalidGraph(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// One line of experiment output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub graph: String,
    pub algo: String,
    pub input_size: usize,
    pub samples: usize,
    pub mean_size: f64,
    pub mean_depth: f64,
    pub seed: u64,
    /// Total synthesis wall time; not part of the CSV so output stays
    /// byte-identical across runs.
    #[serde(skip)]
    pub millis: u128,
}

/// RNG for one sample.
pub fn sample_rng(seed: u64, input_size: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((input_size as u64) << 32) | index as u64);
    rng
}

/// `size` gates, each on a uniformly random edge in a uniformly random
/// direction.
pub fn sample_walk_circuit<R: Rng + ?Sized>(g: &TopologyGraph, size: usize, rng: &mut R) -> CnotCircuit {
    let edges = g.edges();
    let mut gates = Vec::with_capacity(size);
    if !edges.is_empty() {
        for _ in 0..size {
            let (u, v) = edges[rng.random_range(0..edges.len())];
            gates.push(if rng.random::<bool>() { CnotGate::new(u, v) } else { CnotGate::new(v, u) });
        }
    }
    CnotCircuit::from_gates(g.num_vertices(), gates).expect("edges are in range")
}

struct Outcome {
    size: usize,
    depth: usize,
    micros: u128,
}

fn check(c: &CnotCircuit, m: &GF2Matrix, g: &TopologyGraph, wires: &[usize], seed: u64, what: &str) -> Result<()> {
    let fail = |msg: String| Error::Verification { seed, msg: format!("{what}: {msg}") };
    if !g.validate_circuit(c).map_err(|e| fail(e.to_string()))? {
        return Err(fail("gate on a non-edge".into()));
    }
    if !implements_matrix(c, m, wires).map_err(|e| fail(e.to_string()))? {
        return Err(fail("circuit does not implement the matrix".into()));
    }
    Ok(())
}

fn timed(f: impl FnOnce() -> Result<CnotCircuit>) -> Result<(CnotCircuit, u128)> {
    let t = Instant::now();
    let c = f()?;
    Ok((c, t.elapsed().as_micros()))
}

fn summarize(graph: &str, algo: Algo, input_size: usize, seed: u64, outs: &[Outcome]) -> BenchRecord {
    let k = outs.len().max(1) as f64;
    BenchRecord {
        graph: graph.to_string(),
        algo: algo.label().to_string(),
        input_size,
        samples: outs.len(),
        mean_size: outs.iter().map(|o| o.size as f64).sum::<f64>() / k,
        mean_depth: outs.iter().map(|o| o.depth as f64).sum::<f64>() / k,
        seed,
        millis: outs.iter().map(|o| o.micros).sum::<u128>() / 1000,
    }
}

/// For each graph and input size: sample walk circuits, synthesize their
/// matrices with every size algorithm, verify, and average.
pub fn run_size_experiment(
    graphs: &[(String, TopologyGraph)],
    sizes: &[usize],
    samples: usize,
    algos: &[Algo],
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    if samples == 0 {
        return Err(Error::Invariant("samples must be at least 1".into()));
    }
    if algos.contains(&Algo::GridDepth) {
        return Err(Error::Invariant("grid-depth belongs to the depth experiment".into()));
    }
    let mut records = Vec::new();
    for (name, g) in graphs {
        let wires: Vec<usize> = (0..g.num_vertices()).collect();
        for &size in sizes {
            let per_sample: Vec<Vec<Outcome>> = (0..samples)
                .into_par_iter()
                .map(|j| {
                    let mut rng = sample_rng(seed, size, j);
                    let m = sample_walk_circuit(g, size, &mut rng).to_matrix();
                    algos
                        .iter()
                        .map(|&a| {
                            let (c, micros) = timed(|| match a {
                                Algo::RowCol => synthesize_rowcol(&m, g),
                                _ => synthesize_sbe_auto(&m, g).map(|(c, _)| c),
                            })?;
                            check(&c, &m, g, &wires, seed, &format!("{name} size {size} sample {j} {}", a.label()))?;
                            Ok(Outcome { size: c.size(), depth: c.depth(), micros })
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            for (ai, &a) in algos.iter().enumerate() {
                let outs: Vec<Outcome> = per_sample
                    .iter()
                    .map(|v| Outcome { size: v[ai].size, depth: v[ai].depth, micros: v[ai].micros })
                    .collect();
                records.push(summarize(name, a, size, seed, &outs));
            }
        }
    }
    Ok(records)
}

/// For each side `w`: `n = w²` inputs and uniformly random invertible
/// matrices. Grid-depth runs on the `n × n` layout, ROWCOL on the `w × w`
/// grid graph.
pub fn run_depth_experiment(sides: &[usize], samples: usize, algos: &[Algo], seed: u64) -> Result<Vec<BenchRecord>> {
    if samples == 0 {
        return Err(Error::Invariant("samples must be at least 1".into()));
    }
    let mut records = Vec::new();
    for &w in sides {
        let n = w * w;
        let layout = GridLayout::square(n)?;
        let layout_graph = layout.graph()?;
        let data = layout.data_wires();
        let small = TopologyGraph::grid(&[w, w])?;
        let plain: Vec<usize> = (0..n).collect();
        let per_sample: Vec<Vec<Outcome>> = (0..samples)
            .into_par_iter()
            .map(|j| {
                let mut rng = sample_rng(seed, n, j);
                let m = GF2Matrix::random_invertible(n, &mut rng);
                algos
                    .iter()
                    .map(|&a| {
                        let what = format!("inputs {n} sample {j} {}", a.label());
                        let (c, micros) = match a {
                            Algo::GridDepth => {
                                let r = timed(|| synthesize_grid_depth(&m, &layout))?;
                                check(&r.0, &m, &layout_graph, &data, seed, &what)?;
                                r
                            }
                            Algo::RowCol => {
                                let r = timed(|| synthesize_rowcol(&m, &small))?;
                                check(&r.0, &m, &small, &plain, seed, &what)?;
                                r
                            }
                            Algo::Sbe => {
                                let r = timed(|| synthesize_sbe_auto(&m, &small).map(|(c, _)| c))?;
                                check(&r.0, &m, &small, &plain, seed, &what)?;
                                r
                            }
                        };
                        Ok(Outcome { size: c.size(), depth: c.depth(), micros })
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (ai, &a) in algos.iter().enumerate() {
            let outs: Vec<Outcome> = per_sample
                .iter()
                .map(|v| Outcome { size: v[ai].size, depth: v[ai].depth, micros: v[ai].micros })
                .collect();
            let graph = match a {
                Algo::GridDepth => format!("grid({n},{n})"),
                _ => format!("grid({w},{w})"),
            };
            records.push(summarize(&graph, a, n, seed, &outs));
        }
    }
    Ok(records)
}

/// CSV with columns graph,algo,input_size,samples,mean_size,mean_depth,seed.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Invariant(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Invariant(format!("csv: {e}")))?;
    Ok(())
}

pub fn to_csv_string(records: &[BenchRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Invariant(e.to_string()))
}
