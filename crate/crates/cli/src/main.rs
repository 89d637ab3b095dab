use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cnotopt::bench::{run_depth_experiment, run_size_experiment, sample_rng, write_csv, Algo};
use cnotopt::gridsynth::{synthesize_grid_depth, GridLayout};
use cnotopt::oracle::optimal_size_table;
use cnotopt::rowcol::{synthesize_rowcol_with, RowColOptions, Strategy};
use cnotopt::sbe::{synthesize_sbe, synthesize_sbe_auto, SbeParams};
use cnotopt::{implements_matrix, CnotCircuit, GF2Matrix, TopologyGraph};
use rand::Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cnotopt", version, about = "CNOT circuit synthesis under connectivity constraints")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a circuit for a matrix.
    Synth(SynthArgs),
    /// Check a circuit against a matrix (and optionally a coupling graph).
    Verify(VerifyArgs),
    /// Write a preset graph as an edge list.
    Graph(GraphArgs),
    /// Random-circuit experiments.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Exact minimum gate counts for tiny graphs.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Rowcol,
    Sbe,
    GridDepth,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// Matrix file. Omit to synthesize a random invertible matrix of size --random.
    #[arg(long, required_unless_present = "random")]
    matrix: Option<PathBuf>,
    #[arg(long, conflicts_with = "matrix")]
    random: Option<usize>,
    /// Edge-list file or preset (path(n), grid(a,b), complete(n), ibmq20, t20, athens5, yorktown5).
    #[arg(long)]
    graph: Option<String>,
    #[arg(long, default_value = "mindeg")]
    strategy: String,
    #[arg(long)]
    k: Option<usize>,
    /// Grid layout for grid-depth, m1xm2.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    graph: Option<String>,
    /// Comma-separated wires carrying the data qubits; other wires must start and end at 0.
    #[arg(long, value_delimiter = ',')]
    data_wires: Option<Vec<usize>>,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    preset: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Mean gate count against walk-circuit length.
    Size {
        #[arg(long, value_delimiter = ',', default_value = "ibmq20,t20")]
        graphs: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "20,50,100,200,300,400,500,600,700,800")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "rowcol")]
        algos: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Mean depth against input count on grids.
    Depth {
        /// Grid sides, `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "4..11")]
        sides: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "grid-depth,rowcol")]
        algos: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OracleArgs {
    /// `path`, `complete`, a full preset such as `path(3)`, or an edge-list file.
    #[arg(long)]
    graph: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct Stats {
    schema: u32,
    algo: String,
    n: usize,
    size: usize,
    depth: usize,
    millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ancillas: Option<usize>,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

impl From<cnotopt::Error> for Failure {
    fn from(e: cnotopt::Error) -> Self {
        let code = if matches!(e, cnotopt::Error::Verification { .. }) { 1 } else { 2 };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(spec: &str) -> Result<TopologyGraph, Failure> {
    let p = Path::new(spec);
    if p.is_file() {
        Ok(read(p)?.parse()?)
    } else {
        Ok(TopologyGraph::preset(spec)?)
    }
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::rng().random();
        eprintln!("seed: {s}");
        s
    })
}

fn synth(a: SynthArgs) -> Result<(), Failure> {
    let mut seed = None;
    let m: GF2Matrix = match (&a.matrix, a.random) {
        (Some(p), _) => read(p)?.parse()?,
        (None, Some(n)) => {
            let s = seed_or_entropy(a.seed);
            seed = Some(s);
            GF2Matrix::random_invertible(n, &mut sample_rng(s, n, 0))
        }
        (None, None) => return Err(usage("--matrix or --random is required")),
    };
    let start = Instant::now();
    let (circuit, label, grid, ancillas): (CnotCircuit, String, _, _) = match a.algo {
        AlgoArg::Rowcol => {
            let g = load_graph(a.graph.as_deref().ok_or_else(|| usage("rowcol needs --graph"))?)?;
            let strategy: Strategy = a.strategy.parse()?;
            let opts = RowColOptions { strategy, ..Default::default() };
            (synthesize_rowcol_with(&m, &g, opts)?, "rowcol".into(), None, None)
        }
        AlgoArg::Sbe => {
            let g = load_graph(a.graph.as_deref().ok_or_else(|| usage("sbe needs --graph"))?)?;
            match a.k {
                Some(k) => (synthesize_sbe(&m, &g, SbeParams::for_k(m.n(), k))?, "sbe".into(), None, None),
                None => {
                    let (c, label) = synthesize_sbe_auto(&m, &g)?;
                    (c, label.into(), None, None)
                }
            }
        }
        AlgoArg::GridDepth => {
            let layout = match &a.grid {
                Some(spec) => {
                    let (m1, m2) = spec
                        .split_once('x')
                        .and_then(|(x, y)| Some((x.trim().parse().ok()?, y.trim().parse().ok()?)))
                        .ok_or_else(|| usage(format!("--grid expects m1xm2, got '{spec}'")))?;
                    GridLayout::new(m1, m2, m.n())?
                }
                None => GridLayout::square(m.n())?,
            };
            let c = synthesize_grid_depth(&m, &layout)?;
            (c, "grid-depth".into(), Some(layout.dims()), Some(layout.num_ancillas()))
        }
    };
    let millis = start.elapsed().as_millis();
    let text = circuit.to_text();
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &a.stats {
        let stats = Stats {
            schema: 1,
            algo: label,
            n: m.n(),
            size: circuit.size(),
            depth: circuit.depth(),
            millis,
            seed,
            grid,
            ancillas,
        };
        write(p, &serde_json::to_string_pretty(&stats).expect("stats serialize"))?;
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let c: CnotCircuit = read(&a.circuit)?.parse()?;
    let m: GF2Matrix = read(&a.matrix)?.parse()?;
    let wires = a.data_wires.unwrap_or_else(|| (0..m.n()).collect());
    let equivalent = implements_matrix(&c, &m, &wires)?;
    println!("{}", if equivalent { "EQUIVALENT" } else { "NOT EQUIVALENT" });
    let mut ok = equivalent;
    if let Some(spec) = &a.graph {
        let valid = load_graph(spec)?.validate_circuit(&c)?;
        println!("{}", if valid { "VALID" } else { "INVALID" });
        ok &= valid;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure { code: 1, msg: "verification failed".into() })
    }
}

fn graph(a: GraphArgs) -> Result<(), Failure> {
    let text = TopologyGraph::preset(&a.preset)?.to_edge_list();
    match &a.out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_sides(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || usage(format!("--sides expects a..b or a comma list, got '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
    }
}

fn parse_algos(list: &[String]) -> Result<Vec<Algo>, Failure> {
    list.iter().map(|a| a.parse::<Algo>().map_err(|_| usage(format!("unknown algorithm '{a}'")))).collect()
}

fn emit_csv(records: &[cnotopt::bench::BenchRecord], csv: Option<&Path>) -> Result<(), Failure> {
    match csv {
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(write_csv(records, f)?)
        }
        None => Ok(write_csv(records, std::io::stdout().lock())?),
    }
}

fn bench(cmd: BenchCmd) -> Result<(), Failure> {
    match cmd {
        BenchCmd::Size { graphs, sizes, samples, algos, seed, csv } => {
            let seed = seed_or_entropy(seed);
            let gs = graphs
                .iter()
                .map(|g| Ok((g.clone(), load_graph(g)?)))
                .collect::<Result<Vec<_>, Failure>>()?;
            let records = run_size_experiment(&gs, &sizes, samples, &parse_algos(&algos)?, seed)?;
            emit_csv(&records, csv.as_deref())
        }
        BenchCmd::Depth { sides, samples, algos, seed, csv } => {
            let seed = seed_or_entropy(seed);
            let records = run_depth_experiment(&parse_sides(&sides)?, samples, &parse_algos(&algos)?, seed)?;
            emit_csv(&records, csv.as_deref())
        }
    }
}

fn oracle(a: OracleArgs) -> Result<(), Failure> {
    if !(2..=4).contains(&a.n) {
        return Err(usage(format!("--n must be 2..4, got {}", a.n)));
    }
    let g = match a.graph.as_str() {
        "path" => TopologyGraph::path(a.n)?,
        "complete" => TopologyGraph::complete(a.n)?,
        spec => load_graph(spec)?,
    };
    if g.num_vertices() != a.n {
        return Err(usage(format!("graph has {} vertices, --n is {}", g.num_vertices(), a.n)));
    }
    let table = optimal_size_table(&g)?;
    println!("matrices: {}", table.len());
    for (d, count) in table.histogram().iter().enumerate() {
        println!("distance {d}: {count}");
    }
    if let Some(p) = &a.csv {
        let mut text = String::from("matrix_id,distance\n");
        for (key, d) in table.entries() {
            text.push_str(&format!("{key},{d}\n"));
        }
        write(p, &text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Synth(a) => synth(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Graph(a) => graph(a),
        Cmd::Bench(b) => bench(b),
        Cmd::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
