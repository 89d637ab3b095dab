//! Topology-constrained CNOT circuit synthesis.
//!
//! A CNOT circuit on `n` qubits acts on basis states as an invertible matrix
//! over GF(2). This crate turns such matrices back into circuits whose gates
//! respect a coupling graph:
//!
//! * [`rowcol`] peels one non-cut vertex at a time, clearing its column and
//!   row with Steiner-tree guided row additions (at most `2n²` gates).
//! * [`sbe`] eliminates blocks of columns at once, enumerating row patterns in
//!   Gray-code order; fewer gates on dense graphs.
//! * [`gridsynth`] trades ancillas for depth on 2-D grids.
//!
//! [`oracle`] gives exact minimum gate counts for `n ≤ 4` and [`bench`]
//! drives the random-circuit experiments.

pub mod bench;
pub mod circuit;
pub mod error;
pub mod gf2;
pub mod gridsynth;
pub mod oracle;
pub mod rowcol;
pub mod sbe;
pub mod steiner_ops;
pub mod topology;

pub use circuit::{check_equivalent, implements_matrix, CnotCircuit, CnotGate, GateSink};
pub use error::{Error, Result};
pub use gf2::{GF2Matrix, RowIndexSet};
pub use topology::{RootedTree, SteinerTree, TopologyGraph};
