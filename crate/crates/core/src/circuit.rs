//! CNOT circuits: simulation, matrix extraction, ASAP layering, equivalence.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{xor_into, GF2Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CnotGate {
    pub control: usize,
    pub target: usize,
}

impl CnotGate {
    pub fn new(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control and target must differ");
        CnotGate { control, target }
    }

    /// Same qubits, roles swapped.
    pub fn flipped(self) -> Self {
        CnotGate { control: self.target, target: self.control }
    }
}

/// Anything that can receive gates in execution order.
pub trait GateSink {
    fn push_gate(&mut self, gate: CnotGate);

    fn cnot(&mut self, control: usize, target: usize) {
        self.push_gate(CnotGate::new(control, target));
    }
}

impl GateSink for Vec<CnotGate> {
    fn push_gate(&mut self, gate: CnotGate) {
        self.push(gate);
    }
}

/// Discards everything; used when only the matrix side effect matters.
#[derive(Default, Debug)]
pub struct NullSink;

impl GateSink for NullSink {
    fn push_gate(&mut self, _gate: CnotGate) {}
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnotCircuit {
    num_qubits: usize,
    gates: Vec<CnotGate>,
}

impl CnotCircuit {
    pub fn new(num_qubits: usize) -> Self {
        CnotCircuit { num_qubits, gates: Vec::new() }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<CnotGate>) -> Result<Self> {
        for g in &gates {
            for q in [g.control, g.target] {
                if q >= num_qubits {
                    return Err(Error::IndexOutOfRange { index: q, n: num_qubits });
                }
            }
        }
        Ok(CnotCircuit { num_qubits, gates })
    }

    pub fn from_pairs(num_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::from_gates(num_qubits, pairs.iter().map(|&(c, t)| CnotGate::new(c, t)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[CnotGate] {
        &self.gates
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn push(&mut self, control: usize, target: usize) -> Result<()> {
        for q in [control, target] {
            if q >= self.num_qubits {
                return Err(Error::IndexOutOfRange { index: q, n: self.num_qubits });
            }
        }
        if control == target {
            return Err(Error::SameRow(control));
        }
        self.gates.push(CnotGate { control, target });
        Ok(())
    }

    pub fn extend(&mut self, other: &CnotCircuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Gates in reverse order; the inverse circuit.
    pub fn reversed(&self) -> CnotCircuit {
        CnotCircuit { num_qubits: self.num_qubits, gates: self.gates.iter().rev().copied().collect() }
    }

    pub fn simulate(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: x.len() });
        }
        let mut y = x.to_vec();
        for g in &self.gates {
            y[g.target] ^= y[g.control];
        }
        Ok(y)
    }

    /// Column `j` is the image of `e_j`.
    pub fn to_matrix(&self) -> GF2Matrix {
        let mut m = GF2Matrix::identity(self.num_qubits.max(1));
        for g in &self.gates {
            m.row_add_unchecked(g.control, g.target);
        }
        m
    }

    pub fn layering(&self) -> DepthLayering {
        let mut last = vec![0usize; self.num_qubits];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (k, g) in self.gates.iter().enumerate() {
            let l = last[g.control].max(last[g.target]) + 1;
            last[g.control] = l;
            last[g.target] = l;
            if layers.len() < l {
                layers.push(Vec::new());
            }
            layers[l - 1].push(k);
        }
        DepthLayering { layers }
    }

    pub fn depth(&self) -> usize {
        depth_of(self.num_qubits, &self.gates)
    }

    /// Symbolic simulation: wire `w` ends holding the XOR of the input wires
    /// flagged in the returned bit-vector `forms[w]`.
    pub fn linear_forms(&self, inputs: &[usize]) -> Result<Vec<Vec<u64>>> {
        let words = inputs.len().div_ceil(64).max(1);
        let mut forms = vec![vec![0u64; words]; self.num_qubits];
        for (j, &w) in inputs.iter().enumerate() {
            if w >= self.num_qubits {
                return Err(Error::InvalidWireMap(format!("wire {w} out of range")));
            }
            forms[w][j / 64] |= 1 << (j % 64);
        }
        for g in &self.gates {
            let src = std::mem::take(&mut forms[g.control]);
            xor_into(&mut forms[g.target], &src);
            forms[g.control] = src;
        }
        Ok(forms)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

pub fn depth_of(num_qubits: usize, gates: &[CnotGate]) -> usize {
    let mut last = vec![0usize; num_qubits];
    let mut depth = 0;
    for g in gates {
        let l = last[g.control].max(last[g.target]) + 1;
        last[g.control] = l;
        last[g.target] = l;
        depth = depth.max(l);
    }
    depth
}

impl GateSink for CnotCircuit {
    fn push_gate(&mut self, gate: CnotGate) {
        debug_assert!(gate.control < self.num_qubits && gate.target < self.num_qubits);
        self.gates.push(gate);
    }
}

/// ASAP layering: gate indices grouped by the layer they land in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthLayering {
    pub layers: Vec<Vec<usize>>,
}

impl DepthLayering {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Checks both canonical-form properties against `c`.
    pub fn is_canonical_for(&self, c: &CnotCircuit) -> bool {
        let touches = |k: usize, q: usize| c.gates[k].control == q || c.gates[k].target == q;
        for (li, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                return false;
            }
            let mut used = std::collections::HashSet::new();
            for &k in layer {
                if !used.insert(c.gates[k].control) || !used.insert(c.gates[k].target) {
                    return false;
                }
            }
            if li > 0 {
                let prev = &self.layers[li - 1];
                for &k in layer {
                    let g = c.gates[k];
                    if !prev.iter().any(|&p| touches(p, g.control) || touches(p, g.target)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Which wires of a wide circuit carry the logical data.
pub fn identity_wires(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// True iff `candidate` acts like `reference` on data wires `wires` for every
/// basis input, with every other wire starting and ending at 0.
pub fn check_equivalent(reference: &CnotCircuit, candidate: &CnotCircuit, wires: &[usize]) -> Result<bool> {
    implements_matrix(candidate, &reference.to_matrix(), wires)
}

/// Like [`check_equivalent`] with the reference given as a matrix.
pub fn implements_matrix(candidate: &CnotCircuit, m: &GF2Matrix, wires: &[usize]) -> Result<bool> {
    let n = m.n();
    if wires.len() != n {
        return Err(Error::InvalidWireMap(format!("{} wires for {} data qubits", wires.len(), n)));
    }
    let mut seen = vec![false; candidate.num_qubits()];
    for &w in wires {
        if w >= candidate.num_qubits() {
            return Err(Error::InvalidWireMap(format!("wire {w} out of range")));
        }
        if std::mem::replace(&mut seen[w], true) {
            return Err(Error::InvalidWireMap(format!("wire {w} listed twice")));
        }
    }
    let forms = candidate.linear_forms(wires)?;
    for (j, &w) in wires.iter().enumerate() {
        if forms[w][..] != m.row(j)[..forms[w].len()] {
            return Ok(false);
        }
    }
    Ok(forms
        .iter()
        .enumerate()
        .all(|(w, f)| seen[w] || f.iter().all(|&x| x == 0)))
}

/// SWAP as three CNOTs.
pub fn expand_swap(a: usize, b: usize) -> Result<[CnotGate; 3]> {
    if a == b {
        return Err(Error::SameRow(a));
    }
    Ok([CnotGate::new(a, b), CnotGate::new(b, a), CnotGate::new(a, b)])
}

impl fmt::Display for CnotCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.num_qubits)?;
        for g in &self.gates {
            writeln!(f, "CNOT {} {}", g.control, g.target)?;
        }
        Ok(())
    }
}

impl FromStr for CnotCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let mut it = head.split_whitespace();
        let q = match (it.next(), it.next(), it.next()) {
            (Some("n"), Some(q), None) => q
                .parse::<usize>()
                .map_err(|_| Error::Parse { line: ln, msg: format!("bad qubit count '{q}'") })?,
            _ => return Err(Error::Parse { line: ln, msg: "expected 'n <num_qubits>'".into() }),
        };
        let mut c = CnotCircuit::new(q);
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse { line: ln, msg: format!("expected 'CNOT c t', got '{line}'") };
            if parts.len() != 3 || parts[0] != "CNOT" {
                return Err(bad());
            }
            let ctl: usize = parts[1].parse().map_err(|_| bad())?;
            let tgt: usize = parts[2].parse().map_err(|_| bad())?;
            c.push(ctl, tgt).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
        }
        Ok(c)
    }
}
