//! Quantum circuit representation: gates, the shared-qubit dependency DAG,
//! and the structure metrics used to characterize benchmarks.

pub mod generators;
pub mod qasm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::QubitId;

/// Named gate of the supported set. Angles are carried for bookkeeping; the
/// router only cares about the operand structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateLabel {
    H,
    X,
    Rz(f64),
    Rx(f64),
    Cx,
    Cp(f64),
    Cz,
    Swap,
}

impl GateLabel {
    pub fn name(&self) -> &'static str {
        match self {
            GateLabel::H => "h",
            GateLabel::X => "x",
            GateLabel::Rz(_) => "rz",
            GateLabel::Rx(_) => "rx",
            GateLabel::Cx => "cx",
            GateLabel::Cp(_) => "cp",
            GateLabel::Cz => "cz",
            GateLabel::Swap => "swap",
        }
    }
}

/// Operand list of a gate; two-qubit gates act on distinct qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operands {
    One(QubitId),
    Two(QubitId, QubitId),
}

impl Operands {
    pub fn qubits(&self) -> Vec<QubitId> {
        match *self {
            Operands::One(q) => vec![q],
            Operands::Two(a, b) => vec![a, b],
        }
    }

    pub fn contains(&self, q: QubitId) -> bool {
        match *self {
            Operands::One(a) => a == q,
            Operands::Two(a, b) => a == q || b == q,
        }
    }
}

/// A single circuit operation in program order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    /// Dense index in program order; doubles as the DAG node id.
    pub id: usize,
    pub label: GateLabel,
    pub operands: Operands,
}

impl Gate {
    pub fn one(id: usize, label: GateLabel, q: QubitId) -> Self {
        Gate { id, label, operands: Operands::One(q) }
    }

    pub fn two(id: usize, label: GateLabel, a: QubitId, b: QubitId) -> Self {
        debug_assert_ne!(a, b, "two-qubit gate needs distinct operands");
        Gate { id, label, operands: Operands::Two(a, b) }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self.operands, Operands::Two(_, _))
    }

    /// The other operand of a two-qubit gate.
    pub fn partner(&self, q: QubitId) -> Option<QubitId> {
        match self.operands {
            Operands::Two(a, b) if a == q => Some(b),
            Operands::Two(a, b) if b == q => Some(a),
            _ => None,
        }
    }
}

/// An ordered gate list over a dense qubit range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Self {
        Circuit { num_qubits, gates }
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }
}

/// Gate dependency DAG. An edge runs between two gates iff they share an
/// operand and are adjacent in program order on that operand, so each qubit's
/// gates form a chain. Sources are the immediately executable operations.
#[derive(Debug, Clone)]
pub struct GateDag {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    /// ASAP layer per gate: 1 + max over predecessors, 0 for sources.
    layers: Vec<usize>,
}

impl GateDag {
    pub fn predecessors(&self, g: usize) -> &[usize] {
        &self.preds[g]
    }

    pub fn successors(&self, g: usize) -> &[usize] {
        &self.succs[g]
    }

    pub fn layer(&self, g: usize) -> usize {
        self.layers[g]
    }

    /// Number of ASAP layers counting every gate.
    pub fn layer_count(&self) -> usize {
        self.layers.iter().map(|&l| l + 1).max().unwrap_or(0)
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.gates.len()).filter(|&g| self.preds[g].is_empty()).collect()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// Build the dependency DAG from a program-ordered gate list.
pub fn build_gate_dag(circuit: &Circuit) -> GateDag {
    let n = circuit.gates.len();
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    let mut last_on_qubit: Vec<Option<usize>> = vec![None; circuit.num_qubits];

    for (i, gate) in circuit.gates.iter().enumerate() {
        debug_assert_eq!(gate.id, i, "gate ids must be dense program order");
        for q in gate.operands.qubits() {
            if let Some(prev) = last_on_qubit[q.index()] {
                if !succs[prev].contains(&i) {
                    succs[prev].push(i);
                    preds[i].push(prev);
                }
            }
            last_on_qubit[q.index()] = Some(i);
        }
    }

    let mut layers = vec![0usize; n];
    for i in 0..n {
        // Program order is a topological order.
        layers[i] = preds[i].iter().map(|&p| layers[p] + 1).max().unwrap_or(0);
    }

    GateDag {
        num_qubits: circuit.num_qubits,
        gates: circuit.gates.clone(),
        preds,
        succs,
        layers,
    }
}

/// Structure metrics of a circuit (the columns of the benchmark table).
///
/// Depth counts two-qubit time slices: it is the longest path weighting
/// two-qubit gates 1 and single-qubit gates 0, matching how the routing
/// rounds batch work (single-qubit gates ride along with a neighboring
/// two-qubit slice and never open one of their own).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub depth: usize,
    pub two_q_count: usize,
    pub avg_2q_per_ts: f64,
    pub avg_ion_mov_per_ts: f64,
    /// Movements per qubit: interactions whose partner differs from the
    /// qubit's previous partner. A qubit's first interaction establishes its
    /// partner and is not counted as a movement.
    pub movement_per_qubit: Vec<usize>,
}

/// Compute depth, gate counts and the worst-case ion-movement statistic.
pub fn compute_metrics(dag: &GateDag) -> CircuitMetrics {
    let n = dag.gates.len();

    // Two-qubit-weighted longest path.
    let mut finish = vec![0usize; n];
    let mut depth = 0usize;
    for i in 0..n {
        let start = dag.preds[i].iter().map(|&p| finish[p]).max().unwrap_or(0);
        finish[i] = start + usize::from(dag.gates[i].is_two_qubit());
        depth = depth.max(finish[i]);
    }

    let two_q_count = dag.gates.iter().filter(|g| g.is_two_qubit()).count();

    let mut movement_per_qubit = vec![0usize; dag.num_qubits];
    let mut last_partner: Vec<Option<QubitId>> = vec![None; dag.num_qubits];
    for gate in &dag.gates {
        if let Operands::Two(a, b) = gate.operands {
            for (q, p) in [(a, b), (b, a)] {
                if let Some(prev) = last_partner[q.index()] {
                    if prev != p {
                        movement_per_qubit[q.index()] += 1;
                    }
                }
                last_partner[q.index()] = Some(p);
            }
        }
    }

    let total_moves: usize = movement_per_qubit.iter().sum();
    let (avg_2q_per_ts, avg_ion_mov_per_ts) = if depth == 0 {
        (0.0, 0.0)
    } else {
        (two_q_count as f64 / depth as f64, total_moves as f64 / depth as f64)
    };

    CircuitMetrics { depth, two_q_count, avg_2q_per_ts, avg_ion_mov_per_ts, movement_per_qubit }
}

/// Validate that every two-qubit gate has distinct operands and every operand
/// index is in range; used by the parser and generator entry points.
pub(crate) fn check_gates(num_qubits: usize, gates: &[Gate]) -> Result<()> {
    for g in gates {
        match g.operands {
            Operands::One(q) => {
                if q.index() >= num_qubits {
                    return Err(Error::InvalidArgument(format!(
                        "gate {} references qubit {} outside register of size {num_qubits}",
                        g.id, q.0
                    )));
                }
            }
            Operands::Two(a, b) => {
                if a == b {
                    return Err(Error::InvalidArgument(format!(
                        "gate {} has identical operands",
                        g.id
                    )));
                }
                if a.index() >= num_qubits || b.index() >= num_qubits {
                    return Err(Error::InvalidArgument(format!(
                        "gate {} references a qubit outside register of size {num_qubits}",
                        g.id
                    )));
                }
            }
        }
    }
    Ok(())
}
