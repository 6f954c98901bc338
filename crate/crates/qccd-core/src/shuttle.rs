//! Transport batching: expand committed per-qubit trap paths into
//! junction-level shuttle operations, order them through a conflict DAG, and
//! extract maximal parallel rounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ions::IonConfiguration;
use crate::topology::{ChainEnd, JunctionId, MachineGraph, QubitId, TrapId};

/// One trap-to-trap ion transition through a junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuttleOp {
    pub op_id: usize,
    pub qubit: QubitId,
    pub from_trap: TrapId,
    pub to_trap: TrapId,
    pub junction: JunctionId,
}

/// A committed movement: one qubit following a trap path in the machine
/// graph. Paths are recorded in commit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedMove {
    pub qubit: QubitId,
    pub path: Vec<TrapId>,
}

/// Dependency DAG over shuttle operations. An edge orders two operations
/// when they involve the same ion or traverse a shared junction, with the
/// earlier-recorded operation first; independent operations may execute in
/// the same round.
#[derive(Debug, Clone, Default)]
pub struct ShuttleDag {
    pub ops: Vec<ShuttleOp>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl ShuttleDag {
    pub fn predecessors(&self, op: usize) -> &[usize] {
        &self.preds[op]
    }

    pub fn successors(&self, op: usize) -> &[usize] {
        &self.succs[op]
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Longest-path level of every op (sources at level 0).
    pub fn levels(&self) -> Vec<usize> {
        let mut levels = vec![0usize; self.ops.len()];
        for i in 0..self.ops.len() {
            // op_id order is a topological order: edges only point forward.
            levels[i] = self.preds[i].iter().map(|&p| levels[p] + 1).max().unwrap_or(0);
        }
        levels
    }

    pub fn level_count(&self) -> usize {
        self.levels().iter().map(|&l| l + 1).max().unwrap_or(0)
    }
}

/// Decompose committed moves into single-hop shuttle ops and link the
/// conflicts. Recording order equals commit order; each new op links back to
/// the latest previous op sharing its ion and the latest sharing its
/// junction, which transitively enforces the full conflict order.
pub fn decompose_moves(moves: &[PlannedMove], machine: &MachineGraph) -> ShuttleDag {
    let mut dag = ShuttleDag::default();
    let mut last_by_qubit: Vec<Option<usize>> = Vec::new();
    let mut last_by_junction: Vec<Option<usize>> = vec![None; machine.junctions().len()];

    for mv in moves {
        for hop in mv.path.windows(2) {
            let junction = machine
                .junction_between(hop[0], hop[1])
                .expect("planned path must follow junctions");
            let op_id = dag.ops.len();
            dag.ops.push(ShuttleOp {
                op_id,
                qubit: mv.qubit,
                from_trap: hop[0],
                to_trap: hop[1],
                junction,
            });
            dag.preds.push(Vec::new());
            dag.succs.push(Vec::new());

            if last_by_qubit.len() <= mv.qubit.index() {
                last_by_qubit.resize(mv.qubit.index() + 1, None);
            }
            let link = |prev: Option<usize>, dag: &mut ShuttleDag| {
                if let Some(p) = prev {
                    if p != op_id && !dag.succs[p].contains(&op_id) {
                        dag.succs[p].push(op_id);
                        dag.preds[op_id].push(p);
                    }
                }
            };
            link(last_by_qubit[mv.qubit.index()], &mut dag);
            link(last_by_junction[junction.index()], &mut dag);
            last_by_qubit[mv.qubit.index()] = Some(op_id);
            last_by_junction[junction.index()] = Some(op_id);
        }
    }
    dag
}

/// Group ops into rounds by repeated source extraction: round `k` holds the
/// ops whose predecessors all lie in earlier rounds. Ops within a round are
/// pairwise conflict-free.
pub fn extract_rounds(dag: &ShuttleDag) -> Vec<Vec<ShuttleOp>> {
    let levels = dag.levels();
    let count = dag.level_count();
    let mut rounds = vec![Vec::new(); count];
    for (i, op) in dag.ops.iter().enumerate() {
        rounds[levels[i]].push(*op);
    }
    rounds
}

/// An adjacent-transposition SWAP inside one trap, identified by the two
/// ions exchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapOp {
    pub trap: TrapId,
    pub a: QubitId,
    pub b: QubitId,
}

/// One shuttle op with the in-chain SWAPs that precede it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedOp {
    pub op: ShuttleOp,
    pub swaps: Vec<SwapOp>,
}

/// Execute one shuttle round against the configuration: emit the SWAPs that
/// bring each ion to its exit end, detach it, and merge it at the
/// junction-adjacent end of its destination. SWAP chains in distinct traps
/// run concurrently; within one trap they are serialized in op order.
///
/// All removals happen before all insertions, matching the physical
/// simultaneity of a round; capacities are verified on the post-round state.
pub fn expand_swaps(
    round: &[ShuttleOp],
    config: &mut IonConfiguration,
    machine: &MachineGraph,
) -> Result<Vec<ExpandedOp>> {
    let mut expanded = Vec::with_capacity(round.len());
    let mut in_flight: Vec<(ShuttleOp, ChainEnd)> = Vec::new();

    for op in round {
        if config.trap_of(op.qubit) != op.from_trap {
            return Err(Error::Routing(format!(
                "shuttle op {} expects qubit {} in trap {} but it is in {}",
                op.op_id,
                op.qubit.0,
                op.from_trap.0,
                config.trap_of(op.qubit).0
            )));
        }
        let exit = machine.exit_end(op.from_trap, op.junction);
        let mut swaps = Vec::new();
        let mut pos = config.position_of(op.qubit);
        match exit {
            ChainEnd::Head => {
                while pos > 0 {
                    let other = config.chain(op.from_trap)[pos - 1];
                    config.swap_adjacent(op.from_trap, pos - 1);
                    swaps.push(SwapOp { trap: op.from_trap, a: op.qubit, b: other });
                    pos -= 1;
                }
            }
            ChainEnd::Tail => {
                let last = config.occupancy(op.from_trap) - 1;
                while pos < last {
                    let other = config.chain(op.from_trap)[pos + 1];
                    config.swap_adjacent(op.from_trap, pos);
                    swaps.push(SwapOp { trap: op.from_trap, a: op.qubit, b: other });
                    pos += 1;
                }
            }
        }
        let removed = config.remove_end(op.from_trap, exit);
        debug_assert_eq!(removed, op.qubit);
        let entry = machine.exit_end(op.to_trap, op.junction);
        in_flight.push((*op, entry));
        expanded.push(ExpandedOp { op: *op, swaps });
    }

    for (op, entry) in in_flight {
        config.insert_end(op.to_trap, entry, op.qubit);
    }

    for trap in machine.traps() {
        if config.occupancy(trap.id) > trap.capacity {
            return Err(Error::Routing(format!(
                "trap {} over capacity after shuttle round: {} ions exceed capacity {}",
                trap.id.0,
                config.occupancy(trap.id),
                trap.capacity
            )));
        }
    }
    Ok(expanded)
}
