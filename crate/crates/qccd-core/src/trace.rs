//! The emitted schedule: alternating shuttle and gate rounds, self-contained
//! with the machine and initial ion placement so it can be replayed and
//! validated without the producing context.

use serde::{Deserialize, Serialize};

use crate::circuit::GateDag;
use crate::error::{Error, Result};
use crate::ions::IonConfiguration;
use crate::topology::{JunctionId, MachineGraph, QubitId, TrapId};

pub const TRACE_VERSION: u32 = 1;

/// One scheduled operation inside a round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TraceOp {
    /// Adjacent transposition inside a trap chain.
    Swap { trap: TrapId, a: QubitId, b: QubitId },
    /// Single-ion transition through a junction.
    Shuttle { qubit: QubitId, from: TrapId, to: TrapId, junction: JunctionId },
    /// Single-qubit gate executing in place.
    Gate1 { gate: usize, label: String, qubit: QubitId, trap: TrapId },
    /// Two-qubit gate executing with both operands co-located.
    Gate2 { gate: usize, label: String, a: QubitId, b: QubitId, trap: TrapId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Shuttle,
    Gate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub kind: RoundKind,
    pub ops: Vec<TraceOp>,
    /// Modeled duration, filled in when a trace is annotated against a
    /// physics parameter set; absent on raw router output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_us: Option<f64>,
}

/// Full schedule produced by the router.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub version: u32,
    pub seed: u64,
    pub num_qubits: usize,
    pub num_gates: usize,
    pub machine: MachineGraph,
    pub initial_chains: Vec<Vec<QubitId>>,
    pub rounds: Vec<Round>,
}

impl ExecutionTrace {
    pub fn shuttle_count(&self) -> usize {
        self.rounds
            .iter()
            .flat_map(|r| &r.ops)
            .filter(|op| matches!(op, TraceOp::Shuttle { .. }))
            .count()
    }

    pub fn swap_count(&self) -> usize {
        self.rounds
            .iter()
            .flat_map(|r| &r.ops)
            .filter(|op| matches!(op, TraceOp::Swap { .. }))
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Validation { round: 0, msg: format!("malformed trace: {e}") })
    }
}

fn violation(round: usize, msg: impl Into<String>) -> Error {
    Error::Validation { round, msg: msg.into() }
}

fn checked_initial_config(trace: &ExecutionTrace) -> Result<IonConfiguration> {
    if trace.initial_chains.len() != trace.machine.num_traps() {
        return Err(violation(0, "initial chain list does not match trap count"));
    }
    let mut seen = vec![false; trace.num_qubits];
    for (t, chain) in trace.initial_chains.iter().enumerate() {
        if chain.len() > trace.machine.capacity(TrapId(t as u32)) {
            return Err(violation(0, format!("initial chain of trap {t} exceeds capacity")));
        }
        for &q in chain {
            if q.index() >= trace.num_qubits || seen[q.index()] {
                return Err(violation(0, format!("qubit {} misplaced in initial chains", q.0)));
            }
            seen[q.index()] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(violation(0, "initial chains do not place every qubit"));
    }
    Ok(IonConfiguration::from_chains(trace.num_qubits, trace.initial_chains.clone()))
}

/// Replay a trace from its initial placement, checking every structural
/// invariant: trap capacities after each round, SWAP adjacency, shuttle
/// exit-end discipline, junction and ion exclusivity per shuttle round, gate
/// co-location, one two-qubit gate per trap per round, and per-qubit program
/// order. Returns the final configuration.
///
/// With `expect_complete`, additionally requires every gate id below
/// `num_gates` to execute exactly once.
pub fn replay(trace: &ExecutionTrace, expect_complete: bool) -> Result<IonConfiguration> {
    let machine = &trace.machine;
    let mut config = checked_initial_config(trace)?;
    let mut executed = vec![false; trace.num_gates];
    let mut last_gate_on_qubit: Vec<Option<usize>> = vec![None; trace.num_qubits];

    for (round_idx, round) in trace.rounds.iter().enumerate() {
        let r = round_idx + 1;
        match round.kind {
            RoundKind::Shuttle => {
                let mut junctions_used = std::collections::HashSet::new();
                let mut qubits_moved = std::collections::HashSet::new();
                // Shuttles within a round are simultaneous: departures apply
                // in op order, merges after all departures.
                let mut arrivals: Vec<(QubitId, TrapId, JunctionId)> = Vec::new();
                for op in &round.ops {
                    match *op {
                        TraceOp::Swap { trap, a, b } => {
                            let chain = config.chain(trap);
                            let pa = chain.iter().position(|&x| x == a);
                            let pb = chain.iter().position(|&x| x == b);
                            match (pa, pb) {
                                (Some(pa), Some(pb)) if pa.abs_diff(pb) == 1 => {
                                    config.swap_adjacent(trap, pa.min(pb));
                                }
                                _ => {
                                    return Err(violation(
                                        r,
                                        format!(
                                            "swap of non-adjacent ions {} and {} in trap {}",
                                            a.0, b.0, trap.0
                                        ),
                                    ))
                                }
                            }
                        }
                        TraceOp::Shuttle { qubit, from, to, junction } => {
                            if !junctions_used.insert(junction) {
                                return Err(violation(
                                    r,
                                    format!("junction {} used twice in one round", junction.0),
                                ));
                            }
                            if !qubits_moved.insert(qubit) {
                                return Err(violation(
                                    r,
                                    format!("ion {} shuttled twice in one round", qubit.0),
                                ));
                            }
                            if !machine.junction(junction).connects(from, to) {
                                return Err(violation(
                                    r,
                                    format!("junction {} does not link traps {} and {}", junction.0, from.0, to.0),
                                ));
                            }
                            if config.trap_of(qubit) != from {
                                return Err(violation(
                                    r,
                                    format!("ion {} not in trap {} for shuttle", qubit.0, from.0),
                                ));
                            }
                            let exit = machine.exit_end(from, junction);
                            if config.end_ion(from, exit) != Some(qubit) {
                                return Err(violation(
                                    r,
                                    format!("ion {} not at the junction end of trap {}", qubit.0, from.0),
                                ));
                            }
                            config.remove_end(from, exit);
                            arrivals.push((qubit, to, junction));
                        }
                        _ => {
                            return Err(violation(r, "gate op inside a shuttle round"));
                        }
                    }
                }
                for (qubit, to, junction) in arrivals {
                    let entry = machine.exit_end(to, junction);
                    config.insert_end(to, entry, qubit);
                }
            }
            RoundKind::Gate => {
                let mut traps_with_2q = std::collections::HashSet::new();
                for op in &round.ops {
                    match *op {
                        TraceOp::Gate1 { gate, qubit, trap, .. } => {
                            if config.trap_of(qubit) != trap {
                                return Err(violation(
                                    r,
                                    format!("gate {gate} records trap {} but ion {} is in {}", trap.0, qubit.0, config.trap_of(qubit).0),
                                ));
                            }
                            check_gate_order(r, gate, &[qubit], &mut executed, &mut last_gate_on_qubit)?;
                        }
                        TraceOp::Gate2 { gate, a, b, trap, .. } => {
                            if config.trap_of(a) != trap || config.trap_of(b) != trap {
                                return Err(violation(
                                    r,
                                    format!(
                                        "gate {gate} fires in trap {} but ions {} and {} are in traps {} and {}",
                                        trap.0, a.0, b.0, config.trap_of(a).0, config.trap_of(b).0
                                    ),
                                ));
                            }
                            if !traps_with_2q.insert(trap) {
                                return Err(violation(
                                    r,
                                    format!("two two-qubit gates share trap {} in one round", trap.0),
                                ));
                            }
                            check_gate_order(r, gate, &[a, b], &mut executed, &mut last_gate_on_qubit)?;
                        }
                        _ => {
                            return Err(violation(r, "transport op inside a gate round"));
                        }
                    }
                }
            }
        }

        for trap in machine.traps() {
            if config.occupancy(trap.id) > trap.capacity {
                return Err(violation(
                    r,
                    format!("trap {} holds {} ions, capacity {}", trap.id.0, config.occupancy(trap.id), trap.capacity),
                ));
            }
        }
    }

    if expect_complete {
        if let Some(missing) = executed.iter().position(|&e| !e) {
            return Err(violation(trace.rounds.len(), format!("gate {missing} never executed")));
        }
    }
    Ok(config)
}

fn check_gate_order(
    round: usize,
    gate: usize,
    qubits: &[QubitId],
    executed: &mut [bool],
    last_gate_on_qubit: &mut [Option<usize>],
) -> Result<()> {
    if gate >= executed.len() || executed[gate] {
        return Err(violation(round, format!("gate {gate} executed twice or unknown")));
    }
    executed[gate] = true;
    for &q in qubits {
        if let Some(prev) = last_gate_on_qubit[q.index()] {
            if prev > gate {
                return Err(violation(
                    round,
                    format!("gate {gate} fires after gate {prev} on qubit {}", q.0),
                ));
            }
        }
        last_gate_on_qubit[q.index()] = Some(gate);
    }
    Ok(())
}

/// Full validation used on freshly routed traces: structural replay plus a
/// cross-check that every recorded gate matches the circuit's operands.
pub fn validate_against_dag(trace: &ExecutionTrace, dag: &GateDag) -> Result<()> {
    if trace.num_gates != dag.len() {
        return Err(violation(0, "trace gate count differs from circuit"));
    }
    for round in &trace.rounds {
        for op in &round.ops {
            match *op {
                TraceOp::Gate1 { gate, qubit, .. } => {
                    let g = &dag.gates[gate];
                    if g.operands.qubits() != vec![qubit] {
                        return Err(violation(0, format!("gate {gate} operand mismatch")));
                    }
                }
                TraceOp::Gate2 { gate, a, b, .. } => {
                    let g = &dag.gates[gate];
                    let mut want = g.operands.qubits();
                    let mut got = vec![a, b];
                    want.sort();
                    got.sort();
                    if want != got {
                        return Err(violation(0, format!("gate {gate} operand mismatch")));
                    }
                }
                _ => {}
            }
        }
    }
    replay(trace, true).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: u32) -> QubitId {
        QubitId(i)
    }

    fn minimal_trace() -> ExecutionTrace {
        let machine = MachineGraph::linear(2, 2).unwrap();
        ExecutionTrace {
            version: TRACE_VERSION,
            seed: 0,
            num_qubits: 2,
            num_gates: 1,
            machine,
            initial_chains: vec![vec![q(0), q(1)], vec![]],
            rounds: vec![Round {
                kind: RoundKind::Gate,
                duration_us: None,
                ops: vec![TraceOp::Gate2 {
                    gate: 0,
                    label: "cx".into(),
                    a: q(0),
                    b: q(1),
                    trap: TrapId(0),
                }],
            }],
        }
    }

    #[test]
    fn valid_trace_replays() {
        let trace = minimal_trace();
        replay(&trace, true).unwrap();
    }

    #[test]
    fn co_location_violations_are_caught() {
        let mut trace = minimal_trace();
        trace.initial_chains = vec![vec![q(0)], vec![q(1)]];
        let err = replay(&trace, true).unwrap_err();
        match err {
            Error::Validation { msg, .. } => assert!(msg.contains("fires in trap")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn capacity_violations_are_caught() {
        let machine = MachineGraph::linear(2, 1).unwrap();
        let j = machine.junction_between(TrapId(0), TrapId(1)).unwrap();
        let trace = ExecutionTrace {
            version: TRACE_VERSION,
            seed: 0,
            num_qubits: 2,
            num_gates: 0,
            machine,
            initial_chains: vec![vec![q(0)], vec![q(1)]],
            rounds: vec![Round {
                kind: RoundKind::Shuttle,
                duration_us: None,
                ops: vec![TraceOp::Shuttle { qubit: q(0), from: TrapId(0), to: TrapId(1), junction: j }],
            }],
        };
        let err = replay(&trace, false).unwrap_err();
        match err {
            Error::Validation { msg, .. } => assert!(msg.contains("capacity")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn program_order_violations_are_caught() {
        let mut trace = minimal_trace();
        trace.num_gates = 2;
        trace.rounds = vec![
            Round {
                kind: RoundKind::Gate,
                duration_us: None,
                ops: vec![TraceOp::Gate2 { gate: 1, label: "cx".into(), a: q(0), b: q(1), trap: TrapId(0) }],
            },
            Round {
                kind: RoundKind::Gate,
                duration_us: None,
                ops: vec![TraceOp::Gate2 { gate: 0, label: "cx".into(), a: q(0), b: q(1), trap: TrapId(0) }],
            },
        ];
        let err = replay(&trace, true).unwrap_err();
        match err {
            Error::Validation { msg, .. } => assert!(msg.contains("after gate")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let trace = minimal_trace();
        let text = trace.to_json();
        let back = ExecutionTrace::from_json(&text).unwrap();
        assert_eq!(back.rounds, trace.rounds);
        assert_eq!(back.num_qubits, trace.num_qubits);
    }
}
