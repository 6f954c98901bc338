//! Shared helpers for the integration suites: a brute-force minimum-shuttle
//! oracle independent of the router, and small instance builders.
//!
//! Each test binary compiles its own copy, so not every helper is used by
//! every suite.
#![allow(dead_code)]

use qccd_core::circuit::{Circuit, Gate, GateLabel};
use qccd_core::topology::{MachineGraph, QubitId, TrapId};
use std::collections::VecDeque;

/// Build a pure two-qubit circuit from a list of qubit pairs.
pub fn circuit_from_pairs(num_qubits: usize, pairs: &[(u32, u32)]) -> Circuit {
    let gates = pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| Gate::two(i, GateLabel::Cx, QubitId(a), QubitId(b)))
        .collect();
    Circuit::new(num_qubits, gates)
}

/// Sequential-fill assignment of qubits to traps, mirroring the router's
/// default initial placement at the trap level.
pub fn sequential_assignment(num_qubits: usize, machine: &MachineGraph) -> Vec<usize> {
    let mut assignment = Vec::with_capacity(num_qubits);
    let mut trap = 0usize;
    let mut used = 0usize;
    for _ in 0..num_qubits {
        while used >= machine.capacity(TrapId(trap as u32)) {
            trap += 1;
            used = 0;
        }
        assignment.push(trap);
        used += 1;
    }
    assignment
}

/// Exhaustive search for the minimum number of shuttles needed to execute
/// `circuit` on `machine` from the sequential placement, exploring every
/// interleaving of single-hop ion moves (cost 1, capacity-checked) and
/// executions of ready co-located gates (cost 0). Returns `None` when no
/// schedule exists. Independent of the router: plain 0/1-cost BFS over
/// (assignment, executed-set) states.
pub fn min_shuttles_bruteforce(circuit: &Circuit, machine: &MachineGraph) -> Option<usize> {
    let n = circuit.num_qubits;
    let gates: Vec<(usize, usize)> = circuit
        .gates
        .iter()
        .map(|g| match g.operands {
            qccd_core::circuit::Operands::Two(a, b) => (a.index(), b.index()),
            _ => panic!("oracle handles two-qubit circuits"),
        })
        .collect();
    assert!(gates.len() <= 16, "oracle mask is 16 bits");

    // Per-gate predecessor masks from per-qubit program order.
    let mut pred_mask = vec![0u16; gates.len()];
    let mut last_on: Vec<Option<usize>> = vec![None; n];
    for (i, &(a, b)) in gates.iter().enumerate() {
        for q in [a, b] {
            if let Some(p) = last_on[q] {
                pred_mask[i] |= 1 << p;
            }
            last_on[q] = Some(i);
        }
    }

    let traps = machine.num_traps();
    let caps: Vec<usize> = machine.traps().iter().map(|t| t.capacity).collect();
    let encode = |assignment: &[usize], executed: u16| -> u64 {
        let mut key = executed as u64;
        for &t in assignment {
            key = key * traps as u64 + t as u64;
        }
        key
    };

    let start: Vec<usize> = sequential_assignment(n, machine);
    let full: u16 = if gates.is_empty() { 0 } else { (1u16 << gates.len()) - 1 };

    let mut dist: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();
    let mut queue: VecDeque<(Vec<usize>, u16, usize)> = VecDeque::new();
    dist.insert(encode(&start, 0), 0);
    queue.push_back((start, 0, 0));

    while let Some((assignment, executed, cost)) = queue.pop_front() {
        if dist.get(&encode(&assignment, executed)) != Some(&cost) {
            continue;
        }
        if executed == full {
            return Some(cost);
        }

        // Execute every ready co-located gate (0-cost edges go to the front).
        for (i, &(a, b)) in gates.iter().enumerate() {
            if executed & (1 << i) == 0
                && pred_mask[i] & executed == pred_mask[i]
                && assignment[a] == assignment[b]
            {
                let next = executed | (1 << i);
                let key = encode(&assignment, next);
                if dist.get(&key).is_none_or(|&d| cost < d) {
                    dist.insert(key, cost);
                    queue.push_front((assignment.clone(), next, cost));
                }
            }
        }

        // Move any ion one hop into a trap with room (cost 1).
        let mut occupancy = vec![0usize; traps];
        for &t in &assignment {
            occupancy[t] += 1;
        }
        for q in 0..n {
            let from = assignment[q];
            for &(to, _) in machine.neighbors(TrapId(from as u32)) {
                if occupancy[to.index()] < caps[to.index()] {
                    let mut next = assignment.clone();
                    next[q] = to.index();
                    let key = encode(&next, executed);
                    if dist.get(&key).is_none_or(|&d| cost + 1 < d) {
                        dist.insert(key, cost + 1);
                        queue.push_back((next, executed, cost + 1));
                    }
                }
            }
        }
    }
    None
}

/// Deterministic enumeration of small 4-qubit test circuits: every sequence
/// of 1, 2 or 3 gates over the six unordered qubit pairs.
pub fn enumerate_small_instances() -> Vec<Vec<(u32, u32)>> {
    let pairs: [(u32, u32); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut out = Vec::new();
    for &a in &pairs {
        out.push(vec![a]);
    }
    for &a in &pairs {
        for &b in &pairs {
            out.push(vec![a, b]);
        }
    }
    for &a in &pairs {
        for &b in &pairs {
            for &c in &pairs {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}
