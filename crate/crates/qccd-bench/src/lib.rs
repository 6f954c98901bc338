//! Shared fixtures for the routing benchmarks.

use qccd_core::circuit::{build_gate_dag, generators, GateDag};
use qccd_core::topology::MachineGraph;

pub fn qft_dag(n: usize) -> GateDag {
    build_gate_dag(&generators::qft(n).expect("valid size"))
}

pub fn rnd_dag(n: usize, seed: u64) -> GateDag {
    build_gate_dag(&generators::random_matching(n, n, 0.5, seed).expect("valid size"))
}

pub fn linear(traps: usize, capacity: usize) -> MachineGraph {
    MachineGraph::linear(traps, capacity).expect("valid layout")
}

pub fn grid(rows: usize, cols: usize, capacity: usize) -> MachineGraph {
    MachineGraph::grid(rows, cols, capacity).expect("valid layout")
}
