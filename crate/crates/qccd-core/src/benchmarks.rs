//! Benchmark statistics: the structure columns reported for each preset
//! circuit (depth, two-qubit gate count, and the per-time-slice averages).

use serde::{Deserialize, Serialize};

use crate::circuit::generators::BenchmarkKind;
use crate::circuit::{build_gate_dag, compute_metrics};
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub name: String,
    pub qubits: usize,
    pub depth: usize,
    pub two_q_gates: usize,
    pub avg_2q_per_ts: f64,
    pub avg_ion_mov_per_ts: f64,
}

/// Generate a preset at `qubits` qubits and compute its structure row.
pub fn benchmark_stats(kind: BenchmarkKind, qubits: usize, seed: u64) -> Result<BenchmarkRow> {
    let circuit = kind.generate(qubits, seed)?;
    let metrics = compute_metrics(&build_gate_dag(&circuit));
    Ok(BenchmarkRow {
        name: kind.name().to_string(),
        qubits,
        depth: metrics.depth,
        two_q_gates: metrics.two_q_count,
        avg_2q_per_ts: metrics.avg_2q_per_ts,
        avg_ion_mov_per_ts: metrics.avg_ion_mov_per_ts,
    })
}

/// CSV rendering with two-decimal rounding of the ratio columns.
pub fn stats_csv(rows: &[BenchmarkRow], seed: u64) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "# seed={seed}").unwrap();
    writeln!(out, "name,qubits,depth,2q_gates,avg_2q_gates_per_ts,avg_ion_mov_per_ts").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.2},{:.2}",
            r.name, r.qubits, r.depth, r.two_q_gates, r.avg_2q_per_ts, r.avg_ion_mov_per_ts
        )
        .unwrap();
    }
    out
}
