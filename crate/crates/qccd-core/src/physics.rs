//! Parametric time and fidelity model.
//!
//! Rounds run their contents in parallel across traps and junctions while
//! work inside one trap is serial, so a round lasts as long as its busiest
//! resource. Each operation multiplies a survival factor into the fidelity
//! product; shuttling deposits motional heat in the traps it touches, which
//! raises the error of later two-qubit work there. Total fidelity is the
//! gate product times the coherence factor exp(-t/T2).

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ions::IonConfiguration;
use crate::trace::{ExecutionTrace, Round, RoundKind, TraceOp};
use crate::topology::TrapId;

/// Durations, error rates and the heating proxy. The defaults are
/// order-of-magnitude placeholders for a small QCCD device, chosen so that
/// desk-scale benchmark fidelities land in a meaningful range; every field
/// can be overridden from the run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicsParams {
    /// Single-qubit gate duration (µs).
    pub t_1q_us: f64,
    /// Two-qubit gate duration (µs).
    pub t_2q_us: f64,
    /// In-chain SWAP duration (µs).
    pub t_swap_us: f64,
    /// Junction transit duration (µs).
    pub t_shuttle_us: f64,
    /// Combined split+merge overhead charged once per hop (µs).
    pub t_split_merge_us: f64,
    /// Single-qubit gate error probability.
    pub e_1q: f64,
    /// Base two-qubit gate error probability.
    pub e_2q_base: f64,
    /// Motional quanta added to a trap per shuttle touching it.
    pub heat_per_shuttle: f64,
    /// Extra two-qubit error per motional quantum in the host trap.
    pub e_heat_coeff: f64,
    /// Extra two-qubit error per ion beyond two in the host trap.
    pub chain_coeff: f64,
    /// Qubit coherence time (µs).
    pub t2_us: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams {
            t_1q_us: 1.0,
            t_2q_us: 40.0,
            t_swap_us: 120.0,
            t_shuttle_us: 100.0,
            t_split_merge_us: 80.0,
            e_1q: 1e-5,
            e_2q_base: 5e-3,
            heat_per_shuttle: 1.0,
            e_heat_coeff: 1e-4,
            chain_coeff: 2e-4,
            t2_us: 2e6,
        }
    }
}

/// Derived counters and quality estimates for one executed trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetrics {
    pub shuttle_count: usize,
    pub swap_count: usize,
    pub rounds: usize,
    pub exec_time_us: f64,
    pub gate_fidelity_product: f64,
    pub coherence_factor: f64,
    pub total_fidelity: f64,
    /// Final accumulated motional heat per trap.
    pub trap_heat: Vec<f64>,
}

/// Duration of one round: the longest serial resource chain inside it.
///
/// In a shuttle round each transported ion waits for every SWAP in its
/// origin trap (in-trap reorders are serial), then splits, transits and
/// merges. In a gate round each trap runs its gates back to back.
pub fn round_duration(round: &Round, machine_traps: usize, p: &PhysicsParams) -> f64 {
    match round.kind {
        RoundKind::Shuttle => {
            let mut swap_work = vec![0.0f64; machine_traps];
            for op in &round.ops {
                if let TraceOp::Swap { trap, .. } = op {
                    swap_work[trap.index()] += p.t_swap_us;
                }
            }
            let mut longest: f64 = 0.0;
            for op in &round.ops {
                if let TraceOp::Shuttle { from, .. } = op {
                    let serial = swap_work[from.index()] + p.t_split_merge_us + p.t_shuttle_us;
                    longest = longest.max(serial);
                }
            }
            // A round of only swaps (no hops) just costs the swap work.
            if longest == 0.0 {
                longest = swap_work.iter().cloned().fold(0.0, f64::max);
            }
            longest
        }
        RoundKind::Gate => {
            let mut work = vec![0.0f64; machine_traps];
            for op in &round.ops {
                match op {
                    TraceOp::Gate1 { trap, .. } => work[trap.index()] += p.t_1q_us,
                    TraceOp::Gate2 { trap, .. } => work[trap.index()] += p.t_2q_us,
                    _ => {}
                }
            }
            work.iter().cloned().fold(0.0, f64::max)
        }
    }
}

/// Fill every round's modeled duration in place.
pub fn annotate_durations(trace: &mut ExecutionTrace, p: &PhysicsParams) {
    let traps = trace.machine.num_traps();
    for round in &mut trace.rounds {
        round.duration_us = Some(round_duration(round, traps, p));
    }
}

fn two_qubit_error(trap: TrapId, config: &IonConfiguration, heat: &[f64], p: &PhysicsParams) -> f64 {
    let occupancy = config.occupancy(trap) as f64;
    let e = p.e_2q_base
        + p.chain_coeff * (occupancy - 2.0).max(0.0)
        + p.e_heat_coeff * heat[trap.index()];
    e.clamp(0.0, 1.0)
}

/// Walk a trace accumulating execution time, per-trap heat and the fidelity
/// product. The trace must replay validly; structural replay runs inline so
/// corrupted input surfaces as a validation error.
pub fn accumulate_fidelity(trace: &ExecutionTrace, p: &PhysicsParams) -> Result<RunMetrics> {
    // Structural validation first (no completeness requirement so prefixes
    // of a schedule can be scored too).
    crate::trace::replay(trace, false)?;

    let machine = &trace.machine;
    let mut config = IonConfiguration::from_chains(trace.num_qubits, trace.initial_chains.clone());
    let mut heat = vec![0.0f64; machine.num_traps()];
    let mut fidelity = 1.0f64;
    let mut exec_time = 0.0f64;
    let mut shuttle_count = 0usize;
    let mut swap_count = 0usize;

    for round in &trace.rounds {
        exec_time += round_duration(round, machine.num_traps(), p);
        match round.kind {
            RoundKind::Shuttle => {
                let mut arrivals = Vec::new();
                for op in &round.ops {
                    match *op {
                        TraceOp::Swap { trap, a, b } => {
                            swap_count += 1;
                            // SWAPs are physical two-qubit operations.
                            fidelity *= 1.0 - two_qubit_error(trap, &config, &heat, p);
                            let chain = config.chain(trap);
                            let pos_a = chain.iter().position(|&x| x == a).expect("validated above");
                            let pos_b = chain.iter().position(|&x| x == b).expect("validated above");
                            config.swap_adjacent(trap, pos_a.min(pos_b));
                        }
                        TraceOp::Shuttle { qubit, from, to, junction } => {
                            shuttle_count += 1;
                            heat[from.index()] += p.heat_per_shuttle;
                            heat[to.index()] += p.heat_per_shuttle;
                            let exit = machine.exit_end(from, junction);
                            let removed = config.remove_end(from, exit);
                            debug_assert_eq!(removed, qubit);
                            arrivals.push((qubit, to, junction));
                        }
                        _ => unreachable!("replay validated round contents"),
                    }
                }
                for (qubit, to, junction) in arrivals {
                    config.insert_end(to, machine.exit_end(to, junction), qubit);
                }
            }
            RoundKind::Gate => {
                for op in &round.ops {
                    match *op {
                        TraceOp::Gate1 { .. } => {
                            fidelity *= 1.0 - p.e_1q.clamp(0.0, 1.0);
                        }
                        TraceOp::Gate2 { trap, .. } => {
                            fidelity *= 1.0 - two_qubit_error(trap, &config, &heat, p);
                        }
                        _ => unreachable!("replay validated round contents"),
                    }
                }
            }
        }
    }

    let coherence_factor = (-exec_time / p.t2_us).exp();
    Ok(RunMetrics {
        shuttle_count,
        swap_count,
        rounds: trace.rounds.len(),
        exec_time_us: exec_time,
        gate_fidelity_product: fidelity,
        coherence_factor,
        total_fidelity: fidelity * coherence_factor,
        trap_heat: heat,
    })
}
