//! Parallelism-aware qubit routing and scheduling for modular trapped-ion
//! (QCCD) devices.
//!
//! The crate models a QCCD machine as a graph of capacity-bounded traps
//! linked by junctions, routes a circuit's two-qubit gates onto traps with a
//! tunable five-component scoring heuristic, resolves trap congestion by
//! relocating ions, batches transport into conflict-free parallel rounds,
//! and estimates execution time and fidelity with a parametric physics
//! model. A staged sweep optimizer tunes the scoring weights per
//! circuit/topology pair.

pub mod benchmarks;
pub mod circuit;
pub mod error;
pub mod ions;
pub mod physics;
pub mod router;
pub mod scoring;
pub mod shuttle;
pub mod sweep;
pub mod topology;
pub mod trace;

pub use circuit::{build_gate_dag, compute_metrics, Circuit, CircuitMetrics, Gate, GateDag, GateLabel, Operands};
pub use error::{Error, Result};
pub use ions::IonConfiguration;
pub use physics::{PhysicsParams, RunMetrics};
pub use router::{initial_placement, route, PlacementStrategy, Router};
pub use scoring::{ScoreWeights, TrapScore};
pub use sweep::{staged_optimize, StagePlan, SweepResult};
pub use topology::{ChainEnd, JunctionId, MachineGraph, QubitId, TopologyKind, TrapId};
pub use trace::{ExecutionTrace, Round, RoundKind, TraceOp};
