//! Trap scoring: the five cost/benefit components guiding trap selection.
//!
//! A candidate trap for a two-qubit gate is scored from shuttle count (SH),
//! SWAP count (SW), future operations (FO), excess capacity (EC) and
//! parallelism (PR). Movement components enter negatively, the rest
//! positively, each scaled by a configurable non-negative weight. Ions being
//! relocated purely to clear congestion use a simplified unweighted score
//! without the EC and PR terms.
//!
//! All functions here are pure over immutable snapshots, so candidate traps
//! can be scored concurrently.

use serde::{Deserialize, Serialize};

use crate::ions::IonConfiguration;
use crate::topology::{MachineGraph, QubitId, TrapId};

/// Tunable weights of the trap score, the commit threshold, and the
/// lookahead window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    /// Weight on the shuttle count (applied negatively).
    pub shuttle: f64,
    /// Weight on the SWAP count (applied negatively).
    pub swap: f64,
    /// Weight on the future-operations score.
    pub future_ops: f64,
    /// Weight on the excess-capacity score.
    pub excess_capacity: f64,
    /// Weight on the parallelism score.
    pub parallelism: f64,
    /// Minimum acceptable score for committing a gate this time slice.
    pub threshold: f64,
    /// Number of upcoming frontier layers inspected by the lookahead.
    pub lookahead: usize,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            shuttle: 1.0,
            swap: 1.0,
            future_ops: 1.0,
            excess_capacity: 1.0,
            parallelism: 1.0,
            threshold: -350.0,
            lookahead: 7,
        }
    }
}

/// Per-trap score breakdown for one candidate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapScore {
    pub shuttles: usize,
    pub swaps: usize,
    pub future_ops: f64,
    pub excess_capacity: i64,
    pub parallelism: i64,
    pub total: f64,
}

impl TrapScore {
    /// Combine raw components under the sign convention: movement counts are
    /// stored non-negative and enter the total negated.
    pub fn combine(
        shuttles: usize,
        swaps: usize,
        future_ops: f64,
        excess_capacity: i64,
        parallelism: i64,
        w: &ScoreWeights,
    ) -> TrapScore {
        let total = -w.shuttle * shuttles as f64 - w.swap * swaps as f64
            + w.future_ops * future_ops
            + w.excess_capacity * excess_capacity as f64
            + w.parallelism * parallelism as f64;
        TrapScore { shuttles, swaps, future_ops, excess_capacity, parallelism, total }
    }
}

/// A two-qubit gate visible in the lookahead window.
#[derive(Debug, Clone, Copy)]
pub struct LookaheadGate {
    pub gate: usize,
    pub a: QubitId,
    pub b: QubitId,
}

/// The next unexecuted frontier layers of the gate DAG, restricted to
/// two-qubit gates. `layers[0]` is the frontier itself and carries the
/// largest weight; deeper layers contribute less.
#[derive(Debug, Clone, Default)]
pub struct Lookahead {
    pub layers: Vec<Vec<LookaheadGate>>,
}

/// Future-operations score of `q` toward `trap`: each upcoming gate pairing
/// `q` with a partner currently resident in `trap` contributes
/// `window - layer_index`, so earlier gates weigh more and co-locating
/// future partners in advance pays off. Gates listed in `exclude` (the gate
/// currently being placed and any gate already scheduled in this slice) are
/// present work, not future work, and never count.
pub fn future_ops_score(
    q: QubitId,
    trap: TrapId,
    lookahead: &Lookahead,
    exclude: &[usize],
    config: &IonConfiguration,
    window: usize,
) -> f64 {
    let mut score = 0usize;
    for (idx, layer) in lookahead.layers.iter().enumerate() {
        let i = idx + 1;
        if i >= window {
            break;
        }
        let weight = window - i;
        for g in layer {
            if exclude.contains(&g.gate) {
                continue;
            }
            let partner = if g.a == q {
                g.b
            } else if g.b == q {
                g.a
            } else {
                continue;
            };
            if config.trap_of(partner) == trap {
                score += weight;
            }
        }
    }
    score as f64
}

/// Shuttle and SWAP counts for moving one ion along `route` (its current
/// trap first). SWAPs are the in-chain transpositions to reach the exit end
/// of the origin plus, for every intermediate trap traversed, that trap's
/// current occupancy.
pub fn single_ion_movement(
    q: QubitId,
    route: &[TrapId],
    machine: &MachineGraph,
    config: &IonConfiguration,
) -> (usize, usize) {
    if route.len() < 2 {
        return (0, 0);
    }
    let hops = route.len() - 1;
    let junction = machine
        .junction_between(route[0], route[1])
        .expect("route must follow junctions");
    let mut swaps = config.swaps_to_end(q, machine.exit_end(route[0], junction));
    for t in &route[1..route.len() - 1] {
        swaps += config.occupancy(*t);
    }
    (hops, swaps)
}

/// Shuttle and SWAP counts for bringing a gate's ions to `target`, which
/// must lie on `path` (a trap sequence from `q1`'s trap to `q2`'s trap). An
/// ion already resident in the target contributes nothing.
pub fn movement_counts(
    q1: QubitId,
    q2: QubitId,
    path: &[TrapId],
    target: TrapId,
    machine: &MachineGraph,
    config: &IonConfiguration,
) -> (usize, usize) {
    let target_idx = path
        .iter()
        .position(|&t| t == target)
        .expect("target must lie on the path");
    let route_q1 = &path[..=target_idx];
    let route_q2: Vec<TrapId> = path[target_idx..].iter().rev().copied().collect();
    let (sh1, sw1) = single_ion_movement(q1, route_q1, machine, config);
    let (sh2, sw2) = single_ion_movement(q2, &route_q2, machine, config);
    (sh1 + sh2, sw1 + sw2)
}

/// Free slots left in `trap` after `incoming` ions arrive: positive slack
/// scores positively, an exactly-full trap scores zero, and an over-full
/// trap is penalized by the full trap capacity so the penalty scales with
/// the chain that would have to be disturbed.
pub fn excess_capacity_score(
    trap: TrapId,
    machine: &MachineGraph,
    config: &IonConfiguration,
    incoming: usize,
) -> i64 {
    let capacity = machine.capacity(trap) as i64;
    let free = capacity - config.occupancy(trap) as i64 - incoming as i64;
    if free > 0 {
        free
    } else if free == 0 {
        0
    } else {
        -capacity
    }
}

/// +1 when the trap has no gate scheduled in the current time slice, -1
/// otherwise.
pub fn parallelism_score(trap_busy: bool) -> i64 {
    if trap_busy {
        -1
    } else {
        1
    }
}

/// Simplified score for an ion relocated to clear congestion: unweighted
/// `-SH - SW + FO`. Parallelism is omitted because the move serves no gate,
/// and excess capacity because the destination is already known to have
/// room.
pub fn bottleneck_score(
    q: QubitId,
    route: &[TrapId],
    machine: &MachineGraph,
    config: &IonConfiguration,
    lookahead: &Lookahead,
    window: usize,
) -> f64 {
    let (sh, sw) = single_ion_movement(q, route, machine, config);
    let destination = *route.last().expect("route never empty");
    let fo = future_ops_score(q, destination, lookahead, &[], config, window);
    -(sh as f64) - (sw as f64) + fo
}
