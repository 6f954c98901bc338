//! The routing loop: pick executable gates, choose execution traps by
//! score, clear congested traps by relocating ions, and commit time slices
//! of parallel work.
//!
//! Each time slice proceeds in three phases. Ready single-qubit gates drain
//! immediately (they execute in place and never move ions). Two-qubit source
//! gates are then scored against every trap on every shortest path between
//! their ions and committed best-score-first, re-scoring the rest after each
//! commit; a gate whose best score falls below the threshold is deferred to
//! a later slice. Finally the slice flushes: committed movements expand into
//! conflict-free parallel shuttle rounds followed by one parallel gate
//! round. When an entire slice would defer, the single best-scoring gate is
//! committed unconditionally so high thresholds degrade to sequential
//! execution instead of stalling.

use std::collections::VecDeque;

use crate::circuit::GateDag;
use crate::error::{Error, Result};
use crate::ions::IonConfiguration;
use crate::scoring::{
    self, bottleneck_score, excess_capacity_score, future_ops_score, parallelism_score,
    Lookahead, LookaheadGate, ScoreWeights, TrapScore,
};
use crate::shuttle::{decompose_moves, expand_swaps, PlannedMove, ShuttleDag, ShuttleOp};
use crate::topology::{MachineGraph, QubitId, TrapId};
use crate::trace::{ExecutionTrace, Round, RoundKind, TraceOp, TRACE_VERSION};

/// How the initial ion placement is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlacementStrategy {
    /// Fill traps in id order with qubits in index order.
    #[default]
    Sequential,
    /// Co-locate each qubit's earliest two-qubit partner where capacity
    /// allows, then fill sequentially.
    Greedy,
}

/// Deterministic initial placement of all circuit qubits.
pub fn initial_placement(
    dag: &GateDag,
    machine: &MachineGraph,
    strategy: PlacementStrategy,
) -> Result<IonConfiguration> {
    let total = machine.total_capacity();
    if dag.num_qubits > total {
        return Err(Error::Capacity { qubits: dag.num_qubits, capacity: total });
    }

    let mut chains: Vec<Vec<QubitId>> = vec![Vec::new(); machine.num_traps()];
    let mut placed = vec![false; dag.num_qubits];
    let mut fill_trap = 0usize;

    let place = |q: QubitId, chains: &mut Vec<Vec<QubitId>>, from: &mut usize| {
        let mut t = *from;
        while chains[t].len() >= machine.capacity(TrapId(t as u32)) {
            t += 1;
        }
        chains[t].push(q);
        *from = t;
    };

    if strategy == PlacementStrategy::Greedy {
        for gate in &dag.gates {
            if let crate::circuit::Operands::Two(a, b) = gate.operands {
                if !placed[a.index()] && !placed[b.index()] {
                    // Find the first trap with room for the pair.
                    let mut t = 0usize;
                    while t < machine.num_traps()
                        && chains[t].len() + 2 > machine.capacity(TrapId(t as u32))
                    {
                        t += 1;
                    }
                    if t == machine.num_traps() {
                        continue;
                    }
                    chains[t].push(a);
                    chains[t].push(b);
                    placed[a.index()] = true;
                    placed[b.index()] = true;
                }
            }
        }
    }
    for (i, placed) in placed.iter_mut().enumerate() {
        if !*placed {
            place(QubitId(i as u32), &mut chains, &mut fill_trap);
            *placed = true;
        }
    }
    Ok(IonConfiguration::from_chains(dag.num_qubits, chains))
}

/// A fully evaluated candidate commitment for one gate.
#[derive(Debug, Clone)]
pub struct CommitPlan {
    pub gate: usize,
    pub trap: TrapId,
    pub score: TrapScore,
    /// Relocation moves (single hops) followed by the gate ions' paths, in
    /// execution order.
    pub moves: Vec<PlannedMove>,
    /// False when the trap already hosts a gate this slice, which bars the
    /// commit regardless of score.
    pub feasible: bool,
}

/// Outcome of trap selection for one source gate.
#[derive(Debug, Clone)]
pub enum Decision {
    Commit(CommitPlan),
    /// Deferred; carries the best feasible candidate (if any) so a stalled
    /// slice can force progress.
    Defer(Option<CommitPlan>),
}

/// Outcome of congestion resolution on one trap.
#[derive(Debug, Clone)]
pub enum BottleneckOutcome {
    Resolved { moves: Vec<PlannedMove>, score: f64 },
    Infeasible,
}

struct SliceState {
    scheduled: Vec<(usize, TrapId)>,
    reserved: Vec<bool>,
    busy: Vec<bool>,
    pending_moves: Vec<PlannedMove>,
    drained_1q: Vec<usize>,
}

impl SliceState {
    fn new(num_qubits: usize, num_traps: usize) -> Self {
        SliceState {
            scheduled: Vec::new(),
            reserved: vec![false; num_qubits],
            busy: vec![false; num_traps],
            pending_moves: Vec::new(),
            drained_1q: Vec::new(),
        }
    }
}

/// Routing engine over one circuit/machine/weights triple.
pub struct Router<'a> {
    dag: &'a GateDag,
    machine: &'a MachineGraph,
    weights: ScoreWeights,
    /// Working configuration: committed moves apply here immediately.
    config: IonConfiguration,
    /// Physical configuration: advanced round-by-round at each flush.
    physical: IonConfiguration,
    remaining_preds: Vec<usize>,
    executed: Vec<bool>,
    remaining: usize,
    slice: SliceState,
    lookahead: Lookahead,
}

impl<'a> Router<'a> {
    pub fn new(
        dag: &'a GateDag,
        machine: &'a MachineGraph,
        weights: ScoreWeights,
        strategy: PlacementStrategy,
    ) -> Result<Self> {
        let config = initial_placement(dag, machine, strategy)?;
        let remaining_preds = (0..dag.len()).map(|g| dag.predecessors(g).len()).collect();
        Ok(Router {
            dag,
            machine,
            weights,
            physical: config.clone(),
            config,
            remaining_preds,
            executed: vec![false; dag.len()],
            remaining: dag.len(),
            slice: SliceState::new(dag.num_qubits, machine.num_traps()),
            lookahead: Lookahead::default(),
        })
    }

    pub fn config(&self) -> &IonConfiguration {
        &self.config
    }

    fn is_source(&self, g: usize) -> bool {
        !self.executed[g] && self.remaining_preds[g] == 0
    }

    fn source_two_qubit_gates(&self) -> Vec<usize> {
        (0..self.dag.len())
            .filter(|&g| {
                self.is_source(g)
                    && self.dag.gates[g].is_two_qubit()
                    && !self.slice.scheduled.iter().any(|&(s, _)| s == g)
                    && self
                        .dag.gates[g]
                        .operands
                        .qubits()
                        .iter()
                        .all(|q| !self.slice.reserved[q.index()])
            })
            .collect()
    }

    fn mark_executed(&mut self, g: usize) {
        debug_assert!(!self.executed[g]);
        self.executed[g] = true;
        self.remaining -= 1;
        for &s in self.dag.successors(g) {
            self.remaining_preds[s] -= 1;
        }
    }

    /// Frontier-relative lookahead: ASAP layers over the unexecuted gates,
    /// where single-qubit gates are transparent (they never form a routing
    /// slice of their own).
    fn build_lookahead(&self) -> Lookahead {
        let window = self.weights.lookahead;
        let mut layers: Vec<Vec<LookaheadGate>> = vec![Vec::new(); window.saturating_sub(1)];
        let mut level = vec![0usize; self.dag.len()];
        for g in 0..self.dag.len() {
            if self.executed[g] {
                continue;
            }
            let mut lvl = 0usize;
            for &p in self.dag.predecessors(g) {
                if self.executed[p] {
                    continue;
                }
                let w = usize::from(self.dag.gates[p].is_two_qubit());
                lvl = lvl.max(level[p] + w);
            }
            level[g] = lvl;
            if self.dag.gates[g].is_two_qubit() && lvl + 1 < window {
                if let crate::circuit::Operands::Two(a, b) = self.dag.gates[g].operands {
                    layers[lvl].push(LookaheadGate { gate: g, a, b });
                }
            }
        }
        while layers.last().is_some_and(|l| l.is_empty()) {
            layers.pop();
        }
        Lookahead { layers }
    }

    fn exclude_list(&self, gate: usize) -> Vec<usize> {
        let mut ex: Vec<usize> = self.slice.scheduled.iter().map(|&(g, _)| g).collect();
        ex.push(gate);
        ex
    }

    /// Trap selection for one source two-qubit gate, per the scoring rules.
    /// Does not mutate the router; the returned plan carries everything a
    /// commit needs.
    pub fn select_trap(&self, gate: usize) -> Decision {
        let (q1, q2) = match self.dag.gates[gate].operands {
            crate::circuit::Operands::Two(a, b) => (a, b),
            _ => panic!("select_trap is defined for two-qubit gates"),
        };
        let t1 = self.config.trap_of(q1);
        let t2 = self.config.trap_of(q2);
        let exclude = self.exclude_list(gate);

        let mut best_any: Option<CommitPlan> = None;
        let mut best_feasible: Option<CommitPlan> = None;
        let consider = |plan: CommitPlan, best_any: &mut Option<CommitPlan>, best_feasible: &mut Option<CommitPlan>| {
            let better = |cur: &Option<CommitPlan>, new: &CommitPlan| match cur {
                None => true,
                Some(b) => {
                    new.score.total > b.score.total
                        || (new.score.total == b.score.total
                            && (new.trap, new.gate) < (b.trap, b.gate))
                }
            };
            if plan.feasible && better(best_feasible, &plan) {
                *best_feasible = Some(plan.clone());
            }
            if better(best_any, &plan) {
                *best_any = Some(plan);
            }
        };

        if t1 == t2 {
            let fo = future_ops_score(q1, t1, &self.lookahead, &exclude, &self.config, self.weights.lookahead)
                + future_ops_score(q2, t1, &self.lookahead, &exclude, &self.config, self.weights.lookahead);
            let ec = excess_capacity_score(t1, self.machine, &self.config, 0);
            let pr = parallelism_score(self.slice.busy[t1.index()]);
            let score = TrapScore::combine(0, 0, fo, ec, pr, &self.weights);
            let plan = CommitPlan {
                gate,
                trap: t1,
                score,
                moves: Vec::new(),
                feasible: !self.slice.busy[t1.index()],
            };
            consider(plan, &mut best_any, &mut best_feasible);
        } else {
            for path in self.machine.all_shortest_paths(t1, t2) {
                for target_idx in 0..path.len() {
                    if let Some(plan) =
                        self.evaluate_candidate(gate, q1, q2, &path, target_idx, &exclude)
                    {
                        consider(plan, &mut best_any, &mut best_feasible);
                    }
                }
            }
        }

        match best_any {
            Some(plan) if plan.feasible && plan.score.total >= self.weights.threshold => {
                Decision::Commit(plan)
            }
            Some(_) => Decision::Defer(best_feasible),
            None => Decision::Defer(None),
        }
    }

    /// Score one (path, trap) candidate: clear congestion hypothetically,
    /// price the ion movements, and assemble the weighted score. Returns
    /// None when an unavoidable bottleneck blocks the candidate.
    fn evaluate_candidate(
        &self,
        gate: usize,
        q1: QubitId,
        q2: QubitId,
        path: &[TrapId],
        target_idx: usize,
        exclude: &[usize],
    ) -> Option<CommitPlan> {
        let target = path[target_idx];
        let route1: Vec<TrapId> = path[..=target_idx].to_vec();
        let route2: Vec<TrapId> = path[target_idx..].iter().rev().copied().collect();

        let mut hyp = self.config.clone();
        let mut immovable = self.slice.reserved.clone();
        immovable[q1.index()] = true;
        immovable[q2.index()] = true;

        let mut moves: Vec<PlannedMove> = Vec::new();
        let mut extra_shuttles = 0usize;
        let mut extra_swaps = 0usize;

        // Every trap an ion enters needs room: one transient slot for a
        // transit, one lasting slot per arriving ion at the target. Traps
        // are cleared in traversal order; once verified a trap is settled,
        // and later relocation chains may still pass through it (the
        // outgoing ion leaves before the incoming arrives, so occupancy is
        // preserved) but may not end there and reclaim the verified slack.
        let mut settled = vec![false; self.machine.num_traps()];
        let clear = |trap: TrapId,
                         slots: usize,
                         hyp: &mut IonConfiguration,
                         settled: &mut Vec<bool>,
                         moves: &mut Vec<PlannedMove>,
                         extra_sh: &mut usize,
                         extra_sw: &mut usize|
         -> bool {
            while hyp.occupancy(trap) + slots > self.machine.capacity(trap) {
                match self.resolve_bottleneck_in(trap, hyp, &immovable, settled) {
                    Some((relocations, sh, sw, _score)) => {
                        moves.extend(relocations);
                        *extra_sh += sh;
                        *extra_sw += sw;
                    }
                    None => return false,
                }
            }
            settled[trap.index()] = true;
            true
        };

        for route in [&route1, &route2] {
            if route.len() < 2 {
                continue;
            }
            for t in &route[1..route.len() - 1] {
                if !clear(*t, 1, &mut hyp, &mut settled, &mut moves, &mut extra_shuttles, &mut extra_swaps) {
                    return None;
                }
            }
        }
        let incoming = usize::from(route1.len() > 1) + usize::from(route2.len() > 1);
        if !clear(target, incoming, &mut hyp, &mut settled, &mut moves, &mut extra_shuttles, &mut extra_swaps) {
            return None;
        }

        let (sh1, sw1) = scoring::single_ion_movement(q1, &route1, self.machine, &hyp);
        let (sh2, sw2) = scoring::single_ion_movement(q2, &route2, self.machine, &hyp);
        let fo = future_ops_score(q1, target, &self.lookahead, exclude, &hyp, self.weights.lookahead)
            + future_ops_score(q2, target, &self.lookahead, exclude, &hyp, self.weights.lookahead);
        let ec = excess_capacity_score(target, self.machine, &hyp, incoming);
        let busy = self.slice.busy[target.index()];
        let pr = parallelism_score(busy);
        let score = TrapScore::combine(
            sh1 + sh2 + extra_shuttles,
            sw1 + sw2 + extra_swaps,
            fo,
            ec,
            pr,
            &self.weights,
        );

        if route1.len() > 1 {
            moves.push(PlannedMove { qubit: q1, path: route1 });
        }
        if route2.len() > 1 {
            moves.push(PlannedMove { qubit: q2, path: route2 });
        }
        Some(CommitPlan { gate, trap: target, score, moves, feasible: !busy })
    }

    /// Free one slot in a congested trap by relocating ions toward the
    /// nearest trap with spare capacity, walking each candidate shortest
    /// path from its free end backward and picking the best-scoring movable
    /// ion per full trap. Chains may pass through endpoint-blocked traps
    /// (net occupancy there is unchanged) but may not deposit an ion in
    /// one. Applies the winning relocation chain to `hyp`.
    fn resolve_bottleneck_in(
        &self,
        congested: TrapId,
        hyp: &mut IonConfiguration,
        immovable: &[bool],
        endpoint_blocked: &[bool],
    ) -> Option<(Vec<PlannedMove>, usize, usize, f64)> {
        let free = |t: TrapId, cfg: &IonConfiguration| {
            self.machine.capacity(t).saturating_sub(cfg.occupancy(t))
        };
        let dist = self.machine.distances_from(congested);
        let mut nearest: Option<usize> = None;
        for t in 0..self.machine.num_traps() {
            let trap = TrapId(t as u32);
            if trap != congested
                && !endpoint_blocked[t]
                && free(trap, hyp) > 0
                && dist[t] != usize::MAX
            {
                nearest = Some(nearest.map_or(dist[t], |d: usize| d.min(dist[t])));
            }
        }
        let nearest = nearest?;

        struct Resolution {
            moves: Vec<PlannedMove>,
            shuttles: usize,
            swaps: usize,
            score: f64,
        }
        let mut best: Option<Resolution> = None;

        for t in 0..self.machine.num_traps() {
            let free_trap = TrapId(t as u32);
            if free_trap == congested
                || endpoint_blocked[t]
                || dist[t] != nearest
                || free(free_trap, hyp) == 0
            {
                continue;
            }
            'paths: for path in self.machine.all_shortest_paths(congested, free_trap) {
                let mut sim = hyp.clone();
                let mut moves = Vec::new();
                let mut swaps = 0usize;
                let mut score = 0.0f64;
                // Walk from the free end backward so each relocation lands
                // in a slot just vacated (or in the free trap itself).
                for i in (0..path.len() - 1).rev() {
                    let from = path[i];
                    let to = path[i + 1];
                    let mut chosen: Option<(QubitId, f64)> = None;
                    for &ion in sim.chain(from) {
                        if immovable[ion.index()] {
                            continue;
                        }
                        let s = bottleneck_score(
                            ion,
                            &[from, to],
                            self.machine,
                            &sim,
                            &self.lookahead,
                            self.weights.lookahead,
                        );
                        let better = match chosen {
                            None => true,
                            Some((q, cur)) => s > cur || (s == cur && ion < q),
                        };
                        if better {
                            chosen = Some((ion, s));
                        }
                    }
                    let Some((ion, s)) = chosen else {
                        continue 'paths;
                    };
                    let (_, sw) =
                        scoring::single_ion_movement(ion, &[from, to], self.machine, &sim);
                    sim.apply_path(self.machine, ion, &[from, to]);
                    moves.push(PlannedMove { qubit: ion, path: vec![from, to] });
                    swaps += sw;
                    score += s;
                }
                let shuttles = moves.len();
                let better = match &best {
                    None => true,
                    Some(b) => score > b.score || (score == b.score && shuttles < b.shuttles),
                };
                if better {
                    best = Some(Resolution { moves, shuttles, swaps, score });
                }
            }
        }

        let resolution = best?;
        for mv in &resolution.moves {
            hyp.apply_path(self.machine, mv.qubit, &mv.path);
        }
        Some((resolution.moves, resolution.shuttles, resolution.swaps, resolution.score))
    }

    /// Public probe of congestion resolution against the current state;
    /// `pinned` lists ions immobilized by scheduled gates.
    pub fn resolve_bottleneck(&self, trap: TrapId, pinned: &[QubitId]) -> BottleneckOutcome {
        let mut immovable = self.slice.reserved.clone();
        for q in pinned {
            immovable[q.index()] = true;
        }
        let mut hyp = self.config.clone();
        let unblocked = vec![false; self.machine.num_traps()];
        match self.resolve_bottleneck_in(trap, &mut hyp, &immovable, &unblocked) {
            Some((moves, _, _, score)) => BottleneckOutcome::Resolved { moves, score },
            None => BottleneckOutcome::Infeasible,
        }
    }

    fn commit(&mut self, plan: CommitPlan) {
        for mv in &plan.moves {
            self.config.apply_path(self.machine, mv.qubit, &mv.path);
        }
        self.slice.pending_moves.extend(plan.moves.iter().cloned());
        for q in self.dag.gates[plan.gate].operands.qubits() {
            self.slice.reserved[q.index()] = true;
        }
        self.slice.busy[plan.trap.index()] = true;
        self.slice.scheduled.push((plan.gate, plan.trap));
    }

    /// Execute every ready single-qubit gate (transitively) and return them
    /// in execution order.
    fn drain_ready_one_qubit(&mut self) -> Vec<usize> {
        let mut drained = Vec::new();
        let mut queue: VecDeque<usize> = (0..self.dag.len())
            .filter(|&g| self.is_source(g) && !self.dag.gates[g].is_two_qubit())
            .collect();
        while let Some(g) = queue.pop_front() {
            if !self.is_source(g) || self.dag.gates[g].is_two_qubit() {
                continue;
            }
            self.mark_executed(g);
            drained.push(g);
            for &s in self.dag.successors(g) {
                if self.is_source(s) && !self.dag.gates[s].is_two_qubit() {
                    queue.push_back(s);
                }
            }
        }
        drained
    }

    /// Re-level shuttle rounds so no trap ever exceeds capacity at a round
    /// boundary. Conflict edges stay enforced; offending arrivals are pushed
    /// to later rounds, degrading toward the always-valid serial order.
    fn legalize_rounds(&self, dag: &ShuttleDag) -> Result<Vec<Vec<ShuttleOp>>> {
        let n = dag.len();
        let mut min_round = vec![0usize; n];
        let cap_limit = 4 * n * n + 64;
        for _ in 0..cap_limit {
            let mut level = vec![0usize; n];
            for i in 0..n {
                let by_preds = dag
                    .predecessors(i)
                    .iter()
                    .map(|&p| level[p] + 1)
                    .max()
                    .unwrap_or(0);
                level[i] = by_preds.max(min_round[i]);
            }
            let round_count = level.iter().map(|&l| l + 1).max().unwrap_or(0);
            let mut rounds: Vec<Vec<ShuttleOp>> = vec![Vec::new(); round_count];
            for (i, op) in dag.ops.iter().enumerate() {
                rounds[level[i]].push(*op);
            }

            let mut occ: Vec<i64> = (0..self.machine.num_traps())
                .map(|t| self.physical.occupancy(TrapId(t as u32)) as i64)
                .collect();
            let mut deferred = false;
            'sim: for (r, round) in rounds.iter().enumerate() {
                for op in round {
                    occ[op.from_trap.index()] -= 1;
                    occ[op.to_trap.index()] += 1;
                }
                for (t, occupancy) in occ.iter().enumerate() {
                    let overflow = occupancy - self.machine.capacity(TrapId(t as u32)) as i64;
                    if overflow > 0 {
                        // Defer the latest-recorded arrivals into this trap.
                        let mut arrivals: Vec<usize> = round
                            .iter()
                            .filter(|op| op.to_trap.index() == t)
                            .map(|op| op.op_id)
                            .collect();
                        arrivals.sort_unstable_by(|a, b| b.cmp(a));
                        for &op_id in arrivals.iter().take(overflow as usize) {
                            min_round[op_id] = r + 1;
                        }
                        deferred = true;
                        break 'sim;
                    }
                }
            }
            if !deferred {
                return Ok(rounds);
            }
        }
        // Commit order is always schedulable one hop per round (each commit
        // verified its space against the state left by its predecessors), so
        // fall back to it rather than failing.
        Ok(dag.ops.iter().map(|op| vec![*op]).collect())
    }

    /// Flush the slice: emit shuttle rounds for all pending movements, then
    /// one gate round holding the drained single-qubit gates, the committed
    /// two-qubit gates, and any single-qubit gates they unlock.
    fn flush(&mut self, trace: &mut ExecutionTrace) -> Result<()> {
        if !self.slice.pending_moves.is_empty() {
            let sdag = decompose_moves(&self.slice.pending_moves, self.machine);
            let rounds = self.legalize_rounds(&sdag)?;
            for round in rounds {
                let expanded = expand_swaps(&round, &mut self.physical, self.machine)?;
                let mut ops = Vec::new();
                for e in expanded {
                    for s in e.swaps {
                        ops.push(TraceOp::Swap { trap: s.trap, a: s.a, b: s.b });
                    }
                    ops.push(TraceOp::Shuttle {
                        qubit: e.op.qubit,
                        from: e.op.from_trap,
                        to: e.op.to_trap,
                        junction: e.op.junction,
                    });
                }
                trace.rounds.push(Round { kind: RoundKind::Shuttle, duration_us: None, ops });
            }
        }

        let mut gate_ops = Vec::new();
        for &g in &self.slice.drained_1q {
            let q = self.dag.gates[g].operands.qubits()[0];
            gate_ops.push(TraceOp::Gate1 {
                gate: g,
                label: self.dag.gates[g].label.name().to_string(),
                qubit: q,
                trap: self.physical.trap_of(q),
            });
        }
        let scheduled = std::mem::take(&mut self.slice.scheduled);
        for &(g, trap) in &scheduled {
            if let crate::circuit::Operands::Two(a, b) = self.dag.gates[g].operands {
                debug_assert_eq!(self.physical.trap_of(a), trap);
                debug_assert_eq!(self.physical.trap_of(b), trap);
                gate_ops.push(TraceOp::Gate2 {
                    gate: g,
                    label: self.dag.gates[g].label.name().to_string(),
                    a,
                    b,
                    trap,
                });
            }
            self.mark_executed(g);
        }
        // Single-qubit gates unlocked by this slice's gates run in the same
        // round, in place.
        for g in self.drain_ready_one_qubit() {
            let q = self.dag.gates[g].operands.qubits()[0];
            gate_ops.push(TraceOp::Gate1 {
                gate: g,
                label: self.dag.gates[g].label.name().to_string(),
                qubit: q,
                trap: self.physical.trap_of(q),
            });
        }
        if !gate_ops.is_empty() {
            trace.rounds.push(Round { kind: RoundKind::Gate, duration_us: None, ops: gate_ops });
        }

        // The physical state now reflects every committed move; the working
        // configuration must agree on trap assignment (chain order may
        // differ transiently, so resynchronize).
        debug_assert!((0..self.dag.num_qubits)
            .all(|q| self.config.trap_of(QubitId(q as u32)) == self.physical.trap_of(QubitId(q as u32))));
        self.config = self.physical.clone();
        self.slice = SliceState::new(self.dag.num_qubits, self.machine.num_traps());
        Ok(())
    }

    /// Run the full routing loop to completion.
    pub fn run(mut self, seed: u64) -> Result<ExecutionTrace> {
        let mut trace = ExecutionTrace {
            version: TRACE_VERSION,
            seed,
            num_qubits: self.dag.num_qubits,
            num_gates: self.dag.len(),
            machine: self.machine.clone(),
            initial_chains: self.config.chains().to_vec(),
            rounds: Vec::new(),
        };

        while self.remaining > 0 {
            self.slice.drained_1q = self.drain_ready_one_qubit();
            self.lookahead = self.build_lookahead();

            loop {
                let mut best: Option<CommitPlan> = None;
                for g in self.source_two_qubit_gates() {
                    if let Decision::Commit(plan) = self.select_trap(g) {
                        let better = match &best {
                            None => true,
                            Some(b) => {
                                plan.score.total > b.score.total
                                    || (plan.score.total == b.score.total
                                        && (plan.trap, plan.gate) < (b.trap, b.gate))
                            }
                        };
                        if better {
                            best = Some(plan);
                        }
                    }
                }
                match best {
                    Some(plan) => self.commit(plan),
                    None => break,
                }
            }

            if self.slice.scheduled.is_empty() && self.slice.drained_1q.is_empty() {
                // Whole slice deferred: force the single best-scoring gate
                // through so the loop always terminates.
                let mut best: Option<CommitPlan> = None;
                for g in self.source_two_qubit_gates() {
                    let candidate = match self.select_trap(g) {
                        Decision::Commit(plan) => Some(plan),
                        Decision::Defer(plan) => plan,
                    };
                    if let Some(plan) = candidate {
                        let better = match &best {
                            None => true,
                            Some(b) => {
                                plan.score.total > b.score.total
                                    || (plan.score.total == b.score.total
                                        && (plan.trap, plan.gate) < (b.trap, b.gate))
                            }
                        };
                        if better {
                            best = Some(plan);
                        }
                    }
                }
                match best {
                    Some(plan) => self.commit(plan),
                    None => {
                        if std::env::var("QCCD_DEBUG_STALL").is_ok() {
                            eprintln!("stall: occupancies {:?}", (0..self.machine.num_traps())
                                .map(|t| self.config.chain(TrapId(t as u32)).to_vec())
                                .collect::<Vec<_>>());
                            for g in self.source_two_qubit_gates() {
                                eprintln!("  source gate {g} {:?} -> {:?}",
                                    self.dag.gates[g].operands, self.select_trap(g));
                            }
                        }
                        return Err(Error::Routing(
                            "no executable gate has a feasible transport plan under the \
                             current congestion"
                                .into(),
                        ))
                    }
                }
            }

            self.flush(&mut trace)?;
        }

        crate::trace::validate_against_dag(&trace, self.dag)?;
        Ok(trace)
    }
}

/// Route a circuit onto a machine: the one-call entry point.
pub fn route(
    dag: &GateDag,
    machine: &MachineGraph,
    weights: &ScoreWeights,
    strategy: PlacementStrategy,
    seed: u64,
) -> Result<ExecutionTrace> {
    Router::new(dag, machine, *weights, strategy)?.run(seed)
}
