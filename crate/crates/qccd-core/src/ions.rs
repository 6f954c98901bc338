//! Mutable machine state: the ordered ion chain held by each trap.

use serde::{Deserialize, Serialize};

use crate::topology::{ChainEnd, MachineGraph, QubitId, TrapId};

/// Per-trap ordered ion chains plus a reverse qubit-to-trap index.
///
/// Position 0 of a chain is its head end. Every circuit qubit appears in
/// exactly one chain; chain length never exceeds the trap capacity at any
/// committed step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IonConfiguration {
    chains: Vec<Vec<QubitId>>,
    trap_of: Vec<TrapId>,
}

impl IonConfiguration {
    /// Build from explicit per-trap chains. Panics if a qubit repeats; the
    /// caller guarantees density of qubit ids.
    pub fn from_chains(num_qubits: usize, chains: Vec<Vec<QubitId>>) -> Self {
        let mut trap_of = vec![TrapId(u32::MAX); num_qubits];
        for (t, chain) in chains.iter().enumerate() {
            for &q in chain {
                assert_eq!(trap_of[q.index()].0, u32::MAX, "qubit {} placed twice", q.0);
                trap_of[q.index()] = TrapId(t as u32);
            }
        }
        assert!(
            trap_of.iter().all(|t| t.0 != u32::MAX),
            "every qubit must be placed"
        );
        IonConfiguration { chains, trap_of }
    }

    pub fn num_qubits(&self) -> usize {
        self.trap_of.len()
    }

    pub fn chains(&self) -> &[Vec<QubitId>] {
        &self.chains
    }

    pub fn chain(&self, t: TrapId) -> &[QubitId] {
        &self.chains[t.index()]
    }

    pub fn occupancy(&self, t: TrapId) -> usize {
        self.chains[t.index()].len()
    }

    pub fn trap_of(&self, q: QubitId) -> TrapId {
        self.trap_of[q.index()]
    }

    pub fn position_of(&self, q: QubitId) -> usize {
        let t = self.trap_of(q);
        self.chains[t.index()]
            .iter()
            .position(|&x| x == q)
            .expect("reverse index out of sync")
    }

    /// Number of ions strictly between `q` and the given end of its chain,
    /// i.e. the adjacent transpositions needed to bring `q` there.
    pub fn swaps_to_end(&self, q: QubitId, end: ChainEnd) -> usize {
        let t = self.trap_of(q);
        let pos = self.position_of(q);
        match end {
            ChainEnd::Head => pos,
            ChainEnd::Tail => self.occupancy(t) - 1 - pos,
        }
    }

    /// Exchange the ions at `pos` and `pos + 1` of a chain.
    pub fn swap_adjacent(&mut self, t: TrapId, pos: usize) {
        self.chains[t.index()].swap(pos, pos + 1);
    }

    pub fn end_ion(&self, t: TrapId, end: ChainEnd) -> Option<QubitId> {
        let chain = &self.chains[t.index()];
        match end {
            ChainEnd::Head => chain.first().copied(),
            ChainEnd::Tail => chain.last().copied(),
        }
    }

    pub fn remove_end(&mut self, t: TrapId, end: ChainEnd) -> QubitId {
        let chain = &mut self.chains[t.index()];
        let q = match end {
            ChainEnd::Head => chain.remove(0),
            ChainEnd::Tail => chain.pop().expect("removing from empty chain"),
        };
        self.trap_of[q.index()] = TrapId(u32::MAX);
        q
    }

    pub fn insert_end(&mut self, t: TrapId, end: ChainEnd, q: QubitId) {
        let chain = &mut self.chains[t.index()];
        match end {
            ChainEnd::Head => chain.insert(0, q),
            ChainEnd::Tail => chain.push(q),
        }
        self.trap_of[q.index()] = t;
    }

    /// Move `q` one hop along a junction: bring it to the exit end of its
    /// current trap, detach it, and merge it at the junction-adjacent end of
    /// the destination. Returns the implied adjacent swaps as
    /// `(trap, lower_position)` pairs, in execution order.
    pub fn apply_hop(
        &mut self,
        machine: &MachineGraph,
        q: QubitId,
        to: TrapId,
    ) -> Vec<(TrapId, usize)> {
        let from = self.trap_of(q);
        let junction = machine
            .junction_between(from, to)
            .expect("hop requires adjacent traps");
        let exit = machine.exit_end(from, junction);
        let mut swaps = Vec::new();
        let mut pos = self.position_of(q);
        match exit {
            ChainEnd::Head => {
                while pos > 0 {
                    self.swap_adjacent(from, pos - 1);
                    swaps.push((from, pos - 1));
                    pos -= 1;
                }
            }
            ChainEnd::Tail => {
                let last = self.occupancy(from) - 1;
                while pos < last {
                    self.swap_adjacent(from, pos);
                    swaps.push((from, pos));
                    pos += 1;
                }
            }
        }
        let removed = self.remove_end(from, exit);
        debug_assert_eq!(removed, q);
        let entry = machine.exit_end(to, junction);
        self.insert_end(to, entry, q);
        swaps
    }

    /// Apply a multi-hop path (first element must be `q`'s current trap).
    pub fn apply_path(&mut self, machine: &MachineGraph, q: QubitId, path: &[TrapId]) {
        debug_assert_eq!(self.trap_of(q), path[0]);
        for &next in &path[1..] {
            self.apply_hop(machine, q, next);
        }
    }
}
