//! QCCD device model: capacity-bounded traps connected by junctions.
//!
//! Traps are nodes that store ordered ion chains; junctions are edges through
//! which a single ion shuttles per transport round. The graph is immutable
//! after construction and all queries are read-only, so it can be shared
//! freely across worker threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a trap (node) in the machine graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrapId(pub u32);

/// Identifier of a junction (edge) in the machine graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JunctionId(pub u32);

/// Identifier of a circuit qubit (and of the ion carrying it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitId(pub u32);

impl TrapId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl JunctionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl QubitId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One physical end of a trap's ion chain.
///
/// `Head` is position 0, `Tail` is the last position. Each junction is
/// anchored to a fixed end of each of its two traps; an ion must be brought
/// to that end (via in-chain SWAPs) before it can shuttle through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainEnd {
    Head,
    Tail,
}

/// The named device layouts plus free-form graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyKind {
    Linear,
    Ring,
    Grid,
    Custom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trap {
    pub id: TrapId,
    pub capacity: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Junction {
    pub id: JunctionId,
    pub a: TrapId,
    pub b: TrapId,
    /// Chain end at which this junction touches trap `a`.
    pub end_a: ChainEnd,
    /// Chain end at which this junction touches trap `b`.
    pub end_b: ChainEnd,
}

impl Junction {
    pub fn other(&self, t: TrapId) -> TrapId {
        if t == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn end_at(&self, t: TrapId) -> ChainEnd {
        if t == self.a {
            self.end_a
        } else {
            self.end_b
        }
    }

    pub fn connects(&self, t: TrapId, u: TrapId) -> bool {
        (self.a == t && self.b == u) || (self.a == u && self.b == t)
    }
}

/// Maximum number of shortest paths enumerated per query. Minimal paths on
/// grids can explode combinatorially; the router only ever needs a handful of
/// alternatives.
pub const MAX_SHORTEST_PATHS: usize = 32;

/// The hardware topology: traps linked pairwise by junctions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MachineGraph {
    kind: TopologyKind,
    traps: Vec<Trap>,
    junctions: Vec<Junction>,
    /// Per trap, `(neighbor, junction)` pairs sorted by neighbor id.
    adjacency: Vec<Vec<(TrapId, JunctionId)>>,
}

impl MachineGraph {
    fn assemble(
        kind: TopologyKind,
        capacities: Vec<usize>,
        links: Vec<(u32, u32, ChainEnd, ChainEnd)>,
    ) -> Result<Self> {
        let n = capacities.len();
        if n == 0 {
            return Err(Error::InvalidArgument("machine needs at least one trap".into()));
        }
        if let Some(c) = capacities.iter().find(|&&c| c == 0) {
            let _ = c;
            return Err(Error::InvalidArgument("trap capacity must be at least 1".into()));
        }
        let traps = capacities
            .into_iter()
            .enumerate()
            .map(|(i, capacity)| Trap { id: TrapId(i as u32), capacity })
            .collect::<Vec<_>>();

        let mut junctions = Vec::with_capacity(links.len());
        let mut adjacency = vec![Vec::new(); n];
        for (i, (a, b, end_a, end_b)) in links.into_iter().enumerate() {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop junction on trap {a}")));
            }
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidArgument(format!("junction ({a},{b}) references unknown trap")));
            }
            if adjacency[a as usize].iter().any(|&(t, _)| t == TrapId(b)) {
                return Err(Error::InvalidArgument(format!("duplicate junction between traps {a} and {b}")));
            }
            let id = JunctionId(i as u32);
            junctions.push(Junction { id, a: TrapId(a), b: TrapId(b), end_a, end_b });
            adjacency[a as usize].push((TrapId(b), id));
            adjacency[b as usize].push((TrapId(a), id));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(t, _)| t);
        }

        let graph = MachineGraph { kind, traps, junctions, adjacency };
        if !graph.is_connected() {
            return Err(Error::InvalidArgument("machine graph must be connected".into()));
        }
        Ok(graph)
    }

    /// Path graph: `n_traps` traps in a row, uniform capacity.
    pub fn linear(n_traps: usize, capacity: usize) -> Result<Self> {
        if n_traps == 0 {
            return Err(Error::InvalidArgument("linear topology needs at least one trap".into()));
        }
        let links = (0..n_traps.saturating_sub(1))
            .map(|i| (i as u32, i as u32 + 1, ChainEnd::Tail, ChainEnd::Head))
            .collect();
        Self::assemble(TopologyKind::Linear, vec![capacity; n_traps], links)
    }

    /// Cycle graph: trap `i` links forward to `(i + 1) % n` through its tail.
    pub fn ring(n_traps: usize, capacity: usize) -> Result<Self> {
        if n_traps < 3 {
            return Err(Error::InvalidArgument("ring topology needs at least three traps".into()));
        }
        let links = (0..n_traps)
            .map(|i| (i as u32, ((i + 1) % n_traps) as u32, ChainEnd::Tail, ChainEnd::Head))
            .collect();
        Self::assemble(TopologyKind::Ring, vec![capacity; n_traps], links)
    }

    /// Row-major lattice with 4-neighbor junctions.
    ///
    /// Horizontal junctions anchor to the left trap's tail and the right
    /// trap's head; vertical junctions to the upper trap's tail and the lower
    /// trap's head. The assignment is arbitrary but fixed at build time so
    /// SWAP counting is deterministic.
    pub fn grid(rows: usize, cols: usize, capacity: usize) -> Result<Self> {
        if rows * cols < 2 {
            return Err(Error::InvalidArgument("grid topology needs at least two traps".into()));
        }
        let at = |r: usize, c: usize| (r * cols + c) as u32;
        let mut links = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    links.push((at(r, c), at(r, c + 1), ChainEnd::Tail, ChainEnd::Head));
                }
                if r + 1 < rows {
                    links.push((at(r, c), at(r + 1, c), ChainEnd::Tail, ChainEnd::Head));
                }
            }
        }
        Self::assemble(TopologyKind::Grid, vec![capacity; rows * cols], links)
    }

    /// Free-form topology from per-trap capacities and junction pairs.
    /// Junction ends follow the id rule: the lower-id trap exits via its
    /// tail, the higher-id trap via its head.
    pub fn custom(capacities: Vec<usize>, junction_pairs: Vec<(u32, u32)>) -> Result<Self> {
        let links = junction_pairs
            .into_iter()
            .map(|(a, b)| {
                if a <= b {
                    (a, b, ChainEnd::Tail, ChainEnd::Head)
                } else {
                    (b, a, ChainEnd::Tail, ChainEnd::Head)
                }
            })
            .collect();
        Self::assemble(TopologyKind::Custom, capacities, links)
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn num_traps(&self) -> usize {
        self.traps.len()
    }

    pub fn traps(&self) -> &[Trap] {
        &self.traps
    }

    pub fn junctions(&self) -> &[Junction] {
        &self.junctions
    }

    pub fn capacity(&self, t: TrapId) -> usize {
        self.traps[t.index()].capacity
    }

    pub fn total_capacity(&self) -> usize {
        self.traps.iter().map(|t| t.capacity).sum()
    }

    /// Neighbors of `t` with the junction leading to each, sorted by id.
    pub fn neighbors(&self, t: TrapId) -> &[(TrapId, JunctionId)] {
        &self.adjacency[t.index()]
    }

    pub fn junction(&self, j: JunctionId) -> &Junction {
        &self.junctions[j.index()]
    }

    pub fn junction_between(&self, a: TrapId, b: TrapId) -> Option<JunctionId> {
        self.adjacency[a.index()]
            .iter()
            .find(|&&(t, _)| t == b)
            .map(|&(_, j)| j)
    }

    /// Chain end of trap `t` that faces junction `j`.
    pub fn exit_end(&self, t: TrapId, j: JunctionId) -> ChainEnd {
        self.junction(j).end_at(t)
    }

    fn is_connected(&self) -> bool {
        let n = self.num_traps();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(t) = stack.pop() {
            for &(next, _) in &self.adjacency[t] {
                if !seen[next.index()] {
                    seen[next.index()] = true;
                    count += 1;
                    stack.push(next.index());
                }
            }
        }
        count == n
    }

    /// Hop distance between every pair of traps reachable from `from`.
    pub fn distances_from(&self, from: TrapId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_traps()];
        dist[from.index()] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(t) = queue.pop_front() {
            for &(next, _) in self.neighbors(t) {
                if dist[next.index()] == usize::MAX {
                    dist[next.index()] = dist[t.index()] + 1;
                    queue.push_back(next);
                }
            }
        }
        dist
    }

    /// All minimal-hop-count trap sequences from `a` to `b`, in lexicographic
    /// order by trap id sequence, capped at [`MAX_SHORTEST_PATHS`].
    ///
    /// Two calls with the same arguments return identical results.
    pub fn all_shortest_paths(&self, a: TrapId, b: TrapId) -> Vec<Vec<TrapId>> {
        if a == b {
            return vec![vec![a]];
        }
        let dist_to_b = self.distances_from(b);
        let mut paths = Vec::new();
        let mut current = vec![a];
        self.enumerate_paths(b, &dist_to_b, &mut current, &mut paths);
        paths
    }

    fn enumerate_paths(
        &self,
        target: TrapId,
        dist_to_target: &[usize],
        current: &mut Vec<TrapId>,
        out: &mut Vec<Vec<TrapId>>,
    ) {
        if out.len() >= MAX_SHORTEST_PATHS {
            return;
        }
        let last = *current.last().expect("path never empty");
        if last == target {
            out.push(current.clone());
            return;
        }
        let d = dist_to_target[last.index()];
        // Neighbors are sorted by id, so depth-first descent yields paths in
        // lexicographic order.
        for &(next, _) in self.neighbors(last) {
            if dist_to_target[next.index()] + 1 == d {
                current.push(next);
                self.enumerate_paths(target, dist_to_target, current, out);
                current.pop();
                if out.len() >= MAX_SHORTEST_PATHS {
                    return;
                }
            }
        }
    }
}
