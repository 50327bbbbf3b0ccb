//! Uniform spanning converging forests.
//!
//! A spanning converging forest keeps at most one out-arc per node and no
//! directed cycle; each tree drains into a root with no out-arc. Adding a
//! virtual sink `Delta` linked to every node turns such forests into spanning
//! trees of the augmented graph rooted at `Delta`, so Wilson's loop-erased
//! random walk samples them uniformly. `Delta` is never built: a walk at `u`
//! is absorbed (making `u` a root) with probability `1 / (1 + d_u)`, which is
//! exactly the chance of stepping to `Delta`.
//!
//! For every pair `(i, j)` the fraction of forests in which `i` drains into
//! root `j` equals `omega_ij = [(I + L)^{-1}]_ij`. [`enumerate_forests`] lists
//! all forests of tiny graphs so this can be checked exhaustively.
//!
//! [`ForestSampler`] draws one forest at a time. [`BatchSampler`] runs several
//! independent draws in lockstep over a cache-friendly [`WalkGraph`] layout;
//! on graphs larger than the cache this hides most of the memory latency of
//! the random walk, and each lane still yields the exact forest the
//! sequential sampler would for the same stream.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Digraph;

/// Total random-walk steps allowed for one forest before giving up.
pub const STEP_LIMIT: u64 = 10_000_000_000;

const NONE: u32 = u32::MAX;

/// Identifies the random stream of one sample: `(base_seed, stream_index)`
/// always reproduces the same forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub base_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(base_seed: u64, stream_index: u64) -> Self {
        Self {
            base_seed,
            stream_index,
        }
    }

    /// A ChaCha8 generator keyed by `base_seed` on stream `stream_index`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Root of the converging tree containing each node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootIndex(Vec<u32>);

impl RootIndex {
    pub fn from_roots(roots: Vec<usize>) -> Result<Self> {
        let n = roots.len();
        if let Some(&bad) = roots.iter().find(|&&r| r >= n) {
            return Err(Error::InvalidParameter(format!("root {bad} out of range")));
        }
        Ok(Self(roots.into_iter().map(|r| r as u32).collect()))
    }

    #[inline]
    pub fn root(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().map(|&r| r as usize).collect()
    }

    /// Roots are fixed points of the map.
    pub fn is_idempotent(&self) -> bool {
        self.0.iter().all(|&r| self.0[r as usize] == r)
    }
}

/// `|M(phi, i)|`: how many nodes drain into each node (zero for non-roots).
pub fn root_multiplicities(r: &RootIndex) -> Vec<usize> {
    let mut counts = vec![0usize; r.len()];
    for &root in r.as_slice() {
        counts[root as usize] += 1;
    }
    counts
}

/// Uniform draw from the successors of `u`.
///
/// Consumes exactly one `u64` from `rng`; the index is the high word of
/// `x * d_u`, which is uniform up to a bias below `d_u / 2^64`.
///
/// # Panics
///
/// If `u` has no successors.
#[inline]
pub fn random_successor<R: RngCore + ?Sized>(g: &Digraph, u: usize, rng: &mut R) -> usize {
    let nbrs = g.out_neighbors(u);
    assert!(!nbrs.is_empty(), "random_successor called on sink node {u}");
    let idx = ((rng.next_u64() as u128 * nbrs.len() as u128) >> 64) as usize;
    nbrs[idx] as usize
}

/// Per-node walk state packed into one 16-byte record, so a walk step
/// touches one cache line for the node plus one for its successor list.
/// `root == NONE` means the node is not yet in the forest.
#[derive(Debug, Clone, Copy)]
#[repr(C, align(16))]
struct Slot {
    start: u32,
    degree: u32,
    next: u32,
    root: u32,
}

/// Reusable buffers for sampling forests of one graph size.
#[derive(Debug, Clone)]
pub struct ForestSampler {
    slots: Vec<Slot>,
    root: Vec<u32>,
    step_limit: u64,
    last_steps: u64,
}

impl ForestSampler {
    pub fn new(n: usize) -> Self {
        Self {
            slots: Vec::new(),
            root: vec![0; n],
            step_limit: STEP_LIMIT,
            last_steps: 0,
        }
    }

    pub fn with_step_limit(mut self, limit: u64) -> Self {
        self.step_limit = limit;
        self
    }

    /// Random-walk steps (absorption draws) used by the most recent sample.
    pub fn last_steps(&self) -> u64 {
        self.last_steps
    }

    /// Samples one forest and returns its root map.
    ///
    /// Walks start from every node in ascending id order. Each step draws one
    /// uniform `[0, 1)` value for absorption and, if not absorbed, one more
    /// for the successor. Revisiting a node overwrites its `next` pointer,
    /// which erases the loop; the surviving branch is then stamped with the
    /// root the walk ran into.
    pub fn sample<R: RngCore + ?Sized>(&mut self, g: &Digraph, rng: &mut R) -> Result<&[u32]> {
        let n = g.n();
        let offsets = g.offsets();
        let targets = g.targets();
        self.slots.clear();
        if self.slots.capacity() < n {
            self.slots = Vec::with_capacity(n);
            crate::mem::advise_huge_pages(&self.slots);
        }
        self.slots.extend((0..n).map(|i| Slot {
            start: offsets[i] as u32,
            degree: (offsets[i + 1] - offsets[i]) as u32,
            next: NONE,
            root: NONE,
        }));
        self.root.resize(n, 0);
        let slots = &mut self.slots[..];

        let mut steps: u64 = 0;
        for i in 0..n {
            let mut u = i;
            loop {
                let slot = &mut slots[u];
                if slot.root != NONE {
                    break;
                }
                steps += 1;
                if steps > self.step_limit {
                    self.last_steps = steps;
                    return Err(Error::StepLimit {
                        limit: self.step_limit,
                    });
                }
                let d = slot.degree;
                let draw: f64 = rng.random();
                if draw <= 1.0 / (1 + d) as f64 {
                    slot.root = u as u32;
                    slot.next = NONE;
                } else {
                    // Same draw as `random_successor`.
                    let idx = ((rng.next_u64() as u128 * d as u128) >> 64) as usize;
                    let v = targets[slot.start as usize + idx];
                    slot.next = v;
                    u = v as usize;
                }
            }
            let root_now = slots[u].root;
            let mut u = i;
            while slots[u].root == NONE {
                slots[u].root = root_now;
                u = slots[u].next as usize;
            }
        }
        for (r, slot) in self.root.iter_mut().zip(slots.iter()) {
            *r = slot.root;
        }
        self.last_steps = steps;
        Ok(&self.root)
    }

    /// Successor of each node in the last sampled forest (`None` for roots).
    pub fn next_pointers(&self) -> Vec<Option<usize>> {
        self.slots
            .iter()
            .map(|s| (s.next != NONE).then_some(s.next as usize))
            .collect()
    }

    /// CSV `node,root,next` for the last sampled forest; roots have an empty `next`.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from("node,root,next\n");
        for (i, (&r, nx)) in self.root.iter().zip(self.slots.iter().map(|s| s.next)).enumerate() {
            if nx == NONE {
                writeln!(out, "{i},{r},").unwrap();
            } else {
                writeln!(out, "{i},{r},{nx}").unwrap();
            }
        }
        out
    }
}

/// Independent samples interleaved by [`BatchSampler`].
pub const DEFAULT_LANES: usize = 8;

const INLINE: usize = 6;

#[inline(always)]
fn prefetch<T>(p: *const T) {
    #[cfg(target_arch = "x86_64")]
    // SAFETY: prefetching is a hint and never faults, even on bad addresses.
    unsafe {
        std::arch::x86_64::_mm_prefetch::<{ std::arch::x86_64::_MM_HINT_T0 }>(p as *const i8);
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = p;
}

/// Degree and first successors of a node in one aligned 32-byte line.
#[derive(Debug, Clone, Copy)]
#[repr(C, align(32))]
struct AdjLine {
    degree: u32,
    start: u32,
    inline: [u32; INLINE],
}

/// Read-only walk layout of a graph, shared by every lane and thread.
///
/// A walk step needs the degree and one successor of the current node; with
/// up to six successors stored inline that is a single cache line, fetched
/// in parallel with the lane's own state for the node.
#[derive(Debug, Clone)]
pub struct WalkGraph<'g> {
    graph: &'g Digraph,
    lines: Vec<AdjLine>,
}

impl<'g> WalkGraph<'g> {
    pub fn new(graph: &'g Digraph) -> Self {
        let mut lines = Vec::with_capacity(graph.n());
        crate::mem::advise_huge_pages(&lines);
        let offsets = graph.offsets();
        lines.extend((0..graph.n()).map(|u| {
            let nbrs = graph.out_neighbors(u);
            let mut inline = [NONE; INLINE];
            let k = nbrs.len().min(INLINE);
            inline[..k].copy_from_slice(&nbrs[..k]);
            AdjLine {
                degree: nbrs.len() as u32,
                start: offsets[u] as u32,
                inline,
            }
        }));
        Self { graph, lines }
    }

    pub fn graph(&self) -> &'g Digraph {
        self.graph
    }

    #[inline(always)]
    fn prefetch(&self, u: usize) {
        prefetch(&self.lines[u]);
    }
}

/// Per-lane walk state of one node; `root == NONE` means not yet in the forest.
#[derive(Debug, Clone, Copy)]
#[repr(C, align(8))]
struct NodeState {
    next: u32,
    root: u32,
}

const FRESH: NodeState = NodeState {
    next: NONE,
    root: NONE,
};

#[derive(Debug, Clone, Default)]
struct Lane {
    state: Vec<NodeState>,
    roots: Vec<u32>,
    start: usize,
    u: usize,
    steps: u64,
}

impl Lane {
    fn reset(&mut self, n: usize) {
        self.state.clear();
        if self.state.capacity() < n {
            self.state = Vec::with_capacity(n);
            crate::mem::advise_huge_pages(&self.state);
        }
        self.state.resize(n, FRESH);
        self.start = 0;
        self.u = 0;
        self.steps = 0;
    }

    /// Stamps the current path with `root` and moves to the next start node
    /// not yet in the forest. Returns `false` when every node is placed.
    #[inline(always)]
    fn finish_walk(&mut self, root: u32, wg: &WalkGraph<'_>) -> bool {
        let state = &mut self.state[..];
        let mut w = self.start;
        while state[w].root == NONE {
            state[w].root = root;
            w = state[w].next as usize;
        }
        let n = state.len();
        let mut i = self.start + 1;
        while i < n && state[i].root != NONE {
            i += 1;
        }
        self.start = i;
        self.u = i;
        if i < n {
            wg.prefetch(i);
            true
        } else {
            false
        }
    }

    /// One walk step (or walk completion). Returns `false` once the forest
    /// is done or the step limit is exceeded (`steps > limit`).
    #[inline(always)]
    fn advance<R: RngCore>(&mut self, wg: &WalkGraph<'_>, rng: &mut R, limit: u64) -> bool {
        let u = self.u;
        let root = self.state[u].root;
        if root != NONE {
            return self.finish_walk(root, wg);
        }
        self.steps += 1;
        if self.steps > limit {
            return false;
        }
        let line = &wg.lines[u];
        let d = line.degree;
        let draw: f64 = rng.random();
        if draw <= 1.0 / (1 + d) as f64 {
            self.state[u] = NodeState {
                next: NONE,
                root: u as u32,
            };
            return self.finish_walk(u as u32, wg);
        }
        let idx = ((rng.next_u64() as u128 * d as u128) >> 64) as usize;
        let v = if idx < INLINE {
            line.inline[idx]
        } else {
            wg.graph.targets()[line.start as usize + idx]
        };
        self.state[u].next = v;
        self.u = v as usize;
        prefetch(&self.state[self.u]);
        wg.prefetch(self.u);
        true
    }
}

/// Samples several forests of one graph at once.
///
/// Each lane runs the same walk as [`ForestSampler::sample`] with its own
/// generator, so lane `j` yields exactly the forest the sequential sampler
/// would produce from `rngs[j]`. Steps of different lanes are interleaved
/// with prefetches, which hides memory latency on graphs too large for the
/// cache.
#[derive(Debug, Clone)]
pub struct BatchSampler {
    lanes: Vec<Lane>,
    used: usize,
    step_limit: u64,
}

impl BatchSampler {
    pub fn new(lanes: usize) -> Self {
        Self {
            lanes: vec![Lane::default(); lanes.max(1)],
            used: 0,
            step_limit: STEP_LIMIT,
        }
    }

    pub fn with_step_limit(mut self, limit: u64) -> Self {
        self.step_limit = limit;
        self
    }

    pub fn lanes(&self) -> usize {
        self.lanes.len()
    }

    /// Samples one forest per generator; at most [`BatchSampler::lanes`] at a time.
    pub fn sample<R: RngCore>(&mut self, wg: &WalkGraph<'_>, rngs: &mut [R]) -> Result<()> {
        assert!(
            rngs.len() <= self.lanes.len(),
            "{} generators for {} lanes",
            rngs.len(),
            self.lanes.len()
        );
        let n = wg.graph.n();
        let used = rngs.len();
        self.used = used;
        let lanes = &mut self.lanes[..used];
        for lane in lanes.iter_mut() {
            lane.reset(n);
        }
        let limit = self.step_limit;
        let mut active: Vec<usize> = if n == 0 { Vec::new() } else { (0..used).collect() };
        while !active.is_empty() {
            let mut j = 0;
            while j < active.len() {
                let l = active[j];
                if lanes[l].advance(wg, &mut rngs[l], limit) {
                    j += 1;
                } else {
                    if lanes[l].steps > limit {
                        return Err(Error::StepLimit { limit });
                    }
                    active.swap_remove(j);
                }
            }
        }
        for lane in lanes.iter_mut() {
            lane.roots.clear();
            lane.roots.extend(lane.state.iter().map(|s| s.root));
        }
        Ok(())
    }

    /// Root map of lane `j` from the last call to [`BatchSampler::sample`].
    pub fn roots(&self, j: usize) -> &[u32] {
        assert!(j < self.used, "lane {j} was not sampled");
        &self.lanes[j].roots
    }

    /// Walk steps of lane `j` in the last batch.
    pub fn steps(&self, j: usize) -> u64 {
        assert!(j < self.used, "lane {j} was not sampled");
        self.lanes[j].steps
    }
}

/// One uniformly random spanning converging forest of `g`, as a root map.
pub fn random_forest(g: &Digraph, stream: RngStream) -> Result<RootIndex> {
    let mut sampler = ForestSampler::new(g.n());
    let mut rng = stream.rng();
    let roots = sampler.sample(g, &mut rng)?;
    Ok(RootIndex(roots.to_vec()))
}

/// Checks that `next` describes a spanning converging forest of `g` whose
/// root map is `roots`.
pub fn is_converging_forest(g: &Digraph, next: &[Option<usize>], roots: &[usize]) -> bool {
    let n = g.n();
    if next.len() != n || roots.len() != n {
        return false;
    }
    for i in 0..n {
        if let Some(j) = next[i] {
            if !g.has_arc(i, j) {
                return false;
            }
        }
        // Follow at most n arcs; a longer chain means a cycle.
        let mut u = i;
        let mut hops = 0;
        while let Some(v) = next[u] {
            u = v;
            hops += 1;
            if hops > n {
                return false;
            }
        }
        if roots[i] != u {
            return false;
        }
    }
    true
}

pub const ENUMERATION_MAX_NODES: usize = 12;
pub const ENUMERATION_BUDGET: usize = 1_000_000;

const NO_ARC: u8 = u8::MAX;

/// One explicit forest: `next[i]` is the arc kept at `i`, if any.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Forest {
    next: Box<[u8]>,
    roots: Box<[u8]>,
}

impl Forest {
    pub fn next(&self, i: usize) -> Option<usize> {
        (self.next[i] != NO_ARC).then_some(self.next[i] as usize)
    }

    pub fn root(&self, i: usize) -> usize {
        self.roots[i] as usize
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.next.len())
            .filter_map(|i| self.next(i).map(|j| (i, j)))
            .collect()
    }

    pub fn root_index(&self) -> RootIndex {
        RootIndex(self.roots.iter().map(|&r| r as u32).collect())
    }
}

/// Every spanning converging forest of a small digraph.
#[derive(Debug, Clone)]
pub struct ForestEnumeration {
    n: usize,
    forests: Vec<Forest>,
}

impl ForestEnumeration {
    /// `|F|`.
    pub fn count(&self) -> usize {
        self.forests.len()
    }

    pub fn forests(&self) -> &[Forest] {
        &self.forests
    }

    /// `|F_ij|`: forests in which `i` drains into root `j`, row-major.
    pub fn root_counts(&self) -> Vec<Vec<u64>> {
        let mut counts = vec![vec![0u64; self.n]; self.n];
        for f in &self.forests {
            for (i, row) in counts.iter_mut().enumerate() {
                row[f.root(i)] += 1;
            }
        }
        counts
    }

    /// `omega_ij = |F_ij| / |F|`.
    pub fn omega(&self) -> Vec<Vec<f64>> {
        let total = self.count() as f64;
        self.root_counts()
            .into_iter()
            .map(|row| row.into_iter().map(|c| c as f64 / total).collect())
            .collect()
    }

    /// `rho_j = (1 / n) sum_i |F_ij| / |F|`.
    pub fn rho(&self) -> Vec<f64> {
        let counts = self.root_counts();
        let denom = (self.n * self.count()) as f64;
        (0..self.n)
            .map(|j| counts.iter().map(|row| row[j]).sum::<u64>() as f64 / denom)
            .collect()
    }

    /// Number of forests producing each distinct root map.
    pub fn root_map_distribution(&self) -> HashMap<RootIndex, u64> {
        let mut dist = HashMap::new();
        for f in &self.forests {
            *dist.entry(f.root_index()).or_insert(0) += 1;
        }
        dist
    }

    /// `sum_i omega_ii (1 + d_i)`, the expected number of walk steps per sample.
    pub fn expected_walk_steps(&self, g: &Digraph) -> f64 {
        let omega = self.omega();
        (0..self.n)
            .map(|i| omega[i][i] * (1 + g.out_degree(i)) as f64)
            .sum()
    }
}

/// Lists all spanning converging forests of `g` by backtracking.
///
/// Nodes are assigned in id order either no out-arc or one out-arc whose
/// chain through already-assigned nodes does not return to the node itself.
/// Every acyclic partial assignment extends to at least one forest, so the
/// search visits at most `n * |F|` partial states.
pub fn enumerate_forests(g: &Digraph) -> Result<ForestEnumeration> {
    enumerate_forests_with_budget(g, ENUMERATION_BUDGET)
}

pub fn enumerate_forests_with_budget(g: &Digraph, budget: usize) -> Result<ForestEnumeration> {
    let n = g.n();
    if n > ENUMERATION_MAX_NODES {
        return Err(Error::BudgetExceeded(format!(
            "enumeration supports n <= {ENUMERATION_MAX_NODES}, got {n}"
        )));
    }
    let mut next = vec![NO_ARC; n];
    let mut forests = Vec::new();
    extend(g, 0, &mut next, &mut forests, budget)?;
    Ok(ForestEnumeration { n, forests })
}

fn extend(
    g: &Digraph,
    i: usize,
    next: &mut [u8],
    out: &mut Vec<Forest>,
    budget: usize,
) -> Result<()> {
    let n = next.len();
    if i == n {
        if out.len() >= budget {
            return Err(Error::BudgetExceeded(format!(
                "more than {budget} spanning converging forests"
            )));
        }
        let roots = (0..n)
            .map(|mut u| {
                while next[u] != NO_ARC {
                    u = next[u] as usize;
                }
                u as u8
            })
            .collect();
        out.push(Forest {
            next: next.into(),
            roots,
        });
        return Ok(());
    }
    next[i] = NO_ARC;
    extend(g, i + 1, next, out, budget)?;
    for &j in g.out_neighbors(i) {
        let mut u = j as usize;
        while u != i && u < i && next[u] != NO_ARC {
            u = next[u] as usize;
        }
        if u == i {
            continue;
        }
        next[i] = j as u8;
        extend(g, i + 1, next, out, budget)?;
    }
    next[i] = NO_ARC;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc01() -> Digraph {
        Digraph::from_arcs(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn isolated_nodes_are_their_own_roots() {
        for seed in 0..20 {
            let r = random_forest(&Digraph::empty(1), RngStream::new(seed, 0)).unwrap();
            assert_eq!(r.to_vec(), vec![0]);
            let r = random_forest(&Digraph::empty(2), RngStream::new(seed, 3)).unwrap();
            assert_eq!(r.to_vec(), vec![0, 1]);
        }
    }

    #[test]
    fn same_stream_same_forest() {
        let g = Digraph::from_arcs(5, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 3), (2, 3)]).unwrap();
        for idx in 0..10 {
            let a = random_forest(&g, RngStream::new(42, idx)).unwrap();
            let b = random_forest(&g, RngStream::new(42, idx)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sampled_forests_are_valid() {
        let g = Digraph::from_arcs(
            6,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (1, 4)],
        )
        .unwrap();
        let mut sampler = ForestSampler::new(g.n());
        for idx in 0..200 {
            let mut rng = RngStream::new(7, idx).rng();
            let roots: Vec<usize> = sampler
                .sample(&g, &mut rng)
                .unwrap()
                .iter()
                .map(|&r| r as usize)
                .collect();
            let next = sampler.next_pointers();
            assert!(is_converging_forest(&g, &next, &roots));
            let ri = RootIndex::from_roots(roots).unwrap();
            assert!(ri.is_idempotent());
            for i in 0..g.n() {
                if ri.root(i) == i {
                    assert_eq!(next[i], None);
                }
            }
        }
    }

    #[test]
    fn step_limit_trips() {
        let g = Digraph::from_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        let mut sampler = ForestSampler::new(2).with_step_limit(0);
        let mut rng = RngStream::new(1, 0).rng();
        assert!(matches!(
            sampler.sample(&g, &mut rng),
            Err(Error::StepLimit { limit: 0 })
        ));
    }

    #[test]
    fn batch_step_limit_trips() {
        let g = Digraph::from_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        let wg = WalkGraph::new(&g);
        let mut sampler = BatchSampler::new(2).with_step_limit(0);
        let mut rngs = vec![RngStream::new(1, 0).rng()];
        assert!(matches!(
            sampler.sample(&wg, &mut rngs),
            Err(Error::StepLimit { limit: 0 })
        ));
    }

    #[test]
    fn batch_lanes_match_sequential_sampler() {
        // Node 0 links to everyone, so its successor list overflows the inline slots.
        let n = 40;
        let mut arcs: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
        arcs.extend((1..n).map(|u| (u, (u * 7 + 3) % n)).filter(|&(u, v)| u != v));
        arcs.extend((1..n).step_by(3).map(|u| (u, 0)));
        let g = Digraph::from_arcs(n, &arcs).unwrap();
        let wg = WalkGraph::new(&g);
        let mut batch = BatchSampler::new(5);
        let mut seq = ForestSampler::new(n);
        for first in [0u64, 5, 10] {
            let mut rngs: Vec<_> = (first..first + 5).map(|i| RngStream::new(9, i).rng()).collect();
            batch.sample(&wg, &mut rngs[..(first as usize / 5 + 3)]).unwrap();
            for j in 0..(first as usize / 5 + 3) {
                let mut rng = RngStream::new(9, first + j as u64).rng();
                assert_eq!(batch.roots(j), seq.sample(&g, &mut rng).unwrap());
                assert_eq!(batch.steps(j), seq.last_steps());
            }
        }
        let empty = Digraph::empty(0);
        let mut rngs = vec![RngStream::new(0, 0).rng()];
        batch.sample(&WalkGraph::new(&empty), &mut rngs).unwrap();
        assert!(batch.roots(0).is_empty());
    }

    #[test]
    fn successor_examples() {
        let g = Digraph::from_arcs(4, &[(0, 3), (1, 2)]).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        for _ in 0..50 {
            assert_eq!(random_successor(&g, 0, &mut rng), 3);
        }
        let mut a = RngStream::new(9, 1).rng();
        let mut b = RngStream::new(9, 1).rng();
        let star = Digraph::from_arcs(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        for _ in 0..50 {
            assert_eq!(random_successor(&star, 0, &mut a), random_successor(&star, 0, &mut b));
        }
    }

    #[test]
    #[should_panic(expected = "sink node")]
    fn successor_of_sink_panics() {
        let g = Digraph::empty(1);
        random_successor(&g, 0, &mut RngStream::new(0, 0).rng());
    }

    #[test]
    fn multiplicities() {
        let r = RootIndex::from_roots(vec![0, 1]).unwrap();
        assert_eq!(root_multiplicities(&r), vec![1, 1]);
        let r = RootIndex::from_roots(vec![1, 1]).unwrap();
        assert_eq!(root_multiplicities(&r), vec![0, 2]);
        assert!(RootIndex::from_roots(vec![0, 2]).is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_forests(&Digraph::empty(1)).unwrap().count(), 1);

        let e = enumerate_forests(&arc01()).unwrap();
        assert_eq!(e.count(), 2);
        let counts = e.root_counts();
        // F_00 = {empty}, F_01 = {arc kept}, F_11 = both.
        assert_eq!(counts, vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(e.rho(), vec![0.25, 0.75]);

        let cycle = Digraph::from_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        let e = enumerate_forests(&cycle).unwrap();
        assert_eq!(e.count(), 3);
        let mut arc_sets: Vec<_> = e.forests().iter().map(Forest::arcs).collect();
        arc_sets.sort();
        assert_eq!(arc_sets, vec![vec![], vec![(0, 1)], vec![(1, 0)]]);
        assert_eq!(e.root_counts(), vec![vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn enumeration_budget() {
        // Complete digraph on 3 nodes has more than 4 forests.
        let arcs: Vec<_> = (0..3)
            .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let g = Digraph::from_arcs(3, &arcs).unwrap();
        assert!(matches!(
            enumerate_forests_with_budget(&g, 4),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(enumerate_forests(&Digraph::empty(13)).is_err());
        // det(I + L) = det(4I - J) = 16 for the complete digraph on 3 nodes.
        assert_eq!(enumerate_forests(&g).unwrap().count(), 16);
    }

    #[test]
    fn dump_csv_format() {
        let g = arc01();
        let mut sampler = ForestSampler::new(2);
        let mut rng = RngStream::new(0, 0).rng();
        sampler.sample(&g, &mut rng).unwrap();
        let csv = sampler.dump_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "node,root,next");
        assert!(lines[2] == "1,1,");
        assert!(lines[1] == "0,0," || lines[1] == "0,1,1");
    }
}
