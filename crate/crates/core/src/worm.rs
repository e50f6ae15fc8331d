//! Worm sampler for the even-subgraph Gibbs measure.
//!
//! The target is `mu_even(A) ∝ e^{-beta |A|}` over edge sets `A` in which
//! every vertex has even degree. The chain walks an extended space of
//! states `(A, head, tail)` whose odd-degree vertex set is exactly
//! `{head} Δ {tail}`: defect-free states carry `head == tail` (a marked
//! vertex), two-defect states carry the defects as the ordered pair.
//!
//! One step flips a fair coin. "Move" picks head or tail uniformly, picks a
//! uniform incident edge at that endpoint, and toggles it with Metropolis
//! acceptance `min(1, e^{-beta * delta} * deg(p)/deg(u))`, walking the
//! endpoint across the edge; the degree factor balances the non-uniform
//! proposal. "Relocate" teleports a defect-free marker to a uniform vertex
//! and is a no-op otherwise. The extended stationary measure assigns every
//! valid tagged state weight `e^{-beta |A|}`, so the defect-free marginal
//! is exactly `mu_even`; the kernel enumerator below verifies stationarity
//! and reversibility numerically on small graphs.

use std::collections::HashMap;

use rand::Rng;

use crate::code::Code;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

// ============================================================================
// Graphs
// ============================================================================

/// A finite multigraph with indexed edges (no self-loops).
#[derive(Clone, Debug)]
pub struct WormGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
    /// Per vertex: (edge id, other endpoint).
    incident: Vec<Vec<(usize, usize)>>,
}

impl WormGraph {
    #[must_use]
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut incident = vec![Vec::new(); num_vertices];
        for (id, &(a, b)) in edges.iter().enumerate() {
            assert!(a < num_vertices && b < num_vertices, "edge endpoint range");
            assert_ne!(a, b, "self-loops are not supported");
            incident[a].push((id, b));
            incident[b].push((id, a));
        }
        WormGraph {
            num_vertices,
            edges,
            incident,
        }
    }

    /// Cycle graph on `n >= 3` vertices.
    #[must_use]
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        WormGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    /// Complete graph on `n` vertices.
    #[must_use]
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        WormGraph::new(n, edges)
    }

    /// Square-lattice torus graph of the given side (`side >= 3`).
    #[must_use]
    pub fn torus_grid(side: usize) -> Self {
        assert!(side >= 3, "torus side must be at least 3");
        let vid = |x: usize, y: usize| (x % side) * side + (y % side);
        let mut edges = Vec::new();
        for x in 0..side {
            for y in 0..side {
                edges.push((vid(x, y), vid(x + 1, y)));
                edges.push((vid(x, y), vid(x, y + 1)));
            }
        }
        WormGraph::new(side * side, edges)
    }

    #[inline]
    #[must_use]
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    #[inline]
    #[must_use]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    #[must_use]
    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.edges[edge]
    }

    #[inline]
    #[must_use]
    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    #[inline]
    #[must_use]
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.incident[v]
    }

    /// Vertices with odd degree in the spanned subgraph.
    #[must_use]
    pub fn odd_vertices(&self, edges: &BitVector) -> Vec<usize> {
        assert_eq!(edges.len(), self.edges.len(), "edge-set length mismatch");
        let mut parity = vec![false; self.num_vertices];
        for e in edges.iter_ones() {
            let (a, b) = self.edges[e];
            parity[a] = !parity[a];
            parity[b] = !parity[b];
        }
        (0..self.num_vertices).filter(|&v| parity[v]).collect()
    }

    /// Fundamental-cycle basis from a spanning forest (per component), in
    /// non-tree-edge index order. The basis size is `E - V + components`.
    #[must_use]
    pub fn cycle_space_basis(&self) -> Vec<BitVector> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.num_vertices];
        let mut seen = vec![false; self.num_vertices];
        let mut tree_edge = vec![false; self.edges.len()];
        for root in 0..self.num_vertices {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(e, u) in &self.incident[v] {
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Some((v, e));
                        tree_edge[e] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        let path_to_root = |mut v: usize, acc: &mut BitVector| {
            while let Some((p, e)) = parent[v] {
                acc.toggle(e);
                v = p;
            }
        };
        let mut basis = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if tree_edge[e] {
                continue;
            }
            let mut cycle = BitVector::zeros(self.edges.len());
            cycle.set(e, true);
            path_to_root(a, &mut cycle);
            path_to_root(b, &mut cycle);
            debug_assert!(self.odd_vertices(&cycle).is_empty(), "fundamental cycle parity");
            basis.push(cycle);
        }
        basis
    }
}

// ============================================================================
// Worm chain
// ============================================================================

/// Extended worm state; `head == tail` marks the defect-free stratum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WormState {
    pub edges: BitVector,
    pub head: usize,
    pub tail: usize,
}

impl WormState {
    /// Empty subgraph with the marker parked at `start`.
    #[must_use]
    pub fn empty(graph: &WormGraph, start: usize) -> Self {
        assert!(start < graph.num_vertices(), "start vertex range");
        WormState {
            edges: BitVector::zeros(graph.num_edges()),
            head: start,
            tail: start,
        }
    }

    #[inline]
    #[must_use]
    pub fn is_defect_free(&self) -> bool {
        self.head == self.tail
    }
}

/// One step of the worm kernel. See the module docs for the kernel and its
/// stationary measure.
pub fn worm_step<R: Rng + ?Sized>(
    graph: &WormGraph,
    state: &mut WormState,
    beta: f64,
    rng: &mut R,
) {
    if rng.random::<bool>() {
        // Move branch: walk one endpoint across an incident edge.
        let move_head = rng.random::<bool>();
        let p = if move_head { state.head } else { state.tail };
        let deg_p = graph.degree(p);
        if deg_p == 0 {
            return;
        }
        let (edge, u) = graph.incident(p)[rng.random_range(0..deg_p)];
        let delta = if state.edges.get(edge) { -1.0 } else { 1.0 };
        let ratio = (-beta * delta).exp() * deg_p as f64 / graph.degree(u) as f64;
        if ratio >= 1.0 || rng.random::<f64>() < ratio {
            state.edges.toggle(edge);
            if move_head {
                state.head = u;
            } else {
                state.tail = u;
            }
        }
    } else {
        // Relocate branch: teleport a defect-free marker.
        if state.is_defect_free() {
            let v = rng.random_range(0..graph.num_vertices());
            state.head = v;
            state.tail = v;
        }
    }
}

/// Sampler schedule. Defaults are conservative for desk-size graphs and are
/// meant to be overridden (and recorded) by experiment configs.
#[derive(Clone, Copy, Debug)]
pub struct WormConfig {
    /// Steps discarded before the first sample.
    pub burn_in: usize,
    /// Defect-free visits skipped between recorded samples.
    pub thinning: usize,
    /// Hard cap on total steps; exceeding it is a sampler failure.
    pub max_steps: u64,
}

impl WormConfig {
    /// Conservative defaults scaled to the graph size.
    #[must_use]
    pub fn for_graph(graph: &WormGraph) -> Self {
        let e = graph.num_edges().max(1);
        let v = graph.num_vertices().max(1);
        WormConfig {
            burn_in: 200 * e * v,
            thinning: 4 * e,
            max_steps: u64::MAX,
        }
    }
}

/// Draws `count` even subgraphs from the worm chain: burn-in, then one
/// sample per `thinning`-th defect-free visit.
pub fn sample_even_subgraphs<R: Rng + ?Sized>(
    graph: &WormGraph,
    beta: f64,
    cfg: &WormConfig,
    count: usize,
    rng: &mut R,
) -> Result<Vec<BitVector>> {
    sample_filtered(graph, beta, cfg, count, rng, |_| true)
}

/// Shared sampling engine: burn-in, then record every `thinning`-th
/// defect-free visit, keeping only samples that pass `keep`. Rejecting at
/// the recording stage conditions the sampled law on the kept set without
/// disturbing the chain.
fn sample_filtered<R: Rng + ?Sized>(
    graph: &WormGraph,
    beta: f64,
    cfg: &WormConfig,
    count: usize,
    rng: &mut R,
    mut keep: impl FnMut(&BitVector) -> bool,
) -> Result<Vec<BitVector>> {
    if graph.num_vertices() == 0 {
        return Ok(vec![BitVector::zeros(0); count]);
    }
    let mut state = WormState::empty(graph, 0);
    let mut steps: u64 = 0;
    let budget = |steps: &mut u64| -> Result<()> {
        *steps += 1;
        if *steps > cfg.max_steps {
            return Err(Error::SamplerFailure(format!(
                "worm exceeded max_steps = {} before collecting all samples",
                cfg.max_steps
            )));
        }
        Ok(())
    };
    for _ in 0..cfg.burn_in {
        budget(&mut steps)?;
        worm_step(graph, &mut state, beta, rng);
    }
    let mut out = Vec::with_capacity(count);
    let mut until_sample = cfg.thinning.max(1);
    while out.len() < count {
        budget(&mut steps)?;
        worm_step(graph, &mut state, beta, rng);
        if state.is_defect_free() {
            until_sample -= 1;
            if until_sample == 0 {
                until_sample = cfg.thinning.max(1);
                if keep(&state.edges) {
                    out.push(state.edges.clone());
                }
            }
        }
    }
    Ok(out)
}

// ============================================================================
// Exact even-subgraph distribution
// ============================================================================

/// Exact `mu_even` over all even subgraphs, enumerated through the cycle
/// space in a fixed reflected-Gray order. Guarded by cycle-space dimension.
pub fn exact_even_distribution(graph: &WormGraph, beta: f64) -> Result<Vec<(BitVector, f64)>> {
    const MAX_DIM: usize = 22;
    let basis = graph.cycle_space_basis();
    if basis.len() > MAX_DIM {
        return Err(Error::SizeGuard {
            what: "cycle-space dimension",
            actual: basis.len(),
            limit: MAX_DIM,
        });
    }
    let mut states = Vec::with_capacity(1usize << basis.len());
    let mut cur = BitVector::zeros(graph.num_edges());
    states.push(cur.clone());
    for k in 1..(1u64 << basis.len()) {
        cur.xor_assign(&basis[k.trailing_zeros() as usize]);
        states.push(cur.clone());
    }
    // Weights e^{-beta entries} are at most 1 and the empty subgraph
    // contributes exactly 1, so direct summation is stable.
    let weights: Vec<f64> = states
        .iter()
        .map(|a| (-beta * a.weight() as f64).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(states
        .into_iter()
        .zip(weights)
        .map(|(a, w)| (a, w / z))
        .collect())
}

// ============================================================================
// Block graphs
// ============================================================================

/// A block interior rendered as a graph: edges are the interior checks,
/// vertices the metachecks containing them.
///
/// Valid syndromes supported on the interior are always even subgraphs of
/// this graph. The converse can fail when the interior is wide enough to
/// wrap the underlying torus: the cycle space then picks up loops that are
/// metacheck-closed but not produced by any error. `exact` reports whether
/// the two spaces coincide; when it is false, samplers must filter even
/// subgraphs through syndrome validity (see
/// [`sample_valid_block_syndromes`]).
#[derive(Clone, Debug)]
pub struct BlockGraph {
    pub graph: WormGraph,
    /// Edge id -> check index in the parent code.
    pub edge_checks: Vec<usize>,
    /// Vertex id -> metacheck row in the parent code.
    pub vertex_metas: Vec<usize>,
    /// True when even subgraphs are exactly the valid interior syndromes.
    pub exact: bool,
}

impl BlockGraph {
    /// Maps an edge subset back to a syndrome pattern over the code's checks.
    #[must_use]
    pub fn lift(&self, edges: &BitVector, num_checks: usize) -> BitVector {
        let mut s = BitVector::zeros(num_checks);
        for e in edges.iter_ones() {
            s.set(self.edge_checks[e], true);
        }
        s
    }

    /// Restricts a syndrome over the code's checks to edge coordinates.
    #[must_use]
    pub fn restrict(&self, syndrome: &BitVector) -> BitVector {
        let mut edges = BitVector::zeros(self.edge_checks.len());
        for (e, &c) in self.edge_checks.iter().enumerate() {
            if syndrome.get(c) {
                edges.set(e, true);
            }
        }
        edges
    }
}

/// Renders the interior region of a code as a [`BlockGraph`].
///
/// Requires every interior check to appear in exactly two metacheck rows
/// (the cycle-structured case). The `exact` flag is decided by lifting
/// every fundamental cycle: if all lifts are valid syndromes the cycle
/// space is contained in the locally valid space, and the reverse
/// containment always holds, so the spaces are equal.
pub fn block_to_graph(code: &Code, interior: &BitVector) -> Result<BlockGraph> {
    assert_eq!(
        interior.len(),
        code.num_checks(),
        "interior must be an indicator over checks"
    );
    let meta = code.meta();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); code.num_checks()];
    for r in 0..meta.nrows() {
        for c in meta.row(r).iter_ones() {
            membership[c].push(r);
        }
    }
    let mut vertex_metas: Vec<usize> = Vec::new();
    let mut vertex_of_meta: HashMap<usize, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut edge_checks = Vec::new();
    for c in interior.iter_ones() {
        let rows = &membership[c];
        if rows.len() != 2 {
            return Err(Error::UnsupportedCode(format!(
                "check {c} lies in {} metacheck rows; the block-to-graph \
                 correspondence needs exactly 2",
                rows.len()
            )));
        }
        let mut vid = |row: usize| {
            *vertex_of_meta.entry(row).or_insert_with(|| {
                vertex_metas.push(row);
                vertex_metas.len() - 1
            })
        };
        let a = vid(rows[0]);
        let b = vid(rows[1]);
        if a == b {
            return Err(Error::UnsupportedCode(format!(
                "check {c} repeats a metacheck row; degenerate geometry"
            )));
        }
        edges.push((a, b));
        edge_checks.push(c);
    }
    let graph = WormGraph::new(vertex_metas.len(), edges);
    let mut block = BlockGraph {
        graph,
        edge_checks,
        vertex_metas,
        exact: true,
    };
    block.exact = block
        .graph
        .cycle_space_basis()
        .iter()
        .all(|cycle| code.is_valid_syndrome(&block.lift(cycle, code.num_checks())));
    Ok(block)
}

/// Draws `count` interior syndromes (in edge coordinates) distributed as
/// `e^{-beta |A|}` over the coset `base + {valid syndromes inside the
/// block}`, which is exactly the block conditional of the syndrome Gibbs
/// distribution given a quiet boundary.
///
/// `base` must be an even subgraph of the block graph (the restriction of
/// the current syndrome to the interior always is, once boundary-incident
/// components are frozen away). Samples come from the worm chain over all
/// even subgraphs; when the block wraps (`exact == false`) the stray
/// homology classes are removed by rejecting samples whose difference from
/// `base` does not lift to a valid syndrome. Rejection preserves relative
/// weights, so the filtered law is the target conditional, not an
/// approximation.
pub fn sample_valid_block_syndromes<R: Rng + ?Sized>(
    code: &Code,
    block: &BlockGraph,
    base: &BitVector,
    beta: f64,
    cfg: &WormConfig,
    count: usize,
    rng: &mut R,
) -> Result<Vec<BitVector>> {
    assert!(
        block.graph.odd_vertices(base).is_empty(),
        "base must be an even subgraph of the block graph"
    );
    if block.exact {
        return sample_filtered(&block.graph, beta, cfg, count, rng, |_| true);
    }
    let base_lift = block.lift(base, code.num_checks());
    sample_filtered(&block.graph, beta, cfg, count, rng, |a| {
        let mut candidate = block.lift(a, code.num_checks());
        candidate.xor_assign(&base_lift);
        code.is_valid_syndrome(&candidate)
    })
}

// ============================================================================
// Exact worm kernel (verification)
// ============================================================================

/// Fully enumerated worm kernel on a small graph: states, sparse rows, and
/// the extended stationary weights.
pub struct WormKernel {
    /// All valid tagged states in a fixed order.
    pub states: Vec<WormState>,
    /// Sparse transition rows (column-sorted), aligned with `states`.
    pub rows: Vec<Vec<(usize, f64)>>,
    /// Normalized extended measure `e^{-beta |A|}` per tagged state.
    pub stationary: Vec<f64>,
}

/// Enumerates the worm kernel exactly; guarded to graphs with at most 10
/// edges. State order is deterministic: edge subsets in numeric order, tags
/// in vertex order.
pub fn enumerate_worm_kernel(graph: &WormGraph, beta: f64) -> Result<WormKernel> {
    const MAX_EDGES: usize = 10;
    let ne = graph.num_edges();
    let nv = graph.num_vertices();
    if ne > MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "worm kernel edge count",
            actual: ne,
            limit: MAX_EDGES,
        });
    }
    assert!(nv > 0, "kernel enumeration needs vertices");
    let mut states = Vec::new();
    for bits in 0..(1u64 << ne) {
        let edges = BitVector::from_indices(
            ne,
            &(0..ne).filter(|&e| (bits >> e) & 1 == 1).collect::<Vec<_>>(),
        );
        let odd = graph.odd_vertices(&edges);
        match odd.len() {
            0 => {
                for v in 0..nv {
                    states.push(WormState {
                        edges: edges.clone(),
                        head: v,
                        tail: v,
                    });
                }
            }
            2 => {
                states.push(WormState {
                    edges: edges.clone(),
                    head: odd[0],
                    tail: odd[1],
                });
                states.push(WormState {
                    edges,
                    head: odd[1],
                    tail: odd[0],
                });
            }
            _ => {}
        }
    }
    let index: HashMap<WormState, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut rows = Vec::with_capacity(states.len());
    for state in &states {
        let mut row: HashMap<usize, f64> = HashMap::new();
        let me = index[state];
        let mut add = |target: usize, mass: f64| {
            *row.entry(target).or_insert(0.0) += mass;
        };
        // Move branch: 1/4 per slot.
        for move_head in [true, false] {
            let p = if move_head { state.head } else { state.tail };
            let deg_p = graph.degree(p);
            if deg_p == 0 {
                add(me, 0.25);
                continue;
            }
            let q = 0.25 / deg_p as f64;
            for &(edge, u) in graph.incident(p) {
                let delta = if state.edges.get(edge) { -1.0 } else { 1.0 };
                let ratio = (-beta * delta).exp() * deg_p as f64 / graph.degree(u) as f64;
                let acc = ratio.min(1.0);
                let mut next = state.clone();
                next.edges.toggle(edge);
                if move_head {
                    next.head = u;
                } else {
                    next.tail = u;
                }
                add(index[&next], q * acc);
                add(me, q * (1.0 - acc));
            }
        }
        // Relocate branch: 1/2 total.
        if state.is_defect_free() {
            let q = 0.5 / nv as f64;
            for v in 0..nv {
                let next = WormState {
                    edges: state.edges.clone(),
                    head: v,
                    tail: v,
                };
                add(index[&next], q);
            }
        } else {
            add(me, 0.5);
        }
        let mut row: Vec<(usize, f64)> = row.into_iter().collect();
        row.sort_unstable_by_key(|&(j, _)| j);
        debug_assert!(
            (row.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12,
            "worm kernel row must be stochastic"
        );
        rows.push(row);
    }
    let weights: Vec<f64> = states
        .iter()
        .map(|s| (-beta * s.edges.weight() as f64).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let stationary = weights.into_iter().map(|w| w / z).collect();
    Ok(WormKernel {
        states,
        rows,
        stationary,
    })
}

impl WormKernel {
    /// `||pi K - pi||_1` for the extended measure.
    #[must_use]
    pub fn stationarity_defect(&self) -> f64 {
        let mut pushed = vec![0.0f64; self.states.len()];
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, p) in row {
                pushed[y] += self.stationary[x] * p;
            }
        }
        pushed
            .iter()
            .zip(&self.stationary)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    /// `max |pi_x K_xy - pi_y K_yx|` over state pairs.
    #[must_use]
    pub fn detailed_balance_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, pxy) in row {
                let pyx = self.rows[y]
                    .binary_search_by_key(&x, |&(j, _)| j)
                    .map(|k| self.rows[y][k].1)
                    .unwrap_or(0.0);
                worst = worst.max((self.stationary[x] * pxy - self.stationary[y] * pyx).abs());
            }
        }
        worst
    }

    /// Defect-free marginal over edge sets, renormalized: the distribution
    /// the projected sampler targets.
    #[must_use]
    pub fn defect_free_marginal(&self) -> Vec<(BitVector, f64)> {
        let mut acc: Vec<(BitVector, f64)> = Vec::new();
        let mut index: HashMap<BitVector, usize> = HashMap::new();
        let mut total = 0.0;
        for (s, &p) in self.states.iter().zip(&self.stationary) {
            if s.is_defect_free() {
                let i = *index.entry(s.edges.clone()).or_insert_with(|| {
                    acc.push((s.edges.clone(), 0.0));
                    acc.len() - 1
                });
                acc[i].1 += p;
                total += p;
            }
        }
        for entry in &mut acc {
            entry.1 /= total;
        }
        acc
    }
}

/// Total-variation distance between two distributions over edge sets.
#[must_use]
pub fn tv_distance(a: &[(BitVector, f64)], b: &[(BitVector, f64)]) -> f64 {
    let mut keys: HashMap<&BitVector, (f64, f64)> = HashMap::new();
    for (k, p) in a {
        keys.entry(k).or_default().0 += p;
    }
    for (k, p) in b {
        keys.entry(k).or_default().1 += p;
    }
    0.5 * keys.values().map(|(p, q)| (p - q).abs()).sum::<f64>()
}

/// Empirical distribution of a sample list over edge sets.
#[must_use]
pub fn empirical_distribution(samples: &[BitVector]) -> Vec<(BitVector, f64)> {
    let mut counts: HashMap<BitVector, usize> = HashMap::new();
    for s in samples {
        *counts.entry(s.clone()).or_insert(0) += 1;
    }
    let total = samples.len().max(1) as f64;
    let mut out: Vec<(BitVector, f64)> = counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 / total))
        .collect();
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}
