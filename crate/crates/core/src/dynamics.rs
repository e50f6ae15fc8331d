//! The Markov chains: single-site Glauber, the projected syndrome chain,
//! conditional block dynamics, and the size-restricted variant.
//!
//! All chains target the syndrome Gibbs distribution `pi_beta(s) ∝
//! e^{-beta |s|}` over valid syndromes (equivalently, the code Gibbs
//! distribution pushed through `e -> H e`). The single-site chains flip one
//! symbol per step with heat-bath acceptance `1/(1 + e^{beta dE})`. The
//! block chain picks a uniform check, freezes every syndrome component that
//! touches the radius-`L` annulus, and resamples the interior from the
//! exact conditional given a quiet boundary; the physical error is carried
//! along by applying canonical minimum-weight corrections for the erased
//! and the resampled interior patterns.
//!
//! Three interior samplers are provided: `exact` (enumerate the coset of
//! locally valid patterns; guarded by dimension), `worm` (the even-subgraph
//! chain with a validity filter), and `nested-glauber` (inner projected
//! sweeps confined to the interior; approximate and flagged as such).
//!
//! Determinism is part of the contract: every chain owns a counter-based
//! RNG stream, so a (seed, stream) pair fixes the entire trajectory.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::code::{Code, CssCode, SyndromeConfig};
use crate::decoder::{classify_residual, corr_contract, DecoderConfig, DecoderKind, ResidualClass};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::worm::{block_to_graph, sample_valid_block_syndromes, WormConfig};

// ============================================================================
// Chain state
// ============================================================================

/// A single chain: cumulative error, cached syndrome, and a private RNG
/// stream. The syndrome is maintained incrementally and spot-checked
/// against `H e` in debug builds.
#[derive(Clone, Debug)]
pub struct ChainState<'c> {
    code: &'c Code,
    /// Cumulative error over symbols.
    pub e: BitVector,
    /// Cached syndrome `H e`.
    pub s: SyndromeConfig,
    /// Discrete steps taken (including identity, rejected, and aborted
    /// block steps: each consumes one unit of chain time).
    pub steps: u64,
    rng: ChaCha8Rng,
    seed: u64,
    stream: u64,
}

impl<'c> ChainState<'c> {
    /// Fresh chain at the zero error with its own RNG stream.
    #[must_use]
    pub fn new(code: &'c Code, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ChainState {
            code,
            e: BitVector::zeros(code.num_symbols()),
            s: BitVector::zeros(code.num_checks()),
            steps: 0,
            rng,
            seed,
            stream,
        }
    }

    #[inline]
    #[must_use]
    pub fn code(&self) -> &'c Code {
        self.code
    }

    /// Number of violated checks.
    #[inline]
    #[must_use]
    pub fn energy(&self) -> usize {
        self.s.weight()
    }

    #[must_use]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[must_use]
    pub fn stream(&self) -> u64 {
        self.stream
    }

    fn spot_check_invariant(&self) {
        // Full recomputation is too costly per step even in debug; sample.
        if cfg!(debug_assertions) && self.steps.is_multiple_of(4096) {
            assert_eq!(self.s, self.code.syndrome(&self.e), "cached syndrome drifted");
        }
    }
}

/// Heat-bath acceptance `1/(1 + e^{beta dE})` for an energy change `dE`.
#[inline]
#[must_use]
pub fn acceptance(beta: f64, delta_e: i64) -> f64 {
    1.0 / (1.0 + (beta * delta_e as f64).exp())
}

/// Energy change of flipping symbol `i` under syndrome `s`: violated
/// incident checks relax, satisfied ones break.
#[inline]
#[must_use]
pub fn site_flip_delta(code: &Code, s: &SyndromeConfig, i: usize) -> i64 {
    let mut delta = 0i64;
    for &c in code.symbol_checks(i) {
        delta += if s.get(c) { -1 } else { 1 };
    }
    delta
}

/// One Glauber step: uniform symbol, heat-bath accept, incremental update
/// of both the error and the cached syndrome.
pub fn glauber_step(state: &mut ChainState, beta: f64) {
    let code = state.code;
    let i = state.rng.random_range(0..code.num_symbols());
    let delta = site_flip_delta(code, &state.s, i);
    let u: f64 = state.rng.random();
    if u < acceptance(beta, delta) {
        state.e.toggle(i);
        for &c in code.symbol_checks(i) {
            state.s.toggle(c);
        }
    }
    state.steps += 1;
    state.spot_check_invariant();
}

/// One step of the projected syndrome chain. The draw sequence is
/// identical to [`glauber_step`] (same symbol index, same uniform), so a
/// coupled pair of chains produces bitwise-equal syndrome trajectories.
pub fn syndrome_step<R: Rng + ?Sized>(
    code: &Code,
    s: &mut SyndromeConfig,
    beta: f64,
    rng: &mut R,
) {
    let i = rng.random_range(0..code.num_symbols());
    let delta = site_flip_delta(code, s, i);
    let u: f64 = rng.random();
    if u < acceptance(beta, delta) {
        for &c in code.symbol_checks(i) {
            s.toggle(c);
        }
    }
}

// ============================================================================
// Block assembly
// ============================================================================

/// Geometry of one conditional block update.
#[derive(Clone, Debug)]
pub struct BlockSpec {
    pub center: usize,
    pub radius: usize,
    /// Checks within network distance `radius` of the center.
    pub ball: BitVector,
    /// Checks at distance exactly `radius + 1`.
    pub annulus: BitVector,
    /// Syndrome components intersecting the annulus, frozen for this step.
    pub frozen: Vec<Vec<usize>>,
    /// The resampled region: the ball minus every frozen component and its
    /// neighborhood.
    pub interior: BitVector,
}

/// Builds the block around `center`: freeze every component of `s` that
/// touches the distance-`radius + 1` annulus (wherever it extends), then
/// carve the frozen components and their closed neighborhoods out of the
/// ball.
///
/// Two structural facts follow and are relied on downstream. First, every
/// check outside the interior but adjacent to it is unviolated (a violated
/// one would belong to a component that is either frozen, and hence
/// excised with its neighborhood, or confined to the ball, and hence
/// wholly inside the interior). Second, the interior part of `s` is a
/// disjoint union of complete components.
#[must_use]
pub fn assemble_block(code: &Code, s: &SyndromeConfig, center: usize, radius: usize) -> BlockSpec {
    let net = code.network();
    let ball = net.ball(&[center], radius);
    let annulus = net.boundary(&[center], radius, 1);
    let mut interior = ball.clone();
    let mut frozen = Vec::new();
    for comp in net.components(s) {
        if comp.iter().any(|&c| annulus.get(c)) {
            let indicator = BitVector::from_indices(s.len(), &comp);
            let closed = net.closed_neighborhood(&indicator);
            interior = interior.and_not(&closed);
            frozen.push(comp);
        }
    }
    BlockSpec {
        center,
        radius,
        ball,
        annulus,
        frozen,
        interior,
    }
}

/// Exact conditional distribution of the interior syndrome given a quiet
/// boundary: the coset `s_B + LV(B)` of locally valid patterns, weighted
/// `e^{-beta |pattern|}`. Entries are full-length syndromes supported on
/// the interior, in a fixed Gray order. Guarded by the coset dimension.
pub fn block_conditional_support(
    code: &Code,
    spec: &BlockSpec,
    s_b: &SyndromeConfig,
    beta: f64,
) -> Result<Vec<(BitVector, f64)>> {
    const MAX_DIM: usize = 20;
    let basis = code.local_valid_basis(&spec.interior);
    if basis.len() > MAX_DIM {
        return Err(Error::SizeGuard {
            what: "block conditional dimension",
            actual: basis.len(),
            limit: MAX_DIM,
        });
    }
    let mut members = Vec::with_capacity(1usize << basis.len());
    let mut cur = s_b.clone();
    members.push(cur.clone());
    for k in 1..(1u64 << basis.len()) {
        cur.xor_assign(&basis[k.trailing_zeros() as usize]);
        members.push(cur.clone());
    }
    let weights: Vec<f64> = members
        .iter()
        .map(|v| (-beta * v.weight() as f64).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(members
        .into_iter()
        .zip(weights)
        .map(|(v, w)| (v, w / z))
        .collect())
}

/// Exact outcome distribution of one block step at a fixed center: every
/// conditional branch with its probability, with guard trips and
/// undecodable branches folded into self-mass, exactly as the sampling
/// step behaves. Targets may repeat; callers accumulate.
///
/// This is the code path the exact-kernel oracle drives, so the enumerated
/// kernel and the running chain share the block assembly, the conditional
/// weights, and the abort semantics by construction.
#[must_use]
pub fn exact_block_branches(
    code: &Code,
    s: &SyndromeConfig,
    center: usize,
    radius: usize,
    beta: f64,
    dcfg: &DecoderConfig,
) -> Vec<(SyndromeConfig, f64)> {
    let stay = vec![(s.clone(), 1.0)];
    let spec = assemble_block(code, s, center, radius);
    for comp in &spec.frozen {
        let indicator = BitVector::from_indices(code.num_checks(), comp);
        if !code.is_erasable(&indicator) {
            return stay;
        }
    }
    if spec.interior.is_zero() {
        return stay;
    }
    let s_b = s.and(&spec.interior);
    let Ok(dist) = block_conditional_support(code, &spec, &s_b, beta) else {
        return stay;
    };
    if corr_contract(code, &s_b, dcfg).is_err() {
        return stay;
    }
    let mut out = Vec::with_capacity(dist.len());
    let mut self_mass = 0.0;
    for (v, p) in dist {
        if corr_contract(code, &v, dcfg).is_err() {
            self_mass += p;
        } else {
            let mut target = s.clone();
            target.xor_assign(&s_b);
            target.xor_assign(&v);
            out.push((target, p));
        }
    }
    if self_mass > 0.0 {
        out.push((s.clone(), self_mass));
    }
    out
}

// ============================================================================
// Conditional block step
// ============================================================================

/// Interior resampling backend for block updates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SamplerMode {
    /// Enumerate the conditional coset (dimension-guarded) and draw from
    /// the exact weights.
    Exact,
    /// Worm chain over the interior's even subgraphs with a validity
    /// filter; exact in law, stochastic in runtime.
    Worm,
    /// Inner projected sweeps confined to the interior. Approximate: the
    /// inner chain is truncated at a fixed sweep count.
    NestedGlauber { sweeps: usize },
}

/// Outcome of one block (or restricted-block) step. Every variant consumes
/// one unit of chain time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockOutcome {
    /// Interior resampled and corrections applied.
    Applied,
    /// Nothing to resample: the frozen exclusions covered the ball.
    EmptyInterior,
    /// Restricted chain only: the proposal left the small-component class
    /// and was rejected.
    Rejected,
    /// A guard tripped (non-erasable component, sampler failure, size
    /// guard); the state is unchanged and the reason logged.
    Aborted(String),
}

struct BlockProposal {
    spec: BlockSpec,
    s_b: BitVector,
    s_b_new: BitVector,
    /// Symbol correction `corr(s_b) + corr(s_b_new)` realizing the
    /// syndrome change on the physical error.
    correction: BitVector,
}

/// Worm schedule for block interiors: sized to the block graph, with a hard
/// step cap so a pathological block aborts instead of hanging.
fn block_worm_config(graph_edges: usize, graph_vertices: usize) -> WormConfig {
    let e = graph_edges.max(1);
    let v = graph_vertices.max(1);
    WormConfig {
        burn_in: 200 * e * v,
        thinning: 4 * e,
        max_steps: 50_000_000,
    }
}

fn propose_block(
    state: &mut ChainState,
    beta: f64,
    center: usize,
    radius: usize,
    mode: SamplerMode,
    dcfg: &DecoderConfig,
) -> Result<Option<BlockProposal>> {
    let code = state.code;
    let spec = assemble_block(code, &state.s, center, radius);
    for comp in &spec.frozen {
        let indicator = BitVector::from_indices(code.num_checks(), comp);
        if !code.is_erasable(&indicator) {
            return Err(Error::Guard(format!(
                "frozen component {comp:?} is not erasable; block step at check {center} aborted"
            )));
        }
    }
    if spec.interior.is_zero() {
        return Ok(None);
    }
    let s_b = state.s.and(&spec.interior);
    let s_b_new = match mode {
        SamplerMode::Exact => {
            let dist = block_conditional_support(code, &spec, &s_b, beta)?;
            let mut draw: f64 = state.rng.random();
            let mut chosen = dist.len() - 1;
            for (k, &(_, p)) in dist.iter().enumerate() {
                draw -= p;
                if draw < 0.0 {
                    chosen = k;
                    break;
                }
            }
            dist[chosen].0.clone()
        }
        SamplerMode::Worm => {
            let block = block_to_graph(code, &spec.interior)?;
            let base = block.restrict(&s_b);
            let cfg = block_worm_config(block.graph.num_edges(), block.graph.num_vertices());
            let sample =
                sample_valid_block_syndromes(code, &block, &base, beta, &cfg, 1, &mut state.rng)?;
            block.lift(&sample[0], code.num_checks())
        }
        SamplerMode::NestedGlauber { sweeps } => {
            let movable: Vec<usize> = (0..code.num_symbols())
                .filter(|&i| code.symbol_checks(i).iter().all(|&c| spec.interior.get(c)))
                .collect();
            let mut scratch = state.s.clone();
            if !movable.is_empty() {
                for _ in 0..sweeps.max(1) * movable.len() {
                    let i = movable[state.rng.random_range(0..movable.len())];
                    let delta = site_flip_delta(code, &scratch, i);
                    let u: f64 = state.rng.random();
                    if u < acceptance(beta, delta) {
                        for &c in code.symbol_checks(i) {
                            scratch.toggle(c);
                        }
                    }
                }
            }
            scratch.and(&spec.interior)
        }
    };
    let corr_old = corr_contract(code, &s_b, dcfg)?;
    let corr_new = corr_contract(code, &s_b_new, dcfg)?;
    Ok(Some(BlockProposal {
        spec,
        s_b,
        s_b_new,
        correction: corr_old.error.xor(&corr_new.error),
    }))
}

fn apply_block(state: &mut ChainState, proposal: &BlockProposal) {
    debug_assert!(
        proposal.s_b_new.is_subset_of(&proposal.spec.interior),
        "resampled pattern leaks out of the interior"
    );
    if cfg!(debug_assertions) {
        for comp in &proposal.spec.frozen {
            for &c in comp {
                assert!(
                    !proposal.spec.interior.get(c),
                    "frozen check {c} inside interior"
                );
            }
        }
    }
    state.e.xor_assign(&proposal.correction);
    state.s.xor_assign(&proposal.s_b);
    state.s.xor_assign(&proposal.s_b_new);
    if cfg!(debug_assertions) {
        for comp in &proposal.spec.frozen {
            for &c in comp {
                assert!(state.s.get(c), "frozen component bit {c} changed by block step");
            }
        }
        assert_eq!(state.s, state.code.syndrome(&state.e), "block step broke H e = s");
    }
}

/// One conditional block step centered at an explicitly given check. The
/// public chain draws the center uniformly; tests and the exact-kernel
/// oracle drive this entry point directly.
pub fn conditional_block_step_at(
    state: &mut ChainState,
    beta: f64,
    center: usize,
    radius: usize,
    mode: SamplerMode,
    dcfg: &DecoderConfig,
) -> BlockOutcome {
    let outcome = match propose_block(state, beta, center, radius, mode, dcfg) {
        Err(err) => {
            log::warn!("block step at check {center} aborted: {err}");
            BlockOutcome::Aborted(err.to_string())
        }
        Ok(None) => BlockOutcome::EmptyInterior,
        Ok(Some(proposal)) => {
            apply_block(state, &proposal);
            BlockOutcome::Applied
        }
    };
    state.steps += 1;
    outcome
}

/// One conditional block step at a uniformly random center.
pub fn conditional_block_step(
    state: &mut ChainState,
    beta: f64,
    radius: usize,
    mode: SamplerMode,
    dcfg: &DecoderConfig,
) -> BlockOutcome {
    let center = state.rng.random_range(0..state.code.num_checks());
    conditional_block_step_at(state, beta, center, radius, mode, dcfg)
}

// ============================================================================
// Restricted chain
// ============================================================================

/// Parameters of the small-component restriction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RestrictionParams {
    /// Block radius of the underlying proposal chain.
    pub radius: usize,
    /// Largest allowed component size.
    pub max_component: usize,
}

/// True iff some component of `s` intersecting the radius-`radius + 1`
/// ball around `center` exceeds `max_component`. Components elsewhere are
/// untouched by a block step at `center`, so this local scan decides
/// membership transitions exactly.
#[must_use]
pub fn violates_restriction(
    code: &Code,
    s: &SyndromeConfig,
    center: usize,
    radius: usize,
    max_component: usize,
) -> bool {
    let guard_zone = code.network().ball(&[center], radius + 1);
    code.network()
        .components(s)
        .iter()
        .any(|comp| comp.len() > max_component && comp.iter().any(|&c| guard_zone.get(c)))
}

/// One step of the restricted chain: propose a conditional block update
/// and reject it if any component near the block would exceed the size
/// cap. The caller must start inside the restricted class.
pub fn restricted_step(
    state: &mut ChainState,
    beta: f64,
    params: RestrictionParams,
    mode: SamplerMode,
    dcfg: &DecoderConfig,
) -> BlockOutcome {
    debug_assert!(
        code_in_restricted_class(state.code, &state.s, params.max_component),
        "restricted chain started outside its class"
    );
    let center = state.rng.random_range(0..state.code.num_checks());
    let outcome = match propose_block(state, beta, center, params.radius, mode, dcfg) {
        Err(err) => {
            log::warn!("restricted block step at check {center} aborted: {err}");
            BlockOutcome::Aborted(err.to_string())
        }
        Ok(None) => BlockOutcome::EmptyInterior,
        Ok(Some(proposal)) => {
            let mut candidate = state.s.clone();
            candidate.xor_assign(&proposal.s_b);
            candidate.xor_assign(&proposal.s_b_new);
            if violates_restriction(state.code, &candidate, center, params.radius, params.max_component)
            {
                BlockOutcome::Rejected
            } else {
                apply_block(state, &proposal);
                BlockOutcome::Applied
            }
        }
    };
    state.steps += 1;
    outcome
}

/// Global membership scan for the restricted class (test/diagnostic use).
#[must_use]
pub fn code_in_restricted_class(code: &Code, s: &SyndromeConfig, max_component: usize) -> bool {
    code.network().components(s).iter().all(|c| c.len() <= max_component)
}

// ============================================================================
// Continuous time and memory runs
// ============================================================================

/// Which discrete chain a continuous-time run advances.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "chain")]
pub enum ChainKind {
    /// Single-site chain at rate `n`.
    Glauber,
    /// Projected chain at rate `m`. Trajectory-wise this runs the same
    /// site-flip process as Glauber (the projection is exact), only the
    /// clock differs.
    Syndrome,
    /// Conditional block chain at rate `m`.
    Block { radius: usize, mode: SamplerMode },
    /// Restricted block chain at rate `m`.
    Restricted {
        radius: usize,
        mode: SamplerMode,
        max_component: usize,
    },
}

/// Advances the chain for continuous time `t` by drawing the Poissonized
/// step count and executing it. Returns the number of discrete steps.
pub fn continuous_run(
    state: &mut ChainState,
    beta: f64,
    t: f64,
    kind: ChainKind,
    dcfg: &DecoderConfig,
) -> u64 {
    assert!(t >= 0.0, "continuous time must be nonnegative");
    let rate = match kind {
        ChainKind::Glauber => state.code.num_symbols() as f64,
        _ => state.code.num_checks() as f64,
    };
    let lambda = rate * t;
    if lambda == 0.0 {
        return 0;
    }
    let k = Poisson::new(lambda)
        .expect("positive Poisson rate")
        .sample(&mut state.rng) as u64;
    for _ in 0..k {
        match kind {
            ChainKind::Glauber | ChainKind::Syndrome => glauber_step(state, beta),
            ChainKind::Block { radius, mode } => {
                conditional_block_step(state, beta, radius, mode, dcfg);
            }
            ChainKind::Restricted {
                radius,
                mode,
                max_component,
            } => {
                restricted_step(
                    state,
                    beta,
                    RestrictionParams {
                        radius,
                        max_component,
                    },
                    mode,
                    dcfg,
                );
            }
        }
    }
    k
}

/// Runs both sectors of a CSS code independently from the ground state for
/// continuous time `t` and classifies the residual errors. The sectors use
/// consecutive RNG streams derived from `stream`.
#[allow(clippy::too_many_arguments)]
pub fn css_memory_run(
    css: &CssCode,
    beta: f64,
    t: f64,
    kind: ChainKind,
    decoder: DecoderKind,
    dcfg: &DecoderConfig,
    seed: u64,
    stream: u64,
) -> (ResidualClass, ResidualClass) {
    let run = |code: &Code, sector_stream: u64| {
        let mut state = ChainState::new(code, seed, sector_stream);
        continuous_run(&mut state, beta, t, kind, dcfg);
        classify_residual(code, &state.e, decoder, dcfg)
    };
    let x = run(&css.x_sector, 2 * stream);
    let z = run(&css.z_sector, 2 * stream + 1);
    (x, z)
}

// ============================================================================
// Cluster-distance diagnostics
// ============================================================================

/// Upper-bound proxy for the cluster distance between two valid syndromes:
/// the number of connected components of their symmetric difference.
#[must_use]
pub fn cluster_distance_proxy(
    x: &SyndromeConfig,
    y: &SyndromeConfig,
    net: &crate::code::SyndromeNetwork,
) -> usize {
    net.components(&x.xor(y)).len()
}

/// Component count and largest component size of a syndrome, for
/// trajectory checkpoints.
#[must_use]
pub fn component_stats(net: &crate::code::SyndromeNetwork, s: &SyndromeConfig) -> (usize, usize) {
    let comps = net.components(s);
    let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
    (comps.len(), largest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_ising_torus;
    use proptest::prelude::*;

    fn toy_code() -> Code {
        build_ising_torus(3, 2).unwrap()
    }

    #[test]
    fn first_flip_acceptance_rate_matches_heat_bath() {
        // From the ground state every flip breaks exactly 4 checks, so the
        // first-step acceptance probability is 1/(1+e^{4 beta}).
        let code = toy_code();
        let beta = 1.0;
        let expect = acceptance(beta, 4);
        let trials = 100_000;
        let mut accepted = 0;
        for k in 0..trials {
            let mut state = ChainState::new(&code, 99, k);
            glauber_step(&mut state, beta);
            if !state.e.is_zero() {
                accepted += 1;
            }
        }
        let rate = accepted as f64 / trials as f64;
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!(
            (rate - expect).abs() < 4.0 * sigma + 1e-12,
            "rate {rate} vs expected {expect}"
        );
    }

    #[test]
    fn zero_temperature_stays_in_ground_state() {
        let code = toy_code();
        let mut state = ChainState::new(&code, 5, 0);
        for _ in 0..2_000 {
            glauber_step(&mut state, 50.0);
        }
        assert!(state.s.is_zero());
        assert!(state.e.is_zero());
    }

    #[test]
    fn syndrome_chain_is_the_projected_glauber_chain() {
        let code = toy_code();
        let beta = 0.8;
        let mut full = ChainState::new(&code, 1234, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        rng.set_stream(7);
        let mut s = BitVector::zeros(code.num_checks());
        for step in 0..10_000 {
            glauber_step(&mut full, beta);
            syndrome_step(&code, &mut s, beta, &mut rng);
            assert_eq!(full.s, s, "trajectories diverged at step {step}");
        }
        assert_eq!(full.s, code.syndrome(&full.e));
    }

    #[test]
    fn block_assembly_invariants_hold_on_random_states() {
        let code = build_ising_torus(4, 2).unwrap();
        let mut state = ChainState::new(&code, 77, 0);
        for _ in 0..3_000 {
            glauber_step(&mut state, 0.7);
        }
        let net = code.network();
        for center in 0..code.num_checks() {
            for radius in [1usize, 2] {
                let spec = assemble_block(&code, &state.s, center, radius);
                assert!(spec.interior.is_subset_of(&spec.ball));
                for comp in &spec.frozen {
                    assert!(comp.iter().any(|&c| spec.annulus.get(c)));
                    let indicator = BitVector::from_indices(code.num_checks(), comp);
                    assert!(!indicator.intersects(&spec.interior));
                    assert!(!net.closed_neighborhood(&indicator).intersects(&spec.interior));
                }
                // Quiet boundary: any violated check adjacent to the
                // interior lies inside it.
                let closure = net.closed_neighborhood(&spec.interior);
                let boundary = closure.and_not(&spec.interior);
                assert!(!state.s.intersects(&boundary), "boundary not quiet");
                // Interior syndrome = union of complete components.
                let s_b = state.s.and(&spec.interior);
                for comp in net.components(&s_b) {
                    let indicator = BitVector::from_indices(code.num_checks(), &comp);
                    assert!(indicator.is_subset_of(&spec.interior));
                    // Each is a full component of s, not a fragment.
                    let grown = net.closed_neighborhood(&indicator);
                    assert_eq!(state.s.and(&grown), indicator);
                }
            }
        }
    }

    #[test]
    fn radius_one_block_is_the_identity_kernel() {
        // On the 2D Ising torus the radius-1 ball supports no nonzero
        // valid syndrome, so the block conditional is deterministic.
        let code = toy_code();
        let mut state = ChainState::new(&code, 3, 1);
        let dcfg = DecoderConfig::default();
        for _ in 0..100 {
            let out = conditional_block_step(&mut state, 0.5, 1, SamplerMode::Exact, &dcfg);
            assert!(matches!(out, BlockOutcome::Applied | BlockOutcome::EmptyInterior));
        }
        assert!(state.s.is_zero());
        assert!(state.e.is_zero());
    }

    #[test]
    fn cold_block_chain_stays_near_ground_state() {
        let code = toy_code();
        let mut state = ChainState::new(&code, 3, 2);
        let dcfg = DecoderConfig::default();
        for _ in 0..100 {
            conditional_block_step(&mut state, 20.0, 2, SamplerMode::Exact, &dcfg);
        }
        assert!(state.s.is_zero());
    }

    #[test]
    fn block_step_preserves_validity_and_invariant() {
        let code = build_ising_torus(4, 2).unwrap();
        let dcfg = DecoderConfig::default();
        for mode in [SamplerMode::Exact, SamplerMode::Worm] {
            let mut state = ChainState::new(&code, 21, 4);
            // Warm up with site flips to a generic state.
            for _ in 0..500 {
                glauber_step(&mut state, 1.0);
            }
            let mut applied = 0;
            for _ in 0..300 {
                if conditional_block_step(&mut state, 1.0, 2, mode, &dcfg) == BlockOutcome::Applied
                {
                    applied += 1;
                }
                assert!(code.is_valid_syndrome(&state.s));
                assert_eq!(state.s, code.syndrome(&state.e));
            }
            assert!(applied > 0, "no block update ever applied in mode {mode:?}");
        }
    }

    #[test]
    fn frozen_components_survive_block_steps() {
        let code = build_ising_torus(4, 2).unwrap();
        let dcfg = DecoderConfig::default();
        let mut state = ChainState::new(&code, 8, 0);
        // Plant one excitation: its 4-check component sits somewhere on
        // the lattice; any block whose annulus meets it must freeze it.
        state.e.toggle(5);
        state.s = code.syndrome(&state.e);
        let planted = state.s.clone();
        for center in 0..code.num_checks() {
            let spec = assemble_block(&code, &state.s, center, 1);
            if spec.frozen.is_empty() {
                continue;
            }
            let before = state.s.clone();
            let out =
                conditional_block_step_at(&mut state, 0.9, center, 1, SamplerMode::Exact, &dcfg);
            assert!(!matches!(out, BlockOutcome::Aborted(_)));
            for comp in &spec.frozen {
                for &c in comp {
                    assert_eq!(state.s.get(c), before.get(c), "frozen bit {c} changed");
                }
            }
            // Restore the planted state for the next center.
            state.e = BitVector::zeros(code.num_symbols());
            state.e.toggle(5);
            state.s = planted.clone();
        }
    }

    #[test]
    fn nested_glauber_mode_runs_and_preserves_validity() {
        let code = build_ising_torus(4, 2).unwrap();
        let dcfg = DecoderConfig::default();
        let mut state = ChainState::new(&code, 14, 3);
        for _ in 0..200 {
            let out = conditional_block_step(
                &mut state,
                1.2,
                2,
                SamplerMode::NestedGlauber { sweeps: 3 },
                &dcfg,
            );
            assert!(!matches!(out, BlockOutcome::Aborted(_)));
            assert!(code.is_valid_syndrome(&state.s));
        }
    }

    #[test]
    fn restricted_chain_with_zero_cap_never_moves() {
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        let mut state = ChainState::new(&code, 9, 0);
        let params = RestrictionParams {
            radius: 2,
            max_component: 0,
        };
        let mut rejected = 0;
        for _ in 0..200 {
            match restricted_step(&mut state, 0.4, params, SamplerMode::Exact, &dcfg) {
                BlockOutcome::Rejected => rejected += 1,
                BlockOutcome::Applied => {
                    assert!(state.s.is_zero(), "applied step must keep the class")
                }
                _ => {}
            }
        }
        assert!(state.s.is_zero());
        assert!(rejected > 0, "at beta = 0.4 some proposal should be nonzero");
    }

    #[test]
    fn restricted_chain_respects_component_cap() {
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        let params = RestrictionParams {
            radius: 2,
            max_component: 4,
        };
        let mut state = ChainState::new(&code, 30, 1);
        for _ in 0..500 {
            restricted_step(&mut state, 0.6, params, SamplerMode::Exact, &dcfg);
            assert!(code_in_restricted_class(&code, &state.s, params.max_component));
        }
    }

    #[test]
    fn continuous_run_mean_step_count() {
        let code = build_ising_torus(4, 1).unwrap();
        let t = 2.5;
        let expect = code.num_checks() as f64 * t;
        let draws = 10_000;
        let mut total = 0u64;
        for k in 0..draws {
            let mut state = ChainState::new(&code, 500, k);
            total += continuous_run(
                &mut state,
                1.0,
                t,
                ChainKind::Syndrome,
                &DecoderConfig::default(),
            );
        }
        let mean = total as f64 / draws as f64;
        let sigma = (expect / draws as f64).sqrt();
        assert!(
            (mean - expect).abs() < 4.0 * sigma,
            "mean steps {mean} vs rate*t = {expect}"
        );
    }

    #[test]
    fn continuous_run_zero_time_is_identity() {
        let code = toy_code();
        let mut state = ChainState::new(&code, 2, 2);
        let k = continuous_run(
            &mut state,
            1.0,
            0.0,
            ChainKind::Glauber,
            &DecoderConfig::default(),
        );
        assert_eq!(k, 0);
        assert!(state.e.is_zero());
    }

    #[test]
    fn trajectories_replay_bit_for_bit() {
        let code = build_ising_torus(4, 2).unwrap();
        let dcfg = DecoderConfig::default();
        let run = || {
            let mut state = ChainState::new(&code, 424242, 17);
            for _ in 0..200 {
                glauber_step(&mut state, 0.9);
                conditional_block_step(&mut state, 0.9, 2, SamplerMode::Exact, &dcfg);
            }
            (state.e.clone(), state.s.clone())
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn cluster_proxy_counts_components() {
        let code = toy_code();
        let net = code.network();
        let zero = BitVector::zeros(code.num_checks());
        assert_eq!(cluster_distance_proxy(&zero, &zero, net), 0);
        // One spin flip: a single 4-check component.
        let mut e = BitVector::zeros(code.num_symbols());
        e.toggle(0);
        let star = code.syndrome(&e);
        assert_eq!(cluster_distance_proxy(&zero, &star, net), 1);
        assert_eq!(component_stats(net, &star), (1, 4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn block_steps_keep_syndromes_valid(seed in 0u64..1_000_000, radius in 1usize..3) {
            let code = build_ising_torus(4, 2).unwrap();
            let dcfg = DecoderConfig::default();
            let mut state = ChainState::new(&code, seed, 0);
            for _ in 0..50 {
                glauber_step(&mut state, 0.8);
            }
            for _ in 0..20 {
                conditional_block_step(&mut state, 0.8, radius, SamplerMode::Exact, &dcfg);
                prop_assert!(code.is_valid_syndrome(&state.s));
                prop_assert_eq!(&state.s, &code.syndrome(&state.e));
            }
        }
    }
}
