//! Exact brute-force references for small instances.
//!
//! Everything here is ground truth the samplers are measured against:
//! exact Gibbs distributions by syndrome enumeration, fully enumerated
//! transition kernels for the single-site, block, and restricted chains,
//! reachability closures, Peierls tail bounds, conditional-independence
//! defects, and state-graph cluster distances. All entry points are guarded
//! by explicit size limits and fail loudly instead of degrading.
//!
//! The kernel builders do not reimplement the chains: each row is produced
//! by the same functions the live chains call ([`site_flip_delta`],
//! [`exact_block_branches`], [`violates_restriction`]), so a bug in the
//! chain logic shows up as a stationarity or reversibility defect rather
//! than being copied into the reference.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::code::{Code, SyndromeConfig};
use crate::decoder::DecoderConfig;
use crate::dynamics::{
    acceptance, exact_block_branches, site_flip_delta, violates_restriction, SamplerMode,
};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Largest state space an exact kernel may enumerate.
pub const MAX_KERNEL_STATES: usize = 4096;

// ============================================================================
// Distributions
// ============================================================================

/// A probability distribution over syndromes in a fixed enumeration order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Distribution {
    pub states: Vec<SyndromeConfig>,
    pub probs: Vec<f64>,
}

/// Kahan-compensated sum. Plain summation drifts by roughly
/// `len * eps`, which already exceeds the 1e-12 normalization tolerance
/// for the 32768-state instances the oracles routinely enumerate.
fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for x in xs {
        let y = x - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

impl Distribution {
    /// Builds and validates: equal lengths, distinct states, probabilities
    /// normalized to 1 within 1e-12.
    #[must_use]
    pub fn new(states: Vec<SyndromeConfig>, probs: Vec<f64>) -> Self {
        assert_eq!(states.len(), probs.len(), "states/probs length mismatch");
        let mut seen = states.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), states.len(), "duplicate states in distribution");
        let total = kahan_sum(probs.iter().copied());
        assert!(
            (total - 1.0).abs() <= 1e-12,
            "distribution normalization off by {}",
            (total - 1.0).abs()
        );
        Distribution { states, probs }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.states.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Probability of a state, zero if absent.
    #[must_use]
    pub fn prob(&self, state: &SyndromeConfig) -> f64 {
        self.states
            .iter()
            .position(|s| s == state)
            .map_or(0.0, |i| self.probs[i])
    }

    /// Total-variation distance to another distribution (any state orders).
    #[must_use]
    pub fn tv(&self, other: &Distribution) -> f64 {
        let mut diff: HashMap<&SyndromeConfig, f64> = HashMap::new();
        for (s, &p) in self.states.iter().zip(&self.probs) {
            *diff.entry(s).or_default() += p;
        }
        for (s, &p) in other.states.iter().zip(&other.probs) {
            *diff.entry(s).or_default() -= p;
        }
        0.5 * diff.values().map(|d| d.abs()).sum::<f64>()
    }

    /// Total-variation distance to an empirical sample-count table.
    #[must_use]
    pub fn tv_to_counts(&self, counts: &HashMap<SyndromeConfig, u64>, total: u64) -> f64 {
        assert!(total > 0, "empty sample set");
        let mut diff: HashMap<&SyndromeConfig, f64> = HashMap::new();
        for (s, &p) in self.states.iter().zip(&self.probs) {
            *diff.entry(s).or_default() += p;
        }
        for (s, &c) in counts {
            *diff.entry(s).or_default() -= c as f64 / total as f64;
        }
        0.5 * diff.values().map(|d| d.abs()).sum::<f64>()
    }

    /// Restriction to a subset of states, renormalized.
    #[must_use]
    pub fn condition_on<F: Fn(&SyndromeConfig) -> bool>(&self, keep: F) -> Distribution {
        let mut states = Vec::new();
        let mut probs = Vec::new();
        for (s, &p) in self.states.iter().zip(&self.probs) {
            if keep(s) {
                states.push(s.clone());
                probs.push(p);
            }
        }
        let mass = kahan_sum(probs.iter().copied());
        assert!(mass > 0.0, "conditioning event has zero probability");
        for p in &mut probs {
            *p /= mass;
        }
        Distribution::new(states, probs)
    }
}

/// Exact syndrome Gibbs distribution `pi_beta(s) ∝ e^{-beta |s|}` over all
/// valid syndromes, in enumeration order. Weights go through log-sum-exp
/// so large `beta` stays finite.
pub fn exact_gibbs(code: &Code, beta: f64) -> Result<Distribution> {
    let states = code.enumerate_valid_syndromes()?;
    let logw: Vec<f64> = states.iter().map(|s| -beta * s.weight() as f64).collect();
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_z = max + kahan_sum(logw.iter().map(|&w| (w - max).exp())).ln();
    let probs = logw.iter().map(|&w| (w - log_z).exp()).collect();
    Ok(Distribution::new(states, probs))
}

// ============================================================================
// Exact kernels
// ============================================================================

/// Which chain's kernel to enumerate.
#[derive(Clone, Copy, Debug)]
pub enum KernelKind {
    /// The projected single-site chain (identical in law to the Glauber
    /// chain's syndrome marginal).
    SingleSite,
    /// Conditional block dynamics with the given radius.
    Block { radius: usize },
    /// The restricted chain: block proposals, component-size rejection.
    Restricted { radius: usize, max_component: usize },
}

/// A fully enumerated transition kernel over an explicit state list.
#[derive(Clone, Debug)]
pub struct ExactKernel {
    pub states: Vec<SyndromeConfig>,
    /// Sparse stochastic rows, column indices sorted.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl ExactKernel {
    fn from_dense_rows(states: Vec<SyndromeConfig>, dense: Vec<HashMap<usize, f64>>) -> Self {
        let rows = dense
            .into_iter()
            .map(|row| {
                let mut row: Vec<(usize, f64)> = row.into_iter().collect();
                row.sort_unstable_by_key(|&(j, _)| j);
                let total: f64 = row.iter().map(|&(_, p)| p).sum();
                assert!(
                    (total - 1.0).abs() <= 1e-9,
                    "kernel row not stochastic: mass {total}"
                );
                row
            })
            .collect();
        ExactKernel { states, rows }
    }

    #[must_use]
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    #[must_use]
    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.rows[from]
            .binary_search_by_key(&to, |&(j, _)| j)
            .map_or(0.0, |k| self.rows[from][k].1)
    }

    /// `||pi K - pi||_1` for a distribution aligned with `states`.
    #[must_use]
    pub fn stationarity_defect(&self, pi: &[f64]) -> f64 {
        assert_eq!(pi.len(), self.states.len(), "pi length mismatch");
        let mut pushed = vec![0.0f64; pi.len()];
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, p) in row {
                pushed[y] += pi[x] * p;
            }
        }
        pushed.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
    }

    /// `max |pi_x K_xy - pi_y K_yx|` over all transitions.
    #[must_use]
    pub fn detailed_balance_defect(&self, pi: &[f64]) -> f64 {
        assert_eq!(pi.len(), self.states.len(), "pi length mismatch");
        let mut worst = 0.0f64;
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, pxy) in row {
                worst = worst.max((pi[x] * pxy - pi[y] * self.entry(y, x)).abs());
            }
        }
        worst
    }

    /// States reachable from `start` through transitions with probability
    /// above `tol`, sorted ascending.
    #[must_use]
    pub fn reachable_from(&self, start: usize, tol: f64) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &(y, p) in &self.rows[x] {
                if p > tol && !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.states.len()).filter(|&i| seen[i]).collect()
    }

    /// Restriction to a subset of state indices. Fails if any kept row
    /// carries probability mass (above `tol`) out of the subset.
    pub fn restrict(&self, keep: &[usize], tol: f64) -> Result<ExactKernel> {
        let mut new_index = vec![usize::MAX; self.states.len()];
        for (new, &old) in keep.iter().enumerate() {
            new_index[old] = new;
        }
        let mut states = Vec::with_capacity(keep.len());
        let mut rows = Vec::with_capacity(keep.len());
        for &old in keep {
            states.push(self.states[old].clone());
            let mut row = Vec::new();
            for &(y, p) in &self.rows[old] {
                if new_index[y] == usize::MAX {
                    if p > tol {
                        return Err(Error::Guard(format!(
                            "kernel restriction leaks mass {p} from state {old} to state {y}"
                        )));
                    }
                } else {
                    row.push((new_index[y], p));
                }
            }
            row.sort_unstable_by_key(|&(j, _)| j);
            rows.push(row);
        }
        Ok(ExactKernel { states, rows })
    }
}

/// Enumerates the exact transition kernel of the requested chain over all
/// valid syndromes (or the restricted class for the restricted chain).
pub fn exact_kernel(
    code: &Code,
    beta: f64,
    kind: KernelKind,
    dcfg: &DecoderConfig,
) -> Result<ExactKernel> {
    let mut states = code.enumerate_valid_syndromes()?;
    if let KernelKind::Restricted { max_component, .. } = kind {
        states.retain(|s| {
            code.network()
                .components(s)
                .iter()
                .all(|c| c.len() <= max_component)
        });
    }
    if states.len() > MAX_KERNEL_STATES {
        return Err(Error::SizeGuard {
            what: "exact kernel state count",
            actual: states.len(),
            limit: MAX_KERNEL_STATES,
        });
    }
    let index: HashMap<&SyndromeConfig, usize> =
        states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let lookup = |s: &SyndromeConfig| -> usize {
        *index
            .get(s)
            .unwrap_or_else(|| panic!("kernel produced a state outside the enumerated space"))
    };
    let mut dense: Vec<HashMap<usize, f64>> = vec![HashMap::new(); states.len()];
    match kind {
        KernelKind::SingleSite => {
            let n = code.num_symbols() as f64;
            for (x, s) in states.iter().enumerate() {
                let row = &mut dense[x];
                for i in 0..code.num_symbols() {
                    let acc = acceptance(beta, site_flip_delta(code, s, i));
                    let mut target = s.clone();
                    for &c in code.symbol_checks(i) {
                        target.toggle(c);
                    }
                    *row.entry(lookup(&target)).or_default() += acc / n;
                    *row.entry(x).or_default() += (1.0 - acc) / n;
                }
            }
        }
        KernelKind::Block { radius } => {
            let m = code.num_checks() as f64;
            for (x, s) in states.iter().enumerate() {
                for center in 0..code.num_checks() {
                    for (target, p) in exact_block_branches(code, s, center, radius, beta, dcfg) {
                        *dense[x].entry(lookup(&target)).or_default() += p / m;
                    }
                }
            }
        }
        KernelKind::Restricted {
            radius,
            max_component,
        } => {
            let m = code.num_checks() as f64;
            for (x, s) in states.iter().enumerate() {
                for center in 0..code.num_checks() {
                    for (target, p) in exact_block_branches(code, s, center, radius, beta, dcfg) {
                        let to = if violates_restriction(code, &target, center, radius, max_component)
                        {
                            x
                        } else {
                            lookup(&target)
                        };
                        *dense[x].entry(to).or_default() += p / m;
                    }
                }
            }
        }
    }
    Ok(ExactKernel::from_dense_rows(states, dense))
}

/// Aligns a distribution with a kernel's state order. Fails if the state
/// sets differ.
pub fn align_distribution(dist: &Distribution, kernel: &ExactKernel) -> Result<Vec<f64>> {
    if dist.len() != kernel.num_states() {
        return Err(Error::Guard(format!(
            "distribution has {} states, kernel has {}",
            dist.len(),
            kernel.num_states()
        )));
    }
    let index: HashMap<&SyndromeConfig, usize> = dist
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    kernel
        .states
        .iter()
        .map(|s| {
            index
                .get(s)
                .map(|&i| dist.probs[i])
                .ok_or_else(|| Error::Guard("kernel state missing from distribution".into()))
        })
        .collect()
}

// ============================================================================
// Peierls tail bounds
// ============================================================================

/// One tested pattern in the Peierls report.
#[derive(Clone, Debug, Serialize)]
pub struct PeierlsRow {
    pub pattern: SyndromeConfig,
    pub weight: usize,
    /// Exact containment probability `P[pattern ⊆ s]` under `pi_beta`.
    pub lhs: f64,
    /// The bound `e^{-beta weight}`.
    pub bound: f64,
}

impl PeierlsRow {
    #[must_use]
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound + 1e-12
    }
}

/// Checks `P[V ⊆ s] <= e^{-beta |V|}` for every erasable pattern `V` with
/// `1 <= |V| <= max_weight`, connected or not. Erasability of an indicator
/// is validity, so the candidates come from the same enumeration as the
/// measure itself.
pub fn peierls_check(code: &Code, beta: f64, max_weight: usize) -> Result<Vec<PeierlsRow>> {
    let gibbs = exact_gibbs(code, beta)?;
    let candidates: Vec<&SyndromeConfig> = gibbs
        .states
        .iter()
        .filter(|v| {
            let w = v.weight();
            w >= 1 && w <= max_weight
        })
        .collect();
    let mut rows = Vec::with_capacity(candidates.len());
    for v in candidates {
        let lhs: f64 = gibbs
            .states
            .iter()
            .zip(&gibbs.probs)
            .filter(|(s, _)| v.is_subset_of(s))
            .map(|(_, &p)| p)
            .sum();
        rows.push(PeierlsRow {
            pattern: (*v).clone(),
            weight: v.weight(),
            lhs,
            bound: (-beta * v.weight() as f64).exp(),
        });
    }
    Ok(rows)
}

// ============================================================================
// Markov property
// ============================================================================

/// A three-way split of the checks; `b` must screen `a` from `c`.
#[derive(Clone, Debug)]
pub struct Partition {
    pub a: BitVector,
    pub b: BitVector,
    pub c: BitVector,
}

impl Partition {
    /// Validates disjointness, coverage, and the screening precondition:
    /// no syndrome-network edge joins `a` directly to `c`.
    pub fn new(code: &Code, a: BitVector, b: BitVector, c: BitVector) -> Result<Self> {
        let m = code.num_checks();
        if a.len() != m || b.len() != m || c.len() != m {
            return Err(Error::Config("partition length mismatch".into()));
        }
        if a.intersects(&b) || a.intersects(&c) || b.intersects(&c) {
            return Err(Error::Config("partition parts overlap".into()));
        }
        if a.xor(&b).xor(&c).weight() != m {
            return Err(Error::Config("partition does not cover all checks".into()));
        }
        let net = code.network();
        for u in a.iter_ones() {
            if net.neighbors(u).iter().any(|&v| c.get(v)) {
                return Err(Error::Config(format!(
                    "screening violated: check {u} in A is adjacent to C"
                )));
            }
        }
        Ok(Partition { a, b, c })
    }
}

/// Conditional-independence defect of `s_A` and `s_C` given the middle
/// region: `max |P[a, c] - P[a] P[c]|` over all pattern pairs, under
/// `pi_beta` conditioned (when `conditioned` is set) on a quiet middle and
/// every component erasable. The unconditioned variant is the negative
/// control: with no conditioning the factorization has no reason to hold.
pub fn markov_defect(
    code: &Code,
    beta: f64,
    partition: &Partition,
    conditioned: bool,
) -> Result<f64> {
    let gibbs = exact_gibbs(code, beta)?;
    let all_erasable = |s: &SyndromeConfig| {
        code.network()
            .components(s)
            .iter()
            .all(|comp| code.is_erasable(&BitVector::from_indices(s.len(), comp)))
    };
    let dist = if conditioned {
        gibbs.condition_on(|s| !s.intersects(&partition.b) && all_erasable(s))
    } else {
        gibbs
    };
    let mut joint: HashMap<(BitVector, BitVector), f64> = HashMap::new();
    let mut marginal_a: HashMap<BitVector, f64> = HashMap::new();
    let mut marginal_c: HashMap<BitVector, f64> = HashMap::new();
    for (s, &p) in dist.states.iter().zip(&dist.probs) {
        let sa = s.and(&partition.a);
        let sc = s.and(&partition.c);
        *joint.entry((sa.clone(), sc.clone())).or_default() += p;
        *marginal_a.entry(sa).or_default() += p;
        *marginal_c.entry(sc).or_default() += p;
    }
    let mut worst = 0.0f64;
    for (sa, &pa) in &marginal_a {
        for (sc, &pc) in &marginal_c {
            let j = joint
                .get(&(sa.clone(), sc.clone()))
                .copied()
                .unwrap_or(0.0);
            worst = worst.max((j - pa * pc).abs());
        }
    }
    Ok(worst)
}

// ============================================================================
// Cluster distance
// ============================================================================

/// Exact cluster distances from `start` to every valid syndrome, by BFS
/// over the state graph whose edges join syndromes differing by a single
/// connected component. Unreachable states are absent from the map.
pub fn cluster_distances_from(
    code: &Code,
    start: &SyndromeConfig,
) -> Result<HashMap<SyndromeConfig, usize>> {
    let states = code.enumerate_valid_syndromes()?;
    if states.len() > MAX_KERNEL_STATES {
        return Err(Error::SizeGuard {
            what: "cluster state-graph size",
            actual: states.len(),
            limit: MAX_KERNEL_STATES,
        });
    }
    if !code.is_valid_syndrome(start) {
        return Err(Error::Config("cluster BFS start is not a valid syndrome".into()));
    }
    let net = code.network();
    let mut dist: HashMap<SyndromeConfig, usize> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for y in &states {
            if !dist.contains_key(y) && net.components(&x.xor(y)).len() == 1 {
                dist.insert(y.clone(), d + 1);
                queue.push_back(y.clone());
            }
        }
    }
    Ok(dist)
}

/// Convenience wrapper used by tests: the sampler-facing default mode for
/// block kernels is the exact conditional, which is what the enumerated
/// kernel models.
#[must_use]
pub fn default_block_mode() -> SamplerMode {
    SamplerMode::Exact
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_ising_torus;
    use crate::dynamics::{syndrome_step, ChainState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_code() -> Code {
        build_ising_torus(3, 2).unwrap()
    }

    #[test]
    fn gibbs_distribution_normalizes_and_orders_by_weight() {
        let code = toy_code();
        for beta in [0.5, 1.0, 2.0, 40.0] {
            let dist = exact_gibbs(&code, beta).unwrap();
            assert_eq!(dist.len(), 256);
            let zero = BitVector::zeros(code.num_checks());
            let p0 = dist.prob(&zero);
            assert!(dist.probs.iter().all(|&p| p <= p0 + 1e-15));
            // Two states of equal weight have equal probability.
            let mut by_weight: HashMap<usize, f64> = HashMap::new();
            for (s, &p) in dist.states.iter().zip(&dist.probs) {
                let expect = by_weight.entry(s.weight()).or_insert(p);
                assert!((p - *expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn one_dimensional_gibbs_matches_closed_form() {
        // Cycle of length 4: valid syndromes are the even edge subsets.
        let code = build_ising_torus(4, 1).unwrap();
        let dist = exact_gibbs(&code, 1.0).unwrap();
        assert_eq!(dist.len(), 8);
        let z: f64 = dist
            .states
            .iter()
            .map(|s| (-(s.weight() as f64)).exp())
            .sum();
        for (s, &p) in dist.states.iter().zip(&dist.probs) {
            let expect = (-(s.weight() as f64)).exp() / z;
            assert!((p - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn single_site_kernel_is_stationary_and_reversible() {
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        for beta in [0.5, 1.0, 2.0] {
            let kernel = exact_kernel(&code, beta, KernelKind::SingleSite, &dcfg).unwrap();
            let pi = align_distribution(&exact_gibbs(&code, beta).unwrap(), &kernel).unwrap();
            assert!(kernel.stationarity_defect(&pi) <= 1e-10);
            assert!(kernel.detailed_balance_defect(&pi) <= 1e-10);
        }
    }

    #[test]
    fn single_site_kernel_matches_empirical_chain() {
        // A short sanity run: the exact kernel's one-step law from zero
        // matches the empirical frequency of one syndrome step.
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        let beta = 1.0;
        let kernel = exact_kernel(&code, beta, KernelKind::SingleSite, &dcfg).unwrap();
        let zero = BitVector::zeros(code.num_checks());
        let x0 = kernel.states.iter().position(|s| *s == zero).unwrap();
        let trials = 200_000u64;
        let mut counts: HashMap<SyndromeConfig, u64> = HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..trials {
            let mut s = zero.clone();
            syndrome_step(&code, &mut s, beta, &mut rng);
            *counts.entry(s).or_default() += 1;
        }
        for &(y, p) in &kernel.rows[x0] {
            let empirical = counts
                .get(&kernel.states[y])
                .copied()
                .unwrap_or(0) as f64
                / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (empirical - p).abs() < 5.0 * sigma + 1e-4,
                "transition to state {y}: empirical {empirical} vs exact {p}"
            );
        }
    }

    #[test]
    fn radius_one_block_kernel_is_identity_on_reachable_set() {
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        let kernel = exact_kernel(&code, 1.0, KernelKind::Block { radius: 1 }, &dcfg).unwrap();
        let zero = BitVector::zeros(code.num_checks());
        let x0 = kernel.states.iter().position(|s| *s == zero).unwrap();
        let reach = kernel.reachable_from(x0, 1e-14);
        assert_eq!(reach, vec![x0], "radius-1 blocks support no excitation");
        assert!((kernel.entry(x0, x0) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn radius_two_block_kernel_is_stationary_on_reachable_set() {
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        let beta = 1.0;
        let kernel = exact_kernel(&code, beta, KernelKind::Block { radius: 2 }, &dcfg).unwrap();
        let gibbs = exact_gibbs(&code, beta).unwrap();
        let pi_full = align_distribution(&gibbs, &kernel).unwrap();
        let zero = BitVector::zeros(code.num_checks());
        let x0 = kernel.states.iter().position(|s| *s == zero).unwrap();
        let reach = kernel.reachable_from(x0, 1e-14);
        assert!(reach.len() > 1, "radius-2 blocks must move somewhere");
        let restricted = kernel.restrict(&reach, 1e-14).unwrap();
        let mass: f64 = reach.iter().map(|&i| pi_full[i]).sum();
        let pi: Vec<f64> = reach.iter().map(|&i| pi_full[i] / mass).collect();
        let stat = restricted.stationarity_defect(&pi);
        let db = restricted.detailed_balance_defect(&pi);
        assert!(stat <= 1e-10, "stationarity defect {stat}");
        assert!(db <= 1e-10, "detailed balance defect {db}");
    }

    #[test]
    fn restricted_kernel_is_stationary_on_its_class() {
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        let beta = 1.0;
        let max_component = 4;
        let kernel = exact_kernel(
            &code,
            beta,
            KernelKind::Restricted {
                radius: 2,
                max_component,
            },
            &dcfg,
        )
        .unwrap();
        assert!(kernel.num_states() < 256);
        let gibbs = exact_gibbs(&code, beta).unwrap();
        let index: HashMap<&SyndromeConfig, usize> = gibbs
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let raw: Vec<f64> = kernel.states.iter().map(|s| gibbs.probs[index[s]]).collect();
        let mass: f64 = raw.iter().sum();
        let pi: Vec<f64> = raw.iter().map(|p| p / mass).collect();
        // The restricted chain's stationary law on its reachable class is
        // pi_beta restricted there.
        let zero = BitVector::zeros(code.num_checks());
        let x0 = kernel.states.iter().position(|s| *s == zero).unwrap();
        let reach = kernel.reachable_from(x0, 1e-14);
        let restricted = kernel.restrict(&reach, 1e-14).unwrap();
        let reach_mass: f64 = reach.iter().map(|&i| pi[i]).sum();
        let pi_reach: Vec<f64> = reach.iter().map(|&i| pi[i] / reach_mass).collect();
        assert!(restricted.stationarity_defect(&pi_reach) <= 1e-10);
        assert!(restricted.detailed_balance_defect(&pi_reach) <= 1e-10);
    }

    #[test]
    fn block_kernel_row_matches_running_chain() {
        // Drive the live chain repeatedly from a fixed state through a
        // fixed center and compare against the enumerated branch law.
        let code = toy_code();
        let dcfg = DecoderConfig::default();
        let beta = 0.8;
        let center = 4;
        let radius = 2;
        let zero = BitVector::zeros(code.num_checks());
        let branches = exact_block_branches(&code, &zero, center, radius, beta, &dcfg);
        let mut law: HashMap<SyndromeConfig, f64> = HashMap::new();
        for (target, p) in branches {
            *law.entry(target).or_default() += p;
        }
        let trials = 60_000u64;
        let mut counts: HashMap<SyndromeConfig, u64> = HashMap::new();
        for k in 0..trials {
            let mut state = ChainState::new(&code, 1000, k);
            let out = crate::dynamics::conditional_block_step_at(
                &mut state,
                beta,
                center,
                radius,
                SamplerMode::Exact,
                &dcfg,
            );
            // Aborts (a drawn syndrome whose components cannot be repaired
            // in place) leave the state unchanged; the enumerated branches
            // fold exactly that mass into the self transition.
            if matches!(out, crate::dynamics::BlockOutcome::Aborted(_)) {
                assert_eq!(state.s, zero, "abort must leave the syndrome unchanged");
            }
            *counts.entry(state.s.clone()).or_default() += 1;
        }
        for (target, &p) in &law {
            let empirical = counts.get(target).copied().unwrap_or(0) as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (empirical - p).abs() < 5.0 * sigma + 1e-3,
                "branch mass mismatch: empirical {empirical} vs exact {p}"
            );
        }
    }

    #[test]
    fn peierls_bound_holds_on_the_torus() {
        let code = toy_code();
        for beta in [0.5, 1.0, 2.0] {
            let rows = peierls_check(&code, beta, 8).unwrap();
            assert!(!rows.is_empty());
            for row in &rows {
                assert!(
                    row.holds(),
                    "Peierls violated at weight {}: lhs {} > bound {}",
                    row.weight,
                    row.lhs,
                    row.bound
                );
            }
        }
    }

    #[test]
    fn screening_precondition_is_enforced() {
        let code = toy_code();
        let m = code.num_checks();
        // A single check in A, its neighbors NOT in B: should be rejected.
        let mut a = BitVector::zeros(m);
        a.set(0, true);
        let b = BitVector::zeros(m);
        let mut c = BitVector::ones(m);
        c.set(0, false);
        assert!(matches!(
            Partition::new(&code, a, b, c),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn conditioned_markov_defect_is_tiny_and_unconditioned_is_not() {
        let code = build_ising_torus(3, 2).unwrap();
        let m = code.num_checks();
        let net = code.network();
        // A = one check's star neighborhood seed: checks incident to
        // symbol 0; B = network boundary of A; C = the rest.
        let a = BitVector::from_indices(m, code.symbol_checks(0));
        let closed = net.closed_neighborhood(&a);
        let b = closed.and_not(&a);
        let c = BitVector::ones(m).and_not(&closed);
        let partition = Partition::new(&code, a, b, c).unwrap();
        let beta = 0.5;
        let conditioned = markov_defect(&code, beta, &partition, true).unwrap();
        let unconditioned = markov_defect(&code, beta, &partition, false).unwrap();
        assert!(
            conditioned <= 1e-12,
            "conditioned defect {conditioned} should vanish"
        );
        assert!(
            unconditioned > 1e-3,
            "unconditioned defect {unconditioned} should be visible"
        );
    }

    #[test]
    fn cluster_distance_proxy_bounds_exact_distance() {
        let code = build_ising_torus(6, 1).unwrap();
        let states = code.enumerate_valid_syndromes().unwrap();
        let net = code.network();
        for x in &states {
            let dist = cluster_distances_from(&code, x).unwrap();
            for y in &states {
                let exact = dist[y];
                let proxy = crate::dynamics::cluster_distance_proxy(x, y, net);
                assert!(
                    proxy >= exact,
                    "proxy {proxy} < exact {exact} for pair {x:?}, {y:?}"
                );
            }
        }
    }

    #[test]
    fn kernel_guard_rejects_oversized_spaces() {
        // 8x8 torus: rank 63 exceeds the enumeration guard.
        let code = build_ising_torus(8, 2).unwrap();
        assert!(matches!(
            exact_gibbs(&code, 1.0),
            Err(Error::SizeGuard { .. })
        ));
    }
}
