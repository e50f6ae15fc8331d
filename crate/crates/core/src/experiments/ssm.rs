//! Spatial-mixing diagnostics.
//!
//! Strong spatial mixing inside a domain `B` asks how much the conditional
//! law of the syndrome on a target region `A` moves when the checks of a
//! far region `C` are additionally pinned to zero. On enumerable instances
//! the discrepancy is computed exactly by conditioning the syndrome Gibbs
//! distribution. On larger instances a coupled pair of spin chains sharing
//! one random-number stream estimates the single-check weak-spatial-mixing
//! discrepancy with variance proportional to the (tiny) signal itself.

use std::collections::HashMap;

use crate::code::{Code, SyndromeNetwork};
use crate::dynamics::{acceptance, site_flip_delta};
use crate::error::{Error, Result};
use crate::experiments::lcc_tail::fit_slope;
use crate::gf2::BitVector;
use crate::oracle::exact_gibbs;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Regions of a spatial-mixing query: a domain `B` with a target `A` and a
/// pinned set `C`, both inside `B` and disjoint from each other.
#[derive(Clone, Debug)]
pub struct SsmRegions {
    pub b: BitVector,
    pub a: BitVector,
    pub c: BitVector,
}

impl SsmRegions {
    /// Validates containment and disjointness. `C` may be empty (the
    /// discrepancy is then exactly zero); `A` may not.
    pub fn new(b: BitVector, a: BitVector, c: BitVector) -> Result<Self> {
        if a.weight() == 0 {
            return Err(Error::Config("target region A is empty".into()));
        }
        if a.and_not(&b).weight() != 0 || c.and_not(&b).weight() != 0 {
            return Err(Error::Config("A and C must lie inside B".into()));
        }
        if a.intersects(&c) {
            return Err(Error::Config("A and C must be disjoint".into()));
        }
        Ok(SsmRegions { b, a, c })
    }
}

/// Checks at network distance exactly one from `region` (its external
/// boundary). Empty regions have empty boundaries.
#[must_use]
pub fn external_boundary(net: &SyndromeNetwork, region: &BitVector) -> BitVector {
    let sources = region.to_indices();
    if sources.is_empty() {
        return BitVector::zeros(region.len());
    }
    net.boundary(&sources, 0, 1)
}

/// Size cap on the target region for exact marginal comparison.
const MAX_TARGET_CHECKS: usize = 12;

/// Exact spatial-mixing discrepancy: the total-variation distance between
/// the `A`-marginals of the syndrome Gibbs distribution conditioned on a
/// zero syndrome along the external boundary of `B`, respectively of
/// `B \ C`. Pinning nothing extra (`C` empty) gives exactly zero.
pub fn ssm_exact_discrepancy(code: &Code, beta: f64, regions: &SsmRegions) -> Result<f64> {
    if regions.a.weight() > MAX_TARGET_CHECKS {
        return Err(Error::SizeGuard {
            what: "target region checks",
            actual: regions.a.weight(),
            limit: MAX_TARGET_CHECKS,
        });
    }
    let net = code.network();
    let bd_full = external_boundary(net, &regions.b);
    let bd_cut = external_boundary(net, &regions.b.and_not(&regions.c));
    let gibbs = exact_gibbs(code, beta)?;
    let full = gibbs.condition_on(|s| !s.intersects(&bd_full));
    let cut = gibbs.condition_on(|s| !s.intersects(&bd_cut));
    Ok(marginal_tv(&full.states, &full.probs, &cut.states, &cut.probs, &regions.a))
}

fn marginal_tv(
    xs: &[BitVector],
    xp: &[f64],
    ys: &[BitVector],
    yp: &[f64],
    a: &BitVector,
) -> f64 {
    let mut pa: HashMap<BitVector, f64> = HashMap::new();
    for (s, &p) in xs.iter().zip(xp) {
        *pa.entry(s.and(a)).or_insert(0.0) += p;
    }
    let mut pb: HashMap<BitVector, f64> = HashMap::new();
    for (s, &p) in ys.iter().zip(yp) {
        *pb.entry(s.and(a)).or_insert(0.0) += p;
    }
    let mut keys: Vec<&BitVector> = pa.keys().chain(pb.keys()).collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| (pa.get(*k).copied().unwrap_or(0.0) - pb.get(*k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Weak-spatial-mixing schedule by exact enumeration: the domain is the
/// whole check set, the target is the single check `u`, and the pinned set
/// is the sphere of checks at network distance exactly `r` from `u`, for
/// each requested radius (radii whose spheres are empty are skipped).
pub fn wsm_exact_schedule(
    code: &Code,
    beta: f64,
    u: usize,
    radii: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let net = code.network();
    let m = code.num_checks();
    let b = BitVector::ones(m);
    let mut a = BitVector::zeros(m);
    a.set(u, true);
    let mut out = Vec::new();
    for &r in radii {
        assert!(r >= 1, "pinning sphere needs positive radius");
        let c = net.boundary(&[u], r - 1, 1);
        if c.weight() == 0 {
            continue;
        }
        let regions = SsmRegions::new(b.clone(), a.clone(), c)?;
        out.push((r, ssm_exact_discrepancy(code, beta, &regions)?));
    }
    Ok(out)
}

/// A single-site spin chain with a pinned check set: symbols whose stars
/// touch a pinned check never move, which keeps the pinned checks at
/// syndrome zero for the whole run (the chain starts from the zero state).
pub struct PinnedChain<'c> {
    code: &'c Code,
    movable: Vec<bool>,
    /// Current symbol configuration.
    pub e: BitVector,
    /// Current syndrome.
    pub s: BitVector,
}

impl<'c> PinnedChain<'c> {
    #[must_use]
    pub fn new(code: &'c Code, pinned: &BitVector) -> Self {
        assert_eq!(pinned.len(), code.num_checks(), "pinned set is over checks");
        let movable = (0..code.num_symbols())
            .map(|i| code.symbol_checks(i).iter().all(|&c| !pinned.get(c)))
            .collect();
        PinnedChain {
            code,
            movable,
            e: BitVector::zeros(code.num_symbols()),
            s: BitVector::zeros(code.num_checks()),
        }
    }

    /// Number of symbols free to move.
    #[must_use]
    pub fn movable_count(&self) -> usize {
        self.movable.iter().filter(|&&b| b).count()
    }

    /// One shared-randomness update: flip `symbol` if it is movable and
    /// the uniform draw clears the heat-bath acceptance.
    pub fn try_flip(&mut self, symbol: usize, unif: f64, beta: f64) {
        if !self.movable[symbol] {
            return;
        }
        let delta = site_flip_delta(self.code, &self.s, symbol);
        if unif < acceptance(beta, delta) {
            self.e.set(symbol, !self.e.get(symbol));
            for &c in self.code.symbol_checks(symbol) {
                self.s.set(c, !self.s.get(c));
            }
        }
    }
}

/// Output of one coupled weak-spatial-mixing run.
#[derive(Clone, Copy, Debug)]
pub struct CoupledWsm {
    /// `|E[s_u pinned] - E[s_u free]|`: an unbiased estimate of the
    /// marginal difference, noisy at the scale of the raw signal.
    pub difference: f64,
    /// `P[the two coupled chains disagree on s_u]`: an upper bound on the
    /// marginal total variation by the coupling inequality, with relative
    /// noise set by the bound itself rather than by the raw signal.
    pub disagreement: f64,
}

/// Coupled estimate of the weak-spatial-mixing discrepancy at check `u`:
/// one chain pins every check outside the radius-`(radius - 1)` ball
/// around `u`, the other pins nothing, and both consume the same
/// `(symbol, uniform)` stream, so they diverge only where the pinning
/// constraint actually bites.
#[allow(clippy::too_many_arguments)]
pub fn wsm_coupled_estimate(
    code: &Code,
    beta: f64,
    u: usize,
    radius: usize,
    sweeps: u64,
    burn_sweeps: u64,
    seed: u64,
    stream: u64,
) -> CoupledWsm {
    assert!(radius >= 1 && sweeps > 0, "need a positive radius and sweeps");
    let m = code.num_checks();
    let pinned = BitVector::ones(m).and_not(&code.network().ball(&[u], radius - 1));
    let free = BitVector::zeros(m);
    let mut pin_chain = PinnedChain::new(code, &pinned);
    let mut ref_chain = PinnedChain::new(code, &free);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let n = code.num_symbols();
    let mut pin_hits = 0u64;
    let mut ref_hits = 0u64;
    let mut disagreements = 0u64;
    for sweepno in 0..burn_sweeps + sweeps {
        for _ in 0..n {
            let symbol = rng.random_range(0..n);
            let unif: f64 = rng.random();
            pin_chain.try_flip(symbol, unif, beta);
            ref_chain.try_flip(symbol, unif, beta);
        }
        if sweepno >= burn_sweeps {
            let a = pin_chain.s.get(u);
            let b = ref_chain.s.get(u);
            pin_hits += u64::from(a);
            ref_hits += u64::from(b);
            disagreements += u64::from(a != b);
        }
    }
    let pin_mean = pin_hits as f64 / sweeps as f64;
    let ref_mean = ref_hits as f64 / sweeps as f64;
    CoupledWsm {
        difference: (pin_mean - ref_mean).abs(),
        disagreement: disagreements as f64 / sweeps as f64,
    }
}

/// The unbiased marginal-difference estimate alone; see
/// [`wsm_coupled_estimate`].
#[allow(clippy::too_many_arguments)]
pub fn wsm_coupled_discrepancy(
    code: &Code,
    beta: f64,
    u: usize,
    radius: usize,
    sweeps: u64,
    burn_sweeps: u64,
    seed: u64,
    stream: u64,
) -> f64 {
    wsm_coupled_estimate(code, beta, u, radius, sweeps, burn_sweeps, seed, stream).difference
}

/// Least-squares slope of `ln(discrepancy)` against radius over the points
/// with positive discrepancy. `None` with fewer than two usable points.
#[must_use]
pub fn fit_log_slope(points: &[(usize, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|&(r, d)| (r as f64, d.ln()))
        .collect();
    fit_slope(&pts)
}

/// Analytic reference rate for the discrepancy decay per unit radius,
/// `(beta - beta0(d)) / 2` with `beta0(d) = 1 + 2 ln(4d)`. Recorded next
/// to measured slopes for context; nothing asserts against it.
#[must_use]
pub fn predicted_decay_rate(beta: f64, degree: usize) -> f64 {
    (beta - (1.0 + 2.0 * (4.0 * degree as f64).ln())) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_ising_torus;

    #[test]
    fn empty_pinned_set_gives_exactly_zero() {
        let code = build_ising_torus(3, 2).unwrap();
        let m = code.num_checks();
        let mut a = BitVector::zeros(m);
        a.set(0, true);
        let mut b = BitVector::zeros(m);
        for i in 0..10 {
            b.set(i, true);
        }
        let regions = SsmRegions::new(b, a, BitVector::zeros(m)).unwrap();
        let disc = ssm_exact_discrepancy(&code, 1.0, &regions).unwrap();
        assert_eq!(disc, 0.0, "pinning nothing extra must change nothing");
    }

    #[test]
    fn region_validation() {
        let m = 18;
        let b = BitVector::zeros(m);
        let mut a = BitVector::zeros(m);
        a.set(0, true);
        assert!(SsmRegions::new(b.clone(), BitVector::zeros(m), b.clone()).is_err());
        // A outside B.
        assert!(SsmRegions::new(b, a.clone(), BitVector::zeros(m)).is_err());
        // A and C overlap.
        let ones = BitVector::ones(m);
        assert!(SsmRegions::new(ones.clone(), a.clone(), a.clone()).is_err());
        assert!(SsmRegions::new(ones, a.clone(), BitVector::zeros(m)).is_ok());
    }

    #[test]
    fn oversized_target_is_refused() {
        let code = build_ising_torus(3, 2).unwrap();
        let m = code.num_checks();
        let mut a = BitVector::zeros(m);
        for i in 0..13 {
            a.set(i, true);
        }
        let regions = SsmRegions::new(BitVector::ones(m), a, BitVector::zeros(m)).unwrap();
        assert!(matches!(
            ssm_exact_discrepancy(&code, 1.0, &regions),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn exact_schedule_decays_on_a_small_torus() {
        let code = build_ising_torus(3, 2).unwrap();
        let sched = wsm_exact_schedule(&code, 2.0, 0, &[1, 2]).unwrap();
        assert_eq!(sched.len(), 2);
        assert!(
            sched[0].1 >= sched[1].1,
            "pinning farther must not tighten the marginal: {:?}",
            sched
        );
        assert!(sched[0].1 > 0.0, "adjacent pinning must be felt");
    }

    #[test]
    fn pinned_chain_respects_its_pins() {
        let code = build_ising_torus(4, 2).unwrap();
        let m = code.num_checks();
        // Pin everything outside the radius-2 ball around check 0.
        let pinned = BitVector::ones(m).and_not(&code.network().ball(&[0], 2));
        let mut chain = PinnedChain::new(&code, &pinned);
        assert!(chain.movable_count() > 0, "radius-2 ball frees the endpoints");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let sym = rng.random_range(0..code.num_symbols());
            let u: f64 = rng.random();
            chain.try_flip(sym, u, 0.3);
        }
        assert!(
            !chain.s.intersects(&pinned),
            "pinned checks must stay at syndrome zero"
        );
        assert_eq!(code.syndrome(&chain.e), chain.s, "incremental syndrome drifted");
    }

    #[test]
    fn coupled_estimate_sees_the_near_far_cliff() {
        let code = build_ising_torus(8, 2).unwrap();
        let beta = 1.5;
        // radius 1 pins everything but u itself: the pinned chain is frozen,
        // so the estimate is the full equilibrium weight of s_u = 1.
        let near = wsm_coupled_estimate(&code, beta, 0, 1, 6_000, 500, 61, 0);
        let far = wsm_coupled_estimate(&code, beta, 0, 3, 6_000, 500, 61, 2);
        assert!(
            near.difference > 0.002,
            "frozen-chain discrepancy should be order 2e^(-4 beta), got {}",
            near.difference
        );
        assert!(
            far.difference < near.difference,
            "freeing the dominant excitations must shrink the discrepancy: near {}, far {}",
            near.difference,
            far.difference
        );
        // The coupling bound dominates the unbiased difference and shows
        // the same cliff.
        assert!(near.disagreement >= near.difference - 1e-12);
        assert!(far.disagreement >= far.difference - 1e-12);
        assert!(far.disagreement < near.disagreement);
    }

    #[test]
    fn slope_fit_and_reference_rate() {
        let pts = vec![(1, 0.1), (2, 0.01), (3, 0.001)];
        let slope = fit_log_slope(&pts).unwrap();
        assert!((slope + std::f64::consts::LN_10).abs() < 1e-9);
        assert!(fit_log_slope(&[(1, 0.0), (2, 0.0)]).is_none());
        // The reference rate is negative below the degree threshold and
        // grows linearly in beta thereafter.
        assert!(predicted_decay_rate(1.0, 6) < 0.0);
        let lo = predicted_decay_rate(8.0, 6);
        let hi = predicted_decay_rate(9.0, 6);
        assert!((hi - lo - 0.5).abs() < 1e-12);
    }
}
