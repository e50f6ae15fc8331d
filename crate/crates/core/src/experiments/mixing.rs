//! Mixing diagnostics.
//!
//! On enumerable instances the mixing curve is computed exactly by kernel
//! powers from the all-zero state. On larger instances convergence is
//! tracked empirically as total-variation lower bounds over binned scalar
//! observables, against a long-equilibrated reference ensemble. The
//! fast-block versus slow-single-site instruments (reference energy band,
//! sweeps-to-band, majority-sign flips) live here too.

use std::collections::HashMap;

use crate::code::Code;
use crate::decoder::DecoderConfig;
use crate::dynamics::{glauber_step, ChainKind, ChainState, continuous_run};
use crate::error::{Error, Result};
use crate::experiments::{observe, run_replicas, ExperimentConfig, ObservableRecord};
use crate::gf2::BitVector;
use crate::oracle::{exact_gibbs, exact_kernel, KernelKind};

/// Exact distance-to-stationarity trace from the all-zero syndrome.
#[derive(Clone, Debug)]
pub struct MixingCurve {
    /// Discrete times `0..=t_max`.
    pub times: Vec<u64>,
    /// `||P^t(0, .) - pi||_1` per time.
    pub l1: Vec<f64>,
    /// First time the distance drops to `threshold` or below, if any.
    pub crossing: Option<u64>,
}

/// Computes the exact mixing curve by kernel powers. The target is the
/// syndrome Gibbs distribution restricted to the kernel's state list and
/// renormalized (that restriction is only proper for the restricted
/// chain; for the others the list is the full space).
pub fn exact_mixing_curve(
    code: &Code,
    beta: f64,
    kind: KernelKind,
    dcfg: &DecoderConfig,
    t_max: u64,
    threshold: f64,
) -> Result<MixingCurve> {
    let kernel = exact_kernel(code, beta, kind, dcfg)?;
    let gibbs = exact_gibbs(code, beta)?;
    let index: HashMap<&BitVector, usize> = gibbs
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let raw: Vec<f64> = kernel
        .states
        .iter()
        .map(|s| {
            index
                .get(s)
                .map(|&i| gibbs.probs[i])
                .ok_or_else(|| Error::Guard("kernel state outside the Gibbs support".into()))
        })
        .collect::<Result<_>>()?;
    let mass: f64 = raw.iter().sum();
    let pi: Vec<f64> = raw.iter().map(|p| p / mass).collect();

    let zero = BitVector::zeros(code.num_checks());
    let start = kernel
        .states
        .iter()
        .position(|s| *s == zero)
        .ok_or_else(|| Error::Guard("all-zero syndrome missing from kernel space".into()))?;
    let mut p = vec![0.0f64; pi.len()];
    p[start] = 1.0;

    let mut times = Vec::with_capacity(t_max as usize + 1);
    let mut l1 = Vec::with_capacity(t_max as usize + 1);
    let mut crossing = None;
    for t in 0..=t_max {
        let dist: f64 = p.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        times.push(t);
        l1.push(dist);
        if crossing.is_none() && dist <= threshold {
            crossing = Some(t);
        }
        if t < t_max {
            let mut next = vec![0.0f64; p.len()];
            for (x, row) in kernel.rows.iter().enumerate() {
                if p[x] == 0.0 {
                    continue;
                }
                for &(y, q) in row {
                    next[y] += p[x] * q;
                }
            }
            p = next;
        }
    }
    Ok(MixingCurve { times, l1, crossing })
}

/// One binned-TV estimate: a named observable at a grid time.
#[derive(Clone, Debug)]
pub struct BinnedTvPoint {
    pub time: f64,
    pub observable: String,
    /// TV between the running ensemble's histogram and the reference
    /// histogram. A lower bound on the true state-space TV.
    pub tv_lower: f64,
}

/// Stream offset separating reference replicas from running replicas.
const REFERENCE_STREAM_OFFSET: u64 = 1 << 32;

/// Empirical mixing on instances too large to enumerate: runs the
/// configured chain from the all-zero state and reports, per grid time,
/// the TV distance between the ensemble histogram and a reference
/// ensemble equilibrated for four times the horizon, separately for the
/// energy and the component-count observables. Both are lower bounds on
/// the true total variation; the observable set is named in the output.
pub fn empirical_mixing(
    cfg: &ExperimentConfig,
    dcfg: &DecoderConfig,
) -> Result<(Vec<ObservableRecord>, Vec<BinnedTvPoint>)> {
    cfg.validate()?;
    let code = cfg.code.build()?;
    let horizon = *cfg.time_grid.last().expect("validated nonempty");

    // Running ensemble: one record per (replica, grid time).
    let records = run_replicas(cfg.replicas, |r| {
        let mut state = ChainState::new(&code, cfg.seed, r);
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(cfg.time_grid.len());
        for &t in &cfg.time_grid {
            continuous_run(&mut state, cfg.beta, t - prev, cfg.chain, dcfg);
            prev = t;
            out.push(observe(&state, r, t));
        }
        out
    });

    // Reference ensemble: equilibrated well past the horizon.
    let reference = run_replicas(cfg.replicas, |r| {
        let mut state = ChainState::new(&code, cfg.seed, REFERENCE_STREAM_OFFSET + r);
        continuous_run(&mut state, cfg.beta, 4.0 * horizon, cfg.chain, dcfg);
        vec![observe(&state, r, 4.0 * horizon)]
    });

    let ref_energy = histogram(reference.iter().map(|rec| rec.energy));
    let ref_components = histogram(reference.iter().map(|rec| rec.component_count));

    let mut points = Vec::new();
    for &t in &cfg.time_grid {
        let at_t: Vec<&ObservableRecord> =
            records.iter().filter(|rec| rec.time == t).collect();
        let energy = histogram(at_t.iter().map(|rec| rec.energy));
        let components = histogram(at_t.iter().map(|rec| rec.component_count));
        points.push(BinnedTvPoint {
            time: t,
            observable: "energy".into(),
            tv_lower: histogram_tv(&energy, &ref_energy),
        });
        points.push(BinnedTvPoint {
            time: t,
            observable: "component_count".into(),
            tv_lower: histogram_tv(&components, &ref_components),
        });
    }
    Ok((records, points))
}

fn histogram<I: Iterator<Item = u64>>(values: I) -> HashMap<u64, u64> {
    let mut h = HashMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

fn histogram_tv(a: &HashMap<u64, u64>, b: &HashMap<u64, u64>) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    assert!(na > 0 && nb > 0, "empty histogram in TV estimate");
    let mut keys: Vec<u64> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na as f64;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
}

// ============================================================================
// Fast-vs-slow dichotomy instruments
// ============================================================================

/// Energy-density band of an equilibrated reference ensemble.
#[derive(Clone, Copy, Debug)]
pub struct EnergyBand {
    pub lo: f64,
    pub hi: f64,
}

impl EnergyBand {
    #[must_use]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Runs `replicas` chains for `burn_sweeps` sweeps (one sweep is `n` site
/// updates for the single-site chains, `m` block updates otherwise), then
/// averages the energy density over `window_sweeps` further sweeps per
/// replica. The band is the min..max of the replica averages.
#[allow(clippy::too_many_arguments)]
pub fn reference_energy_band(
    code: &Code,
    beta: f64,
    kind: ChainKind,
    dcfg: &DecoderConfig,
    replicas: u64,
    burn_sweeps: u64,
    window_sweeps: u64,
    seed: u64,
    stream0: u64,
) -> EnergyBand {
    assert!(replicas > 0 && window_sweeps > 0, "empty reference ensemble");
    let averages = run_replicas(replicas, |r| {
        let mut state = ChainState::new(code, seed, stream0 + r);
        for _ in 0..burn_sweeps {
            sweep(&mut state, beta, kind, dcfg);
        }
        let mut total = 0u64;
        for _ in 0..window_sweeps {
            sweep(&mut state, beta, kind, dcfg);
            total += state.energy() as u64;
        }
        let m = code.num_checks() as f64;
        vec![total as f64 / (window_sweeps as f64 * m)]
    });
    let lo = averages.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = averages.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    EnergyBand { lo, hi }
}

/// One sweep of the given chain kind: `n` site updates for the site-level
/// chains, `m` block updates for the block chains.
pub fn sweep(state: &mut ChainState, beta: f64, kind: ChainKind, dcfg: &DecoderConfig) {
    match kind {
        ChainKind::Glauber | ChainKind::Syndrome => {
            for _ in 0..state.code().num_symbols() {
                glauber_step(state, beta);
            }
        }
        _ => {
            // Block chains run at rate m, so unit time is one expected
            // sweep of m block updates.
            continuous_run(state, beta, 1.0, kind, dcfg);
        }
    }
}

/// Sweeps the chain from the all-zero state until its trailing
/// `window_sweeps`-sweep average energy density first falls inside `band`
/// (the same statistic the reference band is made of), up to `max_sweeps`.
/// Returns the sweep count, or `None` if the band is never entered.
#[allow(clippy::too_many_arguments)]
pub fn sweeps_to_band(
    code: &Code,
    beta: f64,
    kind: ChainKind,
    dcfg: &DecoderConfig,
    band: EnergyBand,
    window_sweeps: u64,
    max_sweeps: u64,
    seed: u64,
    stream: u64,
) -> Option<u64> {
    assert!(window_sweeps > 0, "band entry needs a positive window");
    let mut state = ChainState::new(code, seed, stream);
    let m = code.num_checks() as f64;
    let mut window: std::collections::VecDeque<u64> =
        std::collections::VecDeque::with_capacity(window_sweeps as usize);
    let mut running = 0u64;
    for sweepno in 1..=max_sweeps {
        sweep(&mut state, beta, kind, dcfg);
        window.push_back(state.energy() as u64);
        running += state.energy() as u64;
        if window.len() as u64 > window_sweeps {
            running -= window.pop_front().expect("window is nonempty");
        }
        if window.len() as u64 == window_sweeps
            && band.contains(running as f64 / (window_sweeps as f64 * m))
        {
            return Some(sweepno);
        }
    }
    None
}

/// Runs the single-site chain from the all-zero state for `sweeps` sweeps
/// and counts sign changes of the magnetization `n - 2|e|`, sampled once
/// per sweep. Zero means the symbol majority never flipped.
pub fn majority_flips(code: &Code, beta: f64, sweeps: u64, seed: u64, stream: u64) -> u64 {
    let mut state = ChainState::new(code, seed, stream);
    let n = code.num_symbols() as i64;
    let mut sign = 1i64; // all-zero start: majority is the zero symbol
    let mut flips = 0;
    for _ in 0..sweeps {
        for _ in 0..code.num_symbols() {
            glauber_step(&mut state, beta);
        }
        let mag = n - 2 * state.e.weight() as i64;
        if mag != 0 && (mag > 0) != (sign > 0) {
            flips += 1;
            sign = mag.signum();
        }
    }
    flips
}
