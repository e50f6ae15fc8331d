//! Escape-time experiments.
//!
//! A replica starts from the zero syndrome and runs discrete block updates
//! until the largest connected excitation component first exceeds a size
//! cap, or a step horizon runs out. Low temperature makes escape
//! exponentially slow in the cap, which the censored medians expose.

use crate::code::Code;
use crate::decoder::DecoderConfig;
use crate::dynamics::{component_stats, conditional_block_step, ChainState, SamplerMode};
use crate::experiments::run_replicas;

/// For each replica, the first step at which the largest component of the
/// syndrome exceeds `r_cap`, or `None` if that never happens within
/// `max_steps`. A cap at or above the check count can never be exceeded.
#[allow(clippy::too_many_arguments)]
pub fn escape_times(
    code: &Code,
    beta: f64,
    radius: usize,
    mode: SamplerMode,
    dcfg: &DecoderConfig,
    r_cap: usize,
    max_steps: u64,
    replicas: u64,
    seed: u64,
    stream0: u64,
) -> Vec<Option<u64>> {
    run_replicas(replicas, |r| {
        let mut state = ChainState::new(code, seed, stream0 + r);
        let mut hit = None;
        for step in 1..=max_steps {
            conditional_block_step(&mut state, beta, radius, mode, dcfg);
            let (_, largest) = component_stats(code.network(), &state.s);
            if largest > r_cap {
                hit = Some(step);
                break;
            }
        }
        vec![hit]
    })
}

/// Median escape step with censoring: replicas that never escaped count as
/// `horizon`, so when more than half are censored the value is a lower
/// bound on the true median.
#[must_use]
pub fn censored_median(times: &[Option<u64>], horizon: u64) -> f64 {
    assert!(!times.is_empty(), "median of an empty sample");
    let mut v: Vec<u64> = times.iter().map(|t| t.unwrap_or(horizon)).collect();
    v.sort_unstable();
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid] as f64
    } else {
        0.5 * (v[mid - 1] as f64 + v[mid] as f64)
    }
}

/// Fraction of replicas still confined at the horizon.
#[must_use]
pub fn censored_fraction(times: &[Option<u64>]) -> f64 {
    assert!(!times.is_empty(), "fraction of an empty sample");
    times.iter().filter(|t| t.is_none()).count() as f64 / times.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_ising_torus;

    #[test]
    fn cap_at_check_count_never_escapes() {
        let code = build_ising_torus(3, 2).unwrap();
        let dcfg = DecoderConfig::default();
        let times = escape_times(
            &code,
            0.5,
            2,
            SamplerMode::Exact,
            &dcfg,
            code.num_checks(),
            200,
            4,
            41,
            0,
        );
        assert!(times.iter().all(Option::is_none));
        assert_eq!(censored_fraction(&times), 1.0);
    }

    #[test]
    fn hot_chain_escapes_a_small_cap() {
        let code = build_ising_torus(4, 2).unwrap();
        let dcfg = DecoderConfig::default();
        let times = escape_times(
            &code,
            0.5,
            2,
            SamplerMode::Exact,
            &dcfg,
            4,
            20_000,
            8,
            42,
            0,
        );
        assert!(
            times.iter().filter(|t| t.is_some()).count() >= 6,
            "beta=0.5 should grow a component past 4 checks in most replicas"
        );
        let med = censored_median(&times, 20_000);
        assert!(med > 0.0);
    }

    #[test]
    fn median_handles_censoring() {
        let times = vec![Some(10), Some(20), None, None, None];
        assert_eq!(censored_median(&times, 1_000), 1_000.0);
        let times = vec![Some(10), Some(20), Some(30)];
        assert_eq!(censored_median(&times, 1_000), 20.0);
        let times = vec![Some(10), None];
        assert_eq!(censored_median(&times, 100), 55.0);
    }
}
