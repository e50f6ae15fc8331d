//! Largest-component tail statistics.
//!
//! The probability that the largest connected excitation component reaches
//! size `ell` decays geometrically at low temperature. The table compares
//! the measured tail (exact enumeration on small instances, equilibrated
//! sampling otherwise) against the cluster-counting bound
//! `m^nu (d e^{1-beta})^ell / (1 - d e^{1-beta})`, which is infinite when
//! the base `d e^{1-beta}` reaches one.

use crate::code::Code;
use crate::dynamics::{component_stats, glauber_step, ChainState};
use crate::error::Result;
use crate::oracle::exact_gibbs;

/// Tail of the largest-component size, with the matching analytic bound.
#[derive(Clone, Debug)]
pub struct TailTable {
    /// Component sizes `1..=m`.
    pub ell: Vec<usize>,
    /// `P[largest component >= ell]` per row.
    pub empirical: Vec<f64>,
    /// Cluster-counting bound per row (may be infinite).
    pub bound: Vec<f64>,
    /// Sample count behind `empirical` (zero for exact enumeration).
    pub samples: u64,
}

/// Cluster-counting tail bound at size `ell`.
#[must_use]
pub fn tail_bound(code: &Code, beta: f64, ell: usize) -> f64 {
    let d = code.profile().network_degree as f64;
    let nu = code.profile().component_budget;
    let base = d * (1.0 - beta).exp();
    if base >= 1.0 {
        return f64::INFINITY;
    }
    let m = code.num_checks() as f64;
    m.powf(nu) * base.powi(ell as i32) / (1.0 - base)
}

fn table_from_tail_counts(code: &Code, beta: f64, mass_at_least: Vec<f64>, samples: u64) -> TailTable {
    let ell: Vec<usize> = (1..=code.num_checks()).collect();
    let bound = ell.iter().map(|&l| tail_bound(code, beta, l)).collect();
    TailTable {
        ell,
        empirical: mass_at_least,
        bound,
        samples,
    }
}

/// Exact tail by enumerating the syndrome Gibbs distribution.
pub fn exact_tail(code: &Code, beta: f64) -> Result<TailTable> {
    let gibbs = exact_gibbs(code, beta)?;
    let m = code.num_checks();
    let mut at_least = vec![0.0f64; m];
    for (s, &p) in gibbs.states.iter().zip(&gibbs.probs) {
        let (_, largest) = component_stats(code.network(), s);
        for slot in at_least.iter_mut().take(largest) {
            *slot += p;
        }
    }
    Ok(table_from_tail_counts(code, beta, at_least, 0))
}

/// Sampled tail from an equilibrated single-site chain: burn `burn_sweeps`
/// full sweeps, then record the largest component every `thin_steps` site
/// updates until `samples` measurements are in.
#[allow(clippy::too_many_arguments)]
pub fn sampled_tail(
    code: &Code,
    beta: f64,
    samples: u64,
    burn_sweeps: u64,
    thin_steps: u64,
    seed: u64,
    stream: u64,
) -> TailTable {
    assert!(samples > 0 && thin_steps > 0, "empty sampling plan");
    let mut state = ChainState::new(code, seed, stream);
    for _ in 0..burn_sweeps * code.num_symbols() as u64 {
        glauber_step(&mut state, beta);
    }
    let m = code.num_checks();
    let mut counts = vec![0u64; m];
    for _ in 0..samples {
        for _ in 0..thin_steps {
            glauber_step(&mut state, beta);
        }
        let (_, largest) = component_stats(code.network(), &state.s);
        for slot in counts.iter_mut().take(largest) {
            *slot += 1;
        }
    }
    let at_least = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    table_from_tail_counts(code, beta, at_least, samples)
}

/// Least-squares slope of `ln(empirical)` against `ell`, over the rows
/// with positive mass. `None` when fewer than two such rows exist.
#[must_use]
pub fn log_tail_slope(table: &TailTable) -> Option<f64> {
    let pts: Vec<(f64, f64)> = table
        .ell
        .iter()
        .zip(&table.empirical)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&l, &p)| (l as f64, p.ln()))
        .collect();
    fit_slope(&pts)
}

/// Ordinary least-squares slope through `(x, y)` points; `None` when the
/// abscissas do not span at least two distinct values.
#[must_use]
pub fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
