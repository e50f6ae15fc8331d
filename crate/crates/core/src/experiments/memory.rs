//! Memory-lifetime experiments.
//!
//! A replica starts from the zero error, evolves under the configured
//! chain, and is decoded at each grid time; the verdict on the cumulative
//! error (identity, stabilizer, logical, undecodable) is what the record
//! carries. The curve aggregates the logical and undecodable fractions
//! per grid point. Long block trajectories with periodic verdicts support
//! the no-logical-drift checks.

use crate::code::Code;
use crate::decoder::{classify_residual, DecoderConfig, DecoderKind, ResidualClass};
use crate::dynamics::{
    conditional_block_step, continuous_run, BlockOutcome, ChainState, SamplerMode,
};
use crate::error::Result;
use crate::experiments::{observe, run_replicas, ExperimentConfig, ObservableRecord};

/// Failure fractions along the time grid.
#[derive(Clone, Debug)]
pub struct MemoryCurve {
    pub times: Vec<f64>,
    /// Fraction of replicas whose verdict is logical at each grid time.
    pub logical: Vec<f64>,
    /// Fraction of replicas the decoder gave up on, counted separately.
    pub undecodable: Vec<f64>,
}

/// Runs the configured chain per replica, decoding the cumulative error at
/// every grid time. Returns the raw records (one per replica and grid
/// time, verdict filled in) plus the aggregated failure curve.
pub fn memory_experiment(
    cfg: &ExperimentConfig,
    decoder: DecoderKind,
    dcfg: &DecoderConfig,
) -> Result<(Vec<ObservableRecord>, MemoryCurve)> {
    cfg.validate()?;
    let code = cfg.code.build()?;
    let records = run_replicas(cfg.replicas, |r| {
        let mut state = ChainState::new(&code, cfg.seed, r);
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(cfg.time_grid.len());
        for &t in &cfg.time_grid {
            continuous_run(&mut state, cfg.beta, t - prev, cfg.chain, dcfg);
            prev = t;
            let mut rec = observe(&state, r, t);
            rec.verdict = Some(classify_residual(&code, &state.e, decoder, dcfg));
            out.push(rec);
        }
        out
    });

    let replicas = cfg.replicas as f64;
    let mut logical = vec![0.0; cfg.time_grid.len()];
    let mut undecodable = vec![0.0; cfg.time_grid.len()];
    for (i, &t) in cfg.time_grid.iter().enumerate() {
        for rec in records.iter().filter(|rec| rec.time == t) {
            match rec.verdict {
                Some(ResidualClass::Logical) => logical[i] += 1.0,
                Some(ResidualClass::Undecodable) => undecodable[i] += 1.0,
                _ => {}
            }
        }
        logical[i] /= replicas;
        undecodable[i] /= replicas;
    }
    Ok((
        records,
        MemoryCurve {
            times: cfg.time_grid.clone(),
            logical,
            undecodable,
        },
    ))
}

/// First grid time at which a replica's verdict turns logical, per
/// replica; `None` when the replica survives the whole horizon. Verdicts
/// are read off the records of a [`memory_experiment`] run.
#[must_use]
pub fn failure_times(records: &[ObservableRecord], replicas: u64) -> Vec<Option<f64>> {
    (0..replicas)
        .map(|r| {
            records
                .iter()
                .filter(|rec| rec.replica == r)
                .find(|rec| rec.verdict == Some(ResidualClass::Logical))
                .map(|rec| rec.time)
        })
        .collect()
}

/// Median of failure times with censoring: survivors count as `horizon`,
/// so the result is a lower bound when more than half survive.
#[must_use]
pub fn censored_median_time(times: &[Option<f64>], horizon: f64) -> f64 {
    assert!(!times.is_empty(), "median of an empty sample");
    let mut v: Vec<f64> = times.iter().map(|t| t.unwrap_or(horizon)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("failure times are finite"));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Summary of one long discrete-step block trajectory.
#[derive(Clone, Debug)]
pub struct TrajectoryReport {
    /// (step, verdict) at each checkpoint, in step order.
    pub checkpoints: Vec<(u64, ResidualClass)>,
    /// Steps on which a guard tripped and the state was left unchanged.
    pub aborts: u64,
    /// Steps whose interior was empty after freezing exclusions.
    pub empty: u64,
}

/// Drives `total_steps` conditional block updates, decoding the cumulative
/// error every `checkpoint_every` steps (and at the final step). Guard
/// aborts leave the state unchanged and are tallied, never hidden.
#[allow(clippy::too_many_arguments)]
pub fn block_trajectory(
    code: &Code,
    beta: f64,
    radius: usize,
    mode: SamplerMode,
    dcfg: &DecoderConfig,
    decoder: DecoderKind,
    total_steps: u64,
    checkpoint_every: u64,
    seed: u64,
    stream: u64,
) -> TrajectoryReport {
    assert!(checkpoint_every > 0, "checkpoint interval must be positive");
    let mut state = ChainState::new(code, seed, stream);
    let mut checkpoints = Vec::new();
    let mut aborts = 0;
    let mut empty = 0;
    for step in 1..=total_steps {
        match conditional_block_step(&mut state, beta, radius, mode, dcfg) {
            BlockOutcome::Aborted(_) => aborts += 1,
            BlockOutcome::EmptyInterior => empty += 1,
            BlockOutcome::Applied | BlockOutcome::Rejected => {}
        }
        if step % checkpoint_every == 0 || step == total_steps {
            checkpoints.push((step, classify_residual(code, &state.e, decoder, dcfg)));
        }
    }
    TrajectoryReport {
        checkpoints,
        aborts,
        empty,
    }
}
