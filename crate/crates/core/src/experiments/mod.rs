//! Scripted experiment drivers: mixing curves, memory-failure curves,
//! small-loop escape times, largest-component tails, spatial-mixing
//! discrepancies, and separating-surface statistics.
//!
//! Every driver is deterministic given `(config, seed)`: replicas run on
//! disjoint RNG streams derived from the seed, parallel execution merges
//! records in replica order, and the CSV/JSON emitters format numbers with
//! shortest-roundtrip rendering, so a rerun is byte-identical.

pub mod escape;
pub mod lcc_tail;
pub mod memory;
pub mod mixing;
pub mod ssm;
pub mod surface;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::CodeSpec;
use crate::decoder::ResidualClass;
use crate::dynamics::{component_stats, ChainKind, ChainState};
use crate::error::{Error, Result};

/// Shared experiment parameters. Drivers that need extra knobs (a decoder,
/// a component cap, spatial regions) take them as explicit arguments on
/// top of this block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub code: CodeSpec,
    pub beta: f64,
    pub chain: ChainKind,
    pub replicas: u64,
    /// Continuous-time checkpoints, strictly increasing.
    pub time_grid: Vec<f64>,
    /// Root seed. Mandatory: every replica derives its stream from it.
    pub seed: u64,
    /// Names of the observables a TV estimate was computed over, recorded
    /// so binned-TV lower bounds are never mistaken for full TV.
    #[serde(default)]
    pub observables: Vec<String>,
    /// Output destination, used by the command-line driver.
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentConfig {
    /// Validates the cross-field invariants that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::Config(format!(
                "beta must be finite and nonnegative (got {})",
                self.beta
            )));
        }
        if self.replicas == 0 {
            return Err(Error::Config("replica count must be positive".into()));
        }
        if self.time_grid.is_empty() {
            return Err(Error::Config("time grid must be nonempty".into()));
        }
        let mut prev = -1.0f64;
        for &t in &self.time_grid {
            if !t.is_finite() || t < 0.0 || t <= prev {
                return Err(Error::Config(format!(
                    "time grid must be strictly increasing and nonnegative \
                     (offending entry {t})"
                )));
            }
            prev = t;
        }
        Ok(())
    }
}

/// One row of an experiment's record stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub replica: u64,
    pub step: u64,
    pub time: f64,
    pub energy: u64,
    pub energy_density: f64,
    pub component_count: u64,
    pub largest_component: u64,
    /// Decoder verdict at a checkpoint, when the experiment decodes.
    pub verdict: Option<ResidualClass>,
}

/// Snapshots the chain's observables at a checkpoint.
#[must_use]
pub fn observe(state: &ChainState, replica: u64, time: f64) -> ObservableRecord {
    let (count, largest) = component_stats(state.code().network(), &state.s);
    ObservableRecord {
        replica,
        step: state.steps,
        time,
        energy: state.energy() as u64,
        energy_density: state.energy() as f64 / state.code().num_checks() as f64,
        component_count: count as u64,
        largest_component: largest as u64,
        verdict: None,
    }
}

/// Runs one closure per replica in parallel and concatenates the record
/// streams in replica order. The closure must be deterministic in its
/// replica index; merged output is then independent of thread scheduling.
pub fn run_replicas<T, F>(replicas: u64, per_replica: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Vec<T> + Sync + Send,
{
    (0..replicas)
        .into_par_iter()
        .map(per_replica)
        .collect::<Vec<Vec<T>>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Renders records as a CSV table with a fixed header. Line endings are
/// `\n`, quoting is minimal RFC style, and floats use shortest-roundtrip
/// formatting, so equal inputs yield byte-equal output.
pub fn records_to_csv(records: &[ObservableRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record([
        "replica",
        "step",
        "time",
        "energy",
        "energy_density",
        "component_count",
        "largest_component",
        "verdict",
    ])
    .map_err(|e| Error::Serialize(e.to_string()))?;
    for r in records {
        w.write_record([
            r.replica.to_string(),
            r.step.to_string(),
            r.time.to_string(),
            r.energy.to_string(),
            r.energy_density.to_string(),
            r.component_count.to_string(),
            r.largest_component.to_string(),
            verdict_label(r.verdict).to_string(),
        ])
        .map_err(|e| Error::Serialize(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

/// Renders records as JSON lines, one record per line.
pub fn records_to_jsonl(records: &[ObservableRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Serialize(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

/// Stable CSV label for an optional verdict.
#[must_use]
pub fn verdict_label(verdict: Option<ResidualClass>) -> &'static str {
    match verdict {
        None => "",
        Some(ResidualClass::Identity) => "identity",
        Some(ResidualClass::Stabilizer) => "stabilizer",
        Some(ResidualClass::Logical) => "logical",
        Some(ResidualClass::Undecodable) => "undecodable",
    }
}
