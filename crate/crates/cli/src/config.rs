//! Run configuration files.
//!
//! One TOML file describes one run. Its keys mirror the engine's
//! `ExperimentConfig` field for field (so a config is a flat, diffable
//! record of everything the experiment consumed), plus the experiment
//! selector and the per-driver knobs that only some experiments read.
//! Command-line flags override file keys after parsing.

use serde::{Deserialize, Serialize};

use loopgas_core::code::CodeSpec;
use loopgas_core::decoder::DecoderKind;
use loopgas_core::dynamics::ChainKind;
use loopgas_core::error::{Error, Result};
use loopgas_core::experiments::ExperimentConfig;

/// Which driver a `run` invocation dispatches to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Memory curve: per-replica decoding verdicts on a time grid.
    Memory,
    /// Empirical mixing: binned-TV lower bounds against an equilibrated
    /// reference ensemble.
    Mixing,
    /// First escape past a component-size cap under block dynamics.
    Escape,
}

impl ExperimentKind {
    #[must_use]
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Memory => "memory",
            ExperimentKind::Mixing => "mixing",
            ExperimentKind::Escape => "escape",
        }
    }
}

/// Everything a run consumes, in one deserializable record.
///
/// Unknown keys are rejected so a typo cannot silently fall back to a
/// default; missing mandatory keys (the seed above all) are rejected at
/// parse time for the same reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub code: CodeSpec,
    pub beta: f64,
    pub chain: ChainKind,
    pub replicas: u64,
    /// Continuous-time checkpoints, strictly increasing.
    pub time_grid: Vec<f64>,
    /// Root seed; every replica derives its stream from it. Mandatory.
    pub seed: u64,
    /// Observable names recorded alongside TV lower bounds.
    #[serde(default)]
    pub observables: Vec<String>,
    /// Output directory; flags and the environment can override it.
    #[serde(default)]
    pub out: Option<String>,
    /// Decoder for experiments that classify residuals (memory only;
    /// defaults to the contraction decoder).
    #[serde(default)]
    pub decoder: Option<DecoderKind>,
    /// Largest tolerated syndrome component (escape only; default 6).
    #[serde(default)]
    pub component_cap: Option<usize>,
    /// Step horizon after which a replica counts as censored (escape
    /// only; default 100000).
    #[serde(default)]
    pub max_steps: Option<u64>,
}

impl RunConfig {
    /// Parses and validates a TOML config.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|err| Error::Config(format!("config file: {err}")))?;
        cfg.experiment_config().validate()?;
        Ok(cfg)
    }

    /// The engine-side view of this config.
    #[must_use]
    pub fn experiment_config(&self) -> ExperimentConfig {
        ExperimentConfig {
            code: self.code.clone(),
            beta: self.beta,
            chain: self.chain,
            replicas: self.replicas,
            time_grid: self.time_grid.clone(),
            seed: self.seed,
            observables: self.observables.clone(),
            out: self.out.clone(),
        }
    }
}
