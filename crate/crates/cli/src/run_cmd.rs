//! `loopgas run`: execute one seeded experiment from a config file.
//!
//! The dispatcher reads a TOML `RunConfig`, applies flag overrides, runs
//! the named driver, and writes every output atomically together with a
//! `manifest.json` recording digests, seed, engine version, and wall
//! times. Reruns with the same config and seed are byte-identical on
//! every data file (the manifest differs only in its wall times).

use std::fs;
use std::path::PathBuf;

use clap::Args;

use loopgas_core::decoder::{DecoderConfig, DecoderKind};
use loopgas_core::dynamics::ChainKind;
use loopgas_core::error::{Error, Result};
use loopgas_core::experiments::escape::{censored_fraction, censored_median, escape_times};
use loopgas_core::experiments::memory::memory_experiment;
use loopgas_core::experiments::mixing::empirical_mixing;
use loopgas_core::experiments::{records_to_csv, records_to_jsonl};

use crate::config::{ExperimentKind, RunConfig};
use crate::manifest::{self, RunManifest};

/// Environment variable naming the default output root.
pub const OUT_ROOT_VAR: &str = "LOOPGAS_OUT";

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Path to the TOML run config.
    #[arg(long)]
    pub config: PathBuf,

    /// Override the config's root seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Override the output directory (default: the config's `out` key,
    /// else $LOOPGAS_OUT/<label>, else runs/<label>).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &RunArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.display().to_string());
    }
    let dir = output_dir(&cfg);
    fs::create_dir_all(&dir)?;

    let started_unix_ms = manifest::unix_ms();
    let outputs = dispatch(&cfg)?;
    let finished_unix_ms = manifest::unix_ms();

    let mut digests = Vec::new();
    for (name, bytes) in &outputs {
        let path = dir.join(name);
        manifest::write_atomic(&path, bytes)?;
        let digest = manifest::digest_of(name, bytes);
        println!(
            "wrote {} ({} bytes, sha256 {})",
            path.display(),
            digest.bytes,
            &digest.sha256[..12]
        );
        digests.push(digest);
    }
    let manifest_path = manifest::write_manifest(
        &dir,
        &RunManifest {
            engine: manifest::engine_version(),
            seed: cfg.seed,
            started_unix_ms,
            finished_unix_ms,
            config: cfg,
            outputs: digests,
        },
    )?;
    println!("manifest {}", manifest_path.display());
    Ok(())
}

/// Resolves the output directory: explicit `out` wins, then the
/// environment root, then a local `runs/` root, both with a deterministic
/// per-run label so a rerun lands on the same path.
fn output_dir(cfg: &RunConfig) -> PathBuf {
    if let Some(out) = &cfg.out {
        return PathBuf::from(out);
    }
    let root = std::env::var(OUT_ROOT_VAR).unwrap_or_else(|_| "runs".to_string());
    let label = format!(
        "{}-{}-s{}",
        cfg.experiment.label(),
        cfg.code.label(),
        cfg.seed
    );
    PathBuf::from(root).join(label)
}

/// Runs the named experiment and returns (file name, content) pairs.
fn dispatch(cfg: &RunConfig) -> Result<Vec<(String, Vec<u8>)>> {
    let dcfg = DecoderConfig::default();
    let ecfg = cfg.experiment_config();
    match cfg.experiment {
        ExperimentKind::Memory => {
            let decoder = cfg.decoder.unwrap_or(DecoderKind::Contract);
            let (records, curve) = memory_experiment(&ecfg, decoder, &dcfg)?;
            let mut curve_csv = csv_writer();
            write_row(&mut curve_csv, &["time", "logical", "undecodable"])?;
            for i in 0..curve.times.len() {
                write_row(
                    &mut curve_csv,
                    &[
                        curve.times[i].to_string(),
                        curve.logical[i].to_string(),
                        curve.undecodable[i].to_string(),
                    ],
                )?;
            }
            Ok(vec![
                ("records.csv".into(), records_to_csv(&records)?.into_bytes()),
                (
                    "records.jsonl".into(),
                    records_to_jsonl(&records)?.into_bytes(),
                ),
                ("curve.csv".into(), finish(curve_csv)?),
            ])
        }
        ExperimentKind::Mixing => {
            let (records, tv) = empirical_mixing(&ecfg, &dcfg)?;
            let mut tv_csv = csv_writer();
            write_row(&mut tv_csv, &["time", "observable", "tv_lower"])?;
            for point in &tv {
                write_row(
                    &mut tv_csv,
                    &[
                        point.time.to_string(),
                        point.observable.clone(),
                        point.tv_lower.to_string(),
                    ],
                )?;
            }
            Ok(vec![
                ("records.csv".into(), records_to_csv(&records)?.into_bytes()),
                (
                    "records.jsonl".into(),
                    records_to_jsonl(&records)?.into_bytes(),
                ),
                ("tv.csv".into(), finish(tv_csv)?),
            ])
        }
        ExperimentKind::Escape => {
            let (radius, mode) = match cfg.chain {
                ChainKind::Block { radius, mode } => (radius, mode),
                other => {
                    return Err(Error::Config(format!(
                        "the escape experiment needs a block chain \
                         (got {other:?})"
                    )))
                }
            };
            let cap = cfg.component_cap.unwrap_or(6);
            let horizon = cfg.max_steps.unwrap_or(100_000);
            let times = escape_times(
                &cfg.code.build()?,
                cfg.beta,
                radius,
                mode,
                &dcfg,
                cap,
                horizon,
                cfg.replicas,
                cfg.seed,
                0,
            );
            let mut esc_csv = csv_writer();
            write_row(&mut esc_csv, &["replica", "escape_step", "censored"])?;
            for (r, t) in times.iter().enumerate() {
                write_row(
                    &mut esc_csv,
                    &[
                        r.to_string(),
                        t.map(|s| s.to_string()).unwrap_or_default(),
                        t.is_none().to_string(),
                    ],
                )?;
            }
            println!(
                "escape past cap {cap}: median {} steps, censored fraction {:.3} \
                 at horizon {horizon}",
                censored_median(&times, horizon),
                censored_fraction(&times)
            );
            Ok(vec![("escape.csv".into(), finish(esc_csv)?)])
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn write_row<T: AsRef<[u8]>>(w: &mut csv::Writer<Vec<u8>>, row: &[T]) -> Result<()> {
    w.write_record(row)
        .map_err(|err| Error::Serialize(err.to_string()))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|err| Error::Serialize(err.to_string()))
}
