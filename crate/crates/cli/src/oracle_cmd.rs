//! `loopgas oracle`: exact reference computations as JSON.
//!
//! Every subcommand enumerates something small exactly (a Gibbs
//! distribution, a transition kernel with its defects, the fully-violated
//! pattern probabilities behind the exponential suppression bound, or a
//! conditional factorization defect) and emits a self-describing JSON
//! document to stdout or a file. Oversized instances are refused by the
//! engine's enumeration guards; the refusal names the guard and the limit.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde::Serialize;

use loopgas_core::decoder::DecoderConfig;
use loopgas_core::error::{Error, Result};
use loopgas_core::gf2::BitVector;
use loopgas_core::oracle::{
    align_distribution, exact_gibbs, exact_kernel, markov_defect, peierls_check, KernelKind,
    Partition,
};

use crate::build_cmd::CodeArgs;
use crate::manifest::write_atomic;

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub cmd: OracleCmd,
}

#[derive(Debug, Subcommand)]
pub enum OracleCmd {
    /// Exact Gibbs distribution over valid syndromes.
    Gibbs {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        beta: f64,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact transition kernel with stationarity and balance defects.
    Kernel {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        beta: f64,
        /// Kernel kind: single-site, block, or restricted.
        #[arg(long, default_value = "single-site")]
        kind: String,
        /// Block radius (block and restricted kinds).
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// Component cap (restricted kind).
        #[arg(long, default_value_t = 6)]
        max_component: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Containment probabilities of fully violated patterns against the
    /// exponential bound.
    Peierls {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        beta: f64,
        /// Largest pattern weight to enumerate.
        #[arg(long, default_value_t = 6)]
        max_weight: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conditional factorization defect across an annular screening
    /// partition centered on one check.
    Markov {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        beta: f64,
        /// Center check of the annular partition.
        #[arg(long, default_value_t = 0)]
        center: usize,
        /// Radius of the inner region around the center.
        #[arg(long, default_value_t = 1)]
        inner_radius: usize,
        /// Radius bounding the screening annulus; everything beyond is the
        /// far region.
        #[arg(long, default_value_t = 2)]
        outer_radius: usize,
        /// Drop the conditioning (negative control; the defect is then
        /// expected to be macroscopic).
        #[arg(long)]
        unconditioned: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(args: &OracleArgs) -> Result<()> {
    match &args.cmd {
        OracleCmd::Gibbs { code, beta, out } => {
            let spec = code.spec()?;
            let gibbs = exact_gibbs(&spec.build()?, *beta)?;
            #[derive(Serialize)]
            struct Entry {
                syndrome: String,
                p: f64,
            }
            #[derive(Serialize)]
            struct Doc {
                code: String,
                beta: f64,
                entries: Vec<Entry>,
            }
            emit(
                &Doc {
                    code: spec.label(),
                    beta: *beta,
                    entries: gibbs
                        .states
                        .iter()
                        .zip(&gibbs.probs)
                        .map(|(s, &p)| Entry {
                            syndrome: bits(s),
                            p,
                        })
                        .collect(),
                },
                out.as_deref(),
            )
        }
        OracleCmd::Kernel {
            code,
            beta,
            kind,
            radius,
            max_component,
            out,
        } => {
            let spec = code.spec()?;
            let built = spec.build()?;
            let kernel_kind = match kind.as_str() {
                "single-site" => KernelKind::SingleSite,
                "block" => KernelKind::Block { radius: *radius },
                "restricted" => KernelKind::Restricted {
                    radius: *radius,
                    max_component: *max_component,
                },
                other => {
                    return Err(Error::Config(format!(
                        "unknown kernel kind {other:?} \
                         (expected single-site, block, or restricted)"
                    )))
                }
            };
            let dcfg = DecoderConfig::default();
            let kernel = exact_kernel(&built, *beta, kernel_kind, &dcfg)?;
            let pi = align_distribution(&exact_gibbs(&built, *beta)?, &kernel)?;
            #[derive(Serialize)]
            struct Doc {
                code: String,
                beta: f64,
                kind: String,
                states: Vec<String>,
                /// Sparse rows: (column index, probability) pairs.
                rows: Vec<Vec<(usize, f64)>>,
                stationarity_defect: f64,
                detailed_balance_defect: f64,
            }
            emit(
                &Doc {
                    code: spec.label(),
                    beta: *beta,
                    kind: kind.clone(),
                    states: kernel.states.iter().map(bits).collect(),
                    stationarity_defect: kernel.stationarity_defect(&pi),
                    detailed_balance_defect: kernel.detailed_balance_defect(&pi),
                    rows: kernel.rows.clone(),
                },
                out.as_deref(),
            )
        }
        OracleCmd::Peierls {
            code,
            beta,
            max_weight,
            out,
        } => {
            let spec = code.spec()?;
            let rows = peierls_check(&spec.build()?, *beta, *max_weight)?;
            #[derive(Serialize)]
            struct Row {
                pattern: String,
                weight: usize,
                probability: f64,
                bound: f64,
                holds: bool,
            }
            #[derive(Serialize)]
            struct Doc {
                code: String,
                beta: f64,
                max_weight: usize,
                rows: Vec<Row>,
            }
            emit(
                &Doc {
                    code: spec.label(),
                    beta: *beta,
                    max_weight: *max_weight,
                    rows: rows
                        .iter()
                        .map(|r| Row {
                            pattern: bits(&r.pattern),
                            weight: r.weight,
                            probability: r.lhs,
                            bound: r.bound,
                            holds: r.holds(),
                        })
                        .collect(),
                },
                out.as_deref(),
            )
        }
        OracleCmd::Markov {
            code,
            beta,
            center,
            inner_radius,
            outer_radius,
            unconditioned,
            out,
        } => {
            let spec = code.spec()?;
            let built = spec.build()?;
            let m = built.num_checks();
            if *center >= m {
                return Err(Error::Config(format!(
                    "center {center} out of range (m = {m})"
                )));
            }
            if inner_radius >= outer_radius {
                return Err(Error::Config(
                    "inner radius must be smaller than outer radius".into(),
                ));
            }
            let net = built.network();
            let a = net.ball(&[*center], *inner_radius);
            let outer = net.ball(&[*center], *outer_radius);
            let b = outer.and_not(&a);
            let c = BitVector::ones(m).and_not(&outer);
            if c.weight() == 0 {
                return Err(Error::Config(format!(
                    "outer radius {outer_radius} swallows the whole network; \
                     nothing is left to screen off"
                )));
            }
            let sizes = (a.weight(), b.weight(), c.weight());
            let partition = Partition::new(&built, a, b, c)?;
            let defect = markov_defect(&built, *beta, &partition, !*unconditioned)?;
            #[derive(Serialize)]
            struct Doc {
                code: String,
                beta: f64,
                center: usize,
                inner_radius: usize,
                outer_radius: usize,
                conditioned: bool,
                region_sizes: (usize, usize, usize),
                defect: f64,
            }
            emit(
                &Doc {
                    code: spec.label(),
                    beta: *beta,
                    center: *center,
                    inner_radius: *inner_radius,
                    outer_radius: *outer_radius,
                    conditioned: !*unconditioned,
                    region_sizes: sizes,
                    defect,
                },
                out.as_deref(),
            )
        }
    }
}

/// Renders a syndrome as a 0/1 string, check 0 leftmost.
fn bits(v: &BitVector) -> String {
    (0..v.len()).map(|i| u8::from(v.get(i)).to_string()).collect()
}

fn emit<T: Serialize>(doc: &T, out: Option<&std::path::Path>) -> Result<()> {
    let text =
        serde_json::to_string_pretty(doc).map_err(|err| Error::Serialize(err.to_string()))?;
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}
