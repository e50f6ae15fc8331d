//! Gibbs samplers, decoders and exact oracles for syndrome loop gases on
//! sparse binary codes.
//!
//! The crate is organized bottom-up:
//!
//! - [`gf2`]: bit-packed GF(2) vectors and matrices (rank, solve, kernels).
//! - [`code`]: check/metacheck code families (Ising tori, the 4D toric
//!   code), syndrome networks, balls and component structure.
//! - [`decoder`]: minimum-weight corrections, contract decoding, residual
//!   classification against a stabilizer sector.
//! - [`dynamics`]: the single-site, projected, block, and restricted
//!   Markov chains, with deterministic seeded replay.
//! - [`worm`]: a worm sampler for even-subgraph measures and its bridge
//!   to block-conditional syndrome sampling.
//! - [`oracle`]: exact reference distributions, enumerated kernels, and
//!   structural checks (Peierls tails, conditional independence, cluster
//!   distances) for small instances.
//! - [`experiments`]: reproducible drivers built on the above (mixing
//!   curves, memory lifetimes, escape times, component tails, spatial
//!   mixing, separating surfaces) with CSV/JSONL output.

pub mod code;
pub mod decoder;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod oracle;
pub mod worm;

pub use code::{Code, CodeSpec, CssCode, Sector, SparsityProfile, SyndromeConfig, SyndromeNetwork};
pub use decoder::{Correction, DecoderConfig, DecoderKind, ResidualClass};
pub use dynamics::{BlockOutcome, BlockSpec, ChainKind, ChainState, SamplerMode};
pub use error::{Error, Result};
pub use experiments::{ExperimentConfig, ObservableRecord};
pub use gf2::{BitVector, Gf2Matrix};
pub use oracle::{exact_gibbs, exact_kernel, Distribution, ExactKernel, KernelKind, Partition};
pub use worm::{BlockGraph, WormConfig, WormGraph, WormState};
