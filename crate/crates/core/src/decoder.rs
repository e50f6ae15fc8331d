//! Canonical decoders: minimum-weight corrections per syndrome component,
//! the contract decoder that erases components independently, critical
//! syndrome detection, and residual classification.
//!
//! Determinism is load-bearing here. Every correction is a pure function of
//! the component's check set: the support hint grows by ball radius from the
//! component, the exhaustive search scans the restricted kernel in a fixed
//! Gray order, and ties break toward the lexicographically smallest error.
//! Replaying a trajectory therefore reproduces corrections bit for bit, and
//! two calls that see the same component content return the same error.

use crate::code::Code;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Gf2Matrix};

/// Tuning for the minimum-weight search.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct DecoderConfig {
    /// Max restricted-kernel dimension for the exhaustive scan; above it the
    /// greedy descent runs instead (unless `force_exact`).
    pub kernel_cutoff: usize,
    /// Refuse to fall back: error out when the kernel exceeds the cutoff.
    pub force_exact: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            kernel_cutoff: 24,
            force_exact: false,
        }
    }
}

/// Which search produced a correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionMode {
    /// Exhaustive scan over the restricted kernel: the result is a true
    /// minimum-weight consistent error on the hint support.
    Exact,
    /// Greedy descent over kernel generators: weight-locally-minimal only.
    Greedy,
}

/// An error pattern consistent with a target syndrome.
#[derive(Clone, Debug)]
pub struct Correction {
    /// The correcting error, full symbol length.
    pub error: BitVector,
    /// The syndrome this correction produces (`H error = target`).
    pub target: BitVector,
    /// Popcount of `error`.
    pub weight: usize,
    pub mode: CorrectionMode,
}

/// Verdict classes for a cumulative error relative to the code's decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualClass {
    /// Residual zero: decoding returns to the starting codeword.
    Identity,
    /// Residual in the stabilizer span (CSS sectors only).
    Stabilizer,
    /// Residual acts nontrivially on the logical sector.
    Logical,
    /// The decoder failed (some component was not erasable).
    Undecodable,
}

/// Outcome of probing every single-symbol flip for decoder inconsistency.
#[derive(Clone, Debug)]
pub struct CriticalReport {
    /// True iff some probed flip changes the decoded logical content.
    pub critical: bool,
    /// Symbols whose flips witness the inconsistency.
    pub witnesses: Vec<usize>,
    /// Symbols whose probe could not be decided because the flipped
    /// syndrome has a non-erasable component.
    pub indeterminate: Vec<usize>,
}

/// Minimum-weight error consistent with exactly the violated set
/// `component` (an indicator over checks), searched over symbols in
/// `support_hint` (or a grown ball default).
///
/// The default hint is the symbol support of the checks within network
/// distance 1 of the component, grown outward until the restricted system
/// becomes solvable; erasability of the component guarantees termination.
pub fn min_weight_correction(
    code: &Code,
    component: &BitVector,
    support_hint: Option<&BitVector>,
    cfg: &DecoderConfig,
) -> Result<Correction> {
    assert_eq!(
        component.len(),
        code.num_checks(),
        "component must be an indicator over checks"
    );
    if component.is_zero() {
        return Ok(Correction {
            error: BitVector::zeros(code.num_symbols()),
            target: component.clone(),
            weight: 0,
            mode: CorrectionMode::Exact,
        });
    }
    if !code.is_erasable(component) {
        return Err(Error::NotErasable {
            component: component.to_indices(),
        });
    }
    let (cols, restricted, particular) = if let Some(hint) = support_hint {
        assert_eq!(hint.len(), code.num_symbols(), "hint length mismatch");
        let cols = hint.to_indices();
        let restricted = code.h().select_columns(&cols);
        let Some(x) = restricted.solve(component) else {
            return Err(Error::NoSolution);
        };
        (cols, restricted, x)
    } else {
        let seeds = component.to_indices();
        let mut radius = 1usize;
        loop {
            let region = code.network().ball(&seeds, radius);
            let cols = code.symbol_support(&region).to_indices();
            let full = cols.len() == code.num_symbols();
            let restricted = code.h().select_columns(&cols);
            if let Some(x) = restricted.solve(component) {
                break (cols, restricted, x);
            }
            assert!(
                !full,
                "erasable component must become solvable on the full support"
            );
            radius += 1;
        }
    };
    let (compact, mode) = minimize_over_kernel(&restricted, particular, cfg)?;
    let mut error = BitVector::zeros(code.num_symbols());
    for k in compact.iter_ones() {
        error.set(cols[k], true);
    }
    debug_assert_eq!(code.syndrome(&error), *component, "correction consistency");
    Ok(Correction {
        weight: error.weight(),
        target: component.clone(),
        error,
        mode,
    })
}

/// Minimizes `x0 + span(kernel)` by weight, breaking ties toward the
/// lexicographically smallest vector.
fn minimize_over_kernel(
    a: &Gf2Matrix,
    x0: BitVector,
    cfg: &DecoderConfig,
) -> Result<(BitVector, CorrectionMode)> {
    let kernel = a.kernel_basis();
    if kernel.is_empty() {
        return Ok((x0, CorrectionMode::Exact));
    }
    if kernel.len() <= cfg.kernel_cutoff {
        let mut best = x0.clone();
        let mut cur = x0;
        for k in 1..(1u64 << kernel.len()) {
            cur.xor_assign(&kernel[k.trailing_zeros() as usize]);
            let better = match cur.weight().cmp(&best.weight()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => cur < best,
                std::cmp::Ordering::Greater => false,
            };
            if better {
                best = cur.clone();
            }
        }
        Ok((best, CorrectionMode::Exact))
    } else if cfg.force_exact {
        Err(Error::SizeGuard {
            what: "restricted kernel dimension",
            actual: kernel.len(),
            limit: cfg.kernel_cutoff,
        })
    } else {
        let mut best = x0;
        loop {
            let mut improved = false;
            for k in &kernel {
                let candidate = best.xor(k);
                if candidate.weight() < best.weight() {
                    best = candidate;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        Ok((best, CorrectionMode::Greedy))
    }
}

/// The contract decoder: splits the valid syndrome `s` into connected
/// components and XORs their independent minimum-weight corrections.
/// Components are pairwise non-adjacent in the syndrome network, so the
/// erase order is immaterial.
pub fn corr_contract(code: &Code, s: &BitVector, cfg: &DecoderConfig) -> Result<Correction> {
    assert_eq!(s.len(), code.num_checks(), "syndrome length mismatch");
    let mut error = BitVector::zeros(code.num_symbols());
    let mut mode = CorrectionMode::Exact;
    for comp in code.network().components(s) {
        let indicator = BitVector::from_indices(code.num_checks(), &comp);
        let corr = min_weight_correction(code, &indicator, None, cfg)?;
        error.xor_assign(&corr.error);
        if corr.mode == CorrectionMode::Greedy {
            mode = CorrectionMode::Greedy;
        }
    }
    debug_assert_eq!(code.syndrome(&error), *s, "contract correction consistency");
    Ok(Correction {
        weight: error.weight(),
        target: s.clone(),
        error,
        mode,
    })
}

/// Tests whether `s` sits one single-symbol flip away from a decoder
/// inconsistency: some flip `i` for which
/// `corr(s) + e_i + corr(s + H e_i)` carries logical content.
///
/// Only symbols whose checks touch the closed neighborhood of the violated
/// set are probed: for any other symbol the flipped star decodes to exactly
/// that flip as a separate component, so the probe residual vanishes
/// identically.
pub fn is_critical(code: &Code, s: &BitVector, cfg: &DecoderConfig) -> Result<CriticalReport> {
    let base = corr_contract(code, s, cfg)?;
    let hot_checks = code.network().closed_neighborhood(s);
    let mut probe: Vec<usize> = hot_checks
        .iter_ones()
        .flat_map(|c| code.check_symbols(c).iter().copied())
        .collect();
    probe.sort_unstable();
    probe.dedup();
    let mut witnesses = Vec::new();
    let mut indeterminate = Vec::new();
    for i in probe {
        let mut flipped = s.clone();
        for &c in code.symbol_checks(i) {
            flipped.toggle(c);
        }
        let Ok(corr_flipped) = corr_contract(code, &flipped, cfg) else {
            indeterminate.push(i);
            continue;
        };
        let mut residual = base.error.xor(&corr_flipped.error);
        residual.toggle(i);
        if !code.in_stabilizer_span(&residual) {
            witnesses.push(i);
        }
    }
    Ok(CriticalReport {
        critical: !witnesses.is_empty(),
        witnesses,
        indeterminate,
    })
}

/// Which decoder the classification runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Component-wise minimum weight (requires every component erasable).
    Contract,
    /// Coset-global minimum weight; classical codes with few codewords only.
    GlobalMinWeight,
}

/// Classifies a cumulative error by decoding its syndrome and inspecting
/// the residual `r = e + corr(H e)`: zero is `Identity`, membership in the
/// stabilizer span is `Stabilizer` (never reported for classical codes,
/// whose span is trivial), anything else is `Logical`. Decoder failure
/// yields `Undecodable`.
#[must_use]
pub fn classify_residual(
    code: &Code,
    cumulative_error: &BitVector,
    kind: DecoderKind,
    cfg: &DecoderConfig,
) -> ResidualClass {
    let s = code.syndrome(cumulative_error);
    let corr = match kind {
        DecoderKind::Contract => corr_contract(code, &s, cfg),
        DecoderKind::GlobalMinWeight => decode_global_min_weight(code, &s),
    };
    let Ok(corr) = corr else {
        return ResidualClass::Undecodable;
    };
    let residual = cumulative_error.xor(&corr.error);
    if residual.is_zero() {
        ResidualClass::Identity
    } else if code.in_stabilizer_span(&residual) {
        ResidualClass::Stabilizer
    } else {
        ResidualClass::Logical
    }
}

/// Coset-global minimum-weight decoding: the minimum-weight error over the
/// full solution set of `H x = s`, enumerated over the codeword space.
/// Restricted to classical codes with dimension at most 20; ties break
/// lexicographically.
pub fn decode_global_min_weight(code: &Code, s: &BitVector) -> Result<Correction> {
    const MAX_DIMENSION: usize = 20;
    if code.stabilizer().is_some() {
        return Err(Error::UnsupportedCode(
            "global min-weight decoding enumerates codewords; CSS sectors have \
             exponentially many"
                .into(),
        ));
    }
    if code.dimension() > MAX_DIMENSION {
        return Err(Error::SizeGuard {
            what: "code dimension",
            actual: code.dimension(),
            limit: MAX_DIMENSION,
        });
    }
    let Some(x0) = code.h().solve(s) else {
        return Err(Error::NoSolution);
    };
    let kernel = code.h().kernel_basis();
    let mut best = x0.clone();
    let mut cur = x0;
    for k in 1..(1u64 << kernel.len()) {
        cur.xor_assign(&kernel[k.trailing_zeros() as usize]);
        let better = match cur.weight().cmp(&best.weight()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => cur < best,
            std::cmp::Ordering::Greater => false,
        };
        if better {
            best = cur.clone();
        }
    }
    Ok(Correction {
        weight: best.weight(),
        target: s.clone(),
        error: best,
        mode: CorrectionMode::Exact,
    })
}
