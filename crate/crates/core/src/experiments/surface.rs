//! Separating-surface probes.
//!
//! Given two syndromes and a seed region `C` inside a domain `B`, the
//! probe grows the violated cluster of `C` (vertices where either syndrome
//! is nonzero, connected to `C` through violated vertices inside `B`) and
//! reports either a separating surface, the unviolated frontier of that
//! cluster, when the cluster stays within radius `r - 1` of `C`, or an
//! explicit violated path from next to `C` out to radius `r` when it does
//! not. Exactly one of the two is returned, and a reported surface is
//! re-verified independently of the search that produced it.

use std::collections::VecDeque;

use crate::code::Code;
use crate::dynamics::{glauber_step, ChainState};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Outcome of one probe: a separating surface or a violated crossing path.
#[derive(Clone, Debug)]
pub struct SurfaceProbe {
    /// Unviolated check set cutting `C` off within radius `r`, sorted.
    pub surface: Option<Vec<usize>>,
    /// Violated path from distance <= 1 of `C` out to distance >= `r`,
    /// in path order.
    pub witness: Option<Vec<usize>>,
}

impl SurfaceProbe {
    #[must_use]
    pub fn found(&self) -> bool {
        self.surface.is_some()
    }
}

/// Probes for a radius-`r` separating surface around `c` inside `b` with
/// respect to the union of violations of `x` and `y`.
pub fn separating_surface_probe(
    code: &Code,
    x: &BitVector,
    y: &BitVector,
    c: &BitVector,
    b: &BitVector,
    r: usize,
) -> Result<SurfaceProbe> {
    let m = code.num_checks();
    if x.len() != m || y.len() != m || c.len() != m || b.len() != m {
        return Err(Error::Config("probe inputs must be over the check set".into()));
    }
    if r == 0 {
        return Err(Error::Config("surface radius must be positive".into()));
    }
    if c.weight() == 0 {
        return Err(Error::Config("seed region C is empty".into()));
    }
    if c.and_not(b).weight() != 0 {
        return Err(Error::Config("seed region C must lie inside B".into()));
    }
    let net = code.network();
    let seeds = c.to_indices();
    let dist_c = net.distances_within(&seeds, usize::MAX);
    let violated = x.or(y).and(b);

    // Grow U = C plus the violated vertices reachable from C inside B
    // stepping only on violated vertices. Parents support the witness.
    let mut in_u = c.clone();
    let mut parent: Vec<Option<usize>> = vec![None; m];
    let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
    let mut crossing: Option<usize> = None;
    while let Some(v) = queue.pop_front() {
        if dist_c[v] as usize >= r {
            crossing = Some(v);
            break;
        }
        for &w in net.neighbors(v) {
            if !in_u.get(w) && b.get(w) && violated.get(w) {
                in_u.set(w, true);
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }

    if let Some(far) = crossing {
        // The cluster escaped: walk parents back to C, then trim the lead
        // so the witness starts at the first violated vertex (distance at
        // most one from C, since its predecessor is a seed).
        let mut path = vec![far];
        let mut at = far;
        while let Some(p) = parent[at] {
            path.push(p);
            at = p;
        }
        path.reverse();
        let start = path
            .iter()
            .position(|&v| violated.get(v))
            .expect("an escaping cluster contains a violated vertex");
        let path = path[start..].to_vec();
        assert!(
            dist_c[path[0]] as usize <= 1,
            "witness must start next to C (distance {})",
            dist_c[path[0]]
        );
        assert!(
            path.iter().all(|&v| violated.get(v)),
            "witness must be violated throughout"
        );
        return Ok(SurfaceProbe {
            surface: None,
            witness: Some(path),
        });
    }

    // The cluster stayed within radius r - 1; its frontier inside B is the
    // candidate surface.
    let mut surface = Vec::new();
    let mut on_surface = BitVector::zeros(m);
    for v in in_u.to_indices() {
        for &w in net.neighbors(v) {
            if !in_u.get(w) && b.get(w) && !on_surface.get(w) {
                on_surface.set(w, true);
                surface.push(w);
            }
        }
    }
    surface.sort_unstable();

    // Re-verify both separating properties independently of the search.
    for &s in &surface {
        assert!(
            !x.get(s) && !y.get(s),
            "surface vertex {s} is violated; the probe is inconsistent"
        );
        assert!(
            dist_c[s] as usize <= r,
            "surface vertex {s} lies outside radius {r}"
        );
    }
    let mut reach = c.clone();
    let mut fresh: VecDeque<usize> = c.to_indices().into();
    while let Some(v) = fresh.pop_front() {
        assert!(
            (dist_c[v] as usize) < r,
            "vertex {v} at distance {} is not cut off by the surface",
            dist_c[v]
        );
        for &w in net.neighbors(v) {
            if !reach.get(w) && b.get(w) && !on_surface.get(w) {
                reach.set(w, true);
                fresh.push_back(w);
            }
        }
    }

    Ok(SurfaceProbe {
        surface: Some(surface),
        witness: None,
    })
}

/// Fraction of probes that find a surface between two independently
/// equilibrated single-site chains at inverse temperature `beta`. Both
/// chains burn `burn_sweeps` full sweeps, then each of the `pairs` probes
/// advances both chains by `thin_steps` site updates and tests the pair of
/// current syndromes.
#[allow(clippy::too_many_arguments)]
pub fn surface_found_frequency(
    code: &Code,
    beta: f64,
    c: &BitVector,
    b: &BitVector,
    r: usize,
    pairs: u64,
    burn_sweeps: u64,
    thin_steps: u64,
    seed: u64,
) -> Result<f64> {
    assert!(pairs > 0, "no probes requested");
    let mut chain_x = ChainState::new(code, seed, 0);
    let mut chain_y = ChainState::new(code, seed, 1);
    for _ in 0..burn_sweeps * code.num_symbols() as u64 {
        glauber_step(&mut chain_x, beta);
        glauber_step(&mut chain_y, beta);
    }
    let mut found = 0u64;
    for _ in 0..pairs {
        for _ in 0..thin_steps {
            glauber_step(&mut chain_x, beta);
            glauber_step(&mut chain_y, beta);
        }
        let probe = separating_surface_probe(code, &chain_x.s, &chain_y.s, c, b, r)?;
        found += u64::from(probe.found());
    }
    Ok(found as f64 / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_ising_torus;

    fn singleton(m: usize, i: usize) -> BitVector {
        let mut v = BitVector::zeros(m);
        v.set(i, true);
        v
    }

    #[test]
    fn clean_syndromes_yield_the_immediate_frontier() {
        let code = build_ising_torus(4, 2).unwrap();
        let m = code.num_checks();
        let zero = BitVector::zeros(m);
        let c = singleton(m, 5);
        let b = BitVector::ones(m);
        let probe = separating_surface_probe(&code, &zero, &zero, &c, &b, 2).unwrap();
        let surface = probe.surface.expect("zero syndromes always separate");
        let mut expected: Vec<usize> = code.network().neighbors(5).to_vec();
        expected.sort_unstable();
        assert_eq!(surface, expected);
        assert!(probe.witness.is_none());
    }

    #[test]
    fn fully_violated_domain_yields_a_witness_path() {
        let code = build_ising_torus(6, 2).unwrap();
        let m = code.num_checks();
        let ones = BitVector::ones(m);
        let c = singleton(m, 0);
        let probe = separating_surface_probe(&code, &ones, &ones, &c, &ones, 3).unwrap();
        assert!(probe.surface.is_none());
        let path = probe.witness.expect("everything violated: no surface");
        let dist = code.network().distances_within(&[0], usize::MAX);
        assert!(dist[*path.last().unwrap()] as usize >= 3);
        assert!(dist[path[0]] as usize <= 1);
        // Path steps are network edges.
        for w in path.windows(2) {
            assert!(code.network().neighbors(w[0]).contains(&w[1]));
        }
    }

    #[test]
    fn surface_respects_the_domain() {
        let code = build_ising_torus(4, 2).unwrap();
        let m = code.num_checks();
        let zero = BitVector::zeros(m);
        let c = singleton(m, 5);
        // Restrict the domain to the radius-1 ball: frontier vertices
        // outside it are not part of the surface.
        let b = code.network().ball(&[5], 1);
        let probe = separating_surface_probe(&code, &zero, &zero, &c, &b, 2).unwrap();
        let surface = probe.surface.unwrap();
        assert!(surface.iter().all(|&v| b.get(v)));
    }

    #[test]
    fn input_validation() {
        let code = build_ising_torus(3, 2).unwrap();
        let m = code.num_checks();
        let zero = BitVector::zeros(m);
        let ones = BitVector::ones(m);
        let c = singleton(m, 0);
        assert!(separating_surface_probe(&code, &zero, &zero, &c, &ones, 0).is_err());
        assert!(separating_surface_probe(&code, &zero, &zero, &zero, &ones, 2).is_err());
        // C outside B.
        assert!(separating_surface_probe(&code, &zero, &zero, &c, &zero, 2).is_err());
    }

    #[test]
    fn colder_chains_separate_more_often_at_larger_radius() {
        let code = build_ising_torus(6, 2).unwrap();
        let m = code.num_checks();
        let c = singleton(m, 0);
        let b = BitVector::ones(m);
        let near = surface_found_frequency(&code, 2.0, &c, &b, 2, 150, 30, 24, 71).unwrap();
        let far = surface_found_frequency(&code, 2.0, &c, &b, 5, 150, 30, 24, 71).unwrap();
        assert!(
            far >= near,
            "larger radius must not separate less often: r=2 {near}, r=5 {far}"
        );
        assert!(far > 0.5, "beta=2 clusters are small; most probes separate");
    }
}
