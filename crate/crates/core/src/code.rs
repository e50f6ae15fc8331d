//! Lattice code families and their syndrome networks.
//!
//! A [`Code`] bundles a parity-check matrix `H` (checks x symbols), a
//! metacheck matrix `M` (redundancies among checks, `M H = 0`), lattice
//! coordinates, and the derived [`SyndromeNetwork`]: the graph on checks in
//! which two checks are adjacent iff some metacheck row contains both.
//!
//! Valid syndromes are exactly the image of `H`. Because `Im(H) = Ker(Y)`
//! for any basis `Y` of the left kernel of `H` (the inclusion is immediate
//! and the dimensions match), validity is tested by a handful of dot
//! products against a cached left-kernel basis rather than by solving.
//!
//! Two families are built here: Ising tori in one and two dimensions
//! (symbols on vertices, checks on edges, metachecks on plaquettes or the
//! single global parity), and the four-dimensional toric code (qubits on
//! faces, X checks on edges, Z checks on cubes, metachecks on vertices and
//! tesseracts).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, Echelon, Gf2Matrix};

/// A syndrome configuration: one bit per check. Alias rather than wrapper;
/// every operation on syndromes is a plain bit-vector operation.
pub type SyndromeConfig = BitVector;

// ============================================================================
// Sparsity profile
// ============================================================================

/// Declared sparsity and clustering parameters of a code family.
///
/// `check_weight` bounds the row and column weight of `H`, `network_degree`
/// bounds the syndrome-network degree. Both are verified against measured
/// values at construction. `component_budget` and `barrier_exponent` are
/// recorded metadata used for reporting bound shapes; no logic branches on
/// them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityProfile {
    /// Max row/column weight of `H` (written l in the glossary).
    pub check_weight: usize,
    /// Max degree of the syndrome network (written d).
    pub network_degree: usize,
    /// Component budget exponent (written nu); metadata only.
    pub component_budget: f64,
    /// Energy-barrier exponent (written chi); metadata only.
    pub barrier_exponent: f64,
}

// ============================================================================
// Syndrome network
// ============================================================================

/// Graph on parity checks: `a` and `b` are adjacent iff some metacheck row
/// contains both. Balls, boundaries and connected components of violated
/// checks all live here.
#[derive(Clone, Debug)]
pub struct SyndromeNetwork {
    adj: Vec<Vec<usize>>,
}

impl SyndromeNetwork {
    /// Builds the network on `m` vertices from the metacheck matrix rows.
    #[must_use]
    pub fn from_metachecks(m: usize, meta: &Gf2Matrix) -> Self {
        assert_eq!(meta.ncols(), m, "metacheck width must equal check count");
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
        for r in 0..meta.nrows() {
            let members = meta.row(r).to_indices();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        SyndromeNetwork { adj }
    }

    #[inline]
    #[must_use]
    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    #[must_use]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    #[must_use]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[must_use]
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Graph distances from the source set, cut off strictly above `cutoff`
    /// (unreached vertices report `u32::MAX`).
    #[must_use]
    pub fn distances_within(&self, sources: &[usize], cutoff: usize) -> Vec<u32> {
        assert!(!sources.is_empty(), "distance from an empty source set");
        let mut dist = vec![u32::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == u32::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v];
            if d as usize >= cutoff {
                continue;
            }
            for &u in &self.adj[v] {
                if dist[u] == u32::MAX {
                    dist[u] = d + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Ball of graph-distance radius `radius` around the source set.
    #[must_use]
    pub fn ball(&self, sources: &[usize], radius: usize) -> BitVector {
        let dist = self.distances_within(sources, radius);
        let mut out = BitVector::zeros(self.adj.len());
        for (v, &d) in dist.iter().enumerate() {
            if d != u32::MAX && d as usize <= radius {
                out.set(v, true);
            }
        }
        out
    }

    /// Annulus `{v : radius < d(sources, v) <= radius + width}`; disjoint
    /// from the ball of the same radius by construction.
    #[must_use]
    pub fn boundary(&self, sources: &[usize], radius: usize, width: usize) -> BitVector {
        let dist = self.distances_within(sources, radius + width);
        let mut out = BitVector::zeros(self.adj.len());
        for (v, &d) in dist.iter().enumerate() {
            if d != u32::MAX && (d as usize) > radius && (d as usize) <= radius + width {
                out.set(v, true);
            }
        }
        out
    }

    /// Connected components of the set of marked vertices, each sorted
    /// ascending, listed in order of their smallest member.
    #[must_use]
    pub fn components(&self, marked: &BitVector) -> Vec<Vec<usize>> {
        assert_eq!(marked.len(), self.adj.len(), "marked-set length mismatch");
        let mut seen = BitVector::zeros(self.adj.len());
        let mut out = Vec::new();
        for seed in marked.iter_ones() {
            if seen.get(seed) {
                continue;
            }
            let mut comp = vec![seed];
            seen.set(seed, true);
            let mut queue = VecDeque::from([seed]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.adj[v] {
                    if marked.get(u) && !seen.get(u) {
                        seen.set(u, true);
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True iff the marked vertices induce a connected (or empty) subgraph.
    #[must_use]
    pub fn is_connected(&self, marked: &BitVector) -> bool {
        self.components(marked).len() <= 1
    }

    /// The marked set together with all its neighbors.
    #[must_use]
    pub fn closed_neighborhood(&self, marked: &BitVector) -> BitVector {
        let mut out = marked.clone();
        for v in marked.iter_ones() {
            for &u in &self.adj[v] {
                out.set(u, true);
            }
        }
        out
    }
}

/// One row of the amenability table: boundary-to-volume statistics of balls
/// at radius `radius` and annulus width `width`.
#[derive(Clone, Debug, Serialize)]
pub struct AmenabilityRow {
    pub radius: usize,
    pub width: usize,
    /// `max_u |B^width(u)|`.
    pub max_width_ball: usize,
    /// `max_u |annulus(u, radius, width)|`.
    pub max_annulus: usize,
    /// `min_u |B^radius(u)|`.
    pub min_ball: usize,
    /// `max_width_ball * max_annulus / min_ball`; decreasing in `radius`
    /// on amenable graphs.
    pub ratio: f64,
}

/// Boundary-to-volume table over all vertices for each `(radius, width)`
/// pair; the ratio column is the quantity whose decay certifies amenability.
#[must_use]
pub fn amenability_profile(
    net: &SyndromeNetwork,
    radii: &[usize],
    widths: &[usize],
) -> Vec<AmenabilityRow> {
    let mut rows = Vec::new();
    for &width in widths {
        let max_width_ball = (0..net.num_vertices())
            .map(|u| net.ball(&[u], width).weight())
            .max()
            .unwrap_or(0);
        for &radius in radii {
            let mut max_annulus = 0usize;
            let mut min_ball = usize::MAX;
            for u in 0..net.num_vertices() {
                max_annulus = max_annulus.max(net.boundary(&[u], radius, width).weight());
                min_ball = min_ball.min(net.ball(&[u], radius).weight());
            }
            let min_ball = if min_ball == usize::MAX { 0 } else { min_ball };
            let ratio = if min_ball == 0 {
                0.0
            } else {
                (max_width_ball * max_annulus) as f64 / min_ball as f64
            };
            rows.push(AmenabilityRow {
                radius,
                width,
                max_width_ball,
                max_annulus,
                min_ball,
                ratio,
            });
        }
    }
    rows
}

// ============================================================================
// Code
// ============================================================================

/// A check/metacheck code with geometric structure.
///
/// Immutable after construction; freely shared across replica threads.
#[derive(Clone, Debug)]
pub struct Code {
    name: String,
    h: Gf2Matrix,
    meta: Gf2Matrix,
    network: SyndromeNetwork,
    profile: SparsityProfile,
    check_coords: Vec<Vec<i64>>,
    symbol_coords: Vec<Vec<i64>>,
    /// For a CSS sector: the opposite sector's check matrix, whose row span
    /// is quotiented out when classifying residual errors. `None` for
    /// classical codes (trivial span).
    stabilizer: Option<Gf2Matrix>,
    stabilizer_echelon: Option<Echelon>,
    /// Basis of the left kernel of `H`; a syndrome is valid iff every row
    /// annihilates it.
    left_kernel: Gf2Matrix,
    h_rank: usize,
    /// Column supports of `H`: checks touched by each symbol.
    symbol_checks: Vec<Vec<usize>>,
    /// Row supports of `H`: symbols in each check.
    check_symbols: Vec<Vec<usize>>,
}

impl Code {
    /// Assembles a code and verifies its structural contracts: `M H = 0`,
    /// nonempty check supports, and measured sparsity within the declared
    /// profile.
    #[must_use]
    pub fn new(
        name: impl Into<String>,
        h: Gf2Matrix,
        meta: Gf2Matrix,
        check_coords: Vec<Vec<i64>>,
        symbol_coords: Vec<Vec<i64>>,
        profile: SparsityProfile,
        stabilizer: Option<Gf2Matrix>,
    ) -> Self {
        let name = name.into();
        let m = h.nrows();
        let n = h.ncols();
        assert_eq!(meta.ncols(), m, "{name}: metacheck width != check count");
        assert_eq!(check_coords.len(), m, "{name}: check coordinate count");
        assert_eq!(symbol_coords.len(), n, "{name}: symbol coordinate count");
        assert!(
            meta.mul_mat(&h).is_zero(),
            "{name}: metachecks must annihilate H (M H = 0)"
        );
        for i in 0..m {
            assert!(!h.row(i).is_zero(), "{name}: check {i} has empty support");
        }
        let measured_weight = h.max_row_weight().max(h.max_col_weight());
        assert!(
            measured_weight <= profile.check_weight,
            "{name}: measured check weight {measured_weight} exceeds declared {}",
            profile.check_weight
        );
        let network = SyndromeNetwork::from_metachecks(m, &meta);
        let measured_degree = network.max_degree();
        assert!(
            measured_degree <= profile.network_degree,
            "{name}: measured network degree {measured_degree} exceeds declared {}",
            profile.network_degree
        );
        if let Some(st) = &stabilizer {
            assert_eq!(st.ncols(), n, "{name}: stabilizer width != symbol count");
        }
        let left_kernel = Gf2Matrix::from_rows(m, h.transpose().kernel_basis());
        let h_rank = m - left_kernel.nrows();
        debug_assert_eq!(h_rank, h.rank(), "left-kernel rank bookkeeping");
        let symbol_checks = {
            let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
            for i in 0..m {
                for j in h.row(i).iter_ones() {
                    cols[j].push(i);
                }
            }
            cols
        };
        let check_symbols = (0..m).map(|i| h.row(i).to_indices()).collect();
        let stabilizer_echelon = stabilizer.as_ref().map(Gf2Matrix::echelon);
        Code {
            name,
            h,
            meta,
            network,
            profile,
            check_coords,
            symbol_coords,
            stabilizer,
            stabilizer_echelon,
            left_kernel,
            h_rank,
            symbol_checks,
            check_symbols,
        }
    }

    #[inline]
    #[must_use]
    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    #[must_use]
    pub fn h(&self) -> &Gf2Matrix {
        &self.h
    }

    #[inline]
    #[must_use]
    pub fn meta(&self) -> &Gf2Matrix {
        &self.meta
    }

    #[inline]
    #[must_use]
    pub fn network(&self) -> &SyndromeNetwork {
        &self.network
    }

    #[inline]
    #[must_use]
    pub fn profile(&self) -> &SparsityProfile {
        &self.profile
    }

    /// Number of symbols (columns of `H`).
    #[inline]
    #[must_use]
    pub fn num_symbols(&self) -> usize {
        self.h.ncols()
    }

    /// Number of checks (rows of `H`).
    #[inline]
    #[must_use]
    pub fn num_checks(&self) -> usize {
        self.h.nrows()
    }

    #[inline]
    #[must_use]
    pub fn num_metachecks(&self) -> usize {
        self.meta.nrows()
    }

    #[inline]
    #[must_use]
    pub fn rank_h(&self) -> usize {
        self.h_rank
    }

    /// Codeword count exponent of the classical code, `n - rank(H)`.
    #[inline]
    #[must_use]
    pub fn dimension(&self) -> usize {
        self.num_symbols() - self.h_rank
    }

    #[inline]
    #[must_use]
    pub fn check_coords(&self, check: usize) -> &[i64] {
        &self.check_coords[check]
    }

    #[inline]
    #[must_use]
    pub fn symbol_coords(&self, symbol: usize) -> &[i64] {
        &self.symbol_coords[symbol]
    }

    /// Checks incident to a symbol (column support of `H`).
    #[inline]
    #[must_use]
    pub fn symbol_checks(&self, symbol: usize) -> &[usize] {
        &self.symbol_checks[symbol]
    }

    /// Symbols in a check (row support of `H`).
    #[inline]
    #[must_use]
    pub fn check_symbols(&self, check: usize) -> &[usize] {
        &self.check_symbols[check]
    }

    /// The opposite sector's check matrix for CSS sectors, if any.
    #[inline]
    #[must_use]
    pub fn stabilizer(&self) -> Option<&Gf2Matrix> {
        self.stabilizer.as_ref()
    }

    /// True iff `v` lies in the row span of the stabilizer matrix; always
    /// false for nonzero `v` on classical codes (trivial span).
    #[must_use]
    pub fn in_stabilizer_span(&self, v: &BitVector) -> bool {
        match &self.stabilizer_echelon {
            Some(ech) => ech.contains(v),
            None => v.is_zero(),
        }
    }

    /// Syndrome of an error pattern: `H e`.
    #[must_use]
    pub fn syndrome(&self, e: &BitVector) -> BitVector {
        assert_eq!(e.len(), self.num_symbols(), "error length mismatch");
        self.h.mul_vec(e)
    }

    /// True iff `s` is in the image of `H`, decided against the cached
    /// left-kernel basis.
    #[must_use]
    pub fn is_valid_syndrome(&self, s: &BitVector) -> bool {
        assert_eq!(s.len(), self.num_checks(), "syndrome length mismatch");
        for i in 0..self.left_kernel.nrows() {
            if self.left_kernel.row(i).dot(s) {
                return false;
            }
        }
        true
    }

    /// True iff some error violates exactly the checks in `region`.
    #[must_use]
    pub fn is_erasable(&self, region: &BitVector) -> bool {
        self.is_valid_syndrome(region)
    }

    /// Union of the symbol supports of the marked checks.
    #[must_use]
    pub fn symbol_support(&self, checks: &BitVector) -> BitVector {
        assert_eq!(checks.len(), self.num_checks(), "check-set length mismatch");
        let mut out = BitVector::zeros(self.num_symbols());
        for c in checks.iter_ones() {
            for &j in &self.check_symbols[c] {
                out.set(j, true);
            }
        }
        out
    }

    /// Basis of the valid syndromes supported on `region`: patterns on the
    /// region whose extension by zero lies in `Im(H)`. Returned vectors have
    /// full check length with support inside `region`.
    ///
    /// Computed as the kernel of the left-kernel basis restricted to the
    /// region's columns, so no solve over `H` is needed per call.
    #[must_use]
    pub fn local_valid_basis(&self, region: &BitVector) -> Vec<BitVector> {
        assert_eq!(region.len(), self.num_checks(), "region length mismatch");
        let cols = region.to_indices();
        if cols.is_empty() {
            return Vec::new();
        }
        let restricted = self.left_kernel.select_columns(&cols);
        restricted
            .kernel_basis()
            .into_iter()
            .map(|compact| {
                let mut full = BitVector::zeros(self.num_checks());
                for k in compact.iter_ones() {
                    full.set(cols[k], true);
                }
                full
            })
            .collect()
    }

    /// All `2^rank(H)` valid syndromes, in a fixed reflected-Gray order over
    /// an independent subset of the columns of `H` (so consecutive entries
    /// differ by one generator). Guarded for enumerability.
    pub fn enumerate_valid_syndromes(&self) -> Result<Vec<BitVector>> {
        const MAX_RANK: usize = 22;
        if self.h_rank > MAX_RANK {
            return Err(Error::SizeGuard {
                what: "rank(H)",
                actual: self.h_rank,
                limit: MAX_RANK,
            });
        }
        let ht = self.h.transpose();
        let mut ech_rows: Vec<BitVector> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        let mut basis: Vec<BitVector> = Vec::new();
        for j in 0..ht.nrows() {
            let mut r = ht.row(j).clone();
            for (row, &p) in ech_rows.iter().zip(&pivots) {
                if r.get(p) {
                    r.xor_assign(row);
                }
            }
            if let Some(p) = r.first_one() {
                ech_rows.push(r);
                pivots.push(p);
                basis.push(ht.row(j).clone());
            }
        }
        assert_eq!(basis.len(), self.h_rank, "column basis size");
        let mut out = Vec::with_capacity(1usize << self.h_rank);
        let mut cur = BitVector::zeros(self.num_checks());
        out.push(cur.clone());
        for k in 1..(1u64 << self.h_rank) {
            cur.xor_assign(&basis[k.trailing_zeros() as usize]);
            out.push(cur.clone());
        }
        Ok(out)
    }
}

// ============================================================================
// CSS codes
// ============================================================================

/// Which CSS sector a chain or experiment operates on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    X,
    Z,
}

/// A CSS code as a pair of sector codes over the same symbols.
///
/// The X sector carries `H_X` with vertex metachecks; its residuals are
/// classified against the row span of `H_Z`, and symmetrically for Z.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub x_sector: Code,
    pub z_sector: Code,
    n: usize,
    k: usize,
}

impl CssCode {
    #[inline]
    #[must_use]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Logical qubit count `n - rank(H_X) - rank(H_Z)`.
    #[inline]
    #[must_use]
    pub fn num_logical(&self) -> usize {
        self.k
    }

    #[inline]
    #[must_use]
    pub fn sector(&self, sector: Sector) -> &Code {
        match sector {
            Sector::X => &self.x_sector,
            Sector::Z => &self.z_sector,
        }
    }
}

// ============================================================================
// Builders: Ising tori
// ============================================================================

/// Builds the Ising code on the torus `(Z/side)^dims`: symbols on vertices,
/// one weight-2 check per edge. In two dimensions metachecks are the
/// plaquettes (4 edges each); in one dimension the single global parity of
/// all edges is the only redundancy.
pub fn build_ising_torus(side: usize, dims: usize) -> Result<Code> {
    if side < 3 {
        return Err(Error::Config(format!(
            "ising torus side must be at least 3 (got {side}); smaller sides \
             create doubled edges"
        )));
    }
    match dims {
        1 => Ok(build_ising_cycle(side)),
        2 => build_ising_rect(side, side),
        _ => Err(Error::Config(format!(
            "ising torus dims must be 1 or 2 (got {dims})"
        ))),
    }
}

fn build_ising_cycle(side: usize) -> Code {
    let n = side;
    let mut h = Gf2Matrix::zeros(n, n);
    let mut check_coords = Vec::with_capacity(n);
    for p in 0..n {
        h.set(p, p, true);
        h.set(p, (p + 1) % side, true);
        check_coords.push(vec![(2 * p + 1) as i64]);
    }
    let meta = Gf2Matrix::from_rows(n, vec![BitVector::ones(n)]);
    let symbol_coords = (0..n).map(|p| vec![(2 * p) as i64]).collect();
    let profile = SparsityProfile {
        check_weight: 2,
        network_degree: side - 1,
        component_budget: 1.0,
        barrier_exponent: 0.0,
    };
    Code::new(
        format!("ising1d-{side}"),
        h,
        meta,
        check_coords,
        symbol_coords,
        profile,
        None,
    )
}

/// Builds the Ising code on the rectangular torus `Z/rows x Z/cols`:
/// symbols on vertices, one weight-2 check per edge, metachecks on the
/// plaquettes. Both side lengths must be at least 3 to avoid doubled edges.
pub fn build_ising_rect(rows: usize, cols: usize) -> Result<Code> {
    if rows < 3 || cols < 3 {
        return Err(Error::Config(format!(
            "ising rectangle sides must be at least 3 (got {rows}x{cols}); \
             smaller sides create doubled edges"
        )));
    }
    let n = rows * cols;
    let m = 2 * n;
    let vid = |x: usize, y: usize| (x % rows) * cols + (y % cols);
    let step = |p: usize, dir: usize| {
        let (x, y) = (p / cols, p % cols);
        match dir {
            0 => vid(x + 1, y),
            _ => vid(x, y + 1),
        }
    };
    // Edge (dir, p) joins p and p + e_dir; its check index is dir*n + p.
    let eid = |dir: usize, p: usize| dir * n + p;
    let mut h = Gf2Matrix::zeros(m, n);
    let mut check_coords = vec![Vec::new(); m];
    for p in 0..n {
        let (x, y) = (p / cols, p % cols);
        for dir in 0..2 {
            let e = eid(dir, p);
            h.set(e, p, true);
            h.set(e, step(p, dir), true);
            check_coords[e] = if dir == 0 {
                vec![(2 * x + 1) as i64, (2 * y) as i64]
            } else {
                vec![(2 * x) as i64, (2 * y + 1) as i64]
            };
        }
    }
    // Plaquette at p: the 4 edges bounding the face spanned by p, p+e0,
    // p+e1, p+e0+e1.
    let mut meta = Gf2Matrix::zeros(n, m);
    for p in 0..n {
        meta.set(p, eid(0, p), true);
        meta.set(p, eid(1, p), true);
        meta.set(p, eid(0, step(p, 1)), true);
        meta.set(p, eid(1, step(p, 0)), true);
    }
    let symbol_coords = (0..n)
        .map(|p| vec![(2 * (p / cols)) as i64, (2 * (p % cols)) as i64])
        .collect();
    let profile = SparsityProfile {
        check_weight: 4,
        network_degree: 6,
        component_budget: 2.0,
        barrier_exponent: 0.5,
    };
    let name = if rows == cols {
        format!("ising2d-{rows}")
    } else {
        format!("ising2d-{rows}x{cols}")
    };
    Ok(Code::new(
        name,
        h,
        meta,
        check_coords,
        symbol_coords,
        profile,
        None,
    ))
}

// ============================================================================
// Builder: 4D toric code
// ============================================================================

/// Axis pairs indexing the six face orientations of the hypercubic lattice.
const FACE_AXES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
/// Axis triples indexing the four cube orientations.
const CUBE_AXES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

struct Hyper4 {
    w: usize,
    vol: usize,
}

impl Hyper4 {
    fn new(w: usize) -> Self {
        Hyper4 { w, vol: w * w * w * w }
    }

    fn decode(&self, p: usize) -> [usize; 4] {
        let w = self.w;
        [p / (w * w * w), (p / (w * w)) % w, (p / w) % w, p % w]
    }

    fn encode(&self, c: [usize; 4]) -> usize {
        let w = self.w;
        ((c[0] % w) * w * w * w) + ((c[1] % w) * w * w) + ((c[2] % w) * w) + (c[3] % w)
    }

    /// Position shifted by +1 along `axis` (periodic).
    fn step(&self, p: usize, axis: usize) -> usize {
        let mut c = self.decode(p);
        c[axis] += 1;
        self.encode(c)
    }
}

/// Builds the 4D toric code on `(Z/w)^4`: qubits on the `6w^4` faces,
/// X checks on the `4w^4` edges (weight 6), Z checks on the `4w^4` cubes
/// (weight 6), X metachecks on vertices (8 incident edges) and Z metachecks
/// on tesseracts (8 incident cubes). Both sector networks have degree 14,
/// and the logical count is 6.
pub fn build_toric_4d(w: usize) -> Result<CssCode> {
    if w < 3 {
        return Err(Error::Config(format!(
            "toric lattice width must be at least 3 (got {w}); smaller widths \
             create doubled cells"
        )));
    }
    let g = Hyper4::new(w);
    let vol = g.vol;
    let n = 6 * vol; // faces
    let m = 4 * vol; // edges, and also cubes
    let edge_id = |axis: usize, p: usize| axis * vol + p;
    let face_id = |orient: usize, p: usize| orient * vol + p;
    let cube_id = |orient: usize, p: usize| orient * vol + p;

    // X checks: each face's boundary is 4 edges; transpose into edge rows.
    let mut h_x = Gf2Matrix::zeros(m, n);
    for (orient, &(mu, nu)) in FACE_AXES.iter().enumerate() {
        for p in 0..vol {
            let f = face_id(orient, p);
            h_x.set(edge_id(mu, p), f, true);
            h_x.set(edge_id(mu, g.step(p, nu)), f, true);
            h_x.set(edge_id(nu, p), f, true);
            h_x.set(edge_id(nu, g.step(p, mu)), f, true);
        }
    }
    // X metachecks: all 8 edges incident to a vertex.
    let mut meta_x = Gf2Matrix::zeros(vol, m);
    for p in 0..vol {
        for axis in 0..4 {
            meta_x.set(p, edge_id(axis, p), true);
            let mut c = g.decode(p);
            c[axis] = (c[axis] + w - 1) % w;
            meta_x.set(p, edge_id(axis, g.encode(c)), true);
        }
    }

    // Z checks: each cube's boundary is 6 faces.
    let mut h_z = Gf2Matrix::zeros(m, n);
    for (orient, axes) in CUBE_AXES.iter().enumerate() {
        for p in 0..vol {
            let c = cube_id(orient, p);
            for omit in 0..3 {
                let pair = {
                    let mut it = axes.iter().enumerate().filter(|&(k, _)| k != omit);
                    let a = *it.next().unwrap().1;
                    let b = *it.next().unwrap().1;
                    (a, b)
                };
                let fo = FACE_AXES
                    .iter()
                    .position(|&q| q == pair)
                    .expect("axis pair is a face orientation");
                h_z.set(c, face_id(fo, p), true);
                h_z.set(c, face_id(fo, g.step(p, axes[omit])), true);
            }
        }
    }
    // Z metachecks: all 8 cubes incident to a tesseract.
    let mut meta_z = Gf2Matrix::zeros(vol, m);
    for p in 0..vol {
        for (orient, axes) in CUBE_AXES.iter().enumerate() {
            let missing = (0..4).find(|a| !axes.contains(a)).unwrap();
            meta_z.set(p, cube_id(orient, p), true);
            meta_z.set(p, cube_id(orient, g.step(p, missing)), true);
        }
    }

    assert!(
        h_x.mul_mat(&h_z.transpose()).is_zero(),
        "CSS orthogonality H_X H_Z^T = 0"
    );

    let face_coords: Vec<Vec<i64>> = (0..6)
        .flat_map(|orient| {
            let (mu, nu) = FACE_AXES[orient];
            (0..vol).map(move |p| (orient, mu, nu, p))
        })
        .map(|(_, mu, nu, p)| {
            let c = g.decode(p);
            let mut out = [0i64; 4];
            for (a, o) in out.iter_mut().enumerate() {
                *o = 2 * c[a] as i64 + i64::from(a == mu) + i64::from(a == nu);
            }
            out.to_vec()
        })
        .collect();
    let edge_coords: Vec<Vec<i64>> = (0..4)
        .flat_map(|axis| (0..vol).map(move |p| (axis, p)))
        .map(|(axis, p)| {
            let c = g.decode(p);
            (0..4)
                .map(|a| 2 * c[a] as i64 + i64::from(a == axis))
                .collect()
        })
        .collect();
    let cube_coords: Vec<Vec<i64>> = (0..4)
        .flat_map(|orient| (0..vol).map(move |p| (orient, p)))
        .map(|(orient, p)| {
            let c = g.decode(p);
            (0..4)
                .map(|a| 2 * c[a] as i64 + i64::from(CUBE_AXES[orient].contains(&a)))
                .collect()
        })
        .collect();

    let profile = SparsityProfile {
        check_weight: 6,
        network_degree: 14,
        component_budget: 5.0,
        barrier_exponent: 0.25,
    };
    let x_sector = Code::new(
        format!("toric4d-{w}-x"),
        h_x,
        meta_x,
        edge_coords,
        face_coords.clone(),
        profile,
        Some(h_z.clone()),
    );
    let z_sector = Code::new(
        format!("toric4d-{w}-z"),
        h_z,
        meta_z,
        cube_coords,
        face_coords,
        profile,
        Some(x_sector.h().clone()),
    );
    let k = n - x_sector.rank_h() - z_sector.rank_h();
    assert_eq!(k, 6, "4D toric code encodes 6 logical qubits");
    Ok(CssCode {
        x_sector,
        z_sector,
        n,
        k,
    })
}

// ============================================================================
// Code descriptors
// ============================================================================

/// Serializable description of a buildable code, used by experiment configs
/// and fixtures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CodeSpec {
    Ising1d { side: usize },
    Ising2d { side: usize },
    IsingRect { rows: usize, cols: usize },
    Toric4d { w: usize, sector: Sector },
}

impl CodeSpec {
    /// Builds the described code (the named sector, for CSS families).
    pub fn build(&self) -> Result<Code> {
        match *self {
            CodeSpec::Ising1d { side } => build_ising_torus(side, 1),
            CodeSpec::Ising2d { side } => build_ising_torus(side, 2),
            CodeSpec::IsingRect { rows, cols } => build_ising_rect(rows, cols),
            CodeSpec::Toric4d { w, sector } => {
                let css = build_toric_4d(w)?;
                Ok(match sector {
                    Sector::X => css.x_sector,
                    Sector::Z => css.z_sector,
                })
            }
        }
    }

    #[must_use]
    pub fn label(&self) -> String {
        match *self {
            CodeSpec::Ising1d { side } => format!("ising1d-{side}"),
            CodeSpec::Ising2d { side } => format!("ising2d-{side}"),
            CodeSpec::IsingRect { rows, cols } => format!("ising2d-{rows}x{cols}"),
            CodeSpec::Toric4d { w, sector } => format!(
                "toric4d-{w}-{}",
                match sector {
                    Sector::X => "x",
                    Sector::Z => "z",
                }
            ),
        }
    }
}
