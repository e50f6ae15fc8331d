//! Dense bit-packed linear algebra over GF(2).
//!
//! Everything downstream (codes, decoders, exact oracles) reduces to a small
//! set of primitives on bit vectors and matrices: XOR, popcount, row
//! reduction, solving, kernels and row-span membership. Vectors pack 64 bits
//! per word, index 0 is the lowest bit of the first word.

use std::cmp::Ordering;
use std::fmt;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

// ============================================================================
// BitVector
// ============================================================================

/// Fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector with ones exactly at `indices`.
    #[must_use]
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = BitVector::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    #[must_use]
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    #[must_use]
    pub fn ones(len: usize) -> Self {
        let mut v = BitVector::zeros(len);
        for w in &mut v.words {
            *w = !0;
        }
        v.mask_tail();
        v
    }

    #[inline]
    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// In-place XOR with another vector of the same length.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    #[must_use]
    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Bitwise intersection with another vector of the same length.
    #[must_use]
    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in and");
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        out
    }

    /// Bitwise union with another vector of the same length.
    #[must_use]
    pub fn or(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in or");
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        out
    }

    /// Bitwise difference: bits of `self` not in `other`.
    #[must_use]
    pub fn and_not(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in and_not");
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        out
    }

    /// Number of ones.
    #[inline]
    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// True iff every one of `self` is also set in `other`.
    #[must_use]
    pub fn is_subset_of(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in subset test");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// True iff the two vectors share at least one set bit.
    #[must_use]
    pub fn intersects(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in intersection test");
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Index of the lowest set bit.
    #[must_use]
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Iterates over indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + bit)
                }
            })
        })
    }

    #[must_use]
    pub fn to_indices(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Parity of the AND with another vector (GF(2) inner product).
    #[inline]
    #[must_use]
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot product");
        let acc = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        acc.count_ones() % 2 == 1
    }

    /// Hex encoding of the little-endian byte representation (fixtures).
    #[must_use]
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut bytes = Vec::with_capacity(nbytes);
        for i in 0..nbytes {
            let word = self.words[i / 8];
            bytes.push((word >> (8 * (i % 8))) as u8);
        }
        hex::encode(bytes)
    }

    /// Inverse of [`BitVector::to_hex`]; `len` must match the original.
    pub fn from_hex(len: usize, s: &str) -> Result<Self, String> {
        let bytes = hex::decode(s).map_err(|e| format!("bad hex: {e}"))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(format!(
                "hex encodes {} bytes, expected {} for length {len}",
                bytes.len(),
                len.div_ceil(8)
            ));
        }
        let mut v = BitVector::zeros(len);
        for (i, &b) in bytes.iter().enumerate() {
            v.words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if v.tail_bits() != 0 {
            return Err("hex sets bits past the vector length".into());
        }
        Ok(v)
    }

    #[inline]
    fn tail_bits(&self) -> u64 {
        let used = self.len % WORD_BITS;
        if used == 0 || self.words.is_empty() {
            0
        } else {
            self.words[self.words.len() - 1] & !((1u64 << used) - 1)
        }
    }

    fn mask_tail(&mut self) {
        let used = self.len % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

/// Lexicographic order by bit index: the vector with a 0 at the first
/// differing index is the smaller one. Used for deterministic tie-breaks.
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.len, other.len, "length mismatch in comparison");
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if (a >> bit) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// Serialized as `{ "len": n, "hex": "..." }`, matching
/// [`BitVector::to_hex`]; fixture files stay human-diffable.
impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("BitVector", 2)?;
        st.serialize_field("len", &self.len)?;
        st.serialize_field("hex", &self.to_hex())?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Repr {
            len: usize,
            hex: String,
        }
        let repr = Repr::deserialize(deserializer)?;
        BitVector::from_hex(repr.len, &repr.hex).map_err(serde::de::Error::custom)
    }
}

// ============================================================================
// Gf2Matrix
// ============================================================================

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<BitVector>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the RREF, one per pivot, in pivot-column order.
    pub rows: Vec<BitVector>,
    /// Pivot column of each row; strictly increasing.
    pub pivots: Vec<usize>,
}

impl Echelon {
    #[inline]
    #[must_use]
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the echelon rows; the result is zero iff `v` lies
    /// in the row span.
    #[must_use]
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut r = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    #[must_use]
    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }
}

impl Gf2Matrix {
    #[must_use]
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Gf2Matrix {
            nrows,
            ncols,
            rows: (0..nrows).map(|_| BitVector::zeros(ncols)).collect(),
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<BitVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ncols, "row length mismatch");
        }
        Gf2Matrix {
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    #[inline]
    #[must_use]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    #[must_use]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    #[must_use]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    #[inline]
    #[must_use]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.ncols, "row length mismatch");
        self.rows.push(row);
        self.nrows += 1;
    }

    /// Matrix-vector product `A x`.
    #[must_use]
    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.ncols, "vector length mismatch in mul_vec");
        let mut y = BitVector::zeros(self.nrows);
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x) {
                y.set(i, true);
            }
        }
        y
    }

    /// Matrix product `A B`.
    #[must_use]
    pub fn mul_mat(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in mul_mat");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVector::zeros(other.ncols);
                for j in row.iter_ones() {
                    acc.xor_assign(&other.rows[j]);
                }
                acc
            })
            .collect();
        Gf2Matrix::from_rows(other.ncols, rows)
    }

    #[must_use]
    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.ncols, self.nrows);
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Keeps the given columns, in the given order.
    #[must_use]
    pub fn select_columns(&self, cols: &[usize]) -> Gf2Matrix {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut r = BitVector::zeros(cols.len());
                for (k, &c) in cols.iter().enumerate() {
                    if row.get(c) {
                        r.set(k, true);
                    }
                }
                r
            })
            .collect();
        Gf2Matrix::from_rows(cols.len(), rows)
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    #[must_use]
    pub fn max_row_weight(&self) -> usize {
        self.rows.iter().map(BitVector::weight).max().unwrap_or(0)
    }

    #[must_use]
    pub fn max_col_weight(&self) -> usize {
        let mut counts = vec![0usize; self.ncols];
        for row in &self.rows {
            for j in row.iter_ones() {
                counts[j] += 1;
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }

    /// Reduced row echelon form. Pivots are chosen lowest column first.
    #[must_use]
    pub fn echelon(&self) -> Echelon {
        let mut work: Vec<BitVector> = self.rows.clone();
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        let mut next = 0usize;
        for col in 0..self.ncols {
            let Some(found) = (next..work.len()).find(|&r| work[r].get(col)) else {
                continue;
            };
            work.swap(next, found);
            let pivot_row = work[next].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            for row in &mut rows {
                let row: &mut BitVector = row;
                if row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rows.push(pivot_row);
            pivots.push(col);
            next += 1;
        }
        Echelon { rows, pivots }
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// One solution of `A x = b` with all free variables set to zero, or
    /// `None` when the system is inconsistent.
    #[must_use]
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        assert_eq!(b.len(), self.nrows, "rhs length mismatch in solve");
        let mut work: Vec<BitVector> = self.rows.clone();
        let mut rhs: Vec<bool> = (0..self.nrows).map(|i| b.get(i)).collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (work row, col)
        let mut next = 0usize;
        for col in 0..self.ncols {
            let Some(found) = (next..work.len()).find(|&r| work[r].get(col)) else {
                continue;
            };
            work.swap(next, found);
            rhs.swap(next, found);
            let pivot_row = work[next].clone();
            let pivot_rhs = rhs[next];
            for r in 0..work.len() {
                if r != next && work[r].get(col) {
                    work[r].xor_assign(&pivot_row);
                    rhs[r] ^= pivot_rhs;
                }
            }
            pivots.push((next, col));
            next += 1;
        }
        if (next..work.len()).any(|r| rhs[r]) {
            return None;
        }
        let mut x = BitVector::zeros(self.ncols);
        for &(r, c) in &pivots {
            if rhs[r] {
                x.set(c, true);
            }
        }
        Some(x)
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    #[must_use]
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.ncols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.ncols - ech.rank());
        for (free, _) in is_pivot.iter().enumerate().filter(|&(_, &piv)| !piv) {
            let mut v = BitVector::zeros(self.ncols);
            v.set(free, true);
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Row-span membership, decided by rank comparison (reduction against the
    /// echelon form; the reduced vector is zero iff appending `v` keeps the
    /// rank unchanged).
    #[must_use]
    pub fn in_rowspan(&self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.ncols, "vector length mismatch in rowspan");
        self.echelon().contains(v)
    }

    /// Hex encoding of all rows (fixtures).
    #[must_use]
    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(BitVector::to_hex).collect()
    }

    pub fn from_hex_rows(ncols: usize, rows: &[String]) -> Result<Self, String> {
        let rows = rows
            .iter()
            .map(|s| BitVector::from_hex(ncols, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Gf2Matrix::from_rows(ncols, rows))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix({}x{})", self.nrows, self.ncols)?;
        for row in &self.rows {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_matrix() -> Gf2Matrix {
        // rows: 1101, 0111, 1011 (rank 3, free column 2)
        Gf2Matrix::from_rows(
            4,
            vec![
                BitVector::from_bools(&[true, true, false, true]),
                BitVector::from_bools(&[false, true, true, true]),
                BitVector::from_bools(&[true, false, true, true]),
            ],
        )
    }

    #[test]
    fn bitvector_basics() {
        let mut v = BitVector::zeros(130);
        assert!(v.is_zero());
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.to_indices(), vec![0, 64, 129]);
        v.toggle(64);
        assert_eq!(v.weight(), 2);
        assert!(!v.get(64));
        assert_eq!(v.first_one(), Some(0));
    }

    #[test]
    fn subset_and_intersection() {
        let a = BitVector::from_indices(10, &[1, 3, 7]);
        let b = BitVector::from_indices(10, &[1, 2, 3, 7]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(a.intersects(&b));
        let c = BitVector::from_indices(10, &[0, 4]);
        assert!(!a.intersects(&c));
        assert!(BitVector::zeros(10).is_subset_of(&a));
    }

    #[test]
    fn lex_order_first_differing_bit() {
        let a = BitVector::from_indices(8, &[3]);
        let b = BitVector::from_indices(8, &[2]);
        // First difference at index 2: a has 0 there, so a < b.
        assert!(a < b);
        let c = BitVector::from_indices(8, &[2, 3]);
        assert!(b < c);
        assert_eq!(a.cmp(&a), Ordering::Equal);
    }

    #[test]
    fn echelon_rank_and_pivots() {
        let m = small_matrix();
        let ech = m.echelon();
        assert_eq!(ech.rank(), 3);
        assert_eq!(ech.pivots, vec![0, 1, 3]);
        // RREF rows have exactly one 1 among pivot columns.
        for (i, row) in ech.rows.iter().enumerate() {
            for (j, &p) in ech.pivots.iter().enumerate() {
                assert_eq!(row.get(p), i == j);
            }
        }
    }

    #[test]
    fn solve_hand_example() {
        let m = small_matrix();
        // b = A * [1,0,1,0]
        let x0 = BitVector::from_bools(&[true, false, true, false]);
        let b = m.mul_vec(&x0);
        let x = m.solve(&b).expect("consistent system");
        assert_eq!(m.mul_vec(&x), b);
    }

    #[test]
    fn solve_inconsistent() {
        // 0x = 1 has no solution.
        let m = Gf2Matrix::zeros(1, 3);
        let b = BitVector::from_bools(&[true]);
        assert!(m.solve(&b).is_none());
    }

    #[test]
    fn kernel_of_small_matrix() {
        let m = small_matrix();
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 4 - 3);
        for k in &ker {
            assert!(m.mul_vec(k).is_zero());
            assert!(!k.is_zero());
        }
    }

    #[test]
    fn rowspan_membership() {
        let m = small_matrix();
        let sum = m.row(0).xor(m.row(2));
        assert!(m.in_rowspan(&sum));
        assert!(m.in_rowspan(&BitVector::zeros(4)));
        // rank 3 in F_2^4: exactly half of all vectors lie in the span;
        // 0001 reduces to nonzero against this basis.
        let probe = BitVector::from_indices(4, &[3]);
        let expected = {
            let mut aug = m.clone();
            aug.push_row(probe.clone());
            aug.rank() == m.rank()
        };
        assert_eq!(m.in_rowspan(&probe), expected);
    }

    #[test]
    fn hex_roundtrip_fixed() {
        let v = BitVector::from_indices(12, &[0, 5, 11]);
        let h = v.to_hex();
        assert_eq!(BitVector::from_hex(12, &h).unwrap(), v);
        assert!(BitVector::from_hex(12, "ffff").is_err());
    }

    #[test]
    fn transpose_involution() {
        let m = small_matrix();
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn identity_solves_everything() {
        let id = Gf2Matrix::identity(6);
        let b = BitVector::from_indices(6, &[1, 4]);
        assert_eq!(id.solve(&b).unwrap(), b);
        assert_eq!(id.rank(), 6);
        assert!(id.kernel_basis().is_empty());
    }

    #[test]
    fn select_columns_matches_get() {
        let m = small_matrix();
        let s = m.select_columns(&[3, 1]);
        for i in 0..m.nrows() {
            assert_eq!(s.get(i, 0), m.get(i, 3));
            assert_eq!(s.get(i, 1), m.get(i, 1));
        }
    }

    prop_compose! {
        fn arb_matrix(max_r: usize, max_c: usize)
            (r in 1..max_r, c in 1..max_c)
            (bits in proptest::collection::vec(any::<bool>(), r * c),
             r in Just(r), c in Just(c))
            -> Gf2Matrix
        {
            let rows = (0..r)
                .map(|i| BitVector::from_bools(&bits[i * c..(i + 1) * c]))
                .collect();
            Gf2Matrix::from_rows(c, rows)
        }
    }

    proptest! {
        #[test]
        fn prop_rank_bounds(m in arb_matrix(12, 12)) {
            let r = m.rank();
            prop_assert!(r <= m.nrows().min(m.ncols()));
            prop_assert_eq!(m.transpose().rank(), r);
        }

        #[test]
        fn prop_solve_constructed_rhs(
            m in arb_matrix(12, 12),
            seed in proptest::collection::vec(any::<bool>(), 12),
        ) {
            let x0 = BitVector::from_bools(&seed[..m.ncols()]);
            let b = m.mul_vec(&x0);
            let x = m.solve(&b);
            prop_assert!(x.is_some());
            prop_assert_eq!(m.mul_vec(&x.unwrap()), b);
        }

        #[test]
        fn prop_kernel_dimension_and_membership(m in arb_matrix(12, 12)) {
            let ker = m.kernel_basis();
            prop_assert_eq!(ker.len(), m.ncols() - m.rank());
            for k in &ker {
                prop_assert!(m.mul_vec(k).is_zero());
            }
            if !ker.is_empty() {
                let km = Gf2Matrix::from_rows(m.ncols(), ker.clone());
                prop_assert_eq!(km.rank(), ker.len());
            }
        }

        #[test]
        fn prop_rowspan_agrees_with_rank_append(
            m in arb_matrix(10, 10),
            seed in proptest::collection::vec(any::<bool>(), 10),
        ) {
            let v = BitVector::from_bools(&seed[..m.ncols()]);
            let direct = m.in_rowspan(&v);
            let mut aug = m.clone();
            aug.push_row(v);
            prop_assert_eq!(direct, aug.rank() == m.rank());
        }

        #[test]
        fn prop_mul_linear(
            m in arb_matrix(10, 10),
            s1 in proptest::collection::vec(any::<bool>(), 10),
            s2 in proptest::collection::vec(any::<bool>(), 10),
        ) {
            let x = BitVector::from_bools(&s1[..m.ncols()]);
            let y = BitVector::from_bools(&s2[..m.ncols()]);
            prop_assert_eq!(
                m.mul_vec(&x.xor(&y)),
                m.mul_vec(&x).xor(&m.mul_vec(&y))
            );
        }

        #[test]
        fn prop_hex_roundtrip(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let v = BitVector::from_bools(&bits);
            prop_assert_eq!(BitVector::from_hex(v.len(), &v.to_hex()).unwrap(), v);
        }
    }
}
