//! Dense linear algebra over GF(2).
//!
//! Vectors are packed into 64-bit words, bit `i` living in word `i / 64` at
//! position `i % 64`. Bits past `len` in the last word are kept at zero by
//! every mutating operation, so word-level equality, hashing and popcount are
//! all exact.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        v.clear_padding();
        v
    }

    /// The standard basis vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of at most 64 bits; bit `i` of `value` becomes entry `i`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_padding();
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`].
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD_BITS, "to_u64 supports at most 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        self.words[index / WORD_BITS] ^= 1u64 << (index % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let bit = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(i * WORD_BITS + bit)
                }
            })
        })
    }

    /// In-place addition. Panics if the lengths differ.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Element-wise product.
    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                context: "dot product",
                expected: self.len,
                found: other.len,
            });
        }
        Ok(self.parity_with(other))
    }

    /// Inner product mod 2 without the length check (debug-asserted).
    #[inline]
    pub(crate) fn parity_with(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1
            == 1
    }

    /// Concatenation `self | other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("unexpected character {other:?} in bit string"),
                    })
                }
            }
        }
        Ok(v)
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowEchelon {
    pub reduced: BitMatrix,
    pub pivot_cols: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    /// A matrix with no rows.
    pub fn empty(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                context: "matrix row length",
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Parses rows given as `0`/`1` strings. All rows must have equal length.
    pub fn from_strs<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let parsed = rows
            .iter()
            .map(|r| r.as_ref().parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(cols, parsed)
    }

    /// Builds a matrix whose row `r` has ones at the listed columns.
    pub fn from_supports(cols: usize, supports: &[Vec<usize>]) -> Self {
        let rows = supports
            .iter()
            .map(|support| {
                let mut row = BitVector::zeros(cols);
                for &c in support {
                    row.flip(c);
                }
                row
            })
            .collect();
        Self { cols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.rows[row].set(col, value)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "pushed row length",
                expected: self.cols,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// Column `c` as a vector of length `nrows`.
    pub fn column(&self, c: usize) -> BitVector {
        let mut col = BitVector::zeros(self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                col.set(r, true);
            }
        }
        col
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                out.rows[c].set(r, true);
            }
        }
        out
    }

    /// Rows restricted to the given indices, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "vertical stack",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            cols: self.cols,
            rows,
        })
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.nrows() {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: other.nrows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVector::zeros(other.cols);
                for k in row.iter_ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix {
            cols: other.cols,
            rows,
        })
    }

    /// `M · v` over GF(2).
    pub fn matvec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self.matvec_unchecked(v))
    }

    pub(crate) fn matvec_unchecked(&self, v: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            if row.parity_with(v) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Gauss-Jordan elimination. Pivots are taken in the first column that
    /// has a one at or below the current row, using the first such row.
    /// Row operations are mirrored onto `rhs` when given.
    fn eliminate(&self, mut rhs: Option<&mut BitVector>) -> RowEchelon {
        let mut rows = self.rows.clone();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            if let Some(y) = rhs.as_deref_mut() {
                let (yr, yp) = (y.get(r), y.get(p));
                y.set(r, yp);
                y.set(p, yr);
            }
            let pivot = rows[r].clone();
            let pivot_rhs = rhs.as_deref().map(|y| y.get(r));
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                    if let (Some(y), Some(true)) = (rhs.as_deref_mut(), pivot_rhs) {
                        y.flip(i);
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        RowEchelon {
            reduced: BitMatrix {
                cols: self.cols,
                rows,
            },
            pivot_cols,
        }
    }

    /// Reduced row echelon form. The returned matrix has the same shape;
    /// zero rows collect at the bottom.
    pub fn row_reduce(&self) -> RowEchelon {
        self.eliminate(None)
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().pivot_cols.len()
    }

    /// Basis of `{v : M v = 0}`, one row per free column in increasing order.
    pub fn kernel_basis(&self) -> BitMatrix {
        let RowEchelon {
            reduced,
            pivot_cols,
        } = self.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let rows = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVector::unit(self.cols, f);
                for (i, &pc) in pivot_cols.iter().enumerate() {
                    if reduced.rows[i].get(f) {
                        v.set(pc, true);
                    }
                }
                v
            })
            .collect();
        BitMatrix {
            cols: self.cols,
            rows,
        }
    }

    /// Independent rows spanning the row space (the nonzero RREF rows).
    pub fn row_space_basis(&self) -> BitMatrix {
        let RowEchelon {
            reduced,
            pivot_cols,
        } = self.row_reduce();
        let mut rows = reduced.rows;
        rows.truncate(pivot_cols.len());
        BitMatrix {
            cols: self.cols,
            rows,
        }
    }

    /// Some `v` with `M v = y`, or `None` if the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, y: &BitVector) -> Result<Option<BitVector>> {
        if y.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                context: "solve right-hand side",
                expected: self.nrows(),
                found: y.len(),
            });
        }
        let mut rhs = y.clone();
        let echelon = self.eliminate(Some(&mut rhs));
        let rank = echelon.pivot_cols.len();
        if (rank..self.nrows()).any(|i| rhs.get(i)) {
            return Ok(None);
        }
        let mut v = BitVector::zeros(self.cols);
        for (i, &pc) in echelon.pivot_cols.iter().enumerate() {
            if rhs.get(i) {
                v.set(pc, true);
            }
        }
        Ok(Some(v))
    }

    /// Indices of the first maximal set of linearly independent rows,
    /// scanning top to bottom.
    pub fn independent_row_indices(&self) -> Vec<usize> {
        let mut basis = EchelonBasis::new(self.cols);
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| basis.insert(row))
            .map(|(i, _)| i)
            .collect()
    }

    /// Rows of `full` that extend the row space of `sub` to that of `full`.
    ///
    /// Candidates are scanned in `full`'s row order, so the output consists
    /// of actual rows of `full`.
    pub fn complete_basis(sub: &BitMatrix, full: &BitMatrix) -> Result<BitMatrix> {
        if sub.cols != full.cols {
            return Err(Error::DimensionMismatch {
                context: "complete_basis column count",
                expected: full.cols,
                found: sub.cols,
            });
        }
        let full_span = EchelonBasis::from_rows(full.cols, full.rows());
        if sub.rows.iter().any(|r| !full_span.contains(r)) {
            return Err(Error::NotSubspace);
        }
        let mut span = EchelonBasis::from_rows(sub.cols, sub.rows());
        let rows = full
            .rows
            .iter()
            .filter(|row| span.insert(row))
            .cloned()
            .collect();
        Ok(BitMatrix {
            cols: full.cols,
            rows,
        })
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> bool {
        EchelonBasis::from_rows(self.cols, self.rows()).contains(v)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} [", self.nrows(), self.cols)?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{row}")?;
        }
        f.write_str("]")
    }
}

/// Incrementally built, fully reduced basis of a subspace.
///
/// Every stored row has a distinct pivot (its lowest set bit) and no other
/// stored row has that pivot bit set, so reduction is a single pass.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    cols: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Self {
        let mut basis = Self::new(cols);
        for r in rows {
            basis.insert(r);
        }
        basis
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut w = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w.get(p) {
                w.xor_assign(row);
            }
        }
        w
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns false if it was already inside.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.cols);
        let w = self.reduce(v);
        let Some(p) = w.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&w);
            }
        }
        self.rows.push(w);
        self.pivots.push(p);
        true
    }
}
