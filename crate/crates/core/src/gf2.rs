//! Dense GF(2) vectors and matrices packed into 64-bit words.

use rayon::prelude::*;
use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Rows below the pivot times remaining words above which elimination goes parallel.
const PAR_THRESHOLD: usize = 1 << 15;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Fixed-length bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
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

    /// Parses a string of `0`/`1` characters, most significant index last.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("invalid bit character {c:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_bools(&bits))
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { len, words }
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
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major GF(2) matrix with each row padded to whole words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    width: usize,
    stride: usize,
    rows: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            stride: words_for(width),
            rows: 0,
            data: Vec::new(),
        }
    }

    pub fn zeros(rows: usize, width: usize) -> Self {
        let stride = words_for(width);
        Self {
            width,
            stride,
            rows,
            data: vec![0; rows * stride],
        }
    }

    pub fn from_rows<'a, I>(width: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BitVec>,
    {
        let mut m = Self::new(width);
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    /// Parses rows written as `0`/`1` strings.
    pub fn parse(width: usize, rows: &[&str]) -> Result<Self> {
        let parsed: Vec<BitVec> = rows.iter().map(|r| BitVec::parse(r)).collect::<Result<_>>()?;
        Self::from_rows(width, parsed.iter())
    }

    pub fn push_row(&mut self, row: &BitVec) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::Dimension(format!(
                "row width {} does not match matrix width {}",
                row.len(),
                self.width
            )));
        }
        self.data.extend_from_slice(row.words());
        self.rows += 1;
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_words(self.width, self.row_words(i).to_vec())
    }

    pub fn rows(&self) -> impl Iterator<Item = BitVec> + '_ {
        (0..self.rows).map(|i| self.row(i))
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.data[r * self.stride + c / WORD];
        let bit = 1u64 << (c % WORD);
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    /// Column operation `col[dst] ^= col[src]` on every row.
    pub fn xor_column_into(&mut self, src: usize, dst: usize) {
        let (sw, sb) = (src / WORD, src % WORD);
        let (dw, db) = (dst / WORD, dst % WORD);
        for r in 0..self.rows {
            let base = r * self.stride;
            let bit = (self.data[base + sw] >> sb) & 1;
            self.data[base + dw] ^= bit << db;
        }
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let (va, vb) = (self.get(r, a), self.get(r, b));
            if va != vb {
                self.set(r, a, vb);
                self.set(r, b, va);
            }
        }
    }

    /// Submatrix keeping the listed columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            let src = self.row_words(r);
            let dst = &mut out.data[r * out.stride..(r + 1) * out.stride];
            for (j, &c) in cols.iter().enumerate() {
                if (src[c / WORD] >> (c % WORD)) & 1 == 1 {
                    dst[j / WORD] |= 1u64 << (j % WORD);
                }
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> BinaryMatrix {
        let mut out = BinaryMatrix::new(self.width);
        out.data.reserve(rows.len() * self.stride);
        for &r in rows {
            out.data.extend_from_slice(self.row_words(r));
        }
        out.rows = rows.len();
        out
    }

    /// Appends the rows of `other` below `self`.
    pub fn stack(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.width != other.width {
            return Err(Error::Dimension(format!(
                "cannot stack widths {} and {}",
                self.width, other.width
            )));
        }
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        Ok(out)
    }

    /// GF(2) row rank. Works on a copy.
    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        eliminate(&mut data, self.rows, self.stride, self.width, None)
    }

    /// Row-echelon form of a copy, usable for repeated membership tests.
    pub fn echelon(&self) -> Echelon {
        let mut data = self.data.clone();
        let mut pivots = Vec::new();
        let rank = eliminate(&mut data, self.rows, self.stride, self.width, Some(&mut pivots));
        data.truncate(rank * self.stride);
        Echelon {
            width: self.width,
            stride: self.stride,
            data,
            pivots,
        }
    }

    pub fn in_rowspace(&self, v: &BitVec) -> Result<bool> {
        if v.len() != self.width {
            return Err(Error::Dimension(format!(
                "vector width {} does not match matrix width {}",
                v.len(),
                self.width
            )));
        }
        Ok(self.echelon().reduce(v).is_zero())
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let ech = self.echelon();
        let (stride, rank) = (ech.stride, ech.rank());
        let mut data = ech.data;
        // back substitution to reduced form
        for i in (0..rank).rev() {
            let c = ech.pivots[i];
            let (w, bit) = (c / WORD, 1u64 << (c % WORD));
            let (top, rest) = data.split_at_mut(i * stride);
            let pivot = &rest[..stride];
            for row in top.chunks_mut(stride) {
                if row[w] & bit != 0 {
                    for (a, b) in row.iter_mut().zip(pivot) {
                        *a ^= b;
                    }
                }
            }
        }
        let mut is_pivot = vec![false; self.width];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        (0..self.width)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(self.width);
                v.set(f, true);
                for (i, &c) in ech.pivots.iter().enumerate() {
                    if (data[i * stride + f / WORD] >> (f % WORD)) & 1 == 1 {
                        v.set(c, true);
                    }
                }
                v
            })
            .collect()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows, self.width)?;
        for r in self.rows() {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Forward elimination in place; returns the rank. Rows `0..rank` end up in echelon form.
fn eliminate(
    data: &mut [u64],
    rows: usize,
    stride: usize,
    width: usize,
    mut pivots: Option<&mut Vec<usize>>,
) -> usize {
    let mut rank = 0;
    for col in 0..width {
        if rank == rows {
            break;
        }
        let w = col / WORD;
        let bit = 1u64 << (col % WORD);
        let Some(p) = (rank..rows).find(|&r| data[r * stride + w] & bit != 0) else {
            continue;
        };
        if p != rank {
            for k in w..stride {
                data.swap(p * stride + k, rank * stride + k);
            }
        }
        let (top, bottom) = data.split_at_mut((rank + 1) * stride);
        let pivot = &top[rank * stride + w..];
        let reduce = |row: &mut [u64]| {
            if row[w] & bit != 0 {
                for (a, b) in row[w..].iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        };
        let below = rows - rank - 1;
        if below * (stride - w) >= PAR_THRESHOLD {
            bottom[..below * stride].par_chunks_mut(stride).for_each(reduce);
        } else {
            bottom[..below * stride].chunks_mut(stride).for_each(reduce);
        }
        if let Some(p) = pivots.as_deref_mut() {
            p.push(col);
        }
        rank += 1;
    }
    rank
}

/// Row-echelon basis of a row space.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    stride: usize,
    data: Vec<u64>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the row space.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.width, "vector width mismatch");
        let mut out = v.words().to_vec();
        for (i, &c) in self.pivots.iter().enumerate() {
            let w = c / WORD;
            if (out[w] >> (c % WORD)) & 1 == 1 {
                let row = &self.data[i * self.stride..(i + 1) * self.stride];
                for k in w..self.stride {
                    out[k] ^= row[k];
                }
            }
        }
        BitVec::from_words(self.width, out)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_is_kernel() {
        let m = BinaryMatrix::parse(4, &["1100", "0110", "1010"]).unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 4 - m.rank());
        for v in &ns {
            assert!(m.rows().all(|r| !r.dot(v)));
        }
        assert!(BinaryMatrix::from_rows(4, ns.iter()).unwrap().rank() == ns.len());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BinaryMatrix::new(3).rank(), 0);
        assert_eq!(BinaryMatrix::parse(2, &["10", "01"]).unwrap().rank(), 2);
        assert_eq!(BinaryMatrix::parse(2, &["11", "11", "00"]).unwrap().rank(), 1);
    }

    #[test]
    fn rowspace_examples() {
        let m = BinaryMatrix::parse(2, &["10", "01"]).unwrap();
        assert!(m.in_rowspace(&BitVec::parse("11").unwrap()).unwrap());
        let m = BinaryMatrix::parse(2, &["10"]).unwrap();
        assert!(!m.in_rowspace(&BitVec::parse("01").unwrap()).unwrap());
        let m = BinaryMatrix::new(2);
        assert!(m.in_rowspace(&BitVec::zeros(2)).unwrap());
        assert!(m.in_rowspace(&BitVec::zeros(3)).is_err());
    }

    #[test]
    fn wide_matrix_crosses_word_boundaries() {
        let width = 200;
        let mut m = BinaryMatrix::new(width);
        for i in 0..150 {
            let mut v = BitVec::zeros(width);
            v.set(i, true);
            v.set(i + 50, true);
            m.push_row(&v).unwrap();
        }
        assert_eq!(m.rank(), 150);
        let mut sum = BitVec::zeros(width);
        sum.set(0, true);
        sum.set(150, true);
        assert!(m.in_rowspace(&sum).unwrap());
    }

    #[test]
    fn iter_ones_and_display() {
        let v = BitVec::parse("0110001").unwrap();
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![1, 2, 6]);
        assert_eq!(v.to_string(), "0110001");
        assert_eq!(v.count_ones(), 3);
    }

    #[test]
    fn column_ops() {
        let mut m = BinaryMatrix::parse(3, &["100", "010"]).unwrap();
        m.xor_column_into(0, 2);
        assert_eq!(m.row(0).to_string(), "101");
        m.swap_columns(0, 1);
        assert_eq!(m.row(0).to_string(), "011");
        assert_eq!(m.row(1).to_string(), "100");
        let s = m.select_columns(&[2, 0]);
        assert_eq!(s.row(0).to_string(), "10");
    }
}
