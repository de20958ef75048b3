//! Dense linear algebra over GF(2) with bit-packed storage.
//!
//! Elimination always picks the first nonzero entry scanning rows top to
//! bottom inside the leftmost remaining column, so results are reproducible.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not invertible")]
    Singular,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector of GF(2) coordinates. Bits past `len` are always zero, so derived
/// equality and ordering are canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn add_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn add(&self, other: &F2Vector) -> F2Vector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Appends the coordinates of `other` after those of `self`.
    pub fn concat(&self, other: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> F2Vector {
        let mut out = F2Vector::zeros(end - start);
        for i in self.ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "]")
    }
}

/// Row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

/// Reduced row echelon form together with the pivot column of each nonzero row.
struct Echelon {
    rows: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix { rows, cols, data: vec![F2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<F2Vector>) -> Result<Self, LinError> {
        for r in &rows {
            if r.len() != cols {
                return Err(LinError::DimensionMismatch { expected: cols, got: r.len() });
            }
        }
        Ok(F2Matrix { rows: rows.len(), cols, data: rows })
    }

    pub fn from_columns(rows: usize, columns: &[F2Vector]) -> Result<Self, LinError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(LinError::DimensionMismatch { expected: rows, got: c.len() });
            }
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    /// Builds a matrix from 0/1 entries; every row must have the same length.
    pub fn from_bits(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged rows");
                F2Vector::from_bits(r)
            })
            .collect();
        F2Matrix { rows: rows.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value)
    }

    pub fn row(&self, i: usize) -> &F2Vector {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> F2Vector {
        let mut c = F2Vector::zeros(self.rows);
        for i in 0..self.rows {
            if self.data[i].get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &F2Vector) -> Result<F2Vector, LinError> {
        if v.len() != self.cols {
            return Err(LinError::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = F2Vector::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix, LinError> {
        if other.rows != self.cols {
            return Err(LinError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            for k in r.ones() {
                out.data[i].add_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F2Vector::is_zero)
    }

    fn echelon(&self) -> Echelon {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.add_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the null space, one vector per free column in ascending order.
    pub fn kernel_basis(&self) -> Vec<F2Vector> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = F2Vector::unit(self.cols, free);
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// One solution of `self * x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &F2Vector) -> Result<Option<F2Vector>, LinError> {
        if b.len() != self.rows {
            return Err(LinError::DimensionMismatch { expected: self.rows, got: b.len() });
        }
        let augmented: Vec<F2Vector> =
            self.data.iter().enumerate().map(|(i, r)| r.concat(&F2Vector::from_bits(&[b.get(i) as u8]))).collect();
        let ech = F2Matrix { rows: self.rows, cols: self.cols + 1, data: augmented }.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = F2Vector::zeros(self.cols);
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            if row.get(self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<F2Matrix, LinError> {
        if self.rows != self.cols {
            return Err(LinError::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let augmented: Vec<F2Vector> =
            self.data.iter().enumerate().map(|(i, r)| r.concat(&F2Vector::unit(n, i))).collect();
        let ech = F2Matrix { rows: n, cols: 2 * n, data: augmented }.echelon();
        if ech.pivots.len() < n || (n > 0 && ech.pivots[n - 1] >= n) {
            return Err(LinError::Singular);
        }
        let data = ech.rows.iter().map(|r| r.slice(n, 2 * n)).collect();
        Ok(F2Matrix { rows: n, cols: n, data })
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_vectors(n: usize) -> impl Iterator<Item = F2Vector> {
        (0u32..(1 << n)).map(move |mask| {
            let bits: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
            F2Vector::from_bits(&bits)
        })
    }

    #[test]
    fn rank_small_cases() {
        assert_eq!(F2Matrix::identity(2).rank(), 2);
        assert_eq!(F2Matrix::zeros(3, 4).rank(), 0);
        assert_eq!(F2Matrix::from_bits(&[&[1, 1], &[1, 1]]).rank(), 1);
    }

    #[test]
    fn kernel_small_cases() {
        assert!(F2Matrix::identity(3).kernel_basis().is_empty());
        let k = F2Matrix::zeros(2, 3).kernel_basis();
        assert_eq!(k.len(), 3);
        assert_eq!(F2Matrix::from_columns(3, &k).unwrap().rank(), 3);

        let m = F2Matrix::from_bits(&[&[1, 1, 0], &[0, 1, 1]]);
        let oracle: Vec<F2Vector> =
            all_vectors(3).filter(|v| !v.is_zero() && m.mul_vec(v).unwrap().is_zero()).collect();
        assert_eq!(oracle, vec![F2Vector::from_bits(&[1, 1, 1])]);
        assert_eq!(m.kernel_basis(), oracle);
    }

    #[test]
    fn solve_small_cases() {
        let b = F2Vector::from_bits(&[1, 0, 1]);
        assert_eq!(F2Matrix::identity(3).solve(&b).unwrap(), Some(b.clone()));
        assert_eq!(F2Matrix::zeros(3, 3).solve(&b).unwrap(), None);

        let m = F2Matrix::from_bits(&[&[1, 1], &[0, 1]]);
        let b = F2Vector::from_bits(&[1, 1]);
        let oracle: Vec<F2Vector> = all_vectors(2).filter(|x| m.mul_vec(x).unwrap() == b).collect();
        assert_eq!(oracle, vec![F2Vector::from_bits(&[0, 1])]);
        assert_eq!(m.solve(&b).unwrap(), Some(F2Vector::from_bits(&[0, 1])));
        assert!(m.solve(&F2Vector::zeros(3)).is_err());
    }

    #[test]
    fn vector_basics() {
        let mut v = F2Vector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.weight(), 3);
        let w = v.clone();
        v.add_assign(&w);
        assert!(v.is_zero());
        assert_eq!(v, F2Vector::zeros(130));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = F2Matrix::from_bits(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), F2Matrix::identity(3));
        assert_eq!(F2Matrix::from_bits(&[&[1, 1], &[1, 1]]).inverse(), Err(LinError::Singular));
    }

    fn matrix_strategy() -> impl Strategy<Value = F2Matrix> {
        (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(0u8..2, c), r).prop_map(move |rows| {
                F2Matrix::from_rows(c, rows.iter().map(|b| F2Vector::from_bits(b)).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in matrix_strategy()) {
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.cols());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
            if !k.is_empty() {
                prop_assert_eq!(F2Matrix::from_columns(m.cols(), &k).unwrap().rank(), k.len());
            }
        }

        #[test]
        fn rank_is_transpose_invariant(m in matrix_strategy()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_is_permutation_invariant(m in matrix_strategy(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..m.rows()).collect();
            order.shuffle(&mut rng);
            let rows = order.iter().map(|&i| m.row(i).clone()).collect();
            let p = F2Matrix::from_rows(m.cols(), rows).unwrap();
            prop_assert_eq!(p.rank(), m.rank());
        }

        #[test]
        fn solve_reproduces_rhs(m in matrix_strategy(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let bits: Vec<u8> = (0..m.rows()).map(|_| rng.gen_range(0..2)).collect();
            let b = F2Vector::from_bits(&bits);
            if let Some(x) = m.solve(&b).unwrap() {
                prop_assert_eq!(m.mul_vec(&x).unwrap(), b.clone());
            }
            prop_assert_eq!(m.solve(&b).unwrap(), m.solve(&b).unwrap());
        }
    }
}
