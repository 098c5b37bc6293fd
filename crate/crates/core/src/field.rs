//! Arithmetic and dense linear algebra over prime fields `F_p`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix shapes {left:?} and {right:?} are incompatible")]
    Shape { left: (usize, usize), right: (usize, usize) },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
}

/// A prime below `2^31`, so products of residues fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    pub const TWO: Prime = Prime(2);

    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 2 || p >= 1 << 31 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Prime(p as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.0 as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.0 as u64 - b as u64) % self.0 as u64) as u32
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "zero has no inverse");
        let (mut base, mut exp, mut acc) = (a as u64 % self.0 as u64, self.0 as u64 - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.0 as u64;
            }
            base = base * base % self.0 as u64;
            exp >>= 1;
        }
        acc as u32
    }

    /// Residue of a signed integer.
    pub fn from_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }
}

impl TryFrom<u64> for Prime {
    type Error = FieldError;
    fn try_from(p: u64) -> Result<Self, FieldError> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0 as u64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Row-major dense matrix with entries in `0..p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    p: Prime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zeros(p: Prime, rows: usize, cols: usize) -> Self {
        FieldMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Entries are reduced mod `p`. An empty row list gives a `0 × cols` matrix.
    pub fn from_rows(p: Prime, cols: usize, rows: &[Vec<u64>]) -> Result<Self, FieldError> {
        let mut m = Self::zeros(p, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(FieldError::RaggedRows { row: r, expected: cols, found: row.len() });
            }
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, (v % p.get() as u64) as u32);
            }
        }
        Ok(m)
    }

    pub fn from_columns(p: Prime, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(p, rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p.get();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|&v| v as u64).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &FieldMatrix) -> Result<FieldMatrix, FieldError> {
        if self.cols != rhs.rows {
            return Err(FieldError::Shape { left: self.shape(), right: rhs.shape() });
        }
        let p = self.p.get() as u64;
        let mut out = Self::zeros(self.p, self.rows, rhs.cols);
        let mut acc = vec![0u64; rhs.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(rhs.row(k)) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.data[r * rhs.cols + c] = v as u32;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u32, |acc, (&a, &b)| self.p.add(acc, self.p.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, rhs: &FieldMatrix) -> Result<FieldMatrix, FieldError> {
        self.zip_with(rhs, |p, a, b| p.add(a, b))
    }

    pub fn sub(&self, rhs: &FieldMatrix) -> Result<FieldMatrix, FieldError> {
        self.zip_with(rhs, |p, a, b| p.sub(a, b))
    }

    fn zip_with(&self, rhs: &FieldMatrix, op: impl Fn(Prime, u32, u32) -> u32) -> Result<FieldMatrix, FieldError> {
        if self.shape() != rhs.shape() {
            return Err(FieldError::Shape { left: self.shape(), right: rhs.shape() });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| op(self.p, a, b)).collect();
        Ok(FieldMatrix { data, ..*self })
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..m.cols {
                    m.data.swap(pr * m.cols + k, r * m.cols + k);
                }
            }
            let inv = p.inv(m.get(r, c));
            for k in c..m.cols {
                let v = p.mul(m.get(r, k), inv);
                m.set(r, k, v);
            }
            for i in 0..m.rows {
                let f = m.get(i, c);
                if i == r || f == 0 {
                    continue;
                }
                for k in c..m.cols {
                    let v = p.sub(m.get(i, k), p.mul(f, m.get(r, k)));
                    m.data[i * m.cols + k] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : self·x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<u32>> {
        let (m, pivots) = self.rref();
        let p = self.p;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u32; self.cols];
                v[free] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = p.neg(m.get(r, free));
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self·x = b`, if one exists.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = Self::zeros(self.p, self.rows, self.cols + 1);
        for r in 0..self.rows {
            aug.data[r * (self.cols + 1)..r * (self.cols + 1) + self.cols].copy_from_slice(self.row(r));
            aug.set(r, self.cols, b[r]);
        }
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = m.get(r, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<FieldMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut aug = Self::zeros(self.p, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (m, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Self::zeros(self.p, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, m.get(r, n + c));
            }
        }
        Some(inv)
    }
}
