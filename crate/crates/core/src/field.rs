//! Exact arithmetic over prime fields GF(q) and dense matrices on top of it.
//!
//! Residues are stored as `u32` in `[0, q)`. Products are formed in `u64`
//! and reduced, so every operation is exact for any prime `q < 2^31`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible modulus (exclusive).
pub const MAX_MODULUS: u32 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not a prime in [2, 2^31)")]
    NotPrime(u64),
    #[error("value {value} is not a residue modulo {q}")]
    OutOfRange { value: u64, q: u32 },
    #[error("operands belong to different fields (GF({left}) vs GF({right}))")]
    FieldMismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
}

/// Trial-division primality test; moduli here never exceed 2^31.
pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q < 4 {
        return true;
    }
    if q.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// The prime field GF(q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    q: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = FieldError;

    fn try_from(q: u32) -> Result<Self, Self::Error> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.q
    }
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self, FieldError> {
        if q >= MAX_MODULUS || !is_prime(q as u64) {
            return Err(FieldError::NotPrime(q as u64));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// Wraps a residue, rejecting values outside `[0, q)`.
    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value >= self.q {
            return Err(FieldError::OutOfRange { value: value as u64, q: self.q });
        }
        Ok(FieldElement { value, q: self.q })
    }

    /// Maps an arbitrary integer into the field by reduction.
    pub fn reduce(&self, value: i64) -> u32 {
        value.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let q = self.q as u64;
        (if s >= q { s - q } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.q as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(&self, base: u32, mut exp: u64) -> u32 {
        let q = self.q as u64;
        let mut acc = 1u64 % q;
        let mut b = base as u64 % q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % q;
            }
            b = b * b % q;
            exp >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u32) -> Result<u32, FieldError> {
        if a.is_multiple_of(self.q) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// A residue tagged with its modulus, so mixed-field arithmetic is caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    q: u32,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { q: self.q }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<PrimeField, FieldError> {
        if self.q != other.q {
            return Err(FieldError::FieldMismatch { left: self.q, right: other.q });
        }
        Ok(self.field())
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, FieldError> {
        let f = self.same_field(&rhs)?;
        Ok(FieldElement { value: f.add(self.value, rhs.value), q: self.q })
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, FieldError> {
        let f = self.same_field(&rhs)?;
        Ok(FieldElement { value: f.sub(self.value, rhs.value), q: self.q })
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self, FieldError> {
        let f = self.same_field(&rhs)?;
        Ok(FieldElement { value: f.mul(self.value, rhs.value), q: self.q })
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        let value = self.field().inv(self.value)?;
        Ok(FieldElement { value, q: self.q })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row vectors; every entry must already be a residue.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch(format!(
                    "ragged rows: expected {} columns, found {}",
                    cols,
                    row.len()
                )));
            }
            for &v in row {
                if v >= field.modulus() {
                    return Err(FieldError::OutOfRange { value: v as u64, q: field.modulus() });
                }
                data.push(v);
            }
        }
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    pub fn from_fn(field: PrimeField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % field.modulus());
            }
        }
        Matrix { field, rows, cols, data }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn check_field(&self, other: &Matrix) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch { left: self.field.modulus(), right: other.field.modulus() });
        }
        Ok(())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, FieldError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let q = self.field.modulus() as u64;
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        let mut acc = vec![0u64; rhs.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(rhs.row(k)) {
                    *slot = (*slot + a as u64 * b as u64) % q;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.data[r * rhs.cols + c] = v as u32;
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `x · self`.
    pub fn left_mul_vec(&self, x: &[u32]) -> Result<Vec<u32>, FieldError> {
        if x.len() != self.rows {
            return Err(FieldError::DimensionMismatch(format!(
                "vector of length {} against {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let q = self.field.modulus() as u64;
        let mut acc = vec![0u64; self.cols];
        for (r, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (slot, &b) in acc.iter_mut().zip(self.row(r)) {
                *slot = (*slot + a as u64 * b as u64) % q;
            }
        }
        Ok(acc.into_iter().map(|v| v as u32).collect())
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix, FieldError> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(FieldError::DimensionMismatch("addition of unequal shapes".into()));
        }
        let f = self.field;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { field: f, rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        Matrix { field: f, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f.neg(v)).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Matrix) -> Result<Matrix, FieldError> {
        self.check_field(rhs)?;
        let f = self.field;
        Ok(Matrix::from_fn(f, self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            f.mul(self.get(r / rhs.rows, c / rhs.cols), rhs.get(r % rhs.rows, c % rhs.cols))
        }))
    }

    /// Submatrix formed by the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            let row = self.row(r);
            data.extend(cols.iter().map(|&c| row[c]));
        }
        Matrix { field: self.field, rows: rows.len(), cols: cols.len(), data }
    }

    /// Number of nonzero entries in each row.
    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows).map(|r| self.row(r).iter().filter(|&&v| v != 0).count()).collect()
    }

    /// Number of nonzero entries in each column.
    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for r in 0..self.rows {
            for (c, &v) in self.row(r).iter().enumerate() {
                if v != 0 {
                    w[c] += 1;
                }
            }
        }
        w
    }

    /// Reduces `self` in place to row echelon form and returns the rank.
    /// Pivots are the first nonzero entry found in each column.
    fn eliminate(&mut self) -> usize {
        let f = self.field;
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(pivot, rank);
            let inv = f.inv(self.get(rank, col)).expect("pivot is nonzero");
            for r in rank + 1..self.rows {
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                let scale = f.mul(factor, inv);
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), f.mul(scale, self.get(rank, c)));
                    self.data[r * self.cols + c] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate()
    }

    /// Rank computed destructively, reusing this matrix as the workspace.
    pub fn rank_in_place(&mut self) -> usize {
        self.eliminate()
    }

    /// Like [`Matrix::select`] but writes into an existing buffer.
    pub fn select_into(&self, rows: &[usize], cols: &[usize], out: &mut Matrix) {
        out.field = self.field;
        out.rows = rows.len();
        out.cols = cols.len();
        out.data.clear();
        for &r in rows {
            let row = self.row(r);
            out.data.extend(cols.iter().map(|&c| row[c]));
        }
    }

    /// Inverse via Gauss-Jordan elimination on `[self | I]`.
    pub fn inverse(&self) -> Result<Matrix, FieldError> {
        if !self.is_square() {
            return Err(FieldError::DimensionMismatch(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let f = self.field;
        let w = 2 * n;
        let mut aug = Matrix::zeros(f, n, w);
        for r in 0..n {
            aug.data[r * w..r * w + n].copy_from_slice(self.row(r));
            aug.data[r * w + n + r] = 1;
        }
        for col in 0..n {
            let pivot = (col..n).find(|&r| aug.get(r, col) != 0).ok_or(FieldError::Singular)?;
            aug.swap_rows(pivot, col);
            let inv = f.inv(aug.get(col, col))?;
            for c in 0..w {
                aug.data[col * w + c] = f.mul(aug.data[col * w + c], inv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = aug.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..w {
                    let v = f.sub(aug.data[r * w + c], f.mul(factor, aug.data[col * w + c]));
                    aug.data[r * w + c] = v;
                }
            }
        }
        Ok(Matrix::from_fn(f, n, n, |r, c| aug.get(r, n + c)))
    }

    /// Solves `x · self = b` for `x`, requiring full row rank so the solution
    /// is unique. Returns `Singular` when the rows are dependent or the system
    /// is inconsistent.
    pub fn solve_left(&self, b: &[u32]) -> Result<Vec<u32>, FieldError> {
        if b.len() != self.cols {
            return Err(FieldError::DimensionMismatch(format!(
                "right-hand side of length {} for {} columns",
                b.len(),
                self.cols
            )));
        }
        let f = self.field;
        let unknowns = self.rows;
        if unknowns == 0 {
            return if b.iter().all(|&v| v == 0) { Ok(Vec::new()) } else { Err(FieldError::Singular) };
        }
        // x · M = b  <=>  Mᵀ xᵀ = bᵀ; eliminate [Mᵀ | bᵀ].
        let w = unknowns + 1;
        let mut aug = Matrix::zeros(f, self.cols, w);
        for (r, &rhs) in b.iter().enumerate() {
            for c in 0..unknowns {
                aug.data[r * w + c] = self.get(c, r);
            }
            aug.data[r * w + unknowns] = rhs;
        }
        let mut pivot_row = 0;
        for col in 0..unknowns {
            let pivot = (pivot_row..aug.rows).find(|&r| aug.get(r, col) != 0).ok_or(FieldError::Singular)?;
            aug.swap_rows(pivot, pivot_row);
            let inv = f.inv(aug.get(pivot_row, col))?;
            for c in 0..w {
                aug.data[pivot_row * w + c] = f.mul(aug.data[pivot_row * w + c], inv);
            }
            for r in 0..aug.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = aug.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..w {
                    let v = f.sub(aug.data[r * w + c], f.mul(factor, aug.data[pivot_row * w + c]));
                    aug.data[r * w + c] = v;
                }
            }
            pivot_row += 1;
        }
        if (pivot_row..aug.rows).any(|r| aug.get(r, unknowns) != 0) {
            return Err(FieldError::Singular);
        }
        Ok((0..unknowns).map(|r| aug.get(r, unknowns)).collect())
    }
}
