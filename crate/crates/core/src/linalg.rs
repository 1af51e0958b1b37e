//! Sparse LU factorization over exact rationals or `f64`.
//!
//! The matrices solved here are `I - Q` for a substochastic `Q` from which
//! every state can leak out. Those are nonsingular M-matrices: every principal
//! submatrix is again one, so elimination in any fixed order has positive
//! pivots and needs no pivoting. Off-diagonal fill only ever accumulates
//! non-positive values, so the sparsity structure is exact in floating point.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic needed by the solvers, implemented for [`BigRational`] (exact
/// mode) and `f64` (float mode).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;

    fn mul_ref(&self, other: &Self) -> Self;
    fn div_ref(&self, other: &Self) -> Self;

    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self);

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self);

    /// Column names for tabular export of a value.
    const CSV_COLUMNS: &'static [&'static str];

    fn csv_fields(&self) -> Vec<String>;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    const CSV_COLUMNS: &'static [&'static str] = &["numerator", "denominator"];

    fn csv_fields(&self) -> Vec<String> {
        vec![self.numer().to_string(), self.denom().to_string()]
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &BigRational) -> Self {
        ratio_to_f64(q)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    const CSV_COLUMNS: &'static [&'static str] = &["value"];

    fn csv_fields(&self) -> Vec<String> {
        vec![format!("{self:e}")]
    }
}

/// Converts a rational to the nearest-ish `f64` without overflowing on huge
/// numerators and denominators.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = q.numer().bits().max(q.denom().bits()) as i64 - 60;
    let (n, d) = if shift > 0 {
        (q.numer() >> shift as usize, q.denom() >> shift as usize)
    } else {
        (q.numer().clone(), q.denom().clone())
    };
    let d = if d.is_zero() { BigInt::one() } else { d };
    n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0)
}

/// Square sparse matrix stored by rows.
#[derive(Clone, Debug)]
pub struct SparseMatrix<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn new(n: usize) -> Self {
        Self { rows: vec![Vec::new(); n] }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `value` at `(i, j)`, merging with an existing entry.
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        let row = &mut self.rows[i];
        match row.iter_mut().find(|(c, _)| *c == j) {
            Some((_, v)) => *v = v.clone() + value,
            None => row.push((j, value)),
        }
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = T::zero();
                for (j, a) in row {
                    acc.add_mul(a, &x[*j]);
                }
                acc
            })
            .collect()
    }

    pub fn mul_vec_transpose(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, a) in row {
                out[*j].add_mul(a, &x[i]);
            }
        }
        out
    }
}

/// `A = L U` with `L` unit lower triangular and `U` upper triangular, both
/// stored by rows.
#[derive(Clone, Debug)]
pub struct SparseLu<T> {
    matrix: SparseMatrix<T>,
    lower: Vec<Vec<(usize, T)>>,
    upper: Vec<Vec<(usize, T)>>,
    diag: Vec<T>,
}

impl<T: Scalar> SparseLu<T> {
    /// Row-by-row (up-looking) Doolittle elimination in natural index order.
    pub fn factor(matrix: SparseMatrix<T>) -> Result<Self> {
        let n = matrix.dim();
        let mut lower = Vec::with_capacity(n);
        let mut upper: Vec<Vec<(usize, T)>> = Vec::with_capacity(n);
        let mut diag: Vec<T> = Vec::with_capacity(n);
        for i in 0..n {
            let mut work: BTreeMap<usize, T> = BTreeMap::new();
            for (j, v) in matrix.row(i) {
                let e = work.entry(*j).or_insert_with(T::zero);
                *e = e.clone() + v.clone();
            }
            let mut l_row = Vec::new();
            while let Some((&j, _)) = work.iter().next() {
                if j >= i {
                    break;
                }
                let v = work.remove(&j).expect("present");
                if v.is_zero() {
                    continue;
                }
                let factor = v.div_ref(&diag[j]);
                for (k, u) in &upper[j] {
                    work.entry(*k).or_insert_with(T::zero).sub_mul(&factor, u);
                }
                l_row.push((j, factor));
            }
            let d = work.remove(&i).unwrap_or_else(T::zero);
            if d.is_zero() {
                return Err(Error::Singular(i));
            }
            diag.push(d);
            upper.push(work.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            lower.push(l_row);
        }
        Ok(Self { matrix, lower, upper, diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn fill(&self) -> usize {
        self.lower.iter().chain(&self.upper).map(Vec::len).sum::<usize>() + self.dim()
    }

    fn solve_once(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut y: Vec<T> = b.to_vec();
        for i in 0..n {
            for (j, l) in &self.lower[i] {
                let yj = y[*j].clone();
                y[i].sub_mul(l, &yj);
            }
        }
        for i in (0..n).rev() {
            let mut acc = y[i].clone();
            for (j, u) in &self.upper[i] {
                acc.sub_mul(u, &y[*j]);
            }
            y[i] = acc.div_ref(&self.diag[i]);
        }
        y
    }

    fn solve_transpose_once(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut z: Vec<T> = b.to_vec();
        // U^T z = b, forward by scattering column contributions.
        for i in 0..n {
            z[i] = z[i].div_ref(&self.diag[i]);
            let zi = z[i].clone();
            for (j, u) in &self.upper[i] {
                z[*j].sub_mul(u, &zi);
            }
        }
        // L^T x = z, backward.
        for i in (0..n).rev() {
            let xi = z[i].clone();
            for (j, l) in &self.lower[i] {
                z[*j].sub_mul(l, &xi);
            }
        }
        z
    }

    /// Solves `A x = b`. Float mode applies one step of iterative refinement.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = self.solve_once(b);
        if !T::EXACT {
            let ax = self.matrix.mul_vec(&x);
            let r: Vec<T> = b.iter().zip(ax).map(|(bi, ai)| bi.clone() - ai).collect();
            let d = self.solve_once(&r);
            for (xi, di) in x.iter_mut().zip(d) {
                *xi = xi.clone() + di;
            }
        }
        x
    }

    /// Solves `A^T x = b`. Float mode applies one step of iterative refinement.
    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let mut x = self.solve_transpose_once(b);
        if !T::EXACT {
            let ax = self.matrix.mul_vec_transpose(&x);
            let r: Vec<T> = b.iter().zip(ax).map(|(bi, ai)| bi.clone() - ai).collect();
            let d = self.solve_transpose_once(&r);
            for (xi, di) in x.iter_mut().zip(d) {
                *xi = xi.clone() + di;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn dense<T: Scalar>(m: &SparseMatrix<T>) -> Vec<Vec<T>> {
        let n = m.dim();
        let mut out = vec![vec![T::zero(); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in m.row(i) {
                row[*j] = row[*j].clone() + v.clone();
            }
        }
        out
    }

    fn path_matrix<T: Scalar>(n: usize, half: T) -> SparseMatrix<T> {
        let mut a = SparseMatrix::new(n);
        for i in 0..n {
            a.add(i, i, T::one());
            if i > 0 {
                a.add(i, i - 1, -half.clone());
            }
            if i + 1 < n {
                a.add(i, i + 1, -half.clone());
            }
        }
        a
    }

    #[test]
    fn exact_solve_and_transpose() {
        // A non-symmetric M-matrix.
        let mut a = SparseMatrix::new(3);
        for (i, j, v) in [(0, 0, q(1, 1)), (0, 1, q(-1, 3)), (1, 0, q(-1, 2)), (1, 1, q(1, 1)), (1, 2, q(-1, 4)), (2, 0, q(-1, 5)), (2, 2, q(1, 1))] {
            a.add(i, j, v);
        }
        let d = dense(&a);
        let lu = SparseLu::factor(a).unwrap();
        let b = vec![q(1, 1), q(2, 1), q(3, 1)];
        let x = lu.solve(&b);
        for i in 0..3 {
            let s: BigRational = (0..3).map(|j| &d[i][j] * &x[j]).sum();
            assert_eq!(s, b[i]);
        }
        let y = lu.solve_transpose(&b);
        for j in 0..3 {
            let s: BigRational = (0..3).map(|i| &d[i][j] * &y[i]).sum();
            assert_eq!(s, b[j]);
        }
    }

    #[test]
    fn gamblers_ruin_path() {
        // Interior {-2..2}, exit at +-3: P(exit right from k) = (k+3)/6.
        let a = path_matrix(5, q(1, 2));
        let lu = SparseLu::factor(a).unwrap();
        let mut b = vec![q(0, 1); 5];
        b[4] = q(1, 2);
        let x = lu.solve(&b);
        for (k, xk) in (-2..=2).zip(&x) {
            assert_eq!(*xk, q(k + 3, 6));
        }
    }

    #[test]
    fn float_matches_exact() {
        let lu = SparseLu::factor(path_matrix(40, 0.5f64)).unwrap();
        let mut b = vec![0.0; 40];
        b[39] = 0.5;
        let x = lu.solve(&b);
        for (i, xi) in x.iter().enumerate() {
            assert!((xi - (i as f64 + 1.0) / 41.0).abs() < 1e-13);
        }
        let y = lu.solve_transpose(&b);
        assert!((y[39] - x[39]).abs() < 1e-13);
    }

    #[test]
    fn singular_rejected() {
        let mut a = SparseMatrix::new(2);
        a.add(0, 0, q(1, 1));
        a.add(0, 1, q(-1, 1));
        a.add(1, 0, q(-1, 1));
        a.add(1, 1, q(1, 1));
        assert!(matches!(SparseLu::factor(a), Err(Error::Singular(1))));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone() + 1, big * 2);
        assert!((ratio_to_f64(&r) - 0.5).abs() < 1e-15);
    }
}
