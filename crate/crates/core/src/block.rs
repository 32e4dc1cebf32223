//! Dense d×d complex blocks and windows of them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A d×d complex matrix standing in for a bounded operator on H.
pub type OperatorBlock = DMatrix<Complex64>;

pub fn identity(d: usize) -> OperatorBlock {
    DMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> OperatorBlock {
    DMatrix::zeros(d, d)
}

pub fn scaled_identity(d: usize, s: Complex64) -> OperatorBlock {
    DMatrix::from_diagonal_element(d, d, s)
}

/// Singular values in decreasing order.
pub fn singular_values(x: &OperatorBlock) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = x.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Spectral norm.
pub fn norm(x: &OperatorBlock) -> f64 {
    singular_values(x).first().copied().unwrap_or(0.0)
}

pub fn smallest_singular_value(x: &OperatorBlock) -> f64 {
    singular_values(x).last().copied().unwrap_or(0.0)
}

/// Trace norm (sum of singular values).
pub fn trace_norm(x: &OperatorBlock) -> f64 {
    singular_values(x).iter().sum()
}

pub fn hermitian_defect(x: &OperatorBlock) -> f64 {
    norm(&(x - x.adjoint()))
}

pub fn is_hermitian(x: &OperatorBlock, rel: f64) -> bool {
    hermitian_defect(x) <= rel * norm(x).max(1.0)
}

/// Inverse, failing when σ_min ≤ tol.
pub fn checked_inverse(x: &OperatorBlock, tol: f64) -> Option<OperatorBlock> {
    if smallest_singular_value(x) <= tol {
        return None;
    }
    x.clone().try_inverse()
}

/// A finite window {U_n : lo ≤ n ≤ hi} of blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSequence {
    lo: i64,
    blocks: Vec<OperatorBlock>,
}

impl BlockSequence {
    pub fn new(lo: i64, blocks: Vec<OperatorBlock>) -> Self {
        BlockSequence { lo, blocks }
    }

    pub fn from_fn(lo: i64, hi: i64, mut f: impl FnMut(i64) -> OperatorBlock) -> Self {
        BlockSequence { lo, blocks: (lo..=hi).map(&mut f).collect() }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.blocks.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi()
    }

    pub fn get(&self, n: i64) -> Option<&OperatorBlock> {
        if self.contains(n) {
            Some(&self.blocks[(n - self.lo) as usize])
        } else {
            None
        }
    }

    pub fn at(&self, n: i64) -> Result<&OperatorBlock> {
        self.get(n).ok_or(Error::OutOfWindow { n, lo: self.lo, hi: self.hi() })
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &OperatorBlock)> {
        self.blocks.iter().enumerate().map(move |(k, b)| (self.lo + k as i64, b))
    }

    pub fn map(&self, mut f: impl FnMut(i64, &OperatorBlock) -> OperatorBlock) -> Self {
        BlockSequence { lo: self.lo, blocks: self.iter().map(|(n, b)| f(n, b)).collect() }
    }

    /// Blockwise adjoint.
    pub fn adjoint(&self) -> Self {
        self.map(|_, b| b.adjoint())
    }

    /// Right multiplication of every block by `x`.
    pub fn mul_right(&self, x: &OperatorBlock) -> Self {
        self.map(|_, b| b * x)
    }

    pub fn max_norm(&self) -> f64 {
        self.blocks.iter().map(norm).fold(0.0, f64::max)
    }

    /// max_n ‖self_n − other_n‖ over the common window.
    pub fn max_diff(&self, other: &BlockSequence) -> f64 {
        let lo = self.lo.max(other.lo);
        let hi = self.hi().min(other.hi());
        (lo..=hi)
            .map(|n| norm(&(self.get(n).unwrap() - other.get(n).unwrap())))
            .fold(0.0, f64::max)
    }
}

/// A 2×2 array of d×d blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix2 {
    pub blocks: [[OperatorBlock; 2]; 2],
}

impl BlockMatrix2 {
    pub fn new(b00: OperatorBlock, b01: OperatorBlock, b10: OperatorBlock, b11: OperatorBlock) -> Self {
        BlockMatrix2 { blocks: [[b00, b01], [b10, b11]] }
    }

    pub fn identity(d: usize) -> Self {
        BlockMatrix2::new(identity(d), zeros(d), zeros(d), identity(d))
    }

    pub fn dim(&self) -> usize {
        self.blocks[0][0].nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> &OperatorBlock {
        &self.blocks[i][j]
    }

    /// The 2d×2d matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..2 {
            for j in 0..2 {
                m.view_mut((i * d, j * d), (d, d)).copy_from(&self.blocks[i][j]);
            }
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let d = m.nrows() / 2;
        let b = |i: usize, j: usize| m.view((i * d, j * d), (d, d)).into_owned();
        BlockMatrix2::new(b(0, 0), b(0, 1), b(1, 0), b(1, 1))
    }

    pub fn mul(&self, other: &BlockMatrix2) -> BlockMatrix2 {
        BlockMatrix2::from_dense(&(self.to_dense() * other.to_dense()))
    }

    pub fn norm(&self) -> f64 {
        norm(&self.to_dense())
    }

    /// Spectral norm of the difference.
    pub fn distance(&self, other: &BlockMatrix2) -> f64 {
        norm(&(self.to_dense() - other.to_dense()))
    }

    /// Largest blockwise spectral-norm difference.
    pub fn max_block_diff(&self, other: &BlockMatrix2) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max(norm(&(&self.blocks[i][j] - &other.blocks[i][j])));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn norms_of_diagonal_block() {
        let x = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(0.0, -1.0)]));
        assert!((norm(&x) - 3.0).abs() < 1e-14);
        assert!((trace_norm(&x) - 4.0).abs() < 1e-14);
        assert!((smallest_singular_value(&x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_check() {
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(-1.0, 0.0)]);
        assert!(is_hermitian(&h, 1e-12));
        let mut g = h.clone();
        g[(0, 1)] = c(0.0, 2.1);
        assert!(!is_hermitian(&g, 1e-12));
    }

    #[test]
    fn checked_inverse_rejects_singular() {
        assert!(checked_inverse(&zeros(2), 1e-10).is_none());
        let inv = checked_inverse(&scaled_identity(2, c(2.0, 0.0)), 1e-10).unwrap();
        assert!((inv[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sequence_window() {
        let s = BlockSequence::from_fn(-2, 3, |n| scaled_identity(1, c(n as f64, 0.0)));
        assert_eq!(s.hi(), 3);
        assert_eq!(s.len(), 6);
        assert_eq!(s.at(-2).unwrap()[(0, 0)], c(-2.0, 0.0));
        assert!(matches!(s.at(4), Err(Error::OutOfWindow { n: 4, .. })));
        assert_eq!(s.iter().map(|(n, _)| n).collect::<Vec<_>>(), vec![-2, -1, 0, 1, 2, 3]);
    }
}
