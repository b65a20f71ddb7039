//! Scalar Schur complements of a bordered matrix.
//!
//! An `(r+1)×(r+1)` matrix is read as
//!
//! ```text
//!     [ a   βᵀ  b ]
//!     [ α   M   δ ]
//!     [ c   γᵀ  d ]
//! ```
//!
//! with `M` the `(r−1)×(r−1)` interior. [`BorderedPartition`] picks which rows and
//! columns of a larger matrix play the roles of the first, shared and last lines.

use crate::linalg::lu::{invert_checked, DEFAULT_KAPPA_MAX};
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::Scalar;

/// Row and column selection `first, shared…, last` on each axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorderedPartition {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl BorderedPartition {
    /// The natural partition of an `(r+1)×(r+1)` matrix.
    pub fn canonical(r: usize) -> Self {
        Self {
            rows: (0..=r).collect(),
            cols: (0..=r).collect(),
        }
    }

    /// Builds a partition from a displacing pair and a shared set on each axis.
    pub fn select(
        row_pair: (usize, usize),
        shared_rows: &[usize],
        col_pair: (usize, usize),
        shared_cols: &[usize],
    ) -> Self {
        let mut rows = vec![row_pair.0];
        rows.extend_from_slice(shared_rows);
        rows.push(row_pair.1);
        let mut cols = vec![col_pair.0];
        cols.extend_from_slice(shared_cols);
        cols.push(col_pair.1);
        Self { rows, cols }
    }

    /// `r`, the size of the partial determinant this partition feeds.
    pub fn rank(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// Extracts the `(r+1)×(r+1)` matrix this partition describes.
    pub fn extract<T: Scalar>(&self, s: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        if self.rows.len() != self.cols.len() || self.rows.len() < 2 {
            return Err(LinalgError::BadPartition(format!(
                "need equally many (≥2) rows and columns, got {} and {}",
                self.rows.len(),
                self.cols.len()
            )));
        }
        let distinct = |v: &[usize]| {
            let mut w = v.to_vec();
            w.sort_unstable();
            w.dedup();
            w.len() == v.len()
        };
        if !distinct(&self.rows) || !distinct(&self.cols) {
            return Err(LinalgError::BadPartition("repeated row or column".into()));
        }
        if self.rows.iter().any(|&r| r >= s.nrows()) || self.cols.iter().any(|&c| c >= s.ncols()) {
            return Err(LinalgError::BadPartition("index out of range".into()));
        }
        Ok(s.select(&self.rows, &self.cols))
    }
}

/// The four pieces of a bordered matrix around its interior block.
#[derive(Clone, Debug, PartialEq)]
pub struct Bordered<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub gamma: Vec<T>,
    pub delta: Vec<T>,
    pub interior: Matrix<T>,
}

impl<T: Scalar> Bordered<T> {
    pub fn split(s: &Matrix<T>) -> Result<Self, LinalgError> {
        if !s.is_square() {
            return Err(LinalgError::NonSquare {
                rows: s.nrows(),
                cols: s.ncols(),
            });
        }
        let n = s.nrows();
        if n < 2 {
            return Err(LinalgError::BadPartition(format!(
                "bordered matrix needs at least 2×2, got {n}×{n}"
            )));
        }
        let last = n - 1;
        let inner = 1..last;
        Ok(Self {
            a: s[(0, 0)],
            b: s[(0, last)],
            c: s[(last, 0)],
            d: s[(last, last)],
            alpha: inner.clone().map(|i| s[(i, 0)]).collect(),
            beta: inner.clone().map(|j| s[(0, j)]).collect(),
            gamma: inner.clone().map(|j| s[(last, j)]).collect(),
            delta: inner.clone().map(|i| s[(i, last)]).collect(),
            interior: s.block(1, 1, n - 2, n - 2),
        })
    }
}

/// `A/M, B/M, C/M, D/M` together with the interior inverse used to form them.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurComplements<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub interior_condition: T,
}

impl<T: Scalar> SchurComplements<T> {
    /// `(B/M)(C/M) / ((A/M)(D/M))`.
    pub fn cross_ratio(&self) -> T {
        (self.b * self.c) / (self.a * self.d)
    }

    /// Determinant of the 2×2 complement `[[A/M, B/M], [C/M, D/M]]`.
    pub fn determinant(&self) -> T {
        self.a * self.d - self.b * self.c
    }
}

fn bilinear<T: Scalar>(left: &[T], inv: &Matrix<T>, right: &[T]) -> T {
    let mut acc = T::zero();
    for (i, &l) in left.iter().enumerate() {
        let row = inv.row(i);
        let dot: T = row.iter().zip(right).map(|(&m, &r)| m * r).sum();
        acc = acc + l * dot;
    }
    acc
}

/// Schur complements of the interior block of a bordered matrix.
pub fn schur_complement<T: Scalar>(s: &Matrix<T>) -> Result<SchurComplements<T>, LinalgError> {
    schur_complement_with(s, T::lit(DEFAULT_KAPPA_MAX))
}

pub fn schur_complement_with<T: Scalar>(
    s: &Matrix<T>,
    kappa_max: T,
) -> Result<SchurComplements<T>, LinalgError> {
    let parts = Bordered::split(s)?;
    let inv = invert_checked(&parts.interior, kappa_max)?;
    let m_inv = &inv.inverse;
    Ok(SchurComplements {
        a: parts.a - bilinear(&parts.beta, m_inv, &parts.alpha),
        b: parts.b - bilinear(&parts.beta, m_inv, &parts.delta),
        c: parts.c - bilinear(&parts.gamma, m_inv, &parts.alpha),
        d: parts.d - bilinear(&parts.gamma, m_inv, &parts.delta),
        interior_condition: inv.condition,
    })
}
