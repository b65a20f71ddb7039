//! Singular values by one-sided Jacobi rotations, and numerical rank.

use crate::linalg::{LinalgError, Matrix};
use crate::scalar::Scalar;

/// Default relative tolerance for [`numerical_rank`].
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

/// Singular values, nonincreasing.
///
/// Works on the columns of the taller orientation and orthogonalizes them
/// pairwise until every pair is orthogonal to working precision; the column
/// norms are then the singular values.
pub fn singular_values<T: Scalar>(m: &Matrix<T>) -> Result<Vec<T>, LinalgError> {
    if m.is_empty() {
        return Err(LinalgError::EmptyMatrix);
    }
    let work = if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        m.transpose()
    };
    let (rows, cols) = work.shape();
    // column-major copy so each column is contiguous
    let mut columns: Vec<Vec<T>> = (0..cols).map(|c| work.column(c)).collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&columns[p], &columns[q]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = T::zero();
                    for i in 0..rows {
                        alpha = alpha + cp[i] * cp[i];
                        beta = beta + cq[i] * cq[i];
                        gamma = gamma + cp[i] * cq[i];
                    }
                    (alpha, beta, gamma)
                };
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let two = T::lit(2.0);
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for i in 0..rows {
                    let x = cp[i];
                    let y = cq[i];
                    cp[i] = c * x - s * y;
                    cq[i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = columns
        .iter()
        .map(|col| col.iter().map(|&v| v * v).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv.truncate(rows.min(cols));
    Ok(sv)
}

/// Singular spectrum and the rank it implies at a relative tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct RankReport<T> {
    pub singular_values: Vec<T>,
    pub numerical_rank: usize,
    pub tolerance_used: T,
}

/// Counts singular values above `tol · σ₁`.
pub fn numerical_rank<T: Scalar>(m: &Matrix<T>, tol: T) -> Result<RankReport<T>, LinalgError> {
    if !(tol > T::zero() && tol < T::one()) {
        return Err(LinalgError::InvalidTolerance(tol.as_f64()));
    }
    let singular_values = singular_values(m)?;
    let cutoff = tol * singular_values[0];
    let numerical_rank = singular_values.iter().filter(|&&s| s > cutoff).count();
    Ok(RankReport {
        singular_values,
        numerical_rank,
        tolerance_used: tol,
    })
}
