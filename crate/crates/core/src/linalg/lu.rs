//! LU factorization with complete pivoting.
//!
//! Complete pivoting makes the factorization rank-revealing enough to catch
//! exactly singular corners; the inversion contract is enforced separately
//! through the one-norm condition number of the computed inverse.

use crate::linalg::{LinalgError, Matrix};
use crate::scalar::Scalar;

/// Default ceiling on the condition number before an inversion is refused.
pub const DEFAULT_KAPPA_MAX: f64 = 1e8;

/// `P · M · Q = L · U` with unit-lower `L`, packed into one matrix.
#[derive(Clone, Debug)]
pub struct LuDecomposition<T> {
    lu: Matrix<T>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Scalar> LuDecomposition<T> {
    pub fn new(m: &Matrix<T>) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut lu = m.clone();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;

        for k in 0..n {
            let (mut pr, mut pc, mut best) = (k, k, T::zero());
            for r in k..n {
                for c in k..n {
                    let v = lu[(r, c)].abs();
                    if v > best {
                        best = v;
                        pr = r;
                        pc = c;
                    }
                }
            }
            if best == T::zero() {
                singular = true;
                break;
            }
            if pr != k {
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(pr, c)];
                    lu[(pr, c)] = tmp;
                }
                row_perm.swap(k, pr);
                sign = -sign;
            }
            if pc != k {
                for r in 0..n {
                    let tmp = lu[(r, k)];
                    lu[(r, k)] = lu[(r, pc)];
                    lu[(r, pc)] = tmp;
                }
                col_perm.swap(k, pc);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for r in (k + 1)..n {
                let factor = lu[(r, k)] / pivot;
                lu[(r, k)] = factor;
                if factor != T::zero() {
                    for c in (k + 1)..n {
                        lu[(r, c)] = lu[(r, c)] - factor * lu[(k, c)];
                    }
                }
            }
        }

        Ok(Self {
            lu,
            row_perm,
            col_perm,
            sign,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> T {
        if self.singular {
            return T::zero();
        }
        (0..self.lu.nrows()).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    /// Solves `M x = b` for every column of `b`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
        let n = self.lu.nrows();
        if self.singular {
            return Err(LinalgError::IllConditioned {
                condition: f64::INFINITY,
            });
        }
        if b.nrows() != n {
            return Err(LinalgError::ShapeMismatch {
                expected: (n, b.ncols()),
                found: b.shape(),
            });
        }
        let mut x = Matrix::zeros(n, b.ncols());
        let mut y = vec![T::zero(); n];
        for col in 0..b.ncols() {
            for i in 0..n {
                let mut s = b[(self.row_perm[i], col)];
                for j in 0..i {
                    s = s - self.lu[(i, j)] * y[j];
                }
                y[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in (i + 1)..n {
                    s = s - self.lu[(i, j)] * y[j];
                }
                y[i] = s / self.lu[(i, i)];
            }
            for i in 0..n {
                x[(self.col_perm[i], col)] = y[i];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix<T>, LinalgError> {
        self.solve(&Matrix::identity(self.lu.nrows()))
    }
}

/// Inverse together with the one-norm condition number `‖M‖₁ ‖M⁻¹‖₁`.
#[derive(Clone, Debug)]
pub struct Inverse<T> {
    pub inverse: Matrix<T>,
    pub condition: T,
}

/// Inverts `m`, refusing when the condition number exceeds `kappa_max`.
pub fn invert_checked<T: Scalar>(m: &Matrix<T>, kappa_max: T) -> Result<Inverse<T>, LinalgError> {
    if m.is_empty() && m.is_square() {
        return Ok(Inverse {
            inverse: Matrix::zeros(0, 0),
            condition: T::one(),
        });
    }
    let lu = LuDecomposition::new(m)?;
    if lu.is_singular() {
        return Err(LinalgError::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    let inverse = lu.inverse()?;
    let condition = m.norm_one() * inverse.norm_one();
    if !condition.is_finite() || condition > kappa_max {
        return Err(LinalgError::IllConditioned {
            condition: condition.as_f64(),
        });
    }
    Ok(Inverse { inverse, condition })
}

/// Inverts `m` under the default condition ceiling of `1e8`.
pub fn invert<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    invert_checked(m, T::lit(DEFAULT_KAPPA_MAX)).map(|inv| inv.inverse)
}

/// One-norm condition estimate; infinite for singular input.
pub fn condition_number<T: Scalar>(m: &Matrix<T>) -> Result<T, LinalgError> {
    match invert_checked(m, T::infinity()) {
        Ok(inv) => Ok(inv.condition),
        Err(LinalgError::IllConditioned { .. }) => Ok(T::infinity()),
        Err(e) => Err(e),
    }
}

pub fn determinant<T: Scalar>(m: &Matrix<T>) -> Result<T, LinalgError> {
    if m.is_empty() && m.is_square() {
        return Ok(T::one());
    }
    Ok(LuDecomposition::new(m)?.determinant())
}
