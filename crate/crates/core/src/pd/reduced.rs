//! The `r×r` PD of an `(r+1)×(r+1)` matrix.
//!
//! The matrix is read as bordered around an `(r−1)×(r−1)` interior `M` and
//! the four overlapping `r×r` windows become the corners of a `2r×2r` square
//! `S̃`. Every loop PD of `S̃` is a rank-one update of the identity whose size is
//! set by the single scalar `x = (B/M)(C/M) / ((A/M)(D/M))`, so the PD is
//! trivial exactly when `det S = 0`.

use crate::linalg::{
    invert_checked, schur_complement_with, Bordered, BorderedPartition, Matrix, SchurComplements,
    DEFAULT_KAPPA_MAX,
};
use crate::pd::{partial_determinant_with, pd_variants_with, PdError, Square, Variant};
use crate::scalar::Scalar;

/// The four families of unipotent translation matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Translation {
    /// Column 0 below the diagonal.
    Alpha,
    /// Row 0 right of the diagonal.
    Beta,
    /// Last row left of the diagonal.
    Gamma,
    /// Last column above the diagonal.
    Delta,
}

/// The `r×r` translation matrix carrying `v` (length `r−1`).
pub fn translation<T: Scalar>(kind: Translation, v: &[T]) -> Matrix<T> {
    let r = v.len() + 1;
    let mut t = Matrix::identity(r);
    for (i, &x) in v.iter().enumerate() {
        match kind {
            Translation::Alpha => t[(i + 1, 0)] = x,
            Translation::Beta => t[(0, i + 1)] = x,
            Translation::Gamma => t[(r - 1, i)] = x,
            Translation::Delta => t[(i, r - 1)] = x,
        }
    }
    t
}

/// One loop variant of `S̃` next to its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedVariant<T> {
    pub variant: Variant,
    pub direct: Matrix<T>,
    pub closed_form: Matrix<T>,
    /// Max-abs difference between the two.
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPd<T> {
    pub r: usize,
    pub x: T,
    pub schur: SchurComplements<T>,
    /// `Ã⁻¹B̃D̃⁻¹C̃` evaluated directly.
    pub delta: Matrix<T>,
    /// `I + (x−1)·α̃e₀e₀ᵀ`.
    pub closed_form: Matrix<T>,
    /// Max-abs difference between `delta` and `closed_form`.
    pub residual: T,
    /// `−M⁻¹α, −βᵀM⁻¹, −γᵀM⁻¹, −M⁻¹δ`.
    pub shifts: [Vec<T>; 4],
    pub square: Square<T>,
}

impl<T: Scalar> ReducedPd<T> {
    pub fn translation(&self, kind: Translation) -> Matrix<T> {
        let v = match kind {
            Translation::Alpha => &self.shifts[0],
            Translation::Beta => &self.shifts[1],
            Translation::Gamma => &self.shifts[2],
            Translation::Delta => &self.shifts[3],
        };
        translation(kind, v)
    }

    /// `I + c·T·E` where `E` projects onto the first or last basis vector.
    pub fn rank_one_form(&self, kind: Translation, c: T) -> Matrix<T> {
        let t = self.translation(kind);
        let r = self.r;
        let mut out = Matrix::identity(r);
        match kind {
            // T e₀ e₀ᵀ, T e_last e_lastᵀ: a single column of T
            Translation::Alpha | Translation::Delta => {
                let col = if kind == Translation::Alpha { 0 } else { r - 1 };
                for i in 0..r {
                    out[(i, col)] = out[(i, col)] + c * t[(i, col)];
                }
            }
            // e₀ e₀ᵀ T, e_last e_lastᵀ T: a single row of T
            Translation::Beta | Translation::Gamma => {
                let row = if kind == Translation::Beta { 0 } else { r - 1 };
                for j in 0..r {
                    out[(row, j)] = out[(row, j)] + c * t[(row, j)];
                }
            }
        }
        out
    }

    /// Closed form of each loop variant.
    pub fn closed_form_of(&self, variant: Variant) -> Matrix<T> {
        let forward = self.x - T::one();
        let backward = self.x.recip() - T::one();
        match variant {
            Variant::Abdc => self.rank_one_form(Translation::Alpha, forward),
            Variant::Bdca => self.rank_one_form(Translation::Beta, forward),
            Variant::Dcab => self.rank_one_form(Translation::Delta, forward),
            Variant::Cabd => self.rank_one_form(Translation::Gamma, forward),
            Variant::Cdba => self.rank_one_form(Translation::Alpha, backward),
            Variant::Acdb => self.rank_one_form(Translation::Beta, backward),
            Variant::Bacd => self.rank_one_form(Translation::Delta, backward),
            Variant::Dbac => self.rank_one_form(Translation::Gamma, backward),
        }
    }

    /// All eight variants of `S̃`, direct against closed form.
    pub fn variants(&self) -> Result<Vec<ReducedVariant<T>>, PdError> {
        Ok(pd_variants_with(&self.square, T::lit(DEFAULT_KAPPA_MAX))?
            .into_iter()
            .map(|(variant, pd)| {
                let closed_form = self.closed_form_of(variant);
                let residual = pd.delta.max_abs_diff(&closed_form);
                ReducedVariant {
                    variant,
                    direct: pd.delta,
                    closed_form,
                    residual,
                }
            })
            .collect())
    }

    pub fn is_trivial(&self, tolerance: T) -> bool {
        (self.x - T::one()).abs() <= tolerance
    }
}

/// The overlapping-window square `S̃` of an `(r+1)×(r+1)` matrix.
pub fn overlap_square<T: Scalar>(s: &Matrix<T>) -> Result<Square<T>, PdError> {
    let n = s.nrows();
    if !s.is_square() || n < 2 {
        return Err(PdError::CornerShape(format!(
            "need an (r+1)×(r+1) matrix with r ≥ 1, got {:?}",
            s.shape()
        )));
    }
    let r = n - 1;
    Square::from_corners(
        s.block(0, 0, r, r),
        s.block(0, 1, r, r),
        s.block(1, 0, r, r),
        s.block(1, 1, r, r),
    )
}

pub fn reduced_pd<T: Scalar>(s: &Matrix<T>) -> Result<ReducedPd<T>, PdError> {
    reduced_pd_with(s, T::lit(DEFAULT_KAPPA_MAX))
}

pub fn reduced_pd_with<T: Scalar>(s: &Matrix<T>, kappa_max: T) -> Result<ReducedPd<T>, PdError> {
    let square = overlap_square(s)?;
    let r = square.rank();
    let schur = schur_complement_with(s, kappa_max)?;
    let parts = Bordered::split(s)?;
    let m_inv = invert_checked(&parts.interior, kappa_max)?.inverse;
    let neg = |v: Vec<T>| v.into_iter().map(|x| -x).collect::<Vec<T>>();
    let col = |v: &[T]| Matrix::from_vec(v.len(), 1, v.to_vec()).expect("finite");
    let row = |v: &[T]| Matrix::from_vec(1, v.len(), v.to_vec()).expect("finite");
    let shifts = [
        neg((&m_inv * &col(&parts.alpha)).into_vec()),
        neg((&row(&parts.beta) * &m_inv).into_vec()),
        neg((&row(&parts.gamma) * &m_inv).into_vec()),
        neg((&m_inv * &col(&parts.delta)).into_vec()),
    ];
    let delta = partial_determinant_with(&square, kappa_max)?.delta;
    let x = schur.cross_ratio();
    let mut out = ReducedPd {
        r,
        x,
        schur,
        closed_form: Matrix::identity(r),
        residual: T::zero(),
        delta,
        shifts,
        square,
    };
    out.closed_form = out.closed_form_of(Variant::Abdc);
    out.residual = out.delta.max_abs_diff(&out.closed_form);
    Ok(out)
}

/// Rank-`r` test of an arbitrary matrix on the rows and columns a partition
/// selects (first, shared…, last on each axis).
pub fn reduced_pd_partition<T: Scalar>(
    s: &Matrix<T>,
    partition: &BorderedPartition,
) -> Result<ReducedPd<T>, PdError> {
    reduced_pd(&partition.extract(s)?)
}
