//! Squares, partial determinants and their equivalence operations.
//!
//! A `2r×2r` matrix `[[A, B], [C, D]]` has rank at most `r` (with invertible
//! corners) exactly when `Δ = A⁻¹BD⁻¹C` is the identity.

mod reduced;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{condition_number, LinalgError, LuDecomposition, Matrix, DEFAULT_KAPPA_MAX};
use crate::scalar::Scalar;
use crate::tensor::AxisSelection;

pub use reduced::{
    overlap_square, reduced_pd, reduced_pd_partition, reduced_pd_with, translation, ReducedPd, ReducedVariant,
    Translation,
};

/// Score ceiling for calling a noiseless PD trivial.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Shot-noise-aware threshold `10·r/√shots`.
pub fn shots_threshold(r: usize, shots: u64) -> f64 {
    10.0 * r as f64 / (shots as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdError {
    #[error("square data must be 2r×2r, got {rows}×{cols}")]
    OddDimension { rows: usize, cols: usize },
    #[error("corners must all be r×r: {0}")]
    CornerShape(String),
    #[error("corner {corner} has condition number {condition:e}")]
    IllConditionedCorner { corner: Corner, condition: f64 },
    #[error("gauge transform block {0} is singular")]
    SingularTransform(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which tensor settings produced each corner of a square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareOrigin {
    pub scheme: String,
    /// Row selections of the top and bottom halves.
    pub rows: [Vec<AxisSelection>; 2],
    /// Column selections of the left and right halves.
    pub cols: [Vec<AxisSelection>; 2],
}

/// Four `r×r` corners `[[A, B], [C, D]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Square<T> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub c: Matrix<T>,
    pub d: Matrix<T>,
    pub origin: Option<SquareOrigin>,
}

impl<T: Scalar> Square<T> {
    pub fn from_corners(
        a: Matrix<T>,
        b: Matrix<T>,
        c: Matrix<T>,
        d: Matrix<T>,
    ) -> Result<Self, PdError> {
        let r = a.nrows();
        for (name, m) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if m.shape() != (r, r) {
                return Err(PdError::CornerShape(format!(
                    "{name} is {:?}, expected {r}×{r}",
                    m.shape()
                )));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            origin: None,
        })
    }

    pub fn with_origin(mut self, origin: SquareOrigin) -> Self {
        self.origin = Some(origin);
        self
    }

    /// Corner size `r`.
    pub fn rank(&self) -> usize {
        self.a.nrows()
    }

    pub fn corner(&self, which: Corner) -> &Matrix<T> {
        match which {
            Corner::A => &self.a,
            Corner::B => &self.b,
            Corner::C => &self.c,
            Corner::D => &self.d,
        }
    }

    /// The `2r×2r` matrix.
    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_blocks(&self.a, &self.b, &self.c, &self.d).expect("corners share a size")
    }

    /// One-norm condition numbers of A, B, C, D (infinite when singular).
    pub fn corner_conditions(&self) -> [T; 4] {
        [Corner::A, Corner::B, Corner::C, Corner::D]
            .map(|c| condition_number(self.corner(c)).unwrap_or(T::infinity()))
    }
}

/// Splits a `2r×2r` matrix into its four contiguous corners.
pub fn assemble_square<T: Scalar>(m: &Matrix<T>) -> Result<Square<T>, PdError> {
    let (rows, cols) = m.shape();
    if rows != cols || rows % 2 != 0 || rows == 0 {
        return Err(PdError::OddDimension { rows, cols });
    }
    let r = rows / 2;
    Square::from_corners(
        m.block(0, 0, r, r),
        m.block(0, r, r, r),
        m.block(r, 0, r, r),
        m.block(r, r, r, r),
    )
}

/// A PD matrix with its distance from the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PdResult<T> {
    pub delta: Matrix<T>,
    pub frobenius_score: T,
    pub max_abs_score: T,
    /// Condition numbers of A, B, C, D.
    pub corner_conditions: [T; 4],
}

impl<T: Scalar> PdResult<T> {
    fn new(delta: Matrix<T>, corner_conditions: [T; 4]) -> Self {
        let (frobenius_score, max_abs_score) = delta.identity_distance();
        Self {
            delta,
            frobenius_score,
            max_abs_score,
            corner_conditions,
        }
    }
}

struct Factored<T> {
    lu: LuDecomposition<T>,
}

impl<T: Scalar> Factored<T> {
    fn new(sq: &Square<T>, which: Corner, condition: T, kappa_max: T) -> Result<Self, PdError> {
        if !condition.is_finite() || condition > kappa_max {
            return Err(PdError::IllConditionedCorner {
                corner: which,
                condition: condition.as_f64(),
            });
        }
        Ok(Self {
            lu: LuDecomposition::new(sq.corner(which))?,
        })
    }

    /// `X⁻¹ rhs`.
    fn solve(&self, rhs: &Matrix<T>) -> Matrix<T> {
        self.lu.solve(rhs).expect("shapes agree")
    }
}

type CornerCheck<T> = ([T; 4], Vec<Option<Factored<T>>>);

fn check_corners<T: Scalar>(
    sq: &Square<T>,
    needed: &[Corner],
    kappa_max: T,
) -> Result<CornerCheck<T>, PdError> {
    let conditions = sq.corner_conditions();
    let mut factors = Vec::with_capacity(4);
    for (i, which) in [Corner::A, Corner::B, Corner::C, Corner::D].into_iter().enumerate() {
        factors.push(if needed.contains(&which) {
            Some(Factored::new(sq, which, conditions[i], kappa_max)?)
        } else {
            None
        });
    }
    Ok((conditions, factors))
}

/// `Δ = A⁻¹BD⁻¹C`.
pub fn partial_determinant<T: Scalar>(sq: &Square<T>) -> Result<PdResult<T>, PdError> {
    partial_determinant_with(sq, T::lit(DEFAULT_KAPPA_MAX))
}

pub fn partial_determinant_with<T: Scalar>(
    sq: &Square<T>,
    kappa_max: T,
) -> Result<PdResult<T>, PdError> {
    let (conditions, f) = check_corners(sq, &[Corner::A, Corner::D], kappa_max)?;
    let (fa, fd) = (f[0].as_ref().unwrap(), f[3].as_ref().unwrap());
    let delta = fa.solve(&(&sq.b * &fd.solve(&sq.c)));
    Ok(PdResult::new(delta, conditions))
}

/// The eight loop traversals of a square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `A⁻¹BD⁻¹C`
    Abdc,
    /// `BD⁻¹CA⁻¹`
    Bdca,
    /// `D⁻¹CA⁻¹B`
    Dcab,
    /// `CA⁻¹BD⁻¹`
    Cabd,
    /// `C⁻¹DB⁻¹A`
    Cdba,
    /// `DB⁻¹AC⁻¹`
    Dbac,
    /// `B⁻¹AC⁻¹D`
    Bacd,
    /// `AC⁻¹DB⁻¹`
    Acdb,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Abdc,
        Variant::Bdca,
        Variant::Dcab,
        Variant::Cabd,
        Variant::Cdba,
        Variant::Dbac,
        Variant::Bacd,
        Variant::Acdb,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Abdc => "A⁻¹BD⁻¹C",
            Variant::Bdca => "BD⁻¹CA⁻¹",
            Variant::Dcab => "D⁻¹CA⁻¹B",
            Variant::Cabd => "CA⁻¹BD⁻¹",
            Variant::Cdba => "C⁻¹DB⁻¹A",
            Variant::Dbac => "DB⁻¹AC⁻¹",
            Variant::Bacd => "B⁻¹AC⁻¹D",
            Variant::Acdb => "AC⁻¹DB⁻¹",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// All eight loop traversals, in [`Variant::ALL`] order.
pub fn pd_variants<T: Scalar>(sq: &Square<T>) -> Result<Vec<(Variant, PdResult<T>)>, PdError> {
    pd_variants_with(sq, T::lit(DEFAULT_KAPPA_MAX))
}

pub fn pd_variants_with<T: Scalar>(
    sq: &Square<T>,
    kappa_max: T,
) -> Result<Vec<(Variant, PdResult<T>)>, PdError> {
    let all = [Corner::A, Corner::B, Corner::C, Corner::D];
    let (conditions, _) = check_corners(sq, &all, kappa_max)?;
    let inv = |m: &Matrix<T>| crate::linalg::invert_checked(m, T::infinity()).map(|i| i.inverse);
    let (ai, bi, ci, di) = (inv(&sq.a)?, inv(&sq.b)?, inv(&sq.c)?, inv(&sq.d)?);
    let (a, b, c, d) = (&sq.a, &sq.b, &sq.c, &sq.d);
    let chain = |ms: [&Matrix<T>; 4]| &(&(ms[0] * ms[1]) * ms[2]) * ms[3];
    Ok(Variant::ALL
        .iter()
        .map(|&v| {
            let delta = match v {
                Variant::Abdc => chain([&ai, b, &di, c]),
                Variant::Bdca => chain([b, &di, c, &ai]),
                Variant::Dcab => chain([&di, c, &ai, b]),
                Variant::Cabd => chain([c, &ai, b, &di]),
                Variant::Cdba => chain([&ci, d, &bi, a]),
                Variant::Dbac => chain([d, &bi, a, &ci]),
                Variant::Bacd => chain([&bi, a, &ci, d]),
                Variant::Acdb => chain([a, &ci, d, &bi]),
            };
            (v, PdResult::new(delta, conditions))
        })
        .collect())
}

/// `A→L₁AR₁, B→L₁BR₂, C→L₂CR₁, D→L₂DR₂`.
///
/// Under this map `Δ → R₁⁻¹ Δ R₁`; the left blocks and `R₂` drop out.
pub fn gauge_transform<T: Scalar>(
    sq: &Square<T>,
    left: [&Matrix<T>; 2],
    right: [&Matrix<T>; 2],
) -> Result<Square<T>, PdError> {
    let r = sq.rank();
    for (i, g) in left.iter().chain(right.iter()).enumerate() {
        if g.shape() != (r, r) {
            return Err(PdError::CornerShape(format!(
                "transform block {i} is {:?}, expected {r}×{r}",
                g.shape()
            )));
        }
        let k = condition_number(g)?;
        if !k.is_finite() {
            return Err(PdError::SingularTransform(i));
        }
    }
    let [l1, l2] = left;
    let [r1, r2] = right;
    let t = |l: &Matrix<T>, x: &Matrix<T>, rr: &Matrix<T>| &(l * x) * rr;
    Ok(Square {
        a: t(l1, &sq.a, r1),
        b: t(l1, &sq.b, r2),
        c: t(l2, &sq.c, r1),
        d: t(l2, &sq.d, r2),
        origin: sq.origin.clone(),
    })
}

/// Decision on a PD with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrivialityReport {
    pub trivial: bool,
    pub threshold: f64,
    pub frobenius_score: f64,
    pub max_abs_score: f64,
    pub corner_conditions: [f64; 4],
}

/// Trivial when `‖Δ − I‖_F ≤ threshold`.
pub fn triviality_test<T: Scalar>(pd: &PdResult<T>, threshold: f64) -> TrivialityReport {
    let frobenius_score = pd.frobenius_score.as_f64();
    TrivialityReport {
        trivial: frobenius_score <= threshold,
        threshold,
        frobenius_score,
        max_abs_score: pd.max_abs_score.as_f64(),
        corner_conditions: pd.corner_conditions.map(Scalar::as_f64),
    }
}
