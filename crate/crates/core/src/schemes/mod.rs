//! Bracket-notation square schemes: parsing, enumeration, sensitivity and
//! square assembly.
//!
//! `[N;L₁,…,L_{m−k}:M₁,…,M_k]` lists how many settings each device
//! contributes to one corner. Devices left of the colon (the state first, then
//! measurements acting as effective state preparations) index rows; devices to
//! the right index columns. A leading `2` marks the device whose two disjoint
//! setting blocks displace the corners. An optional cycle prefix `π` hands the
//! role written at position `p` to qudit `π(p)`.

mod build;
mod enumerate;
mod notation;
mod sensitivity;

use std::fmt;

use thiserror::Error;

use crate::pd::PdError;
use crate::tensor::TensorError;

pub use build::{build_square, SettingSelection};
pub use enumerate::{enumerate, k1_count, EnumerationReport, SquareTemplate};
pub use notation::{Entry, Permutation};
pub use sensitivity::{min_cut, sensitivity, SensitivityProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("inconsistent corner size: {0}")]
    InconsistentCornerSize(String),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("class k={k} outside 1..={m}")]
    BadClass { k: usize, m: usize },
    #[error("qudit dimension {0} is below 2")]
    BadDimension(usize),
    #[error("scheme does not fit the data: {0}")]
    Mismatch(String),
    #[error("axis {axis} needs {needed} settings but the data has {available}")]
    InsufficientSettings {
        axis: usize,
        needed: usize,
        available: usize,
    },
    #[error("bad setting selection: {0}")]
    RangeError(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Pd(#[from] PdError),
}

/// Which half of the square a device indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Row,
    Col,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BracketScheme {
    m: usize,
    d: usize,
    state: Entry,
    left: Vec<Entry>,
    right: Vec<Entry>,
    permutation: Permutation,
}

impl BracketScheme {
    pub fn new(
        m: usize,
        d: usize,
        state: Entry,
        left: Vec<Entry>,
        right: Vec<Entry>,
        permutation: Permutation,
    ) -> Result<Self, SchemeError> {
        let scheme = Self {
            m,
            d,
            state,
            left,
            right,
            permutation,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn parse(text: &str, m: usize, d: usize) -> Result<Self, SchemeError> {
        let parsed = notation::parse_text(text)?;
        let permutation = Permutation::from_cycles(m, &parsed.cycles)?;
        Self::new(m, d, parsed.state, parsed.left, parsed.right, permutation)
    }

    fn validate(&self) -> Result<(), SchemeError> {
        if self.d < 2 {
            return Err(SchemeError::BadDimension(self.d));
        }
        let k = self.right.len();
        if k == 0 || self.left.len() + k != self.m {
            return Err(SchemeError::InconsistentCornerSize(format!(
                "{} measurement entries for {} qudits",
                self.left.len() + k,
                self.m
            )));
        }
        if self.permutation.len() != self.m {
            return Err(SchemeError::BadPermutation(format!(
                "permutation acts on {} points, expected {}",
                self.permutation.len(),
                self.m
            )));
        }
        let row_power: u32 = self.state.power + self.left.iter().map(|e| e.power).sum::<u32>();
        let col_power: u32 = self.right.iter().map(|e| e.power).sum();
        let want = 2 * k as u32;
        if row_power != want || col_power != want {
            return Err(SchemeError::InconsistentCornerSize(format!(
                "corner is d^{row_power}×d^{col_power}, class {k} needs d^{want}×d^{want}"
            )));
        }
        let row_doubled = self.row_entries().filter(|e| e.doubled).count();
        let col_doubled = self.right.iter().filter(|e| e.doubled).count();
        if row_doubled != 1 || col_doubled != 1 {
            return Err(SchemeError::InconsistentCornerSize(format!(
                "need exactly one displaced device per side, found {row_doubled} and {col_doubled}"
            )));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Class `k`: the number of column qudits.
    pub fn class(&self) -> usize {
        self.right.len()
    }

    /// Corner size `d^{2k}`.
    pub fn rank(&self) -> usize {
        self.d.pow(2 * self.class() as u32)
    }

    pub fn state(&self) -> Entry {
        self.state
    }

    pub fn left(&self) -> &[Entry] {
        &self.left
    }

    pub fn right(&self) -> &[Entry] {
        &self.right
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    fn row_entries(&self) -> impl Iterator<Item = &Entry> {
        std::iter::once(&self.state).chain(&self.left)
    }

    /// The same scheme under a different qudit permutation.
    pub fn with_permutation(&self, permutation: Permutation) -> Result<Self, SchemeError> {
        Self::new(
            self.m,
            self.d,
            self.state,
            self.left.clone(),
            self.right.clone(),
            permutation,
        )
    }

    /// Entry and side written at position `p` (0-based).
    pub fn position(&self, p: usize) -> (Entry, Side) {
        if p < self.left.len() {
            (self.left[p], Side::Row)
        } else {
            (self.right[p - self.left.len()], Side::Col)
        }
    }

    /// Entry and side of qudit `q` (0-based) after the permutation.
    pub fn qudit(&self, q: usize) -> (Entry, Side) {
        self.position(self.permutation.inverse().apply(q))
    }

    /// Qudits (0-based, ascending) on one side.
    pub fn qudits_on(&self, side: Side) -> Vec<usize> {
        (0..self.m).filter(|&q| self.qudit(q).1 == side).collect()
    }

    /// Settings each axis must provide: `[state, qudit 1, …, qudit m]`.
    pub fn settings_needed(&self) -> Vec<usize> {
        std::iter::once(self.state.total(self.d))
            .chain((0..self.m).map(|q| self.qudit(q).0.total(self.d)))
            .collect()
    }
}

impl fmt::Display for BracketScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Entry]| v.iter().map(Entry::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{}[{}", self.permutation, self.state)?;
        if !self.left.is_empty() {
            write!(f, ";{}", list(&self.left))?;
        }
        write!(f, ":{}]", list(&self.right))
    }
}

/// Number of reduced PDs of an `(r+1)×(r+1)` protocol: `C(r+1, 2)²`.
pub fn reduced_scheme_count(r: u64) -> u64 {
    let pairs = (r + 1) * r / 2;
    pairs * pairs
}
