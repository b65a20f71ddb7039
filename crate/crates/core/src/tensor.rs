//! Data tensors and their reshaping into matrices.
//!
//! A tensor has one state-setting axis (axis 0) followed by one axis per
//! qudit measurement device. Flattening fuses a list of axes into a row index
//! and another list into a column index, row-major with the leftmost listed
//! axis varying slowest; for two factors this is `A = a·d + b`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::model::Provenance;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("shape {shape:?} does not describe {m} qudits")]
    BadShape { shape: Vec<usize>, m: usize },
    #[error("{count} values for shape {shape:?}")]
    ValueCount { shape: Vec<usize>, count: usize },
    #[error("non-finite value at flat offset {0}")]
    NonFinite(usize),
    #[error("setting {setting} out of range for axis {axis} of extent {extent}")]
    RangeOutOfBounds {
        axis: usize,
        setting: usize,
        extent: usize,
    },
    #[error("axis {0} covered twice")]
    AxisCoveredTwice(usize),
    #[error("axis {0} not covered by the split")]
    AxisMissing(usize),
    #[error("axis {0} does not exist")]
    NoSuchAxis(usize),
    #[error("axis {0} has an empty selection")]
    EmptySelection(usize),
    #[error("index {index} out of range for extent {extent}")]
    OutOfRange { index: usize, extent: usize },
    #[error("matrix shape {found:?} does not match split {expected:?}")]
    MatrixShape {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

/// Row-major bijection between a multi-index and a fused index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusedIndexMap {
    extents: Vec<usize>,
}

impl FusedIndexMap {
    pub fn new(extents: Vec<usize>) -> Self {
        Self { extents }
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fuse(&self, index: &[usize]) -> Result<usize, TensorError> {
        assert_eq!(index.len(), self.extents.len(), "index arity");
        let mut fused = 0;
        for (&i, &e) in index.iter().zip(&self.extents) {
            if i >= e {
                return Err(TensorError::OutOfRange {
                    index: i,
                    extent: e,
                });
            }
            fused = fused * e + i;
        }
        Ok(fused)
    }

    pub fn defuse(&self, fused: usize) -> Result<Vec<usize>, TensorError> {
        if fused >= self.len() {
            return Err(TensorError::OutOfRange {
                index: fused,
                extent: self.len(),
            });
        }
        let mut rest = fused;
        let mut out = vec![0; self.extents.len()];
        for (slot, &e) in out.iter_mut().zip(&self.extents).rev() {
            *slot = rest % e;
            rest /= e;
        }
        Ok(out)
    }
}

/// `A = a·d + b` for `a, b ∈ [0, d)`.
pub fn fuse(a: usize, b: usize, d: usize) -> Result<usize, TensorError> {
    FusedIndexMap::new(vec![d, d]).fuse(&[a, b])
}

/// Inverse of [`fuse`].
pub fn defuse(fused: usize, d: usize) -> Result<(usize, usize), TensorError> {
    let parts = FusedIndexMap::new(vec![d, d]).defuse(fused)?;
    Ok((parts[0], parts[1]))
}

/// Real data tensor `S[a, i₁, …, i_m]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor<T> {
    m: usize,
    d: usize,
    shape: Vec<usize>,
    values: Vec<T>,
    provenance: Provenance,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(
        m: usize,
        d: usize,
        shape: Vec<usize>,
        values: Vec<T>,
        provenance: Provenance,
    ) -> Result<Self, TensorError> {
        let tensor = Self {
            m,
            d,
            shape,
            values,
            provenance,
        };
        tensor.validate()?;
        Ok(tensor)
    }

    /// Re-checks the shape, value count and finiteness invariants.
    pub fn validate(&self) -> Result<(), TensorError> {
        if self.shape.len() != self.m + 1 || self.shape.contains(&0) {
            return Err(TensorError::BadShape {
                shape: self.shape.clone(),
                m: self.m,
            });
        }
        if self.shape.iter().product::<usize>() != self.values.len() {
            return Err(TensorError::ValueCount {
                shape: self.shape.clone(),
                count: self.values.len(),
            });
        }
        if let Some(pos) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(TensorError::NonFinite(pos));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn map_values(&self, f: impl FnMut(T) -> T) -> Self {
        Self {
            values: self.values.iter().copied().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        index
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &e)| acc * e + i)
    }

    pub fn get(&self, index: &[usize]) -> T {
        self.values[self.offset(index)]
    }

    /// Moves qudit `q` (axis `q+1`) to position `perm[q]`.
    pub fn permute_qudits(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.m, "permutation arity");
        let mut new_shape = self.shape.clone();
        for (q, &p) in perm.iter().enumerate() {
            new_shape[p + 1] = self.shape[q + 1];
        }
        let mut values = vec![T::zero(); self.values.len()];
        let source = FusedIndexMap::new(self.shape.clone());
        let target = FusedIndexMap::new(new_shape.clone());
        let mut new_index = vec![0; self.shape.len()];
        for (flat, &v) in self.values.iter().enumerate() {
            let index = source.defuse(flat).expect("flat offset in range");
            new_index[0] = index[0];
            for (q, &p) in perm.iter().enumerate() {
                new_index[p + 1] = index[q + 1];
            }
            values[target.fuse(&new_index).expect("index in range")] = v;
        }
        Self {
            m: self.m,
            d: self.d,
            shape: new_shape,
            values,
            provenance: self.provenance.clone(),
        }
    }

    /// The sub-tensor picked out by a split, axes kept in natural order.
    pub fn restrict(&self, split: &SplitDescriptor) -> Result<Self, TensorError> {
        split.validate(&self.shape)?;
        let by_axis = split.by_axis(self.shape.len());
        let new_shape: Vec<usize> = by_axis.iter().map(|s| s.len()).collect();
        let map = FusedIndexMap::new(new_shape.clone());
        let mut values = Vec::with_capacity(map.len());
        let mut index = vec![0; self.shape.len()];
        for flat in 0..map.len() {
            let local = map.defuse(flat).expect("in range");
            for (axis, &l) in local.iter().enumerate() {
                index[axis] = by_axis[axis][l];
            }
            values.push(self.get(&index));
        }
        Ok(Self {
            m: self.m,
            d: self.d,
            shape: new_shape,
            values,
            provenance: self.provenance.clone(),
        })
    }
}

/// Settings selected on one axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisSelection {
    pub axis: usize,
    pub settings: Vec<usize>,
}

impl AxisSelection {
    pub fn new(axis: usize, settings: Vec<usize>) -> Self {
        Self { axis, settings }
    }

    pub fn range(axis: usize, range: std::ops::Range<usize>) -> Self {
        Self {
            axis,
            settings: range.collect(),
        }
    }

    /// Axis pinned to one setting.
    pub fn fixed(axis: usize, setting: usize) -> Self {
        Self {
            axis,
            settings: vec![setting],
        }
    }
}

/// Which axes fuse into rows and which into columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitDescriptor {
    pub row_axes: Vec<AxisSelection>,
    pub col_axes: Vec<AxisSelection>,
}

impl SplitDescriptor {
    pub fn new(row_axes: Vec<AxisSelection>, col_axes: Vec<AxisSelection>) -> Self {
        Self { row_axes, col_axes }
    }

    /// Full ranges of the listed axes; every other axis must be listed too.
    pub fn full(shape: &[usize], rows: &[usize], cols: &[usize]) -> Self {
        let sel = |axes: &[usize]| {
            axes.iter()
                .map(|&a| AxisSelection::range(a, 0..shape.get(a).copied().unwrap_or(0)))
                .collect()
        };
        Self::new(sel(rows), sel(cols))
    }

    pub fn validate(&self, shape: &[usize]) -> Result<(), TensorError> {
        let mut seen = vec![false; shape.len()];
        for sel in self.row_axes.iter().chain(&self.col_axes) {
            let extent = *shape.get(sel.axis).ok_or(TensorError::NoSuchAxis(sel.axis))?;
            if seen[sel.axis] {
                return Err(TensorError::AxisCoveredTwice(sel.axis));
            }
            seen[sel.axis] = true;
            if sel.settings.is_empty() {
                return Err(TensorError::EmptySelection(sel.axis));
            }
            if let Some(&bad) = sel.settings.iter().find(|&&s| s >= extent) {
                return Err(TensorError::RangeOutOfBounds {
                    axis: sel.axis,
                    setting: bad,
                    extent,
                });
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(axis) => Err(TensorError::AxisMissing(axis)),
            None => Ok(()),
        }
    }

    pub fn row_count(&self) -> usize {
        self.row_axes.iter().map(|s| s.settings.len()).product()
    }

    pub fn col_count(&self) -> usize {
        self.col_axes.iter().map(|s| s.settings.len()).product()
    }

    /// Rows and columns swapped.
    pub fn transposed(&self) -> Self {
        Self::new(self.col_axes.clone(), self.row_axes.clone())
    }

    /// Relabels qudit axes: axis `q+1` becomes axis `perm[q]+1`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let relabel = |sels: &[AxisSelection]| {
            sels.iter()
                .map(|s| AxisSelection {
                    axis: if s.axis == 0 { 0 } else { perm[s.axis - 1] + 1 },
                    settings: s.settings.clone(),
                })
                .collect()
        };
        Self::new(relabel(&self.row_axes), relabel(&self.col_axes))
    }

    fn by_axis(&self, naxes: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); naxes];
        for sel in self.row_axes.iter().chain(&self.col_axes) {
            out[sel.axis] = sel.settings.clone();
        }
        out
    }
}

fn fused_offsets(sels: &[AxisSelection], strides: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for sel in sels {
        let stride = strides[sel.axis];
        offsets = offsets
            .iter()
            .flat_map(|&base| sel.settings.iter().map(move |&s| base + s * stride))
            .collect();
    }
    offsets
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for axis in (0..shape.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * shape[axis + 1];
    }
    strides
}

/// Reshapes the selected part of a tensor into a matrix.
pub fn flatten<T: Scalar>(s: &Tensor<T>, split: &SplitDescriptor) -> Result<Matrix<T>, TensorError> {
    split.validate(s.shape())?;
    let strides = strides(s.shape());
    let rows = fused_offsets(&split.row_axes, &strides);
    let cols = fused_offsets(&split.col_axes, &strides);
    let values = s.values();
    Ok(Matrix::from_fn(rows.len(), cols.len(), |r, c| values[rows[r] + cols[c]]))
}

/// Rebuilds the restricted tensor a matrix was flattened from.
pub fn unflatten<T: Scalar>(
    matrix: &Matrix<T>,
    split: &SplitDescriptor,
    m: usize,
    d: usize,
    provenance: Provenance,
) -> Result<Tensor<T>, TensorError> {
    let naxes = m + 1;
    let mut local_shape = vec![0; naxes];
    for sel in split.row_axes.iter().chain(&split.col_axes) {
        if sel.axis >= naxes {
            return Err(TensorError::NoSuchAxis(sel.axis));
        }
        local_shape[sel.axis] = sel.settings.len();
    }
    // validate against the restricted shape with local (0-based) settings
    let local = SplitDescriptor::new(
        split
            .row_axes
            .iter()
            .map(|s| AxisSelection::range(s.axis, 0..s.settings.len()))
            .collect(),
        split
            .col_axes
            .iter()
            .map(|s| AxisSelection::range(s.axis, 0..s.settings.len()))
            .collect(),
    );
    local.validate(&local_shape)?;
    let expected = (local.row_count(), local.col_count());
    if matrix.shape() != expected {
        return Err(TensorError::MatrixShape {
            expected,
            found: matrix.shape(),
        });
    }
    let strides = strides(&local_shape);
    let rows = fused_offsets(&local.row_axes, &strides);
    let cols = fused_offsets(&local.col_axes, &strides);
    let mut values = vec![T::zero(); local_shape.iter().product()];
    for (r, &ro) in rows.iter().enumerate() {
        for (c, &co) in cols.iter().enumerate() {
            values[ro + co] = matrix[(r, c)];
        }
    }
    Tensor::new(m, d, local_shape, values, provenance)
}
