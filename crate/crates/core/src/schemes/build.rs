//! Assembling a square from a data tensor.

use std::collections::BTreeMap;

use crate::pd::{Square, SquareOrigin};
use crate::scalar::Scalar;
use crate::schemes::{BracketScheme, Entry, SchemeError, Side};
use crate::tensor::{flatten, AxisSelection, SplitDescriptor, Tensor};

/// Concrete settings behind each template slot.
///
/// By default a device with `b` settings per block uses `0..b` in both halves,
/// and a displaced device uses `0..b` and `b..2b`; a `1` is setting 0, which
/// synthesized devices reserve for the identity observable. Explicit blocks
/// override this per tensor axis (0 = state, `q` = qudit `q`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SettingSelection {
    blocks: BTreeMap<usize, [Vec<usize>; 2]>,
}

impl SettingSelection {
    pub fn standard() -> Self {
        Self::default()
    }

    pub fn with_blocks(mut self, axis: usize, first: Vec<usize>, second: Vec<usize>) -> Self {
        self.blocks.insert(axis, [first, second]);
        self
    }

    fn blocks_for(&self, axis: usize, entry: Entry, d: usize) -> Result<[Vec<usize>; 2], SchemeError> {
        let b = entry.block_size(d);
        match self.blocks.get(&axis) {
            Some(blocks) => {
                for block in blocks {
                    if block.len() != b {
                        return Err(SchemeError::RangeError(format!(
                            "axis {axis} needs blocks of {b} settings, got {}",
                            block.len()
                        )));
                    }
                    let mut sorted = block.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != block.len() {
                        return Err(SchemeError::RangeError(format!(
                            "axis {axis} block repeats a setting"
                        )));
                    }
                }
                if !entry.doubled && blocks[0] != blocks[1] {
                    return Err(SchemeError::RangeError(format!(
                        "axis {axis} is not displaced, so both blocks must agree"
                    )));
                }
                if entry.doubled && blocks[0].iter().any(|s| blocks[1].contains(s)) {
                    return Err(SchemeError::RangeError(format!(
                        "axis {axis} is displaced, so its blocks must be disjoint"
                    )));
                }
                Ok(blocks.clone())
            }
            None if entry.doubled => Ok([(0..b).collect(), (b..2 * b).collect()]),
            None => Ok([(0..b).collect(), (0..b).collect()]),
        }
    }
}

/// Builds the scheme's square: rows fuse the state then the row qudits in
/// ascending order, columns fuse the column qudits in ascending order.
pub fn build_square<T: Scalar>(
    s: &Tensor<T>,
    scheme: &BracketScheme,
    selection: &SettingSelection,
) -> Result<Square<T>, SchemeError> {
    if s.m() != scheme.m() || s.d() != scheme.d() {
        return Err(SchemeError::Mismatch(format!(
            "data has m={}, d={} but {scheme} is for m={}, d={}",
            s.m(),
            s.d(),
            scheme.m(),
            scheme.d()
        )));
    }
    let d = scheme.d();
    let mut row_axes = vec![(0, scheme.state())];
    let mut col_axes = Vec::new();
    for q in 0..scheme.m() {
        let (entry, side) = scheme.qudit(q);
        match side {
            Side::Row => row_axes.push((q + 1, entry)),
            Side::Col => col_axes.push((q + 1, entry)),
        }
    }
    let halves = |axes: &[(usize, Entry)]| -> Result<[Vec<AxisSelection>; 2], SchemeError> {
        let mut out: [Vec<AxisSelection>; 2] = [Vec::new(), Vec::new()];
        for &(axis, entry) in axes {
            let blocks = selection.blocks_for(axis, entry, d)?;
            let available = s.shape()[axis];
            let needed = blocks.iter().flatten().max().map_or(0, |&mx| mx + 1);
            if needed > available {
                return Err(SchemeError::InsufficientSettings {
                    axis,
                    needed,
                    available,
                });
            }
            for (h, block) in blocks.into_iter().enumerate() {
                out[h].push(AxisSelection::new(axis, block));
            }
        }
        Ok(out)
    };
    let rows = halves(&row_axes)?;
    let cols = halves(&col_axes)?;
    let corner = |h: usize, v: usize| {
        flatten(s, &SplitDescriptor::new(rows[h].clone(), cols[v].clone()))
    };
    let square = Square::from_corners(corner(0, 0)?, corner(0, 1)?, corner(1, 0)?, corner(1, 1)?)?;
    Ok(square.with_origin(SquareOrigin {
        scheme: scheme.to_string(),
        rows,
        cols,
    }))
}
