//! Axis-aligned cells of the unit cube and the splits that refine them.
//!
//! Cells use the half-open convention `[a, b)` per coordinate so that a split
//! at `z` sends `x < z` left and `x >= z` right. The outer face at 1 is
//! inclusive, so `[0,1]^d` holds every sample.

use std::fmt;

use crate::error::{Error, Result};

/// Axis-aligned hyperrectangle `prod_j [lower_j, upper_j]` inside `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// A cut along variable `dim` (0-based) at position `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub dim: usize,
    pub threshold: f64,
}

impl Split {
    pub fn new(dim: usize, threshold: f64) -> Self {
        Split { dim, threshold }
    }

    /// `true` when `point` falls on the left (`x < z`) side.
    #[inline]
    pub fn goes_left(&self, point: &[f64]) -> bool {
        point[self.dim] < self.threshold
    }
}

impl Cell {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidCell("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (j, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= 1.0) {
                return Err(Error::InvalidCell(format!(
                    "side {} is [{a}, {b}], need 0 <= a < b <= 1",
                    j + 1
                )));
            }
        }
        Ok(Cell { lower, upper })
    }

    /// The unit cube `[0,1]^d`.
    pub fn unit(d: usize) -> Self {
        assert!(d >= 1, "unit cube needs d >= 1");
        Cell {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn side(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|j| self.width(j)).product()
    }

    pub fn center(&self, j: usize) -> f64 {
        0.5 * (self.lower[j] + self.upper[j])
    }

    /// Check that `split` lies strictly inside this cell.
    pub fn check_split(&self, split: &Split) -> Result<()> {
        if split.dim >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: split.dim + 1,
            });
        }
        let (a, b) = self.side(split.dim);
        if !(split.threshold > a && split.threshold < b) {
            return Err(Error::InvalidSplit {
                dim: split.dim + 1,
                threshold: split.threshold,
                lower: a,
                upper: b,
            });
        }
        Ok(())
    }

    /// Split into `(A_L, A_R)`; only side `split.dim` changes.
    pub fn split(&self, split: &Split) -> Result<(Cell, Cell)> {
        self.check_split(split)?;
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper[split.dim] = split.threshold;
        right.lower[split.dim] = split.threshold;
        Ok((left, right))
    }

    /// Membership with lower-inclusive, upper-exclusive bounds; the outer
    /// face at 1 is inclusive.
    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: point.len(),
            });
        }
        Ok(self.contains_unchecked(point))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, point: &[f64]) -> bool {
        point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&x, (&a, &b))| a <= x && (x < b || (b == 1.0 && x <= 1.0)))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim() {
            if j > 0 {
                write!(f, "x")?;
            }
            write!(f, "[{},{}]", self.lower[j], self.upper[j])?;
        }
        Ok(())
    }
}

/// Free-function form of [`Cell::split`].
pub fn split_cell(cell: &Cell, split: &Split) -> Result<(Cell, Cell)> {
    cell.split(split)
}

/// Free-function form of [`Cell::contains`].
pub fn contains(cell: &Cell, point: &[f64]) -> Result<bool> {
    cell.contains(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cell(lo: &[f64], hi: &[f64]) -> Cell {
        Cell::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn split_unit_square_along_first_variable() {
        let (l, r) = split_cell(&Cell::unit(2), &Split::new(0, 0.5)).unwrap();
        assert_eq!(l, cell(&[0.0, 0.0], &[0.5, 1.0]));
        assert_eq!(r, cell(&[0.5, 0.0], &[1.0, 1.0]));
    }

    #[test]
    fn second_level_split_of_depth_two_partition() {
        let a = cell(&[0.0, 0.0], &[0.5, 1.0]);
        let (l, r) = a.split(&Split::new(1, 0.5)).unwrap();
        assert_eq!(l, cell(&[0.0, 0.0], &[0.5, 0.5]));
        assert_eq!(r, cell(&[0.0, 0.5], &[0.5, 1.0]));
    }

    #[test]
    fn boundary_threshold_is_rejected() {
        let err = Cell::unit(1).split(&Split::new(0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidSplit { .. }));
        assert!(Cell::unit(1).split(&Split::new(0, 0.0)).is_err());
        assert!(Cell::unit(1).split(&Split::new(1, 0.5)).is_err());
    }

    #[test]
    fn zero_width_cells_are_rejected() {
        assert!(Cell::new(vec![0.5], vec![0.5]).is_err());
        assert!(Cell::new(vec![0.0, 0.2], vec![1.0]).is_err());
        assert!(Cell::new(vec![], vec![]).is_err());
        assert!(Cell::new(vec![-0.1], vec![0.5]).is_err());
    }

    #[test]
    fn membership_is_half_open() {
        let left = cell(&[0.0, 0.0], &[0.5, 1.0]);
        let right = cell(&[0.5, 0.0], &[1.0, 1.0]);
        assert!(!left.contains(&[0.5, 0.2]).unwrap());
        assert!(right.contains(&[0.5, 0.2]).unwrap());
        assert!(Cell::unit(2).contains(&[1.0, 1.0]).unwrap());
        assert!(Cell::unit(2).contains(&[0.5]).is_err());
    }

    fn arb_cell_and_split() -> impl Strategy<Value = (Cell, Split)> {
        (1usize..5)
            .prop_flat_map(|d| {
                (
                    prop::collection::vec((0.0f64..0.9, 0.01f64..0.1), d),
                    0..d,
                    0.01f64..0.99,
                )
            })
            .prop_map(|(sides, dim, frac)| {
                let lo: Vec<f64> = sides.iter().map(|s| s.0).collect();
                let hi: Vec<f64> = sides.iter().map(|s| (s.0 + s.1).min(1.0)).collect();
                let c = Cell::new(lo, hi).unwrap();
                let (a, b) = c.side(dim);
                (c, Split::new(dim, a + frac * (b - a)))
            })
    }

    proptest! {
        #[test]
        fn children_volumes_sum_to_parent((c, s) in arb_cell_and_split()) {
            let (l, r) = c.split(&s).unwrap();
            let rel = ((l.volume() + r.volume()) - c.volume()).abs() / c.volume();
            prop_assert!(rel < 1e-12);
            for j in 0..c.dim() {
                if j != s.dim {
                    prop_assert_eq!(l.side(j), c.side(j));
                    prop_assert_eq!(r.side(j), c.side(j));
                }
            }
        }

        #[test]
        fn every_point_lands_in_exactly_one_child(
            (c, s) in arb_cell_and_split(),
            fracs in prop::collection::vec(0.0f64..1.0, 5),
        ) {
            let p: Vec<f64> = (0..c.dim())
                .map(|j| { let (a, b) = c.side(j); a + fracs[j] * (b - a) })
                .collect();
            prop_assume!(c.contains(&p).unwrap());
            let (l, r) = c.split(&s).unwrap();
            let hits = [l.contains(&p).unwrap(), r.contains(&p).unwrap()];
            prop_assert_eq!(hits.iter().filter(|h| **h).count(), 1);
        }
    }
}
