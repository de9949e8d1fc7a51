use serde::{Deserialize, Serialize};

use super::state::StateVector;
use crate::error::{Error, Result};

/// Flat row-major index of a support vector (first state dimension varies slowest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellIndex(pub usize);

/// Equally spaced support vectors over `[0, 1]^dim` with `resolution` points per dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportGrid {
    resolution: usize,
    dim: usize,
}

impl SupportGrid {
    pub fn new(resolution: usize, dim: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::config(format!("grid resolution must be >= 2, got {resolution}")));
        }
        if dim == 0 {
            return Err(Error::config("grid dimension must be >= 1"));
        }
        let cells = resolution.checked_pow(dim as u32);
        if cells.is_none_or(|n| n > 1 << 26) {
            return Err(Error::config(format!("grid {resolution}^{dim} is too large")));
        }
        Ok(Self { resolution, dim })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell_count(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    /// Coordinate of the `k`-th support point along any dimension.
    pub fn center(&self, k: usize) -> f64 {
        k as f64 / (self.resolution - 1) as f64
    }

    pub fn coords(&self, cell: CellIndex) -> Vec<usize> {
        let mut rest = cell.0;
        let mut out = vec![0; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = rest % self.resolution;
            rest /= self.resolution;
        }
        out
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<CellIndex> {
        if coords.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: coords.len() });
        }
        let mut idx = 0;
        for &c in coords {
            if c >= self.resolution {
                return Err(Error::InvalidValue(format!("cell coordinate {c} out of range")));
            }
            idx = idx * self.resolution + c;
        }
        Ok(CellIndex(idx))
    }

    pub fn support_vector(&self, cell: CellIndex) -> Vec<f64> {
        self.coords(cell).into_iter().map(|k| self.center(k)).collect()
    }

    /// Nearest support vector to `state`; equidistant states go to the lower index.
    pub fn locate_cell(&self, state: &StateVector) -> Result<CellIndex> {
        if state.dim() != self.dim {
            return Err(Error::config(format!(
                "state dimension {} does not match grid dimension {}",
                state.dim(),
                self.dim
            )));
        }
        let last = self.resolution - 1;
        let mut idx = 0;
        for &x in state.values() {
            // Squared distance is separable, so the per-axis nearest center gives the
            // Euclidean nearest cell. Compare real distances to keep ties exact.
            let lo = ((x * last as f64).floor() as usize).min(last);
            let k =
                if lo < last && (self.center(lo + 1) - x).abs() < (x - self.center(lo)).abs() { lo + 1 } else { lo };
            idx = idx * self.resolution + k;
        }
        Ok(CellIndex(idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(v: &[f64]) -> StateVector {
        StateVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn corners_map_to_first_and_last_support() {
        let g = SupportGrid::new(5, 2).unwrap();
        assert_eq!(g.coords(g.locate_cell(&state(&[0.0, 0.0])).unwrap()), vec![0, 0]);
        assert_eq!(g.coords(g.locate_cell(&state(&[1.0, 1.0])).unwrap()), vec![4, 4]);
        assert_eq!(g.cell_count(), 25);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let g = SupportGrid::new(5, 1).unwrap();
        // 0.125 is exactly between 0.0 and 0.25
        assert_eq!(g.locate_cell(&state(&[0.125])).unwrap(), CellIndex(0));
        assert_eq!(g.locate_cell(&state(&[0.375])).unwrap(), CellIndex(1));
    }

    #[test]
    fn dimension_mismatch_is_a_config_error() {
        let g = SupportGrid::new(5, 2).unwrap();
        assert!(matches!(g.locate_cell(&state(&[0.5])), Err(Error::Config(_))));
    }

    #[test]
    fn centers_are_increasing_and_span_unit_interval() {
        let g = SupportGrid::new(40, 2).unwrap();
        assert_eq!(g.center(0), 0.0);
        assert_eq!(g.center(39), 1.0);
        assert!((1..40).all(|k| g.center(k) > g.center(k - 1)));
        assert_eq!(g.cell_count(), 1600);
    }

    #[test]
    fn coords_round_trip() {
        let g = SupportGrid::new(7, 3).unwrap();
        for i in 0..g.cell_count() {
            let c = g.coords(CellIndex(i));
            assert_eq!(g.index_of(&c).unwrap(), CellIndex(i));
        }
    }
}
