//! Nodal solution state.

use std::sync::Arc;

use crate::config::InterpKind;
use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// Nodal values of the numerical solution at one time level, together with
/// the nodal derivative stacks carried by Hermite back-ends.
#[derive(Debug, Clone)]
pub struct NodalState {
    grid: Arc<PeriodicGrid>,
    /// Smoothness parameter `s` of the interpolation kind.
    order: usize,
    values: Vec<f64>,
    /// `derivs[k-1][m]` approximates the k-th derivative at node m;
    /// `s - 1` rows for Hermite kinds, empty otherwise.
    derivs: Vec<Vec<f64>>,
    time: f64,
}

impl NodalState {
    pub fn new(
        grid: Arc<PeriodicGrid>,
        order: usize,
        values: Vec<f64>,
        derivs: Vec<Vec<f64>>,
        time: f64,
    ) -> Result<Self> {
        if order < 1 {
            return Err(Error::Config("state order must be at least 1".into()));
        }
        let n = grid.cell_count();
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: values.len(),
            });
        }
        for row in &derivs {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Ok(Self {
            grid,
            order,
            values,
            derivs,
            time,
        })
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivs(&self) -> &[Vec<f64>] {
        &self.derivs
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Checks that the derivative stack matches the given interpolation kind.
    pub fn check_kind(&self, kind: InterpKind) -> Result<()> {
        if self.order != kind.order() {
            return Err(Error::Config(format!(
                "state order {} does not match interpolation order {}",
                self.order,
                kind.order()
            )));
        }
        let want = kind.deriv_rows();
        if self.derivs.len() != want {
            return Err(Error::Config(format!(
                "state carries {} derivative rows, interpolation kind needs {}",
                self.derivs.len(),
                want
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_checks() {
        let grid = Arc::new(PeriodicGrid::uniform(4).unwrap());
        assert!(NodalState::new(grid.clone(), 1, vec![0.0; 4], vec![], 0.0).is_ok());
        assert!(NodalState::new(grid.clone(), 1, vec![0.0; 3], vec![], 0.0).is_err());
        assert!(NodalState::new(grid.clone(), 2, vec![0.0; 4], vec![vec![0.0; 5]], 0.0).is_err());
        let st = NodalState::new(grid, 2, vec![0.0; 4], vec![vec![0.0; 4]], 0.0).unwrap();
        assert!(st.check_kind(InterpKind::Hermite(2)).is_ok());
        assert!(st.check_kind(InterpKind::Spline(2)).is_err());
        assert!(st.check_kind(InterpKind::Hermite(3)).is_err());
    }
}
