//! Periodic spatial grid on the unit torus.

use crate::error::{Error, Result};

/// Maps `x` to its representative in `[0, 1)`.
pub fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    // x - floor(x) can round up to 1.0 for x slightly below an integer.
    if r >= 1.0 {
        r - 1.0
    } else {
        r
    }
}

/// Grid on the torus `[0, 1)` storing one representative node per periodic
/// point. The cell `m` covers `[x_m, x_{m+1})`; the last cell wraps around
/// to `x_0 + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicGrid {
    nodes: Vec<f64>,
    mesh_size: f64,
    /// `Some(h)` when all cells (wrap cell included) have width `h`.
    uniform_width: Option<f64>,
}

impl PeriodicGrid {
    /// Uniform grid with nodes `m / n_cells`. Requires `n_cells >= 4`.
    pub fn uniform(n_cells: usize) -> Result<Self> {
        if n_cells < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 cells, got {n_cells}"
            )));
        }
        let n = n_cells as f64;
        let nodes = (0..n_cells).map(|m| m as f64 / n).collect();
        Ok(Self {
            nodes,
            mesh_size: 1.0 / n,
            uniform_width: Some(1.0 / n),
        })
    }

    /// Grid from explicit node positions, which must be strictly increasing
    /// and lie in `[0, 1)`.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 nodes, got {}",
                nodes.len()
            )));
        }
        for (m, &x) in nodes.iter().enumerate() {
            if !x.is_finite() || !(0.0..1.0).contains(&x) {
                return Err(Error::InvalidGrid(format!("node {m} = {x} outside [0, 1)")));
            }
            if m > 0 && x <= nodes[m - 1] {
                return Err(Error::InvalidGrid(format!(
                    "nodes not strictly increasing at index {m}"
                )));
            }
        }
        let n = nodes.len();
        let width = |m: usize| {
            if m + 1 < n {
                nodes[m + 1] - nodes[m]
            } else {
                nodes[0] + 1.0 - nodes[n - 1]
            }
        };
        let mesh_size = (0..n).map(width).fold(0.0, f64::max);
        let min_width = (0..n).map(width).fold(f64::INFINITY, f64::min);
        let uniform_width = if mesh_size - min_width <= 1e-12 * mesh_size {
            Some(mesh_size)
        } else {
            None
        };
        Ok(Self {
            nodes,
            mesh_size,
            uniform_width,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len()
    }

    /// Largest cell width, wrap cell included.
    pub fn mesh_size(&self) -> f64 {
        self.mesh_size
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, m: usize) -> f64 {
        self.nodes[m]
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform_width.is_some()
    }

    /// Width of cell `m` (the wrap cell for `m = N-1`).
    pub fn cell_width(&self, m: usize) -> f64 {
        let n = self.nodes.len();
        if m + 1 < n {
            self.nodes[m + 1] - self.nodes[m]
        } else {
            self.nodes[0] + 1.0 - self.nodes[n - 1]
        }
    }

    /// Locates `wrap(x)`, returning the cell index and the local coordinate
    /// relative to the cell's left node. A point exactly on a knot belongs
    /// to the cell on its right.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let xw = wrap(x);
        let n = self.nodes.len();
        match self.uniform_width {
            Some(h) if self.nodes[0] == 0.0 => {
                let idx = ((xw / h) as usize).min(n - 1);
                (idx, xw - self.nodes[idx])
            }
            _ => {
                // Last node <= xw, or the wrap cell when xw precedes node 0.
                let idx = self.nodes.partition_point(|&v| v <= xw);
                if idx == 0 {
                    (n - 1, xw + 1.0 - self.nodes[n - 1])
                } else {
                    (idx - 1, xw - self.nodes[idx - 1])
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_basics() {
        assert_eq!(wrap(1.25), 0.25);
        assert!((wrap(-0.1) - 0.9).abs() < 1e-15);
        assert_eq!(wrap(0.0), 0.0);
        assert!(wrap(-1e-17) >= 0.0 && wrap(-1e-17) < 1.0);
    }

    #[test]
    fn wrap_idempotent_and_shift_invariant() {
        let xs = [-3.7, -1.0, -0.25, 0.0, 0.3, 0.999999, 5.5, 123.456];
        for &x in &xs {
            let w = wrap(x);
            assert_eq!(wrap(w), w);
            for k in -10i32..=10 {
                let shifted = wrap(x + k as f64);
                // adding k may round x + k by one ulp at that magnitude
                let tol = (x.abs() + 11.0) * f64::EPSILON;
                assert!(
                    (shifted - w).abs() <= tol || (shifted - w).abs() >= 1.0 - tol,
                    "wrap({x} + {k}) = {shifted} vs {w}"
                );
            }
        }
    }

    #[test]
    fn uniform_grid_examples() {
        let g = PeriodicGrid::uniform(4).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75]);
        assert_eq!(g.mesh_size(), 0.25);
        let g = PeriodicGrid::uniform(20).unwrap();
        assert_eq!(g.mesh_size(), 0.05);
        assert!(PeriodicGrid::uniform(3).is_err());
    }

    #[test]
    fn uniform_mesh_size_times_n() {
        for n in [4usize, 8, 16, 64, 1024] {
            let g = PeriodicGrid::uniform(n).unwrap();
            assert_eq!(g.mesh_size() * n as f64, 1.0); // exact for powers of two
        }
        for n in [5usize, 20, 100, 320, 1000] {
            let g = PeriodicGrid::uniform(n).unwrap();
            assert!((g.mesh_size() * n as f64 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn nonuniform_mesh_size_includes_wrap_cell() {
        // wrap cell [0.7, 1.05] is the widest
        let g = PeriodicGrid::from_nodes(vec![0.05, 0.3, 0.55, 0.7]).unwrap();
        assert!((g.mesh_size() - 0.35).abs() < 1e-15);
        assert!(!g.is_uniform());
        assert!((g.cell_width(3) - 0.35).abs() < 1e-15);
    }

    #[test]
    fn from_nodes_rejects_bad_input() {
        assert!(PeriodicGrid::from_nodes(vec![0.0, 0.5, 0.5, 0.7]).is_err());
        assert!(PeriodicGrid::from_nodes(vec![0.0, 0.2, 0.8, 1.0]).is_err());
        assert!(PeriodicGrid::from_nodes(vec![0.0, 0.2, 0.8]).is_err());
    }

    #[test]
    fn locate_uniform_and_wrapped() {
        let g = PeriodicGrid::uniform(4).unwrap();
        assert_eq!(g.locate(0.1).0, 0);
        assert_eq!(g.locate(0.25).0, 1); // knot belongs to the right cell
        assert_eq!(g.locate(0.99).0, 3);
        let (idx, xi) = g.locate(1.1);
        assert_eq!(idx, 0);
        assert!((xi - 0.1).abs() < 1e-15);
    }

    #[test]
    fn locate_nonuniform() {
        let g = PeriodicGrid::from_nodes(vec![0.1, 0.3, 0.6, 0.9]).unwrap();
        assert_eq!(g.locate(0.05).0, 3); // wrap cell
        let (idx, xi) = g.locate(0.05);
        assert_eq!(idx, 3);
        assert!((xi - 0.15).abs() < 1e-15);
        assert_eq!(g.locate(0.3).0, 1);
        assert_eq!(g.locate(0.95).0, 3);
    }
}
