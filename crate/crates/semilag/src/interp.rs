//! Periodic piecewise-polynomial interpolation.
//!
//! Three families share one representation: piecewise linear (C^0), periodic
//! splines of degree `2s - 1` (C^{2s-2}) and two-point Hermite interpolants
//! of degree `2s - 1` (C^{s-1}), with `s` in {2, 3}. Coefficients are stored
//! per cell in the local variable `x - x_m`, so evaluation and derivative
//! evaluation are O(1) once the cell is located.

use std::sync::Arc;

use crate::config::InterpKind;
use crate::cyclic::CyclicBandedSolver;
use crate::error::{Error, Result};
use crate::function::DerivFn;
use crate::grid::PeriodicGrid;
use crate::state::NodalState;

/// A periodic piecewise polynomial, evaluable with derivatives up to its
/// degree.
#[derive(Debug, Clone)]
pub struct Interpolant {
    grid: Arc<PeriodicGrid>,
    degree: usize,
    smoothness: usize,
    /// Cell-major coefficients, stride `degree + 1`, lowest order first.
    coeffs: Vec<f64>,
}

impl Interpolant {
    pub fn grid(&self) -> &Arc<PeriodicGrid> {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Continuity class index: derivatives 0..=smoothness are continuous
    /// across knots.
    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    /// Local monomial coefficients of cell `m`.
    pub fn cell_coeffs(&self, m: usize) -> &[f64] {
        let k = self.degree + 1;
        &self.coeffs[m * k..(m + 1) * k]
    }

    /// Value at `wrap(x)`.
    pub fn value(&self, x: f64) -> f64 {
        let (cell, xi) = self.grid.locate(x);
        let c = self.cell_coeffs(cell);
        let mut acc = 0.0;
        for &cj in c.iter().rev() {
            acc = acc * xi + cj;
        }
        acc
    }

    /// `k`-th derivative at `wrap(x)`. A point on a knot is evaluated in the
    /// cell to its right.
    pub fn eval(&self, x: f64, k: usize) -> Result<f64> {
        if k > self.degree {
            return Err(Error::OrderOutOfRange {
                order: k,
                max: self.degree,
            });
        }
        if k == 0 {
            return Ok(self.value(x));
        }
        let (cell, xi) = self.grid.locate(x);
        let c = self.cell_coeffs(cell);
        let mut acc = 0.0;
        for j in (k..=self.degree).rev() {
            let mut fac = 1.0;
            for i in 0..k {
                fac *= (j - i) as f64;
            }
            acc = acc * xi + c[j] * fac;
        }
        Ok(acc)
    }
}

impl DerivFn for Interpolant {
    fn eval(&self, x: f64, k: usize) -> Result<f64> {
        Interpolant::eval(self, x, k)
    }

    fn max_order(&self) -> usize {
        self.degree
    }
}

fn check_len(n: usize, got: usize) -> Result<()> {
    if got != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got,
        });
    }
    Ok(())
}

/// Piecewise linear interpolant of nodal values.
pub fn build_linear(grid: &Arc<PeriodicGrid>, values: &[f64]) -> Result<Interpolant> {
    let n = grid.cell_count();
    check_len(n, values.len())?;
    let mut coeffs = Vec::with_capacity(2 * n);
    for m in 0..n {
        let w = grid.cell_width(m);
        let u0 = values[m];
        let u1 = values[(m + 1) % n];
        coeffs.push(u0);
        coeffs.push((u1 - u0) / w);
    }
    Ok(Interpolant {
        grid: grid.clone(),
        degree: 1,
        smoothness: 0,
        coeffs,
    })
}

/// Cubic two-point Hermite cell matching value and slope at both ends.
fn cubic_cell(u0: f64, d0: f64, u1: f64, d1: f64, w: f64, out: &mut Vec<f64>) {
    let du = u1 - u0;
    out.push(u0);
    out.push(d0);
    out.push((3.0 * du / w - 2.0 * d0 - d1) / w);
    out.push((-2.0 * du / w + d0 + d1) / (w * w));
}

/// Quintic two-point Hermite cell matching value, slope and curvature at
/// both ends.
#[allow(clippy::too_many_arguments)]
fn quintic_cell(u0: f64, d0: f64, e0: f64, u1: f64, d1: f64, e1: f64, w: f64, out: &mut Vec<f64>) {
    let r0 = u1 - u0 - d0 * w - 0.5 * e0 * w * w;
    let r1 = d1 - d0 - e0 * w;
    let r2 = e1 - e0;
    let w2 = w * w;
    let w3 = w2 * w;
    out.push(u0);
    out.push(d0);
    out.push(0.5 * e0);
    out.push(10.0 * r0 / w3 - 4.0 * r1 / w2 + 0.5 * r2 / w);
    out.push((-15.0 * r0 / w3 + 7.0 * r1 / w2 - r2 / w) / w);
    out.push((6.0 * r0 / w3 - 3.0 * r1 / w2 + 0.5 * r2 / w) / w2);
}

/// Two-point Hermite interpolant of degree `2s - 1` from nodal values and
/// derivative rows (`derivs[k-1][m]` is the k-th derivative at node m).
pub fn build_hermite(
    grid: &Arc<PeriodicGrid>,
    values: &[f64],
    derivs: &[Vec<f64>],
    s: usize,
) -> Result<Interpolant> {
    if !(2..=3).contains(&s) {
        return Err(Error::Domain(format!(
            "Hermite interpolation implemented for s in {{2, 3}}, got {s}"
        )));
    }
    let n = grid.cell_count();
    check_len(n, values.len())?;
    if derivs.len() != s - 1 {
        return Err(Error::DimensionMismatch {
            expected: s - 1,
            got: derivs.len(),
        });
    }
    for row in derivs {
        check_len(n, row.len())?;
    }
    let degree = 2 * s - 1;
    let mut coeffs = Vec::with_capacity((degree + 1) * n);
    for m in 0..n {
        let mp = (m + 1) % n;
        let w = grid.cell_width(m);
        if s == 2 {
            cubic_cell(values[m], derivs[0][m], values[mp], derivs[0][mp], w, &mut coeffs);
        } else {
            quintic_cell(
                values[m],
                derivs[0][m],
                derivs[1][m],
                values[mp],
                derivs[0][mp],
                derivs[1][mp],
                w,
                &mut coeffs,
            );
        }
    }
    Ok(Interpolant {
        grid: grid.clone(),
        degree,
        smoothness: s - 1,
        coeffs,
    })
}

/// Periodic spline of degree `2s - 1` collocating the nodal values.
/// Restricted to uniform grids, where the continuity conditions form a
/// well-conditioned cyclic banded system.
pub fn build_spline(grid: &Arc<PeriodicGrid>, values: &[f64], s: usize) -> Result<Interpolant> {
    if !(2..=3).contains(&s) {
        return Err(Error::Domain(format!(
            "spline interpolation implemented for s in {{2, 3}}, got {s}"
        )));
    }
    if !grid.is_uniform() {
        return Err(Error::UnsupportedGrid(
            "spline construction requires a uniform grid",
        ));
    }
    let n = grid.cell_count();
    check_len(n, values.len())?;
    if n < 2 * s + 1 {
        return Err(Error::InvalidGrid(format!(
            "periodic spline of degree {} needs at least {} nodes, got {n}",
            2 * s - 1,
            2 * s + 1
        )));
    }
    let h = grid.cell_width(0);
    if s == 2 {
        // C^2 continuity of the cubic cells: d_{m-1} + 4 d_m + d_{m+1}
        //   = 3 (u_{m+1} - u_{m-1}) / h, cyclic.
        let band = |i: usize, j: usize| if i == j { 4.0 } else { 1.0 };
        let corners = [(0usize, n - 1, 1.0), (n - 1, 0usize, 1.0)];
        let solver = CyclicBandedSolver::new(n, 1, 1, band, &corners)?;
        let mut d = vec![0.0; n];
        for (m, dm) in d.iter_mut().enumerate() {
            let um = values[(m + n - 1) % n];
            let up = values[(m + 1) % n];
            *dm = 3.0 * (up - um) / h;
        }
        solver.solve_in_place(&mut d);
        build_hermite(grid, values, &[d], 2)
    } else {
        // Unknowns per node: slope D_m and scaled curvature E_m = h e_m,
        // interleaved. C^4 and C^3 continuity of the quintic cells give
        //   7 D_{m-1} + 16 D_m + 7 D_{m+1} + E_{m-1} - E_{m+1}
        //     = 15 (u_{m+1} - u_{m-1}) / h,
        //   -8 D_{m-1} + 8 D_{m+1} - E_{m-1} + 6 E_m - E_{m+1}
        //     = 20 (u_{m+1} - 2 u_m + u_{m-1}) / h.
        let nn = 2 * n;
        let band = |i: usize, j: usize| -> f64 {
            let node_i = i / 2;
            let node_j = j / 2;
            let off = node_j as isize - node_i as isize;
            coeff_quintic(i % 2, off, j % 2)
        };
        let mut corners = Vec::with_capacity(8);
        for row in 0..2 {
            // node 0 couples to node n-1 (columns 2n-2, 2n-1)
            corners.push((row, nn - 2, coeff_quintic(row, -1, 0)));
            corners.push((row, nn - 1, coeff_quintic(row, -1, 1)));
            // node n-1 couples to node 0 (columns 0, 1)
            corners.push((nn - 2 + row, 0, coeff_quintic(row, 1, 0)));
            corners.push((nn - 2 + row, 1, coeff_quintic(row, 1, 1)));
        }
        let solver = CyclicBandedSolver::new(nn, 3, 3, band, &corners)?;
        let mut rhs = vec![0.0; nn];
        for m in 0..n {
            let um = values[(m + n - 1) % n];
            let u0 = values[m];
            let up = values[(m + 1) % n];
            rhs[2 * m] = 15.0 * (up - um) / h;
            rhs[2 * m + 1] = 20.0 * (up - 2.0 * u0 + um) / h;
        }
        solver.solve_in_place(&mut rhs);
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        for m in 0..n {
            d[m] = rhs[2 * m];
            e[m] = rhs[2 * m + 1] / h;
        }
        build_hermite(grid, values, &[d, e], 3)
    }
}

/// Stencil coefficient of the quintic spline system: equation `eq` (0 = C^4
/// row, 1 = C^3 row) at a node, unknown `which` (0 = D, 1 = E) at node
/// offset `off` in {-1, 0, 1}.
fn coeff_quintic(eq: usize, off: isize, which: usize) -> f64 {
    match (eq, off, which) {
        (0, -1, 0) => 7.0,
        (0, 0, 0) => 16.0,
        (0, 1, 0) => 7.0,
        (0, -1, 1) => 1.0,
        (0, 0, 1) => 0.0,
        (0, 1, 1) => -1.0,
        (1, -1, 0) => -8.0,
        (1, 0, 0) => 0.0,
        (1, 1, 0) => 8.0,
        (1, -1, 1) => -1.0,
        (1, 0, 1) => 6.0,
        (1, 1, 1) => -1.0,
        _ => 0.0,
    }
}

/// Samples `f` (and, for Hermite kinds, its derivatives) at the nodes and
/// dispatches to the matching builder.
pub fn interpolate_function(
    grid: &Arc<PeriodicGrid>,
    f: &dyn DerivFn,
    kind: InterpKind,
) -> Result<Interpolant> {
    kind.validate()?;
    let n = grid.cell_count();
    let mut values = Vec::with_capacity(n);
    for m in 0..n {
        values.push(f.eval(grid.node(m), 0)?);
    }
    match kind {
        InterpKind::Linear => build_linear(grid, &values),
        InterpKind::Spline(s) => build_spline(grid, &values, s),
        InterpKind::Hermite(s) => {
            let mut derivs = Vec::with_capacity(s - 1);
            for k in 1..s {
                let mut row = Vec::with_capacity(n);
                for m in 0..n {
                    row.push(f.eval(grid.node(m), k)?);
                }
                derivs.push(row);
            }
            build_hermite(grid, &values, &derivs, s)
        }
    }
}

/// Builds the interpolant of a nodal state for the given kind.
pub fn build_for_state(state: &NodalState, kind: InterpKind) -> Result<Interpolant> {
    state.check_kind(kind)?;
    match kind {
        InterpKind::Linear => build_linear(state.grid(), state.values()),
        InterpKind::Spline(s) => build_spline(state.grid(), state.values(), s),
        InterpKind::Hermite(s) => build_hermite(state.grid(), state.values(), state.derivs(), s),
    }
}
