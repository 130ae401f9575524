//! The implicit semi-Lagrangian time step.
//!
//! Each node update solves the scalar equation
//!
//! ```text
//! u = 1/2 [ g(x - f(u) dt - sqrt(2) delta) + g(x - f(u) dt + sqrt(2) delta) ]
//! ```
//!
//! with `delta = sqrt(nu dt)` and `g` the interpolant of the previous state:
//! the advective foot is traced implicitly, and the diffusive term enters
//! through the symmetric two-point average. Hermite back-ends additionally
//! propagate nodal derivatives of the implicitly defined update map.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use crate::config::{InterpKind, SchemeConfig};
use crate::error::{Error, Result};
use crate::function::DerivFn;
use crate::grid::PeriodicGrid;
use crate::interp::{build_for_state, Interpolant};
use crate::state::NodalState;
use std::sync::Arc;

/// Flux function together with the derivatives needed by the implicit solve
/// and by Hermite derivative propagation.
pub struct Flux {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    fp: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    fpp: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Bound on |f'| over the relevant solution range.
    pub lip_bound: f64,
}

impl Flux {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_second: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lip_bound: f64,
    ) -> Self {
        Self {
            f: Box::new(f),
            fp: Box::new(f_prime),
            fpp: Box::new(f_second),
            lip_bound,
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn f_prime(&self, u: f64) -> f64 {
        (self.fp)(u)
    }

    pub fn f_second(&self, u: f64) -> f64 {
        (self.fpp)(u)
    }

    /// Checks that `f_prime` matches a centered difference of `f` at the
    /// sample points and that `lip_bound` dominates |f'| there.
    pub fn check_consistency(&self, samples: &[f64]) -> Result<()> {
        let eps = 1e-6;
        for &u in samples {
            let fd = (self.f(u + eps) - self.f(u - eps)) / (2.0 * eps);
            let fp = self.f_prime(u);
            if (fd - fp).abs() > 1e-6 {
                return Err(Error::Numerical(format!(
                    "f_prime({u}) = {fp} disagrees with finite difference {fd}"
                )));
            }
            if fp.abs() > self.lip_bound + 1e-12 {
                return Err(Error::Numerical(format!(
                    "|f'({u})| = {} exceeds lip_bound = {}",
                    fp.abs(),
                    self.lip_bound
                )));
            }
        }
        Ok(())
    }
}

/// Diagnostics of one accepted step (or of a whole run after merging).
#[derive(Debug, Clone)]
pub struct StepReport {
    /// Per-node iteration counts, summed over steps after merging.
    pub newton_iters: Vec<u32>,
    /// Largest accepted residual |F(u)|.
    pub max_residual: f64,
    /// `dt_max - dt` evaluated from the state the step started from;
    /// minimum over steps after merging.
    pub dt_margin: f64,
    /// Number of steps merged into this report.
    pub steps: u32,
}

impl StepReport {
    pub fn merge(&mut self, other: &StepReport) {
        for (a, b) in self.newton_iters.iter_mut().zip(&other.newton_iters) {
            *a += b;
        }
        self.max_residual = self.max_residual.max(other.max_residual);
        self.dt_margin = self.dt_margin.min(other.dt_margin);
        self.steps += other.steps;
    }

    /// Mean Newton iterations per node per step.
    pub fn avg_newton_iters(&self) -> f64 {
        if self.newton_iters.is_empty() || self.steps == 0 {
            return 0.0;
        }
        let total: u64 = self.newton_iters.iter().map(|&i| u64::from(i)).sum();
        total as f64 / (self.newton_iters.len() as f64 * f64::from(self.steps))
    }
}

/// Largest time step for which the implicit foot equation is guaranteed
/// solvable: `min{ 1 / (3 |f'| |v'|), 1 }`, and 1 when either bound vanishes.
pub fn dt_max(flux_lip: f64, grad_bound: f64) -> Result<f64> {
    if flux_lip < 0.0 || grad_bound < 0.0 {
        return Err(Error::Domain(format!(
            "dt_max needs nonnegative bounds, got ({flux_lip}, {grad_bound})"
        )));
    }
    let p = 3.0 * flux_lip * grad_bound;
    if p == 0.0 {
        Ok(1.0)
    } else {
        Ok((1.0 / p).min(1.0))
    }
}

/// Result of one implicit foot solve.
#[derive(Debug, Clone, Copy)]
pub struct FootSolve {
    pub u: f64,
    /// Residual evaluations spent (Newton plus bisection fallback).
    pub iters: u32,
    pub residual: f64,
}

/// Solves `F(u) = u - 1/2 [g(x - f(u) dt - sqrt(2) delta) + g(x - f(u) dt +
/// sqrt(2) delta)] = 0` by Newton iteration with a safeguarded bisection
/// fallback on a growing bracket around `u_init`.
pub fn solve_foot(
    x: f64,
    g: &Interpolant,
    flux: &Flux,
    dt: f64,
    delta: f64,
    u_init: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FootSolve> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if !u_init.is_finite() {
        return Err(Error::Domain("u_init must be finite".into()));
    }
    let off = SQRT_2 * delta;
    let residual = |xi: f64| {
        let z = x - flux.f(xi) * dt;
        xi - 0.5 * (g.value(z - off) + g.value(z + off))
    };
    let mut iters = 0u32;
    let mut xi = u_init;
    while (iters as usize) < max_iter {
        iters += 1;
        let fval = residual(xi);
        if fval.abs() <= tol {
            return Ok(FootSolve {
                u: xi,
                iters,
                residual: fval.abs(),
            });
        }
        let z = x - flux.f(xi) * dt;
        let gp = g
            .eval(z - off, 1)
            .and_then(|a| g.eval(z + off, 1).map(|b| a + b))?;
        let fp = 1.0 + 0.5 * dt * flux.f_prime(xi) * gp;
        if !fp.is_finite() || fp.abs() < 1e-12 {
            break;
        }
        let next = xi - fval / fp;
        if !next.is_finite() {
            break;
        }
        xi = next;
    }
    // Bisection fallback: grow a bracket around u_init until F changes sign.
    let cap = 10.0 * (1.0 + u_init.abs());
    let mut r = tol.max(1e-6 * (1.0 + u_init.abs()));
    let (mut lo, mut hi);
    let mut flo;
    loop {
        lo = u_init - r;
        hi = u_init + r;
        flo = residual(lo);
        let fhi = residual(hi);
        iters += 2;
        if flo.abs() <= tol {
            return Ok(FootSolve {
                u: lo,
                iters,
                residual: flo.abs(),
            });
        }
        if fhi.abs() <= tol {
            return Ok(FootSolve {
                u: hi,
                iters,
                residual: fhi.abs(),
            });
        }
        if (flo < 0.0) != (fhi < 0.0) {
            break;
        }
        r *= 2.0;
        if r > cap {
            return Err(Error::Convergence {
                node: None,
                residual: residual(u_init).abs(),
            });
        }
    }
    let mut best = (u_init, f64::INFINITY);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = residual(mid);
        iters += 1;
        if fm.abs() <= tol {
            return Ok(FootSolve {
                u: mid,
                iters,
                residual: fm.abs(),
            });
        }
        if fm.abs() < best.1 {
            best = (mid, fm.abs());
        }
        if (flo < 0.0) == (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
    }
    Err(Error::Convergence {
        node: None,
        residual: best.1,
    })
}

/// Largest |g'| sampled at `per_cell` equispaced points in every cell.
pub fn max_abs_slope(g: &Interpolant, per_cell: usize) -> f64 {
    let grid = g.grid();
    let mut max = 0.0f64;
    for m in 0..grid.cell_count() {
        let a = grid.node(m);
        let w = grid.cell_width(m);
        for j in 0..per_cell {
            let x = a + w * (j as f64 / per_cell as f64);
            // degree >= 1 always, so first derivatives cannot fail
            let gp = g.eval(x, 1).expect("interpolant degree >= 1");
            max = max.max(gp.abs());
        }
    }
    max
}

struct NodeUpdate {
    u: f64,
    d1: f64,
    d2: f64,
    iters: u32,
    residual: f64,
}

/// Advances the state by one time step. For Hermite kinds the nodal
/// derivative stacks are propagated alongside the values.
pub fn step(state: &NodalState, flux: &Flux, config: &SchemeConfig) -> Result<(NodalState, StepReport)> {
    config.validate()?;
    state.check_kind(config.interpolation)?;
    let kind = config.interpolation;
    let grid: Arc<PeriodicGrid> = state.grid().clone();
    let g = build_for_state(state, kind)?;
    let dt = config.dt;
    let delta = (config.nu * dt).sqrt();
    let bound = dt_max(flux.lip_bound, max_abs_slope(&g, 8))?;
    let margin = bound - dt;
    if config.strict_dt_check && !(dt < bound) {
        return Err(Error::StepSize { dt, dt_max: bound });
    }
    let s = kind.order();
    let hermite = matches!(kind, InterpKind::Hermite(_));
    let n = grid.cell_count();
    let off = SQRT_2 * delta;
    let updates: Vec<NodeUpdate> = (0..n)
        .into_par_iter()
        .map(|m| -> Result<NodeUpdate> {
            let x = grid.node(m);
            let fs = solve_foot(
                x,
                &g,
                flux,
                dt,
                delta,
                state.values()[m],
                config.newton_tol,
                config.newton_max_iter,
            )
            .map_err(|e| match e {
                Error::Convergence { residual, .. } => Error::Convergence {
                    node: Some(m),
                    residual,
                },
                other => other,
            })?;
            let u = fs.u;
            let mut d1 = 0.0;
            let mut d2 = 0.0;
            if hermite {
                // Differentiating the update map U(x) defined implicitly by
                // the foot equation gives, with A the averaged slope of g at
                // the feet and X' the slope of the characteristic map,
                //   U'  = A / (1 + dt f'(U) A),
                //   U'' = (B X'^2 - dt A f''(U) U'^2) / (1 + dt A f'(U)),
                // where B averages g'' at the feet.
                let z = x - flux.f(u) * dt;
                let a = 0.5 * (g.eval(z - off, 1)? + g.eval(z + off, 1)?);
                let fp = flux.f_prime(u);
                d1 = a / (1.0 + dt * fp * a);
                if s == 3 {
                    let xp = 1.0 - dt * fp * d1;
                    let b = 0.5 * (g.eval(z - off, 2)? + g.eval(z + off, 2)?);
                    d2 = (b * xp * xp - dt * a * flux.f_second(u) * d1 * d1)
                        / (1.0 + dt * a * fp);
                }
            }
            Ok(NodeUpdate {
                u,
                d1,
                d2,
                iters: fs.iters,
                residual: fs.residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = updates.iter().map(|r| r.u).collect();
    let mut derivs = Vec::new();
    if hermite {
        derivs.push(updates.iter().map(|r| r.d1).collect());
        if s == 3 {
            derivs.push(updates.iter().map(|r| r.d2).collect());
        }
    }
    let newton_iters: Vec<u32> = updates.iter().map(|r| r.iters).collect();
    let max_residual = updates.iter().map(|r| r.residual).fold(0.0, f64::max);
    let next = NodalState::new(grid, s, values, derivs, state.time() + dt)?;
    let report = StepReport {
        newton_iters,
        max_residual,
        dt_margin: margin,
        steps: 1,
    };
    Ok((next, report))
}

/// Runs the scheme from `t = 0` to `t_final`: interpolates the initial
/// profile, applies `t_final / dt` steps and returns the final state with a
/// merged report.
pub fn run(
    initial: &dyn DerivFn,
    grid: &Arc<PeriodicGrid>,
    flux: &Flux,
    config: &SchemeConfig,
) -> Result<(NodalState, StepReport)> {
    config.validate()?;
    let nt_f = config.t_final / config.dt;
    let nt = nt_f.round();
    if nt < 1.0 || (nt_f - nt).abs() > 1e-9 * nt.max(1.0) {
        return Err(Error::Config(format!(
            "t_final / dt = {nt_f} is not a positive integer step count"
        )));
    }
    let nt = nt as usize;
    let kind = config.interpolation;
    let n = grid.cell_count();
    let mut values = Vec::with_capacity(n);
    for m in 0..n {
        values.push(initial.eval(grid.node(m), 0)?);
    }
    let mut derivs = Vec::new();
    for k in 1..=kind.deriv_rows() {
        let mut row = Vec::with_capacity(n);
        for m in 0..n {
            row.push(initial.eval(grid.node(m), k)?);
        }
        derivs.push(row);
    }
    let mut state = NodalState::new(grid.clone(), kind.order(), values, derivs, 0.0)?;
    let mut total: Option<StepReport> = None;
    for _ in 0..nt {
        let (next, rep) = step(&state, flux, config)?;
        state = next;
        match total.as_mut() {
            None => total = Some(rep),
            Some(t) => t.merge(&rep),
        }
    }
    Ok((state, total.expect("at least one step")))
}
