//! Quadrature, norms, error reports and convergence-order estimation.

use crate::error::{Error, Result};
use crate::function::DerivFn;
use crate::grid::PeriodicGrid;
use crate::interp::Interpolant;
use crate::problems::BurgersBenchmark;
use crate::stepper::Flux;

/// 7-node Gauss-Legendre rule on [-1, 1], exact for polynomials of degree
/// at most 13. Abscissae and weights are hard-coded to 17 significant
/// digits; construction self-checks the exactness invariant.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureRule {
    nodes: [f64; 7],
    weights: [f64; 7],
}

impl QuadratureRule {
    pub fn gauss_legendre_7() -> Self {
        let rule = Self {
            nodes: [
                -0.94910791234275852,
                -0.74153118559939444,
                -0.40584515137739717,
                0.0,
                0.40584515137739717,
                0.74153118559939444,
                0.94910791234275852,
            ],
            weights: [
                0.12948496616886969,
                0.27970539148927667,
                0.38183005050511894,
                0.41795918367346939,
                0.38183005050511894,
                0.27970539148927667,
                0.12948496616886969,
            ],
        };
        let sum: f64 = rule.weights.iter().sum();
        assert!((sum - 2.0).abs() <= 1e-15, "weight sum defect {}", sum - 2.0);
        for k in 0..=13usize {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            let got: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            assert!(
                (got - exact).abs() <= 1e-13,
                "degree-{k} monomial defect {}",
                got - exact
            );
        }
        rule
    }

    pub fn nodes(&self) -> &[f64; 7] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64; 7] {
        &self.weights
    }
}

/// Composite quadrature of `f` over the torus using the 7-node rule per
/// grid cell, with explicit error propagation from the integrand.
fn integrate_try(
    grid: &PeriodicGrid,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let rule = QuadratureRule::gauss_legendre_7();
    let mut acc = 0.0;
    for m in 0..grid.cell_count() {
        let a = grid.node(m);
        let half = 0.5 * grid.cell_width(m);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let xx = a + half * (x + 1.0);
            acc += w * half * f(xx)?;
        }
    }
    Ok(acc)
}

/// L2 norm of `f` over the torus by the composite 7-node rule per cell.
pub fn l2_norm<F: Fn(f64) -> f64>(grid: &PeriodicGrid, f: F) -> f64 {
    integrate_try(grid, |x| {
        let v = f(x);
        Ok(v * v)
    })
    .expect("infallible integrand")
    .max(0.0)
    .sqrt()
}

/// H^s seminorm: the L2 norm of the s-th derivative.
pub fn hs_seminorm(grid: &PeriodicGrid, v: &dyn DerivFn, s: usize) -> Result<f64> {
    if s > v.max_order() {
        return Err(Error::OrderOutOfRange {
            order: s,
            max: v.max_order(),
        });
    }
    let sq = integrate_try(grid, |x| {
        let d = v.eval(x, s)?;
        Ok(d * d)
    })?;
    Ok(sq.max(0.0).sqrt())
}

/// Mesh-weighted H^s norm `(||v||^2 + h^{2s}/dt |v|_s^2)^{1/2}`.
pub fn weighted_norm(grid: &PeriodicGrid, v: &dyn DerivFn, s: usize, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let l2 = integrate_try(grid, |x| {
        let val = v.eval(x, 0)?;
        Ok(val * val)
    })?;
    let semi = hs_seminorm(grid, v, s)?;
    let h = grid.mesh_size();
    Ok((l2 + h.powi(2 * s as i32) / dt * semi * semi).sqrt())
}

/// Starred H^s norm `(||v||^2 + |v|_s^2)^{1/2}` (diagnostic only).
pub fn starred_norm(grid: &PeriodicGrid, v: &dyn DerivFn, s: usize) -> Result<f64> {
    let l2 = integrate_try(grid, |x| {
        let val = v.eval(x, 0)?;
        Ok(val * val)
    })?;
    let semi = hs_seminorm(grid, v, s)?;
    Ok((l2 + semi * semi).sqrt())
}

/// Relative L2 error of an interpolant against a reference function. The
/// difference is formed pointwise at the quadrature nodes.
pub fn rel_l2_error<F: Fn(f64) -> f64>(
    grid: &PeriodicGrid,
    numeric: &Interpolant,
    exact: F,
) -> Result<f64> {
    let den = l2_norm(grid, &exact);
    if den == 0.0 {
        return Err(Error::ZeroReferenceNorm);
    }
    let num = l2_norm(grid, |x| numeric.value(x) - exact(x));
    Ok(num / den)
}

/// L2 norm of the one-step defect of the exact solution under the scheme's
/// update map, interpolation excluded: the previous exact profile is
/// evaluated at the backtracked points through its closed form.
pub fn truncation_probe(
    bench: &BurgersBenchmark,
    flux: &Flux,
    t_n: f64,
    dt: f64,
    grid: &PeriodicGrid,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if t_n < dt {
        return Err(Error::Domain(format!(
            "need t_n >= dt, got t_n = {t_n}, dt = {dt}"
        )));
    }
    let t_prev = t_n - dt;
    let off = std::f64::consts::SQRT_2 * (bench.nu() * dt).sqrt();
    let sq = integrate_try(grid, |x| {
        let un = bench.exact_solution(x, t_n, 0)?;
        let z = x - flux.f(un) * dt;
        let um = bench.exact_solution(z - off, t_prev, 0)?;
        let up = bench.exact_solution(z + off, t_prev, 0)?;
        let tau = (un - 0.5 * (um + up)) / dt;
        Ok(tau * tau)
    })?;
    Ok(sq.max(0.0).sqrt())
}

/// Least-squares slope of log(err) against log(h) over a refinement sweep.
pub fn observed_order(hs: &[f64], errs: &[f64]) -> Result<f64> {
    if hs.len() != errs.len() {
        return Err(Error::DimensionMismatch {
            expected: hs.len(),
            got: errs.len(),
        });
    }
    if hs.len() < 2 {
        return Err(Error::Domain("need at least two (h, err) pairs".into()));
    }
    for (i, &h) in hs.iter().enumerate() {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("h[{i}] = {h} must be positive")));
        }
        if i > 0 && h >= hs[i - 1] {
            return Err(Error::Domain("mesh sizes must be strictly decreasing".into()));
        }
    }
    for (i, &e) in errs.iter().enumerate() {
        if !(e > 0.0) {
            return Err(Error::Domain(format!("err[{i}] = {e} must be positive")));
        }
    }
    let n = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - xbar) * (y - ybar);
        den += (x - xbar) * (x - xbar);
    }
    Ok(num / den)
}

/// Error summary of one solver run.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub rel_l2: f64,
    pub abs_l2: f64,
    /// H^s seminorm of the error, when the needed derivatives exist.
    pub hs_seminorm_err: Option<f64>,
    /// Mesh-weighted norm of the error, set together with the seminorm.
    pub weighted_err: Option<f64>,
    /// Order s the optional seminorm fields refer to.
    pub hs_order: Option<usize>,
    pub h: f64,
    pub dt: f64,
    pub n_newton_avg: f64,
}

impl ErrorReport {
    pub fn new(rel_l2: f64, abs_l2: f64, h: f64, dt: f64, n_newton_avg: f64) -> Self {
        Self {
            rel_l2,
            abs_l2,
            hs_seminorm_err: None,
            weighted_err: None,
            hs_order: None,
            h,
            dt,
            n_newton_avg,
        }
    }

    /// Attaches the H^s seminorm of the error; the weighted norm follows
    /// from the defining identity.
    pub fn with_seminorm(mut self, s: usize, semi: f64) -> Self {
        self.hs_order = Some(s);
        self.hs_seminorm_err = Some(semi);
        self.weighted_err =
            Some((self.abs_l2 * self.abs_l2 + self.h.powi(2 * s as i32) / self.dt * semi * semi).sqrt());
        self
    }

    /// The defining identity of the weighted norm, used as a consistency
    /// check on emitted reports.
    pub fn weighted_identity_defect(&self) -> Option<f64> {
        match (self.weighted_err, self.hs_seminorm_err, self.hs_order) {
            (Some(w), Some(semi), Some(s)) => {
                let rhs = self.abs_l2 * self.abs_l2
                    + self.h.powi(2 * s as i32) / self.dt * semi * semi;
                let lhs = w * w;
                Some((lhs - rhs).abs() / lhs.max(rhs).max(f64::MIN_POSITIVE))
            }
            _ => None,
        }
    }
}
