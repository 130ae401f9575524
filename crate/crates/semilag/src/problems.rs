//! Benchmark problem: the viscous Burgers equation with a closed-form
//! periodic solution used as ground truth by the convergence experiments.

use crate::error::{Error, Result};
use crate::function::DerivFn;
use crate::stepper::Flux;

/// Burgers flux `f(u) = u`.
pub fn burgers_flux() -> Flux {
    Flux::new(|u| u, |_| 1.0, |_| 0.0, 1.0)
}

/// Viscous Burgers benchmark with exact solution
///
/// ```text
/// u(x, t) = 4 nu A pi E(t) sin(2 pi x) / (1 + A E(t) cos(2 pi x)),
/// E(t) = exp(-4 pi^2 nu t),
/// ```
///
/// smooth and periodic for `0 < A < 1`.
#[derive(Debug, Clone, Copy)]
pub struct BurgersBenchmark {
    a: f64,
    nu: f64,
    t_final: f64,
}

impl BurgersBenchmark {
    pub fn new(a: f64, nu: f64, t_final: f64) -> Result<Self> {
        if !(0.0 < a && a < 1.0) {
            return Err(Error::Domain(format!(
                "amplitude must lie in (0, 1), got {a}"
            )));
        }
        if !(nu > 0.0) {
            return Err(Error::Domain(format!("nu must be positive, got {nu}")));
        }
        if !(t_final > 0.0) {
            return Err(Error::Domain(format!(
                "t_final must be positive, got {t_final}"
            )));
        }
        Ok(Self { a, nu, t_final })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Spatial derivative of order `k <= 2` of the exact solution at (x, t).
    pub fn exact_solution(&self, x: f64, t: f64, k: usize) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        if k > 2 {
            return Err(Error::OrderOutOfRange { order: k, max: 2 });
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let e = (-two_pi * std::f64::consts::PI * 2.0 * self.nu * t).exp();
        let s = (two_pi * x).sin();
        let c = (two_pi * x).cos();
        let amp = 4.0 * self.nu * self.a * std::f64::consts::PI * e;
        let den = 1.0 + self.a * e * c;
        Ok(match k {
            0 => amp * s / den,
            1 => two_pi * amp * (c + self.a * e) / (den * den),
            _ => {
                let ae = self.a * e;
                two_pi * two_pi * amp * s * (ae * c + 2.0 * ae * ae - 1.0) / (den * den * den)
            }
        })
    }

    /// The exact solution at a fixed time as an evaluable profile
    /// (derivatives up to order 2).
    pub fn profile_at(&self, t: f64) -> BurgersProfile {
        BurgersProfile { bench: *self, t }
    }
}

impl Default for BurgersBenchmark {
    /// The standard benchmark configuration: A = 9/10, nu = 1e-3, T = 1.
    fn default() -> Self {
        Self {
            a: 0.9,
            nu: 1e-3,
            t_final: 1.0,
        }
    }
}

/// Exact Burgers solution frozen at one time level.
#[derive(Debug, Clone, Copy)]
pub struct BurgersProfile {
    bench: BurgersBenchmark,
    t: f64,
}

impl DerivFn for BurgersProfile {
    fn eval(&self, x: f64, k: usize) -> Result<f64> {
        self.bench.exact_solution(x, self.t, k)
    }

    fn max_order(&self) -> usize {
        2
    }
}
