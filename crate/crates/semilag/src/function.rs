//! Scalar functions on the torus evaluable together with spatial derivatives.

use crate::error::{Error, Result};

/// A function `[0,1) -> R` that can report its derivatives up to some order.
/// Implemented by interpolants, exact solutions and user-supplied profiles.
pub trait DerivFn: Sync {
    /// Evaluates the `k`-th spatial derivative at `x` (periodically wrapped).
    fn eval(&self, x: f64, k: usize) -> Result<f64>;

    /// Highest derivative order this function can report.
    fn max_order(&self) -> usize;
}

/// Adapter wrapping plain closures: `derivs[k]` evaluates the k-th derivative.
pub struct ClosureFn {
    derivs: Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl ClosureFn {
    pub fn new(derivs: Vec<Box<dyn Fn(f64) -> f64 + Send + Sync>>) -> Self {
        assert!(!derivs.is_empty());
        Self { derivs }
    }

    /// A function with no derivative information.
    pub fn value_only<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self {
            derivs: vec![Box::new(f)],
        }
    }
}

impl DerivFn for ClosureFn {
    fn eval(&self, x: f64, k: usize) -> Result<f64> {
        match self.derivs.get(k) {
            Some(f) => Ok(f(x)),
            None => Err(Error::OrderOutOfRange {
                order: k,
                max: self.derivs.len() - 1,
            }),
        }
    }

    fn max_order(&self) -> usize {
        self.derivs.len() - 1
    }
}
