//! Scheme configuration shared by the stepper and the experiment runners.

use crate::error::{Error, Result};

/// Interpolation back-end. The parameter `s` of the high-order kinds is the
/// smoothness index: the polynomial degree is `2s - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpKind {
    /// Piecewise linear, C^0.
    Linear,
    /// Periodic spline of degree `2s - 1`, C^{2s-2}; `s` in {2, 3}.
    Spline(usize),
    /// Two-point Hermite of degree `2s - 1`, C^{s-1}; `s` in {2, 3}.
    Hermite(usize),
}

impl InterpKind {
    /// The smoothness parameter `s` (1 for linear interpolation).
    pub fn order(&self) -> usize {
        match *self {
            InterpKind::Linear => 1,
            InterpKind::Spline(s) | InterpKind::Hermite(s) => s,
        }
    }

    /// Polynomial degree `2s - 1`.
    pub fn degree(&self) -> usize {
        2 * self.order() - 1
    }

    /// Number of nodal derivative rows carried by the state (s-1 for
    /// Hermite kinds, 0 otherwise).
    pub fn deriv_rows(&self) -> usize {
        match *self {
            InterpKind::Hermite(s) => s - 1,
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InterpKind::Linear => Ok(()),
            InterpKind::Spline(s) | InterpKind::Hermite(s) if (2..=3).contains(&s) => Ok(()),
            _ => Err(Error::Config(
                "high-order interpolation requires s in {2, 3}".into(),
            )),
        }
    }
}

/// Parameters of a solver run.
#[derive(Debug, Clone)]
pub struct SchemeConfig {
    /// Viscosity, strictly positive.
    pub nu: f64,
    /// Time step.
    pub dt: f64,
    /// Final time; `dt <= t_final` and `t_final / dt` must be an integer.
    pub t_final: f64,
    pub interpolation: InterpKind,
    /// Absolute residual tolerance of the nodal Newton solve.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Reject steps with `dt >= dt_max` estimated from the current state.
    pub strict_dt_check: bool,
}

impl SchemeConfig {
    pub fn new(nu: f64, dt: f64, t_final: f64, interpolation: InterpKind) -> Result<Self> {
        let cfg = Self {
            nu,
            dt,
            t_final,
            interpolation,
            newton_tol: 1e-13,
            newton_max_iter: 50,
            strict_dt_check: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::Config(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0) || self.dt > self.t_final {
            return Err(Error::Config(format!(
                "need 0 < dt <= t_final, got dt = {}, t_final = {}",
                self.dt, self.t_final
            )));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::Config("newton_tol must be positive".into()));
        }
        if self.newton_max_iter < 1 {
            return Err(Error::Config("newton_max_iter must be at least 1".into()));
        }
        self.interpolation.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parameters() {
        assert_eq!(InterpKind::Linear.degree(), 1);
        assert_eq!(InterpKind::Spline(2).degree(), 3);
        assert_eq!(InterpKind::Hermite(3).degree(), 5);
        assert_eq!(InterpKind::Hermite(3).deriv_rows(), 2);
        assert_eq!(InterpKind::Spline(3).deriv_rows(), 0);
        assert!(InterpKind::Spline(4).validate().is_err());
        assert!(InterpKind::Hermite(1).validate().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SchemeConfig::new(1e-3, 1e-3, 1.0, InterpKind::Linear).is_ok());
        assert!(SchemeConfig::new(0.0, 1e-3, 1.0, InterpKind::Linear).is_err());
        assert!(SchemeConfig::new(1e-3, 0.0, 1.0, InterpKind::Linear).is_err());
        assert!(SchemeConfig::new(1e-3, 2.0, 1.0, InterpKind::Linear).is_err());
    }
}
