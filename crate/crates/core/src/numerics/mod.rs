//! Numerical kernels shared by the geometry and bound modules.
//!
//! Every routine takes an explicit [`Tolerance`]; nothing here keeps state
//! between calls, so results are deterministic for fixed inputs.

mod ode;
mod quadrature;
mod roots;

pub use ode::{solve_ode, OdeConfig, OdeOutcome, OdeSolution};
pub use quadrature::integrate;
pub use roots::{find_root, golden_section_max, golden_section_min, invert_monotone};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative/absolute accuracy target plus an iteration budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_iter: usize) -> Result<Self> {
        let tol = Self { rel, abs, max_iter };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel > 0.0) || !(self.abs >= 0.0) || self.max_iter < 1 {
            return Err(Error::InvalidTolerance {
                rel: self.rel,
                abs: self.abs,
                max_iter: self.max_iter,
            });
        }
        Ok(())
    }

    /// Acceptable error for a quantity of magnitude `scale`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-12,
            abs: 0.0,
            max_iter: 200,
        }
    }
}

/// Richardson extrapolation of samples `f(h), f(h/r), f(h/r^2), ...` for an
/// expansion `f(h) = c0 + c1 h^2 + c2 h^4 + ...`. Returns the estimate of `c0`.
pub fn richardson_extrapolate(values: &[f64], ratio: f64) -> f64 {
    assert!(!values.is_empty(), "richardson_extrapolate needs samples");
    let mut table = values.to_vec();
    let r2 = ratio * ratio;
    let mut factor = r2;
    for level in 1..values.len() {
        for i in (level..values.len()).rev() {
            table[i] = table[i] + (table[i] - table[i - 1]) / (factor - 1.0);
        }
        factor *= r2;
    }
    table[values.len() - 1]
}
