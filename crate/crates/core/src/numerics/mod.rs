//! Low-level numerical kernels: adaptive ODE integration, root finding,
//! adaptive quadrature with endpoint-singularity substitution, truncated
//! Taylor (jet) arithmetic, and closed-form biquadratic roots.

pub mod biquadratic;
pub mod jet;
pub mod ode;
pub mod quad;
pub mod root;

use crate::scalar::{lit, Real};
use serde::Serialize;

/// Tolerance bundle threaded through the kernels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances<S: Real> {
    /// Relative per-step ODE tolerance.
    pub ode_rel: S,
    /// Absolute per-step ODE tolerance.
    pub ode_abs: S,
    /// Root-finding tolerance (on the abscissa).
    pub root_tol: S,
    /// Relative quadrature tolerance.
    pub quad_tol: S,
}

impl<S: Real> Default for Tolerances<S> {
    fn default() -> Self {
        Tolerances {
            ode_rel: lit(1e-10),
            ode_abs: lit(1e-12),
            root_tol: lit(1e-12),
            quad_tol: lit(1e-9),
        }
    }
}

impl<S: Real> Tolerances<S> {
    pub fn validate(&self) -> crate::error::Result<()> {
        let pos = |v: S, name: &str| {
            if v > S::zero() {
                Ok(())
            } else {
                Err(crate::error::Error::Parameter(format!(
                    "tolerance {name} must be strictly positive"
                )))
            }
        };
        pos(self.ode_rel, "ode_rel")?;
        pos(self.ode_abs, "ode_abs")?;
        pos(self.root_tol, "root_tol")?;
        pos(self.quad_tol, "quad_tol")
    }
}
