//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameters outside the admissible region (bad `k`, `a`, grids, ranges).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Root bracketing failed: no sign change on the given interval.
    #[error("bracket invalid: no sign change on [{lo}, {hi}]")]
    BracketInvalid { lo: f64, hi: f64 },

    /// Adaptive ODE step collapsed below machine resolution.
    #[error("ODE step size underflow near x = {x}: {context}")]
    StepUnderflow { x: f64, context: String },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: last estimate {estimate}, error {error}")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    /// The spectral parameter touches the essential spectrum.
    #[error("lambda = {re} + {im}i lies on the essential spectrum")]
    EssentialSpectrum { re: f64, im: f64 },

    /// The profile shot left the admissible strip or never reached a crest.
    #[error("shooting failed: {0}")]
    Shooting(String),

    /// Winding-number computation could not certify an integer count.
    #[error("winding computation failed: {0}")]
    Winding(String),

    /// A pipeline stage failed; carries the stage label.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
