//! Crate error type.

/// Errors reported by constructors and operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("time horizon must be positive and finite, got {0}")]
    InvalidTime(f64),

    #[error("time step must lie in (0, 1), got {0}")]
    InvalidTimeStep(f64),

    #[error("time step {dt} must not exceed the horizon {t}")]
    StepExceedsHorizon { dt: f64, t: f64 },

    #[error("mode index must be at least 1")]
    ZeroModeIndex,

    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutsideUnit(f64),

    #[error("alpha must lie in (1/4, 1/2], got {0}")]
    AlphaOutsideLipschitzRange(f64),

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("oscillation index must be even and at least 2, got {0}")]
    OddOscillationIndex(u64),

    #[error("theta must be nonnegative and finite, got {0}")]
    NegativeTheta(f64),

    #[error("quadrature budget exhausted: error estimate {estimate:e} above tolerance {tol:e}")]
    QuadratureBudget { estimate: f64, tol: f64 },

    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewFitPoints(usize),

    #[error("rate fit requires positive finite values, got {value} at index {index}")]
    NonPositiveFitValue { index: usize, value: f64 },

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("sample count must be at least 1")]
    ZeroSamples,

    #[error("sampling dimension must be at least 1")]
    ZeroDimension,
}
