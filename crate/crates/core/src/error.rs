//! Error types shared across the library.

use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A constructor or routine received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The dense symmetric eigensolver did not converge.
    #[error("eigensolver failed to converge on a {n}x{n} matrix")]
    EigenSolveFailed { n: usize },

    /// A sweep failed at a specific flux point; carries the offending bias.
    #[error("sweep failed at phi2/Phi0 = {phi2_over_phi0}: {source}")]
    SweepPointFailed {
        phi2_over_phi0: f64,
        #[source]
        source: Box<CoreError>,
    },

    /// Two stationary points of f01 were bracketed in adjacent grid
    /// intervals, so the seeding grid cannot separate them reliably.
    #[error(
        "sweet-spot seeding grid too coarse: sign changes in adjacent intervals \
         refine to {x_a:.6} and {x_b:.6}; retry with grid_n >= {suggested_grid_n}"
    )]
    GridTooCoarse {
        x_a: f64,
        x_b: f64,
        suggested_grid_n: usize,
    },

    /// The phase-grid window is too narrow for the requested states.
    #[error("phase window half-width {half_width} too small: {detail}")]
    WindowTooSmall { half_width: f64, detail: String },

    /// A finite-difference step so small that the frequency difference is
    /// dominated by eigensolver noise (~1e-12 GHz) rather than the slope.
    #[error(
        "finite-difference step {step} Phi0 is unreliable: the implied slope \
         resolution exceeds the 1e-12 GHz frequency noise floor"
    )]
    StepUnreliable { step: f64 },
}

/// Convenience alias used throughout the library.
pub type Result<T> = std::result::Result<T, CoreError>;
