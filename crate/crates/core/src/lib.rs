//! Correlation analysis of two-mode Gaussian light sources for ghost imaging.
//!
//! The crate evaluates quantum, classical and total correlations of
//! thermal-split and SPDC-entangled beams (per speckle pair and in a
//! coarse-grained pixel/bucket description), the matching analytic
//! signal-to-noise models, a frame-by-frame Monte Carlo simulator of lensed
//! ghost imaging that validates them, and a discretized paraxial propagation
//! model for the lensless variant.

pub mod error;
pub mod gaussian;
pub mod lensless;
pub mod measurement;
pub mod montecarlo;
pub mod snr;
pub mod sources;
pub mod validate;

pub(crate) mod numeric;

pub use error::{Error, Result};
pub use gaussian::{entropy_f, CorrelationBreakdown, SymplecticSpectrum, TwoModeCovariance};
pub use measurement::measurement_oracle;
pub use sources::{SourceFamily, SourceSpec};
