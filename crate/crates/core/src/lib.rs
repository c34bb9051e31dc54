//! Numerics for a family of partially hyperbolic horseshoes and their
//! thermodynamic formalism: the cube map `F`, its planar projection `G`,
//! itinerary coding on the golden-mean shift, an inducing scheme over a
//! countable alphabet, Gurevich pressure brackets, Gibbs measure
//! approximation and phase-transition detection.

pub mod error;
pub mod expansion;
pub mod inducing;
pub mod maps;
pub mod measures;
pub mod potentials;
pub mod symbolic;
pub mod thermo;

pub use error::Error;
pub use maps::{MapParams, Point3, Region};
pub use measures::MeasureApprox;
pub use potentials::PotentialSpec;
pub use symbolic::{CylinderId, InducingParams, TwoSidedWindow, Word};
pub use thermo::PressureBracket;

/// Golden ratio `(1 + sqrt 5)/2`, the spectral radius of the golden-mean
/// shift adjacency matrix.
pub const OMEGA: f64 = 1.618033988749894848204586834365638118_f64;

/// Topological entropy of the horseshoe, `log OMEGA`.
pub fn h_top() -> f64 {
    OMEGA.ln()
}
