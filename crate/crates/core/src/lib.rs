//! Collective dissipation of two bosonic probes embedded in a harmonic
//! crystal: damping coefficients from Brillouin-zone and resonant-manifold
//! integrals, disordered chains, bath correlations and Gaussian dynamics.

pub mod contour;
pub mod correlation;
pub mod damping;
pub mod disorder;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod numeric;

pub use error::{Error, Result};
