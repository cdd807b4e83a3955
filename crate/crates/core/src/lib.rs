//! Eigenvalue densities of the Hermite and Laguerre beta-ensembles.
//!
//! * [`symop`]: exact finite-N densities for even beta from generalized polynomials
//! * [`bulk`]: global laws with their oscillatory finite-N corrections
//! * [`softedge`]: soft-edge densities from a multidimensional Airy-type integral
//! * [`ensembles`]: tridiagonal-model sampling and histograms
//! * [`cli`]: the `betadensity` command line
//!
//! Series coefficients keep their full printed digits, and negated comparisons
//! are used on purpose so that NaN fails validation.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bulk;
pub mod cli;
pub mod curve;
pub mod ensembles;
pub mod error;
pub mod softedge;
pub mod specfun;
pub mod symop;

pub use curve::{CurveMeta, DensityCurve, Method, Scaling};
pub use error::{Error, Result};
pub use specfun::{EnsembleSpec, Family};
