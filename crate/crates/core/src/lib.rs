//! Direction estimation for monotone linear index models when only the
//! ranks of the responses are observed.
//!
//! The model is `Y = F(x'β₀ + ε)` with `F` unknown and strictly increasing,
//! so only the direction of `β₀` is identified. The crate provides:
//!
//! * rank transforms ([`ranks`]),
//! * the standard normal CDF/quantile and its `n`-dependent truncation ([`gaussian`]),
//! * the Gaussian quantile (GQR/TGQR), empirical quantile (EQR) and Spearman
//!   maximising (Spearmax) estimators together with an OLS baseline ([`estimators`]),
//! * jackknife and bootstrap intervals for the fitted direction ([`inference`]),
//! * Monte Carlo scenario generation ([`simulate`]),
//! * numerical checks of the asymptotic theory ([`verify`]).

pub mod error;
pub mod estimators;
pub mod gaussian;
pub mod inference;
pub mod linalg;
pub mod ranks;
pub mod simulate;
pub mod verify;

mod parallel;

pub use error::{Error, Result};
pub use estimators::{
    direction_angle, normalize_direction, Dataset, DirectionEstimate, FitOptions, Method,
    ModelTruth, SpearmaxSearch,
};
