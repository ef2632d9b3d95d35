//! Certified bounds for the Stieltjes approximation `li*(x)` of the
//! logarithmic integral, its error `ε(x) = li*(x) − li(x)`, and the
//! per-segment increments `Δ_k`.

pub mod bounds;
pub mod constants;
pub mod error;
pub mod kernel;
pub mod logint;
pub mod numerics;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{Enclosure, PrecisionConfig, Real, WideningPolicy};
