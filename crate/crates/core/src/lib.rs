//! Exact and floating-point computation of the coupon collector's
//! distribution, cross-checked across independent routes.
//!
//! - [`numeric`]: exact rationals and combinatorial scalars
//! - [`stirling`]: Stirling numbers of the second kind
//! - [`distribution`]: `P(X_n = k)` by the master equation and closed forms
//! - [`genfun`]: generating polynomials `g_n(y)` and the bivariate EGF
//! - [`montecarlo`]: seeded simulation and goodness-of-fit
//! - [`verify`]: the cross-route equivalence suite
//! - [`cli`]: command-line entry point

pub mod cli;
pub mod distribution;
pub mod error;
pub mod genfun;
pub mod montecarlo;
pub mod numeric;
pub mod oracle;
pub mod output;
pub mod rng;
pub mod stirling;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::Rational;
