//! Finite-sample tail approximations for autoregressive processes driven by
//! heavy-tailed (Student-like) innovations.
//!
//! The empirical autocovariance `n·γ_n(k)` of an AR(p) trajectory, and the
//! one-sided test statistic `n(γ_n(1) − a₀·γ̂_n(0))`, are quadratic forms
//! `εᵀCε` in the innovation vector. Their upper tails behave like
//! `c·t^{−α/2}` when `C` has a positive diagonal entry and like
//! `c·t^{−α}·log t` when the largest diagonal entry vanishes. This crate
//! builds the matrices, classifies the regime, computes the coefficients,
//! maps the AR(2) parameter plane, and checks everything against a
//! reproducible Monte Carlo simulation.
//!
//! Modules:
//! - [`dist`]: Student and Gaussian distributions, tail constants, quantile
//!   asymptotics.
//! - [`quadform`]: AR(p) trajectory matrices and quadratic forms.
//! - [`tail`]: tail regime classification and asymptotic coefficients.
//! - [`ar2`]: AR(2) parameter-plane regions and stability.
//! - [`monte_carlo`]: deterministic parallel simulation of empirical tails.
//! - [`cli`]: the `heavytail` command-line front end.

pub mod ar2;
pub mod cli;
pub mod dist;
mod error;
pub mod monte_carlo;
pub mod quadform;
pub mod tail;

pub use error::{Error, Result};

pub use ar2::{Ar2Point, RegionReport};
pub use dist::StudentLaw;
pub use monte_carlo::{McConfig, McEstimate, Statistic, TGrid};
pub use quadform::{ArModel, QuadForm};
pub use tail::{DegeneracyClass, Regime, TailLaw};

/// Geometric power sum `1 + x + x² + … + x^{terms−1}`; zero when `terms == 0`.
///
/// Evaluated by Horner's rule so that `x = 1` yields exactly `terms`.
pub(crate) fn power_sum(x: f64, terms: usize) -> f64 {
    (0..terms).fold(0.0, |acc, _| acc * x + 1.0)
}
