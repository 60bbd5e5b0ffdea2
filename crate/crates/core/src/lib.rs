//! Numerical companion for limit-set approximation of dynamical systems.
//!
//! The crate is organised around four layers:
//!
//! * [`dynamics`]: flows on compact metric spaces, orbit sampling, set
//!   distances, `(ε, s)`-chain search and pseudo-trajectory defects.
//! * [`measure`]: atomic measures on the punctured plane in log-polar
//!   coordinates, the growth class `M[ρ, σ]`, the scaling flow and a
//!   truncated Fréchet metric built from separable bump test functions.
//! * [`periodization`]: truncation to a fundamental annulus, periodic
//!   extension under the scaling flow and the convergence experiments.
//! * [`embedding`]: a Keller-type map of a compact flow into positive circle
//!   measures, Gaussian smoothing along trajectories and the equivariance
//!   and injectivity checks of the resulting cylinder measures.
//!
//! [`systems`] holds the concrete presets (irrational torus rotation and the
//! two-mass measure).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod embedding;
mod error;
pub mod measure;
pub mod periodization;
pub mod systems;

pub use error::{Error, Result};

pub(crate) mod fmt {
    /// Formats a float with 17 significant digits, locale independent.
    pub fn float17(x: f64) -> String {
        format!("{x:.16e}")
    }
}
