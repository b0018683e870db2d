//! Local exponential observers for left-invariant systems on linear Lie groups.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`matrix`], [`eigen`], [`expm`], [`logm`]: dense small-matrix numerics
//!   (exponential, principal logarithm, inverses, spectra).
//! * [`group`]: group and algebra membership, projections, SO(3) closed forms
//!   and the seeded rotation-noise generator.
//! * [`invariant`]: left/right invariant error functions, their log
//!   coordinates and the closed-form solution of `Ė = -a₀ E log E`.
//! * [`observer`]: right-hand sides of the passive/direct full-state and
//!   partial-state observers.
//! * [`dynamics`]: plant models, geometric integrators and the coupled
//!   plant/observer simulation loop.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
pub mod eigen;
mod error;
pub mod expm;
pub mod group;
pub mod invariant;
pub mod logm;
pub mod matrix;
pub mod observer;
pub mod rng;

pub use error::{Error, Result};
pub use matrix::SquareMatrix;

/// Convergence controls shared by the iterative matrix functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericOptions {
    /// Relative stopping tolerance for series and fixed-point iterations.
    pub tol: f64,
    /// Relative term cutoff for the Taylor series inside the exponential.
    pub exp_term_tol: f64,
    /// Iteration cap for every series or iteration.
    pub max_iter: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions {
            tol: 1e-12,
            exp_term_tol: 1e-16,
            max_iter: 200,
        }
    }
}
