//! Plant models, geometric integrators and the coupled plant/observer
//! simulation loop.

mod input;
mod integrate;
mod simulate;

use alloc::vec::Vec;

pub use input::InputSignal;
pub use integrate::{integrate_step, step_bundle, Bundle, IntegratorConfig, Scheme};
pub use simulate::{
    max_membership_defect, simulate, simulate_commutator_pair, CommutatorTrace, ErrorNorms,
    InitialState, Scenario, SimRecord, Trajectory,
};

use crate::eigen::{eigenvalues, Eigenvalue};
use crate::group::AlgebraElement;
use crate::observer::{ChainState, ObserverGains};
use crate::{Error, NumericOptions, Result, SquareMatrix};

/// Chain plant `Ẋ = X x₂, ẋ₂ = x₃, …, ẋ_d = u`; for `d = 1` simply `Ẋ = Xu`.
pub fn plant_rhs(state: &ChainState, u: &AlgebraElement) -> Result<Vec<SquareMatrix>> {
    let n = state.family().dim();
    if u.mat().dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.mat().dim(),
        });
    }
    if u.family() != state.family() {
        return Err(Error::FamilyMismatch);
    }
    let mut out = Vec::with_capacity(state.order());
    let velocity = state.algebra.first().map_or(u.mat(), |x2| x2.mat());
    out.push(state.group.mat() * velocity);
    for i in 1..state.algebra.len() {
        out.push(state.algebra[i].mat().clone());
    }
    if !state.algebra.is_empty() {
        out.push(u.mat().clone());
    }
    Ok(out)
}

/// Eigenvalues of the linearized log-coordinate error system of the
/// partial-state observer: the block companion matrix `C ⊗ Iₙ`, whose
/// spectrum is every root of `p(s)` repeated `n` times.
pub fn linearization_spectrum(gains: &ObserverGains, n: usize) -> Result<Vec<Eigenvalue>> {
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let c = gains.companion();
    let d = gains.order();
    let block = SquareMatrix::from_fn(d * n, |i, j| {
        if i % n == j % n {
            c[(i / n, j / n)]
        } else {
            0.0
        }
    });
    eigenvalues(&block, &NumericOptions::default())
}
