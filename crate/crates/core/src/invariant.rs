//! Invariant error functions between a plant state `X` and an estimate `X̂`.
//!
//! `E_l = X⁻¹X̂` is invariant under left translation of both arguments,
//! `E_r = X̂X⁻¹` under right translation, and the two are related by
//! `E_r = Ad_X(E_l)`. Their principal logarithms give algebra-valued
//! coordinates in which the matched observer error dynamics are linear.

use alloc::format;
use alloc::vec::Vec;

use crate::expm::mat_exp;
use crate::group::{AlgebraElement, GroupElement};
use crate::logm::mat_log_principal;
use crate::{Error, Result};

/// Values at or below this floor cannot enter a log-linear fit.
pub const DECAY_FIT_FLOOR: f64 = 1e-13;
pub const DECAY_FIT_MIN_SAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorPair {
    pub left: GroupElement,
    pub right: GroupElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogErrorPair {
    pub left: AlgebraElement,
    pub right: AlgebraElement,
}

fn same_family(a: &GroupElement, b: &GroupElement) -> Result<()> {
    if a.family() != b.family() {
        return Err(Error::FamilyMismatch);
    }
    Ok(())
}

/// `E_l(X, X̂) = X⁻¹X̂`
pub fn left_error(x: &GroupElement, xhat: &GroupElement) -> Result<GroupElement> {
    same_family(x, xhat)?;
    Ok(GroupElement::trusted(x.family(), x.mat().solve_left(xhat.mat())?))
}

/// `E_r(X, X̂) = X̂X⁻¹`
pub fn right_error(x: &GroupElement, xhat: &GroupElement) -> Result<GroupElement> {
    same_family(x, xhat)?;
    Ok(GroupElement::trusted(x.family(), xhat.mat().solve_right(x.mat())?))
}

pub fn error_pair(x: &GroupElement, xhat: &GroupElement) -> Result<ErrorPair> {
    Ok(ErrorPair {
        left: left_error(x, xhat)?,
        right: right_error(x, xhat)?,
    })
}

/// Principal logarithm of a group-valued error.
pub fn log_error(e: &GroupElement) -> Result<AlgebraElement> {
    Ok(AlgebraElement::trusted(e.family(), mat_log_principal(e.mat())?))
}

impl ErrorPair {
    pub fn logs(&self) -> Result<LogErrorPair> {
        Ok(LogErrorPair {
            left: log_error(&self.left)?,
            right: log_error(&self.right)?,
        })
    }
}

/// `e = x − x̂` for algebra-valued chain states.
pub fn algebra_error(x: &AlgebraElement, xhat: &AlgebraElement) -> Result<AlgebraElement> {
    if x.family() != xhat.family() {
        return Err(Error::FamilyMismatch);
    }
    Ok(AlgebraElement::trusted(x.family(), x.mat() - xhat.mat()))
}

/// Exact solution `E(t) = exp(exp(−a₀t) log E₀)` of `Ė = −a₀ E log E`,
/// valid when `‖log E₀‖ < log 2`.
pub fn closed_form_error_solution(e0: &GroupElement, a0: f64, t: f64) -> Result<GroupElement> {
    if !(a0 > 0.0) {
        return Err(Error::domain(format!("gain a0 must be positive, got {a0}")));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    let l0 = mat_log_principal(e0.mat())?;
    let norm = l0.operator_norm();
    if norm >= core::f64::consts::LN_2 {
        return Err(Error::domain(format!(
            "closed-form solution needs ‖log E0‖ < log 2, got {norm}"
        )));
    }
    let decayed = l0.scale(libm::exp(-a0 * t));
    Ok(GroupElement::trusted(e0.family(), mat_exp(&decayed)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    /// Least-squares slope of `ln(value)` against `t`.
    pub rate: f64,
    pub r_squared: f64,
    pub samples_used: usize,
}

/// Least-squares fit of `ln(value) = c + rate · t`.
pub fn decay_rate_fit(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if samples.len() < DECAY_FIT_MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "need at least {DECAY_FIT_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(t, v)) = samples.iter().find(|&&(_, v)| !(v > DECAY_FIT_FLOOR)) {
        return Err(Error::InsufficientData(format!(
            "sample at t = {t} has value {v} at or below the floor {DECAY_FIT_FLOOR}"
        )));
    }
    let n = samples.len() as f64;
    let points: Vec<(f64, f64)> = samples.iter().map(|&(t, v)| (t, libm::log(v))).collect();
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in &points {
        stt += (t - mean_t) * (t - mean_t);
        sty += (t - mean_t) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if stt == 0.0 {
        return Err(Error::InsufficientData("all samples share one time stamp".into()));
    }
    let rate = sty / stt;
    let intercept = mean_y - rate * mean_t;
    let ss_res: f64 = points
        .iter()
        .map(|&(t, y)| {
            let r = y - (intercept + rate * t);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DecayFit {
        rate,
        r_squared,
        samples_used: samples.len(),
    })
}

/// [`decay_rate_fit`] after discarding the leading 10% of samples, which
/// carry the transient of the higher-order terms.
pub fn decay_rate_fit_windowed(samples: &[(f64, f64)]) -> Result<DecayFit> {
    let skip = samples.len() / 10;
    decay_rate_fit(&samples[skip..])
}
