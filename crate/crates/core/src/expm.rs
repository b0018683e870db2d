//! Matrix exponential by scaling and squaring around a truncated Taylor
//! series.

use crate::{Error, NumericOptions, Result, SquareMatrix};

/// Scaled argument norm the Taylor series is evaluated at.
const SCALED_NORM: f64 = 0.5;
/// Beyond this many squarings the input is treated as pathological.
const MAX_SQUARINGS: u32 = 1000;

pub fn mat_exp(a: &SquareMatrix) -> Result<SquareMatrix> {
    mat_exp_with(a, &NumericOptions::default())
}

/// `exp(A) = Σ Aᵏ/k!`. The argument is scaled by `2⁻ˢ` until its Frobenius
/// norm (an upper bound on the 2-norm) is at most 0.5, the series is summed
/// until the term norm drops below `exp_term_tol` times the partial sum,
/// and the result is squared `s` times.
pub fn mat_exp_with(a: &SquareMatrix, opts: &NumericOptions) -> Result<SquareMatrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let norm = a.frobenius_norm();
    let mut squarings = 0u32;
    if norm > SCALED_NORM {
        let s = libm::ceil(libm::log2(norm / SCALED_NORM));
        if !(s < MAX_SQUARINGS as f64) {
            return Err(Error::NonConvergence {
                what: "matrix exponential scaling",
                iterations: MAX_SQUARINGS as usize,
            });
        }
        squarings = s as u32;
    }
    let scaled = a.scale(libm::ldexp(1.0, -(squarings as i32)));
    let mut sum = SquareMatrix::identity(n);
    let mut term = SquareMatrix::identity(n);
    let mut converged = false;
    for k in 1..=opts.max_iter {
        term = (&term * &scaled).scale(1.0 / k as f64);
        sum += &term;
        let t = term.frobenius_norm();
        if t <= opts.exp_term_tol * sum.frobenius_norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "matrix exponential Taylor series",
            iterations: opts.max_iter,
        });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !sum.is_finite() {
        return Err(Error::NonConvergence {
            what: "matrix exponential squaring",
            iterations: squarings as usize,
        });
    }
    Ok(sum)
}
