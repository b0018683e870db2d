//! Matrix logarithms.
//!
//! [`mat_log_principal`] handles the whole principal domain (no eigenvalue
//! on the closed negative real axis) by inverse scaling and squaring: the
//! argument is replaced by repeated principal square roots until it lies in
//! `B(Iₙ, 0.5)`, the Mercator series is summed there, and the result is
//! multiplied back by `2ᵏ`. The plain series ([`mat_log_series`]) and
//! Gregory's series ([`mat_log_gregory`]) are exposed as independent routes.

use alloc::format;

use crate::eigen::spectrum_report;
use crate::matrix::{inverse_general, Lu};
use crate::{Error, NumericOptions, Result, SquareMatrix};

/// Square roots are taken until `‖X − Iₙ‖` drops to this radius.
const SERIES_RADIUS: f64 = 0.5;
const MAX_SQUARE_ROOTS: usize = 64;

pub fn mat_log_principal(x: &SquareMatrix) -> Result<SquareMatrix> {
    mat_log_principal_with(x, &NumericOptions::default())
}

pub fn mat_log_principal_with(x: &SquareMatrix, opts: &NumericOptions) -> Result<SquareMatrix> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    // |λ − 1| ≤ ‖X − I‖ < 1 already keeps the spectrum in the right half plane
    if !identity_distance_below(x, 1.0) {
        let report = spectrum_report(x, opts)?;
        if report.has_nonpositive_real_eigenvalue {
            return Err(Error::BranchCutViolation {
                spectrum: report.eigenvalues,
            });
        }
    }
    let mut root = x.clone();
    let mut k = 0usize;
    while !identity_distance_at_most(&root, SERIES_RADIUS) {
        if k == MAX_SQUARE_ROOTS {
            return Err(Error::NonConvergence {
                what: "inverse scaling and squaring",
                iterations: k,
            });
        }
        root = sqrtm_denman_beavers(&root, opts)?;
        k += 1;
    }
    let log = mercator_series(&root, opts)?;
    Ok(log.scale(libm::ldexp(1.0, k as i32)))
}

// The Frobenius norm bounds the 2-norm from above and is far cheaper.
fn identity_distance_below(x: &SquareMatrix, r: f64) -> bool {
    let d = x - &SquareMatrix::identity(x.dim());
    d.frobenius_norm() < r || d.operator_norm() < r
}

fn identity_distance_at_most(x: &SquareMatrix, r: f64) -> bool {
    let d = x - &SquareMatrix::identity(x.dim());
    d.frobenius_norm() <= r || d.operator_norm() <= r
}

/// `log(X) = Σ (−1)ᵏ⁺¹ (X − Iₙ)ᵏ / k`, valid for `‖X − Iₙ‖ < 1`.
pub fn mat_log_series(x: &SquareMatrix, opts: &NumericOptions) -> Result<SquareMatrix> {
    let dist = x.distance_to_identity();
    if dist >= 1.0 {
        return Err(Error::domain(format!(
            "logarithm series needs ‖X − I‖ < 1, got {dist}"
        )));
    }
    mercator_series(x, opts)
}

fn mercator_series(x: &SquareMatrix, opts: &NumericOptions) -> Result<SquareMatrix> {
    let n = x.dim();
    let m = x - &SquareMatrix::identity(n);
    let mut power = m.clone();
    let mut sum = m.clone();
    if m.max_abs() == 0.0 {
        return Ok(sum);
    }
    for k in 2..=opts.max_iter {
        power = &power * &m;
        let term = power.scale(if k % 2 == 0 { -1.0 / k as f64 } else { 1.0 / k as f64 });
        sum += &term;
        if term.frobenius_norm() <= opts.tol * sum.frobenius_norm() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "logarithm series",
        iterations: opts.max_iter,
    })
}

/// Gregory's series `log(X) = 2 Σ Z²ʲ⁺¹ / (2j + 1)` with
/// `Z = (X − Iₙ)(X + Iₙ)⁻¹`; converges when every eigenvalue of `X` has a
/// positive real part.
pub fn mat_log_gregory(x: &SquareMatrix, opts: &NumericOptions) -> Result<SquareMatrix> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let report = spectrum_report(x, opts)?;
    if let Some(bad) = report.eigenvalues.iter().find(|e| e.re <= 0.0) {
        return Err(Error::domain(format!(
            "Gregory series needs eigenvalues with positive real part, found {} {:+}i",
            bad.re, bad.im
        )));
    }
    let n = x.dim();
    let id = SquareMatrix::identity(n);
    let z = (x - &id).solve_right(&(x + &id))?;
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = z;
    if sum.max_abs() == 0.0 {
        return Ok(sum);
    }
    for j in 1..opts.max_iter {
        power = &power * &z2;
        let term = power.scale(1.0 / (2 * j + 1) as f64);
        sum += &term;
        if term.frobenius_norm() <= opts.tol * sum.frobenius_norm() {
            return Ok(sum.scale(2.0));
        }
    }
    Err(Error::NonConvergence {
        what: "Gregory series",
        iterations: opts.max_iter,
    })
}

/// Principal square root by the Denman–Beavers iteration
/// `Y ← (Y + Z⁻¹)/2`, `Z ← (Z + Y⁻¹)/2` from `Y = X`, `Z = Iₙ`.
pub fn sqrtm_denman_beavers(x: &SquareMatrix, opts: &NumericOptions) -> Result<SquareMatrix> {
    let n = x.dim();
    let mut y = x.clone();
    let mut z = SquareMatrix::identity(n);
    for _ in 0..opts.max_iter {
        let y_inv = inverse_general(&y)?;
        let z_inv = Lu::factor(&z)?.inverse();
        let y_next = (&y + &z_inv).scale(0.5);
        let z_next = (&z + &y_inv).scale(0.5);
        let step = (&y_next - &y).frobenius_norm();
        y = y_next;
        z = z_next;
        if step <= opts.tol * y.frobenius_norm() {
            return Ok(y);
        }
    }
    Err(Error::NonConvergence {
        what: "Denman-Beavers square root",
        iterations: opts.max_iter,
    })
}
