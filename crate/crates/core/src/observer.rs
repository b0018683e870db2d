//! Local full-state (LFSO) and partial-state (LPSO) observers.
//!
//! Every observer is a pure map from the current estimate, the measurement
//! `Y` and the input `u` to the estimate's time derivative. All of them share
//! the innovation `−a X̂ log(Y⁻¹X̂)`; passive and direct variants differ in the
//! synchronization term (`X̂u` versus `YuY⁻¹X̂`).

use alloc::format;
use alloc::vec::Vec;

use crate::eigen::{eigenvalues, Eigenvalue};
use crate::group::{
    angle_from_trace, antisymmetric_part, log_so3_closed_form, theta_over_sin, AlgebraElement,
    GroupElement, GroupFamily,
};
use crate::logm::mat_log_principal;
use crate::matrix::Lu;
use crate::{Error, NumericOptions, Result, SquareMatrix};

/// Roots must satisfy `Re(s) < −HURWITZ_MARGIN`.
pub const HURWITZ_MARGIN: f64 = 1e-12;

/// Coefficients `a₀ … a_{d−1}` of `p(s) = sᵈ + a_{d−1}sᵈ⁻¹ + … + a₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObserverGains(Vec<f64>);

impl ObserverGains {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::GainsInvalid("at least one coefficient is required".into()));
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::GainsInvalid("coefficients must be finite".into()));
        }
        Ok(ObserverGains(coefficients))
    }

    /// Single gain `a₀` of a full-state observer.
    pub fn full_state(a0: f64) -> Result<Self> {
        Self::new(alloc::vec![a0])
    }

    /// Chain length `d`.
    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// `a_i`
    pub fn coefficient(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Companion matrix whose characteristic polynomial is `p(s)`: first
    /// column `−a_{d−1}, …, −a₀`, ones on the superdiagonal.
    pub fn companion(&self) -> SquareMatrix {
        let d = self.order();
        SquareMatrix::from_fn(d, |i, j| {
            if j == 0 {
                -self.0[d - 1 - i]
            } else if j == i + 1 {
                1.0
            } else {
                0.0
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainReport {
    pub hurwitz: bool,
    pub roots: Vec<Eigenvalue>,
}

/// Hurwitz test on the companion matrix of `p(s)`.
pub fn validate_gains(gains: &ObserverGains) -> GainReport {
    match eigenvalues(&gains.companion(), &NumericOptions::default()) {
        Ok(roots) => GainReport {
            hurwitz: roots.iter().all(|r| r.re < -HURWITZ_MARGIN),
            roots,
        },
        Err(_) => GainReport {
            hurwitz: false,
            roots: Vec::new(),
        },
    }
}

/// Group state plus the algebra-valued chain `x₂ … x_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub group: GroupElement,
    pub algebra: Vec<AlgebraElement>,
}

impl ChainState {
    pub fn new(group: GroupElement, algebra: Vec<AlgebraElement>) -> Result<Self> {
        let family = group.family();
        if algebra.iter().any(|a| a.family() != family) {
            return Err(Error::FamilyMismatch);
        }
        Ok(ChainState { group, algebra })
    }

    pub fn full_state(group: GroupElement) -> Self {
        ChainState {
            group,
            algebra: Vec::new(),
        }
    }

    pub fn family(&self) -> GroupFamily {
        self.group.family()
    }

    /// `d`, counting the group slot.
    pub fn order(&self) -> usize {
        1 + self.algebra.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObserverKind {
    LfsoPassive,
    LfsoDirect,
    LpsoPassive,
    LpsoDirect,
}

impl ObserverKind {
    pub const ALL: [ObserverKind; 4] = [
        ObserverKind::LfsoPassive,
        ObserverKind::LfsoDirect,
        ObserverKind::LpsoPassive,
        ObserverKind::LpsoDirect,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ObserverKind::LfsoPassive => "lfso_passive",
            ObserverKind::LfsoDirect => "lfso_direct",
            ObserverKind::LpsoPassive => "lpso_passive",
            ObserverKind::LpsoDirect => "lpso_direct",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn is_full_state(&self) -> bool {
        matches!(self, ObserverKind::LfsoPassive | ObserverKind::LfsoDirect)
    }

    pub fn is_passive(&self) -> bool {
        matches!(self, ObserverKind::LfsoPassive | ObserverKind::LpsoPassive)
    }
}

/// How the innovation logarithm is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogMethod {
    /// General principal logarithm (inverse scaling and squaring).
    #[default]
    Principal,
    /// Closed form `(θ / sin θ) π_a(·)`; SO(3) only, otherwise falls back
    /// to the principal logarithm.
    So3ClosedForm,
}

impl LogMethod {
    pub fn name(&self) -> &'static str {
        match self {
            LogMethod::Principal => "principal",
            LogMethod::So3ClosedForm => "so3_closed_form",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "principal" => Some(LogMethod::Principal),
            "so3_closed_form" => Some(LogMethod::So3ClosedForm),
            _ => None,
        }
    }
}

/// Output error `Y⁻¹X̂` and its logarithm, shared by all observers.
struct Innovation {
    /// `Y⁻¹X̂`
    residual: SquareMatrix,
    log: SquareMatrix,
}

fn innovation(xhat: &GroupElement, y: &GroupElement, method: LogMethod) -> Result<Innovation> {
    if xhat.family() != y.family() {
        return Err(Error::FamilyMismatch);
    }
    let residual = Lu::factor(y.mat())?.solve(xhat.mat());
    let log = match method {
        LogMethod::So3ClosedForm if xhat.family().is_so3() => {
            log_so3_closed_form(&GroupElement::trusted(xhat.family(), residual.clone()))?.into_matrix()
        }
        _ => mat_log_principal(&residual)?,
    };
    Ok(Innovation { residual, log })
}

fn check_input(u: &AlgebraElement, family: GroupFamily) -> Result<()> {
    if u.family() != family {
        return Err(Error::FamilyMismatch);
    }
    Ok(())
}

fn require_full_state(gains: &ObserverGains) -> Result<f64> {
    if gains.order() != 1 {
        return Err(Error::GainsInvalid(format!(
            "full-state observers take one gain, got {}",
            gains.order()
        )));
    }
    let a0 = gains.coefficient(0);
    if !(a0 > 0.0) {
        return Err(Error::GainsInvalid(format!("a0 must be positive, got {a0}")));
    }
    Ok(a0)
}

fn full_state_rhs(
    passive: bool,
    xhat: &GroupElement,
    y: &GroupElement,
    u: &AlgebraElement,
    a0: f64,
    method: LogMethod,
) -> Result<SquareMatrix> {
    check_input(u, xhat.family())?;
    let inn = innovation(xhat, y, method)?;
    let sync = if passive {
        xhat.mat() * u.mat()
    } else {
        // Y u Y⁻¹ X̂ = Y u (Y⁻¹X̂)
        &(y.mat() * u.mat()) * &inn.residual
    };
    Ok(sync.add_scaled(-a0, &(xhat.mat() * &inn.log)))
}

/// Passive LFSO: `X̂u − a₀ X̂ log(Y⁻¹X̂)`.
pub fn lfso_passive_rhs(
    xhat: &GroupElement,
    y: &GroupElement,
    u: &AlgebraElement,
    gains: &ObserverGains,
) -> Result<SquareMatrix> {
    let a0 = require_full_state(gains)?;
    full_state_rhs(true, xhat, y, u, a0, LogMethod::Principal)
}

/// Direct LFSO: `YuY⁻¹X̂ − a₀ X̂ log(Y⁻¹X̂)`.
pub fn lfso_direct_rhs(
    xhat: &GroupElement,
    y: &GroupElement,
    u: &AlgebraElement,
    gains: &ObserverGains,
) -> Result<SquareMatrix> {
    let a0 = require_full_state(gains)?;
    full_state_rhs(false, xhat, y, u, a0, LogMethod::Principal)
}

fn require_partial_state(state: &ChainState, gains: &ObserverGains) -> Result<()> {
    let d = gains.order();
    if d < 2 {
        return Err(Error::GainsInvalid(format!(
            "partial-state observers need d >= 2 gains, got {d}"
        )));
    }
    if state.order() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: state.order(),
        });
    }
    let report = validate_gains(gains);
    if !report.hurwitz {
        return Err(Error::GainsInvalid(format!(
            "p(s) is not Hurwitz, roots {:?}",
            report.roots
        )));
    }
    Ok(())
}

fn partial_state_rhs(
    passive: bool,
    state: &ChainState,
    y: &GroupElement,
    u: &AlgebraElement,
    gains: &ObserverGains,
    method: LogMethod,
) -> Result<Vec<SquareMatrix>> {
    check_input(u, state.family())?;
    if state.algebra.iter().any(|x| x.family() != state.family()) {
        return Err(Error::FamilyMismatch);
    }
    let d = gains.order();
    let xhat = &state.group;
    let inn = innovation(xhat, y, method)?;
    let x2 = state.algebra[0].mat();
    let sync = if passive {
        xhat.mat() * x2
    } else {
        &(y.mat() * x2) * &inn.residual
    };
    let mut out = Vec::with_capacity(d);
    out.push(sync.add_scaled(-gains.coefficient(d - 1), &(xhat.mat() * &inn.log)));
    // slot i (2 ≤ i ≤ d) is x̂_{i+1} − a_{d−i} log(Y⁻¹X̂), with x̂_{d+1} := u
    for i in 2..=d {
        let next = if i < d { state.algebra[i - 1].mat() } else { u.mat() };
        out.push(next.add_scaled(-gains.coefficient(d - i), &inn.log));
    }
    Ok(out)
}

/// Direct LPSO: slot 1 is `Y x̂₂ Y⁻¹ X̂ − a_{d−1} X̂ log(Y⁻¹X̂)`, slot `i` is
/// `x̂_{i+1} − a_{d−i} log(Y⁻¹X̂)` and the last slot is `u − a₀ log(Y⁻¹X̂)`.
pub fn lpso_direct_rhs(
    state_hat: &ChainState,
    y: &GroupElement,
    u: &AlgebraElement,
    gains: &ObserverGains,
) -> Result<Vec<SquareMatrix>> {
    require_partial_state(state_hat, gains)?;
    partial_state_rhs(false, state_hat, y, u, gains, LogMethod::Principal)
}

/// Passive LPSO: as [`lpso_direct_rhs`] with slot-1 synchronization `X̂x̂₂`.
pub fn lpso_passive_rhs(
    state_hat: &ChainState,
    y: &GroupElement,
    u: &AlgebraElement,
    gains: &ObserverGains,
) -> Result<Vec<SquareMatrix>> {
    require_partial_state(state_hat, gains)?;
    partial_state_rhs(true, state_hat, y, u, gains, LogMethod::Principal)
}

/// A configured observer: kind, validated gains and logarithm choice.
#[derive(Clone, Debug, PartialEq)]
pub struct Observer {
    kind: ObserverKind,
    gains: ObserverGains,
    log_method: LogMethod,
}

impl Observer {
    pub fn new(kind: ObserverKind, gains: ObserverGains) -> Result<Self> {
        if kind.is_full_state() {
            require_full_state(&gains)?;
        } else {
            if gains.order() < 2 {
                return Err(Error::GainsInvalid(format!(
                    "{} needs d >= 2 gains, got {}",
                    kind.name(),
                    gains.order()
                )));
            }
            let report = validate_gains(&gains);
            if !report.hurwitz {
                return Err(Error::GainsInvalid(format!(
                    "p(s) is not Hurwitz, roots {:?}",
                    report.roots
                )));
            }
        }
        Ok(Observer {
            kind,
            gains,
            log_method: LogMethod::Principal,
        })
    }

    pub fn with_log_method(mut self, method: LogMethod) -> Self {
        self.log_method = method;
        self
    }

    pub fn kind(&self) -> ObserverKind {
        self.kind
    }

    pub fn gains(&self) -> &ObserverGains {
        &self.gains
    }

    pub fn log_method(&self) -> LogMethod {
        self.log_method
    }

    /// Derivatives of every estimate slot, group slot first.
    pub fn rhs(
        &self,
        state_hat: &ChainState,
        y: &GroupElement,
        u: &AlgebraElement,
    ) -> Result<Vec<SquareMatrix>> {
        if state_hat.order() != self.gains.order() {
            return Err(Error::DimensionMismatch {
                expected: self.gains.order(),
                found: state_hat.order(),
            });
        }
        match self.kind {
            ObserverKind::LfsoPassive | ObserverKind::LfsoDirect => Ok(alloc::vec![full_state_rhs(
                self.kind.is_passive(),
                &state_hat.group,
                y,
                u,
                self.gains.coefficient(0),
                self.log_method,
            )?]),
            ObserverKind::LpsoPassive | ObserverKind::LpsoDirect => partial_state_rhs(
                self.kind.is_passive(),
                state_hat,
                y,
                u,
                &self.gains,
                self.log_method,
            ),
        }
    }
}

/// SO(3) full-state observers written with the anti-symmetric projection:
/// `sync − a₀ (θ / sin θ) R̂ π_a(YᵀR̂)`, θ the rotation angle of `YᵀR̂`.
pub fn lfso_rhs_projection_form(
    kind: ObserverKind,
    rhat: &GroupElement,
    y: &GroupElement,
    u: &AlgebraElement,
    a0: f64,
) -> Result<SquareMatrix> {
    if !kind.is_full_state() {
        return Err(Error::domain("projection form exists for full-state observers only"));
    }
    if !rhat.family().is_so3() || y.family() != rhat.family() {
        return Err(Error::domain("projection form is specific to SO(3)"));
    }
    let yt = y.mat().transpose();
    let residual = &yt * rhat.mat();
    let theta = angle_from_trace(residual.trace());
    let sync = if kind.is_passive() {
        rhat.mat() * u.mat()
    } else {
        &(&(y.mat() * u.mat()) * &yt) * rhat.mat()
    };
    let correction = (rhat.mat() * &antisymmetric_part(&residual)).scale(theta_over_sin(theta));
    Ok(sync.add_scaled(-a0, &correction))
}
