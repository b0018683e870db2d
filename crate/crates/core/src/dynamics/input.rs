use alloc::format;
use alloc::vec::Vec;

use crate::group::{algebra_defect, skew3, AlgebraElement, GroupFamily, CONSTRUCTED_TOL};
use crate::{Error, Result, SquareMatrix};

/// Plant input `u(t)`, or the top of the chain for `d ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSignal {
    Zero,
    Constant(SquareMatrix),
    /// `[[0, −2 sin t, cos t], [2 sin t, 0, −sin t], [−cos t, sin t, 0]]`;
    /// needs `n = 3`.
    Sinusoid,
    /// Piecewise-linear through the knots, held constant outside them.
    Tabulated(Vec<(f64, SquareMatrix)>),
}

impl InputSignal {
    pub fn name(&self) -> &'static str {
        match self {
            InputSignal::Zero => "zero",
            InputSignal::Constant(_) => "constant",
            InputSignal::Sinusoid => "sinusoid",
            InputSignal::Tabulated(_) => "tabulated",
        }
    }

    /// Checks that every value the signal can produce lies in the algebra.
    pub fn validate(&self, family: GroupFamily) -> Result<()> {
        let check = |m: &SquareMatrix| -> Result<()> {
            if m.dim() != family.dim() {
                return Err(Error::ScenarioInvalid(format!(
                    "input is {}x{}, family {family} needs {}x{}",
                    m.dim(),
                    m.dim(),
                    family.dim(),
                    family.dim()
                )));
            }
            let defect = algebra_defect(m, family)?;
            if defect > CONSTRUCTED_TOL * m.max_abs().max(1.0) {
                return Err(Error::ScenarioInvalid(format!(
                    "input value is off the algebra of {family} by {defect}"
                )));
            }
            Ok(())
        };
        match self {
            InputSignal::Zero => Ok(()),
            InputSignal::Constant(m) => check(m),
            InputSignal::Sinusoid if family.dim() == 3 => Ok(()),
            InputSignal::Sinusoid => Err(Error::ScenarioInvalid(format!(
                "the sinusoidal input is 3x3, {family} is not"
            ))),
            InputSignal::Tabulated(knots) => {
                if knots.is_empty() {
                    return Err(Error::ScenarioInvalid("tabulated input has no knots".into()));
                }
                if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::ScenarioInvalid(
                        "tabulated input times must be strictly increasing".into(),
                    ));
                }
                if knots.iter().any(|(t, _)| !t.is_finite()) {
                    return Err(Error::ScenarioInvalid("tabulated input times must be finite".into()));
                }
                knots.iter().try_for_each(|(_, m)| check(m))
            }
        }
    }

    /// `u(t)` for a signal already accepted by [`InputSignal::validate`].
    pub fn eval(&self, t: f64, family: GroupFamily) -> AlgebraElement {
        match self {
            InputSignal::Zero => AlgebraElement::zero(family),
            InputSignal::Constant(m) => AlgebraElement::trusted(family, m.clone()),
            InputSignal::Sinusoid => {
                let s = libm::sin(t);
                AlgebraElement::trusted(family, skew3([s, libm::cos(t), 2.0 * s]).into_matrix())
            }
            InputSignal::Tabulated(knots) => {
                let i = knots.partition_point(|(tk, _)| *tk <= t);
                let m = if i == 0 {
                    knots[0].1.clone()
                } else if i == knots.len() {
                    knots[i - 1].1.clone()
                } else {
                    let (t0, m0) = &knots[i - 1];
                    let (t1, m1) = &knots[i];
                    let w = (t - t0) / (t1 - t0);
                    m0.scale(1.0 - w).add_scaled(w, m1)
                };
                AlgebraElement::trusted(family, m)
            }
        }
    }
}
