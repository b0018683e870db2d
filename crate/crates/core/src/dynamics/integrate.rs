use alloc::format;
use alloc::vec::Vec;

use crate::expm::mat_exp;
use crate::group::{project_algebra, project_to_group, AlgebraElement, GroupElement, GroupFamily};
use crate::matrix::commutator;
use crate::observer::ChainState;
use crate::{Error, Result, SquareMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// `X ← X·exp(dt·X⁻¹Ẋ)`, first order.
    LieEuler,
    /// Fourth-order Runge–Kutta–Munthe-Kaas in the algebra.
    #[default]
    Rkmk4,
    /// Classical RK4 on the matrix entries, then reprojection onto the group.
    Rk4Project,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::LieEuler, Scheme::Rkmk4, Scheme::Rk4Project];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::LieEuler => "lie_euler",
            Scheme::Rkmk4 => "rkmk4",
            Scheme::Rk4Project => "rk4_project",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    /// Stopping tolerance of the reprojection used by [`Scheme::Rk4Project`].
    pub reproject_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            scheme: Scheme::Rkmk4,
            dt: 1e-3,
            reproject_tol: 1e-12,
        }
    }
}

impl IntegratorConfig {
    pub fn with_scheme(scheme: Scheme, dt: f64) -> Self {
        IntegratorConfig {
            scheme,
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::ScenarioInvalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.reproject_tol > 0.0) {
            return Err(Error::ScenarioInvalid(format!(
                "reprojection tolerance must be positive, got {}",
                self.reproject_tol
            )));
        }
        Ok(())
    }
}

/// A product state of group-valued and vector-space-valued slots, or the
/// derivative of one (same layout, group slots holding `Ẋ`).
#[derive(Clone, Debug, PartialEq)]
pub struct Bundle {
    pub groups: Vec<SquareMatrix>,
    pub vectors: Vec<SquareMatrix>,
}

fn axpy(x: &[SquareMatrix], h: f64, v: &[SquareMatrix]) -> Vec<SquareMatrix> {
    x.iter().zip(v).map(|(x, v)| x.add_scaled(h, v)).collect()
}

fn check_layout(state: &Bundle, rate: &Bundle) -> Result<()> {
    if state.groups.len() != rate.groups.len() || state.vectors.len() != rate.vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: state.groups.len() + state.vectors.len(),
            found: rate.groups.len() + rate.vectors.len(),
        });
    }
    Ok(())
}

struct Stage {
    /// `X⁻¹Ẋ`, projected onto the algebra.
    body: Vec<SquareMatrix>,
    vectors: Vec<SquareMatrix>,
}

fn evaluate<F>(families: &[GroupFamily], t: f64, at: &Bundle, rhs: &mut F) -> Result<Stage>
where
    F: FnMut(f64, &Bundle) -> Result<Bundle>,
{
    let rate = rhs(t, at)?;
    check_layout(at, &rate)?;
    let body = at
        .groups
        .iter()
        .zip(&rate.groups)
        .zip(families)
        .map(|((x, v), &f)| Ok(project_algebra(&x.solve_left(v)?, f)?.into_matrix()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Stage {
        body,
        vectors: rate.vectors,
    })
}

fn advance(groups: &[SquareMatrix], omegas: &[SquareMatrix], scale: f64) -> Result<Vec<SquareMatrix>> {
    groups
        .iter()
        .zip(omegas)
        .map(|(x, w)| Ok(x * &mat_exp(&w.scale(scale))?))
        .collect()
}

/// `dexp⁻¹_{−Ω}(A)` truncated after the third term, enough for order four.
fn dexpinv(omega: &SquareMatrix, a: &SquareMatrix) -> Result<SquareMatrix> {
    let c = commutator(omega, a)?;
    let cc = commutator(omega, &c)?;
    Ok(a.add_scaled(0.5, &c).add_scaled(1.0 / 12.0, &cc))
}

fn rkmk4<F>(state: &Bundle, families: &[GroupFamily], t: f64, h: f64, rhs: &mut F) -> Result<Bundle>
where
    F: FnMut(f64, &Bundle) -> Result<Bundle>,
{
    let s1 = evaluate(families, t, state, rhs)?;
    let k1: Vec<_> = s1.body.iter().map(|a| a.scale(h)).collect();

    let y2 = Bundle {
        groups: advance(&state.groups, &k1, 0.5)?,
        vectors: axpy(&state.vectors, 0.5 * h, &s1.vectors),
    };
    let s2 = evaluate(families, t + 0.5 * h, &y2, rhs)?;
    let k2 = k1
        .iter()
        .zip(&s2.body)
        .map(|(k, a)| Ok(dexpinv(&k.scale(0.5), a)?.scale(h)))
        .collect::<Result<Vec<_>>>()?;

    let y3 = Bundle {
        groups: advance(&state.groups, &k2, 0.5)?,
        vectors: axpy(&state.vectors, 0.5 * h, &s2.vectors),
    };
    let s3 = evaluate(families, t + 0.5 * h, &y3, rhs)?;
    let k3 = k2
        .iter()
        .zip(&s3.body)
        .map(|(k, a)| Ok(dexpinv(&k.scale(0.5), a)?.scale(h)))
        .collect::<Result<Vec<_>>>()?;

    let y4 = Bundle {
        groups: advance(&state.groups, &k3, 1.0)?,
        vectors: axpy(&state.vectors, h, &s3.vectors),
    };
    let s4 = evaluate(families, t + h, &y4, rhs)?;
    let k4 = k3
        .iter()
        .zip(&s4.body)
        .map(|(k, a)| Ok(dexpinv(k, a)?.scale(h)))
        .collect::<Result<Vec<_>>>()?;

    let omega: Vec<_> = (0..k1.len())
        .map(|i| {
            k1[i]
                .add_scaled(2.0, &k2[i])
                .add_scaled(2.0, &k3[i])
                .add_scaled(1.0, &k4[i])
        })
        .collect();
    let vectors = (0..state.vectors.len())
        .map(|i| {
            let slope = s1.vectors[i]
                .add_scaled(2.0, &s2.vectors[i])
                .add_scaled(2.0, &s3.vectors[i])
                .add_scaled(1.0, &s4.vectors[i]);
            state.vectors[i].add_scaled(h / 6.0, &slope)
        })
        .collect();
    Ok(Bundle {
        groups: advance(&state.groups, &omega, 1.0 / 6.0)?,
        vectors,
    })
}

fn lie_euler<F>(state: &Bundle, families: &[GroupFamily], t: f64, h: f64, rhs: &mut F) -> Result<Bundle>
where
    F: FnMut(f64, &Bundle) -> Result<Bundle>,
{
    let s = evaluate(families, t, state, rhs)?;
    Ok(Bundle {
        groups: advance(&state.groups, &s.body, h)?,
        vectors: axpy(&state.vectors, h, &s.vectors),
    })
}

fn rk4_project<F>(
    state: &Bundle,
    families: &[GroupFamily],
    t: f64,
    h: f64,
    tol: f64,
    rhs: &mut F,
) -> Result<Bundle>
where
    F: FnMut(f64, &Bundle) -> Result<Bundle>,
{
    let shifted = |rate: &Bundle, c: f64| Bundle {
        groups: axpy(&state.groups, c, &rate.groups),
        vectors: axpy(&state.vectors, c, &rate.vectors),
    };
    let d1 = rhs(t, state)?;
    check_layout(state, &d1)?;
    let d2 = rhs(t + 0.5 * h, &shifted(&d1, 0.5 * h))?;
    check_layout(state, &d2)?;
    let d3 = rhs(t + 0.5 * h, &shifted(&d2, 0.5 * h))?;
    check_layout(state, &d3)?;
    let d4 = rhs(t + h, &shifted(&d3, h))?;
    check_layout(state, &d4)?;
    let combine = |x: &[SquareMatrix], a: &[SquareMatrix], b: &[SquareMatrix], c: &[SquareMatrix], d: &[SquareMatrix]| {
        (0..x.len())
            .map(|i| {
                let slope = a[i].add_scaled(2.0, &b[i]).add_scaled(2.0, &c[i]).add_scaled(1.0, &d[i]);
                x[i].add_scaled(h / 6.0, &slope)
            })
            .collect::<Vec<_>>()
    };
    let groups = combine(&state.groups, &d1.groups, &d2.groups, &d3.groups, &d4.groups)
        .iter()
        .zip(families)
        .map(|(x, &f)| project_to_group(x, f, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Bundle {
        groups,
        vectors: combine(&state.vectors, &d1.vectors, &d2.vectors, &d3.vectors, &d4.vectors),
    })
}

/// Advances a [`Bundle`] by one step of `config.dt` from time `t`.
///
/// `families[i]` is the group of `state.groups[i]`. Any error raised on the
/// way, including by `rhs`, comes back as [`Error::StepFailure`] at `t`.
pub fn step_bundle<F>(
    state: &Bundle,
    families: &[GroupFamily],
    t: f64,
    config: &IntegratorConfig,
    mut rhs: F,
) -> Result<Bundle>
where
    F: FnMut(f64, &Bundle) -> Result<Bundle>,
{
    if families.len() != state.groups.len() {
        return Err(Error::DimensionMismatch {
            expected: state.groups.len(),
            found: families.len(),
        });
    }
    let h = config.dt;
    let next = match config.scheme {
        Scheme::LieEuler => lie_euler(state, families, t, h, &mut rhs),
        Scheme::Rkmk4 => rkmk4(state, families, t, h, &mut rhs),
        Scheme::Rk4Project => rk4_project(state, families, t, h, config.reproject_tol, &mut rhs),
    }
    .map_err(|e| Error::step_failure(t, e))?;
    if next.groups.iter().chain(&next.vectors).any(|m| !m.is_finite()) {
        return Err(Error::step_failure(t, Error::NonFinite));
    }
    Ok(next)
}

/// One integrator step of a [`ChainState`] under `rhs`, which returns one
/// derivative per slot (group slot first).
pub fn integrate_step<F>(
    state: &ChainState,
    mut rhs: F,
    t: f64,
    config: &IntegratorConfig,
) -> Result<ChainState>
where
    F: FnMut(f64, &ChainState) -> Result<Vec<SquareMatrix>>,
{
    let family = state.family();
    let bundle = Bundle {
        groups: alloc::vec![state.group.mat().clone()],
        vectors: state.algebra.iter().map(|a| a.mat().clone()).collect(),
    };
    let next = step_bundle(&bundle, &[family], t, config, |t, b| {
        let chain = chain_from_bundle(family, b, 0, 0, b.vectors.len());
        let mut slots = rhs(t, &chain)?;
        if slots.len() != chain.order() {
            return Err(Error::DimensionMismatch {
                expected: chain.order(),
                found: slots.len(),
            });
        }
        let vectors = slots.split_off(1);
        Ok(Bundle { groups: slots, vectors })
    })?;
    Ok(chain_from_bundle(family, &next, 0, 0, next.vectors.len()))
}

/// Reads a chain out of a bundle: group slot `g`, algebra slots
/// `vectors[v..v + len]`.
pub(crate) fn chain_from_bundle(family: GroupFamily, b: &Bundle, g: usize, v: usize, len: usize) -> ChainState {
    ChainState {
        group: GroupElement::trusted(family, b.groups[g].clone()),
        algebra: b.vectors[v..v + len]
            .iter()
            .map(|m| AlgebraElement::trusted(family, m.clone()))
            .collect(),
    }
}
