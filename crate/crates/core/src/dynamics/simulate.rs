use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::input::InputSignal;
use super::integrate::{chain_from_bundle, step_bundle, Bundle, IntegratorConfig};
use super::plant_rhs;
use crate::group::{
    algebra_defect, is_in_group, membership_defect, project_to_group, random_rotation,
    AlgebraElement, GroupElement, GroupFamily, DATA_TOL,
};
use crate::invariant::{left_error, right_error};
use crate::logm::mat_log_principal;
use crate::observer::{ChainState, LogMethod, Observer, ObserverGains, ObserverKind};
use crate::rng::NormalSampler;
use crate::{Error, Result, SquareMatrix};

/// Raw initial values: group slot first, then `x₂ … x_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialState {
    pub group: SquareMatrix,
    pub algebra: Vec<SquareMatrix>,
}

impl InitialState {
    pub fn full_state(group: SquareMatrix) -> Self {
        InitialState {
            group,
            algebra: Vec::new(),
        }
    }
}

/// Declarative description of one plant/observer simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub family: GroupFamily,
    pub observer: ObserverKind,
    pub gains: ObserverGains,
    pub plant: InitialState,
    pub estimate: InitialState,
    pub input: InputSignal,
    /// Standard deviation of each rotation-vector component of the noise.
    pub noise_sigma: f64,
    pub seed: Option<u64>,
    pub integrator: IntegratorConfig,
    pub t_end: f64,
    pub output_period: f64,
    pub log_method: LogMethod,
}

/// Scenario after validation, with initial conditions on the group.
#[derive(Clone, Debug)]
struct Prepared {
    observer: Observer,
    plant: ChainState,
    estimate: ChainState,
    steps_per_output: usize,
    outputs: usize,
    ic_projection_defect: f64,
}

fn invalid(msg: String) -> Error {
    Error::ScenarioInvalid(msg)
}

fn prepare_initial(
    which: &str,
    family: GroupFamily,
    d: usize,
    init: &InitialState,
) -> Result<(ChainState, f64)> {
    if init.algebra.len() + 1 != d {
        return Err(invalid(format!(
            "{which} has {} slots, the observer needs d = {d}",
            init.algebra.len() + 1
        )));
    }
    let n = family.dim();
    if init.group.dim() != n || init.algebra.iter().any(|m| m.dim() != n) {
        return Err(invalid(format!("{which} matrices must be {n}x{n}")));
    }
    if !is_in_group(&init.group, family, DATA_TOL)? {
        return Err(invalid(format!(
            "{which} group state is not in {family} at tolerance {DATA_TOL}"
        )));
    }
    let projected = project_to_group(&init.group, family, 1e-13)?;
    let defect = (&projected - &init.group).operator_norm();
    let mut algebra = Vec::with_capacity(d - 1);
    for (i, m) in init.algebra.iter().enumerate() {
        if algebra_defect(m, family)? > DATA_TOL {
            return Err(invalid(format!(
                "{which} slot x{} is not in the algebra of {family}",
                i + 2
            )));
        }
        algebra.push(AlgebraElement::new(family, m.clone(), DATA_TOL)?);
    }
    let group = GroupElement::new(family, projected, DATA_TOL)?;
    Ok((ChainState { group, algebra }, defect))
}

impl Scenario {
    fn prepare(&self) -> Result<Prepared> {
        let observer = Observer::new(self.observer, self.gains.clone())
            .map_err(|e| invalid(format!("{e}")))?
            .with_log_method(self.log_method);
        self.integrator.validate()?;
        self.input.validate(self.family)?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.output_period > 0.0 && self.output_period.is_finite()) {
            return Err(invalid(format!(
                "output period must be positive, got {}",
                self.output_period
            )));
        }
        let ratio = self.output_period / self.integrator.dt;
        let steps_per_output = libm::round(ratio) as usize;
        if steps_per_output == 0 || (ratio - steps_per_output as f64).abs() > 1e-9 * ratio {
            return Err(invalid(format!(
                "output period {} is not a whole multiple of dt {}",
                self.output_period, self.integrator.dt
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(invalid(format!(
                "noise sigma must be nonnegative, got {}",
                self.noise_sigma
            )));
        }
        if self.noise_sigma > 0.0 {
            if !self.family.is_so3() {
                return Err(invalid(format!(
                    "measurement noise is only modelled on SO(3), not {}",
                    self.family
                )));
            }
            if self.seed.is_none() {
                return Err(invalid("a seed is required when sigma > 0".into()));
            }
        }
        let d = self.gains.order();
        let (plant, p_defect) = prepare_initial("plant", self.family, d, &self.plant)?;
        let (estimate, e_defect) = prepare_initial("estimate", self.family, d, &self.estimate)?;
        Ok(Prepared {
            observer,
            plant,
            estimate,
            steps_per_output,
            outputs: libm::floor(self.t_end / self.output_period + 1e-9) as usize,
            ic_projection_defect: p_defect.max(e_defect),
        })
    }

    /// Checks every scenario invariant without running anything.
    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }

    /// Chain length `d`.
    pub fn order(&self) -> usize {
        self.gains.order()
    }
}

/// Error norms of one record; all are induced 2-norms.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorNorms {
    /// `‖X̂ − X‖`
    pub state: f64,
    /// `‖E_l − I‖`
    pub left: f64,
    /// `‖E_r − I‖`
    pub right: f64,
    /// `‖log E_l‖`, absent when the logarithm is undefined.
    pub log_left: Option<f64>,
    /// `‖log E_r‖`
    pub log_right: Option<f64>,
    /// `‖x̂ᵢ − xᵢ‖` for `i = 2 … d`.
    pub chain: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    pub plant: ChainState,
    pub estimate: ChainState,
    /// Measurement held over the following output interval.
    pub measurement: GroupElement,
    pub norms: ErrorNorms,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub records: Vec<SimRecord>,
    /// Set when a step failed; the records stop at the last good sample.
    pub failure: Option<Error>,
    /// Largest distance moved when snapping the initial matrices onto the group.
    pub ic_projection_defect: f64,
}

impl Trajectory {
    pub fn failure_time(&self) -> Option<f64> {
        match &self.failure {
            Some(Error::StepFailure { time, .. }) => Some(*time),
            _ => None,
        }
    }

    pub fn last(&self) -> Option<&SimRecord> {
        self.records.last()
    }
}

fn error_norms(plant: &ChainState, estimate: &ChainState) -> Result<ErrorNorms> {
    let x = &plant.group;
    let xhat = &estimate.group;
    let el = left_error(x, xhat)?;
    let er = right_error(x, xhat)?;
    let id = SquareMatrix::identity(x.family().dim());
    Ok(ErrorNorms {
        state: (xhat.mat() - x.mat()).operator_norm(),
        left: (el.mat() - &id).operator_norm(),
        right: (er.mat() - &id).operator_norm(),
        log_left: mat_log_principal(el.mat()).ok().map(|l| l.operator_norm()),
        log_right: mat_log_principal(er.mat()).ok().map(|l| l.operator_norm()),
        chain: plant
            .algebra
            .iter()
            .zip(&estimate.algebra)
            .map(|(a, b)| (a.mat() - b.mat()).operator_norm())
            .collect(),
    })
}

/// Runs a scenario.
///
/// The plant and the observer are stepped together so that every observer
/// stage sees `Y = X·N` at the same stage time. `N` is drawn once per output
/// sample and held until the next one; with `σ = 0` the measurement is `X`
/// itself. A failed step ends the run and is reported in
/// [`Trajectory::failure`] rather than as an `Err`.
pub fn simulate(scenario: &Scenario) -> Result<Trajectory> {
    let prep = scenario.prepare()?;
    let family = scenario.family;
    let d = scenario.order();
    let sigma = scenario.noise_sigma;
    let mut sampler = NormalSampler::new(scenario.seed.unwrap_or(0));
    let draw = |sampler: &mut NormalSampler| -> Option<SquareMatrix> {
        (sigma > 0.0).then(|| random_rotation(sigma, sampler).into_matrix())
    };
    let measure = |x: &SquareMatrix, noise: &Option<SquareMatrix>| match noise {
        Some(n) => x * n,
        None => x.clone(),
    };

    let mut bundle = Bundle {
        groups: alloc::vec![prep.plant.group.mat().clone(), prep.estimate.group.mat().clone()],
        vectors: prep
            .plant
            .algebra
            .iter()
            .chain(&prep.estimate.algebra)
            .map(|a| a.mat().clone())
            .collect(),
    };
    let families = [family, family];
    let cfg = scenario.integrator;
    let observer = &prep.observer;
    let input = &scenario.input;

    let record = |t: f64, b: &Bundle, noise: &Option<SquareMatrix>| -> Result<SimRecord> {
        let plant = chain_from_bundle(family, b, 0, 0, d - 1);
        let estimate = chain_from_bundle(family, b, 1, d - 1, d - 1);
        let norms = error_norms(&plant, &estimate)?;
        Ok(SimRecord {
            t,
            measurement: GroupElement::trusted(family, measure(plant.group.mat(), noise)),
            plant,
            estimate,
            norms,
        })
    };

    let mut noise = draw(&mut sampler);
    let mut records = Vec::with_capacity(prep.outputs + 1);
    records.push(record(0.0, &bundle, &noise)?);
    let mut failure = None;
    let mut step_index: usize = 0;
    'outer: for _ in 0..prep.outputs {
        for _ in 0..prep.steps_per_output {
            let t = step_index as f64 * cfg.dt;
            let held = &noise;
            let next = step_bundle(&bundle, &families, t, &cfg, |t, b| {
                let u = input.eval(t, family);
                let plant = chain_from_bundle(family, b, 0, 0, d - 1);
                let estimate = chain_from_bundle(family, b, 1, d - 1, d - 1);
                let y = GroupElement::trusted(family, measure(plant.group.mat(), held));
                let mut p = plant_rhs(&plant, &u)?;
                let mut o = observer.rhs(&estimate, &y, &u)?;
                let p_tail = p.split_off(1);
                let o_tail = o.split_off(1);
                let mut vectors = p_tail;
                vectors.extend(o_tail);
                Ok(Bundle {
                    groups: alloc::vec![p.pop().unwrap(), o.pop().unwrap()],
                    vectors,
                })
            });
            match next {
                Ok(b) => bundle = b,
                Err(e) => {
                    failure = Some(e);
                    break 'outer;
                }
            }
            step_index += 1;
        }
        noise = draw(&mut sampler);
        match record(step_index as f64 * cfg.dt, &bundle, &noise) {
            Ok(r) => records.push(r),
            Err(e) => {
                failure = Some(Error::step_failure(step_index as f64 * cfg.dt, e));
                break;
            }
        }
    }
    Ok(Trajectory {
        records,
        failure,
        ic_projection_defect: prep.ic_projection_defect,
    })
}

/// Group and algebra traces of the commutator systems `Ė = [E, u]` and
/// `ė = [e, u]`, sampled after every step.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorTrace {
    pub times: Vec<f64>,
    pub group: Vec<SquareMatrix>,
    pub algebra: Vec<SquareMatrix>,
}

impl CommutatorTrace {
    /// `max_t ‖log E(t) − e(t)‖`.
    pub fn max_log_discrepancy(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (e_big, e_small) in self.group.iter().zip(&self.algebra) {
            worst = worst.max((&mat_log_principal(e_big)? - e_small).operator_norm());
        }
        Ok(worst)
    }
}

/// Integrates `Ė = Eu − uE` from `E₀` and `ė = eu − ue` from `log E₀`
/// side by side.
///
/// `E` is stepped as a group slot with body velocity `u − E⁻¹uE`, `e` as a
/// vector slot; the membership family of `E₀` fixes the group.
pub fn simulate_commutator_pair(
    e0: &GroupElement,
    u: &InputSignal,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<CommutatorTrace> {
    let family = e0.family();
    let dist = e0.mat().distance_to_identity();
    if dist >= 1.0 {
        return Err(Error::domain(format!("E0 must lie in B(I, 1), got distance {dist}")));
    }
    config.validate()?;
    u.validate(family)?;
    if !(t_end >= 0.0) {
        return Err(Error::domain(format!("t_end must be nonnegative, got {t_end}")));
    }
    let steps = libm::round(t_end / config.dt) as usize;
    let mut bundle = Bundle {
        groups: alloc::vec![e0.mat().clone()],
        vectors: alloc::vec![mat_log_principal(e0.mat())?],
    };
    let mut trace = CommutatorTrace {
        times: alloc::vec![0.0],
        group: alloc::vec![bundle.groups[0].clone()],
        algebra: alloc::vec![bundle.vectors[0].clone()],
    };
    for k in 0..steps {
        let t = k as f64 * config.dt;
        bundle = step_bundle(&bundle, &[family], t, config, |t, b| {
            let u = input_matrix(u, t, family);
            let e_big = &b.groups[0];
            let e_small = &b.vectors[0];
            Ok(Bundle {
                groups: alloc::vec![&(e_big * &u) - &(&u * e_big)],
                vectors: alloc::vec![&(e_small * &u) - &(&u * e_small)],
            })
        })?;
        trace.times.push((k + 1) as f64 * config.dt);
        trace.group.push(bundle.groups[0].clone());
        trace.algebra.push(bundle.vectors[0].clone());
    }
    Ok(trace)
}

fn input_matrix(u: &InputSignal, t: f64, family: GroupFamily) -> SquareMatrix {
    u.eval(t, family).into_matrix()
}

/// Largest defining-equation defect of both group slots over a trajectory.
pub fn max_membership_defect(traj: &Trajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in &traj.records {
        worst = worst
            .max(membership_defect(r.plant.group.mat(), r.plant.family())?)
            .max(membership_defect(r.estimate.group.mat(), r.estimate.family())?);
    }
    Ok(worst)
}
