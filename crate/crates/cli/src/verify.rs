//! Property suite behind `lieobs verify`.
//!
//! Every check measures a worst-case defect over a deterministic sample
//! and passes when the defect does not exceed its threshold.

use std::fmt::Write as _;

use lieobs::dynamics::{
    integrate_step, linearization_spectrum, simulate, simulate_commutator_pair, InitialState, InputSignal,
    IntegratorConfig, Scenario, Scheme,
};
use lieobs::eigen::Eigenvalue;
use lieobs::expm::mat_exp;
use lieobs::group::{
    antisymmetric_part, project_algebra, rotation_angle, skew3, GroupElement, GroupFamily, GroupKind,
};
use lieobs::invariant::{closed_form_error_solution, decay_rate_fit, left_error, right_error};
use lieobs::logm::mat_log_principal;
use lieobs::matrix::adjoint;
use lieobs::observer::{
    lfso_direct_rhs, lfso_passive_rhs, lfso_rhs_projection_form, ChainState, LogMethod, ObserverGains,
    ObserverKind,
};
use lieobs::rng::NormalSampler;
use lieobs::SquareMatrix;

use crate::error::CliError;

pub const SELECTORS: [(&str, &str); 8] = [
    ("explog", "exp/log round trips on GL(3), SO(3) and SL(3)"),
    ("adjoint", "right log error equals the conjugated left log error along trajectories"),
    ("log-decay", "matched log errors decay exactly as exp(-a0 t)"),
    ("oracle", "rkmk4 solution of dE/dt = -a0 E log E against its closed form"),
    ("log-equivalence", "log of the group solution tracks the algebra solution"),
    ("antisym", "antisymmetric projection of a rotation against its scaled logarithm"),
    ("spectrum", "linearised chain spectrum against the gain polynomial roots"),
    ("order", "empirical convergence order of rkmk4 and lie_euler"),
];

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Random cases per family for `explog` and per check for `antisym`.
    pub trials: usize,
    /// Initial errors for `log-equivalence`.
    pub equivalence_cases: usize,
    /// Initial errors for `oracle`.
    pub oracle_cases: usize,
    /// Gain sets for `spectrum`.
    pub gain_sets: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            trials: 1000,
            equivalence_cases: 100,
            oracle_cases: 10,
            gain_sets: 50,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub note: String,
}

impl CheckLine {
    fn new(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckLine {
            name: name.into(),
            measured,
            threshold,
            note: String::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.measured <= self.threshold
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(CheckLine::passed)
    }

    /// Tab-separated: check, measured, threshold, PASS/FAIL, note.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("check\tmeasured\tthreshold\tstatus\tnote\n");
        for l in &self.lines {
            let status = if l.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{}\t{:e}\t{:e}\t{status}\t{}", l.name, l.measured, l.threshold, l.note);
        }
        let _ = writeln!(out, "all\t\t\t{}\t", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

/// Runs one selector, or every selector for `"all"`.
pub fn run_property_suite(selector: &str, opts: &SuiteOptions) -> Result<Report, CliError> {
    let names: Vec<&str> = if selector == "all" {
        SELECTORS.iter().map(|s| s.0).collect()
    } else if SELECTORS.iter().any(|s| s.0 == selector) {
        vec![selector]
    } else {
        return Err(CliError::UnknownSelector(selector.to_owned()));
    };
    let mut report = Report::default();
    for name in names {
        let lines = match name {
            "explog" => explog(opts),
            "adjoint" => adjoint_along_trajectories(opts),
            "log-decay" => log_decay(),
            "oracle" => oracle(opts),
            "log-equivalence" => log_equivalence(opts),
            "antisym" => antisym(opts),
            "spectrum" => spectrum(opts),
            "order" => order(),
            _ => unreachable!("selector list and dispatch disagree"),
        };
        report.lines.extend(lines);
    }
    Ok(report)
}

fn normal_matrix(s: &mut NormalSampler, n: usize) -> SquareMatrix {
    SquareMatrix::from_fn(n, |_, _| s.standard_normal())
}

/// Random algebra element of `family` with 2-norm `r`.
fn algebra_with_norm(s: &mut NormalSampler, family: GroupFamily, r: f64) -> SquareMatrix {
    loop {
        let a = project_algebra(&normal_matrix(s, family.dim()), family)
            .expect("dimension matches")
            .into_matrix();
        let norm = a.operator_norm();
        if norm > 1e-8 {
            return a.scale(r / norm);
        }
    }
}

fn unit_vector(s: &mut NormalSampler) -> [f64; 3] {
    loop {
        let v = [s.standard_normal(), s.standard_normal(), s.standard_normal()];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn rotation(axis: [f64; 3], theta: f64) -> GroupElement {
    skew3([theta * axis[0], theta * axis[1], theta * axis[2]])
        .exp()
        .expect("skew matrices exponentiate")
}

fn families() -> [GroupFamily; 3] {
    [GroupKind::GL, GroupKind::SO, GroupKind::SL].map(|k| GroupFamily::new(k, 3).expect("n = 3 is valid"))
}

fn explog(opts: &SuiteOptions) -> Vec<CheckLine> {
    let mut s = NormalSampler::new(opts.seed);
    let mut lines = Vec::new();
    for family in families() {
        let (mut log_exp, mut exp_log) = (0.0f64, 0.0f64);
        for _ in 0..opts.trials {
            let r = 0.6 * s.uniform();
            let a = algebra_with_norm(&mut s, family, r);
            let back = mat_exp(&a).and_then(|x| mat_log_principal(&x));
            log_exp = log_exp.max(back.map_or(f64::INFINITY, |b| (&b - &a).operator_norm()));

            let r = 2.5 * s.uniform();
            let x = mat_exp(&algebra_with_norm(&mut s, family, r)).expect("finite argument");
            let back = mat_log_principal(&x).and_then(|l| mat_exp(&l));
            exp_log = exp_log.max(back.map_or(f64::INFINITY, |b| (&b - &x).operator_norm() / x.operator_norm()));
        }
        lines.push(
            CheckLine::new(format!("explog.log_exp.{family}"), log_exp, 1e-9)
                .with_note(format!("{} cases, |A| <= 0.6", opts.trials)),
        );
        lines.push(
            CheckLine::new(format!("explog.exp_log.{family}"), exp_log, 1e-9)
                .with_note(format!("{} cases, relative, X = exp(B), |B| <= 2.5", opts.trials)),
        );
    }
    lines
}

fn printed_r0() -> SquareMatrix {
    SquareMatrix::from_rows([
        [0.6330, -0.1116, -0.7660],
        [0.7128, -0.3020, 0.6330],
        [-0.3020, -0.9467, -0.1116],
    ])
}

fn chain_r0() -> (SquareMatrix, SquareMatrix) {
    (
        SquareMatrix::from_rows([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]),
        SquareMatrix::from_rows([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]]),
    )
}

fn full_state_scenario(kind: ObserverKind, a0: f64, t_end: f64) -> Scenario {
    Scenario {
        name: kind.name().to_owned(),
        family: GroupFamily::so3(),
        observer: kind,
        gains: ObserverGains::full_state(a0).expect("finite gain"),
        plant: InitialState::full_state(printed_r0()),
        estimate: InitialState::full_state(SquareMatrix::identity(3)),
        input: InputSignal::Sinusoid,
        noise_sigma: 0.0,
        seed: None,
        integrator: IntegratorConfig::default(),
        t_end,
        output_period: 1e-2,
        log_method: LogMethod::Principal,
    }
}

fn chain_scenario(kind: ObserverKind, t_end: f64) -> Scenario {
    let (r0, w0) = chain_r0();
    Scenario {
        gains: ObserverGains::new(vec![1.0, 2.0]).expect("finite gains"),
        plant: InitialState {
            group: r0,
            algebra: vec![w0],
        },
        estimate: InitialState {
            group: SquareMatrix::identity(3),
            algebra: vec![SquareMatrix::zeros(3)],
        },
        ..full_state_scenario(kind, 1.0, t_end)
    }
}

fn adjoint_along_trajectories(opts: &SuiteOptions) -> Vec<CheckLine> {
    let mut scenarios = Vec::new();
    for kind in ObserverKind::ALL {
        for sigma in [0.0, 0.4] {
            let mut s = if kind.is_full_state() {
                full_state_scenario(kind, 1.0, 5.0)
            } else {
                chain_scenario(kind, 5.0)
            };
            s.noise_sigma = sigma;
            s.seed = (sigma > 0.0).then_some(opts.seed);
            scenarios.push(s);
        }
    }
    let mut worst = 0.0f64;
    let mut samples = 0usize;
    for s in &scenarios {
        let Ok(traj) = simulate(s) else {
            worst = f64::INFINITY;
            continue;
        };
        for r in &traj.records {
            let x = &r.plant.group;
            let (Ok(el), Ok(er)) = (left_error(x, &r.estimate.group), right_error(x, &r.estimate.group)) else {
                continue;
            };
            if let (Ok(ll), Ok(lr)) = (mat_log_principal(el.mat()), mat_log_principal(er.mat())) {
                let moved = adjoint(x.mat(), &ll).expect("invertible plant state");
                worst = worst.max((&lr - &moved).operator_norm());
                samples += 1;
            }
        }
    }
    vec![CheckLine::new("adjoint.log_errors", worst, 1e-9)
        .with_note(format!("{samples} samples over {} runs", scenarios.len()))]
}

fn matched_log(kind: ObserverKind, r: &lieobs::dynamics::SimRecord) -> Option<f64> {
    if kind.is_passive() {
        r.norms.log_right
    } else {
        r.norms.log_left
    }
}

fn log_decay() -> Vec<CheckLine> {
    let mut lines = Vec::new();
    for kind in [ObserverKind::LfsoPassive, ObserverKind::LfsoDirect] {
        let (mut dev, mut rate_err) = (0.0f64, 0.0f64);
        for a0 in [0.5, 1.0, 2.0] {
            let traj = match simulate(&full_state_scenario(kind, a0, 5.0)) {
                Ok(t) if t.failure.is_none() => t,
                _ => {
                    dev = f64::INFINITY;
                    continue;
                }
            };
            let e0 = matched_log(kind, &traj.records[0]).unwrap_or(f64::NAN);
            let mut samples = Vec::with_capacity(traj.records.len());
            for r in &traj.records {
                let v = matched_log(kind, r).unwrap_or(f64::NAN);
                let want = (-a0 * r.t).exp() * e0;
                dev = dev.max(if v.is_nan() { f64::INFINITY } else { (v - want).abs() / want });
                samples.push((r.t, v));
            }
            rate_err = rate_err.max(decay_rate_fit(&samples).map_or(f64::INFINITY, |f| (f.rate + a0).abs()));
        }
        let which = if kind.is_passive() { "right" } else { "left" };
        lines.push(
            CheckLine::new(format!("log-decay.{}.relative_deviation", kind.name()), dev, 1e-5)
                .with_note(format!("|log E_{which}|, a0 in {{0.5, 1, 2}}, t in [0, 5]")),
        );
        lines.push(CheckLine::new(format!("log-decay.{}.rate", kind.name()), rate_err, 1e-3));
    }
    lines
}

/// Largest oracle defect, final defect and largest `‖E − I‖` of one run.
pub fn oracle_run(scheme: Scheme, dt: f64, e0: &GroupElement, a0: f64, t_end: f64) -> (f64, f64, f64) {
    let cfg = IntegratorConfig::with_scheme(scheme, dt);
    let steps = (t_end / dt).round() as usize;
    let mut state = ChainState::full_state(e0.clone());
    let (mut worst, mut last, mut farthest) = (0.0f64, 0.0f64, e0.mat().distance_to_identity());
    for k in 0..steps {
        let next = integrate_step(
            &state,
            |_, s: &ChainState| {
                let l = mat_log_principal(s.group.mat())?;
                Ok(vec![(s.group.mat() * &l).scale(-a0)])
            },
            k as f64 * dt,
            &cfg,
        );
        let Ok(next) = next else {
            return (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        };
        state = next;
        let exact = closed_form_error_solution(e0, a0, (k + 1) as f64 * dt).expect("log of E0 exists");
        last = (state.group.mat() - exact.mat()).operator_norm();
        worst = worst.max(last);
        farthest = farthest.max(state.group.mat().distance_to_identity());
    }
    (worst, last, farthest)
}

fn oracle(opts: &SuiteOptions) -> Vec<CheckLine> {
    let mut s = NormalSampler::new(opts.seed ^ 0x0a);
    let gl3 = families()[0];
    let (mut worst, mut farthest) = (0.0f64, 0.0f64);
    for _ in 0..opts.oracle_cases {
        let r = 0.6 * s.uniform();
        let e0 = GroupElement::new(gl3, mat_exp(&algebra_with_norm(&mut s, gl3, r)).expect("finite"), 1e-9)
            .expect("exponentials are invertible");
        let (w, _, f) = oracle_run(Scheme::Rkmk4, 1e-3, &e0, 1.0, 5.0);
        worst = worst.max(w);
        farthest = farthest.max(f);
    }
    vec![
        CheckLine::new("oracle.rkmk4_defect", worst, 1e-8)
            .with_note(format!("{} cases on GL(3), |log E0| <= 0.6, dt = 1e-3, t in [0, 5]", opts.oracle_cases)),
        // strict inequality: the ball is open
        CheckLine::new("oracle.max_distance_to_identity", farthest, 1.0 - f64::EPSILON),
    ]
}

fn log_equivalence(opts: &SuiteOptions) -> Vec<CheckLine> {
    let mut s = NormalSampler::new(opts.seed ^ 0x0c);
    let gl3 = families()[0];
    let mut worst = 0.0f64;
    for _ in 0..opts.equivalence_cases {
        let r = 0.5 * s.uniform();
        let m = normal_matrix(&mut s, 3);
        let m = m.scale(r / m.operator_norm().max(1e-300));
        let e0 = GroupElement::new(gl3, &SquareMatrix::identity(3) + &m, 1e-9).expect("near identity");
        let gap = simulate_commutator_pair(&e0, &InputSignal::Sinusoid, 5.0, &IntegratorConfig::default())
            .and_then(|tr| tr.max_log_discrepancy());
        worst = worst.max(gap.unwrap_or(f64::INFINITY));
    }
    vec![CheckLine::new("log-equivalence.max_gap", worst, 1e-6).with_note(format!(
        "{} cases, E0 in B(I, 0.5) on GL(3), t in [0, 5]",
        opts.equivalence_cases
    ))]
}

fn antisym(opts: &SuiteOptions) -> Vec<CheckLine> {
    let mut s = NormalSampler::new(opts.seed ^ 0x0d);
    let (mut identity, mut forms) = (0.0f64, 0.0f64);
    let lo = 0.01;
    let hi = std::f64::consts::PI - 0.1;
    for _ in 0..opts.trials {
        let theta = lo + (hi - lo) * s.uniform();
        let r = rotation(unit_vector(&mut s), theta);
        let d = match (rotation_angle(&r), mat_log_principal(r.mat())) {
            (Ok(th), Ok(l)) => (&antisymmetric_part(r.mat()) - &l.scale(th.sin() / th)).operator_norm(),
            _ => f64::INFINITY,
        };
        identity = identity.max(d);

        let xhat = rotation(unit_vector(&mut s), 3.0 * s.uniform());
        let y = xhat.compose(&r.inverse().expect("rotation")).expect("same family");
        let u = skew3([s.standard_normal(), s.standard_normal(), s.standard_normal()]);
        let a0 = 0.1 + 2.9 * s.uniform();
        for (kind, f) in [
            (ObserverKind::LfsoPassive, lfso_passive_rhs as fn(&_, &_, &_, &_) -> _),
            (ObserverKind::LfsoDirect, lfso_direct_rhs),
        ] {
            let g = ObserverGains::full_state(a0).expect("finite");
            let d = match (f(&xhat, &y, &u, &g), lfso_rhs_projection_form(kind, &xhat, &y, &u, a0)) {
                (Ok(a), Ok(b)) => (&a - &b).operator_norm(),
                _ => f64::INFINITY,
            };
            forms = forms.max(d);
        }
    }
    let note = format!("{} rotations, angle in [0.01, pi - 0.1]", opts.trials);
    vec![
        CheckLine::new("antisym.identity", identity, 1e-9).with_note(note.clone()),
        CheckLine::new("antisym.observer_forms", forms, 1e-9).with_note(note),
    ]
}

/// Monic polynomial with the given roots, constant term first.
fn poly_from_roots(roots: &[Eigenvalue]) -> Vec<f64> {
    let mut c: Vec<(f64, f64)> = vec![(1.0, 0.0)];
    for z in roots {
        let mut next = vec![(0.0, 0.0); c.len() + 1];
        for (k, &(re, im)) in c.iter().enumerate() {
            next[k + 1].0 += re;
            next[k + 1].1 += im;
            next[k].0 -= z.re * re - z.im * im;
            next[k].1 -= z.re * im + z.im * re;
        }
        c = next;
    }
    c.iter().map(|&(re, _)| re).collect()
}

fn random_roots(s: &mut NormalSampler, d: usize) -> Vec<Eigenvalue> {
    loop {
        let mut roots = Vec::with_capacity(d);
        while roots.len() < d {
            let re = -0.2 - 2.8 * s.uniform();
            if roots.len() + 2 <= d && s.uniform() < 0.5 {
                let im = 0.3 + 1.7 * s.uniform();
                roots.push(Eigenvalue { re, im });
                roots.push(Eigenvalue { re, im: -im });
            } else {
                roots.push(Eigenvalue::real(re));
            }
        }
        let separated = roots
            .iter()
            .enumerate()
            .all(|(i, a)| roots[i + 1..].iter().all(|b| a.distance(b) > 0.3));
        if separated {
            return roots;
        }
    }
}

/// Largest distance when pairing each root `n` times with its nearest unused eigenvalue.
fn match_with_multiplicity(found: &[Eigenvalue], roots: &[Eigenvalue], n: usize) -> f64 {
    if found.len() != roots.len() * n {
        return f64::INFINITY;
    }
    let mut used = vec![false; found.len()];
    let mut worst = 0.0f64;
    for r in roots {
        for _ in 0..n {
            let best = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, z)| (i, z.distance(r)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            let Some((i, dist)) = best else { return f64::INFINITY };
            used[i] = true;
            worst = worst.max(dist);
        }
    }
    worst
}

fn spectrum(opts: &SuiteOptions) -> Vec<CheckLine> {
    let mut s = NormalSampler::new(opts.seed ^ 0x0e);
    let mut worst = 0.0f64;
    for k in 0..opts.gain_sets {
        let d = 2 + k % 3;
        let n = 1 + (k / 3) % 3;
        let roots = random_roots(&mut s, d);
        let coeffs = poly_from_roots(&roots);
        let dist = ObserverGains::new(coeffs[..d].to_vec())
            .and_then(|g| linearization_spectrum(&g, n))
            .map_or(f64::INFINITY, |spec| match_with_multiplicity(&spec, &roots, n));
        worst = worst.max(dist);
    }
    vec![CheckLine::new("spectrum.root_distance", worst, 1e-8)
        .with_note(format!("{} gain sets, d in {{2, 3, 4}}, n in {{1, 2, 3}}", opts.gain_sets))]
}

/// Least-squares slope of `log(defect)` against `log(dt)`.
pub fn empirical_order(scheme: Scheme, dts: &[f64], e0: &GroupElement) -> f64 {
    let pts: Vec<(f64, f64)> = dts
        .iter()
        .map(|&dt| (dt.ln(), oracle_run(scheme, dt, e0, 1.0, 5.0).1.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn order() -> Vec<CheckLine> {
    let e0 = skew3([0.3, -0.35, 0.2]).exp().expect("skew");
    let p4 = empirical_order(Scheme::Rkmk4, &[0.1, 0.05, 0.025], &e0);
    let p1 = empirical_order(Scheme::LieEuler, &[0.01, 0.005, 0.0025], &e0);
    vec![
        CheckLine::new("order.rkmk4", (p4 - 4.0).abs(), 0.3).with_note(format!("order {p4:.4}, target 4")),
        CheckLine::new("order.lie_euler", (p1 - 1.0).abs(), 0.2).with_note(format!("order {p1:.4}, target 1")),
    ]
}
